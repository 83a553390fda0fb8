"""Labeled-graph presentations of sofic subshifts."""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .contractions import LOWER, ContractionSystem, check_side
from .errors import InputError, PresentationWarning, ResourceLimitError
from .symbolic import DEFAULT_WORD_CAP, Alphabet, TransitionMatrix, Word


@dataclass(frozen=True)
class LabeledGraph:
    """Vertices ``1..vertex_count`` and edges ``(source, target, label)``.

    ``vertex_names`` is optional and only used for display.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    alphabet: Alphabet | None = None
    vertex_names: tuple = ()

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InputError("a labeled graph needs at least one vertex")
        edges = tuple((int(s), int(d), int(lab)) for s, d, lab in self.edges)
        object.__setattr__(self, "edges", edges)
        m = self.alphabet.size if self.alphabet is not None else None
        for s, d, lab in edges:
            if not (1 <= s <= self.vertex_count and 1 <= d <= self.vertex_count):
                raise InputError(f"edge {(s, d, lab)} uses a vertex outside 1..{self.vertex_count}")
            if lab < 1 or (m is not None and lab > m):
                raise InputError(f"edge {(s, d, lab)} has a label outside the alphabet")
        if self.vertex_names and len(self.vertex_names) != self.vertex_count:
            raise InputError("one name per vertex is required")

    @property
    def labels(self) -> set[int]:
        return {lab for _, _, lab in self.edges}

    def out_edges(self, v: int) -> list[tuple[int, int]]:
        """``(target, label)`` pairs leaving ``v``, in input order."""
        return [(d, lab) for s, d, lab in self.edges if s == v]

    def adjacency_counts(self) -> np.ndarray:
        """``K x K`` matrix of edge multiplicities (0-based indices)."""
        a = np.zeros((self.vertex_count, self.vertex_count))
        for s, d, _ in self.edges:
            a[s - 1, d - 1] += 1
        return a

    def letter_incidence(self) -> dict[int, np.ndarray]:
        """Edge-count matrix per label; their sum is :meth:`adjacency_counts`."""
        out: dict[int, np.ndarray] = {}
        for s, d, lab in self.edges:
            mat = out.setdefault(lab, np.zeros((self.vertex_count, self.vertex_count)))
            mat[s - 1, d - 1] += 1
        return out


@dataclass(frozen=True)
class RightResolvingCheck:
    """Outcome of :func:`validate_right_resolving`; truthy when ok."""

    violations: tuple[tuple[int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_right_resolving(graph: LabeledGraph) -> RightResolvingCheck:
    """List every ``(vertex, label)`` that labels two or more outgoing edges."""
    seen: dict[tuple[int, int], int] = defaultdict(int)
    for s, _, lab in graph.edges:
        seen[s, lab] += 1
    return RightResolvingCheck(tuple(sorted(key for key, count in seen.items() if count > 1)))


@dataclass(frozen=True, eq=False)
class WeightedAdjacency:
    entries: np.ndarray
    t: float
    side: str


def weighted_adjacency(graph: LabeledGraph, contractions: ContractionSystem, t: float,
                       side: str = LOWER) -> WeightedAdjacency:
    """Matrix whose ``(i, j)`` entry sums ``c(label)^t`` over edges ``i -> j``."""
    check_side(side)
    if not validate_right_resolving(graph):
        warnings.warn("graph is not right-resolving; lower bounds are not guaranteed",
                      PresentationWarning, stacklevel=2)
    cs = contractions.constants(side)
    a = np.zeros((graph.vertex_count, graph.vertex_count))
    for s, d, lab in graph.edges:
        if lab > len(cs):
            raise InputError(f"label {lab} has no contraction constant")
        a[s - 1, d - 1] += float(cs[lab - 1]) ** t
    return WeightedAdjacency(a, t, side)


def sft_as_labeled_graph(matrix: TransitionMatrix) -> LabeledGraph:
    """One vertex per block; each 1-entry becomes an edge labeled by the last
    letter of its column block."""
    a = matrix.entries
    edges = []
    for i, j in zip(*np.nonzero(a)):
        label = matrix.labels[j]
        if not isinstance(label, tuple) or not label:
            raise InputError("column labels must be nonempty words")
        edges.append((int(i) + 1, int(j) + 1, label[-1]))
    alphabet = matrix.forbidden.alphabet if matrix.forbidden is not None else None
    return LabeledGraph(matrix.size, tuple(edges), alphabet, tuple(matrix.labels))


def _step_subsets(graph: LabeledGraph):
    """``transition[(frozenset, label)] -> frozenset`` built lazily."""
    by_source: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for s, d, lab in graph.edges:
        by_source[s].append((d, lab))
    cache: dict[frozenset, dict[int, frozenset]] = {}

    def successors(state: frozenset) -> dict[int, frozenset]:
        if state not in cache:
            nxt: dict[int, set] = defaultdict(set)
            for v in state:
                for d, lab in by_source[v]:
                    nxt[lab].add(d)
            cache[state] = {lab: frozenset(vs) for lab, vs in sorted(nxt.items())}
        return cache[state]

    return successors


def label_words(graph: LabeledGraph, n: int, cap: int = DEFAULT_WORD_CAP) -> list[Word]:
    """Distinct label sequences of length-``n`` paths.

    Each word is produced once by tracking the set of vertices where a
    path carrying the word so far can end.
    """
    successors = _step_subsets(graph)
    start = frozenset(range(1, graph.vertex_count + 1))
    out: list[Word] = []
    stack: list[tuple[Word, frozenset]] = [((), start)]
    while stack:
        w, state = stack.pop()
        if len(w) == n:
            out.append(w)
            if len(out) > cap:
                raise ResourceLimitError(f"more than {cap} label words of length {n}")
            continue
        for lab, nxt in successors(state).items():
            stack.append((w + (lab,), nxt))
    return out


def word_sum(graph: LabeledGraph, contractions: ContractionSystem, t: float, n: int,
             side: str = LOWER) -> float:
    """``sum over W_n of c_w^t`` without listing the words.

    Words are grouped by the set of vertices their paths can end in; the
    number of such sets does not grow with ``n``.
    """
    cs = contractions.constants(side)
    successors = _step_subsets(graph)
    layer = {frozenset(range(1, graph.vertex_count + 1)): 1.0}
    for _ in range(n):
        nxt: dict[frozenset, float] = defaultdict(float)
        for state, mass in layer.items():
            for lab, target in successors(state).items():
                nxt[target] += mass * float(cs[lab - 1]) ** t
        layer = nxt
    return math.fsum(layer.values())


def count_paths(graph: LabeledGraph, n: int) -> int:
    """Number of edge paths of length ``n`` (words counted with multiplicity)."""
    a = graph.adjacency_counts().astype(object)
    total = np.ones(graph.vertex_count, dtype=object)
    for _ in range(n):
        total = a @ total
    return int(sum(total))


def lemma51_sandwich(graph: LabeledGraph, contractions: ContractionSystem, t: float, n: int,
                     side: str = LOWER, cap: int = DEFAULT_WORD_CAP) -> tuple[float, float, float]:
    """``(S/K, sum over W_n of c_w^t, S)`` where ``S`` sums ``A_{G,t}^n``.

    The middle term is obtained by brute-force enumeration. For a
    right-resolving graph on ``K`` vertices the triple is nondecreasing.
    """
    words = label_words(graph, n, cap)
    middle = math.fsum(float(contractions.word_weight(w, t, side)) for w in words)
    a = weighted_adjacency(graph, contractions, t, side).entries
    upper = float(np.linalg.matrix_power(a, n).sum())
    return upper / graph.vertex_count, middle, upper


def even_shift_graph(names: Iterable[str] = ("0", "1")) -> LabeledGraph:
    """The two-vertex presentation ``v1 -1-> v1, v1 -0-> v2, v2 -0-> v1``.

    Letter 1 of the returned alphabet is named ``"0"`` and letter 2 ``"1"``.
    """
    alphabet = Alphabet(2, tuple(names))
    zero, one = 1, 2
    return LabeledGraph(2, ((1, 1, one), (1, 2, zero), (2, 1, zero)), alphabet)
