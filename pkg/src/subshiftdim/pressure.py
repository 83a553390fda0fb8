"""Topological pressure and the dimension bounds it yields.

For a presentation with transition matrix ``A`` the lower pressure is
``P(t) = log rho(A S^(t))`` where ``S^(t)`` weights each column by the
contraction constant of the letter that column appends, raised to ``t``.
``P`` is convex and strictly decreasing, and its unique zero ``h`` is a
lower bound for the Hausdorff, packing and box dimensions of the
subfractal. The same construction with the upper constants gives ``H``.
For a labeled graph the weighted adjacency matrix ``A_{G,t}`` takes the
place of ``A S^(t)``.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .contractions import LOWER, UPPER, ContractionSystem, check_side
from .errors import (
    ConvergenceError,
    EmptyLanguageError,
    InputError,
    NotApplicableError,
    PresentationWarning,
)
from .sofic import LabeledGraph, validate_right_resolving
from .sofic import word_sum as graph_word_sum
from .spectral import (
    DEFAULT_EIG_TOL,
    DEFAULT_MAX_ITER,
    SccDecomposition,
    scc_decompose,
    spectral_radius,
)
from .symbolic import (
    DEFAULT_WORD_CAP,
    ForbiddenSet,
    TransitionMatrix,
    build_transition_matrix,
    enumerate_allowed_words,
)

__all__ = [
    "ContractionSystem",
    "WeightMatrices",
    "build_weight_matrices",
    "word_sum_via_transfer",
    "word_sum",
    "PressureFunction",
    "RootResult",
    "bisect_zero",
    "find_pressure_zero",
    "ComponentBound",
    "DimensionReport",
    "dimension_bounds",
    "cylinder_measure",
    "boundedness_diagnostics",
]

DEFAULT_ROOT_TOL = 1e-10
ROOT_MAX_ITER = 200

ALL_DIMENSIONS = ("hausdorff", "packing", "lower_box", "upper_box")


# -- SFT weight matrices -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightMatrices:
    """Diagonals of ``S0, S, S0bar, Sbar`` raised to the power ``t``.

    ``s0[i]`` is the weight of row word ``i``; ``s[j]`` the weight of the
    last letter of column word ``j``.
    """

    t: float
    s0: np.ndarray
    s: np.ndarray
    s0_bar: np.ndarray
    s_bar: np.ndarray
    a: np.ndarray

    def diagonal(self, name: str) -> np.ndarray:
        return np.diag(getattr(self, name))

    @property
    def AS(self) -> np.ndarray:
        return self.a * self.s[np.newaxis, :]

    @property
    def AS_bar(self) -> np.ndarray:
        return self.a * self.s_bar[np.newaxis, :]

    def product(self, side: str = LOWER) -> np.ndarray:
        return self.AS if check_side(side) == LOWER else self.AS_bar

    def initial(self, side: str = LOWER) -> np.ndarray:
        return self.s0 if check_side(side) == LOWER else self.s0_bar


def _word_labels(matrix: TransitionMatrix) -> list[tuple[int, ...]]:
    labels = list(matrix.labels)
    if not all(isinstance(w, tuple) and w for w in labels):
        raise InputError("weight matrices need rows labeled by nonempty words")
    return labels


def build_weight_matrices(matrix: TransitionMatrix, contractions: ContractionSystem,
                          t: float) -> WeightMatrices:
    labels = _word_labels(matrix)
    _check_letters({a for w in labels for a in w}, contractions)

    def row(side):
        return np.array([float(contractions.word_weight(w, 1, side)) ** t for w in labels])

    def col(side):
        return np.array([float(contractions.constant(w[-1], side)) ** t for w in labels])

    return WeightMatrices(t, row(LOWER), col(LOWER), row(UPPER), col(UPPER),
                          np.array(matrix.entries))


def _check_letters(letters, contractions: ContractionSystem):
    missing = sorted(a for a in letters if not 1 <= a <= contractions.size)
    if missing:
        raise InputError(f"letters {missing} have no contraction constants")


def word_sum_via_transfer(matrix: TransitionMatrix, contractions: ContractionSystem, t: float,
                          n: int, side: str = LOWER) -> float:
    """``sum_{i,j} [S0^(t) (A S^(t))^(n-k+1)]_{ij}``, which equals the sum of
    ``c_w^t`` over the allowed words of length ``n``."""
    labels = _word_labels(matrix)
    k = len(labels[0]) + 1
    if n < k:
        raise InputError(f"transfer sums need n >= k = {k}, got n = {n}")
    weights = build_weight_matrices(matrix, contractions, t)
    op = weights.product(side)
    v = weights.initial(side).copy()
    for _ in range(n - k + 1):
        v = v @ op
    return math.fsum(v)


def _as_presentation(presentation):
    if isinstance(presentation, ForbiddenSet):
        return build_transition_matrix(presentation)
    if isinstance(presentation, (TransitionMatrix, LabeledGraph)):
        return presentation
    raise InputError(f"unsupported presentation {type(presentation).__name__}")


def word_sum(presentation, contractions: ContractionSystem, t: float, n: int,
             side: str = LOWER) -> float:
    """Sum of ``c_w^t`` over allowed words of length ``n`` for any presentation."""
    p = _as_presentation(presentation)
    if isinstance(p, LabeledGraph):
        return graph_word_sum(p, contractions, t, n, side)
    k = len(_word_labels(p)[0]) + 1
    if n >= k:
        return word_sum_via_transfer(p, contractions, t, n, side)
    # below the window length nothing is excluded
    letters = sorted({a for w in p.labels for a in w})
    per_letter = math.fsum(float(contractions.constant(a, side)) ** t for a in letters)
    return per_letter**n


# -- pressure --------------------------------------------------------------


class _WeightedFamily:
    """``t -> sum_l c_l^t E_l`` for the per-letter incidence matrices ``E_l``."""

    def __init__(self, presentation, contractions: ContractionSystem):
        p = _as_presentation(presentation)
        self.presentation = p
        self.contractions = contractions
        if isinstance(p, LabeledGraph):
            self.incidence = p.letter_incidence()
            self.support = p.adjacency_counts()
            self.vertex_labels = tuple(str(v) for v in (p.vertex_names or range(1, p.vertex_count + 1)))
        else:
            labels = _word_labels(p)
            a = np.array(p.entries)
            self.incidence = {}
            for j, w in enumerate(labels):
                mat = self.incidence.setdefault(w[-1], np.zeros_like(a))
                mat[:, j] = a[:, j]
            self.support = a
            fmt = p.forbidden.alphabet.format if p.forbidden is not None else (
                lambda w: "".join(map(str, w)))
            self.vertex_labels = tuple(fmt(w) for w in labels)
        _check_letters(self.incidence, contractions)
        self.letters = sorted(self.incidence)

    def matrix(self, t: float, side: str = LOWER) -> np.ndarray:
        cs = self.contractions.constants(side)
        out = np.zeros_like(self.support)
        for lab in self.letters:
            out += float(cs[lab - 1]) ** t * self.incidence[lab]
        return out

    def c_max(self, side: str = LOWER) -> float:
        cs = self.contractions.constants(side)
        return max(float(cs[lab - 1]) for lab in self.letters) if self.letters else 0.5


class PressureFunction:
    """``t -> P(t)`` (``side="lower"``) or ``t -> Pbar(t)`` (``side="upper"``).

    ``method="spectral"`` returns ``log rho`` of the weighted matrix;
    ``method="truncated"`` returns ``(1/n) log`` of the word sum at length
    ``n``, which tends to the same value as ``n`` grows.
    """

    def __init__(self, presentation, contractions: ContractionSystem, side: str = LOWER,
                 method: str = "spectral", n: int | None = None,
                 eig_tol: float = DEFAULT_EIG_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 block: Sequence[int] | None = None):
        self.side = check_side(side)
        if method not in ("spectral", "truncated"):
            raise InputError(f"method must be 'spectral' or 'truncated', got {method!r}")
        if method == "truncated" and (n is None or n < 1):
            raise InputError("the truncated method needs a positive word length n")
        if method == "truncated" and block is not None:
            raise InputError("component restriction is only available for the spectral method")
        self.method = method
        self.n = n
        self.eig_tol = eig_tol
        self.max_iter = max_iter
        self.family = _WeightedFamily(presentation, contractions)
        self.block = None if block is None else list(block)
        support = self.family.support
        if self.block is not None:
            support = support[np.ix_(self.block, self.block)]
        self.decomposition: SccDecomposition = scc_decompose(support)
        self.c_max = self.family.c_max(self.side)

    def weighted_matrix(self, t: float) -> np.ndarray:
        m = self.family.matrix(t, self.side)
        if self.block is not None:
            m = m[np.ix_(self.block, self.block)]
        return m

    def radius(self, t: float) -> float:
        return spectral_radius(self.weighted_matrix(t), self.eig_tol, self.max_iter,
                               decomposition=self.decomposition).radius

    def __call__(self, t: float) -> float:
        if self.method == "spectral":
            value = self.radius(t)
            n = 1
        else:
            value = word_sum(self.family.presentation, self.family.contractions, t, self.n,
                             self.side)
            n = self.n
        if value <= 0:
            raise EmptyLanguageError("no allowed words: pressure is -inf")
        return math.log(value) / n


@dataclass(frozen=True)
class RootResult:
    root: float
    lo: float
    hi: float
    iterations: int


def bisect_zero(func: Callable[[float], float], c_max: float,
                root_tol: float = DEFAULT_ROOT_TOL, max_iter: int = ROOT_MAX_ITER) -> RootResult:
    """Zero of a strictly decreasing function with ``func(0) >= 0``.

    The upper end of the bracket comes from ``P(t) <= P(0) + t log c_max``
    and is doubled if a truncated pressure has not yet turned negative.
    """
    p0 = func(0.0)
    if p0 < -1e-9:
        raise EmptyLanguageError(f"P(0) = {p0} < 0: the language is empty")
    if p0 <= root_tol:
        return RootResult(0.0, 0.0, 0.0, 0)
    lo = 0.0
    hi = max(1.0, p0 / -math.log(c_max)) + 1.0
    for _ in range(60):
        if func(hi) < 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise ConvergenceError("could not bracket the pressure zero", best=hi)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return RootResult(mid, lo, hi, it)
        val = func(mid)
        if val > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= root_tol and abs(val) <= root_tol:
            return RootResult(mid, lo, hi, it)
    raise ConvergenceError(f"bisection did not converge in {max_iter} steps",
                           best=0.5 * (lo + hi))


def find_pressure_zero(pressure: PressureFunction, root_tol: float = DEFAULT_ROOT_TOL) -> float:
    """Unique ``t >= 0`` with ``P(t) = 0``, to within ``root_tol``."""
    return bisect_zero(pressure, pressure.c_max, root_tol).root


# -- dimension bounds --------------------------------------------------------


@dataclass(frozen=True)
class ComponentBound:
    """Bounds contributed by one strongly connected component."""

    index: int
    vertices: tuple[str, ...]
    h: float
    H: float
    degenerate: bool = False
    iterations: tuple[int, int] = (0, 0)

    def to_dict(self) -> dict:
        return {"index": self.index, "vertices": list(self.vertices), "h": self.h, "H": self.H,
                "degenerate": self.degenerate, "iterations": list(self.iterations)}

    @classmethod
    def from_dict(cls, d: dict) -> "ComponentBound":
        return cls(int(d["index"]), tuple(d["vertices"]), float(d["h"]), float(d["H"]),
                   bool(d["degenerate"]), tuple(int(i) for i in d["iterations"]))


@dataclass(frozen=True)
class DimensionReport:
    """``h <= dim <= H`` for every dimension named in ``applies_to``."""

    h: float
    H: float
    per_component: tuple[ComponentBound, ...]
    irreducible: bool
    applies_to: tuple[str, ...]
    presentation: str
    root_tol: float
    eig_tol: float
    flags: tuple[str, ...] = ()
    transitional_entries: int = 0
    osc_assumed: bool = True

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "H": self.H,
            "per_component": [c.to_dict() for c in self.per_component],
            "irreducible": self.irreducible,
            "applies_to": list(self.applies_to),
            "presentation": self.presentation,
            "root_tol": self.root_tol,
            "eig_tol": self.eig_tol,
            "flags": list(self.flags),
            "transitional_entries": self.transitional_entries,
            "osc_assumed": self.osc_assumed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DimensionReport":
        return cls(
            h=float(d["h"]),
            H=float(d["H"]),
            per_component=tuple(ComponentBound.from_dict(c) for c in d["per_component"]),
            irreducible=bool(d["irreducible"]),
            applies_to=tuple(d["applies_to"]),
            presentation=str(d["presentation"]),
            root_tol=float(d["root_tol"]),
            eig_tol=float(d["eig_tol"]),
            flags=tuple(d["flags"]),
            transitional_entries=int(d["transitional_entries"]),
            osc_assumed=bool(d["osc_assumed"]),
        )


def _worker_count() -> int:
    raw = os.environ.get("SUBSHIFTDIM_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"SUBSHIFTDIM_THREADS must be an integer, got {raw!r}") from None
    return n if n > 0 else (os.cpu_count() or 1)


def dimension_bounds(presentation, contractions: ContractionSystem,
                     root_tol: float = DEFAULT_ROOT_TOL, eig_tol: float = DEFAULT_EIG_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> DimensionReport:
    """Zeros ``h``, ``H`` of the lower and upper pressure.

    A reducible presentation is split into strongly connected components;
    each live component gets its own pair ``(h_i, H_i)`` and the report
    carries the maxima. Only the Hausdorff bound is claimed in that case.
    """
    family = _WeightedFamily(presentation, contractions)
    p = family.presentation
    flags: list[str] = []
    if isinstance(p, LabeledGraph) and not validate_right_resolving(p):
        warnings.warn("graph is not right-resolving; h is not a guaranteed lower bound",
                      PresentationWarning, stacklevel=2)
        flags.append("upper-side only")
    decomposition = scc_decompose(family.support)
    live = [c for c in range(len(decomposition.components)) if decomposition.is_live(c)]
    if not live:
        raise EmptyLanguageError("the presentation has no cycles: the subshift is empty")

    def solve(c: int) -> ComponentBound:
        comp = decomposition.components[c]
        roots = []
        for side in (LOWER, UPPER):
            pf = PressureFunction(p, contractions, side, eig_tol=eig_tol, max_iter=max_iter,
                                  block=comp)
            roots.append(bisect_zero(pf, pf.c_max, root_tol))
        lower, upper = roots
        degenerate = lower.iterations == 0 and upper.iterations == 0
        return ComponentBound(c, tuple(family.vertex_labels[v] for v in comp), lower.root,
                              upper.root, degenerate, (lower.iterations, upper.iterations))

    workers = min(_worker_count(), len(live))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bounds = tuple(pool.map(solve, live))
    else:
        bounds = tuple(solve(c) for c in live)

    irreducible = len(decomposition.components) == 1
    if any(b.degenerate for b in bounds):
        flags.append("degenerate: single-orbit component")
    return DimensionReport(
        h=max(b.h for b in bounds),
        H=max(b.H for b in bounds),
        per_component=bounds,
        irreducible=irreducible,
        applies_to=ALL_DIMENSIONS if irreducible else ("hausdorff",),
        presentation="sofic" if isinstance(p, LabeledGraph) else "sft",
        root_tol=root_tol,
        eig_tol=eig_tol,
        flags=tuple(flags),
        transitional_entries=sum(len(e[2]) for e in decomposition.transitional_entries),
    )


# -- finite-n diagnostics ----------------------------------------------------


def _sum(values):
    values = list(values)
    if values and all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


def cylinder_measure(word: Sequence[int], n: int, h, presentation,
                     contractions: ContractionSystem, side: str = LOWER,
                     cap: int = DEFAULT_WORD_CAP):
    """``nu_n([w])``: share of the ``c^h`` mass of ``W_{n+len(w)}`` carried by
    words that start with ``w``.

    Exact when the constants are fractions and ``h`` is an integer.
    """
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    word = tuple(word)
    p = presentation.forbidden if (isinstance(presentation, TransitionMatrix)
                                   and presentation.forbidden is not None) else presentation
    words = enumerate_allowed_words(p, n + len(word), cap)
    weights = [contractions.word_weight(w, h, side) for w in words]
    total = _sum(weights)
    inside = _sum(wt for w, wt in zip(words, weights) if w[:len(word)] == word)
    if not inside:
        return total * 0
    return inside / total


@dataclass(frozen=True)
class DiagnosticRow:
    n: int
    lower_sum: float
    upper_sum: float


def boundedness_diagnostics(presentation, contractions: ContractionSystem, h: float, H: float,
                            n_max: int, n_min: int = 1) -> list[DiagnosticRow]:
    """Word sums ``sum c_w^h`` and ``sum cbar_w^H`` for ``n_min <= n <= n_max``.

    At the pressure zeros both sequences stay bounded away from 0 and
    infinity, and the lower one never drops below 1.
    """
    family = _WeightedFamily(presentation, contractions)
    decomposition = scc_decompose(family.support)
    if not (len(decomposition.components) == 1 and decomposition.is_live(0)):
        raise NotApplicableError("boundedness diagnostics need an irreducible presentation")
    p = family.presentation
    return [DiagnosticRow(n, word_sum(p, contractions, h, n, LOWER),
                          word_sum(p, contractions, H, n, UPPER))
            for n in range(n_min, n_max + 1)]
