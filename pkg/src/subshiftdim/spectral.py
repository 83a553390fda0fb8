"""Nonnegative matrices: strong components and the Perron root."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

DEFAULT_EIG_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000

# squaring the iteration operator stops paying off (and costs O(N^3)) beyond this
_MAX_SQUARING_SIZE = 512


def _as_square(m) -> np.ndarray:
    a = np.asarray(getattr(m, "entries", m), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    return a


def strongly_connected_components(adjacency: np.ndarray) -> list[tuple[int, ...]]:
    """Tarjan's algorithm, iterative.

    Components come out in reverse topological order: a component never
    has an edge into a component listed after it.
    """
    n = adjacency.shape[0]
    succ = [np.flatnonzero(adjacency[v]).tolist() for v in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[tuple[int, ...]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(tuple(sorted(comp)))
    return components


@dataclass(frozen=True, eq=False)
class SccDecomposition:
    """Strong components of a square matrix and its block-triangular form.

    ``order[new] = old`` lists the original indices in permuted order and
    ``position[old] = new`` is its inverse. After permutation the matrix is
    block lower-triangular with ``component_matrices`` on the diagonal.
    ``transitional_entries`` lists, per ordered pair of distinct
    components ``(source, target)``, the original ``(row, col)`` positions
    of the nonzero entries leading from one to the other.
    """

    components: tuple[tuple[int, ...], ...]
    order: np.ndarray
    position: np.ndarray
    component_matrices: tuple[np.ndarray, ...]
    transitional_entries: tuple[tuple[int, int, tuple[tuple[int, int], ...]], ...]

    def permuted(self, m) -> np.ndarray:
        a = _as_square(m)
        return a[np.ix_(self.order, self.order)]

    def block(self, m, c: int) -> np.ndarray:
        idx = list(self.components[c])
        return _as_square(m)[np.ix_(idx, idx)]

    def is_live(self, c: int) -> bool:
        """False for a 1x1 zero block (a vertex on no cycle)."""
        comp = self.components[c]
        return len(comp) > 1 or self.component_matrices[c][0, 0] > 0


def scc_decompose(m) -> SccDecomposition:
    a = _as_square(m)
    components = strongly_connected_components(a != 0)
    order = np.array([v for comp in components for v in comp], dtype=int)
    position = np.empty_like(order)
    position[order] = np.arange(len(order))
    owner = np.empty(len(order), dtype=int)
    for c, comp in enumerate(components):
        owner[list(comp)] = c
    blocks = tuple(a[np.ix_(list(comp), list(comp))].copy() for comp in components)
    crossing: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i, j in zip(*np.nonzero(a)):
        ci, cj = owner[i], owner[j]
        if ci != cj:
            crossing.setdefault((int(ci), int(cj)), []).append((int(i), int(j)))
    transitional = tuple((s, t, tuple(pos)) for (s, t), pos in sorted(crossing.items()))
    return SccDecomposition(tuple(components), order, position, blocks, transitional)


def is_irreducible(m) -> bool:
    a = _as_square(m)
    d = scc_decompose(a)
    return len(d.components) == 1 and d.is_live(0)


@dataclass(frozen=True)
class SpectralResult:
    """Perron root estimate.

    ``bracket`` is the Collatz-Wielandt interval ``[min_i (Mv)_i/v_i,
    max_i (Mv)_i/v_i]`` for the returned vector, which contains the
    spectral radius of an irreducible matrix.
    """

    radius: float
    iterations: int
    converged: bool
    vector: np.ndarray | None = None
    bracket: tuple[float, float] | None = None


def _perron_irreducible(a: np.ndarray, tol: float, max_iter: int) -> SpectralResult:
    n = a.shape[0]
    if n == 1:
        r = float(a[0, 0])
        return SpectralResult(r, 0, True, np.ones(1), (r, r))
    # the shift makes the iteration aperiodic; rho(a + eps I) = rho(a) + eps
    eps = 1e-3 * (1.0 + float(a.sum(axis=1).max()))
    shifted = a + eps * np.eye(n)
    op = shifted.copy()
    steps = 1
    v = np.full(n, 1.0 / n)
    done = 0
    estimate = float("nan")
    lo = hi = float("nan")
    while done < max_iter:
        w = op @ v
        top = w.max()
        if top <= 0:
            raise ConvergenceError("power iteration collapsed to zero", best=0.0)
        v = w / top
        done += steps
        if v.min() > 0:
            ratios = (shifted @ v) / v
            lo, hi = float(ratios.min()), float(ratios.max())
            estimate = 0.5 * (lo + hi) - eps
            if hi - lo <= tol * max(1.0, hi):
                return SpectralResult(max(estimate, 0.0), done, True, v, (lo - eps, hi - eps))
        if n <= _MAX_SQUARING_SIZE:
            op = op @ op
            op /= op.max()
            steps *= 2
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} steps "
        f"(bracket [{lo - eps}, {hi - eps}])",
        best=estimate,
    )


def spectral_radius(
    m,
    tol: float = DEFAULT_EIG_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    decomposition: SccDecomposition | None = None,
) -> SpectralResult:
    """Spectral radius of a nonnegative matrix.

    Irreducible blocks use shifted power iteration; a reducible matrix
    gets the largest radius among its diagonal blocks. ``decomposition``
    may be passed when the same sparsity pattern is reused many times.
    """
    a = _as_square(m)
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise InputError("spectral_radius needs finite nonnegative entries")
    d = decomposition if decomposition is not None else scc_decompose(a)
    if len(d.components) == 1:
        if not d.is_live(0):
            return SpectralResult(0.0, 0, True, None, (0.0, 0.0))
        return _perron_irreducible(a, tol, max_iter)
    best = SpectralResult(0.0, 0, True, None, (0.0, 0.0))
    total = 0
    for c, comp in enumerate(d.components):
        if not d.is_live(c):
            continue
        idx = list(comp)
        res = _perron_irreducible(a[np.ix_(idx, idx)], tol, max_iter)
        total += res.iterations
        if res.radius > best.radius:
            best = res
    return SpectralResult(best.radius, total, True, None, best.bracket)
