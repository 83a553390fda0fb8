"""Affine IFS attractors restricted to a subshift, and box counting.

Points are generated by a chaos game that walks a labeled graph: each
step applies the map of the traversed edge's label to the current point,
so the newest map is the outermost one in the composition.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .contractions import ContractionSystem
from .errors import InputError, PresentationError
from .sofic import LabeledGraph, sft_as_labeled_graph
from .symbolic import ForbiddenSet, TransitionMatrix, build_transition_matrix

log = logging.getLogger(__name__)

DEFAULT_BURN_IN = 64
MIN_BURN_IN = 30


@dataclass(frozen=True, eq=False)
class AffineIFS:
    """Maps ``x -> L x + b``, one per letter, in dimension 1 or 2.

    ``osc_box`` is an optional ``(low, high)`` corner pair for the open set
    the user asserts satisfies the open set condition; it is recorded but
    never verified.
    """

    linear: tuple[np.ndarray, ...]
    offset: tuple[np.ndarray, ...]
    osc_box: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        if not self.linear or len(self.linear) != len(self.offset):
            raise InputError("need one linear part and one offset per map")
        lin = tuple(np.atleast_2d(np.asarray(a, dtype=float)) for a in self.linear)
        off = tuple(np.atleast_1d(np.asarray(b, dtype=float)) for b in self.offset)
        d = off[0].shape[0]
        if d not in (1, 2):
            raise InputError(f"only dimensions 1 and 2 are supported, got {d}")
        for i, (a, b) in enumerate(zip(lin, off), start=1):
            if a.shape != (d, d) or b.shape != (d,):
                raise InputError(f"map {i}: shapes {a.shape} and {b.shape} do not match d={d}")
            s = np.linalg.svd(a, compute_uv=False)
            if s[0] >= 1 or s[-1] <= 0:
                raise InputError(f"map {i} is not an invertible contraction (singular values {s})")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", off)

    @classmethod
    def similarities(cls, ratio: float, offsets: Sequence[Sequence[float]]) -> "AffineIFS":
        d = len(offsets[0])
        return cls(tuple(ratio * np.eye(d) for _ in offsets), tuple(np.asarray(b) for b in offsets))

    @property
    def dimension(self) -> int:
        return self.offset[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.linear)

    def lipschitz_constants(self) -> ContractionSystem:
        """Smallest and largest singular value of each linear part."""
        lower, upper = [], []
        for a in self.linear:
            s = np.linalg.svd(a, compute_uv=False)
            lower.append(float(s[-1]))
            upper.append(float(s[0]))
        return ContractionSystem(tuple(lower), tuple(upper))

    def check_constants(self, contractions: ContractionSystem, tol: float = 1e-9):
        own = self.lipschitz_constants()
        if own.size != contractions.size:
            raise InputError(f"IFS has {own.size} maps but {contractions.size} constants were given")
        for i in range(own.size):
            if (abs(own.lower[i] - float(contractions.lower[i])) > tol
                    or abs(own.upper[i] - float(contractions.upper[i])) > tol):
                raise InputError(
                    f"map {i + 1}: singular values ({own.lower[i]}, {own.upper[i]}) do not match "
                    f"the declared constants ({contractions.lower[i]}, {contractions.upper[i]})")

    def apply(self, letter: int, points: np.ndarray) -> np.ndarray:
        a, b = self.linear[letter - 1], self.offset[letter - 1]
        return points @ a.T + b

    def bounding_box(self, iterations: int = 200) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box containing the attractor of the full IFS.

        Starts from a ball that every map sends into itself and shrinks it
        by replacing the box with the hull of its images.
        """
        d = self.dimension
        radius = max(np.linalg.norm(b) / (1 - np.linalg.norm(a, 2))
                     for a, b in zip(self.linear, self.offset))
        lo, hi = -radius * np.ones(d), radius * np.ones(d)
        for _ in range(iterations):
            corners = _box_corners(lo, hi)
            images = np.vstack([self.apply(i, corners) for i in range(1, self.size + 1)])
            new_lo, new_hi = images.min(axis=0), images.max(axis=0)
            if np.allclose(new_lo, lo, rtol=0, atol=1e-15) and np.allclose(new_hi, hi, rtol=0, atol=1e-15):
                break
            lo, hi = new_lo, new_hi
        return lo, hi


def _box_corners(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    if lo.shape[0] == 1:
        return np.array([[lo[0]], [hi[0]]])
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]]])


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Sampled attractor points.

    ``box`` is the ``(low, high)`` bounding box of the full attractor when
    known; box counting anchors its grid at ``low``.
    """

    points: np.ndarray
    seed: int | None = None
    burn_in: int = 0
    count: int = 0
    subshift: str = ""
    box: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def dimension(self) -> int:
        return self.points.shape[1] if self.points.ndim == 2 else 1


def _as_graph(presentation) -> LabeledGraph:
    if isinstance(presentation, LabeledGraph):
        return presentation
    if isinstance(presentation, ForbiddenSet):
        presentation = build_transition_matrix(presentation)
    if isinstance(presentation, TransitionMatrix):
        return sft_as_labeled_graph(presentation)
    raise InputError(f"unsupported presentation {type(presentation).__name__}")


def attractor_points(ifs: AffineIFS, presentation, count: int, burn_in: int = DEFAULT_BURN_IN,
                     seed: int = 0, subshift: str = "") -> PointCloud:
    """Chaos game on the presentation's graph.

    The walk starts at a uniformly chosen vertex with outgoing edges and at
    the origin, picks each next edge uniformly among the current vertex's
    out-edges, and emits the point after every step past ``burn_in``.
    """
    if count < 1:
        raise InputError(f"count must be positive, got {count}")
    if burn_in < MIN_BURN_IN:
        raise InputError(f"burn_in must be at least {MIN_BURN_IN}, got {burn_in}")
    graph = _as_graph(presentation)
    if max(graph.labels, default=0) > ifs.size:
        raise InputError(f"presentation uses letters up to {max(graph.labels)} but the IFS has "
                         f"{ifs.size} maps")
    out = [[] for _ in range(graph.vertex_count + 1)]
    for s, d, lab in graph.edges:
        out[s].append((d, lab))
    starts = [v for v in range(1, graph.vertex_count + 1) if out[v]]
    if not starts:
        raise PresentationError("the graph has no edges: the language is empty")

    rng = np.random.default_rng(seed)
    draws = rng.random(burn_in + count + 1)
    vertex = starts[int(draws[0] * len(starts))]
    dim = ifs.dimension
    coeffs = [(a.ravel().tolist(), b.tolist()) for a, b in zip(ifs.linear, ifs.offset)]
    pts = np.empty((count, dim))
    x = [0.0] * dim
    for step in range(burn_in + count):
        edges = out[vertex]
        if not edges:
            raise PresentationError(f"the walk reached vertex {vertex}, which has no out-edges; "
                                    "prune the presentation to its essential part")
        vertex, lab = edges[int(draws[step + 1] * len(edges))]
        a, b = coeffs[lab - 1]
        if dim == 1:
            x = [a[0] * x[0] + b[0]]
        else:
            x = [a[0] * x[0] + a[1] * x[1] + b[0], a[2] * x[0] + a[3] * x[1] + b[1]]
        if step >= burn_in:
            pts[step - burn_in] = x
    return PointCloud(pts, seed, burn_in, count, subshift, ifs.bounding_box())


@dataclass(frozen=True, eq=False)
class BoxCountResult:
    estimate: float
    scales: np.ndarray
    counts: np.ndarray
    r_squared: float
    fitted: np.ndarray = field(repr=False, default=None)
    warning: str | None = None

    def table(self) -> list[tuple[float, int]]:
        return [(float(r), int(n)) for r, n in zip(self.scales, self.counts)]


def geometric_scales(base: float, first: int, last: int) -> np.ndarray:
    """``base**-first, ..., base**-last``."""
    return np.array([float(base) ** -j for j in range(first, last + 1)])


def count_boxes(points: np.ndarray, scale: float, origin: np.ndarray) -> int:
    """Occupied cells of the grid with spacing ``scale`` anchored at ``origin``.

    Cells are closed on the right: a point on a grid line counts toward the
    lower cell. Chaos-game orbits land exactly on fixed points such as
    ``1.0``, which would otherwise open a spurious extra cell.
    """
    cells = np.floor((points - origin) / scale - 1e-9).astype(np.int64)
    np.maximum(cells, 0, out=cells)
    return len(np.unique(cells, axis=0))


def box_count_dimension(cloud: PointCloud, scales: Sequence[float]) -> BoxCountResult:
    """Slope of ``log N_r`` against ``-log r`` over a ladder of grid sizes.

    With six or more scales the largest and smallest are left out of the
    fit.
    """
    pts = np.asarray(cloud.points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    scales = np.sort(np.asarray(scales, dtype=float))[::-1]
    if len(pts) < 1000:
        raise InputError(f"box counting needs at least 1000 points, got {len(pts)}")
    if len(scales) < 4:
        raise InputError(f"box counting needs at least 4 scales, got {len(scales)}")
    origin = pts.min(axis=0)
    extent = float((pts.max(axis=0) - origin).max())
    if cloud.box is not None and extent > 0:
        origin = np.minimum(np.asarray(cloud.box[0], dtype=float), origin)
        extent = float((np.asarray(cloud.box[1], dtype=float) - origin).max())
    if extent == 0:
        msg = "all points coincide; dimension estimate is 0"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        ones = np.ones(len(scales), dtype=int)
        return BoxCountResult(0.0, scales, ones, 1.0, np.ones(len(scales), bool), msg)
    if scales[-1] <= 10 * np.finfo(float).eps or scales[0] > extent:
        raise InputError(f"scales must lie in (1e-15, {extent}] (the cloud's extent)")
    counts = np.array([count_boxes(pts, r, origin) for r in scales])
    fitted = np.ones(len(scales), dtype=bool)
    if len(scales) >= 6:
        fitted[0] = fitted[-1] = False
    x = -np.log(scales[fitted])
    y = np.log(counts[fitted])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return BoxCountResult(float(slope), scales, counts, r2, fitted)


def render_cloud(cloud: PointCloud, width: int, height: int, path) -> Path:
    """Write the cloud as a binary PGM (P5), brightness proportional to hits.

    One-dimensional clouds become a density strip repeated on every row.
    """
    if width < 1 or height < 1:
        raise InputError(f"image size must be positive, got {width}x{height}")
    path = Path(path)
    img = np.zeros((height, width), dtype=np.int64)
    pts = np.asarray(cloud.points, dtype=float)
    if pts.size == 0:
        warnings.warn("empty point cloud; writing a black image", RuntimeWarning, stacklevel=2)
    else:
        if pts.ndim == 1:
            pts = pts[:, None]
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        cols = np.minimum(((pts[:, 0] - lo[0]) / span[0] * width).astype(int), width - 1)
        if pts.shape[1] == 1:
            strip = np.bincount(cols, minlength=width)
            img[:] = strip[np.newaxis, :]
        else:
            rows = np.minimum(((pts[:, 1] - lo[1]) / span[1] * height).astype(int), height - 1)
            np.add.at(img, (height - 1 - rows, cols), 1)
    top = img.max()
    pixels = (img * 255 // top if top > 0 else img).astype(np.uint8)
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise OSError(f"could not write image to {path}: {exc}") from exc
    log.debug("wrote %dx%d image to %s", width, height, path)
    return path


def write_csv(cloud: PointCloud, path) -> Path:
    """One point per row, 17 significant digits, header ``x`` or ``x,y``."""
    path = Path(path)
    pts = np.asarray(cloud.points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    header = ["x", "y"][: pts.shape[1]]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for p in pts:
            writer.writerow([f"{v:.17g}" for v in p])
    return path


def read_pgm(path) -> tuple[int, int, int, bytes]:
    """Parse a binary PGM written by :func:`render_cloud`."""
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    if tokens[0] != "P5":
        raise InputError(f"{path} is not a binary PGM")
    width, height, maxval = (int(t) for t in tokens[1:])
    return width, height, maxval, data[pos + 1:]
