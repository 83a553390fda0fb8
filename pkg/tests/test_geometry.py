from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from subshiftdim import (
    Alphabet,
    ContractionSystem,
    InputError,
    LabeledGraph,
    PresentationError,
    dimension_bounds,
    normalize_forbidden_set,
)
from subshiftdim.documents import SystemDocument
from subshiftdim.geometry import (
    AffineIFS,
    PointCloud,
    attractor_points,
    box_count_dimension,
    count_boxes,
    geometric_scales,
    read_pgm,
    render_cloud,
    write_csv,
)

from .conftest import SYSTEMS

SQRT3 = math.sqrt(3)


@pytest.fixture
def sierpinski():
    return AffineIFS.similarities(0.5, [(0.0, 0.0), (0.5, 0.0), (0.25, SQRT3 / 4)])


@pytest.fixture
def cantor():
    return AffineIFS.similarities(1 / 3, [(0.0,), (2 / 3,)])


def _full(m):
    return normalize_forbidden_set([], Alphabet(m))


class TestAffineIFS:
    def test_constants(self):
        ifs = AffineIFS(([[0.5, 0.0], [0.0, 0.3]],), ([0.0, 0.0],))
        cs = ifs.lipschitz_constants()
        assert cs.lower == (0.3,) and cs.upper == (0.5,)
        ifs.check_constants(ContractionSystem((0.3,), (0.5,)))
        with pytest.raises(InputError):
            ifs.check_constants(ContractionSystem((0.3,), (0.6,)))

    def test_rejects_expansion(self):
        with pytest.raises(InputError):
            AffineIFS(([[1.2]],), ([0.0],))

    def test_rejects_dimension_three(self):
        with pytest.raises(InputError):
            AffineIFS.similarities(0.5, [(0.0, 0.0, 0.0)])

    def test_bounding_box(self, sierpinski, cantor):
        lo, hi = sierpinski.bounding_box()
        assert np.allclose(lo, [0, 0], atol=1e-12) and np.allclose(hi, [1, SQRT3 / 2], atol=1e-12)
        lo, hi = cantor.bounding_box()
        assert np.allclose([lo[0], hi[0]], [0, 1], atol=1e-12)


class TestChaosGame:
    def test_sierpinski_containment(self, sierpinski):
        cloud = attractor_points(sierpinski, _full(3), 100_000, seed=1)
        pts = cloud.points
        assert pts.shape == (100_000, 2)
        assert pts.min() >= -1e-12 and pts[:, 0].max() <= 1 + 1e-12
        assert pts[:, 1].max() <= SQRT3 / 2 + 1e-12
        # inside the triangle, not just its box
        assert np.all(pts[:, 1] <= SQRT3 * np.minimum(pts[:, 0], 1 - pts[:, 0]) + 1e-9)

    def test_forward_image_containment(self, sierpinski):
        cloud = attractor_points(sierpinski, _full(3), 5_000, seed=2)
        lo, hi = sierpinski.bounding_box()
        corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]]])
        boxes = [(sierpinski.apply(i, corners).min(axis=0), sierpinski.apply(i, corners).max(axis=0))
                 for i in (1, 2, 3)]
        inside = np.zeros(len(cloud.points), bool)
        for blo, bhi in boxes:
            inside |= np.all((cloud.points >= blo - 1e-9) & (cloud.points <= bhi + 1e-9), axis=1)
        assert inside.all()

    def test_single_map_fixed_point(self):
        ifs = AffineIFS.similarities(0.5, [(0.0,)])
        cloud = attractor_points(ifs, _full(1), 100, burn_in=40)
        assert np.abs(cloud.points).max() <= 2.0**-40

    def test_cantor_golden_gap(self, cantor, golden):
        cloud = attractor_points(cantor, golden, 50_000, burn_in=30, seed=3)
        x = cloud.points[:, 0]
        assert not np.any((x > 7 / 9) & (x < 8 / 9))
        # "22" = f2(f2(.)) covers [8/9, 1]; points there would need that composition
        assert x.max() <= 7 / 9 + 1e-12

    def test_cantor_full_reaches_right_cell(self, cantor):
        x = attractor_points(cantor, _full(2), 20_000, seed=3).points[:, 0]
        assert x.max() > 8 / 9

    def test_deterministic(self, sierpinski):
        a = attractor_points(sierpinski, _full(3), 2_000, seed=9)
        b = attractor_points(sierpinski, _full(3), 2_000, seed=9)
        c = attractor_points(sierpinski, _full(3), 2_000, seed=10)
        assert np.array_equal(a.points, b.points) and not np.array_equal(a.points, c.points)

    def test_dead_end(self, cantor):
        g = LabeledGraph(2, ((1, 1, 1), (1, 2, 2)), Alphabet(2))
        with pytest.raises(PresentationError):
            attractor_points(cantor, g, 10_000, seed=0)

    def test_bad_arguments(self, cantor):
        with pytest.raises(InputError):
            attractor_points(cantor, _full(2), 0)
        with pytest.raises(InputError):
            attractor_points(cantor, _full(2), 10, burn_in=5)
        with pytest.raises(InputError):
            attractor_points(cantor, _full(3), 10)


class TestBoxCounting:
    def test_scales(self):
        assert np.allclose(geometric_scales(3, 2, 4), [1 / 9, 1 / 27, 1 / 81])

    def test_exact_cantor_counts(self, cantor):
        cloud = attractor_points(cantor, _full(2), 100_000, seed=0)
        res = box_count_dimension(cloud, geometric_scales(3, 1, 6))
        assert list(res.counts) == [2, 4, 8, 16, 32, 64]
        assert res.estimate == pytest.approx(math.log(2) / math.log(3), abs=1e-9)

    def test_golden_counts_are_fibonacci(self, cantor, golden):
        cloud = attractor_points(cantor, golden, 100_000, seed=0)
        res = box_count_dimension(cloud, geometric_scales(3, 2, 7))
        assert list(res.counts) == [3, 5, 8, 13, 21, 34]
        assert [used for _, _, used in zip(res.scales, res.counts, res.fitted)] == [
            False, True, True, True, True, False]

    def test_doubling_count_never_decreases(self, sierpinski):
        small = attractor_points(sierpinski, _full(3), 20_000, seed=4)
        big = attractor_points(sierpinski, _full(3), 40_000, seed=4)
        scales = geometric_scales(2, 2, 7)
        for r in scales:
            assert count_boxes(big.points, r, big.box[0]) >= count_boxes(small.points, r, small.box[0])

    def test_degenerate_cloud(self):
        cloud = PointCloud(np.zeros((2000, 2)))
        with pytest.warns(RuntimeWarning):
            res = box_count_dimension(cloud, geometric_scales(2, 2, 7))
        assert res.estimate == 0.0 and res.warning

    def test_too_few(self, cantor):
        cloud = attractor_points(cantor, _full(2), 500)
        with pytest.raises(InputError):
            box_count_dimension(cloud, geometric_scales(3, 2, 7))
        cloud = attractor_points(cantor, _full(2), 5_000)
        with pytest.raises(InputError):
            box_count_dimension(cloud, geometric_scales(3, 2, 4))

    @pytest.mark.parametrize("name", ["golden_sft", "full_shift_3", "affine_bounds"])
    def test_sandwich(self, name):
        doc = SystemDocument.from_json((SYSTEMS / f"{name}.json").read_text())
        base, first, last = (float(x) for x in doc.settings["scales"].split(":"))
        cloud = attractor_points(doc.ifs, doc.presentation, 100_000, seed=0)
        est = box_count_dimension(cloud, geometric_scales(base, int(first), int(last))).estimate
        rep = dimension_bounds(doc.presentation, doc.contractions)
        assert rep.h - 0.08 <= est <= rep.H + 0.08


class TestOutput:
    def test_pgm(self, sierpinski, tmp_path):
        cloud = attractor_points(sierpinski, _full(3), 20_000)
        path = render_cloud(cloud, 512, 512, tmp_path / "s.pgm")
        data = path.read_bytes()
        assert data.startswith(b"P5\n512 512\n255\n")
        w, h, maxval, pixels = read_pgm(path)
        assert (w, h, maxval, len(pixels)) == (512, 512, 255, 262144)
        assert max(pixels) == 255

    def test_pgm_shows_missing_cell(self, tmp_path):
        ifs = AffineIFS.similarities(0.5, [(0.0, 0.0), (0.5, 0.0), (0.25, SQRT3 / 4)])
        fs = normalize_forbidden_set([(2, 2)], Alphabet(3))
        cloud = attractor_points(ifs, fs, 50_000)
        x, y = cloud.points[:, 0], cloud.points[:, 1]
        # f2(f2(triangle)) is the triangle with corners (0.75, 0), (1, 0), (0.875, sqrt3/8)
        assert not np.any((x > 0.75 + 1e-9) & (y < SQRT3 * (1 - x) - 1e-9) & (y < SQRT3 / 8))
        w, h, _, pixels = read_pgm(render_cloud(cloud, 64, 64, tmp_path / "g.pgm"))
        img = np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)
        assert img[-2:, 57:62].max() == 0 and img[-2:, 2:10].max() > 0

    def test_empty_cloud(self, tmp_path):
        cloud = PointCloud(np.empty((0, 2)))
        with pytest.warns(RuntimeWarning):
            path = render_cloud(cloud, 8, 4, tmp_path / "e.pgm")
        _, _, _, pixels = read_pgm(path)
        assert pixels == bytes(32)

    def test_bad_path(self, cantor, tmp_path):
        cloud = attractor_points(cantor, _full(2), 100)
        with pytest.raises(OSError, match="missing"):
            render_cloud(cloud, 8, 8, tmp_path / "missing" / "x.pgm")

    def test_csv(self, cantor, tmp_path):
        cloud = attractor_points(cantor, _full(2), 50)
        path = write_csv(cloud, tmp_path / "p.csv")
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["x"] and len(rows) == 51
        assert np.array_equal(np.array([float(r[0]) for r in rows[1:]]), cloud.points[:, 0])
