import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zdi.engine import zdi_general
from zdi.geometry import (
    clip_halfplane,
    contains_zero,
    range_polygon,
    support_value,
    support_values,
    to_csv,
    to_svg,
)
from zdi.matrix_core import cyclic_shift, path_matrix

from conftest import general_matrix, normal_matrix

seeds = st.integers(0, 2**32 - 1)


def sample(seed, lo=2, hi=5):
    rng = np.random.default_rng(seed)
    return general_matrix(rng, int(rng.integers(lo, hi + 1)))


class TestSupport:
    def test_diag(self):
        A = np.diag([3.0, 1.0, -2.0])
        assert support_value(A, 1, 0.0) == pytest.approx(3)
        assert support_value(A, 3, 0.0) == pytest.approx(-2)
        assert support_value(A, 1, np.pi) == pytest.approx(2)

    def test_jordan_is_constant(self):
        vals = support_values(path_matrix([1]), 1, np.linspace(0, 2 * np.pi, 17))
        np.testing.assert_allclose(vals, 0.5, atol=1e-14)

    def test_k_range(self):
        with pytest.raises(ValueError):
            support_value(np.eye(2), 3, 0.0)

    @given(seeds, st.floats(0, 2 * np.pi))
    @settings(max_examples=25, deadline=None)
    def test_vectorised_matches_scalar(self, seed, theta):
        A = sample(seed)
        for k in range(1, A.shape[0] + 1):
            assert support_values(A, k, [theta])[0] == pytest.approx(support_value(A, k, theta),
                                                                     abs=1e-12)


class TestPolygon:
    def test_identity_is_point(self):
        for k in (1, 2, 3):
            poly = range_polygon(np.eye(3), k)
            assert not poly.empty and poly.diameter <= 1e-9
            assert poly.contains(1.0, inflate=1e-9)

    def test_diag001_k2_is_origin(self):
        poly = range_polygon(np.diag([0, 0, 1.0]), 2)
        assert not poly.empty and poly.diameter <= 1e-9
        assert poly.contains(0.0, inflate=1e-9)

    def test_jordan_disc_area(self):
        poly = range_polygon(path_matrix([1]), 1)
        assert abs(poly.area - np.pi / 4) <= 1e-4

    def test_empty(self):
        # two eigenvalues cannot both be compressed to one point
        poly = range_polygon(np.diag([1.0, 1j]), 2)
        assert poly.empty and poly.area == 0.0 and not poly.contains(0.0)

    def test_min_directions(self):
        with pytest.raises(ValueError):
            range_polygon(np.eye(2), 1, N=4)

    def test_triangle_vertices(self):
        eigs = np.array([1, 1j, -1 - 1j])
        poly = range_polygon(np.diag(eigs), 1)
        for z in eigs:
            assert np.min(np.abs(poly.vertices - z)) <= 1e-9
        # outer approximation: edges off the sampled normals add small corner slivers
        assert 1.5 - 1e-9 <= poly.area <= 1.5 * 1.01

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_convex_and_ccw(self, seed):
        A = sample(seed)
        for k in range(1, A.shape[0] + 1):
            poly = range_polygon(A, k, N=180)
            assert poly.is_convex(1e-9)
            assert poly.area >= -1e-12

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_nested(self, seed):
        A = sample(seed)
        outer = range_polygon(A, 1, N=180)
        tol = 1e-8 * (1 + np.linalg.norm(A, 2))
        for k in range(2, A.shape[0] + 1):
            for z in range_polygon(A, k, N=180).vertices:
                assert outer.contains(z, inflate=tol)

    @given(seeds, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
    @settings(max_examples=20, deadline=None)
    def test_translation(self, seed, c):
        A = sample(seed)
        n = A.shape[0]
        k = 1 + seed % n
        shifted = range_polygon(A + c * np.eye(n), k, N=180)
        moved = range_polygon(A, k, N=180).translated(c)
        np.testing.assert_allclose(shifted.support_samples, moved.support_samples, atol=1e-9)
        assert shifted.empty == moved.empty
        assert abs(shifted.area - moved.area) <= 1e-7 * (1 + abs(moved.area))

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_outer_approximation_normal(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        A = normal_matrix(rng, n)
        poly = range_polygon(A, 1, N=90)
        tol = 1e-8 * (1 + np.linalg.norm(A, 2))
        for z in np.linalg.eigvals(A):
            assert poly.contains(z, inflate=tol)

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_zero_membership_matches_index(self, seed):
        A = sample(seed)
        d = zdi_general(A).d
        for k in range(1, A.shape[0] + 1):
            assert contains_zero(A, k) == (k <= d)


class TestClip:
    def test_halves_square(self):
        square = [complex(-1, -1), complex(1, -1), complex(1, 1), complex(-1, 1)]
        out = clip_halfplane(square, 0.0, 0.0)
        xs = sorted(round(z.real, 12) for z in out)
        assert len(out) == 4 and xs[-1] == 0.0

    def test_everything_removed(self):
        assert clip_halfplane([0j, 1 + 0j, 1j], 0.0, -5.0) == []


class TestContainsZero:
    def test_examples(self):
        assert contains_zero(np.diag([0, 0, 1.0]), 2)
        assert not contains_zero(np.diag([0, 0, 1.0]), 3)
        assert contains_zero(cyclic_shift(5), 2)
        assert not contains_zero(cyclic_shift(5), 3)
        assert not contains_zero(np.diag([1.0, 2.0]), 1)


class TestExport:
    def test_csv(self):
        poly = range_polygon(path_matrix([1]), 1, N=16)
        lines = to_csv(poly).splitlines()
        assert lines[0] == "theta,support"
        split = lines.index("vertex_re,vertex_im")
        assert split == 17
        assert len(lines) - split - 1 == poly.vertices.size
        t, h = map(float, lines[2].split(","))
        assert t == poly.support_samples[1, 0] and h == poly.support_samples[1, 1]

    def test_svg(self):
        poly = range_polygon(np.diag([1, 1j, -1]), 1, N=32)
        svg = to_svg(poly, eigenvalues=[1, 1j, -1])
        assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
        assert "<polygon" in svg and svg.count("<circle") == 3
        assert ">Re<" in svg and ">Im<" in svg

    def test_svg_empty(self):
        svg = to_svg(range_polygon(np.diag([1.0, 1j]), 2, N=16))
        assert "<polygon" not in svg and "(empty)" in svg
