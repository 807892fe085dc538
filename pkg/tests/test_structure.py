import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zdi.engine import zdi_general
from zdi.errors import NotDivisible, NotOnBoundary, ValidationError
from zdi.matrix_core import conjugate, cyclic_shift, direct_sum, path_matrix, random_unitary
from zdi.special_forms import zdi_hermitian
from zdi.structure import (
    boundary_extreme_analysis,
    characterize_n_minus_1,
    check_kernel_guarantees,
    classify_3x3,
    common_kernel,
    deflate_zero,
    factor_out_z,
    kernel_dim,
    kippenhahn_cubic,
    sharp_two_thirds_matrix,
)

from conftest import corner_matrix, general_matrix

seeds = st.integers(0, 2**32 - 1)
NILPOTENT_T = np.array([[0, 1, 1], [0, 0, 1], [0, 0, 0]], dtype=complex)
JORDAN3 = path_matrix([1, 1])


class TestKernels:
    def test_padded(self):
        B = np.random.default_rng(0).standard_normal((3, 3)) + 0j
        assert common_kernel(direct_sum(B, np.zeros((2, 2)))).shape[1] >= 2

    def test_sharp_n3(self):
        A = sharp_two_thirds_matrix(3)
        # ones at (2,3) and (3,1), 1-indexed
        expected = np.zeros((3, 3))
        expected[1, 2] = expected[2, 0] = 1
        np.testing.assert_array_equal(A, expected)
        assert common_kernel(A).shape[1] == 0

    def test_invertible(self):
        assert common_kernel(np.eye(4)).shape[1] == 0

    def test_basis_is_kernel(self):
        A = corner_matrix(np.random.default_rng(1), 6, 5)
        K = common_kernel(A)
        assert K.shape[1] >= 1
        assert np.linalg.norm(A @ K) <= 1e-8 * np.linalg.norm(A)
        assert np.linalg.norm(A.conj().T @ K) <= 1e-8 * np.linalg.norm(A)

    def test_kernel_dim_jordan(self):
        assert kernel_dim(JORDAN3) == 1


class TestDeflation:
    def test_padded_block(self):
        rng = np.random.default_rng(2)
        C = np.diag([1.0, 2.0]) + 0j
        U = random_unitary(5, rng)
        A = conjugate(direct_sum(C, np.zeros((3, 3))), U)
        rep = deflate_zero(A)
        assert rep.reducing_multiplicity == 3
        np.testing.assert_allclose(np.sort(np.linalg.eigvals(rep.B).real), [1, 2], atol=1e-10)
        assert rep.residual <= 1e-8 * np.linalg.norm(A, 2)

    def test_large_index(self):
        rng = np.random.default_rng(3)
        # two index-2 3x3 blocks give d = 4 in dimension 6; padding by 0_3 gives n = 9, d = 7
        blocks = [conjugate(JORDAN3, random_unitary(3, rng)) for _ in range(2)]
        A = conjugate(direct_sum(*blocks, np.zeros((3, 3))), random_unitary(9, rng))
        rep = deflate_zero(A)
        assert rep.d == 7 and rep.guaranteed_lower_bound == 3
        assert rep.reducing_multiplicity >= 3 and rep.d_B == 4

    def test_shift6_no_claim(self):
        rep = deflate_zero(cyclic_shift(6))
        assert rep.d == 3 and rep.guaranteed_lower_bound is None and rep.reducing_multiplicity == 0

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 8))
        A = corner_matrix(rng, n, int(rng.integers(1, n + 1)))
        rep = deflate_zero(A)
        k = rep.reducing_multiplicity
        rebuilt = rep.U @ direct_sum(rep.B, np.zeros((k, k))) @ rep.U.conj().T if rep.B.size else 0 * A
        assert np.linalg.norm(rebuilt - A, 2) <= 1e-8 * max(np.linalg.norm(A, 2), 1)

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_guarantees_hold(self, seed):
        rng = np.random.default_rng(seed)
        A = general_matrix(rng, int(rng.integers(2, 8)))
        d = zdi_general(A).d
        kdim, r = check_kernel_guarantees(A, d)
        n = A.shape[0]
        if d > n // 2:
            assert kdim >= 2 * d - n
        if d > 2 * n // 3:
            assert r >= 3 * d - 2 * n


class TestKippenhahn:
    def test_zero(self):
        c = kippenhahn_cubic(np.zeros((3, 3)))
        assert c.coefficient(0, 0, 3) == pytest.approx(1)
        assert np.sum(np.abs(c.coeffs)) == pytest.approx(1)

    def test_diag100(self):
        c = kippenhahn_cubic(np.diag([1.0, 0, 0]))
        # z^2 (x + z)
        assert c.coefficient(1, 0, 2) == pytest.approx(1)
        assert c.coefficient(0, 0, 3) == pytest.approx(1)
        q = factor_out_z(c)
        # q = z (x + z): reducible
        assert q(1.0, 0.0, 1.0) == pytest.approx(2)
        assert not q.is_irreducible()

    def test_nilpotent_eigenvalues(self):
        c = kippenhahn_cubic(JORDAN3)
        # p(1, i, -z) = det(A - z I) = -z^3
        for z in (0.3, -1.2, 2.0 + 1j):
            assert abs(c(1, 1j, -z) + z ** 3) <= 1e-9

    def test_not_divisible(self):
        with pytest.raises(NotDivisible):
            factor_out_z(kippenhahn_cubic(NILPOTENT_T))

    def test_z_cubed_quotient(self):
        q = factor_out_z(kippenhahn_cubic(np.zeros((3, 3))))
        np.testing.assert_allclose(q.coeffs, [0, 0, 0, 0, 0, 1], atol=1e-12)

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_matches_determinant(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = kippenhahn_cubic(A)
        for x, y, z in rng.standard_normal((10, 3)):
            direct = c.direct(x, y, z).real
            assert abs(c(x, y, z).real - direct) <= 1e-9 * max(1, abs(direct))

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_support_roots(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = kippenhahn_cubic(A)
        scale = max(1, np.linalg.norm(A, 2)) ** 3
        for t in rng.uniform(0, 2 * np.pi, 5):
            for lam in np.linalg.eigvalsh(np.cos(t) * c.re + np.sin(t) * c.im):
                assert abs(c(np.cos(t), np.sin(t), -lam)) <= 1e-8 * scale

    def test_requires_3x3(self):
        with pytest.raises(ValidationError):
            kippenhahn_cubic(np.zeros((2, 2)))


class TestClassify:
    def test_circular_disc(self):
        cls = classify_3x3(JORDAN3)
        assert cls.kind == "elliptic_with_zero"
        np.testing.assert_allclose(cls.foci, [0, 0], atol=1e-6)

    def test_nilpotent_non_elliptic_block(self):
        assert classify_3x3(NILPOTENT_T).kind == "other"

    def test_segment(self):
        B = np.diag([1.0, -1.0, 0.0])
        assert classify_3x3(B).kind == "degenerate_segment"
        assert zdi_hermitian(B).d == 2

    def test_zero_outside_hull(self):
        # divisible by z but W is a segment [1, 2] plus 0 as vertex... d = 1 here
        assert classify_3x3(np.diag([0.0, 1.0, 2.0])).kind == "other"

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_equivalence_with_index(self, seed):
        rng = np.random.default_rng(seed)
        kind = rng.integers(3)
        if kind == 0:
            B = corner_matrix(rng, 3, 2)
        elif kind == 1:
            B = conjugate(path_matrix(rng.standard_normal(2) + 1j * rng.standard_normal(2)),
                          random_unitary(3, rng))
        else:
            B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert classify_3x3(B).positive == (zdi_general(B).d == 2)

    def test_foci_are_nonzero_eigenvalues(self):
        B = corner_matrix(np.random.default_rng(4), 3, 2)
        cls = classify_3x3(B)
        assert cls.kind == "elliptic_with_zero"
        assert cls.checks["zero_eigenvalue"] and cls.checks["foci_match"]
        np.testing.assert_allclose(np.poly(np.concatenate([[0], cls.foci])), np.poly(B), atol=1e-8)


class TestCharacterization:
    def test_nilpotent_padded(self):
        rep = characterize_n_minus_1(direct_sum(JORDAN3, np.zeros((2, 2))))
        assert rep.holds and rep.d == 4 and rep.classification.kind == "elliptic_with_zero"

    def test_diag001(self):
        rep = characterize_n_minus_1(np.diag([0, 0, 1.0]))
        assert rep.holds and rep.d == 2 and rep.classification.kind == "degenerate_segment"

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_nilpotent_padded_family(self, n):
        rep = characterize_n_minus_1(direct_sum(NILPOTENT_T, np.zeros((n - 3, n - 3))))
        assert not rep.holds and rep.d == n - 2

    def test_requires_n3(self):
        with pytest.raises(ValidationError):
            characterize_n_minus_1(np.zeros((2, 2)))

    def test_to_dict(self):
        out = characterize_n_minus_1(np.diag([0, 0, 1.0])).to_dict()
        assert out["holds"] and out["block_kind"] == "degenerate_segment"


class TestBoundary:
    def test_diag001(self):
        rep = boundary_extreme_analysis(np.diag([0, 0, 1.0]))
        assert rep.on_boundary and rep.extreme and rep.d_exact == 2

    def test_interior(self):
        with pytest.raises(NotOnBoundary):
            boundary_extreme_analysis(np.diag([0, 1, 1j, -1, -1j]))

    def test_outside(self):
        with pytest.raises(NotOnBoundary):
            boundary_extreme_analysis(np.diag([1.0, 2.0]))

    def test_disc_boundary_point(self):
        # W = disc centred 1/2 of radius 1/2: every boundary point is extreme
        rep = boundary_extreme_analysis(path_matrix([1]) + 0.5 * np.eye(2))
        assert rep.extreme and rep.d_exact == 1

    def test_corner_of_triangle(self):
        rep = boundary_extreme_analysis(np.diag([0, 1j, 1]))
        assert rep.extreme and rep.d_exact == 1 == zdi_general(np.diag([0, 1j, 1])).d

    def test_non_extreme(self):
        # 0 is the midpoint of the edge [-1, 1] of the triangle with vertices -1, 1, i
        A = np.diag([-1, 1, 1j])
        rep = boundary_extreme_analysis(A)
        assert rep.on_boundary and not rep.extreme and rep.d_exact is None
        assert rep.span_dim == 2 >= zdi_general(A).d

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_extreme_gives_index(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        # a zero block plus eigenvalues in an open half-plane makes 0 an extreme point
        phi = rng.uniform(0, 2 * np.pi)
        m = int(rng.integers(1, n))
        eigs = np.exp(1j * (phi + rng.uniform(-1.2, 1.2, n - m))) * rng.uniform(0.5, 2, n - m)
        X = np.triu(rng.standard_normal((n - m, n - m)), 1) * 0.1
        A = conjugate(direct_sum(np.zeros((m, m)), np.diag(eigs) + X), random_unitary(n, rng))
        rep = boundary_extreme_analysis(A)
        assert rep.extreme and rep.d_exact == zdi_general(A).d
