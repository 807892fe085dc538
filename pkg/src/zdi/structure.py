"""Structure forced by a large zero-dilation index.

* ``d > floor(n/2)``   -> ``dim ker A >= 2d - n``.
* ``d > floor(2n/3)``  -> ``A`` is unitarily ``B (+) 0_{3d-2n}``.
* ``d = n - 1``        -> ``A`` is unitarily ``B (+) 0_{n-3}`` with ``B`` 3x3
  whose Kippenhahn cubic splits off ``z`` and whose remaining quadratic
  describes an ellipse (or segment) containing 0.
"""

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .engine import SweepConfig, min_lambda_k, zdi_general
from .errors import NotDivisible, NotOnBoundary, TheoremViolation, ValidationError
from .matrix_core import (
    as_matrix,
    default_tol,
    direct_sum,
    hermitian_eig,
    imag_part,
    real_part,
    rotated_real_part,
)

__all__ = [
    "KippenhahnCubic",
    "KippenhahnQuadratic",
    "DeflationReport",
    "Classification",
    "CharacterizationReport",
    "BoundaryReport",
    "common_kernel",
    "kernel_dim",
    "deflate_zero",
    "check_kernel_guarantees",
    "kippenhahn_cubic",
    "factor_out_z",
    "classify_3x3",
    "characterize_n_minus_1",
    "boundary_extreme_analysis",
    "sharp_two_thirds_matrix",
]

# Relative singular-value threshold for kernels.
KERNEL_RTOL = 1e-8
# Residual allowed when rebuilding A from its deflation.
RECONSTRUCTION_RTOL = 1e-8

CUBIC_MONOMIALS = ((3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
                   (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3))
QUADRATIC_MONOMIALS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


def _spectral_norm(A):
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def _kernel_split(M, rtol):
    """Orthonormal bases ``(complement, kernel)`` of the right null space of ``M``."""
    n = M.shape[1]
    _, s, Vh = np.linalg.svd(M)
    s = np.concatenate([s, np.zeros(n - s.size)])
    thresh = rtol * (s[0] if s.size and s[0] > 0 else 0.0)
    small = s <= thresh
    V = Vh.conj().T
    return V[:, ~small], V[:, small]


def common_kernel(A, rtol=KERNEL_RTOL):
    """Orthonormal basis (columns) of ``ker A  cap  ker A*``."""
    A = as_matrix(A)
    return _kernel_split(np.vstack([A, A.conj().T]), rtol)[1]


def kernel_dim(A, rtol=KERNEL_RTOL):
    """Numerical ``dim ker A``."""
    return _kernel_split(as_matrix(A), rtol)[1].shape[1]


@dataclass(frozen=True)
class DeflationReport:
    """``A = U (B (+) 0_r) U*`` with ``r`` the reducing multiplicity of 0.

    ``guaranteed_lower_bound`` is ``3d - 2n`` when ``d > floor(2n/3)`` and
    ``None`` otherwise.  ``d_B`` is the index of the deflated block, which
    must equal ``d - r``.
    """

    reducing_multiplicity: int
    B: np.ndarray
    U: np.ndarray
    residual: float
    d: int
    d_B: int
    guaranteed_lower_bound: int = None
    kernel_multiplicity: int = 0

    def to_dict(self):
        return {
            "reducing_multiplicity": self.reducing_multiplicity,
            "kernel_multiplicity": self.kernel_multiplicity,
            "block_size": int(self.B.shape[0]),
            "residual": self.residual,
            "d": self.d,
            "d_B": self.d_B,
            "guaranteed_lower_bound": self.guaranteed_lower_bound,
        }


def check_kernel_guarantees(A, d, rtol=KERNEL_RTOL):
    """Raise :class:`TheoremViolation` if the kernel bounds implied by ``d`` fail.

    Returns ``(dim ker A, dim(ker A cap ker A*))``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    kdim = kernel_dim(A, rtol)
    cdim = common_kernel(A, rtol).shape[1]
    if d > n // 2 and kdim < 2 * d - n:
        raise TheoremViolation("dim ker A below 2d - n", {"d": d, "n": n, "dim_ker": kdim})
    if d > (2 * n) // 3 and cdim < 3 * d - 2 * n:
        raise TheoremViolation("reducing multiplicity below 3d - 2n",
                               {"d": d, "n": n, "common_kernel": cdim})
    return kdim, cdim


def deflate_zero(A, cfg=None, d=None, rtol=KERNEL_RTOL):
    """Split off the common kernel of ``A`` and ``A*`` as a zero block."""
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    n = A.shape[0]
    if d is None:
        d = zdi_general(A, cfg).d
    kdim, r = check_kernel_guarantees(A, d, rtol)
    Q, K = _kernel_split(np.vstack([A, A.conj().T]), rtol)
    U = np.hstack([Q, K])
    B = Q.conj().T @ A @ Q
    rebuilt = U @ direct_sum(B, np.zeros((r, r))) @ U.conj().T if B.size else np.zeros_like(A)
    residual = float(np.linalg.norm(rebuilt - A, 2))
    scale = _spectral_norm(A)
    if residual > RECONSTRUCTION_RTOL * max(scale, 1e-300) and residual > 1e-14:
        raise TheoremViolation("deflation does not reproduce A",
                               {"residual": residual, "norm": scale})
    d_B = zdi_general(B, cfg).d if B.size else 0
    if d_B != d - r:
        raise TheoremViolation("index of deflated block is not d - r",
                               {"d": d, "r": r, "d_B": d_B})
    bound = 3 * d - 2 * n if d > (2 * n) // 3 else None
    if bound is not None and r == bound and (B.shape[0] != 3 * (n - d) or d_B != 2 * (n - d)):
        raise TheoremViolation("deflated block has the wrong size or index",
                               {"size": B.shape[0], "d_B": d_B, "d": d, "n": n})
    return DeflationReport(
        reducing_multiplicity=r,
        B=B,
        U=U,
        residual=residual,
        d=d,
        d_B=d_B,
        guaranteed_lower_bound=bound,
        kernel_multiplicity=kdim,
    )


# ---------------------------------------------------------------------------
# Kippenhahn polynomials (3x3)
# ---------------------------------------------------------------------------

def _monomial_rows(pts, monomials):
    pts = np.atleast_2d(pts)
    return np.stack([pts[:, 0] ** a * pts[:, 1] ** b * pts[:, 2] ** c for a, b, c in monomials], axis=1)


@dataclass(frozen=True)
class KippenhahnCubic:
    """Real coefficients of ``det(x Re A + y Im A + z I_3)`` in :data:`CUBIC_MONOMIALS` order."""

    coeffs: np.ndarray
    re: np.ndarray = field(repr=False, default=None)
    im: np.ndarray = field(repr=False, default=None)

    def __call__(self, x, y, z):
        return complex(_monomial_rows(np.array([[x, y, z]], dtype=complex), CUBIC_MONOMIALS)[0] @ self.coeffs)

    def coefficient(self, a, b, c):
        return float(self.coeffs[CUBIC_MONOMIALS.index((a, b, c))])

    def direct(self, x, y, z):
        """Evaluate the defining determinant directly (needs the stored matrix parts)."""
        return complex(np.linalg.det(x * self.re + y * self.im + z * np.eye(3)))


@dataclass(frozen=True)
class KippenhahnQuadratic:
    """Quadratic ``q`` with ``p = z q``; coefficients in :data:`QUADRATIC_MONOMIALS` order."""

    coeffs: np.ndarray

    def __call__(self, x, y, z):
        return complex(_monomial_rows(np.array([[x, y, z]], dtype=complex), QUADRATIC_MONOMIALS)[0] @ self.coeffs)

    def symmetric_matrix(self):
        xx, xy, xz, yy, yz, zz = self.coeffs
        return np.array([[xx, xy / 2, xz / 2],
                         [xy / 2, yy, yz / 2],
                         [xz / 2, yz / 2, zz]])

    def is_irreducible(self, rtol=1e-9):
        M = self.symmetric_matrix()
        return bool(abs(np.linalg.det(M)) > rtol * np.linalg.norm(M) ** 3)

    def foci(self):
        """Roots in ``z`` of ``q(1, i, -z)``."""
        xx, xy, xz, yy, yz, zz = self.coeffs
        poly = [zz, -(xz + 1j * yz), xx - yy + 1j * xy]
        if abs(zz) == 0:
            raise ValidationError("quadratic has no z^2 term")
        return np.roots(poly)

    def z_free_form(self):
        """2x2 matrix of the binary form ``q(x, y, 0)``."""
        xx, xy, _, yy, _, _ = self.coeffs
        return np.array([[xx, xy / 2], [xy / 2, yy]])


def kippenhahn_cubic(A, n_samples=20):
    """Fit the ten coefficients from determinant samples at fixed generic points."""
    A = as_matrix(A)
    if A.shape != (3, 3):
        raise ValidationError("Kippenhahn cubic is only provided for 3x3 matrices")
    R, J = real_part(A), imag_part(A)
    pts = np.random.default_rng(20240607).standard_normal((max(10, n_samples), 3))
    vals = np.array([np.linalg.det(x * R + y * J + z * np.eye(3)).real for x, y, z in pts])
    M = _monomial_rows(pts, CUBIC_MONOMIALS)
    coeffs, *_ = np.linalg.lstsq(M, vals, rcond=None)
    return KippenhahnCubic(coeffs=coeffs, re=R, im=J)


def factor_out_z(cubic, rtol=1e-9):
    """Quotient ``q = p / z``; raises :class:`NotDivisible` if ``p(x, y, 0)`` is not ~0."""
    c = cubic.coeffs
    scale = max(1.0, float(np.max(np.abs(c))))
    z_free = [CUBIC_MONOMIALS.index(m) for m in ((3, 0, 0), (2, 1, 0), (1, 2, 0), (0, 3, 0))]
    worst = float(np.max(np.abs(c[z_free])))
    if worst > rtol * scale:
        raise NotDivisible(f"z-free coefficient {worst:.3e} exceeds {rtol * scale:.3e}")
    q = [c[CUBIC_MONOMIALS.index((a, b, cz + 1))] for a, b, cz in QUADRATIC_MONOMIALS]
    return KippenhahnQuadratic(np.array(q, dtype=float))


@dataclass(frozen=True)
class Classification:
    """Verdict for a 3x3 matrix.

    ``kind`` is ``elliptic_with_zero`` (W an elliptic disc containing 0 with
    eigenvalues 0 and the foci), ``degenerate_segment`` (the same with W a
    segment) or ``other``.
    """

    kind: str
    foci: np.ndarray = None
    eigenvalues: np.ndarray = None
    reason: str = ""
    checks: dict = field(default_factory=dict)

    @property
    def positive(self):
        return self.kind in ("elliptic_with_zero", "degenerate_segment")


def classify_3x3(B, tol=None):
    B = as_matrix(B)
    if B.shape != (3, 3):
        raise ValidationError("classify_3x3 needs a 3x3 matrix")
    scale = max(1.0, _spectral_norm(B))
    tol = default_tol(B) if tol is None else tol
    eigs = np.linalg.eigvals(B)
    if _spectral_norm(B) <= tol:
        return Classification("other", eigenvalues=eigs, reason="zero matrix (index 3)")
    cubic = kippenhahn_cubic(B)
    try:
        q = factor_out_z(cubic)
    except NotDivisible as exc:
        return Classification("other", eigenvalues=eigs, reason=str(exc))
    # 0 must lie in the convex hull of the conic's dual: q(x, y, 0) <= 0 on the circle
    top = float(np.max(np.linalg.eigvalsh(q.z_free_form())))
    if top > 1e-9 * scale ** 2:
        return Classification("other", eigenvalues=eigs,
                              reason=f"0 outside the conic hull (q(x,y,0) reaches {top:.3e})")
    foci = q.foci()
    # compare characteristic polynomials rather than eigenvalues (defective spectra)
    char_b = np.poly(B)
    char_f = np.poly(np.concatenate([[0.0], foci]))
    zero_eig = abs(np.linalg.det(B)) <= 1e-9 * scale ** 3
    foci_match = bool(np.max(np.abs(char_b - char_f)) <= 1e-8 * scale ** 3)
    checks = {"zero_eigenvalue": bool(zero_eig), "foci_match": foci_match}
    if not (zero_eig and foci_match):
        # implied by divisibility in exact arithmetic; failing here means the fit is unreliable
        return Classification("other", foci=foci, eigenvalues=eigs, checks=checks,
                              reason="eigenvalues are not 0 and the foci")
    kind = "elliptic_with_zero" if q.is_irreducible() else "degenerate_segment"
    return Classification(kind, foci=foci, eigenvalues=eigs, checks=checks)


@dataclass(frozen=True)
class CharacterizationReport:
    holds: bool
    d: int
    n: int
    structural: bool
    B: np.ndarray = None
    classification: Classification = None
    reducing_multiplicity: int = 0

    def to_dict(self):
        return {
            "holds": self.holds,
            "d": self.d,
            "n": self.n,
            "structural": self.structural,
            "reducing_multiplicity": self.reducing_multiplicity,
            "block_kind": None if self.classification is None else self.classification.kind,
        }


def characterize_n_minus_1(A, cfg=None):
    """Check ``d(A) = n - 1`` against the 3x3-block-plus-zeros description.

    Both directions are compared; disagreement raises
    :class:`TheoremViolation`.
    """
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    n = A.shape[0]
    if n < 3:
        raise ValidationError("characterization needs n >= 3")
    d = zdi_general(A, cfg).d
    if d > n // 2:
        check_kernel_guarantees(A, d)
    Q, K = _kernel_split(np.vstack([A, A.conj().T]), KERNEL_RTOL)
    r = K.shape[1]
    B = cls = None
    structural = False
    if r >= n - 3:
        W = np.hstack([Q, K[:, : r - (n - 3)]])
        B = W.conj().T @ A @ W
        cls = classify_3x3(B, tol=cfg.tol_for(A))
        structural = cls.positive
    holds = d == n - 1
    if holds != structural:
        raise TheoremViolation(
            "index n-1 and block structure disagree",
            {"d": d, "n": n, "reducing_multiplicity": r,
             "block_kind": None if cls is None else cls.kind,
             "reason": None if cls is None else cls.reason},
        )
    return CharacterizationReport(holds=holds, d=d, n=n, structural=structural, B=B,
                                  classification=cls, reducing_multiplicity=r)


# ---------------------------------------------------------------------------
# 0 on the boundary of W(A)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryReport:
    """Supporting-line analysis at 0 in the boundary of ``W(A)``.

    ``d_exact`` is set when 0 is extreme (then ``d`` equals the dimension of
    the isotropic kernel).  ``span_dim`` is the dimension of the span of
    ``{x : <Ax, x> = 0}``, always an upper bound on ``d``.
    """

    on_boundary: bool
    extreme: bool
    theta_support: float
    face_dim: int
    span_dim: int
    d_exact: int = None

    def to_dict(self):
        return {
            "on_boundary": self.on_boundary,
            "extreme": self.extreme,
            "theta_support": self.theta_support,
            "face_dim": self.face_dim,
            "span_dim": self.span_dim,
            "d_exact": self.d_exact,
        }


def boundary_extreme_analysis(A, cfg=None):
    """Analyse 0 as a boundary point of ``W(A)``; raises :class:`NotOnBoundary` otherwise.

    With ``H = Re(e^{-i t} A) >= 0`` at a supporting angle ``t``, the zero
    set ``{x : <Ax,x> = 0}`` is the isotropic cone of ``S``, the compression
    of ``Im(e^{-i t} A)`` to ``ker H``.  That cone is the subspace ``ker S``
    when ``S`` is semidefinite (0 extreme) and spans all of ``ker H``
    otherwise.
    """
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    tol = cfg.tol_for(A)
    m1, theta = min_lambda_k(A, 1, cfg)
    if m1 < -tol:
        raise NotOnBoundary(f"0 is outside W(A) (min support {m1:.3e})")
    if m1 > tol:
        raise NotOnBoundary(f"0 is interior to W(A) (min support {m1:.3e})")
    t0 = float(np.mod(theta + pi, 2 * pi))
    eig = hermitian_eig(rotated_real_part(A, t0))
    N = eig.vectors[:, np.abs(eig.values) <= tol]
    G = np.cos(t0) * imag_part(A) - np.sin(t0) * real_part(A)
    S = N.conj().T @ G @ N
    s = np.linalg.eigvalsh((S + S.conj().T) / 2) if S.size else np.zeros(0)
    extreme = bool(np.all(s >= -tol) or np.all(s <= tol))
    face_dim = N.shape[1]
    d_exact = int(np.count_nonzero(np.abs(s) <= tol)) if extreme else None
    span_dim = d_exact if extreme else face_dim
    return BoundaryReport(on_boundary=True, extreme=extreme, theta_support=t0,
                          face_dim=face_dim, span_dim=span_dim, d_exact=d_exact)


def sharp_two_thirds_matrix(n):
    """0/1 matrix attaining ``d = floor(2n/3)`` with trivial common kernel."""
    if n < 1:
        raise ValidationError("n must be positive")
    k = (2 * n) // 3
    A = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - k + 1, k + 1):
        A[i - 1, i + 2 * k - n - 1] = 1
    for i in range(k + 1, n + 1):
        A[i - 1, i - k - 1] = 1
    return A
