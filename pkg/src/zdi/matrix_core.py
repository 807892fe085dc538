"""Dense complex matrix helpers: real parts, rotations, Hermitian spectra, inertia.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
:func:`as_matrix` is the single entry point that validates shape and
finiteness.  Everything here is pure and deterministic.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotHermitian, ValidationError

__all__ = [
    "HermitianEig",
    "Signature",
    "as_matrix",
    "default_tol",
    "real_part",
    "imag_part",
    "rotate",
    "rotated_real_part",
    "hermitian_eig",
    "signature",
    "random_unitary",
    "conjugate",
    "direct_sum",
    "path_matrix",
    "cycle_matrix",
    "cyclic_shift",
]

# Relative skew tolerance accepted by hermitian_eig.
HERMITIAN_RTOL = 1e-10


def as_matrix(A):
    """Return ``A`` as a validated square complex128 array (copy)."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def default_tol(A):
    """Zero-classification tolerance ``1e-8 * max(1, ||A||_F)``."""
    return 1e-8 * max(1.0, float(np.linalg.norm(A)))


def real_part(A):
    """Hermitian part ``(A + A*)/2``."""
    A = np.asarray(A, dtype=np.complex128)
    return (A + A.conj().T) / 2


def imag_part(A):
    """Skew part ``(A - A*)/(2i)``, itself Hermitian."""
    A = np.asarray(A, dtype=np.complex128)
    return (A - A.conj().T) / 2j


def rotate(A, theta):
    """``exp(-i theta) * A``."""
    return np.exp(-1j * theta) * np.asarray(A, dtype=np.complex128)


def rotated_real_part(A, theta):
    """``Re(exp(-i theta) A)``; vectorised over an array of angles.

    For an array ``theta`` of shape ``(m,)`` the result has shape ``(m, n, n)``.
    Uses ``cos(theta) Re A + sin(theta) Im A`` which is Hermitian exactly.
    """
    R = real_part(A)
    J = imag_part(A)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0:
        return np.cos(theta) * R + np.sin(theta) * J
    c = np.cos(theta)[:, None, None]
    s = np.sin(theta)[:, None, None]
    return c * R + s * J


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self):
        return self.values.shape[0]


def hermitian_eig(H, rtol=HERMITIAN_RTOL):
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises :class:`NotHermitian` when ``||H - H*|| > rtol * ||H||``.
    """
    H = as_matrix(H)
    scale = np.linalg.norm(H)
    skew = np.linalg.norm(H - H.conj().T)
    if skew > rtol * scale:
        raise NotHermitian(f"||H - H*|| = {skew:.3e} exceeds {rtol:.1e} * ||H||")
    # Symmetrise so LAPACK sees an exactly Hermitian input.
    H = (H + H.conj().T) / 2
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermitianEig(values=w[::-1].copy(), vectors=V[:, ::-1].copy())


@dataclass(frozen=True)
class Signature:
    """Inertia counts of a Hermitian matrix under tolerance ``tol``."""

    i_plus: int
    i_zero: int
    i_minus: int
    tol: float = 0.0

    @property
    def n(self):
        return self.i_plus + self.i_zero + self.i_minus

    @property
    def i_geq0(self):
        return self.i_plus + self.i_zero

    @property
    def i_leq0(self):
        return self.i_minus + self.i_zero


def signature(values, tol):
    """Count eigenvalues above ``tol``, within ``[-tol, tol]`` and below ``-tol``."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    v = np.asarray(values, dtype=float)
    plus = int(np.count_nonzero(v > tol))
    minus = int(np.count_nonzero(v < -tol))
    return Signature(plus, v.size - plus - minus, minus, float(tol))


def random_unitary(n, seed=None):
    """Haar-distributed ``n x n`` unitary, deterministic for a given seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def conjugate(A, U):
    """``U* A U``."""
    return U.conj().T @ A @ U


def direct_sum(*blocks):
    """Block-diagonal complex matrix; zero-size blocks are skipped."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in blocks]
    blocks = [b for b in blocks if b.size]
    if not blocks:
        raise ValidationError("direct sum of nothing")
    return scipy.linalg.block_diag(*blocks).astype(np.complex128)


def path_matrix(weights):
    """Weighted shift with ``weights`` on the superdiagonal (size ``len(weights)+1``)."""
    w = np.asarray(weights, dtype=np.complex128).ravel()
    n = w.size + 1
    A = np.zeros((n, n), dtype=np.complex128)
    A[np.arange(n - 1), np.arange(1, n)] = w
    return A


def cycle_matrix(weights):
    """Weighted cyclic shift: ``w_1..w_{n-1}`` on the superdiagonal, ``w_n`` at (n, 1)."""
    w = np.asarray(weights, dtype=np.complex128).ravel()
    n = w.size
    if n == 1:
        return w.reshape(1, 1).copy()
    A = path_matrix(w[:-1])
    A[n - 1, 0] = w[-1]
    return A


def cyclic_shift(n):
    """Unweighted ``n x n`` cyclic shift."""
    return cycle_matrix(np.ones(n))
