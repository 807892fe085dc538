"""Isometries ``V`` (``n x k``, ``V*V = I``) with ``V*AV = 0``, proving ``d(A) >= k``.

:func:`verify` is the only judge of a certificate; the constructors call it
before returning and never mark their own output as valid.
"""

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .errors import DimensionMismatch, SearchFailed
from .matrix_core import as_matrix, default_tol, hermitian_eig, signature
from .special_forms import zdi_normal

__all__ = [
    "IsometryCertificate",
    "Verification",
    "SearchConfig",
    "verify",
    "residuals",
    "construct_hermitian",
    "construct_diagonal_normal",
    "construct_search",
    "polar",
]

ISO_TOL = 1e-10
ZERO_RTOL = 1e-8


@dataclass(frozen=True)
class Verification:
    ok: bool
    residual_iso: float
    residual_zero: float
    scale: float
    residual_zero_transposed: float = 0.0


@dataclass(frozen=True)
class IsometryCertificate:
    """Candidate witness; ``residual_zero`` is absolute, compare to ``ZERO_RTOL * ||A||``."""

    V: np.ndarray
    k: int
    residual_iso: float
    residual_zero: float
    method: str = ""
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "k": self.k,
            "residual_iso": self.residual_iso,
            "residual_zero": self.residual_zero,
            "method": self.method,
            "V": [[[float(z.real), float(z.imag)] for z in row] for row in self.V],
            **({"notes": self.notes} if self.notes else {}),
        }


def residuals(A, V, order="forward"):
    """``(||V*V - I||_F, ||V*AV||_F)`` accumulated as ``V*(AV)`` or ``(V*A)V``."""
    k = V.shape[1]
    iso = float(np.linalg.norm(V.conj().T @ V - np.eye(k)))
    if order == "forward":
        C = V.conj().T @ (A @ V)
    elif order == "transposed":
        # (V^T A^T conj(V))^T = V* A V with the products taken the other way round
        C = ((V.T @ A.T) @ V.conj()).T
    else:
        raise ValueError(f"unknown order {order!r}")
    return iso, float(np.linalg.norm(C))


def verify(A, V, eps_iso=ISO_TOL, eps_zero=ZERO_RTOL):
    """``True`` iff ``||V*V - I|| <= eps_iso`` and ``||V*AV|| <= eps_zero * ||A||``."""
    A = as_matrix(A)
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim != 2 or V.shape[0] != A.shape[0] or V.shape[1] > A.shape[0]:
        raise DimensionMismatch(f"V has shape {V.shape}, A is {A.shape[0]}x{A.shape[0]}")
    iso, zero = residuals(A, V)
    _, zero_t = residuals(A, V, order="transposed")
    scale = float(np.linalg.norm(A, 2))
    ok = iso <= eps_iso and max(zero, zero_t) <= eps_zero * scale
    return Verification(ok, iso, zero, scale, zero_t)


def _certificate(A, V, method, **notes):
    ver = verify(A, V)
    if not ver.ok:
        raise ArithmeticError(
            f"{method} produced an invalid certificate "
            f"(iso {ver.residual_iso:.2e}, zero {ver.residual_zero:.2e})"
        )
    return IsometryCertificate(V=V, k=V.shape[1], residual_iso=ver.residual_iso,
                               residual_zero=ver.residual_zero, method=method, notes=notes)


def construct_hermitian(H, tol=None):
    """Certificate of size ``min(i_{>=0}, i_{<=0})`` for a Hermitian matrix.

    Kernel eigenvectors plus one balanced combination per (positive,
    negative) eigenpair.
    """
    H = as_matrix(H)
    eig = hermitian_eig(H)
    tol = default_tol(H) if tol is None else tol
    lam, U = eig.values, eig.vectors
    pos = np.flatnonzero(lam > tol)
    neg = np.flatnonzero(lam < -tol)[::-1]
    zero = np.flatnonzero(np.abs(lam) <= tol)
    cols = [U[:, j] for j in zero]
    for i, j in zip(pos, neg):
        v = np.sqrt(-lam[j]) * U[:, i] + np.sqrt(lam[i]) * U[:, j]
        cols.append(v / np.linalg.norm(v))
    V = np.stack(cols, axis=1) if cols else np.zeros((H.shape[0], 0), dtype=np.complex128)
    sig = signature(lam, tol)
    return _certificate(H, V, "hermitian", target=min(sig.i_geq0, sig.i_leq0))


def _zero_weights(points):
    """Nonnegative weights summing to 1 with ``sum w_j z_j = 0``, or ``None``."""
    M = np.vstack([np.real(points), np.imag(points), np.ones(len(points))])
    rhs = np.array([0.0, 0.0, 1.0])
    w, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.all(w >= -1e-12) and np.allclose(M @ w, rhs, atol=1e-10):
        return np.clip(w, 0.0, None)
    return None


def construct_diagonal_normal(spec, eigenbasis=None, eigenvalues=None):
    """Greedy certificate for a normal matrix given in an eigenbasis.

    ``eigenvalues`` lists the diagonal of ``Z* A Z`` for the unitary
    ``eigenbasis`` ``Z`` (both default to the diagonal matrix of ``spec``).
    Disjoint antipodal pairs and then disjoint triples with 0 in their hull
    each give one isotropic vector; kernel vectors are added as is.  The
    result may fall short of the exact index; ``notes['optimal']`` says
    whether it did not.
    """
    if eigenvalues is None:
        eigenvalues = np.concatenate([spec.nonzero_eigs, np.zeros(spec.kernel_dim)])
    eigenvalues = np.asarray(eigenvalues, dtype=np.complex128)
    n = eigenvalues.size
    Z = np.eye(n, dtype=np.complex128) if eigenbasis is None else np.asarray(eigenbasis)
    zero_tol = 1e-8 * max(1.0, float(np.linalg.norm(eigenvalues)))
    kernel = [j for j in range(n) if abs(eigenvalues[j]) <= zero_tol]
    free = [j for j in range(n) if abs(eigenvalues[j]) > zero_tol]
    args = {j: np.mod(np.angle(eigenvalues[j]), 2 * pi) for j in free}
    cols = [np.eye(n)[:, j].astype(np.complex128) for j in kernel]

    def take(group, weights):
        v = np.zeros(n, dtype=np.complex128)
        v[list(group)] = np.sqrt(weights)
        cols.append(v)
        for j in group:
            free.remove(j)

    paired = True
    while paired:
        paired = False
        for a in list(free):
            for b in list(free):
                if b <= a:
                    continue
                gap = abs(np.mod(args[a] - args[b], 2 * pi) - pi)
                if gap <= spec.angle_tol * 10:
                    la, lb = abs(eigenvalues[a]), abs(eigenvalues[b])
                    take((a, b), np.array([lb, la]) / (la + lb))
                    paired = True
                    break
            if paired:
                break
    tripled = True
    while tripled:
        tripled = False
        for a in list(free):
            for b in list(free):
                for c in list(free):
                    if not a < b < c:
                        continue
                    w = _zero_weights(eigenvalues[[a, b, c]])
                    if w is not None:
                        take((a, b, c), w)
                        tripled = True
                        break
                if tripled:
                    break
            if tripled:
                break
    Vd = np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.complex128)
    V = Z @ Vd
    A = Z @ np.diag(eigenvalues) @ Z.conj().T
    exact = zdi_normal(spec).d
    return _certificate(A, V, "diagonal-normal", optimal=V.shape[1] == exact, exact_d=exact)


@dataclass(frozen=True)
class SearchConfig:
    """Search for ``min ||V*AV||_F^2`` over isometries.

    Each restart runs Gauss-Newton on the Stiefel manifold; if that stalls,
    Riemannian gradient descent takes over and Gauss-Newton polishes the end.
    """

    restarts: int = 20
    newton_iter: int = 60
    max_iter: int = 2000
    step: float = 0.5
    grad_tol: float = 1e-14
    backtrack: float = 0.5
    armijo: float = 1e-4


def polar(X):
    """Nearest isometry to ``X`` (unitary polar factor)."""
    U, _, Vh = np.linalg.svd(X, full_matrices=False)
    return U @ Vh


def _descend(A, V, cfg, target):
    """Armijo-backtracked gradient descent with Barzilai-Borwein initial steps."""
    AH = A.conj().T

    def cost_grad(V):
        M = V.conj().T @ A @ V
        G = 2 * (A @ V @ M.conj().T + AH @ V @ M)
        VG = V.conj().T @ G
        rgrad = G - V @ ((VG + VG.conj().T) / 2)
        return float(np.sum(np.abs(M) ** 2)), rgrad

    f, g = cost_grad(V)
    t = cfg.step
    prev = None
    for _ in range(cfg.max_iter):
        if f <= target:
            break
        gg = float(np.sum(np.abs(g) ** 2))
        if gg <= cfg.grad_tol:
            break
        if prev is not None:
            s, y = prev
            sy = float(np.real(np.vdot(s, y)))
            if sy > 0:
                t = min(max(float(np.sum(np.abs(s) ** 2)) / sy, 1e-6), 1e6)
        while True:
            Vn = polar(V - t * g)
            fn, gn = cost_grad(Vn)
            if fn <= f - cfg.armijo * t * gg or t < 1e-12:
                break
            t *= cfg.backtrack
        prev = (Vn - V, gn - g)
        V, f, g = Vn, fn, gn
    return V, f


def _gauss_newton(A, V, iters, target):
    """Minimum-norm Gauss-Newton steps on ``V*AV = 0`` restricted to the tangent space.

    The system is underdetermined (``2nk`` real unknowns, ``3k^2`` real
    equations including the tangent constraint), so each least-squares step
    moves to the nearest point of the linearised solution set.
    """
    n, k = V.shape
    m = n * k
    eye = np.eye(m)
    basis = np.concatenate([eye, 1j * eye]).reshape(2 * m, n, k)
    for _ in range(iters):
        M = V.conj().T @ A @ V
        f = float(np.sum(np.abs(M) ** 2))
        if f <= target:
            break
        AV = A @ V
        VA = V.conj().T @ A
        # linear maps applied to every real basis direction D
        dM = VA @ basis + np.swapaxes(basis.conj(), 1, 2) @ AV
        VD = V.conj().T @ basis
        dT = VD + np.swapaxes(VD.conj(), 1, 2)
        J = np.concatenate([dM.reshape(2 * m, -1), dT.reshape(2 * m, -1)], axis=1)
        J = np.concatenate([J.real, J.imag], axis=1).T
        rhs = np.concatenate([M.ravel(), np.zeros(k * k)])
        rhs = -np.concatenate([rhs.real, rhs.imag])
        x, *_ = np.linalg.lstsq(J, rhs, rcond=1e-12)
        step = (x[:m] + 1j * x[m:]).reshape(n, k)
        Vn = polar(V + step)
        if np.sum(np.abs(Vn.conj().T @ A @ Vn) ** 2) >= f:
            break
        V = Vn
    return V


def construct_search(A, k_target, cfg=None, seed=0):
    """Multi-start search for a ``k_target``-dimensional certificate.

    Restart ``r`` draws its starting point from ``default_rng([seed, r])``;
    the lowest restart index that verifies wins.  Failure raises
    :class:`SearchFailed` and proves nothing about ``d(A)``.
    """
    cfg = cfg or SearchConfig()
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= k_target <= n:
        raise DimensionMismatch(f"k_target must be in [1, {n}]")
    scale = float(np.linalg.norm(A, 2))
    # aim well below the acceptance threshold so verify() has margin
    target = (1e-2 * ZERO_RTOL * scale) ** 2
    best = np.inf
    for r in range(cfg.restarts):
        rng = np.random.default_rng([seed, r])
        X = rng.standard_normal((n, k_target)) + 1j * rng.standard_normal((n, k_target))
        V = _gauss_newton(A, polar(X), cfg.newton_iter, target)
        if not verify(A, V).ok:
            V, _ = _descend(A, V, cfg, target)
            V = _gauss_newton(A, polar(V), cfg.newton_iter, target)
        ver = verify(A, V)
        best = min(best, ver.residual_zero)
        if ver.ok:
            return IsometryCertificate(V=V, k=k_target, residual_iso=ver.residual_iso,
                                       residual_zero=ver.residual_zero, method="search",
                                       notes={"restart": r, "seed": seed})
    raise SearchFailed(f"no {k_target}-dimensional certificate found", best, cfg.restarts)
