"""Zero-dilation index of an arbitrary square matrix.

The index is ``d(A) = min over theta of i_{>=0}(Re(e^{-i theta} A))``.  The
sweep evaluates the sorted spectrum of ``Re(e^{-i theta} A)`` on a uniform
grid over the full circle, refines every grid-local minimum of each
``lambda_k(theta)`` by golden-section search, and then reads ``d`` off two
ways:

* from the per-``k`` minima ``m_k`` (``d = max{k : m_k >= -tol}``), and
* from the minimum signature count over the same set of angles.

The two must agree; disagreement raises :class:`InconsistentFormulations`.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .errors import InconsistentFormulations, NoConvergence, ValidationError
from .matrix_core import as_matrix, default_tol, imag_part, real_part

__all__ = [
    "SweepConfig",
    "ZdiResult",
    "zdi_general",
    "min_lambda_k",
    "zdi_count_min",
    "zdi_bruteforce_oracle",
    "i_geq0_at",
    "thread_count",
]

TWO_PI = 2 * pi
_INV_PHI = (sqrt(5) - 1) / 2
_CHUNK = 4096
# Cap on refined local minima per eigenvalue index; numerically flat curves
# produce many spurious ones and only the lowest matter.
_MAX_BRACKETS_PER_K = 24


@dataclass(frozen=True)
class SweepConfig:
    """Discretisation of the angle sweep.

    ``zero_tol`` of ``None`` means ``1e-8 * max(1, ||A||_F)`` per matrix.
    """

    grid_points: int = 720
    refine_iters: int = 60
    theta_tol: float = 1e-10
    zero_tol: float = None

    def __post_init__(self):
        if int(self.grid_points) != self.grid_points or self.grid_points < 8:
            raise ValueError("grid_points must be an integer >= 8")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")
        if not self.theta_tol > 0:
            raise ValueError("theta_tol must be positive")
        if self.zero_tol is not None and self.zero_tol < 0:
            raise ValueError("zero_tol must be nonnegative")

    def tol_for(self, A):
        return default_tol(A) if self.zero_tol is None else float(self.zero_tol)


@dataclass(frozen=True)
class ZdiResult:
    """Outcome of a zero-dilation index computation.

    ``lambda_minima[k-1]`` is ``min_theta lambda_k(Re(e^{-i theta} A))`` and
    ``lambda_argmins`` the angles attaining them; both are ``None`` for the
    purely combinatorial fast paths.  ``extras`` holds method-specific
    diagnostics (flags, witnesses, per-part indices).
    """

    d: int
    n: int
    method: str
    tol: float
    theta_witness: float = None
    lambda_minima: np.ndarray = None
    lambda_argmins: np.ndarray = None
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "d": int(self.d),
            "n": int(self.n),
            "method": self.method,
            "tol": float(self.tol),
            "theta_witness": None if self.theta_witness is None else float(self.theta_witness),
            "lambda_minima": None if self.lambda_minima is None else [float(v) for v in self.lambda_minima],
        }
        if self.extras:
            out["extras"] = _jsonable(self.extras)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def thread_count():
    """Worker threads for spectrum batches, from ``ZDI_THREADS`` (0 = auto)."""
    raw = os.environ.get("ZDI_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return max(1, k)


def _spectra(R, J, thetas):
    """Descending eigenvalues of ``cos(t) R + sin(t) J`` for each angle, shape (m, n)."""
    thetas = np.asarray(thetas, dtype=float)
    n = R.shape[0]
    if thetas.size == 0:
        return np.empty((0, n))

    def block(ts):
        H = np.cos(ts)[:, None, None] * R + np.sin(ts)[:, None, None] * J
        try:
            return np.linalg.eigvalsh(H)[:, ::-1]
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc

    chunks = [thetas[i:i + _CHUNK] for i in range(0, thetas.size, _CHUNK)]
    workers = thread_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            parts = list(pool.map(block, chunks))
    else:
        parts = [block(c) for c in chunks]
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class _Sweep:
    thetas: np.ndarray   # grid angles followed by refined angles
    values: np.ndarray   # (len(thetas), n), rows descending


def _golden_refine(R, J, ks, lo, hi, iters, theta_tol):
    """Vectorised golden-section minimisation of lambda_k on each bracket.

    Returns the best angle seen per bracket.
    """
    ks = np.asarray(ks)
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    rows = np.arange(ks.size)

    def f(ts):
        return _spectra(R, J, ts)[rows, ks]

    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    best_t = np.where(f1 <= f2, x1, x2)
    best_f = np.minimum(f1, f2)
    for _ in range(iters):
        active = (b - a) > theta_tol
        if not active.any():
            break
        left = (f1 < f2) & active
        right = ~left & active
        # minimum lies in [a, x2]
        b = np.where(left, x2, b)
        new_x2 = np.where(left, x1, x2)
        new_f2 = np.where(left, f1, f2)
        # minimum lies in [x1, b]
        a = np.where(right, x1, a)
        new_x1 = np.where(right, x2, x1)
        new_f1 = np.where(right, f2, f1)
        x1 = np.where(left, b - _INV_PHI * (b - a), new_x1)
        x2 = np.where(right, a + _INV_PHI * (b - a), new_x2)
        probe = np.where(left, x1, x2)
        fp = f(probe)
        f1 = np.where(left, fp, new_f1)
        f2 = np.where(right, fp, new_f2)
        better = active & (fp < best_f)
        best_t = np.where(better, probe, best_t)
        best_f = np.where(better, fp, best_f)
    return np.mod(best_t, TWO_PI)


def _sweep(A, cfg):
    R = real_part(A)
    J = imag_part(A)
    N = int(cfg.grid_points)
    grid = TWO_PI * np.arange(N) / N
    vals = _spectra(R, J, grid)
    n = A.shape[0]
    if cfg.refine_iters == 0:
        return _Sweep(grid, vals)
    h = TWO_PI / N
    ks, lo, hi = [], [], []
    for k in range(n):
        col = vals[:, k]
        prev = np.roll(col, 1)
        nxt = np.roll(col, -1)
        idx = np.flatnonzero((col < prev) & (col <= nxt))
        if idx.size == 0:
            idx = np.array([int(np.argmin(col))])
        if idx.size > _MAX_BRACKETS_PER_K:
            keep = np.argsort(col[idx], kind="stable")[:_MAX_BRACKETS_PER_K]
            idx = np.sort(idx[keep])
        ks.extend([k] * idx.size)
        lo.extend(grid[idx] - h)
        hi.extend(grid[idx] + h)
    refined = _golden_refine(R, J, ks, lo, hi, cfg.refine_iters, cfg.theta_tol)
    thetas = np.concatenate([grid, refined])
    values = np.concatenate([vals, _spectra(R, J, refined)], axis=0)
    return _Sweep(thetas, values)


def _minima(sw):
    idx = np.argmin(sw.values, axis=0)
    return sw.values[idx, np.arange(sw.values.shape[1])], sw.thetas[idx]


def _d_from_minima(minima, tol):
    return int(np.count_nonzero(minima >= -tol))


def _count_min(sw, tol):
    counts = np.count_nonzero(sw.values >= -tol, axis=1)
    j = int(np.argmin(counts))
    return int(counts[j]), float(sw.thetas[j])


def zdi_general(A, cfg=None):
    """Zero-dilation index by the angle sweep; ``d = 0`` when ``0`` is not in ``W(A)``."""
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    tol = cfg.tol_for(A)
    sw = _sweep(A, cfg)
    minima, argmins = _minima(sw)
    d = _d_from_minima(minima, tol)
    d_count, theta = _count_min(sw, tol)
    if d != d_count:
        raise InconsistentFormulations(
            f"lambda-minima give d={d} but signature counts give d={d_count}; "
            "check grid_points / zero_tol"
        )
    return ZdiResult(
        d=d,
        n=A.shape[0],
        method="general-sweep",
        tol=tol,
        theta_witness=theta,
        lambda_minima=minima,
        lambda_argmins=argmins,
        extras={"angles_evaluated": int(sw.thetas.size)},
    )


def min_lambda_k(A, k, cfg=None):
    """``(min_theta lambda_k(Re e^{-i theta} A), argmin)`` for ``1 <= k <= n``.

    Uses the same angle set as :func:`zdi_general`, so membership answers
    derived from it agree with the index exactly.
    """
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    minima, argmins = _minima(_sweep(A, cfg))
    return float(minima[k - 1]), float(argmins[k - 1])


def zdi_count_min(A, cfg=None):
    """``(d, theta*)`` by direct minimisation of the signature count."""
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    tol = cfg.tol_for(A)
    sw = _sweep(A, cfg)
    d_count, theta = _count_min(sw, tol)
    d = _d_from_minima(_minima(sw)[0], tol)
    if d != d_count:
        raise InconsistentFormulations(f"count route gives {d_count}, minima route gives {d}")
    return d_count, theta


def i_geq0_at(A, theta, tol=None):
    """``i_{>=0}(Re(e^{-i theta} A))`` at a single angle."""
    A = as_matrix(A)
    tol = default_tol(A) if tol is None else tol
    vals = _spectra(real_part(A), imag_part(A), np.atleast_1d(float(theta)))[0]
    return int(np.count_nonzero(vals >= -tol))


def zdi_bruteforce_oracle(A, dense_N=None, tol=None):
    """Reference index from signature counts on a dense uniform grid, no refinement.

    Deliberately shares no code with the sweep: the rotation is applied to
    ``A`` directly and the Hermitian part formed per angle.  Angles
    ``theta`` and ``theta + pi`` are read from one spectrum since
    ``Re(e^{-i(theta+pi)} A) = -Re(e^{-i theta} A)``.
    """
    A = np.array(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("oracle needs a square matrix")
    n = A.shape[0]
    if n > 12:
        raise ValidationError("oracle is limited to n <= 12")
    if dense_N is None:
        dense_N = 10 * n * SweepConfig().grid_points
    half = max(4, int(dense_N) // 2)
    if tol is None:
        tol = 1e-8 * max(1.0, float(np.sqrt(np.sum(np.abs(A) ** 2))))

    def chunk_min(start):
        t = np.pi * np.arange(start, min(half, start + _CHUNK)) / half
        M = np.exp(-1j * t)[:, None, None] * A[None, :, :]
        H = 0.5 * (M + np.conj(np.swapaxes(M, 1, 2)))
        w = np.linalg.eigvalsh(H)
        return min(int((w >= -tol).sum(axis=1).min()), int((w <= tol).sum(axis=1).min()))

    starts = range(0, half, _CHUNK)
    workers = min(thread_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return min(n, *pool.map(chunk_min, starts))
    return min(n, *map(chunk_min, starts))
