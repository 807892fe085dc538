"""Closed-form zero-dilation indices for structured matrices.

Hermitian matrices read ``d`` off one inertia count; normal matrices and
weighted permutation matrices reduce to counting how many open arcs of the
circle can be stabbed by a single angle.
"""

from dataclasses import dataclass, field
from math import ceil, floor, pi

import numpy as np
import scipy.linalg

from .engine import SweepConfig, ZdiResult, zdi_general
from .errors import NotWeightedPermutation, TheoremViolation, ValidationError
from .matrix_core import (
    as_matrix,
    default_tol,
    direct_sum,
    hermitian_eig,
    rotated_real_part,
    signature,
)

__all__ = [
    "ArcSet",
    "max_stabbing",
    "NormalSpectrum",
    "Cycle",
    "Path",
    "PermDecomposition",
    "CycleAnalysis",
    "is_hermitian",
    "is_normal",
    "is_weighted_permutation",
    "zdi_hermitian",
    "zdi_normal",
    "zdi_normal_matrix",
    "classify_normal_extremal",
    "decompose_weighted_permutation",
    "zdi_path",
    "zdi_cycle",
    "even_cycle_determinant",
    "zdi_weighted_permutation",
    "zdi_weighted_permutation_matrix",
    "cycle_pair_rule",
    "direct_sum_zdi",
]

TWO_PI = 2 * pi
# Angle tolerance for exactly specified spectra (absorbs rounding in arg()).
EXACT_ANGLE_TOL = 1e-12
# Angle tolerance when eigenvalues were computed from a matrix.
COMPUTED_ANGLE_TOL = 1e-10


def _arg(z):
    """Argument in ``[0, 2 pi)``."""
    return np.mod(np.angle(z), TWO_PI)


# ---------------------------------------------------------------------------
# Arcs on the circle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArcSet:
    """Disjoint arcs on the circle, each stored as ``(start, end)``.

    ``start`` lies in ``[0, 2 pi)`` and ``end = start + length`` may exceed
    ``2 pi`` for an arc that wraps.  Arcs are open unless ``closed``.
    """

    arcs: tuple
    closed: bool = False

    @classmethod
    def from_starts(cls, starts, length, closed=False):
        starts = np.mod(np.asarray(starts, dtype=float), TWO_PI)
        order = np.argsort(starts, kind="stable")
        return cls(tuple((float(s), float(s + length)) for s in starts[order]), closed)

    def __len__(self):
        return len(self.arcs)

    @property
    def measure(self):
        return float(sum(e - s for s, e in self.arcs))

    def contains(self, theta, eps=0.0):
        """Membership of ``theta`` (any real) in the union, with slack ``eps``."""
        t = float(np.mod(theta, TWO_PI))
        for s, e in self.arcs:
            off = (t - s) % TWO_PI
            length = e - s
            if self.closed:
                if off <= length + eps or off >= TWO_PI - eps:
                    return True
            elif eps < off < length - eps:
                return True
        return False


def max_stabbing(families, eps=EXACT_ANGLE_TOL):
    """Largest number of families whose open arcs share a common angle.

    ``families`` is a sequence of :class:`ArcSet` (each counted once when
    stabbed).  Arc endpoints closer than ``eps`` are treated as coincident,
    so arcs that merely touch never count as overlapping.  Returns
    ``(count, theta)`` with ``theta`` inside an elementary interval attaining
    the maximum; ``theta`` is ``None`` when there are no arcs.
    """
    starts, lengths, owner = [], [], []
    for j, fam in enumerate(families):
        for s, e in fam.arcs:
            starts.append(s)
            lengths.append(e - s)
            owner.append(j)
    if not starts:
        return 0, None
    starts = np.mod(np.asarray(starts), TWO_PI)
    lengths = np.asarray(lengths)
    owner = np.asarray(owner)
    ends = np.mod(starts + lengths, TWO_PI)
    pts = np.sort(np.concatenate([starts, ends]))

    reps = [pts[0]]
    for p in pts[1:]:
        if p - reps[-1] > eps:
            reps.append(p)
    if len(reps) > 1 and reps[0] + TWO_PI - reps[-1] <= eps:
        reps.pop()
    reps = np.asarray(reps)
    nxt = np.roll(reps, -1)
    nxt[-1] += TWO_PI
    if reps.size == 1:
        nxt = reps + TWO_PI
    mids = np.mod((reps + nxt) / 2, TWO_PI)

    off = np.mod(mids[:, None] - starts[None, :], TWO_PI)
    inside = (off > 0) & (off < lengths[None, :])
    n_fam = len(families)
    hit = np.zeros((mids.size, n_fam), dtype=bool)
    for col in range(starts.size):
        hit[:, owner[col]] |= inside[:, col]
    counts = hit.sum(axis=1)
    best = int(np.argmax(counts))
    return int(counts[best]), float(mids[best])


# ---------------------------------------------------------------------------
# Class detection
# ---------------------------------------------------------------------------

def is_hermitian(A, rtol=1e-10):
    A = as_matrix(A)
    return bool(np.linalg.norm(A - A.conj().T) <= rtol * max(np.linalg.norm(A), 1e-300))


def is_normal(A, rtol=1e-10):
    """Commutator test ``||AA* - A*A|| <= rtol * ||A||^2``."""
    A = as_matrix(A)
    C = A @ A.conj().T - A.conj().T @ A
    return bool(np.linalg.norm(C) <= rtol * max(np.linalg.norm(A) ** 2, 1e-300))


def is_weighted_permutation(A, atol=0.0):
    mask = np.abs(as_matrix(A)) > atol
    return bool(mask.sum(axis=0).max() <= 1 and mask.sum(axis=1).max() <= 1)


# ---------------------------------------------------------------------------
# Hermitian
# ---------------------------------------------------------------------------

def zdi_hermitian(H, tol=None):
    """``d = min(i_{>=0}, i_{<=0})`` from one eigendecomposition."""
    H = as_matrix(H)
    eig = hermitian_eig(H)
    tol = default_tol(H) if tol is None else tol
    sig = signature(eig.values, tol)
    d = min(sig.i_geq0, sig.i_leq0)
    n = sig.n
    if not sig.i_zero <= d <= (n + sig.i_zero) // 2:
        raise TheoremViolation("Hermitian bounds i_0 <= d <= floor((n+i_0)/2) failed",
                               {"d": d, "n": n, "i_zero": sig.i_zero})
    lam = eig.values
    # lambda_k(cos(t) H) = cos(t) lambda_k(H) for cos >= 0, cos(t) lambda_{n+1-k}(H) otherwise
    minima = np.minimum(0.0, np.minimum(lam, -lam[::-1]))
    argmins = np.where(lam < -lam[::-1], 0.0, pi)
    argmins = np.where(minima == 0.0, pi / 2, argmins)
    return ZdiResult(
        d=d,
        n=n,
        method="hermitian",
        tol=tol,
        theta_witness=0.0 if sig.i_geq0 <= sig.i_leq0 else pi,
        lambda_minima=minima,
        lambda_argmins=argmins,
        extras={"signature": [sig.i_plus, sig.i_zero, sig.i_minus]},
    )


# ---------------------------------------------------------------------------
# Normal
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalSpectrum:
    """Nonzero eigenvalues sorted by argument in ``[0, 2 pi)`` plus kernel dimension.

    ``angle_tol`` is the slack used when comparing arguments; it is larger
    for spectra computed from a matrix.
    """

    nonzero_eigs: np.ndarray
    kernel_dim: int
    angle_tol: float = EXACT_ANGLE_TOL

    def __post_init__(self):
        eigs = np.asarray(self.nonzero_eigs, dtype=np.complex128).ravel()
        if np.any(eigs == 0):
            raise ValidationError("nonzero_eigs contains 0")
        if self.kernel_dim < 0:
            raise ValidationError("kernel_dim must be nonnegative")
        order = np.argsort(_arg(eigs), kind="stable")
        object.__setattr__(self, "nonzero_eigs", eigs[order])

    @classmethod
    def from_eigenvalues(cls, eigs, zero_tol=0.0, angle_tol=EXACT_ANGLE_TOL):
        eigs = np.asarray(eigs, dtype=np.complex128).ravel()
        zero = np.abs(eigs) <= zero_tol
        return cls(eigs[~zero], int(zero.sum()), angle_tol)

    @classmethod
    def from_matrix(cls, A, tol=None):
        """Spectrum and unitary eigenbasis of a normal matrix.

        Returns ``(spectrum, Z, eigs)`` where ``Z`` is unitary with
        ``Z* A Z`` diagonal (complex Schur form) and ``eigs`` its diagonal.
        """
        A = as_matrix(A)
        if not is_normal(A):
            raise ValidationError("matrix is not normal (commutator test)")
        tol = default_tol(A) if tol is None else tol
        T, Z = scipy.linalg.schur(A, output="complex")
        eigs = np.diagonal(T).copy()
        return cls.from_eigenvalues(eigs, tol, COMPUTED_ANGLE_TOL), Z, eigs

    @property
    def m(self):
        return int(self.nonzero_eigs.size)

    @property
    def n(self):
        return self.m + self.kernel_dim

    @property
    def args(self):
        return _arg(self.nonzero_eigs)

    def positive_arcs(self):
        """Per eigenvalue, the open arc of angles with ``Re(e^{-i theta} lambda) > 0``."""
        return [ArcSet.from_starts([a - pi / 2], pi) for a in self.args]


def zdi_normal(spec):
    """Exact index of a normal matrix with the given spectrum.

    ``d = k + m - s`` where ``s`` is the most nonzero eigenvalues that fit in
    one open half-plane through 0.
    """
    k, m, n = spec.kernel_dim, spec.m, spec.n
    if m == 0:
        s, theta_s = 0, 0.0
    else:
        s, theta_s = max_stabbing(spec.positive_arcs(), eps=spec.angle_tol)
    d = k + m - s
    if not k <= d <= (n + k) // 2:
        raise TheoremViolation("normal bounds k <= d <= floor((n+k)/2) failed",
                               {"d": d, "n": n, "k": k})
    return ZdiResult(
        d=d,
        n=n,
        method="normal",
        tol=spec.angle_tol,
        theta_witness=float(np.mod(theta_s + pi, TWO_PI)),
        extras={"kernel_dim": k, "max_open_halfplane": s},
    )


def zdi_normal_matrix(A, tol=None):
    spec, _, _ = NormalSpectrum.from_matrix(A, tol)
    return zdi_normal(spec)


def _printed_upper_conditions(args, tol):
    """Argument-gap conditions for ``d = floor((n+k)/2)`` as stated for sorted args."""
    m = args.size
    if m == 0:
        return True
    if m % 2 == 0:
        h = m // 2
        return all(abs(args[j + h] - args[j] - pi) <= tol for j in range(h))
    h = (m - 1) // 2
    first = all(args[j + h] - args[j] <= pi + tol for j in range((m + 1) // 2))
    second = all(args[j - (m + 1) // 2] - args[j] <= -pi + tol for j in range((m + 3) // 2 - 1, m))
    return first and second


def classify_normal_extremal(spec):
    """Tag the index of a normal matrix as ``lower``, ``upper`` or ``interior``.

    ``lower`` (``d = k``) holds iff 0 is outside the hull of the nonzero
    eigenvalues; ``upper`` (``d = floor((n+k)/2)``) is read from the
    argument-gap conditions.  When both extremes coincide ``lower`` wins.
    The returned dict also carries the exact index; a gap-condition verdict
    that disagrees with it is overridden and flagged.
    """
    res = zdi_normal(spec)
    k, m, n = spec.kernel_dim, spec.m, spec.n
    hull_misses_zero = res.extras["max_open_halfplane"] == m
    printed_upper = _printed_upper_conditions(spec.args, spec.angle_tol)
    exact_upper = res.d == (n + k) // 2
    if hull_misses_zero:
        tag = "lower"
    elif exact_upper:
        tag = "upper"
    else:
        tag = "interior"
    return {
        "tag": tag,
        "d": res.d,
        "lower_condition": hull_misses_zero,
        "upper_condition_printed": printed_upper,
        "flagged": printed_upper != exact_upper,
    }


# ---------------------------------------------------------------------------
# Weighted permutation matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cycle:
    """Weighted cycle ``nodes[0] -> nodes[1] -> ... -> nodes[0]``; ``weights[s]`` sits on edge s."""

    nodes: tuple
    weights: np.ndarray

    @property
    def size(self):
        return len(self.nodes)

    @property
    def angle_sum(self):
        return float(np.sum(_arg(self.weights)))

    def matrix(self):
        from .matrix_core import cycle_matrix
        return cycle_matrix(self.weights)


@dataclass(frozen=True)
class Path:
    """Weighted path ``nodes[0] -> ... -> nodes[-1]``; ``len(weights) == size - 1``."""

    nodes: tuple
    weights: np.ndarray

    @property
    def size(self):
        return len(self.nodes)

    def matrix(self):
        from .matrix_core import path_matrix
        return path_matrix(self.weights)


@dataclass(frozen=True)
class PermDecomposition:
    """Cycles (size >= 2), self-loops (nonzero diagonal entries) and paths of a weighted permutation."""

    n: int
    cycles: tuple = ()
    paths: tuple = ()
    loops: tuple = ()

    @property
    def components(self):
        return list(self.cycles) + list(self.loops) + list(self.paths)

    @property
    def order(self):
        return [i for c in self.components for i in c.nodes]

    @property
    def p(self):
        """Odd cycles, self-loops excluded."""
        return sum(1 for c in self.cycles if c.size % 2)

    @property
    def q(self):
        return sum(1 for c in self.cycles if c.size % 2 == 0)

    @property
    def r(self):
        return len(self.paths)

    def permutation_matrix(self):
        """``P`` with ``P.T @ A @ P == canonical_form()``."""
        return np.eye(self.n)[:, self.order]

    def canonical_form(self):
        return direct_sum(*[c.matrix() for c in self.components])


def decompose_weighted_permutation(A, atol=0.0):
    """Split a weighted permutation matrix into cycles, self-loops and paths.

    Entries with modulus ``<= atol`` count as zero.  Components are listed in
    order of their smallest node; each cycle starts at its smallest node.
    """
    A = as_matrix(A)
    n = A.shape[0]
    mask = np.abs(A) > atol
    if mask.sum(axis=0).max() > 1 or mask.sum(axis=1).max() > 1:
        raise NotWeightedPermutation("a row or column has more than one nonzero entry")
    succ = np.full(n, -1)
    pred = np.full(n, -1)
    for i, j in zip(*np.nonzero(mask)):
        succ[i] = j
        pred[j] = i
    seen = np.zeros(n, dtype=bool)
    paths, cycles, loops = [], [], []
    for start in range(n):
        if pred[start] != -1 or seen[start]:
            continue
        nodes = [start]
        seen[start] = True
        while succ[nodes[-1]] != -1:
            nodes.append(int(succ[nodes[-1]]))
            seen[nodes[-1]] = True
        w = np.array([A[a, b] for a, b in zip(nodes, nodes[1:])], dtype=np.complex128)
        paths.append(Path(tuple(nodes), w))
    for start in range(n):
        if seen[start]:
            continue
        nodes = [start]
        seen[start] = True
        while succ[nodes[-1]] != start:
            nodes.append(int(succ[nodes[-1]]))
            seen[nodes[-1]] = True
        nxt = nodes[1:] + nodes[:1]
        w = np.array([A[a, b] for a, b in zip(nodes, nxt)], dtype=np.complex128)
        (loops if len(nodes) == 1 else cycles).append(Cycle(tuple(nodes), w))
    return PermDecomposition(n=n, cycles=tuple(cycles), paths=tuple(paths), loops=tuple(loops))


def zdi_path(n):
    """Index of an ``n x n`` weighted path (nonzero weights): ``ceil(n/2)``."""
    if n < 1:
        raise ValidationError("path size must be >= 1")
    return (n + 1) // 2


@dataclass(frozen=True)
class CycleAnalysis:
    """Index of one weighted cycle with the angles where ``i_{>=0}`` exceeds it.

    Odd size: ``high_arcs`` are the closed arcs where ``i_{>=0} = (n+1)/2``.
    Even size: ``exceptional`` says whether the alternating moduli products
    agree; if so ``i_{>=0} = n/2 + 1`` exactly at ``exceptional_thetas``.
    """

    d: int
    n: int
    alpha: float
    high_arcs: ArcSet = None
    exceptional: bool = None
    exceptional_thetas: tuple = ()


def _odd_cycle_negative_arcs(size, alpha):
    """Open arcs where ``(-1)^((n-1)/2) cos(n theta - alpha) < 0``."""
    c = pi / 2 if ((size - 1) // 2) % 2 == 0 else -pi / 2
    starts = (alpha + c + TWO_PI * np.arange(size)) / size
    return ArcSet.from_starts(starts, pi / size)


def zdi_cycle(weights, rtol=1e-10):
    w = np.asarray(weights, dtype=np.complex128).ravel()
    n = w.size
    if n < 2:
        raise ValidationError("cycle size must be >= 2")
    if np.any(w == 0):
        raise ValidationError("cycle weights must be nonzero")
    alpha = float(np.sum(_arg(w)))
    if n % 2:
        neg = _odd_cycle_negative_arcs(n, alpha)
        # closed complement of n equally spaced open arcs of length pi/n
        high = ArcSet.from_starts([e for _, e in neg.arcs], pi / n, closed=True)
        return CycleAnalysis(d=n // 2, n=n, alpha=alpha, high_arcs=high)
    log_odd = np.sum(np.log(np.abs(w[0::2])))
    log_even = np.sum(np.log(np.abs(w[1::2])))
    exceptional = bool(abs(log_odd - log_even) <= rtol * max(1.0, abs(log_odd) + abs(log_even)))
    thetas = ()
    if exceptional:
        shift = pi * ((n // 2) % 2)
        thetas = tuple(float(t) for t in np.sort(np.mod((alpha + shift + TWO_PI * np.arange(n)) / n, TWO_PI)))
    return CycleAnalysis(d=n // 2, n=n, alpha=alpha, exceptional=exceptional, exceptional_thetas=thetas)


def even_cycle_determinant(weights, theta):
    """Closed form of ``det Re(e^{-i theta} C)`` for an even weighted cycle ``C``.

    ``2^-n [(-1)^(n/2) (P_odd^2 + P_even^2) - 2 |prod w| cos(n theta - alpha)]``
    with ``P_odd``/``P_even`` the products of the moduli of alternate weights
    and ``alpha`` the sum of their arguments.  Vectorised over ``theta``.
    """
    w = np.asarray(weights, dtype=np.complex128).ravel()
    n = w.size
    if n < 2 or n % 2:
        raise ValidationError("even cycle size required")
    p_odd = np.prod(np.abs(w[0::2]))
    p_even = np.prod(np.abs(w[1::2]))
    alpha = float(np.sum(_arg(w)))
    theta = np.asarray(theta, dtype=float)
    sign = -1.0 if (n // 2) % 2 else 1.0
    return (sign * (p_odd ** 2 + p_even ** 2) - 2 * p_odd * p_even * np.cos(n * theta - alpha)) / 2 ** n


def zdi_weighted_permutation(dec, angle_tol=EXACT_ANGLE_TOL):
    """Exact index of a weighted permutation matrix from its decomposition.

    Sum of ``floor(n_j/2)`` over cycles and ``ceil(m_k/2)`` over paths, plus
    the fewest odd cycles that must be nonnegative at one angle.  The last
    term equals ``p - s`` with ``s`` the maximum number of the open arc sets
    ``{theta : (-1)^((n_j-1)/2) cos(n_j theta - alpha_j) < 0}`` sharing a
    point.  Self-loops enter as odd cycles of size 1.
    """
    base = sum(c.size // 2 for c in dec.cycles) + sum(zdi_path(pth.size) for pth in dec.paths)
    odd = [c for c in dec.cycles if c.size % 2] + list(dec.loops)
    families = [_odd_cycle_negative_arcs(c.size, c.angle_sum) for c in odd]
    s, theta = max_stabbing(families, eps=angle_tol)
    extra = len(odd) - s
    d = base + extra
    if not base <= d <= base + len(odd) // 2:
        raise TheoremViolation("weighted-permutation bounds d_low <= d <= d_low + floor(p/2) failed",
                               {"d": d, "d_low": base, "p": len(odd)})
    return ZdiResult(
        d=d,
        n=dec.n,
        method="weighted-permutation",
        tol=angle_tol,
        theta_witness=0.0 if theta is None else theta,
        extras={
            "d_low": base,
            "p": dec.p,
            "q": dec.q,
            "r": dec.r,
            "loops": len(dec.loops),
            "odd_arc_excess": extra,
        },
    )


def zdi_weighted_permutation_matrix(A, atol=0.0):
    return zdi_weighted_permutation(decompose_weighted_permutation(A, atol))


def cycle_pair_rule(b_weights, c_weights, tol=1e-10):
    """Index of ``B (+) C`` for two weighted cycles.

    One more than ``d(B) + d(C)`` exactly when both have the same odd size
    and their angle sums differ by an odd multiple of ``pi``.
    """
    b = np.asarray(b_weights, dtype=np.complex128).ravel()
    c = np.asarray(c_weights, dtype=np.complex128).ravel()
    m, n = b.size, c.size
    if m < 2 or n < 2:
        raise ValidationError("cycle sizes must be >= 2")
    base = m // 2 + n // 2
    if m != n or m % 2 == 0:
        return base
    ratio = (np.sum(_arg(b)) - np.sum(_arg(c))) / pi
    nearest = round(ratio)
    if abs(ratio - nearest) <= tol and nearest % 2:
        return base + 1
    return base


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------

def direct_sum_zdi(parts, cfg=None):
    """Index of a block-diagonal sum together with the additivity verdict.

    ``extras['additive']`` says whether ``d`` equals the sum of the parts'
    indices; when it does, ``extras['shared_witness']`` is an angle where
    every part attains its own index.
    """
    cfg = cfg or SweepConfig()
    parts = [as_matrix(P) for P in parts]
    if not parts:
        raise ValidationError("no parts given")
    total = zdi_general(direct_sum(*parts), cfg)
    part_d = [zdi_general(P, cfg).d for P in parts]
    additive = total.d == sum(part_d)
    if total.d < sum(part_d):
        raise TheoremViolation("direct sum index below sum of parts", {"d": total.d, "parts": part_d})
    witness = None
    if additive:
        witness = total.theta_witness
        tol = total.tol
        for P, dj in zip(parts, part_d):
            vals = hermitian_eig(rotated_real_part(P, witness)).values
            if np.count_nonzero(vals >= -tol) != dj:
                witness = None
                break
    return ZdiResult(
        d=total.d,
        n=total.n,
        method="direct-sum",
        tol=total.tol,
        theta_witness=total.theta_witness,
        lambda_minima=total.lambda_minima,
        lambda_argmins=total.lambda_argmins,
        extras={"part_d": part_d, "sum_of_parts": sum(part_d), "additive": additive,
                "shared_witness": witness},
    )
