"""Outer polygonal approximations of the rank-k numerical range.

``Lambda_k(A)`` is the intersection over all angles of the half-planes
``Re(e^{-i theta} z) <= lambda_k(Re(e^{-i theta} A))``.  Sampling ``N``
angles and clipping gives a convex polygon containing ``Lambda_k(A)``.
Membership of 0 is never decided from the polygon; :func:`contains_zero`
uses the sweep minimum of ``lambda_k`` so it always agrees with ``d(A)``.
"""

import io
from dataclasses import dataclass
from math import pi

import numpy as np

from .engine import SweepConfig, _spectra, min_lambda_k
from .matrix_core import as_matrix, hermitian_eig, imag_part, real_part, rotated_real_part

__all__ = [
    "RangePolygon",
    "support_value",
    "support_values",
    "range_polygon",
    "contains_zero",
    "clip_halfplane",
    "to_csv",
    "to_svg",
]


@dataclass(frozen=True)
class RangePolygon:
    """Counterclockwise convex polygon; ``vertices`` is empty iff ``empty``."""

    k: int
    vertices: np.ndarray
    empty: bool
    support_samples: np.ndarray  # shape (N, 2): columns theta, lambda_k

    @property
    def area(self):
        if self.vertices.size < 3:
            return 0.0
        x, y = self.vertices.real, self.vertices.imag
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def diameter(self):
        v = self.vertices
        if v.size < 2:
            return 0.0
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def is_convex(self, tol=1e-12):
        v = self.vertices
        if v.size < 3:
            return True
        e = np.roll(v, -1) - v
        cross = (e.conj() * np.roll(e, -1)).imag
        scale = max(float(np.max(np.abs(e))) ** 2, 1e-300)
        return bool(np.all(cross >= -tol * scale))

    def contains(self, z, inflate=0.0):
        """Point-in-polygon against the edges, with outward slack ``inflate``."""
        v = self.vertices
        if self.empty:
            return False
        if v.size == 1:
            return abs(z - v[0]) <= inflate
        if v.size == 2:
            a, b = v
            t = np.clip(((z - a) * np.conj(b - a)).real / abs(b - a) ** 2, 0.0, 1.0)
            return abs(z - (a + t * (b - a))) <= inflate
        e = np.roll(v, -1) - v
        # signed distance to each edge line, positive inside for ccw order
        dist = (e.conj() * (z - v)).imag / np.abs(e)
        return bool(np.all(dist >= -inflate))

    def translated(self, c):
        s = self.support_samples.copy()
        s[:, 1] += np.real(np.exp(-1j * s[:, 0]) * c)
        return RangePolygon(self.k, self.vertices + c, self.empty, s)


def support_value(A, k, theta):
    """``lambda_k(Re(e^{-i theta} A))``, eigenvalues counted from the top."""
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    return float(hermitian_eig(rotated_real_part(A, theta)).values[k - 1])


def support_values(A, k, thetas):
    """Vectorised :func:`support_value` (parallel over angles)."""
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    return _spectra(real_part(A), imag_part(A), np.asarray(thetas, dtype=float))[:, k - 1]


def clip_halfplane(poly, theta, h, eps=0.0):
    """Sutherland-Hodgman clip of a vertex list to ``Re(e^{-i theta} z) <= h``."""
    if not poly:
        return poly
    u = np.exp(1j * theta)
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        fp = (p * np.conj(u)).real - h
        fq = (q * np.conj(u)).real - h
        if fp <= eps:
            out.append(p)
        if (fp <= eps) != (fq <= eps) and fp != fq:
            out.append(p + (q - p) * (fp / (fp - fq)))
    return out


def _dedupe(points, tol):
    out = []
    for p in points:
        if not out or abs(p - out[-1]) > tol:
            out.append(p)
    while len(out) > 1 and abs(out[0] - out[-1]) <= tol:
        out.pop()
    return out


def range_polygon(A, k, N=720):
    """Intersect ``N`` equally spaced supporting half-planes of ``Lambda_k(A)``."""
    if N < 8:
        raise ValueError("need at least 8 directions")
    A = as_matrix(A)
    thetas = 2 * pi * np.arange(N) / N
    h = support_values(A, k, thetas)
    scale = float(np.linalg.norm(A, 2)) + 1.0
    R = 4 * scale
    poly = [complex(-R, -R), complex(R, -R), complex(R, R), complex(-R, R)]
    eps = 1e-13 * scale
    for t, hv in zip(thetas, h):
        poly = clip_halfplane(poly, float(t), float(hv), eps)
        if not poly:
            break
    poly = _dedupe(poly, 1e-12 * scale)
    samples = np.column_stack([thetas, h])
    return RangePolygon(k=k, vertices=np.array(poly, dtype=np.complex128),
                        empty=not poly, support_samples=samples)


def contains_zero(A, k, cfg=None):
    """``0 in Lambda_k(A)``, decided by ``min_theta lambda_k >= -tol``."""
    cfg = cfg or SweepConfig()
    A = as_matrix(A)
    value, _ = min_lambda_k(A, k, cfg)
    return value >= -cfg.tol_for(A)


def to_csv(poly):
    """CSV text: ``theta,support`` rows, then a ``vertex_re,vertex_im`` block."""
    buf = io.StringIO()
    buf.write("theta,support\n")
    for t, h in poly.support_samples:
        buf.write(f"{float(t)!r},{float(h)!r}\n")
    buf.write("vertex_re,vertex_im\n")
    for z in poly.vertices:
        buf.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
    return buf.getvalue()


def to_svg(poly, size=480, title=None, eigenvalues=None):
    """Static SVG 1.1 figure of the polygon with real/imaginary axes."""
    pts = list(poly.vertices)
    if eigenvalues is not None:
        pts += list(np.asarray(eigenvalues, dtype=complex))
    pts.append(0j)
    xs = np.array([p.real for p in pts])
    ys = np.array([p.imag for p in pts])
    span = max(float(np.ptp(xs)), float(np.ptp(ys)), 1e-6)
    pad = 0.15 * span
    x0, x1 = xs.min() - pad, xs.max() + pad
    y0, y1 = ys.min() - pad, ys.max() + pad
    s = size / max(x1 - x0, y1 - y0)

    def px(z):
        return (z.real - x0) * s, (y1 - z.imag) * s

    w, hgt = (x1 - x0) * s, (y1 - y0) * s
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w:.1f}" height="{hgt:.1f}" viewBox="0 0 {w:.3f} {hgt:.3f}">',
    ]
    ox, oy = px(0j)
    lines.append(f'<line x1="0" y1="{oy:.3f}" x2="{w:.3f}" y2="{oy:.3f}" stroke="#888"/>')
    lines.append(f'<line x1="{ox:.3f}" y1="0" x2="{ox:.3f}" y2="{hgt:.3f}" stroke="#888"/>')
    lines.append(f'<text x="{w - 4:.3f}" y="{oy - 4:.3f}" text-anchor="end" '
                 f'font-size="12">Re</text>')
    lines.append(f'<text x="{ox + 4:.3f}" y="12" font-size="12">Im</text>')
    if poly.vertices.size:
        coords = " ".join(f"{a:.4f},{b:.4f}" for a, b in map(px, poly.vertices))
        lines.append(f'<polygon points="{coords}" fill="#4a90d9" fill-opacity="0.35" '
                     f'stroke="#1f4e8c" stroke-width="1.5"/>')
    if eigenvalues is not None:
        for z in np.asarray(eigenvalues, dtype=complex):
            cx, cy = px(z)
            lines.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="3" fill="#c0392b"/>')
    label = title or f"Lambda_{poly.k}" + (" (empty)" if poly.empty else "")
    lines.append(f'<text x="6" y="{hgt - 6:.3f}" font-size="12">{label}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
