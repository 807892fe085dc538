"""Seeded random matrix corpora shared by the module tests and the acceptance suite."""

import numpy as np
import pytest

from zdi.matrix_core import (
    conjugate,
    cycle_matrix,
    direct_sum,
    path_matrix,
    random_unitary,
)


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_phase_weights(rng, m):
    """Nonzero weights with random moduli in [0.3, 2] and random phases."""
    return rng.uniform(0.3, 2.0, m) * np.exp(2j * np.pi * rng.random(m))


def corner_matrix(rng, n, d):
    """``U* [[0_d, X], [Y, Z]] U`` with Gaussian blocks; index is at least ``d``."""
    A = cgauss(rng, n, n)
    A[:d, :d] = 0
    return conjugate(A, random_unitary(n, rng))


def general_matrix(rng, n):
    """Mixture: Gaussian, zero-corner, Jordan-like and zero-padded matrices."""
    kind = rng.integers(4)
    if kind == 0:
        return cgauss(rng, n, n)
    if kind == 1:
        return corner_matrix(rng, n, int(rng.integers(1, n + 1)))
    if kind == 2:
        A = np.triu(cgauss(rng, n, n), 1)
        A += np.diag(rng.choice([0.0, 0.0, 1.0, -1.0], n))
        return conjugate(A, random_unitary(n, rng))
    m = int(rng.integers(1, n))
    return conjugate(direct_sum(cgauss(rng, n - m, n - m), np.zeros((m, m))),
                     random_unitary(n, rng))


def hermitian_matrix(rng, n):
    """Random Hermitian with a random signature, including kernels."""
    vals = rng.choice([-1.0, 0.0, 1.0], n) * rng.uniform(0.2, 3.0, n)
    U = random_unitary(n, rng)
    H = U @ np.diag(vals) @ U.conj().T
    return (H + H.conj().T) / 2


def normal_eigs(rng, n):
    kind = rng.integers(3)
    if kind == 0:
        eigs = cgauss(rng, n)
    elif kind == 1:
        # all in a half-plane, so 0 tends to be on the hull boundary or outside
        phi = rng.uniform(-np.pi / 2, np.pi / 2, n) + rng.uniform(0, 2 * np.pi)
        eigs = rng.uniform(0.5, 2, n) * np.exp(1j * phi)
    else:
        # antipodal pairs and roots of unity
        m = int(rng.integers(min(2, n), n + 1))
        eigs = np.concatenate([np.exp(2j * np.pi * np.arange(m) / m + 1j * rng.uniform(0, 2 * np.pi))
                               * rng.uniform(0.5, 2), cgauss(rng, n - m)])
    k = int(rng.integers(0, n // 2 + 1))
    eigs[:k] = 0
    return eigs


def normal_matrix(rng, n, eigs=None):
    eigs = normal_eigs(rng, n) if eigs is None else eigs
    U = random_unitary(n, rng)
    return U @ np.diag(eigs) @ U.conj().T


def weighted_permutation_blocks(rng, n):
    """Random sizes summing to ``n``: list of ``('cycle'|'path', weights)``."""
    blocks, left = [], n
    while left:
        size = int(rng.integers(1, left + 1))
        kind = rng.choice(["cycle", "path"])
        w = random_phase_weights(rng, size if kind == "cycle" else size - 1)
        blocks.append((kind, w))
        left -= size
    return blocks


def weighted_permutation_matrix(rng, n, blocks=None):
    blocks = blocks or weighted_permutation_blocks(rng, n)
    parts = [cycle_matrix(w) if kind == "cycle" else path_matrix(w) for kind, w in blocks]
    A = direct_sum(*parts)
    P = np.eye(n)[rng.permutation(n)]
    return P @ A @ P.T


GENERATORS = {
    "general": general_matrix,
    "hermitian": hermitian_matrix,
    "normal": normal_matrix,
    "weighted-permutation": weighted_permutation_matrix,
}


def corpus(kind, count, seed, n_range=(2, 8)):
    rng = np.random.default_rng(seed)
    lo, hi = n_range
    return [GENERATORS[kind](rng, int(rng.integers(lo, hi + 1))) for _ in range(count)]


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
