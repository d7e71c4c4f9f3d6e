"""Independent reference implementations used only by the test suite.

Everything here favors obviousness over speed: explicit recursion, explicit
matrices, explicit long division. The production code must agree with these
bit for bit (decoding) or exactly (algebra), which is what the equivalence
tests assert.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq


def kronecker_generator(n: int) -> np.ndarray:
    """G as an explicit matrix: n-fold Kronecker power of [[1,0],[1,1]]."""
    g = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    out = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        out = np.kron(out, g)
    return out


def matrix_encode(u: np.ndarray) -> np.ndarray:
    n = int(math.log2(len(u)))
    return (np.asarray(u, dtype=np.uint8) @ kronecker_generator(n)) % 2


def naive_sc_decode(frozen: set, y: np.ndarray, flips: set = frozenset()):
    """Textbook recursive SC: returns (u_hat, leaf_llr)."""
    y = np.asarray(y, dtype=np.float64)
    N = len(y)
    u_hat = np.zeros(N, dtype=np.uint8)
    leaf_llr = np.zeros(N, dtype=np.float64)

    def f(a, b):
        return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))

    def g(a, b, bits):
        return b + (1.0 - 2.0 * bits.astype(np.float64)) * a

    def recurse(alpha, first_leaf):
        size = len(alpha)
        if size == 1:
            llr = alpha[0]
            leaf_llr[first_leaf] = llr
            if first_leaf in frozen:
                bit = 0
            else:
                bit = 0 if llr >= 0.0 else 1
                if first_leaf in flips:
                    bit ^= 1
            u_hat[first_leaf] = bit
            return np.array([bit], dtype=np.uint8)
        half = size // 2
        a, b = alpha[:half], alpha[half:]
        beta_l = recurse(f(a, b), first_leaf)
        beta_r = recurse(g(a, b, beta_l), first_leaf + half)
        return np.concatenate([beta_l ^ beta_r, beta_r])

    root_beta = recurse(y, 0)
    return u_hat, leaf_llr, root_beta


def crc_long_division(message_bits, width: int, poly: int) -> list:
    """Remainder of message * x^width by explicit polynomial long division."""
    gen = [1] + [(poly >> (width - 1 - k)) & 1 for k in range(width)]
    work = list(message_bits) + [0] * width
    for i in range(len(message_bits)):
        if work[i]:
            for j, gbit in enumerate(gen):
                work[i + j] ^= gbit
    return work[-width:]


def _phi_ln(x: float) -> float:
    if x < 10.0:
        return -0.4527 * x**0.86 + 0.0218
    return 0.5 * (math.log(math.pi) - math.log(x)) - 0.25 * x + math.log1p(-10.0 / (7.0 * x))


def ga_reliability(n: int, design_snr_db: float, rate: float = 0.5) -> np.ndarray:
    """Recursive density-evolution ordering with a library root finder."""
    sigma_sq = 1.0 / (2.0 * rate * 10.0 ** (design_snr_db / 10.0))

    def degrade(mu):
        if mu <= 0.0:
            return 0.0
        lt = _phi_ln(mu)
        target = lt + math.log(2.0 - math.exp(lt))
        fn = lambda x: _phi_ln(x) - target
        if fn(mu) >= 0.0:
            # approximation floor near zero; the solution is the endpoint
            return mu
        return brentq(fn, 0.0, mu, xtol=1e-300, rtol=8.9e-16, maxiter=500)

    # child order: degraded side first, so the list index is the leaf index
    def leaves(mu, depth):
        if depth == 0:
            return [mu]
        return leaves(degrade(mu), depth - 1) + leaves(2.0 * mu, depth - 1)

    mus = np.asarray(leaves(2.0 / sigma_sq, n))
    return np.argsort(mus, kind="stable")


def phi_by_quadrature(mu: float) -> float:
    """E[1 - tanh(z/2)] for z ~ N(mu, 2 mu), evaluated numerically."""
    from scipy.integrate import quad

    sd = math.sqrt(2.0 * mu)
    val, _ = quad(
        lambda z: (1.0 - math.tanh(z / 2.0))
        * math.exp(-((z - mu) ** 2) / (4.0 * mu)) / (sd * math.sqrt(2.0 * math.pi)),
        mu - 12.0 * sd, mu + 12.0 * sd, limit=200,
    )
    return val
