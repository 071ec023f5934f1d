"""Real circular and spherical harmonics, equator factors and ACN indexing.

Y_{n,m}(beta, alpha) = N_{n,m}(beta) C_m(alpha) is the orthonormal (N3D)
real basis; channels are ordered by ACN = n^2 + n + m.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike

from app.core.errors import IndexRangeError
from app.core.sphmath import MAX_ORDER, assoc_legendre

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ShIndex:
    n: int
    m: int

    def __post_init__(self):
        _check_index(self.n, self.m)


def _check_index(n: int, m: int) -> None:
    if n < 0 or abs(m) > n:
        raise IndexRangeError(f"invalid SH index (n={n}, m={m}); need |m| <= n")


def channel_count(order: int) -> int:
    return (order + 1) ** 2


def acn(n: int, m: int) -> int:
    _check_index(n, m)
    return n * n + n + m


def acn_inverse(channel: int) -> ShIndex:
    if channel < 0:
        raise IndexRangeError(f"channel index must be >= 0, got {channel}")
    n = math.isqrt(channel)
    return ShIndex(n=n, m=channel - n * n - n)


def acn_indices(order: int) -> list[ShIndex]:
    """All (n, m) pairs up to ``order`` in ACN order."""
    return [ShIndex(n, m) for n in range(order + 1) for m in range(-n, n + 1)]


def circular_harmonic(m: int, alpha: ArrayLike):
    """C_m(alpha): sqrt(2) sin(|m| alpha) for m < 0, 1 for m = 0, sqrt(2) cos(m alpha) for m > 0."""
    alpha = np.asarray(alpha, dtype=float)
    if m < 0:
        value = SQRT2 * np.sin(-m * alpha)
    elif m == 0:
        value = np.ones_like(alpha)
    else:
        value = SQRT2 * np.cos(m * alpha)
    return value.item() if value.ndim == 0 else value


def _norm_ratio(n: int, am: int) -> float:
    # (n-|m|)!/(n+|m|)! as an incremental product
    ratio = 1.0
    for k in range(n - am + 1, n + am + 1):
        ratio /= k
    return ratio


def n_factor(n: int, m: int, beta: ArrayLike):
    """N_{n,m}(beta) = (-1)^m sqrt((2n+1)/(4 pi) (n-|m|)!/(n+|m|)!) P_n^|m|(cos beta)."""
    _check_index(n, m)
    am = abs(m)
    sign = -1.0 if am % 2 else 1.0
    scale = math.sqrt((2 * n + 1) / (4 * math.pi) * _norm_ratio(n, am))
    mu = np.clip(np.cos(np.asarray(beta, dtype=float)), -1.0, 1.0)
    # cos(pi/2) rounds to 6e-17; the equator must see an exact zero
    mu = np.where(np.abs(mu) < 4 * np.finfo(float).eps, 0.0, mu)
    return sign * scale * assoc_legendre(n, am, mu)


def sph_harmonic(n: int, m: int, beta: ArrayLike, alpha: ArrayLike):
    """Real N3D spherical harmonic Y_{n,m}(beta, alpha)."""
    return n_factor(n, m, beta) * circular_harmonic(m, alpha)


def sh_matrix(order: int, beta: ArrayLike, alpha: ArrayLike) -> np.ndarray:
    """Matrix of Y_{n,m} at the given directions, shape (directions, (order+1)^2), ACN columns."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    out = np.empty((beta.size, channel_count(order)))
    for idx in acn_indices(order):
        out[:, acn(idx.n, idx.m)] = n_factor(idx.n, idx.m, beta) * circular_harmonic(idx.m, alpha)
    return out


def gauss_grid(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre x uniform-azimuth product grid exact for SH products up to ``order``.

    Returns (colatitudes, azimuths, weights) with weights summing to 4 pi.
    """
    nodes, gl_weights = np.polynomial.legendre.leggauss(order + 1)
    n_azimuth = 2 * order + 2
    azimuths = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    colat = np.repeat(np.arccos(nodes), n_azimuth)
    azi = np.tile(azimuths, order + 1)
    weights = np.repeat(gl_weights, n_azimuth) * (2 * np.pi / n_azimuth)
    return colat, azi, weights


@dataclass(frozen=True)
class EquatorFactorTable:
    """N_{n,m}(pi/2) for all |m| <= n <= max_order, stored in ACN order."""

    max_order: int
    values: np.ndarray

    def value(self, n: int, m: int) -> float:
        if n > self.max_order:
            raise IndexRangeError(f"order {n} outside table of order {self.max_order}")
        return float(self.values[acn(n, m)])


@lru_cache(maxsize=None)
def equator_table(max_order: int) -> EquatorFactorTable:
    if max_order < 0:
        raise IndexRangeError(f"max_order must be >= 0, got {max_order}")
    if max_order > MAX_ORDER:
        raise IndexRangeError(f"max_order {max_order} exceeds the cap of {MAX_ORDER}")
    values = np.zeros(channel_count(max_order))
    for idx in acn_indices(max_order):
        if (idx.n + abs(idx.m)) % 2:
            continue
        values[acn(idx.n, idx.m)] = n_factor(idx.n, idx.m, np.pi / 2)
    values.setflags(write=False)
    return EquatorFactorTable(max_order=max_order, values=values)
