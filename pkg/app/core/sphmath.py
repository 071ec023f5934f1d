"""Special functions for the rigid-sphere model.

Associated Legendre functions follow the Condon-Shortley convention
(the ``(-1)^m`` factor is part of ``P_n^m``), matching ``scipy.special.lpmv``.
Spherical Hankel functions of the second kind, ``h_n^(2) = j_n - i y_n``,
represent outgoing waves for transforms with a negative forward exponent.

Every function accepts a scalar or an array argument and returns the same
shape. Orders are capped at ``MAX_ORDER``.
"""

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from app.core.errors import DomainError, IndexRangeError

MAX_ORDER = 64


def _check_order(n: int) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n}")
    if n > MAX_ORDER:
        raise IndexRangeError(f"order {n} exceeds the supported cap of {MAX_ORDER}")


def _positive(x: ArrayLike, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError(f"{name} requires x > 0 (singular at the origin)")
    return x


def _unwrap(value: np.ndarray):
    return value.item() if value.ndim == 0 else value


def assoc_legendre(n: int, m: int, mu: ArrayLike):
    """P_n^m(mu) by upward recurrence in n, seeded with the closed-form P_m^m."""
    _check_order(n)
    if int(m) != m or m < 0 or m > n:
        raise DomainError(f"assoc_legendre needs 0 <= m <= n, got n={n}, m={m}")
    mu = np.asarray(mu, dtype=float)
    if np.any(np.abs(mu) > 1.0):
        raise DomainError("assoc_legendre requires |mu| <= 1")

    # P_m^m = (-1)^m (2m-1)!! (1-mu^2)^(m/2)
    somx2 = np.sqrt((1.0 - mu) * (1.0 + mu))
    p_mm = np.ones_like(mu)
    fact = 1.0
    for _ in range(m):
        p_mm = -p_mm * fact * somx2
        fact += 2.0
    if n == m:
        return _unwrap(p_mm)

    p_prev = p_mm
    p_curr = mu * (2 * m + 1) * p_mm
    for ell in range(m + 2, n + 1):
        p_prev, p_curr = p_curr, ((2 * ell - 1) * mu * p_curr - (ell + m - 1) * p_prev) / (ell - m)
    return _unwrap(p_curr)


def sph_bessel_j(n: int, x: ArrayLike):
    """Spherical Bessel function of the first kind; j_0(0) = 1, j_n(0) = 0."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("sph_bessel_j is defined here for x >= 0")
    return _unwrap(special.spherical_jn(n, x))


def sph_bessel_j_deriv(n: int, x: ArrayLike):
    """d/dx j_n(x)."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("sph_bessel_j_deriv is defined here for x >= 0")
    return _unwrap(special.spherical_jn(n, x, derivative=True))


def sph_bessel_y(n: int, x: ArrayLike):
    """Spherical Bessel function of the second kind (Neumann)."""
    _check_order(n)
    x = _positive(x, "sph_bessel_y")
    return _unwrap(special.spherical_yn(n, x))


def sph_hankel1(n: int, x: ArrayLike):
    """h_n^(1)(x) = j_n(x) + i y_n(x)."""
    _check_order(n)
    x = _positive(x, "sph_hankel1")
    return _unwrap(special.spherical_jn(n, x) + 1j * special.spherical_yn(n, x))


def sph_hankel2(n: int, x: ArrayLike):
    """h_n^(2)(x) = j_n(x) - i y_n(x)."""
    _check_order(n)
    x = _positive(x, "sph_hankel2")
    return _unwrap(special.spherical_jn(n, x) - 1j * special.spherical_yn(n, x))


def sph_hankel2_deriv(n: int, x: ArrayLike):
    """d/dx h_n^(2)(x) via h'_n = h_{n-1} - (n+1)/x h_n, and h'_0 = -h_1."""
    _check_order(n)
    x = _positive(x, "sph_hankel2_deriv")
    if n == 0:
        return _unwrap(-(special.spherical_jn(1, x) - 1j * special.spherical_yn(1, x)))
    with np.errstate(invalid="ignore", over="ignore"):
        h_prev = special.spherical_jn(n - 1, x) - 1j * special.spherical_yn(n - 1, x)
        h_n = special.spherical_jn(n, x) - 1j * special.spherical_yn(n, x)
        return _unwrap(h_prev - (n + 1) / x * h_n)
