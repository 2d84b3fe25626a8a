"""Truncated power-series arithmetic on coefficient vectors.

A series is a 1-D float array ``c`` of length ``T + 1`` holding the
coefficients ``c[0..T]`` of a generating function truncated at the shared
horizon ``T``.  All identities in the package are checked coefficient-wise
on that window, so truncation introduces no error for coefficients below
the horizon.
"""

from __future__ import annotations

import numpy as np

from .errors import HorizonMismatchError, SingularSeriesError

DEFAULT_HORIZON = 512


def as_series(values, horizon: int | None = None) -> np.ndarray:
    """Coerce ``values`` to a float series, zero-padded up to ``horizon``."""
    c = np.asarray(values, dtype=float).ravel()
    if horizon is not None:
        if len(c) > horizon + 1:
            c = c[: horizon + 1]
        elif len(c) < horizon + 1:
            c = np.concatenate([c, np.zeros(horizon + 1 - len(c))])
    if not np.all(np.isfinite(c)):
        raise ValueError("series coefficients must be finite")
    return c


def delta_series(horizon: int) -> np.ndarray:
    """Unit of the convolution algebra: 1 at t=0, zero elsewhere."""
    c = np.zeros(horizon + 1)
    c[0] = 1.0
    return c


def convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Causal discrete convolution (a*b)[t] = sum_r a[r] b[t-r], truncated."""
    if len(a) != len(b):
        raise HorizonMismatchError(
            f"series horizons differ: {len(a) - 1} vs {len(b) - 1}"
        )
    return np.convolve(a, b)[: len(a)]


def conv_power(a: np.ndarray, n: int) -> np.ndarray:
    """n-fold convolution power of ``a`` by repeated squaring; n=0 gives delta."""
    if n < 0:
        raise ValueError("convolution power needs n >= 0")
    result = delta_series(len(a) - 1)
    base = a
    while n:
        if n & 1:
            result = convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return result


def reciprocal(a: np.ndarray) -> np.ndarray:
    """Series ``b`` with (a*b) = delta, by the standard division recursion."""
    if a[0] == 0.0:
        raise SingularSeriesError("cannot invert a series with zero constant term")
    b = np.zeros_like(a)
    b[0] = 1.0 / a[0]
    for t in range(1, len(a)):
        b[t] = -np.dot(a[1 : t + 1], b[t - 1 :: -1]) / a[0]
    return b


def divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Coefficients of num(u)/den(u); den must have nonzero constant term."""
    return convolve(num, reciprocal(den))


def binomial_series(alpha: float, horizon: int) -> np.ndarray:
    """Coefficients of (1-u)^alpha via the stable ratio recursion.

    c[t] = (-1)^t C(alpha, t), computed as c[t] = c[t-1] (t-1-alpha)/t.
    """
    c = np.empty(horizon + 1)
    c[0] = 1.0
    for t in range(1, horizon + 1):
        c[t] = c[t - 1] * (t - 1 - alpha) / t
    return c


def one_minus_u(horizon: int) -> np.ndarray:
    """The series 1 - u."""
    c = np.zeros(horizon + 1)
    c[0] = 1.0
    if horizon >= 1:
        c[1] = -1.0
    return c


def evaluate(a: np.ndarray, u: float) -> float:
    """Evaluate the truncated series at ``u`` (Horner on the coefficients)."""
    return float(np.polynomial.polynomial.polyval(u, a))
