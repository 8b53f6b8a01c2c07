"""GEV, joint r-largest (GEV_r), truncated GEV and KumGEV distributions.

The shape-zero (Gumbel) regime is handled by analytic limit branches, and
the general branches go through ``log1p``/``expm1`` so that values vary
continuously as the shape parameter crosses zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, DegenerateTruncationError, DomainError
from .rng import as_generator

# Shape parameters below this magnitude take the Gumbel-limit branches.
XI_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class GevParams:
    """Location/scale/shape triple shared by the GEV and GEV_r models."""

    mu: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"scale must be positive, got sigma={self.sigma}")

    @property
    def in_estimation_region(self) -> bool:
        """True when xi > -0.5, where likelihood-based inference is valid."""
        return self.xi > -0.5

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.sigma, self.xi], dtype=float)

    @classmethod
    def from_array(cls, theta) -> "GevParams":
        mu, sigma, xi = (float(v) for v in theta)
        return cls(mu, sigma, xi)


@dataclass(frozen=True)
class KumGevParams:
    """KumGEV parameters: a base GEV plus the two Kumaraswamy exponents."""

    base: GevParams
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"KumGEV needs a > 0 and b > 0, got a={self.a}, b={self.b}")


class RLargestSample:
    """n blocks of r within-block order statistics, rows strictly decreasing.

    Parameters
    ----------
    values : array_like, shape (n, r)
        Row i holds the r largest values of block i in decreasing order.
    labels : sequence, optional
        One identifier per block (for example the year); kept only for
        reporting and serialization.
    """

    def __init__(self, values, labels=None):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.ndim != 2:
            raise DataError("values must be a 2-D (n, r) array")
        n, r = values.shape
        if n < 1 or r < 1:
            raise DataError("need at least one block and one order statistic")
        if not np.all(np.isfinite(values)):
            raise DataError("values must be finite")
        if r > 1:
            diffs = np.diff(values, axis=1)
            if np.any(diffs >= 0):
                i = int(np.argwhere(diffs >= 0)[0][0])
                raise DataError(
                    "rows must be strictly decreasing (ties are rejected); "
                    f"first violation in block {i}"
                )
        if labels is not None:
            labels = list(labels)
            if len(labels) != n:
                raise DataError(f"{len(labels)} labels for {n} blocks")
        self.values = values
        self.labels = labels

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def r(self) -> int:
        return self.values.shape[1]

    def top(self, r: int) -> "RLargestSample":
        """The sub-sample holding the leftmost (largest) r columns."""
        if not 1 <= r <= self.r:
            raise DomainError(f"requested r={r} outside 1..{self.r}")
        return RLargestSample(self.values[:, :r], labels=self.labels)

    def __repr__(self):
        return f"RLargestSample(n={self.n}, r={self.r})"


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def gev_cdf(x, theta: GevParams):
    """GEV distribution function; total on the real line.

    Returns exp{-(1+xi*z)^(-1/xi)} inside the support and the appropriate
    0/1 value beyond the endpoint, with the Gumbel form at xi == 0.
    """
    arr, scalar = _as_float_array(x)
    z = (arr - theta.mu) / theta.sigma
    xi = theta.xi
    if abs(xi) < XI_ZERO_TOL:
        out = np.exp(-np.exp(-z))
    else:
        u = 1.0 + xi * z
        inside = u > 0
        out = np.empty_like(z)
        with np.errstate(over="ignore"):
            out[inside] = np.exp(-np.exp(-np.log1p(xi * z[inside]) / xi))
        out[~inside] = 0.0 if xi > 0 else 1.0
    return float(out) if scalar else out


def gev_quantile(p, theta: GevParams):
    """Inverse of :func:`gev_cdf` for p in (0, 1).

    The non-Gumbel branch evaluates ((-log p)^(-xi) - 1)/xi through
    ``expm1`` so that accuracy is kept as xi -> 0.
    """
    arr, scalar = _as_float_array(p)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile needs probabilities strictly inside (0, 1)")
    loglog = np.log(-np.log(arr))
    xi = theta.xi
    if abs(xi) < XI_ZERO_TOL:
        out = theta.mu - theta.sigma * loglog
    else:
        out = theta.mu + theta.sigma * np.expm1(-xi * loglog) / xi
    return float(out) if scalar else out


def gevr_log_likelihood(block, theta: GevParams) -> float:
    """Joint log density of one block's r largest order statistics.

    Returns -inf for scale or support violations so optimizers can treat
    the support constraint as an implicit penalty.

    Parameters
    ----------
    block : array_like, shape (r,)
        The r largest values of one block, strictly decreasing.
    theta : GevParams
    """
    x = np.asarray(block, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DataError("block must be a 1-D vector of length r >= 1")
    if x.size > 1 and np.any(np.diff(x) >= 0):
        raise DataError("block must be strictly decreasing")
    if not theta.sigma > 0:
        return -np.inf
    z = (x - theta.mu) / theta.sigma
    r = x.size
    xi = theta.xi
    if abs(xi) < XI_ZERO_TOL:
        with np.errstate(over="ignore"):
            ll = -r * np.log(theta.sigma) - np.exp(-z[-1]) - z.sum()
        return float(ll)
    u = 1.0 + xi * z
    if np.any(u <= 0):
        return -np.inf
    logu = np.log1p(xi * z)
    with np.errstate(over="ignore"):
        tail = np.exp(-logu[-1] / xi)
    ll = -r * np.log(theta.sigma) - tail - (1.0 / xi + 1.0) * logu.sum()
    return float(ll)


def sample_gevr(n: int, r: int, theta: GevParams, rng) -> RLargestSample:
    """Draw n independent blocks of r largest order statistics.

    component 1 of a row is an unconditional GEV draw and component k+1 is
    GEV right-truncated at component k.  Implemented by applying the GEV
    quantile to running products of uniforms, which realizes exactly that
    sequential conditional law and yields strictly decreasing rows.
    """
    if n < 1 or r < 1:
        raise DomainError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    gen = as_generator(rng)
    u = gen.uniform(size=(n, r))
    running = np.cumprod(u, axis=1)
    values = gev_quantile(running, theta)
    return RLargestSample(values.reshape(n, r))


def kumgev_cdf(x, kum: KumGevParams):
    """KumGEV distribution function 1 - (1 - G(x)^a)^b with G the base GEV."""
    g = gev_cdf(x, kum.base)
    return 1.0 - (1.0 - np.power(g, kum.a)) ** kum.b


def kumgev_quantile(p, kum: KumGevParams):
    """Inverse KumGEV distribution function for p in (0, 1)."""
    arr, scalar = _as_float_array(p)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile needs probabilities strictly inside (0, 1)")
    inner = (1.0 - (1.0 - arr) ** (1.0 / kum.b)) ** (1.0 / kum.a)
    out = gev_quantile(inner, kum.base)
    return float(out) if scalar else out


def sample_truncated_kumgev(upper, kum: KumGevParams, rng, size=None):
    """Draw from KumGEV conditioned on X <= upper by inverse CDF.

    ``upper`` may be a scalar or an array; with an array and no explicit
    ``size`` one draw is produced per truncation point.
    """
    gen = as_generator(rng)
    upper_arr, scalar = _as_float_array(upper)
    f_up = np.asarray(kumgev_cdf(upper_arr, kum), dtype=float)
    if np.any(f_up <= 0.0):
        raise DegenerateTruncationError("truncation point carries zero probability mass")
    if size is None:
        size = upper_arr.shape if upper_arr.shape else None
    u = gen.uniform(size=size) * f_up
    out = kumgev_quantile(u, kum)
    return float(out) if (scalar and size is None) else out
