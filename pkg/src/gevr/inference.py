"""Likelihood inference for the joint r-largest order statistics model.

Provides the analytic score, observed and expected per-block information,
maximum-likelihood fitting on (mu, log sigma, xi), moment expectations of
standardized order statistics, return levels and profile-likelihood
intervals for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .distributions import (
    XI_ZERO_TOL,
    GevParams,
    RLargestSample,
    gev_quantile,
)
from .exceptions import (
    BracketExhaustedError,
    ConditioningError,
    DataError,
    DomainError,
    UnfittableDataError,
)

# Penalty returned to the optimizer outside the support region.
_PENALTY = 1e12

# |xi| below which the expected information is taken as the average of
# evaluations at +/-_XI_EXPECTED_EPS (removable singularity at xi = 0).
_XI_EXPECTED_EPS = 1e-3

# |xi| below which expected_moment_h averages evaluations at +/-1e-5.
_XI_MOMENT_EPS = 1e-5


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood fit of the r-largest model.

    ``info`` is the per-block information (total information / n) of the
    kind named by ``info_kind``; ``score_at_mle`` is the total score in the
    original (mu, sigma, xi) coordinates.
    """

    theta_hat: GevParams
    loglik: float
    score_at_mle: np.ndarray
    info: np.ndarray
    info_kind: str
    se: np.ndarray
    converged: bool
    n: int
    r: int


@dataclass(frozen=True)
class ReturnLevelEstimate:
    """A t-block return level with a profile-likelihood interval."""

    t: float
    estimate: float
    ci_low: float
    ci_high: float
    level: float


def _loglik_terms(values: np.ndarray, mu: float, sigma: float, xi: float):
    """Common pieces (z, u-inverse, log u, tail) for likelihood and score.

    Returns None when (mu, sigma, xi) violates the support for any block.
    """
    z = (values - mu) / sigma
    if abs(xi) < XI_ZERO_TOL:
        return z, None, None, None
    u = 1.0 + xi * z
    if u.min() <= 0.0:
        return None
    logu = np.log1p(xi * z)
    with np.errstate(over="ignore"):
        tail = np.exp(-logu[:, -1] / xi)
    return z, 1.0 / u, logu, tail


def total_log_likelihood(values: np.ndarray, theta: GevParams) -> float:
    """Sum of block log-likelihood contributions; -inf off support."""
    n, r = values.shape
    if not theta.sigma > 0:
        return -np.inf
    parts = _loglik_terms(values, theta.mu, theta.sigma, theta.xi)
    if parts is None:
        return -np.inf
    z, uinv, logu, tail = parts
    if uinv is None:
        with np.errstate(over="ignore"):
            ll = -n * r * math.log(theta.sigma) - np.exp(-z[:, -1]).sum() - z.sum()
        return float(ll)
    ll = (
        -n * r * math.log(theta.sigma)
        - tail.sum()
        - (1.0 / theta.xi + 1.0) * logu.sum()
    )
    return float(ll)


def _score_matrix(values: np.ndarray, theta: GevParams) -> np.ndarray:
    """Per-block score vectors, shape (n, 3); NaN-free only on support."""
    mu, sigma, xi = theta.mu, theta.sigma, theta.xi
    n, r = values.shape
    parts = _loglik_terms(values, mu, sigma, xi)
    if parts is None:
        raise DomainError("support violation: 1 + xi*z must stay positive")
    z, uinv, logu, tail = parts
    out = np.empty((n, 3))
    if uinv is None:
        # Gumbel-limit branch.
        zr = z[:, -1]
        with np.errstate(over="ignore"):
            e = np.exp(-zr)
        out[:, 0] = (r - e) / sigma
        out[:, 1] = (-r - zr * e + z.sum(axis=1)) / sigma
        out[:, 2] = -0.5 * zr**2 * e + (0.5 * z**2 - z).sum(axis=1)
        return out
    zr = z[:, -1]
    ur_inv = uinv[:, -1]
    logur = logu[:, -1]
    tail1 = tail * ur_inv  # u_r^(-1/xi - 1)
    zu = z * uinv
    out[:, 0] = (-tail1 + (1.0 + xi) * uinv.sum(axis=1)) / sigma
    out[:, 1] = (-r - zr * tail1 + (1.0 + xi) * zu.sum(axis=1)) / sigma
    out[:, 2] = (
        -tail * (logur / xi**2 - zr * ur_inv / xi)
        + logu.sum(axis=1) / xi**2
        - (1.0 / xi + 1.0) * zu.sum(axis=1)
    )
    return out


def block_score(block, theta: GevParams) -> np.ndarray:
    """Gradient of one block's log-likelihood with respect to (mu, sigma, xi).

    Uses the analytic limit expressions in the Gumbel regime.  Raises
    DomainError when the block leaves the support at ``theta``.
    """
    x = np.asarray(block, dtype=float)
    if x.ndim != 1:
        raise DataError("block must be a 1-D vector")
    if x.size > 1 and np.any(np.diff(x) >= 0):
        raise DataError("block must be strictly decreasing")
    if not theta.sigma > 0:
        raise DomainError("scale must be positive")
    return _score_matrix(x.reshape(1, -1), theta)[0]


def total_score(values: np.ndarray, theta: GevParams) -> np.ndarray:
    """Total score vector summed over blocks."""
    return _score_matrix(values, theta).sum(axis=0)


# ---------------------------------------------------------------------------
# Moment expectations of standardized order statistics


def _gamma_derivative(x, c: int):
    """c-th derivative of the gamma function via the complete Bell polynomial
    in the polygamma values: Gamma^(c) = Gamma * B_c(psi, psi', ...)."""
    x = np.asarray(x, dtype=float)
    if c == 0:
        return special.gamma(x)
    bell = [np.ones_like(x)]  # B_0
    for m in range(c):
        acc = np.zeros_like(x)
        for i in range(m + 1):
            acc += math.comb(m, i) * bell[m - i] * special.polygamma(i, x)
        bell.append(acc)
    return special.gamma(x) * bell[c]


def expected_moment_h(j: int, theta: GevParams, a: int, b: float, c: int) -> float:
    """E[Z_j^a (1+xi Z_j)^(-(1/xi + b)) log^c(1+xi Z_j)] for the j-th
    standardized order statistic Z_j.

    Evaluates the closed form built from derivatives of the gamma function;
    the value depends on theta only through xi.  At xi == 0 the removable
    singularity is handled by averaging evaluations at xi = +/-1e-5.

    Raises DomainError when a gamma argument hits a pole.
    """
    if j < 1 or int(j) != j:
        raise DomainError(f"j must be a positive integer, got {j}")
    if a < 0 or int(a) != a or c < 0 or int(c) != c:
        raise DomainError("a and c must be non-negative integers")
    xi = theta.xi
    if abs(xi) < _XI_MOMENT_EPS:
        lo = GevParams(theta.mu, theta.sigma, -_XI_MOMENT_EPS)
        hi = GevParams(theta.mu, theta.sigma, _XI_MOMENT_EPS)
        return 0.5 * (
            expected_moment_h(j, lo, a, b, c) + expected_moment_h(j, hi, a, b, c)
        )
    alphas = np.arange(a + 1)
    args = j + b * xi - alphas * xi + 1.0
    near_pole = (args < 0.5) & (np.abs(args - np.round(args)) < 1e-9)
    if np.any(near_pole):
        raise DomainError(
            f"gamma-derivative argument at a pole: {args[near_pole].tolist()}"
        )
    signs = (-1.0) ** alphas
    coefs = np.array([math.comb(a, int(al)) for al in alphas])
    total = float((signs * coefs * _gamma_derivative(args, c)).sum())
    return (-xi) ** (c - a) / special.gamma(j) * total


def _expected_information_raw(r: int, sigma: float, xi: float) -> np.ndarray:
    """Expected per-block information at shape xi != 0 (assembled from
    expected_moment_h; independent of mu, scales with sigma)."""
    th = GevParams(0.0, 1.0, xi)

    def h(j, a, b, c):
        return expected_moment_h(j, th, a, b, c)

    js = range(1, r + 1)
    binv = 1.0 / xi  # appears as b = k - 1/xi for plain powers of u
    s_u2 = sum(h(j, 0, 2 - binv, 0) for j in js)  # E[u^-2]
    s_u1 = sum(h(j, 0, 1 - binv, 0) for j in js)  # E[u^-1]
    s_zu2 = sum(h(j, 1, 2 - binv, 0) for j in js)  # E[z u^-2]
    s_zu1 = sum(h(j, 1, 1 - binv, 0) for j in js)  # E[z u^-1]
    s_z2u2 = sum(h(j, 2, 2 - binv, 0) for j in js)  # E[z^2 u^-2]
    s_logu = sum(h(j, 0, -binv, 1) for j in js)  # E[log u]

    i_mm = (1.0 + xi) / sigma**2 * (h(r, 0, 2, 0) - xi * s_u2)
    i_ms = (
        -h(r, 0, 1, 0) + (1 + xi) * s_u1 + (1 + xi) * h(r, 1, 2, 0) - xi * (1 + xi) * s_zu2
    ) / sigma**2
    i_ss = (
        -r
        - 2 * h(r, 1, 1, 0)
        + 2 * (1 + xi) * s_zu1
        + (1 + xi) * h(r, 2, 2, 0)
        - xi * (1 + xi) * s_z2u2
    ) / sigma**2
    i_mx = (
        h(r, 0, 1, 1) / xi**2
        - (1 / xi + 1) * h(r, 1, 2, 0)
        - s_u1
        + (1 + xi) * s_zu2
    ) / sigma
    i_sx = (
        h(r, 1, 1, 1) / xi**2
        - (1 / xi + 1) * h(r, 2, 2, 0)
        - s_zu1
        + (1 + xi) * s_z2u2
    ) / sigma
    i_xx = (
        h(r, 0, 0, 2) / xi**4
        - 2 * (h(r, 1, 1, 1) + h(r, 0, 0, 1)) / xi**3
        + (1 / xi**2 + 1 / xi) * h(r, 2, 2, 0)
        + 2 * h(r, 1, 1, 0) / xi**2
        + 2 * s_logu / xi**3
        - 2 * s_zu1 / xi**2
        - (1 / xi + 1) * s_z2u2
    )
    return np.array([[i_mm, i_ms, i_mx], [i_ms, i_ss, i_sx], [i_mx, i_sx, i_xx]])


def expected_information(r: int, theta: GevParams) -> np.ndarray:
    """Expected per-block information matrix; needs xi > -0.5."""
    if not theta.xi > -0.5:
        raise DomainError("expected information requires xi > -0.5")
    xi = theta.xi
    if abs(xi) < _XI_EXPECTED_EPS:
        return 0.5 * (
            _expected_information_raw(r, theta.sigma, -_XI_EXPECTED_EPS)
            + _expected_information_raw(r, theta.sigma, _XI_EXPECTED_EPS)
        )
    return _expected_information_raw(r, theta.sigma, xi)


def information(sample: RLargestSample, theta: GevParams, kind: str = "observed") -> np.ndarray:
    """Per-block Fisher information matrix.

    ``observed`` differentiates the analytic score centrally and averages
    over blocks; ``expected`` assembles the closed form, which depends on
    the data only through n and r.  Raises ConditioningError (carrying the
    eigenvalues) if the result is not positive definite.
    """
    if kind == "expected":
        info = expected_information(sample.r, theta)
    elif kind == "observed":
        values = sample.values
        th = theta.as_array()
        hess = np.empty((3, 3))
        for k in range(3):
            step = 6e-6 * max(1.0, abs(th[k]))
            if k == 1:
                step = min(step, 0.25 * th[1])
            for _ in range(6):
                tp, tm = th.copy(), th.copy()
                tp[k] += step
                tm[k] -= step
                try:
                    sp = total_score(values, GevParams.from_array(tp))
                    sm = total_score(values, GevParams.from_array(tm))
                except DomainError:
                    step /= 8.0
                    continue
                hess[:, k] = (sp - sm) / (2.0 * step)
                break
            else:
                raise DomainError("cannot difference the score near the support edge")
        hess = 0.5 * (hess + hess.T)
        info = -hess / sample.n
    else:
        raise DomainError(f"unknown information kind: {kind!r}")
    if not np.all(np.isfinite(info)):
        raise ConditioningError("information matrix has non-finite entries")
    eig = np.linalg.eigvalsh(info)
    if eig.min() <= 0:
        raise ConditioningError(
            "information matrix is not positive definite", eigenvalues=eig
        )
    return info


# ---------------------------------------------------------------------------
# Maximum likelihood


def _objective(p: np.ndarray, values: np.ndarray):
    """Total negative log-likelihood and gradient in (mu, log sigma, xi)."""
    mu, logsig, xi = p
    sigma = math.exp(logsig)
    theta = GevParams(mu, sigma, xi)
    ll = total_log_likelihood(values, theta)
    if not np.isfinite(ll):
        return _PENALTY, np.zeros(3)
    s = total_score(values, theta)
    grad = np.array([-s[0], -sigma * s[1], -s[2]])
    return -ll, grad


def _moment_starts(values: np.ndarray) -> list[np.ndarray]:
    """Initial points from Gumbel moment/median matching on block maxima."""
    top = values[:, 0]
    sd = top.std(ddof=1)
    if not sd > 0:
        sd = max(1e-3, abs(top[0]) * 1e-3)
    sigma0 = sd * math.sqrt(6.0) / math.pi
    mu_mean = top.mean() - 0.5772156649015329 * sigma0
    mu_med = float(np.median(top)) + sigma0 * math.log(math.log(2.0))
    starts = [np.array([mu_mean, sigma0, x]) for x in (0.1, 0.0, -0.1)]
    starts.append(np.array([mu_med, sigma0, 0.0]))
    starts.append(np.array([mu_mean, 2.0 * sigma0, 0.0]))
    return starts


def fit_gevr(
    sample: RLargestSample,
    start: GevParams | None = None,
    info_kind: str = "observed",
) -> FitResult:
    """Maximize the joint r-largest log-likelihood over (mu, sigma, xi).

    The scale is optimized on the log axis and support violations act as a
    penalty.  Starting points are tried in turn (a provided ``start``
    first, then moment- and median-based initials over a small shape grid)
    with a derivative-free simplex fallback; a fit that stalls is returned
    with ``converged=False`` rather than raising.

    Raises UnfittableDataError when no starting point has positive
    likelihood, and DomainError for fewer than 5 blocks.
    """
    values = sample.values
    n, r = values.shape
    if n < 5:
        raise DomainError(f"need at least 5 blocks to fit 3 parameters, got n={n}")

    score_tol = 1e-4 * n
    best = None  # (nll, x, theta, score)
    any_valid = False

    def candidates():
        if start is not None:
            yield start.as_array()
        yield from _moment_starts(values)

    def run_lbfgsb(x0):
        x, fval, _ = optimize.fmin_l_bfgs_b(
            _objective,
            x0,
            args=(values,),
            maxiter=200,
            factr=10.0,
            pgtol=1e-7,
        )
        return x, fval

    def assess(x, fval):
        """Candidate tuple (fval, x, theta, score) or None if off support."""
        if fval >= _PENALTY:
            return None
        theta = GevParams(x[0], math.exp(x[1]), x[2])
        try:
            s = total_score(values, theta)
        except DomainError:
            return None
        return (fval, x, theta, s)

    solution = None
    for c in candidates():
        if not np.isfinite(total_log_likelihood(values, GevParams.from_array(c))):
            continue
        any_valid = True
        x0 = np.array([c[0], math.log(c[1]), c[2]])
        cand = assess(*run_lbfgsb(x0))
        if cand is None:
            continue
        if np.linalg.norm(cand[3]) <= score_tol:
            solution = cand
            break
        if best is None or cand[0] < best[0]:
            best = cand

    if not any_valid:
        raise UnfittableDataError("all starting points violate the support")

    if solution is None and best is not None:
        # Simplex fallback from the least-bad quasi-Newton endpoint, then polish.
        res = optimize.minimize(
            lambda p: _objective(p, values)[0],
            best[1],
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 2000},
        )
        cand = assess(*run_lbfgsb(res.x))
        if cand is not None:
            if np.linalg.norm(cand[3]) <= score_tol:
                solution = cand
            elif cand[0] < best[0]:
                best = cand

    converged = solution is not None
    if solution is None and best is None:
        raise UnfittableDataError("optimizer left the support from every start")
    fval, _, theta, s = solution if converged else best
    loglik = -float(fval)

    info = np.full((3, 3), np.nan)
    se = np.full(3, np.nan)
    if converged:
        try:
            info = information(sample, theta, kind=info_kind)
            se = np.sqrt(np.diag(np.linalg.inv(n * info)))
        except (ConditioningError, np.linalg.LinAlgError):
            if theta.xi > -0.5:
                converged = False

    return FitResult(
        theta_hat=theta,
        loglik=loglik,
        score_at_mle=s,
        info=info,
        info_kind=info_kind,
        se=se,
        converged=converged,
        n=n,
        r=r,
    )


# ---------------------------------------------------------------------------
# Auxiliary estimators for block maxima (r = 1)


def pwm_gev(maxima) -> GevParams:
    """Probability-weighted-moments estimator of the GEV from block maxima.

    Root-solves the shape from the b0/b1/b2 moment ratios; inefficient but
    cheap, used as an optimizer start and as the spacings-fit initial.
    """
    x = np.sort(np.asarray(maxima, dtype=float))
    n = x.size
    if n < 3:
        raise DomainError("need at least 3 maxima for probability-weighted moments")
    j = np.arange(1, n + 1)
    b0 = x.mean()
    b1 = np.sum((j - 1) / (n - 1) * x) / n
    b2 = np.sum((j - 1) * (j - 2) / ((n - 1) * (n - 2)) * x) / n
    ratio = (3 * b2 - b0) / (2 * b1 - b0)

    def eqn(sh):
        if abs(sh) < 1e-9:
            return math.log(3.0) / math.log(2.0) - ratio
        return (3.0**sh - 1.0) / (2.0**sh - 1.0) - ratio

    lo, hi = -4.9, 4.9
    if eqn(lo) * eqn(hi) > 0:
        shape0 = 0.0
    else:
        shape0 = float(optimize.brentq(eqn, lo, hi, xtol=1e-10))
    if abs(shape0) < 1e-9:
        scale0 = (2 * b1 - b0) / math.log(2.0)
        loc0 = b0 - 0.5772156649015329 * scale0
    else:
        g = special.gamma(1.0 - shape0)
        scale0 = (2 * b1 - b0) * shape0 / (g * (2.0**shape0 - 1.0))
        loc0 = b0 + scale0 * (1.0 - g) / shape0
    if not scale0 > 0:
        raise UnfittableDataError("probability-weighted moments gave a non-positive scale")
    return GevParams(loc0, scale0, shape0)


def mps_gev(maxima, start: GevParams | None = None) -> GevParams:
    """Maximum-product-of-spacings estimator of the GEV from block maxima.

    Maximizes the summed log spacings of the fitted distribution function
    over the ordered sample (endpoints 0 and 1 included; zero spacings from
    ties are floored at machine epsilon).  Consistent under the GEV but not
    the efficient estimator.
    """
    x = np.sort(np.asarray(maxima, dtype=float))
    n = x.size
    if n < 5:
        raise DomainError(f"need at least 5 maxima, got {n}")
    if start is None:
        start = pwm_gev(x)
    tiny = np.finfo(float).eps

    def neg_spacings(p):
        mu, logsig, xi = p
        sigma = math.exp(logsig)
        z = (x - mu) / sigma
        if abs(xi) < XI_ZERO_TOL:
            cdf = np.exp(-np.exp(-z))
        else:
            zz = np.maximum(xi * z, -1.0)
            with np.errstate(over="ignore", divide="ignore"):
                cdf = np.exp(-np.exp(-np.log1p(zz) / xi))
        spacings = np.diff(np.concatenate(([0.0], cdf, [1.0])))
        if np.any(spacings < 0):
            return _PENALTY
        spacings = np.maximum(spacings, tiny)
        return -np.log(spacings).sum()

    x0 = np.array([start.mu, math.log(start.sigma), start.xi])
    res = optimize.minimize(
        neg_spacings,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 2000},
    )
    if not np.isfinite(res.fun) or res.fun >= _PENALTY:
        raise UnfittableDataError("spacings objective never became finite")
    return GevParams(res.x[0], math.exp(res.x[1]), res.x[2])


# ---------------------------------------------------------------------------
# Return levels


def return_level(theta: GevParams, t: float) -> float:
    """Level exceeded on average once every t blocks: the 1 - 1/t quantile."""
    if not t > 1:
        raise DomainError(f"return period must exceed 1 block, got t={t}")
    return float(gev_quantile(1.0 - 1.0 / t, theta))


def _qfactor(xi: float, logy: float) -> float:
    """(y^-xi - 1)/xi evaluated stably, with its xi -> 0 limit -log y."""
    if abs(xi) < XI_ZERO_TOL:
        return -logy
    return math.expm1(-xi * logy) / xi


def _dqfactor(xi: float, logy: float) -> float:
    """Derivative of _qfactor with respect to xi."""
    if abs(xi) < 1e-5:
        return 0.5 * logy**2 - xi * logy**3 / 3.0
    e = math.expm1(-xi * logy)
    return (-logy * (e + 1.0)) / xi - e / xi**2


def _profile_loglik(z: float, values: np.ndarray, logy: float, nuisance0: np.ndarray):
    """Maximum log-likelihood over (sigma, xi) with the return level fixed."""

    def obj(q):
        logsig, xi = q
        sigma = math.exp(logsig)
        mu = z - sigma * _qfactor(xi, logy)
        theta = GevParams(mu, sigma, xi)
        ll = total_log_likelihood(values, theta)
        if not np.isfinite(ll):
            return _PENALTY, np.zeros(2)
        s = total_score(values, theta)
        g_logsig = -(sigma * s[1] - sigma * _qfactor(xi, logy) * s[0])
        g_xi = -(s[2] - sigma * _dqfactor(xi, logy) * s[0])
        return -ll, np.array([g_logsig, g_xi])

    res = optimize.minimize(
        obj,
        nuisance0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 200, "ftol": 1e-13, "gtol": 1e-7},
    )
    return -float(res.fun), res.x


def profile_ci_return_level(
    sample: RLargestSample,
    t: float,
    level: float = 0.95,
    fit: FitResult | None = None,
) -> ReturnLevelEstimate:
    """Profile-likelihood interval for the t-block return level.

    Brackets each endpoint by geometric expansion starting at 8 plug-in
    standard errors from the estimate, then refines by root finding on the
    likelihood-ratio boundary.  Raises BracketExhaustedError (carrying the
    bracket) when the profile never drops below the cutoff.
    """
    if not 0 < level < 1:
        raise DomainError("confidence level must be inside (0, 1)")
    if fit is None:
        fit = fit_gevr(sample)
    if not fit.converged:
        raise UnfittableDataError("profile interval needs a converged fit")
    theta = fit.theta_hat
    values = sample.values
    z_hat = return_level(theta, t)
    logy = math.log(-math.log1p(-1.0 / t))

    # Delta-method scale for the initial bracket; crude fallback if the
    # information was unusable.
    se_z = np.nan
    if np.all(np.isfinite(fit.se)):
        eps = 1e-6
        grad = np.empty(3)
        base = theta.as_array()
        for k in range(3):
            hp, hm = base.copy(), base.copy()
            step = eps * max(1.0, abs(base[k]))
            hp[k] += step
            hm[k] -= step
            if hm[1] <= 0:
                hm[1] = base[1] / 2
            grad[k] = (
                return_level(GevParams.from_array(hp), t)
                - return_level(GevParams.from_array(hm), t)
            ) / (hp[k] - hm[k])
        cov = np.linalg.inv(fit.n * fit.info)
        se_z = float(np.sqrt(grad @ cov @ grad))
    if not np.isfinite(se_z) or se_z <= 0:
        se_z = 0.1 * abs(z_hat) + theta.sigma

    cutoff = fit.loglik - 0.5 * stats.chi2.ppf(level, df=1)
    nuisance0 = np.array([math.log(theta.sigma), theta.xi])

    def excess(z):
        ll, _ = _profile_loglik(z, values, logy, nuisance0)
        return ll - cutoff

    ends = []
    for sign in (-1.0, 1.0):
        dist = 8.0 * se_z
        lo_z = z_hat
        hit = None
        for _ in range(14):
            cand = z_hat + sign * dist
            if excess(cand) < 0:
                hit = cand
                break
            lo_z = cand
            dist *= 2.0
        if hit is None:
            raise BracketExhaustedError(
                "profile likelihood never crossed the confidence cutoff",
                bracket=(z_hat - dist if sign < 0 else lo_z, lo_z if sign < 0 else z_hat + dist),
            )
        a, b = (hit, lo_z) if sign < 0 else (lo_z, hit)
        ends.append(float(optimize.brentq(excess, a, b, xtol=1e-8 * max(1.0, abs(z_hat)))))

    ci_low, ci_high = ends[0], ends[1]
    return ReturnLevelEstimate(
        t=float(t), estimate=z_hat, ci_low=ci_low, ci_high=ci_high, level=level
    )
