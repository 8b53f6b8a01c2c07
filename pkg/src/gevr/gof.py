"""Goodness-of-fit tests for the joint r-largest model at a fixed r.

Two tests of the hypothesis that the top-r data follow the r-largest
model: a score statistic calibrated by parametric or multiplier
bootstrap, and an entropy-difference statistic with an asymptotic
standard-normal null.

The score statistic is a quadratic form of the full-model score in the
inverse information.  Evaluated at the same sample's own maximum
likelihood estimate the score vanishes, so the tests anchor the score at
an estimate that is consistent under the maintained hypothesis but does
not solve the full-model score equation: the MLE from the top r-1
columns when r >= 2, and the maximum-product-of-spacings estimate for
r = 1.  Both bootstrap procedures calibrate that same statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .distributions import XI_ZERO_TOL, GevParams, RLargestSample, sample_gevr
from .exceptions import (
    ConditioningError,
    DegenerateStatisticError,
    DomainError,
    ReliabilityError,
    UnfittableDataError,
    UnsupportedOrderError,
)
from .inference import (
    FitResult,
    fit_gevr,
    information,
    mps_gev,
    total_score,
)
from .rng import as_generator, child_streams, seed_of


@dataclass(frozen=True)
class TestResult:
    """Outcome of one goodness-of-fit test at a fixed r."""

    r: int
    method: str
    statistic: float
    p_value: float
    L: int
    seed: int | None
    fit: FitResult
    theta_anchor: GevParams | None = None
    failed_replicates: int = 0


def score_statistic(sample: RLargestSample, fit, info_kind: str = "expected") -> float:
    """Quadratic form (1/n) S(theta)' I(theta)^-1 S(theta) on this sample.

    ``fit`` may be a FitResult or a bare GevParams.  At the sample's own
    MLE the statistic is numerically zero; the bootstrap tests evaluate
    it at the reduced-model anchor instead.
    """
    theta = fit.theta_hat if isinstance(fit, FitResult) else fit
    s = total_score(sample.values, theta)
    info = information(sample, theta, kind=info_kind)
    v = float(s @ np.linalg.solve(info, s)) / sample.n
    return v


def null_anchor(sample: RLargestSample, start: GevParams | None = None) -> GevParams:
    """Score evaluation point consistent under the maintained hypothesis.

    MLE of the top r-1 order statistics for r >= 2; the spacings
    estimator from the block maxima for r = 1.
    """
    if sample.r >= 2:
        fit = fit_gevr(sample.top(sample.r - 1), start=start)
        if not fit.converged:
            raise UnfittableDataError("reduced-model fit did not converge")
        return fit.theta_hat
    return mps_gev(sample.values[:, 0], start=start)


def _pvalue(exceed: int, total: int, rule: str) -> float:
    if total < 1:
        raise ReliabilityError("no usable bootstrap replicates")
    if rule == "plain":
        return exceed / total
    if rule == "add-one":
        return (exceed + 1) / (total + 1)
    raise DomainError(f"unknown p-value rule: {rule!r}")


def pb_score_test(
    sample: RLargestSample,
    L: int,
    rng,
    info_kind: str = "expected",
    pvalue_rule: str = "plain",
) -> TestResult:
    """Parametric-bootstrap calibration of the score statistic.

    Replicates are drawn from the fitted model; each refits the anchor
    and recomputes the statistic.  Replicates whose refit fails are
    dropped and counted; more than 10 percent failures raises
    ReliabilityError carrying the rate.
    """
    if L < 1:
        raise DomainError("need at least one bootstrap replicate")
    full = fit_gevr(sample)
    if not full.converged:
        raise UnfittableDataError("full-model fit did not converge")
    anchor = null_anchor(sample)
    v_obs = score_statistic(sample, anchor, info_kind)

    streams = child_streams(rng, L)
    exceed = 0
    used = 0
    failed = 0
    for stream in streams:
        rep = sample_gevr(sample.n, sample.r, full.theta_hat, stream)
        try:
            anchor_k = null_anchor(rep, start=anchor)
            v_k = score_statistic(rep, anchor_k, info_kind)
        except (UnfittableDataError, ConditioningError, DomainError):
            failed += 1
            continue
        used += 1
        if v_k > v_obs:
            exceed += 1
    if failed > 0.1 * L:
        raise ReliabilityError(
            f"{failed} of {L} bootstrap refits failed", failure_rate=failed / L
        )
    return TestResult(
        r=sample.r,
        method="pb-score",
        statistic=v_obs,
        p_value=_pvalue(exceed, used, pvalue_rule),
        L=L,
        seed=seed_of(rng),
        fit=full,
        theta_anchor=anchor,
        failed_replicates=failed,
    )


def mb_score_test(
    sample: RLargestSample,
    L: int,
    rng,
    info_kind: str = "expected",
    pvalue_rule: str = "plain",
) -> TestResult:
    """Multiplier (weighted-bootstrap) calibration of the score statistic.

    Per-block score contributions are whitened by the symmetric inverse
    square root of the information and re-weighted by centered standard
    normal multipliers; no refitting is needed, so this runs orders of
    magnitude faster than the parametric bootstrap.
    """
    if L < 1:
        raise DomainError("need at least one bootstrap replicate")
    full = fit_gevr(sample)
    if not full.converged:
        raise UnfittableDataError("full-model fit did not converge")
    anchor = null_anchor(sample)

    from .inference import _score_matrix  # per-block scores at the anchor

    smat = _score_matrix(sample.values, anchor)
    info = information(sample, anchor, kind=info_kind)
    eigval, eigvec = np.linalg.eigh(info)
    if eigval.min() <= 0:
        raise ConditioningError(
            "information not positive definite", eigenvalues=eigval
        )
    inv_sqrt = (eigvec / np.sqrt(eigval)) @ eigvec.T
    phi = smat @ inv_sqrt  # rows are I^(-1/2) S_i
    v_obs = float(np.sum(phi.sum(axis=0) ** 2)) / sample.n

    gen = as_generator(rng)
    z = gen.standard_normal((L, sample.n))
    z -= z.mean(axis=1, keepdims=True)
    w = z @ phi / math.sqrt(sample.n)
    v_rep = np.einsum("ij,ij->i", w, w)
    exceed = int(np.sum(v_rep > v_obs))
    return TestResult(
        r=sample.r,
        method="mb-score",
        statistic=v_obs,
        p_value=_pvalue(exceed, L, pvalue_rule),
        L=L,
        seed=seed_of(rng),
        fit=full,
        theta_anchor=anchor,
    )


def entropy_increments(sample: RLargestSample, theta: GevParams) -> np.ndarray:
    """Per-block log-likelihood gain of the r-model over the (r-1)-model.

    Closed form of the increment; equals the difference of the two block
    log-likelihoods identically.
    """
    if sample.r < 2:
        raise UnsupportedOrderError("increments need r >= 2")
    values = sample.values
    z = (values - theta.mu) / theta.sigma
    zr = z[:, -1]
    zprev = z[:, -2]
    xi = theta.xi
    logsig = math.log(theta.sigma)
    if abs(xi) < XI_ZERO_TOL:
        with np.errstate(over="ignore"):
            return -logsig - np.exp(-zr) + np.exp(-zprev) - zr
    u = 1.0 + xi * np.column_stack([zprev, zr])
    if u.min() <= 0:
        raise DomainError("support violation: 1 + xi*z must stay positive")
    logu = np.log1p(xi * np.column_stack([zprev, zr]))
    with np.errstate(over="ignore"):
        tail_prev = np.exp(-logu[:, 0] / xi)
        tail_r = np.exp(-logu[:, 1] / xi)
    return -logsig - tail_r + tail_prev - (1.0 / xi + 1.0) * logu[:, 1]


def null_increment_mean(r: int, theta: GevParams) -> float:
    """Expected per-block increment under the r-model:
    -log(sigma) - 1 + (1 + xi) * digamma(r)."""
    return -math.log(theta.sigma) - 1.0 + (1.0 + theta.xi) * float(special.digamma(r))


def ed_statistic(sample: RLargestSample, fit: FitResult) -> float:
    """Standardized mean entropy difference, asymptotically N(0,1) under
    the null; needs r >= 2 and a converged fit at this r."""
    if sample.r < 2:
        raise UnsupportedOrderError("the entropy-difference statistic needs r >= 2")
    theta = fit.theta_hat if isinstance(fit, FitResult) else fit
    y = entropy_increments(sample, theta)
    s2 = float(y.var(ddof=1))
    if not s2 > 0:
        raise DegenerateStatisticError("zero sample variance of the increments")
    eta = null_increment_mean(sample.r, theta)
    return float(math.sqrt(sample.n) * (y.mean() - eta) / math.sqrt(s2))


def ed_test(sample: RLargestSample, fit: FitResult | None = None) -> TestResult:
    """Two-sided entropy-difference test of the r-model (r >= 2).

    r = 1 is rejected here by construction; test it with the score tests.
    """
    if sample.r < 2:
        raise UnsupportedOrderError(
            "the entropy-difference test is undefined at r = 1; "
            "use pb_score_test or mb_score_test there"
        )
    if fit is None:
        fit = fit_gevr(sample)
    if not fit.converged:
        raise UnfittableDataError("fit did not converge")
    t = ed_statistic(sample, fit)
    p = 2.0 * (1.0 - stats.norm.cdf(abs(t)))
    return TestResult(
        r=sample.r,
        method="ed",
        statistic=t,
        p_value=float(p),
        L=0,
        seed=None,
        fit=fit,
    )
