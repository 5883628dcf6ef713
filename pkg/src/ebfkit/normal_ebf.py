"""Empirical Bayes factors for normal-theory tests with known variance.

Under a flat prior the posterior for the mean is N(x, sigma^2), and the
posterior marginal likelihood of a region H is

    M_H = phi(x; x, 2 sigma^2) * P_H[N(x, sigma^2/2)] / P_H[N(x, sigma^2)].

Re-using the data as its own prior overstates the evidence; the expected
overstatement in log scale is 1/2 per unrestricted mean component, 1/4 per
half-line component, and 0 for point or bounded-interval hypotheses.  All
factors below are ratios of such bias-corrected marginals, so the scale
sigma cancels and only the standardized statistic matters.
"""

from __future__ import annotations

import math

from ebfkit.core import BiasValue, EvidenceReport, HypothesisRegion, LogMarginal, make_report
from ebfkit.exceptions import DegenerateRegionError, DomainError
from ebfkit.numerics import normal_log_cdf, normal_log_pdf

__all__ = [
    "FAMILY",
    "bias_normal",
    "region_bias",
    "normal_posterior_marginal",
    "ebf_two_sided",
    "ebf_one_sided",
    "ebf_directional",
    "ebf_interval",
    "ebf_chi_squared",
    "deviance_criterion",
]

FAMILY = "normal"

LOG2 = math.log(2.0)
_FAVOURS_NULL_THRESHOLD = 1.0 + LOG2  # z^2 below this favours the point null


def bias_normal(d1: int, d2: int) -> BiasValue:
    """Expected bias (d1 + 2*d2)/4 for d1 one-sided and d2 two-sided mean
    components."""
    if d1 < 0 or d2 < 0 or d1 + d2 < 1:
        raise DomainError("bias_normal needs d1, d2 >= 0 with d1 + d2 >= 1")
    return BiasValue.closed_form((d1 + 2.0 * d2) / 4.0)


def region_bias(region: HypothesisRegion) -> BiasValue:
    """Bias contribution of one region of the mean line."""
    if region.kind in ("point", "interval"):
        return BiasValue.zero()
    if region.kind in ("below", "above"):
        return BiasValue.closed_form(0.25)
    return BiasValue.closed_form(0.5)


def _log_mass(alpha: float, beta: float) -> float:
    """log of Phi(beta) - Phi(alpha) for standardized bounds alpha < beta."""
    if alpha == -math.inf and beta == math.inf:
        return 0.0
    # work on the side where both bounds sit in the lower tail
    if alpha + beta > 0:
        alpha, beta = -beta, -alpha
    la = normal_log_cdf(alpha) if alpha > -math.inf else -math.inf
    lb = normal_log_cdf(beta)
    if lb == -math.inf:
        raise DegenerateRegionError("region mass underflows to zero")
    if la == -math.inf:
        return lb
    diff = la - lb
    if diff >= 0.0:
        raise DegenerateRegionError("region mass underflows to zero")
    return lb + math.log1p(-math.exp(diff))


def normal_posterior_marginal(x: float, sigma: float,
                              region: HypothesisRegion) -> LogMarginal:
    """Uncorrected log posterior marginal likelihood of a mean region."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if region.is_point():
        return LogMarginal(normal_log_pdf(x, region.a, sigma * sigma), FAMILY)
    a, b = region.bounds()
    scale_half = sigma / math.sqrt(2.0)
    log_num_mass = _log_mass((a - x) / scale_half if a > -math.inf else -math.inf,
                             (b - x) / scale_half if b < math.inf else math.inf)
    log_den_mass = _log_mass((a - x) / sigma if a > -math.inf else -math.inf,
                             (b - x) / sigma if b < math.inf else math.inf)
    log_value = (normal_log_pdf(x, x, 2.0 * sigma * sigma)
                 + log_num_mass - log_den_mass)
    return LogMarginal(log_value, FAMILY)


def ebf_interval(x: float, sigma: float, h0: HypothesisRegion,
                 h1: HypothesisRegion) -> EvidenceReport:
    """General region-vs-region factor on the mean scale."""
    m0 = normal_posterior_marginal(x, sigma, h0).correct(region_bias(h0))
    m1 = normal_posterior_marginal(x, sigma, h1).correct(region_bias(h1))
    return make_report(m0, m1, h0, h1, region_bias(h0), region_bias(h1))


def ebf_two_sided(z: float) -> EvidenceReport:
    """Point null mu = 0 against the unrestricted alternative.

    Equals sqrt(2) * exp(-(z^2 - 1)/2); favours the null exactly when
    z^2 < 1 + log 2.
    """
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    log_ebf01 = 0.5 * LOG2 - 0.5 * (z * z - 1.0)
    return EvidenceReport(log_ebf01, FAMILY,
                          HypothesisRegion.point(0.0), HypothesisRegion.full(),
                          BiasValue.zero(), BiasValue.closed_form(0.5))


def ebf_one_sided(z: float, negative_possible: bool = True) -> EvidenceReport:
    """Point null mu = 0 against the one-sided alternative mu > 0.

    When negative means are possible a priori the alternative carries half
    the unrestricted bias; when they are impossible it carries the full
    bias, which weakens the alternative by exp(1/4).
    """
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    bias1 = 0.25 if negative_possible else 0.5
    log_phi_ratio = normal_log_cdf(z) - normal_log_cdf(z * math.sqrt(2.0))
    log_ebf01 = log_phi_ratio + 0.5 * LOG2 - 0.5 * (z * z) + bias1
    return EvidenceReport(log_ebf01, FAMILY,
                          HypothesisRegion.point(0.0), HypothesisRegion.above(0.0),
                          BiasValue.zero(), BiasValue.closed_form(bias1))


def ebf_directional(z: float) -> EvidenceReport:
    """mu < 0 against mu > 0; the two half-line biases cancel.

    Large tail ratios are evaluated through log CDFs, so the factor stays
    finite far beyond |z| = 8.
    """
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    s2 = math.sqrt(2.0)
    log_ebf01 = (normal_log_cdf(-z * s2) - normal_log_cdf(z * s2)
                 + normal_log_cdf(z) - normal_log_cdf(-z))
    quarter = BiasValue.closed_form(0.25)
    return EvidenceReport(log_ebf01, FAMILY,
                          HypothesisRegion.below(0.0), HypothesisRegion.above(0.0),
                          quarter, quarter)


def ebf_chi_squared(z2: float, d: int) -> EvidenceReport:
    """d-dimensional point null via the squared standardized statistic.

    EBF01 = 2^{d/2} exp(-(z^2 - d)/2), the chi-square analogue of the
    two-sided test; z2 is x' Sigma^{-1} x.
    """
    if z2 < 0:
        raise DomainError("z2 must be nonnegative")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    log_ebf01 = 0.5 * d * LOG2 - 0.5 * (z2 - d)
    return EvidenceReport(log_ebf01, FAMILY,
                          HypothesisRegion.point(0.0), HypothesisRegion.full(),
                          BiasValue.zero(), BiasValue.closed_form(d / 2.0))


def deviance_criterion(max_log_likelihood: float, d: int) -> float:
    """-2 * max log likelihood penalised by d * (1 + log 2).

    The deviance-scale view of the corrected marginal likelihood for a
    regular d-parameter normal model; differences of this criterion sit on
    the Bayes-factor scale.
    """
    if d < 1:
        raise DomainError("parameter count must be >= 1")
    return -2.0 * max_log_likelihood + d * (1.0 + LOG2)


def favours_null_probability() -> float:
    """P(the two-sided factor favours a true point null) = P(chi2_1 < 1 + log 2)."""
    from ebfkit.numerics import chi2_cdf
    return chi2_cdf(_FAVOURS_NULL_THRESHOLD, 1)
