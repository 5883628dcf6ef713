"""Empirical Bayes factors for common hypothesis tests.

Evidence for a hypothesis region is the posterior marginal likelihood of the
data with the posterior re-used as the prior, corrected for the expected
overstatement that double use of the data introduces.  Ratios of corrected
marginals sit on the ordinary Bayes-factor scale and can favour either
hypothesis.  Engines cover normal, t, binomial / negative-binomial, F, and
P-value-based tests, a multiple-testing mixture extension, the 2+sqrt(3)
evidence-unit scale, and a seeded simulation harness.
"""

from ebfkit.core import (
    EVIDENCE_BASE,
    BiasValue,
    EvidenceReport,
    HypothesisRegion,
    LogMarginal,
    make_report,
)
from ebfkit.normal_ebf import (
    bias_normal,
    deviance_criterion,
    ebf_chi_squared,
    ebf_directional,
    ebf_interval,
    ebf_one_sided,
    ebf_two_sided,
    normal_posterior_marginal,
)
from ebfkit.t_ebf import ebf_t, t_expected_bias, t_posterior_marginal
from ebfkit.count_ebf import (
    CountData,
    binom_expected_bias,
    binom_posterior_marginal,
    ebf_binom,
    ebf_count,
    ebf_negbinom,
    model_average,
    negbinom_expected_bias,
    negbinom_posterior_marginal,
)
from ebfkit.f_ebf import ebf_anova, ebf_f, f_expected_bias, f_posterior_marginal
from ebfkit.pvalue_ebf import (
    ebf_pvalue,
    posterior_prob_h0,
    pvalue_expected_bias,
    pvalue_posterior_marginal,
)
from ebfkit.multitest import MultiTestBatch, cross_marginal, multi_ebf, ranked_summary
from ebfkit.calibration import (
    brc,
    calibration_curve,
    calibration_table,
    held_ott_bound,
    p_for_units,
    sellke_bound,
    unit_information_bf,
    units_of_evidence,
)

__version__ = "0.1.0"

__all__ = [
    "EVIDENCE_BASE", "BiasValue", "EvidenceReport", "HypothesisRegion",
    "LogMarginal", "make_report",
    "bias_normal", "deviance_criterion", "ebf_chi_squared", "ebf_directional",
    "ebf_interval", "ebf_one_sided", "ebf_two_sided", "normal_posterior_marginal",
    "ebf_t", "t_expected_bias", "t_posterior_marginal",
    "CountData", "binom_expected_bias", "binom_posterior_marginal", "ebf_binom",
    "ebf_count", "ebf_negbinom", "model_average", "negbinom_expected_bias",
    "negbinom_posterior_marginal",
    "ebf_anova", "ebf_f", "f_expected_bias", "f_posterior_marginal",
    "ebf_pvalue", "posterior_prob_h0", "pvalue_expected_bias",
    "pvalue_posterior_marginal",
    "MultiTestBatch", "cross_marginal", "multi_ebf", "ranked_summary",
    "brc", "calibration_curve", "calibration_table", "held_ott_bound",
    "p_for_units", "sellke_bound", "unit_information_bf", "units_of_evidence",
]
