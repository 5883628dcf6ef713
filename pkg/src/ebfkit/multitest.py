"""Empirical Bayes factors for batches of related tests.

Each test i observes a normal summary statistic x_i with known standard
error.  Instead of re-using only its own posterior, each test borrows the
other tests' posteriors through an exchangeable mixture with weight pi_h on
the foreign components.  The marginal likelihood of a region H for test i is

          e^{-b_H} own_i + pi_h * sum_{j != i} cross_ij
    M_i = -----------------------------------------------
          mass_i + pi_h * sum_{j != i} mass_j

where own_i is the single-test region integral, cross_ij reuses test j's
posterior as test i's prior (independent data, so it needs no correction),
mass_j is the posterior mass j puts on H, and b_H is the single-test bias
of the region.  At m = 1 this reduces exactly to the single-test factor.
Only the down-weighting of the own term corrects for double use of the
data; it is a heuristic rather than an exact bias, validated empirically by
the simulation harness.

With pi_h -> 0 the foreign terms vanish and each test recovers its
single-test factor; in large batches the factor is typically insensitive to
pi_h except very near 0, so the default pi_h = 1 is a serviceable choice
when the true fraction of non-null tests is unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ebfkit import _kernels
from ebfkit import normal_ebf
from ebfkit.core import EvidenceReport, HypothesisRegion
from ebfkit.exceptions import DegenerateRegionError, DomainError, UnsupportedFamilyError
from ebfkit.numerics import normal_log_pdf

__all__ = ["MultiTestBatch", "cross_marginal", "multi_ebf", "ranked_summary"]

_KIND_CODE = {
    "point": _kernels.KIND_POINT,
    "below": _kernels.KIND_BELOW,
    "above": _kernels.KIND_ABOVE,
    "interval": _kernels.KIND_INTERVAL,
    "full": _kernels.KIND_FULL,
}


@dataclass(frozen=True)
class MultiTestBatch:
    """Ordered batch of (id, estimate, standard error) normal statistics
    sharing one region pair and one mixture weight pi_h."""

    ids: tuple
    estimates: np.ndarray
    standard_errors: np.ndarray
    h0: HypothesisRegion
    h1: HypothesisRegion
    pi_h: float = 1.0
    family: str = "normal"

    def __post_init__(self):
        if self.family != "normal":
            raise UnsupportedFamilyError(
                "the multiple-testing factor is defined for normal summary "
                f"statistics with known standard errors, not {self.family!r}")
        est = np.ascontiguousarray(self.estimates, dtype=float)
        se = np.ascontiguousarray(self.standard_errors, dtype=float)
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "standard_errors", se)
        if est.ndim != 1 or est.shape != se.shape or est.size < 1:
            raise DomainError("estimates and standard errors must be equal-length, nonempty")
        if len(self.ids) != est.size:
            raise DomainError("ids must match the number of tests")
        if np.any(se <= 0):
            raise DomainError("standard errors must be positive")
        if not 0.0 < self.pi_h <= 1.0:
            raise DomainError("pi_h must lie in (0, 1]")

    @property
    def size(self) -> int:
        return self.estimates.size

    @staticmethod
    def from_arrays(estimates, standard_errors, h0, h1, pi_h=1.0, ids=None):
        est = np.asarray(estimates, dtype=float)
        if ids is None:
            ids = tuple(range(est.size))
        return MultiTestBatch(tuple(ids), est, np.asarray(standard_errors, dtype=float),
                              h0, h1, pi_h)


def cross_marginal(batch: MultiTestBatch, i: int, j: int,
                   region: HypothesisRegion) -> float:
    """log integral of test i's likelihood against test j's posterior over a
    region: the borrowed-prior numerator term of the mixture marginal."""
    if i == j:
        raise DomainError("cross_marginal needs two distinct tests")
    if region.kind == "point":
        raise DomainError("a point region has no cross terms; its marginal "
                          "is the plain density")
    x, se = batch.estimates, batch.standard_errors
    vi, vj = se[i] ** 2, se[j] ** 2
    v = vi + vj
    log_pdf = normal_log_pdf(x[i], x[j], v)
    if region.kind == "full":
        return float(log_pdf)
    post_var = vi * vj / v
    post_mean = (x[i] * vj + x[j] * vi) / v
    kind, a, b = _region_args(region)
    lmass = _kernels._log_mass_scalar(kind, a, 0.0 if b is None else b,
                                      post_mean, math.sqrt(post_var))
    if lmass == -math.inf:
        raise DegenerateRegionError("region mass underflows to zero")
    return float(log_pdf + lmass)


def _region_args(region: HypothesisRegion):
    kind = _KIND_CODE[region.kind]
    if region.kind == "interval":
        return kind, region.a, region.b
    return kind, region.a, None


def _batch_log_marginals(batch: MultiTestBatch, region: HypothesisRegion):
    bias = normal_ebf.region_bias(region)
    kind, a, b = _region_args(region)
    vals = _kernels.mixture_log_marginals(
        batch.estimates, batch.standard_errors, kind, a, b,
        batch.pi_h, bias.value)
    if not np.all(np.isfinite(vals)):
        raise DegenerateRegionError("a mixture marginal underflowed to zero mass")
    return vals, bias


def multi_ebf(batch: MultiTestBatch) -> list[EvidenceReport]:
    """One evidence report per test from the mixture marginals."""
    m0, b0 = _batch_log_marginals(batch, batch.h0)
    m1, b1 = _batch_log_marginals(batch, batch.h1)
    diff = m0 - m1
    return [
        EvidenceReport(float(d), "normal-multi", batch.h0, batch.h1, b0, b1)
        for d in diff
    ]


def ranked_summary(reports: list[EvidenceReport], ids=None) -> list[dict]:
    """Tests ordered by evidence against the null; ties keep input order."""
    if not reports:
        raise DomainError("ranked_summary needs at least one report")
    if ids is None:
        ids = list(range(len(reports)))
    score = np.array([r.ebf10_log for r in reports])
    order = np.argsort(-score, kind="stable")
    rows = [None] * len(reports)
    for rank, idx in enumerate(order, start=1):
        rows[rank - 1] = {"id": ids[idx], "ebf10_log": float(score[idx]),
                          "rank": rank}
    return rows
