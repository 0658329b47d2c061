"""Two-stage detection: trust classification, fusion, and worst-case analysis.

Stage one classifies each robot as trusted/untrusted by a likelihood-ratio
test on its trust value (threshold ``gamma_t``, tie-break probability
``p_t``).  Stage two fuses the measurements of trusted robots with the
standard binary hypothesis rule

    S_N = sum_i t_hat_i * [w1 * y_i - w0 * (1 - y_i)]  >=  gamma_TS  ->  H1

with w1 = log((1-P_MD,L)/P_FA,L), w0 = log((1-P_FA,L)/P_MD,L) and
gamma_TS = log(prior_h0 / prior_h1).

Against the worst-case attacker (every malicious robot reports the wrong
bit, and the malicious fraction saturates its upper bound m_bar), the
probability of error has a closed form: conditioning on the number of
trusted legitimate robots k_L ~ Bin((1-m_bar)N, P_trust,L) and trusted
malicious robots k_M ~ Bin(m_bar*N, P_trust,M), each conditional error is
a binomial tail whose index is a ceil-minus-one expression in (k_L, k_M).
``worst_case_error`` evaluates it exactly; ``optimize_thresholds`` scans
the finite candidate grid (the per-symbol likelihood ratios x a p_t grid)
and returns the minimizer.

The module also provides the Chernoff-style error upper bound (a four-case
decomposition over trust-classification outcomes) and the critical
malicious proportion m*: the smallest proportion at which the optimized
scheme degenerates to deciding by priors alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .model import (
    Decision,
    DomainError,
    Hypothesis,
    SensorModel,
    TrustModel,
    ValidityError,
    binomial_cdf,
    binomial_pmf,
    gaussian_q,
    kl_bernoulli,
    resolve_malicious_count,
    snapped_ceil,
)

__all__ = [
    "TwoStageThresholds",
    "WorstCaseConfig",
    "BoundRegion",
    "trust_likelihood_ratio",
    "classify_trust",
    "trust_probabilities",
    "fuse_trusted",
    "exact_error_given_counts",
    "worst_case_error",
    "optimize_thresholds",
    "two_stage_decide",
    "error_upper_bound",
    "m_star_exact",
    "m_star_noiseless_exact",
    "m_star_normal_approx",
]

#: Relative tolerance for deciding that a likelihood ratio sits exactly at
#: gamma_t.  Ratios and candidate thresholds are computed from the same pmf
#: values, so equality is exact when gamma_t comes from the candidate set;
#: the tolerance guards caller-supplied thresholds.
RATIO_EQ_TOL = 1e-12

#: Absolute slack on the fusion comparison S_N >= gamma_TS.  Distinct
#: achievable values of S_N sit far apart relative to this, so the slack
#: only rescues exact ties from float rounding; it cannot move a decision
#: across buckets.
FUSION_TIE_TOL = 1e-9


@dataclass(frozen=True)
class TwoStageThresholds:
    """Stage-one operating point: LRT threshold, tie-break, achieved error.

    ``worst_case_error`` is filled in by the optimizer; caller-constructed
    instances may leave it None.  ``gamma_t`` is meaningful when drawn from
    the finite candidate set of per-symbol likelihood ratios, but any
    nonnegative threshold is accepted.
    """

    gamma_t: float
    p_t: float
    worst_case_error: Optional[float] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma_t) and self.gamma_t >= 0.0):
            raise DomainError(f"gamma_t must be finite and >= 0, got {self.gamma_t!r}")
        if not 0.0 <= self.p_t <= 1.0:
            raise DomainError(f"p_t must lie in [0, 1], got {self.p_t!r}")


@dataclass(frozen=True)
class WorstCaseConfig:
    """Worst-case analysis configuration: malicious bound, size, p_t grid step.

    ``m_bar * n`` should be (close to) an integer; the malicious count is
    resolved by rounding half away from zero, and the CLI warns when the
    rounding is lossy.
    """

    m_bar: float
    n: int
    delta_p: float = 0.01

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not 0.0 <= self.m_bar <= 1.0:
            raise DomainError(f"m_bar must lie in [0, 1], got {self.m_bar!r}")
        if not 0.0 < self.delta_p <= 1.0:
            raise DomainError(f"delta_p must lie in (0, 1], got {self.delta_p!r}")

    @property
    def malicious_count(self) -> int:
        return resolve_malicious_count(self.m_bar, self.n)

    @property
    def legit_count(self) -> int:
        return self.n - self.malicious_count


@dataclass(frozen=True)
class BoundRegion:
    """Analysis knobs for the error upper bound.

    ``beta_l`` splits "too few legitimate robots trusted" from the typical
    regime and must sit strictly below P_trust,L; ``beta_m`` splits "too
    many malicious robots trusted" and must sit strictly above P_trust,M.
    Those two conditions depend on the thresholds under analysis and are
    checked by ``error_upper_bound`` rather than here.
    """

    beta_l: float
    beta_m: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta_l < 1.0:
            raise DomainError(f"beta_l must lie in (0, 1), got {self.beta_l!r}")
        if not 0.0 < self.beta_m < 1.0:
            raise DomainError(f"beta_m must lie in (0, 1), got {self.beta_m!r}")


# ---------------------------------------------------------------------------
# Stage one: trust classification
# ---------------------------------------------------------------------------


def trust_likelihood_ratio(symbol: int, trust: TrustModel) -> float:
    """Likelihood ratio p(symbol | legitimate) / p(symbol | malicious).

    Raises:
        DomainError: if symbol is not an index into the trust alphabet.
    """
    if not isinstance(symbol, int) or not 0 <= symbol < trust.size:
        raise DomainError(
            f"symbol must be an alphabet index in 0..{trust.size - 1}, got {symbol!r}"
        )
    return trust.pmf_legit[symbol] / trust.pmf_malicious[symbol]


def _ratio_side(ratio: float, gamma_t: float) -> int:
    """-1 / 0 / +1 for ratio below / at / above gamma_t (tolerant equality)."""
    if ratio == gamma_t:
        return 0
    if abs(ratio - gamma_t) <= RATIO_EQ_TOL * max(abs(ratio), abs(gamma_t)):
        return 0
    return 1 if ratio > gamma_t else -1


def classify_trust(symbols: Sequence[int], thresholds: TwoStageThresholds,
                   trust: TrustModel, randomness) -> Tuple[int, ...]:
    """Stage-one trust decisions for a sequence of trust symbols.

    A robot is trusted when its likelihood ratio exceeds ``gamma_t``,
    untrusted when below, and trusted with probability ``p_t`` at equality
    (one uniform draw from ``randomness`` per tied robot).

    Args:
        symbols: alphabet indices, one per robot.
        thresholds: stage-one operating point.
        trust: the trust model shared by all robots.
        randomness: a numpy Generator (only ``random()`` is used).

    Returns:
        The estimated trust vector t_hat as a tuple of 0/1.
    """
    out = []
    for s in symbols:
        side = _ratio_side(trust_likelihood_ratio(s, trust), thresholds.gamma_t)
        if side > 0:
            out.append(1)
        elif side < 0:
            out.append(0)
        else:
            out.append(1 if randomness.random() < thresholds.p_t else 0)
    return tuple(out)


def _trust_probs(gamma_t: float, p_t: float,
                 trust: TrustModel) -> Tuple[float, float]:
    p_l = 0.0
    p_m = 0.0
    for idx, ratio in enumerate(trust.ratios):
        side = _ratio_side(ratio, gamma_t)
        if side > 0:
            p_l += trust.pmf_legit[idx]
            p_m += trust.pmf_malicious[idx]
        elif side == 0:
            p_l += p_t * trust.pmf_legit[idx]
            p_m += p_t * trust.pmf_malicious[idx]
    return p_l, p_m


def trust_probabilities(thresholds: TwoStageThresholds,
                        trust: TrustModel) -> Tuple[float, float]:
    """(P_trust,L, P_trust,M): probabilities of trusting a legitimate resp.
    malicious robot under the given thresholds.

    Exact finite sums over the alphabet: symbols whose likelihood ratio
    exceeds gamma_t contribute fully, symbols at equality contribute their
    probability mass weighted by p_t.
    """
    return _trust_probs(thresholds.gamma_t, thresholds.p_t, trust)


# ---------------------------------------------------------------------------
# Stage two: fusion
# ---------------------------------------------------------------------------


def fuse_trusted(y: Sequence[int], t_hat: Sequence[int],
                 sensor: SensorModel) -> Decision:
    """Fuse the measurements of trusted robots with the standard binary rule.

    Decides H1 iff S_N >= gamma_TS (ties go to H1).  S_N is assembled from
    the integer counts of trusted ones/zeros so that the Monte Carlo path,
    the closed-form error evaluation, and enumeration oracles bucket
    knife-edge outcomes identically.  With no trusted robots S_N = 0 and
    the rule degenerates to deciding by priors.

    Returns:
        Decision with ``est_trust`` = t_hat and ``log_likelihoods`` =
        (log Pr(trusted y | H1), log Pr(trusted y | H0)).
    """
    if len(y) != len(t_hat):
        raise DomainError("y and t_hat must have equal length")
    n1 = sum(1 for yi, ti in zip(y, t_hat) if ti and yi)
    n0 = sum(1 for yi, ti in zip(y, t_hat) if ti and not yi)
    s_n = n1 * sensor.w1_l - n0 * sensor.w0_l
    hyp = Hypothesis.H1 if s_n >= sensor.gamma_ts - FUSION_TIE_TOL else Hypothesis.H0
    ll_h1 = n1 * math.log(1.0 - sensor.p_md_l) + n0 * math.log(sensor.p_md_l)
    ll_h0 = n1 * math.log(sensor.p_fa_l) + n0 * math.log(1.0 - sensor.p_fa_l)
    return Decision(hypothesis=hyp, est_trust=tuple(t_hat),
                    log_likelihoods=(ll_h1, ll_h0))


def two_stage_decide(obs, thresholds: TwoStageThresholds, sensor: SensorModel,
                     trust: TrustModel, randomness) -> Decision:
    """Full two-stage decision on one observation (public fields only).

    Composition classify_trust -> fuse_trusted; the returned Decision
    carries the estimated trust vector.
    """
    t_hat = classify_trust(obs.a, thresholds, trust, randomness)
    return fuse_trusted(obs.y, t_hat, sensor)


# ---------------------------------------------------------------------------
# Exact worst-case error
# ---------------------------------------------------------------------------


def _cdf_row(n: int, p: float) -> List[float]:
    """Running sums of binomial_pmf(i, n, p): row[j] = binomial_cdf(j, n, p)."""
    row = []
    total = 0.0
    for i in range(n + 1):
        total += binomial_pmf(i, n, p)
        row.append(total)
    return row


def _cdf_at(row: List[float], j: int, n: int) -> float:
    if j < 0:
        return 0.0
    if j >= n:
        return 1.0
    return row[j]


def exact_error_given_counts(gamma_t: float, p_t: float, n_legit: int,
                             n_malicious: int, sensor: SensorModel,
                             trust: TrustModel,
                             attack_success: float = 1.0) -> float:
    """Exact fusion-center error probability for fixed population counts.

    Generalizes the worst-case attack: each malicious robot reports the
    wrong bit independently with probability ``attack_success`` (1.0 is the
    worst case).  Conditioning on the trusted counts (k_L, k_M) and on the
    number g of trusted malicious robots whose report lands on the wrong
    bit, the count of trusted ones is a shifted binomial in the legitimate
    reports, so each conditional error is an exact binomial tail:

        false alarm:      Pr(n_ones >= c)  with  n_ones = Bin(k_L, P_FA,L) + g
        missed detection: Pr(n_ones <  c)  with  n_ones = Bin(k_L, 1-P_MD,L) + g

    where c = (gamma_TS + (k_L + k_M) * w0) / (w0 + w1) is the trusted-ones
    threshold implied by S_N >= gamma_TS.  Tail indices use ceil-minus-one
    with integer snapping, matching the tie rule of ``fuse_trusted``.

    Args:
        gamma_t: stage-one threshold.
        p_t: stage-one tie-break probability.
        n_legit: number of legitimate robots.
        n_malicious: number of malicious robots.
        sensor: legitimate sensor model and priors.
        trust: trust-value model.
        attack_success: probability a malicious robot reports the wrong bit.

    Returns:
        prior_h0 * P_FA + prior_h1 * P_MD, in [0, 1].
    """
    if n_legit < 0 or n_malicious < 0 or n_legit + n_malicious < 1:
        raise DomainError("need nonnegative counts with at least one robot")
    if not 0.0 <= attack_success <= 1.0:
        raise DomainError(f"attack_success must lie in [0, 1], got {attack_success!r}")
    p_tl, p_tm = _trust_probs(gamma_t, p_t, trust)
    w0, w1 = sensor.w0_l, sensor.w1_l
    w_sum = w0 + w1
    gts = sensor.gamma_ts

    weights_l = [binomial_pmf(k, n_legit, p_tl) for k in range(n_legit + 1)]
    weights_m = [binomial_pmf(k, n_malicious, p_tm) for k in range(n_malicious + 1)]

    total = 0.0
    for k_l, w_l in enumerate(weights_l):
        if w_l == 0.0:
            continue
        fa_row = _cdf_row(k_l, sensor.p_fa_l)
        md_row = _cdf_row(k_l, 1.0 - sensor.p_md_l)
        for k_m, w_m in enumerate(weights_m):
            if w_m == 0.0:
                continue
            c = (gts + (k_l + k_m) * w0) / w_sum
            p_fa = 0.0
            p_md = 0.0
            for g in range(k_m + 1):
                j = snapped_ceil(c - g) - 1
                pg_fa = binomial_pmf(g, k_m, attack_success)
                if pg_fa != 0.0:
                    p_fa += pg_fa * (1.0 - _cdf_at(fa_row, j, k_l))
                pg_md = binomial_pmf(g, k_m, 1.0 - attack_success)
                if pg_md != 0.0:
                    p_md += pg_md * _cdf_at(md_row, j, k_l)
            total += w_l * w_m * (sensor.prior_h0 * p_fa + sensor.prior_h1 * p_md)
    return min(max(total, 0.0), 1.0)


def worst_case_error(gamma_t: float, p_t: float, cfg: WorstCaseConfig,
                     sensor: SensorModel, trust: TrustModel) -> float:
    """Exact error probability under the worst-case attack.

    The worst case fixes every malicious robot to report the wrong bit
    with certainty and saturates the malicious count at round(m_bar * n);
    the result is the exact double binomial sum over trusted counts.
    """
    return exact_error_given_counts(gamma_t, p_t, cfg.legit_count,
                                    cfg.malicious_count, sensor, trust,
                                    attack_success=1.0)


# ---------------------------------------------------------------------------
# Threshold optimization
# ---------------------------------------------------------------------------


def _unit_grid(step: float) -> List[float]:
    """The grid {0, step, 2*step, ..., 1}.

    When 1/step is integral the grid is built as k/M, which makes grids for
    nested steps (0.2, 0.1, 0.05, 0.01) float-exact subsets of one another.
    """
    inv = 1.0 / step
    m = round(inv)
    if m >= 1 and abs(inv - m) <= 1e-9:
        return [k / m for k in range(m + 1)]
    grid = []
    k = 0
    while True:
        v = k * step
        if v >= 1.0 - 1e-12:
            break
        grid.append(v)
        k += 1
    grid.append(1.0)
    return grid


def gamma_candidates(trust: TrustModel) -> List[float]:
    """Ascending candidate thresholds: the distinct per-symbol ratios.

    Scanning these (with the tie-break grid) is sufficient: between two
    consecutive ratios the classification, and hence the error, does not
    change, and values above the largest ratio all trust nobody.
    """
    return sorted(set(trust.ratios))


def optimize_thresholds(cfg: WorstCaseConfig, sensor: SensorModel,
                        trust: TrustModel) -> TwoStageThresholds:
    """Minimize the worst-case error over the finite candidate grid.

    Exhaustive scan over (gamma_t in ascending ratio candidates) x
    (p_t in {0, delta_p, ..., 1}); the first candidate achieving the
    minimum wins ties, which makes the result deterministic.
    """
    best: Optional[Tuple[float, float, float]] = None
    for g in gamma_candidates(trust):
        for p in _unit_grid(cfg.delta_p):
            err = worst_case_error(g, p, cfg, sensor, trust)
            if best is None or err < best[2]:
                best = (g, p, err)
    assert best is not None
    return TwoStageThresholds(gamma_t=best[0], p_t=best[1],
                              worst_case_error=best[2])


# ---------------------------------------------------------------------------
# Error upper bound
# ---------------------------------------------------------------------------


def error_upper_bound(thresholds: TwoStageThresholds, cfg: WorstCaseConfig,
                      region: BoundRegion, sensor: SensorModel,
                      trust: TrustModel) -> float:
    """Chernoff-style upper bound on the worst-case error.

    Decomposes over the stage-one outcome: (cases 1-2) fewer than
    beta_l * (1-m_bar) * N legitimate robots trusted, (case 3) more than
    beta_m * m_bar * N malicious robots trusted, and (case 4) the typical
    regime, where the fusion statistic concentrates.  Each piece is bounded
    by an exponential with a KL-divergence rate:

        exp(-(1-m_bar) N D(beta_l || P_trust,L))
      + exp(-m_bar N D(beta_m || P_trust,M))
      + prior_h0 exp(-k_lo D(g_fa || P_FA,L))
      + prior_h1 exp(-k_lo D(g_md || 1 - P_MD,L))

    with k_lo = beta_l (1-m_bar) N + 1, k_hi = beta_m m_bar N - 1 and the
    normalized case-4 thresholds

        g_fa = (gamma_TS - k_hi w1 + k_lo w0) / (k_lo (w0 + w1))
        g_md = (gamma_TS + k_hi w0 + k_lo w0) / (k_lo (w0 + w1))

    evaluated at the worst corner of the case-4 region.  The result may
    exceed 1 for small networks; it is deliberately not clamped so the
    decay with N remains visible.

    Raises:
        ValidityError: if beta_l >= P_trust,L, beta_m <= P_trust,M, or a
            normalized threshold leaves its required open interval
            (g_fa in (P_FA,L, 1), g_md in (0, 1 - P_MD,L)).
    """
    p_tl, p_tm = trust_probabilities(thresholds, trust)
    if not region.beta_l < p_tl:
        raise ValidityError(
            f"beta_l must lie below P_trust,L: {region.beta_l!r} >= {p_tl!r}"
        )
    if not region.beta_m > p_tm:
        raise ValidityError(
            f"beta_m must lie above P_trust,M: {region.beta_m!r} <= {p_tm!r}"
        )
    n_l = (1.0 - cfg.m_bar) * cfg.n
    n_m = cfg.m_bar * cfg.n

    term_low_legit = 0.0 if p_tl == 1.0 else math.exp(
        -n_l * kl_bernoulli(region.beta_l, p_tl))
    term_high_mal = 0.0 if p_tm == 0.0 else math.exp(
        -n_m * kl_bernoulli(region.beta_m, p_tm))

    k_lo = region.beta_l * n_l + 1.0
    k_hi = region.beta_m * n_m - 1.0
    w0, w1 = sensor.w0_l, sensor.w1_l
    w_sum = w0 + w1
    g_fa = (sensor.gamma_ts - k_hi * w1 + k_lo * w0) / (k_lo * w_sum)
    g_md = (sensor.gamma_ts + k_hi * w0 + k_lo * w0) / (k_lo * w_sum)
    if not sensor.p_fa_l < g_fa < 1.0:
        raise ValidityError(
            f"normalized false-alarm threshold {g_fa!r} outside "
            f"({sensor.p_fa_l}, 1); bound not applicable"
        )
    if not 0.0 < g_md < 1.0 - sensor.p_md_l:
        raise ValidityError(
            f"normalized missed-detection threshold {g_md!r} outside "
            f"(0, {1.0 - sensor.p_md_l}); bound not applicable"
        )
    term_typical = (
        sensor.prior_h0 * math.exp(-k_lo * kl_bernoulli(g_fa, sensor.p_fa_l))
        + sensor.prior_h1 * math.exp(-k_lo * kl_bernoulli(g_md, 1.0 - sensor.p_md_l))
    )
    return term_low_legit + term_high_mal + term_typical


# ---------------------------------------------------------------------------
# Critical malicious proportion
# ---------------------------------------------------------------------------


def m_star_exact(n: int, sensor: SensorModel, trust: TrustModel,
                 delta_m: Optional[float] = None,
                 delta_p: float = 0.01) -> float:
    """Smallest grid proportion where the optimized worst-case error hits
    the prior floor min(prior_h0, prior_h1).

    Sweeps m_bar over {0, delta_m, ..., 1} (default step 1/n so malicious
    counts stay integral), re-optimizing the thresholds at every step.
    Beyond the returned proportion the optimal scheme trusts nobody and
    decides by priors alone.
    """
    step = 1.0 / n if delta_m is None else delta_m
    floor = sensor.min_prior - 1e-12
    for m_bar in _unit_grid(step):
        cfg = WorstCaseConfig(m_bar=m_bar, n=n, delta_p=delta_p)
        th = optimize_thresholds(cfg, sensor, trust)
        if th.worst_case_error >= floor:
            return m_bar
    return 1.0


def _check_priors(priors: Tuple[float, float]) -> Tuple[float, float]:
    pr0, pr1 = priors
    if not (0.0 < pr0 < 1.0 and 0.0 < pr1 < 1.0 and pr0 + pr1 == 1.0):
        raise DomainError(f"priors must be interior and sum to 1 exactly, got {priors!r}")
    return pr0, pr1


def m_star_noiseless_exact(p_trust_l: float, p_trust_m: float, n: int,
                           priors: Tuple[float, float],
                           delta_m: Optional[float] = None) -> float:
    """Exact critical proportion in the noiseless-sensor regime.

    With perfect sensors, the worst-case fused statistic depends only on
    Z = K_M - K_L, the trusted-malicious minus trusted-legitimate count:
    a false alarm occurs iff Z >= 0 and a missed detection iff Z > 0.
    Both probabilities are exact binomial convolutions here; the result is
    the smallest grid proportion where

        prior_h0 * Pr(Z >= 0) + prior_h1 * Pr(Z > 0) >= min(priors).

    This is the reference value the normal approximation is judged against.
    """
    pr0, pr1 = _check_priors(priors)
    if not (0.0 <= p_trust_l <= 1.0 and 0.0 <= p_trust_m <= 1.0):
        raise DomainError("trust probabilities must lie in [0, 1]")
    step = 1.0 / n if delta_m is None else delta_m
    floor = min(pr0, pr1) - 1e-12
    for m_bar in _unit_grid(step):
        n_mal = resolve_malicious_count(m_bar, n)
        n_leg = n - n_mal
        pr_z_ge0 = 0.0
        pr_z_gt0 = 0.0
        for k_m in range(n_mal + 1):
            w = binomial_pmf(k_m, n_mal, p_trust_m)
            if w == 0.0:
                continue
            pr_z_ge0 += w * binomial_cdf(k_m, n_leg, p_trust_l)
            pr_z_gt0 += w * binomial_cdf(k_m - 1, n_leg, p_trust_l)
        if pr0 * pr_z_ge0 + pr1 * pr_z_gt0 >= floor:
            return m_bar
    return 1.0


def m_star_normal_approx(p_trust_l: float, p_trust_m: float, n: int,
                         priors: Tuple[float, float],
                         delta_m: Optional[float] = None) -> float:
    """Gaussian approximation of the noiseless critical proportion.

    Approximates Z = K_M - K_L by a normal with

        mu      = m_bar n (p_trust_l + p_trust_m) - n p_trust_l
        sigma^2 = m_bar n p_trust_m (1 - p_trust_m)
                  + (1 - m_bar) n p_trust_l (1 - p_trust_l)

    and returns the smallest grid proportion where

        prior_h0 * Q((-1/2 - mu)/sigma) + prior_h1 * Q(-mu/sigma) >= min(priors)

    (Q is the standard-normal tail; the -1/2 applies a continuity
    correction to Pr(Z >= 0)).  Degenerate sigma = 0 falls back to the
    exact step function.
    """
    pr0, pr1 = _check_priors(priors)
    if not (0.0 <= p_trust_l <= 1.0 and 0.0 <= p_trust_m <= 1.0):
        raise DomainError("trust probabilities must lie in [0, 1]")
    step = 1.0 / n if delta_m is None else delta_m
    floor = min(pr0, pr1) - 1e-12
    for m_bar in _unit_grid(step):
        mu = m_bar * n * (p_trust_l + p_trust_m) - n * p_trust_l
        var = (m_bar * n * p_trust_m * (1.0 - p_trust_m)
               + (1.0 - m_bar) * n * p_trust_l * (1.0 - p_trust_l))
        if var <= 0.0:
            pr_ge0 = 1.0 if mu > -0.5 else (0.5 if mu == -0.5 else 0.0)
            pr_gt0 = 1.0 if mu > 0.0 else (0.5 if mu == 0.0 else 0.0)
        else:
            sigma = math.sqrt(var)
            pr_ge0 = gaussian_q((-0.5 - mu) / sigma)
            pr_gt0 = gaussian_q(-mu / sigma)
        if pr0 * pr_ge0 + pr1 * pr_gt0 >= floor:
            return m_bar
    return 1.0
