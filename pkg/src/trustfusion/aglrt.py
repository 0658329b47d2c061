"""Joint-MLE hypothesis test over the trust vector and attacker parameter.

The test compares, between the two hypotheses, the maximum of the joint
likelihood of (measurements, trust values) over every trust labeling
t in {0,1}^N and every attacker error probability P in [0,1]:

    max_{t,P} Pr(a, y | H1, t, P)
    ---------------------------------  >  gamma = prior_h0 / prior_h1  ->  H1
    max_{t,P} Pr(a, y | H0, t, P)

Tractability comes from two structural facts.  For a fixed P the optimal
labeling decomposes per robot (trust robot i iff its legitimate score
c_L,i is at least its malicious score c_M,i), and for a fixed labeling the
optimal P is the empirical wrong-bit rate of the robots labeled malicious
— always a fraction with denominator at most N.  Scanning the candidate
set {T_n/T_d : T_d <= N} (at most N^2 + 1 values) with the per-robot inner
maximization therefore attains the exact joint maximum in O(N^3).

Variants: per-robot legitimacy priors fold into the scores as constant
factors; a cardinality bound on the malicious set turns the inner step
into a sort-and-greedy selection.  ``brute_force_glrt`` enumerates all
labelings directly and serves as the verification oracle for all three.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .model import (
    Decision,
    DomainError,
    Hypothesis,
    SensorModel,
    TrustModel,
    resolve_malicious_count,
)

__all__ = [
    "CandidateSet",
    "BranchMaximum",
    "RobotPrior",
    "candidate_set",
    "inner_max",
    "mle_attacker_param",
    "aglrt_decide",
    "aglrt_decide_with_prior",
    "constrained_inner_max",
    "aglrt_decide_constrained",
    "brute_force_glrt",
]

#: Slack on the log-likelihood-ratio comparison against log(gamma).  Exact
#: ties decide H0; the slack keeps float noise (~1e-15 between equivalent
#: evaluation routes) from flipping knife-edge instances.
GLRT_TIE_TOL = 1e-12

#: Exhaustive enumeration guard for the brute-force oracle.
BRUTE_FORCE_MAX_N = 20


@dataclass(frozen=True)
class CandidateSet:
    """All attainable attacker-parameter MLEs: fractions T_n/T_d, T_d <= N."""

    values: Tuple[float, ...]


@dataclass(frozen=True)
class BranchMaximum:
    """One branch's maximized log-likelihood with its maximizers."""

    log_likelihood: float
    t_hat: Tuple[int, ...]
    attacker_param: float


@dataclass(frozen=True)
class RobotPrior:
    """Common prior probability that a robot is legitimate, strictly interior."""

    p_legit: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p_legit < 1.0:
            raise DomainError(f"p_legit must lie in (0, 1), got {self.p_legit!r}")


def candidate_set(n: int) -> CandidateSet:
    """Deduplicated ascending fractions T_n/T_d with T_d in 1..n, T_n in 0..T_d.

    Deduplication runs on reduced integer fractions, never on floats, so
    e.g. 1/2 and 2/4 collapse exactly.  Size is at most n^2 + 1.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    fracs = {Fraction(t_n, t_d) for t_d in range(1, n + 1)
             for t_n in range(t_d + 1)}
    return CandidateSet(values=tuple(float(f) for f in sorted(fracs)))


def _legit_factor(y_i: int, branch: Hypothesis, sensor: SensorModel) -> float:
    if branch is Hypothesis.H1:
        return 1.0 - sensor.p_md_l if y_i else sensor.p_md_l
    return sensor.p_fa_l if y_i else 1.0 - sensor.p_fa_l


def _mal_factor(y_i: int, attacker_p: float, branch: Hypothesis) -> float:
    # attacker_p is the probability of reporting the wrong bit for the
    # branch's hypothesis (P_MD,M under H1, P_FA,M under H0).
    if branch is Hypothesis.H1:
        return 1.0 - attacker_p if y_i else attacker_p
    return attacker_p if y_i else 1.0 - attacker_p


def _weighted_pmfs(a: Sequence[int], trust: TrustModel, w_legit: float,
                   w_mal: float) -> Tuple[List[float], List[float]]:
    wpl = [w_legit * trust.pmf_legit[ai] for ai in a]
    wpm = [w_mal * trust.pmf_malicious[ai] for ai in a]
    return wpl, wpm


def _log(x: float) -> float:
    # 0^0 = 1 convention upstream means zero factors only appear on the
    # losing side of a max; still, keep log well-defined for them.
    return math.log(x) if x > 0.0 else -math.inf


def _inner_max_prepared(y: Sequence[int], wpl: List[float], wpm: List[float],
                        attacker_p: float, branch: Hypothesis,
                        sensor: SensorModel) -> BranchMaximum:
    t_hat = []
    total = 0.0
    for i, y_i in enumerate(y):
        c_l = wpl[i] * _legit_factor(y_i, branch, sensor)
        c_m = wpm[i] * _mal_factor(y_i, attacker_p, branch)
        if c_l >= c_m:  # ties label the robot legitimate
            t_hat.append(1)
            total += _log(c_l)
        else:
            t_hat.append(0)
            total += _log(c_m)
    return BranchMaximum(log_likelihood=total, t_hat=tuple(t_hat),
                         attacker_param=attacker_p)


def inner_max(y: Sequence[int], a: Sequence[int], attacker_p: float,
              branch: Hypothesis, sensor: SensorModel,
              trust: TrustModel) -> BranchMaximum:
    """Optimal trust labeling for a fixed attacker parameter, one branch.

    Per robot: c_L,i = p(a_i | legit) * legit-sensor factor and
    c_M,i = p(a_i | malicious) * attacker factor; label legitimate iff
    c_L,i >= c_M,i and accumulate log max(c_L,i, c_M,i).  Attacker
    parameters 0 and 1 produce zero factors on contradicting measurements;
    those labelings simply never win the per-robot max.
    """
    if len(y) != len(a):
        raise DomainError("y and a must have equal length")
    wpl, wpm = _weighted_pmfs(a, trust, 1.0, 1.0)
    return _inner_max_prepared(y, wpl, wpm, attacker_p, branch, sensor)


def constrained_inner_max(y: Sequence[int], a: Sequence[int], attacker_p: float,
                          branch: Hypothesis, sensor: SensorModel,
                          trust: TrustModel, m_bar: float) -> BranchMaximum:
    """Inner maximization with at most round(m_bar * N) robots labeled malicious.

    Computes d_i = c_M,i - c_L,i, sorts descending, and marks robots
    malicious while d stays positive and the budget lasts; everyone else is
    legitimate.  Greedy is optimal because contributions are separable.
    """
    if len(y) != len(a):
        raise DomainError("y and a must have equal length")
    n = len(y)
    budget = resolve_malicious_count(m_bar, n)
    wpl, wpm = _weighted_pmfs(a, trust, 1.0, 1.0)
    c_l = [wpl[i] * _legit_factor(y[i], branch, sensor) for i in range(n)]
    c_m = [wpm[i] * _mal_factor(y[i], attacker_p, branch) for i in range(n)]
    d = [c_m[i] - c_l[i] for i in range(n)]
    order = sorted(range(n), key=lambda i: -d[i])
    t_hat = [1] * n
    marked = 0
    for i in order:
        if marked >= budget or d[i] <= 0.0:
            break
        t_hat[i] = 0
        marked += 1
    total = 0.0
    for i in range(n):
        total += _log(c_l[i]) if t_hat[i] else _log(c_m[i])
    return BranchMaximum(log_likelihood=total, t_hat=tuple(t_hat),
                         attacker_param=attacker_p)


def mle_attacker_param(y: Sequence[int], t: Sequence[int],
                       branch: Hypothesis) -> float:
    """MLE of the attacker error probability given a trust labeling.

    Under H1 it is the fraction of robots labeled malicious reporting
    y = 0 (missed detections); under H0, the fraction reporting y = 1
    (false alarms).  With nobody labeled malicious any value maximizes the
    likelihood; 0.5 is returned by convention.
    """
    mal = [i for i, t_i in enumerate(t) if not t_i]
    if not mal:
        return 0.5
    if branch is Hypothesis.H1:
        wrong = sum(1 - y[i] for i in mal)
    else:
        wrong = sum(y[i] for i in mal)
    return wrong / len(mal)


def _decision_from_branches(num: BranchMaximum, den: BranchMaximum,
                            sensor: SensorModel) -> Decision:
    lam = num.log_likelihood - den.log_likelihood
    if lam > sensor.gamma_ts + GLRT_TIE_TOL:
        hyp, winner = Hypothesis.H1, num
    else:
        hyp, winner = Hypothesis.H0, den
    return Decision(hypothesis=hyp, est_trust=winner.t_hat,
                    est_attack_param=winner.attacker_param,
                    log_likelihoods=(num.log_likelihood, den.log_likelihood),
                    branches=(num, den))


def _scan_branch(y: Sequence[int], a: Sequence[int], branch: Hypothesis,
                 sensor: SensorModel, trust: TrustModel,
                 candidates: Sequence[float], w_legit: float, w_mal: float,
                 m_bar: Optional[float]) -> BranchMaximum:
    n = len(y)
    wpl, wpm = _weighted_pmfs(a, trust, w_legit, w_mal)
    budget = None if m_bar is None else resolve_malicious_count(m_bar, n)
    c_l = [wpl[i] * _legit_factor(y[i], branch, sensor) for i in range(n)]
    best: Optional[BranchMaximum] = None
    for p in candidates:
        if budget is None:
            t_hat = []
            total = 0.0
            for i in range(n):
                c_m = wpm[i] * _mal_factor(y[i], p, branch)
                if c_l[i] >= c_m:
                    t_hat.append(1)
                    total += _log(c_l[i])
                else:
                    t_hat.append(0)
                    total += _log(c_m)
            bm = BranchMaximum(total, tuple(t_hat), p)
        else:
            c_m = [wpm[i] * _mal_factor(y[i], p, branch) for i in range(n)]
            d = [c_m[i] - c_l[i] for i in range(n)]
            order = sorted(range(n), key=lambda i: -d[i])
            t_list = [1] * n
            marked = 0
            for i in order:
                if marked >= budget or d[i] <= 0.0:
                    break
                t_list[i] = 0
                marked += 1
            total = 0.0
            for i in range(n):
                total += _log(c_l[i]) if t_list[i] else _log(c_m[i])
            bm = BranchMaximum(total, tuple(t_list), p)
        # strict > keeps the smallest winning candidate (ascending scan)
        if best is None or bm.log_likelihood > best.log_likelihood:
            best = bm
    assert best is not None
    return best


def aglrt_decide(y: Sequence[int], a: Sequence[int], sensor: SensorModel,
                 trust: TrustModel) -> Decision:
    """Joint-MLE decision via the candidate-set scan.

    Maximizes each branch over CandidateSet x inner_max and decides H1 iff
    the log-likelihood difference strictly exceeds log(prior_h0/prior_h1)
    (equality selects H0).  The Decision carries the winning branch's
    labeling and attacker estimate, the pair of branch log-likelihoods, and
    both BranchMaximum records in ``branches``.
    """
    if len(y) != len(a):
        raise DomainError("y and a must have equal length")
    cands = candidate_set(len(y)).values
    num = _scan_branch(y, a, Hypothesis.H1, sensor, trust, cands, 1.0, 1.0, None)
    den = _scan_branch(y, a, Hypothesis.H0, sensor, trust, cands, 1.0, 1.0, None)
    return _decision_from_branches(num, den, sensor)


def aglrt_decide_with_prior(y: Sequence[int], a: Sequence[int],
                            sensor: SensorModel, trust: TrustModel,
                            prior: RobotPrior) -> Decision:
    """Joint-MLE decision with per-robot legitimacy priors folded in.

    Identical pipeline with c_L,i scaled by p_legit and c_M,i by
    1 - p_legit; the decision threshold is unchanged.
    """
    if len(y) != len(a):
        raise DomainError("y and a must have equal length")
    cands = candidate_set(len(y)).values
    num = _scan_branch(y, a, Hypothesis.H1, sensor, trust, cands,
                       prior.p_legit, 1.0 - prior.p_legit, None)
    den = _scan_branch(y, a, Hypothesis.H0, sensor, trust, cands,
                       prior.p_legit, 1.0 - prior.p_legit, None)
    return _decision_from_branches(num, den, sensor)


def aglrt_decide_constrained(y: Sequence[int], a: Sequence[int],
                             sensor: SensorModel, trust: TrustModel,
                             m_bar: float) -> Decision:
    """Joint-MLE decision with the malicious count capped at round(m_bar * N)."""
    if len(y) != len(a):
        raise DomainError("y and a must have equal length")
    cands = candidate_set(len(y)).values
    num = _scan_branch(y, a, Hypothesis.H1, sensor, trust, cands, 1.0, 1.0, m_bar)
    den = _scan_branch(y, a, Hypothesis.H0, sensor, trust, cands, 1.0, 1.0, m_bar)
    return _decision_from_branches(num, den, sensor)


def brute_force_glrt(y: Sequence[int], a: Sequence[int], sensor: SensorModel,
                     trust: TrustModel, prior: Optional[RobotPrior] = None,
                     m_bar: Optional[float] = None) -> Decision:
    """Exhaustive-reference decision: enumerate all 2^N trust labelings.

    For each labeling the attacker parameter is set to its closed-form MLE.
    Optional ``prior`` and ``m_bar`` mirror the prior-informed and
    cardinality-constrained variants, making this the verification oracle
    for all three decision functions.

    Raises:
        DomainError: if N exceeds the enumeration guard (20).
    """
    n = len(y)
    if len(a) != n:
        raise DomainError("y and a must have equal length")
    if n > BRUTE_FORCE_MAX_N:
        raise DomainError(
            f"brute_force_glrt refuses N = {n} > {BRUTE_FORCE_MAX_N} "
            f"(exhaustive enumeration guard)"
        )
    w_legit = prior.p_legit if prior is not None else 1.0
    w_mal = 1.0 - prior.p_legit if prior is not None else 1.0
    budget = None if m_bar is None else resolve_malicious_count(m_bar, n)
    wpl, wpm = _weighted_pmfs(a, trust, w_legit, w_mal)

    branch_best: List[BranchMaximum] = []
    for branch in (Hypothesis.H1, Hypothesis.H0):
        c_l = [wpl[i] * _legit_factor(y[i], branch, sensor) for i in range(n)]
        best: Optional[BranchMaximum] = None
        for t in itertools.product((0, 1), repeat=n):
            if budget is not None and n - sum(t) > budget:
                continue
            p_hat = mle_attacker_param(y, t, branch)
            total = 0.0
            for i in range(n):
                if t[i]:
                    total += _log(c_l[i])
                else:
                    total += _log(wpm[i] * _mal_factor(y[i], p_hat, branch))
            if best is None or total > best.log_likelihood:
                best = BranchMaximum(total, t, p_hat)
        assert best is not None
        branch_best.append(best)
    return _decision_from_branches(branch_best[0], branch_best[1], sensor)
