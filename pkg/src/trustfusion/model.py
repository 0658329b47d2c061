"""Core domain types and exact probability primitives.

Shared foundation for the fusion-center detection algorithms: immutable
model descriptions (sensor, trust, attack), the per-trial observation
record, the decision wrapper, and numerically careful scalar primitives
(binomial pmf/cdf, Bernoulli KL divergence, Chernoff tail bounds, the
Gaussian tail function).

Conventions
-----------
* Likelihood products everywhere in the package are accumulated in
  log-domain; linear-domain probabilities appear only in single-factor
  comparisons and in the primitives below.
* Trust symbols are plain indices into ``TrustModel.alphabet``; the
  alphabet entries themselves are labels with no numeric meaning.
* Model types validate their invariants at construction, so downstream
  code may assume them without re-checking.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

__all__ = [
    "DomainError",
    "ValidityError",
    "Hypothesis",
    "SensorModel",
    "TrustModel",
    "AttackModel",
    "NetworkObservation",
    "Decision",
    "binomial_pmf",
    "binomial_cdf",
    "kl_bernoulli",
    "chernoff_lower_tail",
    "chernoff_upper_tail",
    "gaussian_q",
    "snapped_ceil",
    "resolve_malicious_count",
]

#: Tolerance for pmf normalization at TrustModel construction.
PMF_SUM_TOL = 1e-12

#: Absolute tolerance used when snapping near-integer threshold indices.
INTEGER_SNAP_TOL = 1e-9


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidityError(ValueError):
    """Inputs violate the validity region of a bound; the bound does not apply."""


class Hypothesis(enum.IntEnum):
    """Binary hypothesis on the event: H0 = event absent, H1 = event present."""

    H0 = 0
    H1 = 1


def _check_prob(name: str, value: float, lo: float, hi: float,
                lo_open: bool, hi_open: bool) -> None:
    ok_lo = value > lo if lo_open else value >= lo
    ok_hi = value < hi if hi_open else value <= hi
    if not (math.isfinite(value) and ok_lo and ok_hi):
        lo_b = "(" if lo_open else "["
        hi_b = ")" if hi_open else "]"
        raise DomainError(
            f"{name} must lie in {lo_b}{lo}, {hi}{hi_b}, got {value!r}"
        )


@dataclass(frozen=True)
class SensorModel:
    """Legitimate-sensor error rates and event priors.

    Attributes:
        p_fa_l: false-alarm probability of a legitimate sensor, in (0, 0.5).
        p_md_l: missed-detection probability of a legitimate sensor, in (0, 0.5).
        prior_h0: Pr(event absent), in (0, 1).
        prior_h1: Pr(event present), in (0, 1); priors must sum to 1 exactly.
    """

    p_fa_l: float
    p_md_l: float
    prior_h0: float
    prior_h1: float

    def __post_init__(self) -> None:
        _check_prob("p_fa_l", self.p_fa_l, 0.0, 0.5, True, True)
        _check_prob("p_md_l", self.p_md_l, 0.0, 0.5, True, True)
        _check_prob("prior_h0", self.prior_h0, 0.0, 1.0, True, True)
        _check_prob("prior_h1", self.prior_h1, 0.0, 1.0, True, True)
        if self.prior_h0 + self.prior_h1 != 1.0:
            raise DomainError(
                f"priors must sum to 1 exactly, got "
                f"{self.prior_h0!r} + {self.prior_h1!r} = "
                f"{self.prior_h0 + self.prior_h1!r}"
            )

    @property
    def w1_l(self) -> float:
        """Fusion weight for a trusted 1-measurement: log((1-p_md_l)/p_fa_l)."""
        return math.log((1.0 - self.p_md_l) / self.p_fa_l)

    @property
    def w0_l(self) -> float:
        """Fusion weight for a trusted 0-measurement: log((1-p_fa_l)/p_md_l)."""
        return math.log((1.0 - self.p_fa_l) / self.p_md_l)

    @property
    def gamma_ts(self) -> float:
        """Log prior ratio log(prior_h0/prior_h1): the fusion decision threshold."""
        return math.log(self.prior_h0 / self.prior_h1)

    @property
    def min_prior(self) -> float:
        """min(prior_h0, prior_h1): the error of deciding by priors alone."""
        return min(self.prior_h0, self.prior_h1)


@dataclass(frozen=True)
class TrustModel:
    """Finite trust alphabet with legitimacy-conditional pmfs.

    Symbols are represented by their index into ``alphabet``; the pmf
    sequences are aligned with the alphabet by position.

    Attributes:
        alphabet: ordered labels of the trust symbols (content is opaque).
        pmf_legit: per-symbol probabilities given the robot is legitimate.
        pmf_malicious: per-symbol probabilities given the robot is malicious.
    """

    alphabet: Tuple[object, ...]
    pmf_legit: Tuple[float, ...]
    pmf_malicious: Tuple[float, ...]

    def __init__(self, alphabet: Sequence[object],
                 pmf_legit: Sequence[float],
                 pmf_malicious: Sequence[float]) -> None:
        object.__setattr__(self, "alphabet", tuple(alphabet))
        object.__setattr__(self, "pmf_legit", tuple(float(p) for p in pmf_legit))
        object.__setattr__(self, "pmf_malicious",
                           tuple(float(p) for p in pmf_malicious))
        self._validate()

    def _validate(self) -> None:
        k = len(self.alphabet)
        if k < 2:
            raise DomainError("trust alphabet needs at least two symbols")
        if len(self.pmf_legit) != k or len(self.pmf_malicious) != k:
            raise DomainError("pmf lengths must match the alphabet length")
        for name, pmf in (("pmf_legit", self.pmf_legit),
                          ("pmf_malicious", self.pmf_malicious)):
            for i, p in enumerate(pmf):
                _check_prob(f"{name}[{i}]", p, 0.0, 1.0, True, True)
            if abs(math.fsum(pmf) - 1.0) > PMF_SUM_TOL:
                raise DomainError(f"{name} must sum to 1 within {PMF_SUM_TOL}")
        for i, (pl, pm) in enumerate(zip(self.pmf_legit, self.pmf_malicious)):
            if pl == pm:
                raise DomainError(
                    f"trust pmfs must differ at every symbol; equal at index {i}"
                )

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def ratios(self) -> Tuple[float, ...]:
        """Per-symbol likelihood ratios pmf_legit[a] / pmf_malicious[a]."""
        return tuple(pl / pm for pl, pm in
                     zip(self.pmf_legit, self.pmf_malicious))


@dataclass(frozen=True)
class AttackModel:
    """Malicious-robot reporting model: pre-flip sensing plus a bit flip.

    A malicious robot senses with error rates (pre_fa, pre_md) and then
    flips its bit with probability p_f, yielding effective error rates

        effective_fa = (1 - p_f) * pre_fa + p_f * (1 - pre_fa)
        effective_md = (1 - p_f) * pre_md + p_f * (1 - pre_md)

    These effective rates are simulator-side ground truth; the decision
    algorithms never see them.
    """

    p_f: float
    pre_fa: float
    pre_md: float

    def __post_init__(self) -> None:
        _check_prob("p_f", self.p_f, 0.0, 1.0, False, False)
        _check_prob("pre_fa", self.pre_fa, 0.0, 0.5, False, True)
        _check_prob("pre_md", self.pre_md, 0.0, 0.5, False, True)

    @property
    def effective_fa(self) -> float:
        return (1.0 - self.p_f) * self.pre_fa + self.p_f * (1.0 - self.pre_fa)

    @property
    def effective_md(self) -> float:
        return (1.0 - self.p_f) * self.pre_md + self.p_f * (1.0 - self.pre_md)


@dataclass(frozen=True)
class NetworkObservation:
    """One trial's data: measurements, trust values, and hidden ground truth.

    ``truth_t`` (1 = legitimate) and ``truth_event`` exist for the simulator
    and the oracle baseline only; decision algorithms must not read them.
    """

    y: Tuple[int, ...]
    a: Tuple[int, ...]
    truth_t: Optional[Tuple[int, ...]] = None
    truth_event: Optional[Hypothesis] = None

    def __post_init__(self) -> None:
        n = len(self.y)
        if n < 1:
            raise DomainError("observation needs at least one robot")
        if len(self.a) != n:
            raise DomainError("y and a must have equal length")
        if any(b not in (0, 1) for b in self.y):
            raise DomainError("y entries must be 0/1")
        if self.truth_t is not None:
            if len(self.truth_t) != n:
                raise DomainError("truth_t must have length N")
            if any(b not in (0, 1) for b in self.truth_t):
                raise DomainError("truth_t entries must be 0/1")

    @property
    def n(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class Decision:
    """A method's output: the hypothesis plus optional diagnostics.

    Attributes:
        hypothesis: the decided hypothesis.
        est_trust: estimated trust vector t-hat, when the method forms one.
        est_attack_param: estimated attacker error probability, when formed
            (the decided branch's estimate for the joint-MLE test).
        log_likelihoods: (log-likelihood under H1, log-likelihood under H0)
            as accumulated by the method, when available.
        branches: method-specific per-branch diagnostics (the joint-MLE test
            stores both branch maxima here); opaque to generic consumers.
    """

    hypothesis: Hypothesis
    est_trust: Optional[Tuple[int, ...]] = None
    est_attack_param: Optional[float] = None
    log_likelihoods: Optional[Tuple[float, float]] = None
    branches: Optional[Tuple[object, ...]] = None


# ---------------------------------------------------------------------------
# Scalar probability primitives
# ---------------------------------------------------------------------------


def binomial_pmf(g: int, n: int, p: float) -> float:
    """Binomial pmf C(n, g) * p**g * (1-p)**(n-g), stable up to n ~ 1e4.

    Computed through log-gamma so large n neither overflows nor loses the
    leading digits of tiny probabilities.

    Args:
        g: number of successes, 0 <= g <= n.
        n: number of trials, n >= 0.
        p: success probability in [0, 1].

    Raises:
        DomainError: if g is outside 0..n, n < 0, or p is outside [0, 1].
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if g < 0 or g > n:
        raise DomainError(f"g must lie in 0..{n}, got {g}")
    _check_prob("p", p, 0.0, 1.0, False, False)
    if p == 0.0:
        return 1.0 if g == 0 else 0.0
    if p == 1.0:
        return 1.0 if g == n else 0.0
    log_comb = (math.lgamma(n + 1) - math.lgamma(g + 1)
                - math.lgamma(n - g + 1))
    return math.exp(log_comb + g * math.log(p) + (n - g) * math.log1p(-p))


def binomial_cdf(g: float, n: int, p: float) -> float:
    """Binomial CDF: sum of binomial_pmf(i, n, p) for i = 0..floor(g).

    Clamping is part of the contract: returns 0 for g < 0 and 1 for
    g >= n, so tail indices may run off either end without error.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    _check_prob("p", p, 0.0, 1.0, False, False)
    if g < 0:
        return 0.0
    if g >= n:
        return 1.0
    top = int(math.floor(g))
    total = 0.0
    for i in range(top + 1):
        total += binomial_pmf(i, n, p)
    return total


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence D(Bern(p) || Bern(q)) in nats, with 0*log(0) = 0.

        D(p||q) = p*log(p/q) + (1-p)*log((1-p)/(1-q))

    Args:
        p: in [0, 1] (degenerate endpoints allowed).
        q: in the open interval (0, 1).

    Raises:
        DomainError: if q is 0 or 1 (divergence is infinite / undefined),
            or either argument is out of range.
    """
    _check_prob("p", p, 0.0, 1.0, False, False)
    _check_prob("q", q, 0.0, 1.0, True, True)
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / q)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


def chernoff_lower_tail(g: float, n: int, p: float) -> float:
    """Chernoff bound on the lower binomial tail: Pr(X <= g) <= exp(-n*D(g/n||p)).

    Valid only for g/n in the open interval (0, p); the bound is not
    asserted outside that region.

    Raises:
        ValidityError: if g/n is outside (0, p).
        DomainError: via kl_bernoulli if p is not in (0, 1).
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    x = g / n
    if not (0.0 < x < p):
        raise ValidityError(
            f"lower-tail bound needs g/n in (0, p) = (0, {p}); got {x!r}"
        )
    return math.exp(-n * kl_bernoulli(x, p))


def chernoff_upper_tail(g: float, n: int, p: float) -> float:
    """Chernoff bound on the upper binomial tail: Pr(X >= g) <= exp(-n*D(g/n||p)).

    Valid only for g/n in the open interval (p, 1).

    Raises:
        ValidityError: if g/n is outside (p, 1).
        DomainError: via kl_bernoulli if p is not in (0, 1).
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    x = g / n
    if not (p < x < 1.0):
        raise ValidityError(
            f"upper-tail bound needs g/n in (p, 1) = ({p}, 1); got {x!r}"
        )
    return math.exp(-n * kl_bernoulli(x, p))


def gaussian_q(g: float) -> float:
    """Standard-normal tail Q(g) = Pr(Z > g), accurate to ~1e-15 relative.

    Implemented as erfc(g / sqrt(2)) / 2, which stays accurate deep into
    the tail (|g| <= 8 comfortably exceeds the 1e-10 requirement).
    """
    return 0.5 * math.erfc(g / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Small numeric helpers shared by the exact error computations
# ---------------------------------------------------------------------------


def snapped_ceil(x: float, tol: float = INTEGER_SNAP_TOL) -> int:
    """ceil(x) after snapping x to the nearest integer when within tol.

    The exact error formulas index binomial tails with ceil(threshold) - 1;
    thresholds that are mathematically integral can drift off the integer
    by float rounding, which would silently shift the tail by one term.
    Snapping keeps the strict/non-strict split of the decision rule intact
    (achievable test statistics are separated by far more than tol).
    """
    nearest = round(x)
    if abs(x - nearest) <= tol:
        return int(nearest)
    return int(math.ceil(x))


def resolve_malicious_count(m_bar: float, n: int) -> int:
    """Malicious count for proportion m_bar of n robots: round(m_bar * n).

    Rounds half away from zero. Callers that need exactness (the CLI warns
    on lossy rounding) should compare m_bar * n against the result.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    _check_prob("m_bar", m_bar, 0.0, 1.0, False, False)
    return int(math.floor(m_bar * n + 0.5))
