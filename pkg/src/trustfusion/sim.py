"""Deterministic Monte Carlo engine: trial generation and method evaluation.

Every random draw derives from a counter-based stream keyed by
(seed, trial_index, purpose): purpose 0 generates the observation, and
purpose 1000 + stream_id feeds the decision randomness of the method with
that stream id.  Two consequences worth relying on:

* every method sees the identical observation in a given trial (paired
  comparison), and adding/removing methods never perturbs the others;
* reports are bit-identical for any worker-thread count, because worker
  outputs are integer error counts combined by addition.

Reputation-style methods are history-dependent, so they run in a dedicated
sequential pass over the same regenerated observations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .aglrt import aglrt_decide, aglrt_decide_constrained
from .baselines import (
    ReputationState,
    oblivious_decide,
    oracle_decide,
    reputation_update_and_decide,
)
from .model import (
    AttackModel,
    Decision,
    DomainError,
    Hypothesis,
    NetworkObservation,
    SensorModel,
    TrustModel,
    resolve_malicious_count,
)
from .two_stage import WorstCaseConfig, optimize_thresholds, two_stage_decide

__all__ = [
    "ScenarioConfig",
    "MethodResult",
    "ErrorReport",
    "TwoStageMethod",
    "AglrtMethod",
    "AglrtConstrainedMethod",
    "OracleMethod",
    "ObliviousMethod",
    "ReputationMethod",
    "METHOD_NAMES",
    "build_methods",
    "sample_trial",
    "run_experiment",
    "sweep_malicious_proportion",
]

_PURPOSE_TRIAL = 0
_PURPOSE_METHOD_BASE = 1000

_MAX_SEED = 2**64 - 1


def _rng(seed: int, trial_index: int, purpose: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=(seed, trial_index, purpose)))
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated network: size, malicious count, models, master seed."""

    n: int
    malicious_count: int
    sensor: SensorModel
    trust: TrustModel
    attack: AttackModel
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not 0 <= self.malicious_count <= self.n:
            raise DomainError(
                f"malicious_count must lie in 0..{self.n}, got {self.malicious_count}"
            )
        if not 0 <= self.seed <= _MAX_SEED:
            raise DomainError("seed must be an unsigned 64-bit integer")

    @property
    def malicious_proportion(self) -> float:
        return self.malicious_count / self.n


@dataclass(frozen=True)
class MethodResult:
    method: str
    trials: int
    errors: int
    error_rate: float
    ci_halfwidth: float


@dataclass(frozen=True)
class ErrorReport:
    """Per-method error tallies with binomial 95% confidence half-widths."""

    results: Tuple[MethodResult, ...]

    def result_for(self, method: str) -> MethodResult:
        for r in self.results:
            if r.method == method:
                return r
        raise DomainError(f"no result for method {method!r}")


def sample_trial(cfg: ScenarioConfig, trial_index: int) -> NetworkObservation:
    """Generate one network observation, fully determined by (seed, trial_index).

    Draw order (fixed): event uniform, placement permutation, n measurement
    uniforms, n flip uniforms, n trust uniforms.  The first malicious_count
    slots are malicious before the seeded permutation scatters them, so
    index position carries no information.
    """
    rng = _rng(cfg.seed, trial_index, _PURPOSE_TRIAL)
    n = cfg.n
    event = Hypothesis.H1 if rng.random() < cfg.sensor.prior_h1 else Hypothesis.H0
    perm = rng.permutation(n)
    u_y = rng.random(n)
    u_flip = rng.random(n)
    u_a = rng.random(n)

    base = [0] * cfg.malicious_count + [1] * (n - cfg.malicious_count)
    truth_t = tuple(base[j] for j in perm)

    if event is Hypothesis.H0:
        p_one_legit = cfg.sensor.p_fa_l
        p_one_pre = cfg.attack.pre_fa
    else:
        p_one_legit = 1.0 - cfg.sensor.p_md_l
        p_one_pre = 1.0 - cfg.attack.pre_md

    cum_legit = np.cumsum(cfg.trust.pmf_legit)
    cum_mal = np.cumsum(cfg.trust.pmf_malicious)

    y = []
    a = []
    for i in range(n):
        if truth_t[i]:
            y.append(1 if u_y[i] < p_one_legit else 0)
            cum = cum_legit
        else:
            sensed = 1 if u_y[i] < p_one_pre else 0
            flipped = u_flip[i] < cfg.attack.p_f
            y.append(sensed ^ (1 if flipped else 0))
            cum = cum_mal
        a.append(int(np.searchsorted(cum, u_a[i], side="right")))
    return NetworkObservation(y=tuple(y), a=tuple(a), truth_t=truth_t,
                              truth_event=event)


# ---------------------------------------------------------------------------
# Methods
# ---------------------------------------------------------------------------


class TwoStageMethod:
    """Two-stage detector with fixed (pre-optimized) thresholds."""

    sequential = False
    uses_rng = True

    def __init__(self, thresholds, sensor: SensorModel, trust: TrustModel,
                 name: str = "two_stage", stream_id: int = 1) -> None:
        self.thresholds = thresholds
        self.sensor = sensor
        self.trust = trust
        self.name = name
        self.stream_id = stream_id

    def decide(self, obs: NetworkObservation, rng) -> Decision:
        return two_stage_decide(obs, self.thresholds, self.sensor, self.trust, rng)

    def cache_key(self, obs: NetworkObservation):
        return None  # tie-break randomness makes decisions trial-specific


class AglrtMethod:
    """Joint-MLE detector; decisions are cached per (y, a) multiset."""

    sequential = False
    uses_rng = False

    def __init__(self, sensor: SensorModel, trust: TrustModel,
                 name: str = "aglrt", stream_id: int = 2) -> None:
        self.sensor = sensor
        self.trust = trust
        self.name = name
        self.stream_id = stream_id

    def decide(self, obs: NetworkObservation, rng) -> Decision:
        return aglrt_decide(obs.y, obs.a, self.sensor, self.trust)

    def cache_key(self, obs: NetworkObservation):
        # the hypothesis is a permutation-invariant function of (y, a) pairs
        return tuple(sorted(zip(obs.y, obs.a)))


class AglrtConstrainedMethod:
    """Joint-MLE detector with a malicious-count budget."""

    sequential = False
    uses_rng = False

    def __init__(self, sensor: SensorModel, trust: TrustModel, m_bar: float,
                 name: str = "aglrt_constrained", stream_id: int = 3) -> None:
        self.sensor = sensor
        self.trust = trust
        self.m_bar = m_bar
        self.name = name
        self.stream_id = stream_id

    def decide(self, obs: NetworkObservation, rng) -> Decision:
        return aglrt_decide_constrained(obs.y, obs.a, self.sensor, self.trust,
                                        self.m_bar)

    def cache_key(self, obs: NetworkObservation):
        return tuple(sorted(zip(obs.y, obs.a)))


class OracleMethod:
    """Clairvoyant reference: fuses with the true trust vector."""

    sequential = False
    uses_rng = False

    def __init__(self, sensor: SensorModel, name: str = "oracle",
                 stream_id: int = 4) -> None:
        self.sensor = sensor
        self.name = name
        self.stream_id = stream_id

    def decide(self, obs: NetworkObservation, rng) -> Decision:
        return oracle_decide(obs, self.sensor)

    def cache_key(self, obs: NetworkObservation):
        return None


class ObliviousMethod:
    """Trusts everyone."""

    sequential = False
    uses_rng = False

    def __init__(self, sensor: SensorModel, name: str = "oblivious",
                 stream_id: int = 5) -> None:
        self.sensor = sensor
        self.name = name
        self.stream_id = stream_id

    def decide(self, obs: NetworkObservation, rng) -> Decision:
        return oblivious_decide(obs, self.sensor)

    def cache_key(self, obs: NetworkObservation):
        return None


class ReputationMethod:
    """History-based exclusion baseline; runs in the sequential pass."""

    sequential = True
    uses_rng = False

    def __init__(self, sensor: SensorModel, capacity: int, eta: float,
                 name: str, stream_id: int = 6) -> None:
        self.sensor = sensor
        self.capacity = capacity
        self.eta = eta
        self.name = name
        self.stream_id = stream_id

    def make_state(self, n: int) -> ReputationState:
        return ReputationState.fresh(n, self.capacity, self.eta)

    def step(self, obs: NetworkObservation,
             state: ReputationState) -> Tuple[Decision, ReputationState]:
        return reputation_update_and_decide(obs, state, self.sensor)


METHOD_NAMES = (
    "two_stage",
    "aglrt",
    "aglrt_constrained",
    "oracle",
    "oblivious",
    "reputation_t1",
    "reputation_t5",
)


def build_methods(names: Sequence[str], cfg: ScenarioConfig, m_bar: float,
                  delta_p: float = 0.01) -> List[object]:
    """Instantiate methods by name for a scenario.

    ``m_bar`` is the malicious-proportion bound handed to the two-stage
    optimizer and the constrained joint-MLE variant.
    """
    methods: List[object] = []
    for name in names:
        if name == "two_stage":
            th = optimize_thresholds(
                WorstCaseConfig(m_bar=m_bar, n=cfg.n, delta_p=delta_p),
                cfg.sensor, cfg.trust)
            methods.append(TwoStageMethod(th, cfg.sensor, cfg.trust))
        elif name == "aglrt":
            methods.append(AglrtMethod(cfg.sensor, cfg.trust))
        elif name == "aglrt_constrained":
            methods.append(AglrtConstrainedMethod(cfg.sensor, cfg.trust, m_bar))
        elif name == "oracle":
            methods.append(OracleMethod(cfg.sensor))
        elif name == "oblivious":
            methods.append(ObliviousMethod(cfg.sensor))
        elif name == "reputation_t1":
            methods.append(ReputationMethod(cfg.sensor, 1, 0.5, "reputation_t1", 6))
        elif name == "reputation_t5":
            methods.append(ReputationMethod(cfg.sensor, 5, 2.5, "reputation_t5", 7))
        else:
            raise DomainError(
                f"unknown method {name!r}; valid names: {', '.join(METHOD_NAMES)}"
            )
    return methods


# ---------------------------------------------------------------------------
# Experiment engine
# ---------------------------------------------------------------------------


def _count_chunk(cfg: ScenarioConfig, lo: int, hi: int, methods: Sequence[object],
                 caches: Dict[str, Dict]) -> Dict[str, int]:
    counts = {m.name: 0 for m in methods}
    for t in range(lo, hi):
        obs = sample_trial(cfg, t)
        for m in methods:
            key = m.cache_key(obs)
            hyp: Optional[Hypothesis] = None
            if key is not None:
                hyp = caches[m.name].get(key)
            if hyp is None:
                rng = _rng(cfg.seed, t, _PURPOSE_METHOD_BASE + m.stream_id) \
                    if m.uses_rng else None
                hyp = m.decide(obs, rng).hypothesis
                if key is not None:
                    caches[m.name][key] = hyp
            if hyp is not obs.truth_event:
                counts[m.name] += 1
    return counts


def run_experiment(cfg: ScenarioConfig, n_trials: int,
                   methods: Sequence[object], threads: int = 1) -> ErrorReport:
    """Evaluate every method on the same n_trials observations.

    Stateless methods run over thread-partitioned trial chunks (results are
    integer counts, so the partition cannot affect them); sequential
    methods run in trial order afterwards on the same regenerated
    observations.
    """
    if n_trials < 1:
        raise DomainError(f"n_trials must be >= 1, got {n_trials}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise DomainError(f"duplicate method names: {names}")

    stateless = [m for m in methods if not m.sequential]
    sequential = [m for m in methods if m.sequential]
    errors: Dict[str, int] = {}

    if stateless:
        caches: Dict[str, Dict] = {m.name: {} for m in stateless}
        if threads == 1 or n_trials < 2 * threads:
            part = [_count_chunk(cfg, 0, n_trials, stateless, caches)]
        else:
            bounds = [round(i * n_trials / threads) for i in range(threads + 1)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                part = list(pool.map(
                    lambda span: _count_chunk(cfg, span[0], span[1], stateless, caches),
                    zip(bounds[:-1], bounds[1:])))
        for m in stateless:
            errors[m.name] = sum(p[m.name] for p in part)

    if sequential:
        states = {m.name: m.make_state(cfg.n) for m in sequential}
        counts = {m.name: 0 for m in sequential}
        for t in range(n_trials):
            obs = sample_trial(cfg, t)
            for m in sequential:
                decision, states[m.name] = m.step(obs, states[m.name])
                if decision.hypothesis is not obs.truth_event:
                    counts[m.name] += 1
        errors.update(counts)

    results = []
    for m in methods:
        e = errors[m.name]
        rate = e / n_trials
        half = 1.96 * math.sqrt(rate * (1.0 - rate) / n_trials)
        results.append(MethodResult(method=m.name, trials=n_trials, errors=e,
                                    error_rate=rate, ci_halfwidth=half))
    return ErrorReport(results=tuple(results))


def sweep_malicious_proportion(cfg: ScenarioConfig, proportions: Sequence[float],
                               n_trials: int, method_names: Sequence[str],
                               threads: int = 1, delta_p: float = 0.01
                               ) -> List[Tuple[float, ErrorReport]]:
    """Run matched experiments across malicious proportions.

    For each proportion the scenario's malicious count is re-resolved and
    the two-stage thresholds are re-optimized with m_bar equal to the true
    proportion; methods are specified by name so per-proportion rebuilding
    stays deterministic.
    """
    out = []
    for prop in proportions:
        count = resolve_malicious_count(prop, cfg.n)
        cfg_p = replace(cfg, malicious_count=count)
        methods = build_methods(method_names, cfg_p, m_bar=prop, delta_p=delta_p)
        out.append((prop, run_experiment(cfg_p, n_trials, methods, threads=threads)))
    return out
