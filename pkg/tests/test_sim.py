import math

import numpy as np
import pytest

from trustfusion import (
    AttackModel,
    DomainError,
    Hypothesis,
    ScenarioConfig,
    SensorModel,
    TrustModel,
    WorstCaseConfig,
    build_methods,
    run_experiment,
    sample_trial,
    sweep_malicious_proportion,
    worst_case_error,
)

SENSOR = SensorModel(0.15, 0.15, 0.5, 0.5)
TRUST = TrustModel((0.0, 1.0), (0.2, 0.8), (0.8, 0.2))
FLIP = AttackModel(0.99, 0.0, 0.0)


def _study_cfg(**overrides):
    base = dict(n=10, malicious_count=5, sensor=SENSOR, trust=TRUST,
                attack=FLIP, seed=20260818)
    base.update(overrides)
    return ScenarioConfig(**base)


# ---------------------------------------------------------------------------
# trial generation
# ---------------------------------------------------------------------------

def test_sample_trial_is_deterministic():
    cfg = _study_cfg()
    first = sample_trial(cfg, 123)
    second = sample_trial(cfg, 123)
    assert first == second
    assert sample_trial(cfg, 124) != first


def test_sample_trial_shapes_and_composition():
    cfg = _study_cfg(malicious_count=3)
    obs = sample_trial(cfg, 0)
    assert len(obs.y) == len(obs.a) == len(obs.truth_t) == 10
    assert sum(obs.truth_t) == 7
    assert obs.truth_event in (Hypothesis.H0, Hypothesis.H1)


def test_malicious_placement_varies_across_trials():
    cfg = _study_cfg(malicious_count=2)
    positions = {tuple(i for i, t in enumerate(sample_trial(cfg, k).truth_t) if t == 0)
                 for k in range(50)}
    assert len(positions) > 10  # permuted per trial, not pinned to a prefix


def test_full_flip_attack_always_reports_wrong_bit():
    cfg = _study_cfg(attack=AttackModel(1.0, 0.0, 0.0))
    for k in range(30):
        obs = sample_trial(cfg, k)
        truth_bit = 1 if obs.truth_event is Hypothesis.H1 else 0
        for y_i, t_i in zip(obs.y, obs.truth_t):
            if t_i == 0:
                assert y_i == 1 - truth_bit


def test_zero_flip_attack_uses_pre_rates():
    # p_f = 0 collapses the malicious channel to an ordinary sensor with the
    # pre-flip rates; check the empirical H0 false-alarm rate of malicious robots
    cfg = _study_cfg(attack=AttackModel(0.0, 0.35, 0.1), seed=5)
    ones = trials = 0
    for k in range(4000):
        obs = sample_trial(cfg, k)
        if obs.truth_event is Hypothesis.H0:
            for y_i, t_i in zip(obs.y, obs.truth_t):
                if t_i == 0:
                    trials += 1
                    ones += y_i
    rate = ones / trials
    assert abs(rate - 0.35) < 3 * math.sqrt(0.35 * 0.65 / trials)


def test_generated_marginals_match_configuration():
    cfg = _study_cfg(seed=99)
    n_trials = 100_000
    h1 = legit_fa = legit_fa_n = mal_wrong = mal_n = trust1_legit = legit_n = 0
    for k in range(n_trials // 10):
        obs = sample_trial(cfg, k)
        h1 += obs.truth_event is Hypothesis.H1
        truth_bit = 1 if obs.truth_event is Hypothesis.H1 else 0
        for y_i, a_i, t_i in zip(obs.y, obs.a, obs.truth_t):
            if t_i == 1:
                legit_n += 1
                trust1_legit += a_i
                if truth_bit == 0:
                    legit_fa_n += 1
                    legit_fa += y_i
            else:
                mal_n += 1
                mal_wrong += y_i != truth_bit
    def _within(count, n, p):
        return abs(count / n - p) < 3 * math.sqrt(p * (1 - p) / n)
    assert _within(h1, n_trials // 10, 0.5)
    assert _within(legit_fa, legit_fa_n, 0.15)
    assert _within(mal_wrong, mal_n, 0.99)
    assert _within(trust1_legit, legit_n, 0.8)


def test_trust_symbol_chi_square():
    # chi-square GOF for the malicious trust pmf; critical value for df=1
    # at p = 0.001 is 10.828
    cfg = _study_cfg(seed=7)
    counts = [0, 0]
    for k in range(3000):
        obs = sample_trial(cfg, k)
        for a_i, t_i in zip(obs.a, obs.truth_t):
            if t_i == 0:
                counts[a_i] += 1
    total = sum(counts)
    expected = [0.8 * total, 0.2 * total]
    chi2 = sum((c - e) ** 2 / e for c, e in zip(counts, expected))
    assert chi2 < 10.828


# ---------------------------------------------------------------------------
# experiment engine
# ---------------------------------------------------------------------------

def test_reports_identical_across_thread_counts():
    cfg = _study_cfg()
    names = ["two_stage", "aglrt", "oracle", "oblivious", "reputation_t1"]
    reports = [
        run_experiment(cfg, 300, build_methods(names, cfg, m_bar=0.5), threads=t)
        for t in (1, 2, 7)
    ]
    assert reports[0] == reports[1] == reports[2]


def test_rerun_same_seed_identical():
    cfg = _study_cfg()
    methods = lambda: build_methods(["two_stage", "oblivious"], cfg, m_bar=0.5)
    assert run_experiment(cfg, 200, methods()) == run_experiment(cfg, 200, methods())


def test_unknown_method_name_rejected():
    cfg = _study_cfg()
    with pytest.raises(DomainError):
        build_methods(["two_stage", "majority_vote"], cfg, m_bar=0.5)


def test_duplicate_method_names_rejected():
    cfg = _study_cfg()
    methods = build_methods(["oracle"], cfg, m_bar=0.5) * 2
    with pytest.raises(DomainError):
        run_experiment(cfg, 10, methods)


def test_report_accessors():
    cfg = _study_cfg()
    report = run_experiment(cfg, 50, build_methods(["oracle", "oblivious"], cfg, 0.5))
    r = report.result_for("oracle")
    assert r.trials == 50
    assert 0.0 <= r.error_rate <= 1.0
    assert math.isclose(r.error_rate, r.errors / 50)
    with pytest.raises(DomainError):
        report.result_for("two_stage")


def test_oracle_never_worse_than_oblivious_in_expectation():
    cfg = _study_cfg(seed=1234)
    report = run_experiment(
        cfg, 3000, build_methods(["oracle", "oblivious"], cfg, m_bar=0.5))
    oracle = report.result_for("oracle")
    oblivious = report.result_for("oblivious")
    assert oracle.error_rate <= oblivious.error_rate + oracle.ci_halfwidth


def test_clean_network_error_matches_analytic_value():
    cfg = _study_cfg(malicious_count=0, seed=31337)
    report = run_experiment(cfg, 20_000, build_methods(["oblivious"], cfg, m_bar=0.0))
    r = report.result_for("oblivious")
    analytic = worst_case_error(0.1, 1.0, WorstCaseConfig(0.0, 10), SENSOR, TRUST)
    assert abs(r.error_rate - analytic) <= 3 * r.ci_halfwidth


def test_sweep_reoptimizes_per_proportion():
    cfg = _study_cfg()
    rows = sweep_malicious_proportion(cfg, [0.0, 0.5, 1.0], 400,
                                      ["two_stage", "oracle"])
    assert [p for p, _ in rows] == [0.0, 0.5, 1.0]
    clean = rows[0][1].result_for("two_stage").error_rate
    saturated = rows[2][1].result_for("two_stage").error_rate
    assert clean < 0.1
    assert 0.4 < saturated <= 0.62  # trust-nobody regime decides by priors
