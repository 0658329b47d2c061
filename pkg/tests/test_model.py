import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustfusion import (
    AttackModel,
    DomainError,
    SensorModel,
    TrustModel,
    binomial_cdf,
    binomial_pmf,
    chernoff_lower_tail,
    chernoff_upper_tail,
    gaussian_q,
    kl_bernoulli,
)


# ---------------------------------------------------------------------------
# model construction / validation
# ---------------------------------------------------------------------------

def test_sensor_model_valid():
    s = SensorModel(0.15, 0.15, 0.5, 0.5)
    assert s.p_fa_l == 0.15
    assert s.min_prior == 0.5
    assert math.isclose(s.gamma_ts, 0.0, abs_tol=1e-15)


def test_sensor_model_hardware_weights():
    s = SensorModel(0.08, 0.21, 0.6432, 0.3568)
    assert math.isclose(s.w1_l, math.log(0.79 / 0.08))
    assert math.isclose(s.w0_l, math.log(0.92 / 0.21))
    assert math.isclose(s.gamma_ts, math.log(0.6432 / 0.3568))


@pytest.mark.parametrize("p_fa,p_md", [(0.5, 0.1), (0.0, 0.1), (0.1, 0.6), (-0.1, 0.1)])
def test_sensor_rates_must_be_interior_below_half(p_fa, p_md):
    with pytest.raises(DomainError):
        SensorModel(p_fa, p_md, 0.5, 0.5)


def test_priors_must_sum_to_one():
    with pytest.raises(DomainError):
        SensorModel(0.1, 0.1, 0.6, 0.3)


def test_trust_model_rejects_identical_pmfs():
    with pytest.raises(DomainError):
        TrustModel((0, 1), (0.3, 0.7), (0.3, 0.7))


def test_trust_model_rejects_boundary_mass():
    with pytest.raises(DomainError):
        TrustModel((0, 1), (0.0, 1.0), (0.8, 0.2))


def test_trust_model_rejects_shared_symbol_mass():
    # per-symbol pmfs must differ, not just the vectors as a whole
    with pytest.raises(DomainError):
        TrustModel((0, 1, 2), (0.2, 0.4, 0.4), (0.2, 0.5, 0.3))


def test_attack_model_effective_rates():
    a = AttackModel(p_f=0.99, pre_fa=0.0, pre_md=0.0)
    assert math.isclose(a.effective_fa, 0.99)
    assert math.isclose(a.effective_md, 0.99)
    b = AttackModel(p_f=0.0, pre_fa=0.3, pre_md=0.1)
    assert math.isclose(b.effective_fa, 0.3)
    assert math.isclose(b.effective_md, 0.1)
    # flip mixes the pre-flip rate toward its complement
    c = AttackModel(p_f=0.5, pre_fa=0.2, pre_md=0.2)
    assert math.isclose(c.effective_fa, 0.5)


# ---------------------------------------------------------------------------
# binomial helpers, checked against direct math.comb sums
# ---------------------------------------------------------------------------

def _pmf_oracle(g, n, p):
    return math.comb(n, g) * p**g * (1.0 - p) ** (n - g)


@pytest.mark.parametrize("n,p", [(1, 0.3), (7, 0.15), (12, 0.5), (30, 0.91)])
def test_binomial_pmf_matches_direct_sum(n, p):
    for g in range(n + 1):
        assert math.isclose(binomial_pmf(g, n, p), _pmf_oracle(g, n, p),
                            rel_tol=1e-12, abs_tol=1e-300)


def test_binomial_pmf_known_values():
    assert math.isclose(binomial_pmf(0, 5, 0.3), 0.7**5, rel_tol=1e-12)
    assert binomial_pmf(5, 5, 1.0) == 1.0
    assert math.isclose(binomial_pmf(3, 10, 0.2), 0.20133, abs_tol=5e-6)


def test_binomial_pmf_out_of_range_rejected():
    with pytest.raises(DomainError):
        binomial_pmf(-1, 5, 0.4)
    with pytest.raises(DomainError):
        binomial_pmf(6, 5, 0.4)


def test_binomial_cdf_real_threshold_floors():
    # cdf takes a real g and floors it, matching the tail-index convention
    assert math.isclose(binomial_cdf(2.7, 5, 0.4), binomial_cdf(2, 5, 0.4))
    assert binomial_cdf(-0.5, 5, 0.4) == 0.0
    assert math.isclose(binomial_cdf(5, 5, 0.4), 1.0, abs_tol=1e-12)


@given(st.integers(1, 400), st.floats(0.01, 0.99))
@settings(max_examples=40, deadline=None)
def test_binomial_pmf_sums_to_one(n, p):
    total = sum(binomial_pmf(g, n, p) for g in range(n + 1))
    assert abs(total - 1.0) < 1e-10


@given(st.integers(1, 60), st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_binomial_cdf_is_cumulative_pmf(n, p):
    run = 0.0
    for g in range(n + 1):
        run += binomial_pmf(g, n, p)
        assert abs(binomial_cdf(g, n, p) - min(run, 1.0)) < 1e-10


# ---------------------------------------------------------------------------
# KL divergence and the Chernoff tails
# ---------------------------------------------------------------------------

def test_kl_known_values():
    assert kl_bernoulli(0.3, 0.3) == 0.0
    assert math.isclose(kl_bernoulli(0.5, 0.8), 0.2231, abs_tol=5e-5)
    assert math.isclose(kl_bernoulli(1.0, 0.5), math.log(2.0), rel_tol=1e-12)
    assert math.isclose(kl_bernoulli(0.0, 0.5), math.log(2.0), rel_tol=1e-12)


@pytest.mark.parametrize("q", [0.0, 1.0])
def test_kl_degenerate_reference_rejected(q):
    with pytest.raises(DomainError):
        kl_bernoulli(0.5, q)


def test_kl_nonnegative_and_zero_iff_equal():
    rng = np.random.default_rng(5)
    for _ in range(200):
        p = float(rng.uniform(0, 1))
        q = float(rng.uniform(0.01, 0.99))
        d = kl_bernoulli(p, q)
        assert d >= 0.0
        if abs(p - q) > 1e-12:
            assert d > 0.0


def test_kl_convex_in_p_spot_checks():
    q = 0.3
    for a, b in [(0.1, 0.5), (0.2, 0.9), (0.35, 0.65)]:
        mid = 0.5 * (a + b)
        assert kl_bernoulli(mid, q) <= 0.5 * (kl_bernoulli(a, q) + kl_bernoulli(b, q)) + 1e-12


def test_chernoff_lower_tail_example():
    bound = chernoff_lower_tail(5, 10, 0.8)
    exact = binomial_cdf(5, 10, 0.8)
    assert math.isclose(bound, 0.1075, abs_tol=5e-4)
    assert math.isclose(exact, 0.0328, abs_tol=5e-4)
    assert bound >= exact


def test_chernoff_tail_near_mean_approaches_one():
    n, p = 50, 0.4
    assert chernoff_lower_tail(n * p - 1e-9, n, p) > 0.999999


def test_chernoff_tails_dominate_exact_tails():
    # the upper exact tail is summed term-by-term from above: 1 - cdf(...)
    # is pure cancellation noise once the true tail drops below ~1e-13
    rng = np.random.default_rng(40)
    checked_lo = checked_hi = 0
    while checked_lo < 1000 or checked_hi < 1000:
        n = int(rng.integers(1, 300))
        p = float(rng.uniform(0.02, 0.98))
        g = float(rng.uniform(0.0, n))
        if 0.0 < g / n < p and checked_lo < 1000:
            assert chernoff_lower_tail(g, n, p) >= binomial_cdf(math.floor(g), n, p)
            checked_lo += 1
        elif p < g / n < 1.0 and checked_hi < 1000:
            upper_exact = sum(binomial_pmf(k, n, p)
                              for k in range(math.ceil(g), n + 1))
            assert chernoff_upper_tail(g, n, p) >= upper_exact * (1.0 - 1e-9)
            checked_hi += 1


def test_chernoff_outside_validity_region_rejected():
    from trustfusion import ValidityError
    with pytest.raises(ValidityError):
        chernoff_lower_tail(9, 10, 0.8)  # g/n above p
    with pytest.raises(ValidityError):
        chernoff_upper_tail(3, 10, 0.8)  # g/n below p


# ---------------------------------------------------------------------------
# Gaussian Q function
# ---------------------------------------------------------------------------

def test_gaussian_q_values():
    assert math.isclose(gaussian_q(0.0), 0.5, rel_tol=1e-12)
    assert math.isclose(gaussian_q(1.0), 0.158655, abs_tol=1e-6)
    assert gaussian_q(40.0) < 1e-300
    assert math.isclose(gaussian_q(-1.0) + gaussian_q(1.0), 1.0, rel_tol=1e-12)


def test_gaussian_q_against_quadrature():
    # midpoint-rule integration of the standard normal density, independent of erfc
    for g in (-2.0, -0.5, 0.3, 1.7, 3.1):
        xs = np.linspace(g, g + 40.0, 400001)
        mid = 0.5 * (xs[1:] + xs[:-1])
        dens = np.exp(-mid * mid / 2.0) / math.sqrt(2.0 * math.pi)
        est = float(np.sum(dens) * (xs[1] - xs[0]))
        assert abs(gaussian_q(g) - est) < 1e-9
