import math
import random

import pytest

from coxdunkl.errors import BudgetError
from coxdunkl.mmintegral import (EULER_GAMMA, check_functional_equation,
                                 gamma_integral_cross_check,
                                 gamma_product_exact, gamma_product_rhs,
                                 log_gamma, log_gamma_product, mm_exact,
                                 mm_log_moments, mm_monte_carlo,
                                 predicted_relative_se, wick_moment,
                                 wick_moment_bruteforce)
from coxdunkl.dunkl import b_poly
from coxdunkl.polynomials import MultiPoly
from coxdunkl.scalars import rat
from coxdunkl.suite import group_context

SAMPLES = 400_000   # unit-test scale; the acceptance suite uses 10^7


def test_log_gamma_accuracy():
    # Gamma(1/2)^2 = pi and Gamma(n) = (n-1)!
    assert abs(math.exp(2 * log_gamma(0.5)) - math.pi) < 1e-12 * math.pi
    for n in range(1, 25):
        target = math.factorial(n - 1)
        assert abs(math.exp(log_gamma(n)) - target) <= 1e-12 * target
    assert abs(log_gamma(3.7) - math.lgamma(3.7)) < 1e-13


def test_wick_small_cases(ctx_a2):
    rs = ctx_a2.rs
    spec = rs.spec
    # (alpha, alpha) = 2 for every root
    for i in range(rs.num_positive):
        assert wick_moment(rs, [i, i]) == spec.from_rational(2)
    # odd moments vanish
    assert wick_moment(rs, [0]) == spec.zero()
    assert wick_moment(rs, [0, 1, 2]) == spec.zero()
    # {a,a,b,b} -> 4 + 2 (a,b)^2; for adjacent simple roots (a,b) = -1
    assert wick_moment(rs, [0, 0, 1, 1]) == spec.from_rational(6)


def test_wick_against_bruteforce_oracle():
    for label in ("A2", "B2", "I2(5)"):
        rs = group_context(label).rs
        rng = random.Random(41)
        for _ in range(20):
            n = rng.choice([2, 4, 6, 8])
            factors = [rng.randrange(rs.num_positive) for _ in range(n)]
            assert wick_moment(rs, factors) == wick_moment_bruteforce(rs, factors)


def test_wick_permutation_invariance(ctx_b2):
    rs = ctx_b2.rs
    rng = random.Random(42)
    factors = [0, 1, 2, 3, 0, 1]
    base = wick_moment(rs, factors)
    for _ in range(5):
        rng.shuffle(factors)
        assert wick_moment(rs, factors) == base


def test_wick_budget():
    rs = group_context("A2").rs
    with pytest.raises(BudgetError):
        wick_moment(rs, [0] * 22)
    with pytest.raises(BudgetError):
        mm_exact(rs, 4)    # 24 factors


def test_mm_exact_values():
    # k = 0 is the empty product
    for label in ("A2", "H3"):
        rs = group_context(label).rs
        assert mm_exact(rs, 0) == rs.spec.one()
    # A1: E[(alpha,x)^2] = 2; A2 k=1: Gamma(3)Gamma(4)/Gamma(2)^2 = 12
    a1 = group_context("A1")
    assert mm_exact(a1.rs, 1) == a1.rs.spec.from_rational(2)
    a2 = group_context("A2")
    assert mm_exact(a2.rs, 1) == a2.rs.spec.from_rational(12)


def test_mm_exact_matches_gamma_product():
    cases = [("A1", 1), ("A2", 1), ("B2", 1), ("A3", 1), ("A1", 2), ("A2", 2)]
    for label, k in cases:
        ctx = group_context(label)
        val = mm_exact(ctx.rs, k)
        assert val == ctx.rs.spec.from_rational(gamma_product_exact(ctx.degrees, k))


def test_gamma_product_rhs():
    a2 = group_context("A2")
    assert gamma_product_rhs(a2.degrees, 0) == 1
    assert gamma_product_rhs(a2.degrees, 1) == 12
    a1 = group_context("A1")
    v = gamma_product_rhs(a1.degrees, 0.5)
    assert abs(v - 2 / math.sqrt(math.pi)) < 1e-12


def test_mc_at_k0_is_exact(ctx_a2):
    est = mm_monte_carlo(ctx_a2.rs, 0, 100_000, seed=5, shards=8)
    assert est.mean == 1.0
    assert est.std_error == 0.0


def test_mc_determinism(ctx_b2):
    a = mm_monte_carlo(ctx_b2.rs, 0.5, 120_000, seed=9, shards=8)
    b = mm_monte_carlo(ctx_b2.rs, 0.5, 120_000, seed=9, shards=8)
    assert a == b
    c = mm_monte_carlo(ctx_b2.rs, 0.5, 120_000, seed=10, shards=8)
    assert c.mean != a.mean


def test_mc_thread_count_does_not_change_result(ctx_a2):
    a = mm_monte_carlo(ctx_a2.rs, 0.5, 150_000, seed=3, shards=8, threads=1)
    b = mm_monte_carlo(ctx_a2.rs, 0.5, 150_000, seed=3, shards=8, threads=4)
    assert a == b


def test_mc_matches_gamma_product():
    # A1 at k=1/2 -> 2/sqrt(pi); A2 at k=1/2 -> 3/sqrt(pi)
    for label, k, target in [("A1", 0.5, 2 / math.sqrt(math.pi)),
                             ("A2", 0.5, 3 / math.sqrt(math.pi))]:
        ctx = group_context(label)
        est = mm_monte_carlo(ctx.rs, k, SAMPLES, seed=42, shards=16)
        assert abs(est.mean - target) <= 4 * est.std_error


def test_mc_matches_exact_moment_at_k1(ctx_a2):
    # the statistical path against the exact pairing-recursion value F(1) = 12
    target = float(mm_exact(ctx_a2.rs, 1))
    est = mm_monte_carlo(ctx_a2.rs, 1.0, 10 ** 6, seed=77, shards=16)
    assert abs(est.mean - target) <= 4 * est.std_error


def test_mc_monotone_in_k(ctx_a2):
    e0 = mm_monte_carlo(ctx_a2.rs, 0, SAMPLES, seed=17, shards=8)
    e1 = mm_monte_carlo(ctx_a2.rs, 0.5, SAMPLES, seed=18, shards=8)
    e2 = mm_monte_carlo(ctx_a2.rs, 1.0, SAMPLES, seed=19, shards=8)
    band = 4 * math.hypot(e1.std_error, e2.std_error)
    assert e0.mean < e1.mean - 4 * e1.std_error
    assert e1.mean < e2.mean - band


def test_functional_equation_exact_path(ctx_a2):
    b = b_poly(ctx_a2.rs, ctx_a2.degrees).computed
    rep = check_functional_equation(ctx_a2.rs, b, 0, SAMPLES, seed=1)
    assert rep.exact and rep.passed
    # b(0) = |W| prod (d_i - 1)! = 6 * 1 * 2 = 12 = F(1)
    assert rep.lhs == 12.0 and rep.rhs == 12.0


def test_functional_equation_statistical(ctx_a1, ctx_b2):
    for ctx, k in [(ctx_a1, rat(1, 2)), (ctx_b2, rat(1, 4))]:
        b = b_poly(ctx.rs, ctx.degrees).computed
        rep = check_functional_equation(ctx.rs, b, k, SAMPLES, seed=6)
        assert not rep.exact
        assert rep.passed, rep


def test_functional_equation_a1_band(ctx_a1):
    # b(1/2) = 4 and F(3/2)/F(1/2) = 4
    b = b_poly(ctx_a1.rs, ctx_a1.degrees).computed
    assert float(b(rat(1, 2))) == 4.0
    rep = check_functional_equation(ctx_a1.rs, b, rat(1, 2), SAMPLES, seed=2)
    assert abs(rep.z_score) <= 4


def test_gamma_cross_check_rank1(ctx_a1):
    rs = ctx_a1.rs
    u2 = MultiPoly.variable(rs, 0, 2)
    one = MultiPoly.one(rs)
    # k=0: plain Gaussian moment E[u^2] = 2, exactly the pairing value
    rep = gamma_integral_cross_check(rs, u2, one, 0, SAMPLES, seed=11)
    assert rep.exact_value == 2.0
    assert rep.passed
    rep = gamma_integral_cross_check(rs, u2, one, rat(1, 2), SAMPLES, seed=12)
    assert rep.exact_value == 4.0   # 2(1 + 2k) at k = 1/2
    assert rep.passed


def test_gamma_cross_check_trivial_pair(ctx_a2):
    one = MultiPoly.one(ctx_a2.rs)
    rep = gamma_integral_cross_check(ctx_a2.rs, one, one, rat(1, 2),
                                     50_000, seed=13)
    assert rep.exact_value == 1.0
    assert rep.estimate == 1.0 and rep.passed


def test_log_moments(ctx_a1, ctx_a2):
    rep = mm_log_moments(ctx_a1.rs, SAMPLES, seed=21, shards=8)
    assert abs(rep.target - (-EULER_GAMMA)) < 1e-12
    assert rep.passed, rep
    rep = mm_log_moments(ctx_a2.rs, SAMPLES, seed=22, shards=8,
                         dd=ctx_a2.degrees)
    assert abs(rep.target - (-3 * EULER_GAMMA)) < 1e-12
    assert rep.passed, rep
    # second-moment target (pi^2/6) * sum(d_i^2 - 1) = (pi^2/6) * 11
    assert abs(rep.variance_target - (math.pi ** 2 / 6) * 11) < 1e-12


def test_estimate_records_metadata(ctx_a1):
    est = mm_monte_carlo(ctx_a1.rs, 0.25, 10_000, seed=33, shards=4)
    assert est.samples == 10_000 and est.seed == 33 and est.shards == 4
    assert est.rejected == 0


def test_predicted_relative_se(ctx_a1):
    dd = ctx_a1.degrees
    # rank 1: per-sample relative variance at k is F(2k)/F(k)^2 - 1
    f1 = gamma_product_rhs(dd, 1)
    f2 = gamma_product_rhs(dd, 2)
    expect = math.sqrt((float(f2) / float(f1) ** 2 - 1) / 10 ** 6)
    assert abs(predicted_relative_se(dd, 1.0, 10 ** 6) - expect) < 1e-9
    # the prediction tracks the realized standard error within a small factor
    est = mm_monte_carlo(ctx_a1.rs, 0.5, 200_000, seed=44, shards=8)
    pred = predicted_relative_se(dd, 0.5, 200_000)
    realized = est.std_error / est.mean
    assert 0.5 < realized / pred < 2.0
    # log-space evaluation survives ranges where the moment itself overflows
    h3 = group_context("H3").degrees
    assert math.exp(log_gamma_product(h3, 1.5)) == pytest.approx(
        float(gamma_product_rhs(h3, 1.5)))
    assert log_gamma_product(h3, 12.0) > 600   # F(12) itself overflows float64
    assert predicted_relative_se(h3, 6.0, 10 ** 7) > 1e20
    assert predicted_relative_se(h3, 1.5, 10 ** 7) > 0.02
