import random

import pytest

from coxdunkl.dunkl import (BFactorization, DunklDirection, b_poly, beta_form,
                            closed_form_b, closed_form_b_string, dunkl_apply,
                            dunkl_apply_omega, dunkl_apply_root,
                            dunkl_laplacian, gamma_form, gaussian_exponential,
                            verify_algebra_relations)
from coxdunkl.errors import BudgetError
from coxdunkl.polynomials import MultiPoly, build_discriminant
from coxdunkl.scalars import KPoly, rat
from coxdunkl.suite import group_context

from conftest import random_multipoly


def kp(rs, coeffs):
    return KPoly.from_coeffs(rs.spec, coeffs)


def test_rank1_dunkl_values(ctx_a1):
    rs = ctx_a1.rs
    one = MultiPoly.one(rs)
    u = MultiPoly.variable(rs, 0)
    assert dunkl_apply_omega(rs, 0, one).is_zero()
    assert dunkl_apply_omega(rs, 0, u) == MultiPoly.constant(rs, kp(rs, [1, 2]))
    assert dunkl_apply_omega(rs, 0, u * u) == u * 2


def test_direction_pairings_match_coordinates(ctx_b2):
    rs = ctx_b2.rs
    for i in range(rs.rank):
        d = DunklDirection.omega(rs, i)
        for a, root in enumerate(rs.positive_roots):
            assert d.pairings[a] == root[i].co


def test_dunkl_lowers_degree_and_raises_k(ctx_a2):
    rs = ctx_a2.rs
    rng = random.Random(21)
    for _ in range(20):
        f = random_multipoly(rs, rng, max_degree=5, homogeneous=True)
        g = dunkl_apply_omega(rs, rng.randrange(rs.rank), f)
        if g.is_zero():
            continue
        assert g.degree() == f.degree() - 1
        kdeg = max(len(v) - 1 for v in g.terms.values())
        assert kdeg <= 1


def test_algebra_relations():
    for label in ("A1", "A2", "B2"):
        ctx = group_context(label)
        rep = verify_algebra_relations(ctx.rs, degree_cap=4, trials=15, seed=3)
        assert rep.ok, rep.failures


def test_beta_rank1_values(ctx_a1):
    rs = ctx_a1.rs
    one = MultiPoly.one(rs)
    u = MultiPoly.variable(rs, 0)
    assert beta_form(one, one) == KPoly.one(rs.spec)
    assert beta_form(u, u * u).is_zero()
    assert beta_form(u, u) == kp(rs, [2, 4])     # 2(2k+1)


def test_beta_symmetry_and_invariance(ctx_a2, ctx_b2):
    for ctx in (ctx_a2, ctx_b2):
        rs = ctx.rs
        rng = random.Random(31)
        for _ in range(20):
            f = random_multipoly(rs, rng, max_degree=4)
            g = random_multipoly(rs, rng, max_degree=4)
            assert beta_form(f, g) == beta_form(g, f)
            # invariance under the simple reflections
            from coxdunkl.polynomials import apply_reflection
            for i in range(rs.rank):
                assert beta_form(apply_reflection(f, i),
                                 apply_reflection(g, i)) == beta_form(f, g)


def test_beta_contravariance(ctx_a2):
    rs = ctx_a2.rs
    rng = random.Random(32)
    for _ in range(20):
        f = random_multipoly(rs, rng, max_degree=4)
        g = random_multipoly(rs, rng, max_degree=4)
        for j in range(rs.rank):
            uj_g = MultiPoly.variable(rs, j) * g
            assert beta_form(dunkl_apply_root(rs, j, f), g) == \
                beta_form(f, uj_g)


def test_beta_degree_orthogonality(ctx_b2):
    rs = ctx_b2.rs
    rng = random.Random(33)
    for _ in range(20):
        f = random_multipoly(rs, rng, max_degree=5, homogeneous=True)
        g = random_multipoly(rs, rng, max_degree=5, homogeneous=True)
        if f.degree() != g.degree():
            assert beta_form(f, g).is_zero()


def test_laplacian_values(ctx_a1, ctx_a2):
    rs = ctx_a1.rs
    u = MultiPoly.variable(rs, 0)
    assert dunkl_laplacian(MultiPoly.one(rs)).is_zero()
    assert dunkl_laplacian(u * u) == MultiPoly.constant(rs, kp(rs, [4, 8]))
    for ctx in (ctx_a2,):
        delta = build_discriminant(ctx.rs)
        assert dunkl_laplacian(delta).is_zero()


def test_laplacian_basis_independent(ctx_b2):
    # sum_j T_{omega_j} y_{alpha_j} must equal sum_{j,l} G_{jl} T_{omega_j} T_{omega_l}
    rs = ctx_b2.rs
    rng = random.Random(34)
    for _ in range(10):
        f = random_multipoly(rs, rng, max_degree=4)
        direct = dunkl_laplacian(f)
        acc = MultiPoly.zero(rs)
        for j in range(rs.rank):
            for l in range(rs.rank):
                g = rs.gram[j][l]
                if not g:
                    continue
                acc = acc + dunkl_apply_omega(
                    rs, j, dunkl_apply_omega(rs, l, f)).scale(g)
        assert direct == acc


def test_gamma_values(ctx_a1):
    rs = ctx_a1.rs
    one = MultiPoly.one(rs)
    u = MultiPoly.variable(rs, 0)
    assert gamma_form(one, one) == KPoly.one(rs.spec)
    assert gamma_form(u * u, one) == kp(rs, [2, 4])   # 2(1+2k)


def test_gamma_equals_beta_on_discriminant():
    for label in ("A1", "A2", "B2"):
        rs = group_context(label).rs
        delta = build_discriminant(rs)
        # exp of the Laplacian fixes the discriminant, so the two pairings agree
        assert gaussian_exponential(delta) == delta
        assert gamma_form(delta, delta) == beta_form(delta, delta)


def test_gamma_contravariance(ctx_a2):
    # gamma((x_a - y_a) f, g) == gamma(f, y_a g) for root directions a
    rs = ctx_a2.rs
    rng = random.Random(35)
    for _ in range(12):
        f = random_multipoly(rs, rng, max_degree=3)
        g = random_multipoly(rs, rng, max_degree=3)
        for j in range(rs.rank):
            lhs = gamma_form(MultiPoly.variable(rs, j) * f
                             - dunkl_apply_root(rs, j, f), g)
            rhs = gamma_form(f, dunkl_apply_root(rs, j, g))
            assert lhs == rhs


def test_b_poly_small_closed_forms():
    a1 = group_context("A1")
    res = b_poly(a1.rs, a1.degrees)
    assert res.computed == kp(a1.rs, [2, 4])          # 2(2k+1)
    assert res.equal and res.roots_exact

    a2 = group_context("A2")
    res = b_poly(a2.rs, a2.degrees)
    # 6(2k+1)(3k+1)(3k+2) = 108k^3 + 162k^2 + 78k + 12
    assert res.computed == kp(a2.rs, [12, 78, 162, 108])
    assert res.equal and res.roots_exact
    assert closed_form_b_string(a2.degrees) == "6*(2k+1)*(3k+1)*(3k+2)"

    i24 = group_context("I2(4)")
    res = b_poly(i24.rs, i24.degrees)
    assert res.equal and res.roots_exact
    assert closed_form_b_string(i24.degrees) == "8*(2k+1)*(4k+1)*(4k+2)*(4k+3)"
    # root multiset: -1/4, -1/2 (twice), -3/4
    assert res.factorization.roots == ((rat(1, 4), 1), (rat(1, 2), 2),
                                       (rat(3, 4), 1))


def test_b_poly_degree_is_reflection_count():
    for label in ("A2", "B2", "A3", "I2(6)"):
        ctx = group_context(label)
        res = b_poly(ctx.rs, ctx.degrees)
        assert res.computed.degree == ctx.rs.num_positive


def test_b_poly_matches_generic_beta_form():
    # the operator-product route must agree with the monomial expansion route
    for label in ("A1", "A2", "B2"):
        ctx = group_context(label)
        delta = build_discriminant(ctx.rs)
        assert beta_form(delta, delta) == b_poly(ctx.rs, ctx.degrees).computed


def test_b_poly_factorization_expands_back(ctx_a2):
    res = b_poly(ctx_a2.rs, ctx_a2.degrees)
    assert res.factorization.expand(ctx_a2.rs.spec) == res.computed
    assert res.factorization.b0.sign() > 0


def test_b_poly_heavy_gate():
    b4 = group_context("B4")
    with pytest.raises(BudgetError):
        b_poly(b4.rs, b4.degrees)


def test_beta_zero_positive_definite(ctx_a2):
    # Gram matrix of the k=0 pairing on monomials of degree <= 4
    rs = ctx_a2.rs
    monomials = []
    for d in range(5):
        for e1 in range(d + 1):
            monomials.append(
                MultiPoly.from_terms(rs, {(e1, d - e1): 1}))
    n = len(monomials)
    gram = [[beta_form(monomials[i], monomials[j])(0).rational()
             for j in range(n)] for i in range(n)]
    # leading principal minors by fraction-free Gaussian elimination
    from fractions import Fraction
    mat = [[Fraction(int(x.numerator), int(x.denominator)) for x in row]
           for row in gram]
    det = Fraction(1)
    for i in range(n):
        # pivot must be positive after elimination for positive definiteness
        pivot = mat[i][i]
        assert pivot > 0, f"minor {i+1} not positive"
        for r2 in range(i + 1, n):
            factor = mat[r2][i] / pivot
            for c2 in range(i, n):
                mat[r2][c2] -= factor * mat[i][c2]
