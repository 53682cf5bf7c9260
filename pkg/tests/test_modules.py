"""Module layer: bracket fractions, exp/log coefficients (both routes),
convergence data, degree bounds, certified evaluation."""

import random
from fractions import Fraction
from math import inf as INF

import pytest

from drinfeld.errors import InvalidInput, OutsideRadius
from drinfeld.ff import FieldParams
from drinfeld.laurent import SeriesParams
from drinfeld.modules import (BracketFrac, DrinfeldModule, _den_elem,
                              bracket, carlitz)
from drinfeld.partitions import ShadowedPartition, enumerate_partitions

CTX2 = SeriesParams(FieldParams.make(2), 1, 48)
CTX3 = SeriesParams(FieldParams.make(3), 1, 48)
CTX3W = SeriesParams(FieldParams.make(3), 2, 64)


def rank2_q3(ctx=CTX3):
    # generic-looking exact coefficients
    return DrinfeldModule(ctx, [ctx.theta(), ctx.theta() + ctx.one()])


def rank2_q2(ctx=CTX2):
    return DrinfeldModule(ctx, [ctx.one(), ctx.one()])


def rank3_q2(ctx=CTX2):
    return DrinfeldModule(ctx, [ctx.one(), ctx.one(), ctx.one()])


# -- bracket fractions --

def test_bracket_values():
    b1 = bracket(CTX2, 1)
    assert b1 == CTX2.theta(2) - CTX2.theta()
    b2 = bracket(CTX3, 2)
    assert b2 == CTX3.theta(9) - CTX3.theta()
    with pytest.raises(InvalidInput):
        bracket(CTX2, 0)


def test_den_expansion_matches_plain_power():
    for ctx, e, mult in [(CTX3, 1, 5), (CTX2, 2, 7), (CTX3, 1, 9)]:
        assert _den_elem(ctx, ((e, mult),)) == bracket(ctx, e).pow(mult)


def test_frac_arithmetic_and_equality():
    ctx = CTX3
    th = ctx.theta()
    a = BracketFrac(ctx, th, {1: 1})
    b = BracketFrac(ctx, ctx.one(), {2: 1})
    s = a + b
    # theta/[1] + 1/[2] = (theta [2] + [1]) / ([1][2])
    want = BracketFrac(ctx, th * bracket(ctx, 2) + bracket(ctx, 1),
                       {1: 1, 2: 1})
    assert s.equals(want)
    p = a * b
    assert p.equals(BracketFrac(ctx, th, {1: 1, 2: 1}))
    assert (a - a).is_exact_zero()
    assert not a.equals(b)


def test_frac_pow_q_scales_denominator():
    ctx = CTX3
    a = BracketFrac(ctx, ctx.theta(), {1: 2})
    t = a.pow_q(1)
    assert t.den == {1: 6}
    assert t.num == ctx.theta().pow_q(1)
    # (x/[1]^2)^q * [1]^(2q) == x^q exactly
    lift = t.num
    assert t._lift({1: 6}) == lift
    with pytest.raises(InvalidInput):
        a.pow_q(-1)


def test_frac_deg():
    ctx = CTX3
    a = BracketFrac(ctx, ctx.theta(2), {1: 1, 2: 1})
    assert a.deg() == 2 - 3 - 9
    assert BracketFrac.zero(ctx).deg() is None


def test_frac_to_laurent_cap_discipline():
    ctx = CTX3
    a = BracketFrac(ctx, ctx.one(), {1: 2})
    x = a.to_laurent(30)
    assert x.cap == 30
    # residual of x * [1]^2 - 1 vanishes below the certified window
    res = x * bracket(ctx, 1).pow(2) - ctx.one()
    assert not res.coeffs
    # doubling the cap and truncating back is byte-identical
    y = a.to_laurent(60).truncate(30)
    assert x == y


# -- coefficients: closed form vs recurrence --

def test_carlitz_coefficients_explicit():
    q = 3
    phi = carlitz(CTX3)
    alpha = phi.exp_coeffs(5)
    beta = phi.log_coeffs(5)
    for n in range(6):
        dn = {n - j: q ** j for j in range(n)}
        assert alpha[n].equals(BracketFrac(CTX3, CTX3.one(), dn))
        ln = {k: 1 for k in range(1, n + 1)}
        num = CTX3.one() if n % 2 == 0 else -CTX3.one()
        assert beta[n].equals(BracketFrac(CTX3, num, ln))


@pytest.mark.parametrize("make,depth", [
    (lambda: carlitz(CTX2), 7),
    (lambda: carlitz(CTX3), 6),
    (rank2_q2, 6),
    (rank2_q3, 5),
    (rank3_q2, 6),
    (lambda: DrinfeldModule(CTX2, [CTX2.zero(), CTX2.one()]), 8),
])
def test_routes_agree(make, depth):
    phi = make()
    a1 = phi.exp_coeffs(depth, "partitions")
    a2 = phi.exp_coeffs(depth, "recurrence")
    b1 = phi.log_coeffs(depth, "partitions")
    b2 = phi.log_coeffs(depth, "recurrence")
    for n in range(depth + 1):
        assert a1[n].equals(a2[n]), "exp coefficient %d" % n
        assert b1[n].equals(b2[n]), "log coefficient %d" % n


@pytest.mark.parametrize("make", [lambda: carlitz(CTX3), rank2_q2, rank2_q3,
                                  rank3_q2])
def test_composition_inverts(make):
    assert make().compose_check(6)


def test_rank2_worked_third_coefficients():
    ctx = CTX3
    phi = rank2_q3(ctx)
    q = 3
    A1, A2 = phi.A
    a1c = A1 * A1.pow_q(1) * A1.pow_q(2)      # A_1^(q^2+q+1)

    t1 = BracketFrac(ctx, -a1c, {1: 1, 2: 1, 3: 1})
    t2 = BracketFrac(ctx, A1 * A2.pow_q(1), {1: 1, 3: 1})
    t3 = BracketFrac(ctx, A1.pow_q(2) * A2, {2: 1, 3: 1})
    beta3 = phi.log_coeffs(3)[3]
    assert beta3.equals(t1 + t2 + t3)

    s1 = BracketFrac(ctx, a1c, {3: 1, 2: q, 1: q * q})
    s2 = BracketFrac(ctx, A1.pow_q(2) * A2, {1: q * q, 3: 1})
    s3 = BracketFrac(ctx, A1 * A2.pow_q(1), {2: q, 3: 1})
    alpha3 = phi.exp_coeffs(3)[3]
    assert alpha3.equals(s1 + s2 + s3)


def test_rank3_adds_one_term_at_depth_three():
    ctx = CTX2
    two = rank2_q2(ctx)
    three = rank3_q2(ctx)
    A3 = three.A[2]
    d_exp = three.exp_coeffs(3)[3] - two.exp_coeffs(3)[3]
    assert d_exp.equals(BracketFrac(ctx, A3, {3: 1}))
    d_log = three.log_coeffs(3)[3] - two.log_coeffs(3)[3]
    assert d_log.equals(BracketFrac(ctx, -A3, {3: 1}))


def test_per_partition_terms_rank2_depth3():
    phi = rank2_q2()
    parts = enumerate_partitions(2, 3)
    assert len(parts) == 3
    total = BracketFrac.zero(CTX2)
    for sp in parts:
        total = total + phi.log_term(sp)
    assert total.equals(phi.log_coeffs(3)[3])


# -- convergence data --

def test_convergence_known_values():
    c2 = carlitz(CTX2).convergence_data()
    assert (c2.s, c2.logq_R, c2.strict) == (1, 2, True)
    c3 = carlitz(CTX3).convergence_data()
    assert c3.logq_R == Fraction(3, 2)
    r2 = rank2_q2().convergence_data()
    assert (r2.s, r2.logq_R, r2.strict) == (2, Fraction(4, 3), True)
    r3 = rank3_q2().convergence_data()
    assert (r3.s, r3.logq_R) == (3, Fraction(8, 7))
    # deg A_1 = deg A_2 = 1 over q=2 ties rho at -1
    tie = DrinfeldModule(CTX2, [CTX2.theta(), CTX2.theta()]).convergence_data()
    assert (tie.s, tie.strict, tie.logq_R) == (1, False, 1)


def test_gapped_support_ignores_zero_coefficient():
    phi = DrinfeldModule(CTX2, [CTX2.zero(), CTX2.one()])
    assert phi.support == (2,)
    conv = phi.convergence_data()
    assert conv.s == 2 and conv.logq_R == Fraction(4, 3)
    # odd-depth exp coefficients vanish
    assert phi.exp_coeffs(5)[3].is_exact_zero()
    assert not phi.exp_coeffs(5)[4].is_exact_zero()


def test_partition_norm_decomposition_identity():
    """The closed-form norm of each summand splits, for any anchor i in
    the support, into (q^n-1)/(q^i-1)(deg A_i - q^i) plus the weighted
    mu-corrections."""
    for phi, n in [(rank2_q2(), 5), (rank2_q3(), 4), (rank3_q2(), 6)]:
        q = phi.ctx.q
        conv = phi.convergence_data()
        for sp in enumerate_partitions(phi.r, n, support=phi.support):
            w = sp.weights(q)
            val = phi.partition_norm_logq(sp)
            for i in phi.support:
                anchor = Fraction(q ** n - 1, q ** i - 1) * (
                    phi.A[i - 1].deg() - q ** i)
                corr = sum((q ** k - 1) * w[k - 1] * conv.mu(i, k)
                           for k in phi.support)
                assert val == anchor + corr


def test_norm_bound_from_radius():
    # log_q|beta_n| <= (q^n - 1) rho, with rho = -logq_R
    for phi in (carlitz(CTX3), rank2_q2(), rank3_q2()):
        conv = phi.convergence_data()
        beta = phi.log_coeffs(6)
        for n in range(1, 7):
            if beta[n].is_exact_zero():
                continue
            assert beta[n].deg() <= (phi.ctx.q ** n - 1) * (-conv.logq_R)


def test_exp_degree_bound_tight_for_carlitz():
    phi = carlitz(CTX3)
    alpha = phi.exp_coeffs(5)
    for n in range(6):
        assert phi.exp_deg_bound(n) == alpha[n].deg() == -n * 3 ** n


def test_exp_degree_bound_majorizes():
    for phi in (rank2_q2(), rank2_q3(), rank3_q2()):
        alpha = phi.exp_coeffs(6)
        for n in range(7):
            if not alpha[n].is_exact_zero():
                assert alpha[n].deg() <= phi.exp_deg_bound(n)


# -- evaluation --

def test_carlitz_exp_matches_direct_sum():
    ctx = CTX2
    phi = carlitz(ctx)
    xi = ctx.theta(-1) + ctx.one()
    got = phi.exp_eval(xi, ucap=40)
    # independent accumulation: sum xi^(q^n) / D_n with plain products
    total = ctx.zero(INF)
    xq = xi
    dn = ctx.one()
    for n in range(12):
        if n:
            xq = xq.pow_q(1)
            dn = bracket(ctx, n) * dn.pow_q(1)
        total = total + (xq * dn.truncate(dn.val + 64).invert()).truncate(40)
    assert (got - total).is_zero_to_prec()
    assert got.cap == 40


@pytest.mark.parametrize("make,xis", [
    (rank2_q2, ["one", "inv", "inv2"]),
    (lambda: carlitz(CTX3), ["inv", "inv2"]),
    (rank3_q2, ["inv"]),
])
def test_log_exp_roundtrip(make, xis):
    phi = make()
    ctx = phi.ctx
    table = {"one": ctx.one(), "inv": ctx.theta(-1),
             "inv2": ctx.theta(-2) + ctx.theta(-3)}
    for name in xis:
        xi = table[name]
        cap = 36
        ex = phi.exp_eval(xi, ucap=cap)
        back = phi.log_eval(ex, ucap=cap)
        assert (back - xi).is_zero_to_prec()
        assert (back - xi).cap >= cap
        lg = phi.log_eval(xi, ucap=cap)
        again = phi.exp_eval(lg, ucap=cap)
        assert (again - xi).is_zero_to_prec()


def test_exp_functional_equation_numeric():
    for phi in (rank2_q2(), rank2_q3()):
        ctx = phi.ctx
        xi = ctx.theta(-1)
        cap = 30
        lhs = phi.exp_eval(ctx.theta() * xi, ucap=cap)
        rhs = phi.phi_action(phi.exp_eval(xi, ucap=cap)).truncate(cap)
        assert (lhs - rhs).is_zero_to_prec()


def test_log_functional_equation_numeric():
    phi = rank2_q2()
    ctx = phi.ctx
    xi = ctx.theta(-2)
    cap = 30
    lhs = phi.log_eval(phi.phi_action(xi), ucap=cap)
    rhs = (ctx.theta() * phi.log_eval(xi, ucap=cap)).truncate(cap)
    assert (lhs - rhs).is_zero_to_prec()


def test_exp_is_entire_log_is_not():
    phi = rank2_q2()
    ctx = phi.ctx
    big = ctx.theta(3)
    out = phi.exp_eval(big, ucap=10)
    assert out.coeffs  # converges and is nonzero
    with pytest.raises(OutsideRadius) as ei:
        phi.log_eval(big, ucap=10)
    assert "logq_R" in str(ei.value)


def test_eval_doubling_is_byte_identical():
    for phi in (rank2_q2(), carlitz(CTX3)):
        ctx = phi.ctx
        xi = ctx.theta(-1) + ctx.one() if phi.r == 2 else ctx.theta(-1)
        for cap in (24, 33):
            a = phi.exp_eval(xi, ucap=cap)
            b = phi.exp_eval(xi, ucap=2 * cap).truncate(cap)
            assert a == b
            la = phi.log_eval(xi, ucap=cap)
            lb = phi.log_eval(xi, ucap=2 * cap).truncate(cap)
            assert la == lb


def test_module_validation():
    with pytest.raises(InvalidInput):
        DrinfeldModule(CTX2, [])
    with pytest.raises(InvalidInput):
        DrinfeldModule(CTX2, [CTX2.zero()])
    with pytest.raises(InvalidInput):
        DrinfeldModule(CTX2, [CTX2.zero(cap=5), CTX2.one()])


def test_phi_action_values():
    phi = rank2_q2()
    ctx = phi.ctx
    x = ctx.theta(-1)
    # theta x + x^2 + x^4 at x = 1/theta
    want = ctx.one() + ctx.theta(-2) + ctx.theta(-4)
    assert phi.phi_action(x) == want
