"""The t-deformation layer: partition summands as rationals in t, the
b-sequence by three routes, the deformed logarithm, the Anderson
generating function with its pole at theta split off exactly, and the
main identity checks tying them together.

All objects keep exact pole data; series truncations carry certified
u-caps and an explicit t-window, so every reported identity comes with
the precision below which its residual provably vanishes.
"""

from fractions import Fraction
from math import inf as INF

from .errors import (CompatPreconditionFailed, InvalidInput,
                     PrecisionExhausted, RamificationError)
from .laurent import LaurentElem
from .modules import BracketFrac, DrinfeldModule, bracket, carlitz
from .partitions import enumerate_partitions
from .tate import (TateRational, TateSeries, ThetaPoleForm, apply_delta,
                   geometric_pole_series)


def _iter_bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def x_phi(phi: DrinfeldModule, sp):
    """The summand attached to one shadowed partition:
    prod_i prod_{j in S_i} A_i^(q^j) / (t - theta^(q^(i+j))).

    In a valid partition the pole exponents i+j never repeat (two pairs
    with the same sum would overlap at cell i+j-1), so the poles are
    simple."""
    ctx = phi.ctx
    num = ctx.one()
    poles = {}
    for i, mask in enumerate(sp.masks, start=1):
        for j in _iter_bits(mask):
            num = num * phi.A[i - 1].pow_q(j)
            e = i + j
            poles[e] = poles.get(e, 0) + 1
    return TateRational(ctx, TateSeries.from_scalar(ctx, num), poles)


def eval_theta_frac(phi, f: TateRational):
    """Exact value of a t-rational at t = theta as a bracket fraction
    (theta - theta^(q^e) = -[e])."""
    ctx = phi.ctx
    num = f.numer.eval(ctx.theta())
    sign = sum(m for _, m in f.poles)
    if sign % 2:
        num = -num
    return BracketFrac(ctx, num, dict(f.poles))


B_ROUTES = ("definition", "twist", "untwisted")


def b_seq(phi: DrinfeldModule, n, route="definition"):
    """b_0 .. b_n as exact rationals in t.

    definition: sum of partition summands.
    twist:      b_m = sum_k A_k/(t - theta^(q^k)) * b_(m-k)^((k)).
    untwisted:  b_m = sum_k A_k^(q^(m-k))/(t - theta^(q^m)) * b_(m-k).
    """
    ctx = phi.ctx
    one = TateRational(ctx, TateSeries.from_scalar(ctx, ctx.one()))
    if route not in B_ROUTES:
        raise InvalidInput("unknown route %r" % route)
    out = [one]
    for m in range(1, n + 1):
        if route == "definition":
            acc = TateRational(ctx, TateSeries.zero(ctx))
            for sp in enumerate_partitions(phi.r, m, support=phi.support):
                acc = acc + x_phi(phi, sp)
        elif route == "twist":
            acc = TateRational(ctx, TateSeries.zero(ctx))
            for k in phi.support:
                if k > m:
                    continue
                factor = TateRational(
                    ctx, TateSeries.from_scalar(ctx, phi.A[k - 1]), {k: 1})
                acc = acc + factor * out[m - k].twist(k)
        else:
            acc = TateRational(ctx, TateSeries.zero(ctx))
            for k in phi.support:
                if k > m:
                    continue
                factor = TateRational(
                    ctx,
                    TateSeries.from_scalar(ctx, phi.A[k - 1].pow_q(m - k)),
                    {m: 1})
                acc = acc + factor * out[m - k]
        out.append(acc)
    return out


def carlitz_bseq_product(ctx, n):
    """Rank-1, A_1 = 1: b_n = prod_{e=1..n} 1/(t - theta^(q^e)).  A
    closed product independent of the partition machinery."""
    return [TateRational(ctx, TateSeries.from_scalar(ctx, ctx.one()),
                         {e: 1 for e in range(1, m + 1)})
            for m in range(n + 1)]


class DeformedLog:
    """sum_n b_n(t) xi^(q^n), cut so that the dropped tail has u-valuation
    >= ucap in every t-coefficient (Gauss-norm bound
    log_q||b_n xi^(q^n)|| <= (q^n - 1) rho + q^n deg xi)."""

    def __init__(self, phi: DrinfeldModule, xi: LaurentElem, ucap,
                 route="definition"):
        ctx = phi.ctx
        self.phi = phi
        self.xi = xi
        self.ucap = ucap
        if xi.is_exact_zero():
            self.cut = 0
            self.terms = []
            return
        if not xi.coeffs:
            phi.log_tail_cut(Fraction(-xi.cap, ctx.m), xi.cap)
            self.cut = 0
            self.terms = []
            self.ucap = min(ucap, xi.cap)
            return
        self.cut = phi.log_tail_cut(xi.deg(), ucap)
        seq = b_seq(phi, self.cut - 1, route)
        self.terms = []
        xq = xi
        for n in range(self.cut):
            if n:
                xq = xq.pow_q(1)
            self.terms.append(seq[n] * xq)

    def series(self, t_prec):
        ctx = self.phi.ctx
        out = TateSeries.zero(ctx, t_prec)
        for term in self.terms:
            out = out + term.to_series(t_prec)
        return out.truncate_u(self.ucap)

    def eval_theta(self):
        """Value at t = theta via exact per-term rationals; agrees with
        log_phi(xi) termwise."""
        ctx = self.phi.ctx
        total = ctx.zero(INF)
        for term in self.terms:
            total = total + eval_theta_frac(self.phi, term).to_laurent(self.ucap)
        return total.truncate(self.ucap)

    def twist_eval_theta(self, j):
        """Value of the j-fold twisted sum at t = theta; the certified
        cap scales by q^j along with the tail bound."""
        if j < 0:
            raise InvalidInput("twist index must be >= 0")
        ctx = self.phi.ctx
        cap = self.ucap * ctx.q ** j
        total = ctx.zero(INF)
        for term in self.terms:
            tw = term.twist(j)
            total = total + eval_theta_frac(self.phi, tw).to_laurent(cap)
        return total.truncate(cap)


class AGFValue:
    """Partial-fraction form of the generating function at u:
    u/(theta - t) + sum_{n>=1} alpha_n u^(q^n)/(theta^(q^n) - t),
    kept as (simple pole at theta with residue -u) + rationals whose
    poles all lie outside the unit disk."""

    def __init__(self, phi: DrinfeldModule, u: LaurentElem, ucap,
                 route="partitions"):
        ctx = phi.ctx
        self.phi = phi
        self.u = u
        self.ucap = ucap
        if u.is_exact_zero():
            self.cut = 0
            self.terms = []
            self.residue = u
            return
        d = u.deg() if u.coeffs else Fraction(-u.cap, ctx.m)
        self.cut = phi.exp_tail_cut(d - 1, ucap)
        alpha = phi.exp_coeffs(self.cut - 1, route)
        self.terms = []
        uq = u
        for n in range(1, self.cut):
            uq = uq.pow_q(1)
            num = -(alpha[n].num * uq)
            frac = BracketFrac(ctx, num, alpha[n].den)
            self.terms.append(
                TateRational(ctx,
                             TateSeries.from_scalar(ctx, frac.to_laurent(ucap)),
                             {n: 1}))
        self.residue = -u

    def residue_at_theta(self):
        return self.residue

    def theta_pole_form(self, t_prec):
        ctx = self.phi.ctx
        reg = TateSeries.zero(ctx, t_prec)
        for term in self.terms:
            reg = reg + term.to_series(t_prec)
        return ThetaPoleForm(reg.truncate_u(self.ucap), self.residue)


def agf(phi, u, ucap, route="partitions"):
    return AGFValue(phi, u, ucap, route)


def delta_phi(phi: DrinfeldModule):
    """Coefficients of the operator A_r tau^r + ... + A_1 tau - (t - theta)
    in the form consumed by apply_delta."""
    ctx = phi.ctx
    g0 = TateSeries.t_poly(ctx, [ctx.theta(), -ctx.one()])
    return [g0] + list(phi.A)


def shift_precondition_violations(phi: DrinfeldModule, xi):
    """The shift identity needs |A_i xi^(q^i)| < R for 0 <= i <= r, with
    A_0 = theta.  Returns (i, offending log_q value, logq_R) triples."""
    conv = phi.convergence_data()
    d = xi.deg()
    if d is None:
        return []
    out = []
    if 1 + d >= conv.logq_R:
        out.append((0, 1 + d, conv.logq_R))
    for i in range(1, phi.r + 1):
        if phi.A[i - 1].is_exact_zero():
            continue
        v = phi.A[i - 1].deg() + phi.ctx.q ** i * d
        if v >= conv.logq_R:
            out.append((i, v, conv.logq_R))
    return out


def shifted_deformed_log(phi, series_xi_pair, t_prec):
    """One application of the shift identity: from (L(xi) series, xi)
    produce (L(phi_t(xi)) series, phi_t(xi)) without re-summing."""
    s, xi = series_xi_pair
    ctx = phi.ctx
    lin = TateSeries.t_poly(ctx, [-ctx.theta(), ctx.one()])
    shifted = s.shift_t(1).truncate_t(s.t_prec) - (
        lin * TateSeries.from_scalar(ctx, xi)).truncate_t(s.t_prec)
    return shifted, phi.phi_action(xi)


def _report(ok, u_val, t_prec=None):
    rep = {"holds": bool(ok),
           "u_val": None if u_val == INF else int(u_val)}
    if t_prec is not None:
        rep["t_prec"] = None if t_prec == INF else int(t_prec)
    return rep


def check_main_theorem(phi: DrinfeldModule, xi: LaurentElem, ucap, t_prec,
                       route="definition"):
    """Verify, below explicit caps, the convergence statement and the
    four identities satisfied by the deformed logarithm at xi.  Raises
    the appropriate precondition error instead of failing an identity
    when xi is out of range."""
    ctx = phi.ctx
    conv = phi.convergence_data()
    margin = ctx.m * (phi.r + 2)
    inner = ucap + margin

    dl = DeformedLog(phi, xi, inner, route)
    report = {"logq_R": [conv.logq_R.numerator, conv.logq_R.denominator],
              "s": conv.s, "cut": dl.cut}

    # (a) convergence: the certified Gauss-norm bounds of the summands
    # strictly decrease once n is past the support, staying <= the
    # radius bound.
    rho = -conv.logq_R
    d = xi.deg() if xi.coeffs else Fraction(-xi.cap, ctx.m)
    bounds = [(ctx.q ** n - 1) * rho + ctx.q ** n * d for n in range(dl.cut)]
    dec = all(bounds[n + 1] < bounds[n] for n in range(len(bounds) - 1))
    report["a"] = {"holds": bool(dec),
                   "term_bound_logq": [[b.numerator, b.denominator]
                                       for b in bounds]}

    # (b) value at theta equals the logarithm, termwise exact plus a
    # capped numeric comparison.
    beta = phi.log_coeffs(max(dl.cut - 1, 0), "recurrence")
    termwise = True
    xq = xi
    for n, term in enumerate(dl.terms):
        if n:
            xq = xq.pow_q(1)
        got = eval_theta_frac(phi, term)
        want = BracketFrac(ctx, beta[n].num * xq, beta[n].den)
        diff = got - want
        if diff.num.coeffs:
            termwise = False
            break
    lhs_theta = dl.eval_theta()
    rhs_log = phi.log_eval(xi, ucap=inner, route="partitions")
    diff_b = lhs_theta - rhs_log
    report["b"] = _report(termwise and not diff_b.coeffs,
                          min(diff_b.cap, ucap) if diff_b.cap != INF else ucap)

    # (c) the delta operator recovers xi from -L/(t - theta).
    s = dl.series(t_prec)
    geo = geometric_pole_series(ctx, 0, t_prec)
    G = -(s * geo)
    applied = apply_delta(delta_phi(phi), G)
    resid_c = applied - TateSeries.from_scalar(ctx, xi).truncate_t(applied.t_prec)
    ok_c, val_c, win_c = resid_c.residual_report()
    report["c"] = _report(ok_c, min(val_c, ucap), win_c)

    # (d) L(xi; t) = -(t - theta) f(u; t) at u = log_phi(xi).
    u = phi.log_eval(xi, ucap=inner, route="partitions")
    f = agf(phi, u, inner)
    form = f.theta_pole_form(t_prec)
    lin = TateSeries.t_poly(ctx, [-ctx.theta(), ctx.one()])
    rhs_d = -(lin * form.regular +
              TateSeries.from_scalar(ctx, form.residue))
    resid_d = s - rhs_d.truncate_t(s.t_prec)
    ok_d, val_d, win_d = resid_d.residual_report()
    report["d"] = _report(ok_d, min(val_d, ucap), win_d)

    # (e) the shift identity, guarded by its preconditions.
    viol = shift_precondition_violations(phi, xi)
    if viol:
        i, v, rr = viol[0]
        raise CompatPreconditionFailed(
            "shift identity precondition fails at i=%d: log_q|A_i xi^(q^i)|"
            " = %s but logq_R = %s; choose xi with smaller absolute value"
            % (i, v, rr))
    phixi = phi.phi_action(xi)
    dl2 = DeformedLog(phi, phixi, inner, route)
    lhs_e = dl2.series(t_prec)
    rhs_e = s.shift_t(1).truncate_t(t_prec) - (
        lin * TateSeries.from_scalar(ctx, xi)).truncate_t(t_prec)
    resid_e = lhs_e - rhs_e.truncate_t(lhs_e.t_prec)
    ok_e, val_e, win_e = resid_e.residual_report()
    report["e"] = _report(ok_e, min(val_e, ucap), win_e)

    report["holds"] = all(report[k]["holds"] for k in "abcde")
    return report


# -- the Carlitz tower: omega and the period --

class OmegaCarlitz:
    """omega(t) = (-theta)^(1/(q-1)) prod_{i>=0} (1 - t/theta^(q^i))^(-1),
    held as the root, the pole factor at theta, and the regular product
    W = prod_{i>=1}, so the residue at theta stays certified.

    Internal work happens a few digits above the requested cap so that
    the scale by theta * root (negative valuation) still leaves every
    published coefficient certified below ucap."""

    def __init__(self, ctx, ucap, t_prec):
        self.ctx = ctx
        self.ucap = ucap
        self.t_prec = t_prec
        q = ctx.q
        if ctx.m % (q - 1):
            raise RamificationError(
                "(-theta)^(1/(q-1)) needs (q-1) | m; enlarge m to %d"
                % (ctx.m * (q - 1)), required_m=ctx.m * (q - 1))
        self.root = (-ctx.theta()).root_q_minus_1()
        self._inner = ucap + 3 * ctx.m
        # a factor with m(q^i - 1) beyond the working cap is 1 there
        self.depth = 1
        while ctx.m * (q ** (self.depth + 1) - 1) <= self._inner:
            self.depth += 1
            if self.depth > 64:
                raise PrecisionExhausted("omega factor depth exploded")

    def regular_series(self):
        """W = prod_{i>=1} (1 - t/theta^(q^i))^(-1) as a series at the
        internal cap."""
        ctx = self.ctx
        out = TateSeries.from_scalar(ctx, ctx.one(), self.t_prec)
        for i in range(1, self.depth + 1):
            g = geometric_pole_series(ctx, i, self.t_prec)
            out = out * g.scale(-ctx.theta().pow_q(i))
        return out.truncate_u(self._inner)

    def series(self):
        ctx = self.ctx
        W = self.regular_series()
        return (W.scale(self.root * (-ctx.theta()))
                * geometric_pole_series(ctx, 0, self.t_prec)
                ).truncate_u(self.ucap)

    def theta_pole_form(self):
        """Split omega = regular + res/(t - theta), the residue being
        -theta * root * W(theta)."""
        ctx = self.ctx
        res = -(self.pi_tilde("factored"))
        geo = geometric_pole_series(ctx, 0, self.t_prec)
        reg = self.series() - geo.scale(res)
        return ThetaPoleForm(reg.truncate_u(self.ucap), res)

    def _w_factors_theta(self):
        """Exact binomials 1 - theta^(1 - q^i) for the i that matter."""
        ctx = self.ctx
        return [ctx.one() - ctx.theta().pow_q(i).invert() * ctx.theta()
                for i in range(1, self.depth + 1)]

    def _w_at_theta(self, path):
        """W(theta) three ways; 'series' certifies its own t-tail from
        |c_k theta^k| <= q^((1-q)k)."""
        ctx = self.ctx
        rel = self._inner
        factors = self._w_factors_theta()
        if path == "factored":
            out = ctx.one().truncate(rel)
            for f in factors:
                out = out * f.truncate(rel).invert()
            return out
        if path == "single":
            prod = ctx.one()
            for f in factors:
                prod = prod * f
            return prod.truncate(prod.val + rel).invert()
        if path == "series":
            W = self.regular_series()
            tail_val = ctx.m * (ctx.q - 1) * self.t_prec
            acc = ctx.zero(INF)
            th = ctx.theta()
            for c in reversed(W.coeffs):
                acc = acc * th + c
            return acc.truncate(min(rel, tail_val))
        raise InvalidInput("unknown path %r" % path)

    def pi_tilde(self, path="factored"):
        """The period: theta (-theta)^(1/(q-1)) prod_{i>=1}
        (1 - theta^(1-q^i))^(-1) = -Res_theta(omega)."""
        val = self.root * self.ctx.theta() * self._w_at_theta(path)
        return val.truncate(min(self.ucap, val.cap))

    def diff_eq_residual(self):
        """omega^(1) - (t - theta) omega, as a truncated series; the
        functional equation says it vanishes.  Built from the
        internal-cap series so the theta factor does not eat into the
        published cap."""
        ctx = self.ctx
        W = self.regular_series()
        s = (W.scale(self.root * (-ctx.theta()))
             * geometric_pole_series(ctx, 0, self.t_prec)
             ).truncate_u(self._inner - ctx.m)
        lin = TateSeries.t_poly(ctx, [-ctx.theta(), ctx.one()])
        resid = s.twist(1) - (lin * s).truncate_t(s.t_prec)
        return resid.truncate_u(self.ucap)


def omega_carlitz(ctx, ucap, t_prec):
    return OmegaCarlitz(ctx, ucap, t_prec)


def carlitz_pi(ctx, ucap):
    """Standalone period computation through the factored product."""
    return OmegaCarlitz(ctx, ucap, 4).pi_tilde("factored")


def agf_orbit_series(phi, u, t_prec, ucap):
    """Independent route to the generating function: coefficient k is
    exp_phi(u / theta^(k+1)).  Matches the partial-fraction expansion
    coefficientwise, which exercises the exponential instead of the
    b-sequence."""
    ctx = phi.ctx
    coeffs = [phi.exp_eval(u * ctx.theta(-(k + 1)), ucap=ucap)
              for k in range(t_prec)]
    return TateSeries(ctx, coeffs, t_prec)
