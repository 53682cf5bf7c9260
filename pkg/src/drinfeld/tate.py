"""Series and rational functions in the deformation variable t.

TateSeries is a t-power series with LaurentElem coefficients, known for
t-degrees below t_prec (t_prec = +inf means a polynomial, exact beyond
its listed coefficients).  The Gauss norm of sum c_k t^k is max|c_k|,
and a series lies in the Tate algebra when |c_k| -> 0.

TateRational is numerator * product (t - theta^(q^e))^(-mult) with every
pole exponent e >= 1.  All such poles lie strictly outside the closed
unit t-disk, so these expand into the Tate algebra via geometric series,
evaluate exactly at points inside the disk and at theta, and twist by
shifting pole exponents.  The value theta itself is never a pole of
these objects; anything with a simple t = theta pole is carried in
ThetaPoleForm, which keeps the residue split off exactly.
"""

from math import inf as INF

from .errors import (EvalAtPole, IndeterminateNorm, InvalidInput,
                     TailNotNegligible)
from .laurent import LaurentElem


class TateSeries:
    __slots__ = ("ctx", "coeffs", "t_prec")

    def __init__(self, ctx, coeffs, t_prec=INF):
        self.ctx = ctx
        coeffs = list(coeffs)
        if t_prec == INF:
            while coeffs and coeffs[-1].is_exact_zero():
                coeffs.pop()
        else:
            t_prec = int(t_prec)
            if t_prec < 0:
                raise InvalidInput("t_prec must be >= 0")
            if len(coeffs) < t_prec:
                coeffs = coeffs + [ctx.zero() for _ in range(t_prec - len(coeffs))]
            else:
                coeffs = coeffs[:t_prec]
        self.coeffs = coeffs
        self.t_prec = t_prec

    # -- constructors --

    @staticmethod
    def zero(ctx, t_prec=INF):
        return TateSeries(ctx, [], t_prec)

    @staticmethod
    def from_scalar(ctx, c, t_prec=INF):
        return TateSeries(ctx, [c], t_prec)

    @staticmethod
    def t_poly(ctx, coeffs):
        """Exact polynomial in t with LaurentElem coefficients."""
        return TateSeries(ctx, coeffs, INF)

    # -- structure --

    def coeff(self, k):
        if k < len(self.coeffs):
            return self.coeffs[k]
        if self.t_prec == INF:
            return self.ctx.zero()
        raise InvalidInput("coefficient %d is beyond t_prec" % k)

    @property
    def tval(self):
        """First index whose coefficient is not exactly zero (INF if none
        and the series is an exact polynomial)."""
        for k, c in enumerate(self.coeffs):
            if not c.is_exact_zero():
                return k
        return self.t_prec

    def is_zero_to_prec(self):
        return all(not c.coeffs for c in self.coeffs)

    def deg_t(self):
        """Degree as a polynomial (exact series only)."""
        if self.t_prec != INF:
            raise InvalidInput("degree of a truncated series is unknown")
        return len(self.coeffs) - 1

    # -- arithmetic --

    def _check(self, other):
        if not self.ctx.same(other.ctx):
            raise InvalidInput("operands live in different series contexts")

    def __add__(self, other):
        self._check(other)
        tp = min(self.t_prec, other.t_prec)
        n = max(len(self.coeffs), len(other.coeffs)) if tp == INF else tp
        z = self.ctx.zero()
        out = [(self.coeffs[k] if k < len(self.coeffs) else z)
               + (other.coeffs[k] if k < len(other.coeffs) else z)
               for k in range(n)]
        return TateSeries(self.ctx, out, tp)

    def __neg__(self):
        return TateSeries(self.ctx, [-c for c in self.coeffs], self.t_prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        tp = min(self.t_prec + other.tval, other.t_prec + self.tval)
        if tp == INF:
            n = len(self.coeffs) + len(other.coeffs) - 1 if self.coeffs and other.coeffs else 0
        else:
            tp = int(tp)
            n = tp
        out = [self.ctx.zero() for _ in range(n)]
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= n:
                    break
                if not b.is_exact_zero():
                    out[k] = out[k] + a * b
        return TateSeries(self.ctx, out, tp)

    def scale(self, c: LaurentElem):
        return TateSeries(self.ctx, [x * c for x in self.coeffs], self.t_prec)

    def shift_t(self, k):
        if k < 0:
            raise InvalidInput("negative t-shift")
        tp = self.t_prec if self.t_prec == INF else self.t_prec + k
        return TateSeries(self.ctx, [self.ctx.zero()] * k + self.coeffs, tp)

    def twist(self, ell):
        """Coefficientwise Frobenius twist f -> f^(ell)."""
        return TateSeries(self.ctx, [c.pow_q(ell) for c in self.coeffs],
                          self.t_prec)

    def truncate_t(self, t_prec):
        if t_prec >= self.t_prec:
            return self
        return TateSeries(self.ctx, self.coeffs, t_prec)

    def truncate_u(self, cap):
        return TateSeries(self.ctx, [c.truncate(cap) for c in self.coeffs],
                          self.t_prec)

    # -- analysis --

    def gauss_norm_logq(self):
        """log_q of the Gauss norm over the known window.

        Certified against the u-caps of apparently-zero coefficients;
        coefficients beyond t_prec are the caller's responsibility (the
        series built here all have certified decaying tails).
        """
        best = None
        potential = None
        for c in self.coeffs:
            if c.coeffs:
                d = c.deg()
                best = d if best is None else max(best, d)
            elif not c.is_exact_zero():
                b = c.deg_bound()
                potential = b if potential is None else max(potential, b)
        if best is None:
            if potential is None:
                return -INF  # exactly zero
            raise IndeterminateNorm(
                "all coefficients vanish to precision; raise ucap")
        if potential is not None and potential > best:
            raise IndeterminateNorm(
                "an unknown coefficient could dominate; raise ucap")
        return best

    def eval(self, z: LaurentElem, tail_logq=None):
        """Value at z.  Exact polynomials evaluate exactly; truncated
        series require a certified bound tail_logq for log_q of the
        dropped tail sum_{k >= t_prec} c_k z^k."""
        acc = self.ctx.zero()
        for c in reversed(self.coeffs):
            acc = acc * z + c
        if self.t_prec != INF:
            if tail_logq is None:
                raise TailNotNegligible(
                    "evaluating a truncated series needs a certified tail "
                    "bound; none provided")
            acc = acc.truncate(self.ctx.val_from_logq(tail_logq))
        return acc

    def residual_report(self):
        """(holds, u_val, t_prec): holds iff no known-nonzero coefficient;
        u_val is the min cap over coefficients (INF when exactly zero)."""
        holds = True
        u_val = INF
        for c in self.coeffs:
            if c.coeffs:
                holds = False
                u_val = min(u_val, c.val)
            elif c.cap != INF:
                u_val = min(u_val, c.cap)
        return holds, u_val, self.t_prec

    def __eq__(self, other):
        return (isinstance(other, TateSeries) and self.ctx.same(other.ctx)
                and self.t_prec == other.t_prec and self.coeffs == other.coeffs)

    def __repr__(self):
        tp = "poly" if self.t_prec == INF else "O(t^%s)" % self.t_prec
        return "<TateSeries %d coeffs, %s>" % (len(self.coeffs), tp)

    def to_json(self):
        return {"t_prec": None if self.t_prec == INF else self.t_prec,
                "coeffs": [c.to_json() for c in self.coeffs]}


def geometric_pole_series(ctx, e, t_prec):
    """Expansion of 1/(t - theta^(q^e)) in the Tate algebra:
    -sum_k theta^(-q^e (k+1)) t^k (valid since |theta^(q^e)| > 1)."""
    q = ctx.q
    neg1 = ctx.field.neg(1)
    step = ctx.m * (q ** e)
    coeffs = [ctx.monomial(neg1, step * (k + 1)) for k in range(t_prec)]
    return TateSeries(ctx, coeffs, t_prec)


class TateRational:
    """numer / prod (t - theta^(q^e))^mult with pole exponents e >= 1."""

    __slots__ = ("ctx", "numer", "poles")

    def __init__(self, ctx, numer, poles=()):
        self.ctx = ctx
        if not isinstance(numer, TateSeries) or numer.t_prec != INF:
            raise InvalidInput("numerator must be an exact t-polynomial")
        if isinstance(poles, dict):
            poles = poles.items()
        poles = tuple(sorted((int(e), int(mlt)) for e, mlt in poles if mlt))
        for e, mlt in poles:
            if e < 1 or mlt < 1:
                raise InvalidInput("pole exponents must satisfy e >= 1, mult >= 1")
        self.numer = numer
        self.poles = poles

    @staticmethod
    def from_scalar(ctx, c):
        return TateRational(ctx, TateSeries.t_poly(ctx, [c]))

    def pole_dict(self):
        return dict(self.poles)

    def den_poly(self, poles=None):
        """Expanded denominator polynomial for the given pole multiset."""
        ctx = self.ctx
        out = TateSeries.t_poly(ctx, [ctx.one()])
        for e, mlt in (self.poles if poles is None else poles):
            factor = TateSeries.t_poly(ctx, [-ctx.theta().pow_q(e), ctx.one()])
            for _ in range(mlt):
                out = out * factor
        return out

    def __add__(self, other):
        self._check(other)
        merged = {}
        for e, mlt in self.poles:
            merged[e] = max(merged.get(e, 0), mlt)
        for e, mlt in other.poles:
            merged[e] = max(merged.get(e, 0), mlt)
        lift_self = [(e, mlt - dict(self.poles).get(e, 0))
                     for e, mlt in merged.items()]
        lift_other = [(e, mlt - dict(other.poles).get(e, 0))
                      for e, mlt in merged.items()]
        n = (self.numer * self.den_poly([(e, m) for e, m in lift_self if m])
             + other.numer * other.den_poly([(e, m) for e, m in lift_other if m]))
        return TateRational(self.ctx, n, merged)

    def __neg__(self):
        return TateRational(self.ctx, -self.numer, self.poles)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TateRational):
            self._check(other)
            merged = {}
            for e, mlt in self.poles + other.poles:
                merged[e] = merged.get(e, 0) + mlt
            return TateRational(self.ctx, self.numer * other.numer, merged)
        if isinstance(other, TateSeries):
            return TateRational(self.ctx, self.numer * other, self.poles)
        if isinstance(other, LaurentElem):
            return TateRational(self.ctx, self.numer.scale(other), self.poles)
        raise InvalidInput("unsupported multiplicand")

    def _check(self, other):
        if not self.ctx.same(other.ctx):
            raise InvalidInput("operands live in different series contexts")

    def twist(self, ell):
        poles = [(e + ell, mlt) for e, mlt in self.poles]
        if any(e < 1 for e, _ in poles):
            raise InvalidInput("twist would move a pole to exponent < 1")
        return TateRational(self.ctx, self.numer.twist(ell), poles)

    def to_series(self, t_prec):
        out = self.numer.truncate_t(t_prec)
        for e, mlt in self.poles:
            g = geometric_pole_series(self.ctx, e, t_prec)
            for _ in range(mlt):
                out = out * g
        if out.t_prec == INF:
            out = TateSeries(self.ctx, out.coeffs, t_prec)
        return out

    def eval(self, z: LaurentElem):
        """Exact evaluation away from the poles."""
        num = self.numer.eval(z)
        den = self.ctx.one()
        for e, mlt in self.poles:
            d = z - self.ctx.theta().pow_q(e)
            if d.is_exact_zero():
                raise EvalAtPole("evaluation point hits the pole at e=%d" % e)
            den = den * d.pow(mlt)
        return num * den.invert()

    def eval_at_theta(self):
        return self.eval(self.ctx.theta())

    def residue_at_theta(self):
        """These objects are regular at t = theta."""
        return self.ctx.zero()

    def equals(self, other):
        """Exact cross-multiplied equality (for exact numerators)."""
        self._check(other)
        lhs = self.numer * other.den_poly()
        rhs = other.numer * self.den_poly()
        d = lhs - rhs
        return all(not c.coeffs for c in d.coeffs), d

    def to_json(self):
        return {"numer": self.numer.to_json(),
                "poles": [list(p) for p in self.poles]}

    def __repr__(self):
        return "<TateRational deg %s, poles %r>" % (
            len(self.numer.coeffs) - 1, list(self.poles))


class ThetaPoleForm:
    """regular + residue/(t - theta), with the residue kept exact."""

    __slots__ = ("regular", "residue")

    def __init__(self, regular: TateSeries, residue: LaurentElem):
        self.regular = regular
        self.residue = residue

    def residue_at_theta(self):
        return self.residue

    def to_series(self, t_prec=None):
        ctx = self.regular.ctx
        tp = self.regular.t_prec if t_prec is None else t_prec
        if tp == INF:
            raise InvalidInput("pole expansion needs a finite t_prec")
        geo = geometric_pole_series(ctx, 0, tp)
        return self.regular.truncate_t(tp) + geo.scale(self.residue)


def residue_at_theta(f):
    """Residue at t = theta for objects that know their pole structure."""
    if isinstance(f, (TateRational, ThetaPoleForm)):
        return f.residue_at_theta()
    raise InvalidInput(
        "a bare truncated series carries no information at t = theta; "
        "use a structured form")


def rational_to_series(f: TateRational, t_prec):
    return f.to_series(t_prec)


def twist(f, ell):
    return f.twist(ell)


def gauss_norm_logq(f: TateSeries):
    return f.gauss_norm_logq()


def apply_delta(delta_coeffs, f: TateSeries):
    """Apply sum_i g_i * (Frobenius twist by i) to f.  Coefficients may be
    LaurentElem scalars, exact t-polynomials, or TateRationals (expanded
    at f's working t-precision)."""
    out = None
    for i, g in enumerate(delta_coeffs):
        fi = f.twist(i)
        if isinstance(g, LaurentElem):
            term = fi.scale(g)
        elif isinstance(g, TateRational):
            tp = fi.t_prec if fi.t_prec != INF else f.t_prec
            if tp == INF:
                raise InvalidInput("rational delta coefficient needs finite t_prec")
            term = g.to_series(tp) * fi
        elif isinstance(g, TateSeries):
            term = g * fi
        else:
            raise InvalidInput("unsupported delta coefficient")
        out = term if out is None else out + term
    if out is None:
        raise InvalidInput("empty delta")
    return out
