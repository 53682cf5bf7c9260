"""Truncated Laurent series over F_{q^s} in u with u^m = 1/theta.

An element is a sparse dict {exponent: packed field scalar} together with
a precision cap: coefficients at exponents >= cap are unknown, and
cap = +inf means the element is exact (all omitted coefficients are truly
zero).  |theta| = q, so an element of valuation v has log_q absolute
value -v/m; the normalization m lets ramified quantities such as
(-theta)^(1/(q-1)) and torsion roots live in the same window.

Cap discipline: add takes the min of caps, mul takes
min(val(x) + cap(y), val(y) + cap(x)); inversion and (q-1)-st roots of
exact non-monomials get the session's relative precision budget.  All
caps are conservative, so any coefficient below a cap is certified.
"""

from fractions import Fraction
from math import ceil, gcd, inf as INF

from .errors import (DivideByZero, InvalidInput, NoRootInField,
                     PrecisionExhausted, RamificationError)
from .ff import Field, FieldParams, field_for


class SeriesParams:
    """Ambient context: the field, the ramification index m, and the
    default relative precision budget (in u-digits) for operations that
    turn exact data into genuinely infinite series."""

    def __init__(self, field, m: int, prec: int = 128):
        self.field = field_for(field) if not isinstance(field, Field) else field
        if m < 1:
            raise InvalidInput("m must be a positive integer")
        if prec < 1:
            raise InvalidInput("prec must be a positive integer")
        self.m = int(m)
        self.prec = int(prec)

    @property
    def q(self):
        return self.field.q

    # -- constructors --

    def make(self, coeffs, cap=INF):
        return LaurentElem(self, coeffs, cap)

    def zero(self, cap=INF):
        return LaurentElem(self, {}, cap)

    def one(self):
        return LaurentElem(self, {0: 1}, INF)

    def monomial(self, c, e, cap=INF):
        return LaurentElem(self, {int(e): c} if c else {}, cap)

    def scalar(self, c):
        return self.monomial(c, 0)

    def int_scalar(self, k):
        return self.scalar(self.field.int_scalar(k))

    def theta(self, k=1):
        """theta^k as an exact monomial (k may be negative)."""
        return self.monomial(1, -self.m * k)

    def from_poly(self, coeffs):
        """Polynomial in theta with F_q coefficients (packed ints < q),
        ascending powers."""
        d = {}
        for k, c in enumerate(coeffs):
            if not 0 <= c < self.q:
                raise InvalidInput("polynomial coefficients must lie in F_q")
            if c:
                d[-self.m * k] = c
        return LaurentElem(self, d, INF)

    def val_from_logq(self, bound):
        """Smallest integer valuation consistent with log_q|x| <= bound."""
        return ceil(Fraction(-self.m) * Fraction(bound))

    def same(self, other):
        return (self.field is other.field and self.m == other.m)


def _iter_bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _carryless(a, b):
    """Product of two GF(2)[u] polynomials stored as bitmasks."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    for t in _iter_bits(a):
        out ^= b << t
    return out


def _dict_mul_gf2(field, A, B, lim):
    """Sparse-window product via coordinate bit planes (p = 2 only)."""
    dim = field.dim
    bm = field.basis_mul
    amin, bmin = min(A), min(B)
    base = amin + bmin
    pa = [0] * dim
    for e, c in A.items():
        sh = e - amin
        for k in _iter_bits(c):
            pa[k] |= 1 << sh
    pb = [0] * dim
    for e, c in B.items():
        sh = e - bmin
        for k in _iter_bits(c):
            pb[k] |= 1 << sh
    planes = [0] * dim
    for i in range(dim):
        ai = pa[i]
        if not ai:
            continue
        row = bm[i]
        for j in range(dim):
            bj = pb[j]
            if not bj:
                continue
            prod = _carryless(ai, bj)
            for k in _iter_bits(row[j]):
                planes[k] ^= prod
    if lim != INF:
        width = lim - base
        if width <= 0:
            return {}
        mask = (1 << width) - 1
        planes = [pl & mask for pl in planes]
    out = {}
    occupied = 0
    for pl in planes:
        occupied |= pl
    for t in _iter_bits(occupied):
        v = 0
        for k in range(dim):
            v |= ((planes[k] >> t) & 1) << k
        out[base + t] = v
    return out


def _dict_mul_packed(field, A, B, lim):
    """Dense-window product over a prime field via one bigint multiply.

    Coefficients are packed into byte-aligned lanes wide enough that
    cross terms accumulate without carrying between lanes; each lane is
    reduced mod p only after the multiplication.
    """
    p = field.p
    amin, amax = min(A), max(A)
    bmin, bmax = min(B), max(B)
    base = amin + bmin
    lanes = (amax - amin) + (bmax - bmin) + 1
    bound = (p - 1) * (p - 1) * min(len(A), len(B))
    w = -(-(bound.bit_length() + 1) // 8)  # lane width in bytes
    ia = 0
    for e, c in A.items():
        ia |= c << (8 * w * (e - amin))
    ib = 0
    for e, c in B.items():
        ib |= c << (8 * w * (e - bmin))
    buf = (ia * ib).to_bytes(lanes * w, "little")
    if lim != INF:
        lanes = min(lanes, lim - base)
    out = {}
    frm = int.from_bytes
    for t in range(lanes):
        v = frm(buf[t * w:(t + 1) * w], "little") % p
        if v:
            out[base + t] = v
    return out


def _dict_mul(field, A, B, lim):
    """Product of sparse coefficient dicts, dropping exponents >= lim."""
    if not A or not B:
        return {}
    if len(A) > len(B):
        A, B = B, A
    if len(A) == 1:
        (e1, c1), = A.items()
        mul = field.mul
        out = {}
        for e2, c2 in B.items():
            e = e1 + e2
            if e < lim:
                out[e] = mul(c1, c2)
        return out
    if field.p == 2 and len(A) * len(B) > 512:
        return _dict_mul_gf2(field, A, B, lim)
    if field.dim == 1 and len(A) * len(B) > 512:
        # Worth packing only when the operands are reasonably dense;
        # the window size is what the packed route actually pays for.
        if (max(A) - min(A)) + (max(B) - min(B)) < 8 * len(A) * len(B):
            return _dict_mul_packed(field, A, B, lim)
    mul, add = field.mul, field.add
    out = {}
    for e1, c1 in A.items():
        for e2, c2 in B.items():
            e = e1 + e2
            if e >= lim:
                continue
            prev = out.get(e)
            if prev is None:
                out[e] = mul(c1, c2)
            else:
                v = add(prev, mul(c1, c2))
                if v:
                    out[e] = v
                else:
                    del out[e]
    return out


def _dict_inv(field, W, lim, two):
    """Inverse of a unit dict (W[0] = 1) modulo u^lim, by Newton iteration."""
    Z = {0: 1}
    d = 1
    while d < lim:
        d = min(2 * d, lim)
        Wd = {e: c for e, c in W.items() if e < d}
        WZ = _dict_mul(field, Wd, Z, d)
        T = {e: field.neg(c) for e, c in WZ.items()}
        t0 = field.add(T.get(0, 0), two)
        if t0:
            T[0] = t0
        elif 0 in T:
            del T[0]
        Z = _dict_mul(field, Z, T, d)
    return Z


class LaurentElem:
    """A Laurent series known below its precision cap."""

    __slots__ = ("ctx", "coeffs", "cap")

    def __init__(self, ctx, coeffs, cap=INF):
        self.ctx = ctx
        if cap != INF:
            cap = int(cap)
            coeffs = {e: c for e, c in coeffs.items() if c and e < cap}
        else:
            coeffs = {e: c for e, c in coeffs.items() if c}
        self.coeffs = coeffs
        self.cap = cap

    # -- structure --

    @property
    def exact(self):
        return self.cap == INF

    @property
    def val(self):
        """Valuation; None for (exact or apparent) zero."""
        return min(self.coeffs) if self.coeffs else None

    @property
    def vbound(self):
        """Lower bound for the valuation of the true value (INF = exact 0)."""
        return min(self.coeffs) if self.coeffs else self.cap

    def is_exact_zero(self):
        return not self.coeffs and self.cap == INF

    def is_zero_to_prec(self):
        return not self.coeffs

    def deg(self):
        """log_q of the absolute value as a Fraction; None for zero."""
        if not self.coeffs:
            return None
        return Fraction(-min(self.coeffs), self.ctx.m)

    def deg_bound(self):
        """Certified upper bound for log_q|x| (-inf for exact zero)."""
        vb = self.vbound
        if vb == INF:
            return -INF
        return Fraction(-vb, self.ctx.m)

    def leading(self):
        if not self.coeffs:
            raise PrecisionExhausted("zero to working precision has no leading term")
        v = min(self.coeffs)
        return v, self.coeffs[v]

    # -- ring operations --

    def _check(self, other):
        if not self.ctx.same(other.ctx):
            raise InvalidInput("operands live in different series contexts")

    def __add__(self, other):
        self._check(other)
        cap = min(self.cap, other.cap)
        add = self.ctx.field.add
        big, small = self.coeffs, other.coeffs
        if len(big) < len(small):
            big, small = small, big
        out = dict(big)
        for e, c in small.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                v = add(prev, c)
                if v:
                    out[e] = v
                else:
                    del out[e]
        return LaurentElem(self.ctx, out, cap)

    def __neg__(self):
        neg = self.ctx.field.neg
        return LaurentElem(self.ctx, {e: neg(c) for e, c in self.coeffs.items()},
                           self.cap)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        cap = min(self.vbound + other.cap, other.vbound + self.cap)
        out = _dict_mul(self.ctx.field, self.coeffs, other.coeffs, cap)
        return LaurentElem(self.ctx, out, cap)

    def scale(self, c):
        """Multiply by a field scalar (packed int)."""
        if c == 0:
            return LaurentElem(self.ctx, {}, INF)
        mul = self.ctx.field.mul
        return LaurentElem(self.ctx, {e: mul(c, x) for e, x in self.coeffs.items()},
                           self.cap)

    def shift(self, k):
        """Multiply by u^k."""
        cap = self.cap if self.cap == INF else self.cap + k
        return LaurentElem(self.ctx, {e + k: c for e, c in self.coeffs.items()}, cap)

    def pow(self, n):
        if n < 0:
            return self.invert().pow(-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def truncate(self, cap):
        if cap >= self.cap:
            return self
        return LaurentElem(self.ctx, self.coeffs, cap)

    def pow_q(self, k):
        """Frobenius power x^(q^k); negative k extracts q^|k|-th roots
        coefficientwise and requires exponent divisibility."""
        if k == 0:
            return self
        field = self.ctx.field
        if k > 0:
            Q = self.ctx.q ** k
            cap = self.cap if self.cap == INF else self.cap * Q
            return LaurentElem(self.ctx,
                               {e * Q: field.frob(c, k) for e, c in self.coeffs.items()},
                               cap)
        Q = self.ctx.q ** (-k)
        bad = [e for e in self.coeffs if e % Q]
        if bad:
            raise RamificationError(
                "inverse Frobenius twist needs exponents divisible by %d; "
                "enlarge m to %d" % (Q, self.ctx.m * Q),
                required_m=self.ctx.m * Q)
        cap = self.cap if self.cap == INF else -(-self.cap // Q)
        return LaurentElem(self.ctx,
                           {e // Q: field.frob(c, k) for e, c in self.coeffs.items()},
                           cap)

    def invert(self):
        if not self.coeffs:
            if self.cap == INF:
                raise DivideByZero("inverse of exact zero")
            raise PrecisionExhausted(
                "divisor vanishes to working precision; raise ucap beyond %s"
                % self.cap)
        field = self.ctx.field
        v = min(self.coeffs)
        c0i = field.inv(self.coeffs[v])
        rel = INF if self.cap == INF else self.cap - v
        if len(self.coeffs) == 1:
            cap = INF if rel == INF else -v + rel
            return LaurentElem(self.ctx, {-v: c0i}, cap)
        R = self.ctx.prec if rel == INF else int(rel)
        W = {}
        for e, c in self.coeffs.items():
            k = e - v
            if k < R:
                W[k] = field.mul(c, c0i)
        Z = _dict_inv(field, W, R, field.int_scalar(2))
        out = {e - v: field.mul(c, c0i) for e, c in Z.items()}
        return LaurentElem(self.ctx, out, -v + R)

    def __truediv__(self, other):
        return self * other.invert()

    def root_q_minus_1(self):
        """Deterministic y with y^(q-1) = x, leading coefficient chosen
        lexicographically smallest; Hensel refinement for the rest."""
        q = self.ctx.q
        if q == 2:
            return self
        if not self.coeffs:
            if self.cap == INF:
                return self
            raise PrecisionExhausted(
                "root of a value that vanishes to working precision; raise "
                "ucap beyond %s" % self.cap)
        field = self.ctx.field
        v = min(self.coeffs)
        if v % (q - 1):
            need = self.ctx.m * (q - 1) // gcd(abs(v) if v else 1, q - 1)
            raise RamificationError(
                "(q-1)-st root has valuation %s/(q-1); enlarge m to %d"
                % (v, need), required_m=need)
        c0 = self.coeffs[v]
        y0 = field.root_q_minus_1(c0)  # may raise NoRootInField
        rel = INF if self.cap == INF else self.cap - v
        if len(self.coeffs) == 1:
            cap = INF if rel == INF else v // (q - 1) + rel
            return LaurentElem(self.ctx, {v // (q - 1): y0}, cap)
        R = self.ctx.prec if rel == INF else int(rel)
        c0i = field.inv(c0)
        W = {}
        for e, c in self.coeffs.items():
            k = e - v
            if k < R:
                W[k] = field.mul(c, c0i)
        # solve Z^(q-1) = W with Z = 1 + ..., Newton with doubling windows
        Z = {0: 1}
        d = 1
        two = field.int_scalar(2)
        qm1 = field.int_scalar(q - 1)
        qm1_inv = field.inv(qm1)
        while d < R:
            d = min(2 * d, R)
            Wd = {e: c for e, c in W.items() if e < d}
            Zp = {0: 1}
            for _ in range(q - 2):
                Zp = _dict_mul(field, Zp, Z, d)  # Z^(q-2)
            F = _dict_mul(field, Zp, Z, d)  # Z^(q-1)
            for e, c in Wd.items():
                x = field.sub(F.get(e, 0), c)
                if x:
                    F[e] = x
                elif e in F:
                    del F[e]
            if not F:
                continue
            G = {e: field.mul(qm1, c) for e, c in Zp.items()}
            Gi = _dict_inv(field, {e: field.mul(c, field.inv(G[0])) for e, c in G.items()},
                           d, two)
            Gi = {e: field.mul(c, field.inv(G[0])) for e, c in Gi.items()}
            step = _dict_mul(field, F, Gi, d)
            for e, c in step.items():
                x = field.sub(Z.get(e, 0), c)
                if x:
                    Z[e] = x
                elif e in Z:
                    del Z[e]
        out = _dict_mul(field, {v // (q - 1): y0}, Z, INF)
        return LaurentElem(self.ctx, out, v // (q - 1) + R)

    # -- comparisons and serialization --

    def __eq__(self, other):
        return (isinstance(other, LaurentElem) and self.ctx.same(other.ctx)
                and self.cap == other.cap and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.cap, tuple(sorted(self.coeffs.items()))))

    def agreement_cap(self, other):
        """Cap below which self and other provably agree, or None if they
        differ at a known coefficient."""
        d = self - other
        if d.coeffs:
            return None
        return d.cap

    def to_json(self):
        field = self.ctx.field
        if self.coeffs:
            v = min(self.coeffs)
            top = max(self.coeffs)
            dense = [list(field.coords(self.coeffs.get(e, 0)))
                     for e in range(v, top + 1)]
        else:
            v = None
            dense = []
        return {"val": v, "m": self.ctx.m, "coeffs": dense,
                "cap": None if self.cap == INF else int(self.cap),
                "exact": self.cap == INF}

    @staticmethod
    def from_json(ctx, obj):
        if obj["m"] != ctx.m:
            raise InvalidInput("serialized element has mismatched m")
        cap = INF if obj["exact"] else int(obj["cap"])
        coeffs = {}
        if obj["val"] is not None:
            v = int(obj["val"])
            for k, coords in enumerate(obj["coeffs"]):
                c = ctx.field.element(coords)
                if c:
                    coeffs[v + k] = c
        return LaurentElem(ctx, coeffs, cap)

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            items = sorted(self.coeffs.items())[:6]
            body = " + ".join("%d*u^%d" % (c, e) for e, c in items)
            if len(self.coeffs) > 6:
                body += " + ..."
        cap = "exact" if self.cap == INF else "O(u^%d)" % self.cap
        return "<%s (%s)>" % (body, cap)


def add(x, y):
    return x + y


def mul(x, y):
    return x * y


def invert(x):
    return x.invert()


def divide(x, y):
    return x / y


def pow_q(x, k):
    return x.pow_q(k)


def root_q_minus_1(x):
    return x.root_q_minus_1()
