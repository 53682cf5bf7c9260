"""Exact arithmetic in the residue fields F_q and F_{q^s}.

Elements are packed integers: an element with F_p-coordinate vector
(c_0, ..., c_{L-1}) relative to the tower basis is stored as
sum(c_k * p**k).  The tower is F_p[x]/(modulus) = F_q, then
F_q[y]/(modulus_s) = F_{q^s}; the flat basis is x^i y^j in the order
i + e*j, so packing nests correctly (p^i * q^j = p^(i+e*j)).

Small fields (order <= 2^12) get exp/log tables relative to a fixed
generator and Frobenius permutation tables; larger fields (capped at
2^20) fall back to schoolbook polynomial arithmetic per operation.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct

from .errors import ConfigError, InvalidElement, NoRootInField

TABLE_MAX = 1 << 12
ORDER_CAP = 1 << 20


def _factor(n):
    """Distinct prime factors of n by trial division (n <= 2^20)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(n):
    return n >= 2 and _factor(n) == [n]


class _PrimeLevel:
    __slots__ = ("order", "p")

    def __init__(self, p):
        self.p = p
        self.order = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, n):
        if a == 0:
            return 1 if n == 0 else 0
        if self.p == 2:
            return a
        return pow(a, n % (self.p - 1), self.p)


class _ExtLevel:
    """F_B[z]/(mod) over a base level with |base| = B; packed base-B digits."""

    __slots__ = ("base", "mod", "d", "order")

    def __init__(self, base, mod):
        mod = tuple(mod)
        if len(mod) < 2 or mod[-1] != 1:
            raise ConfigError("modulus must be monic of degree >= 1")
        self.base = base
        self.mod = mod
        self.d = len(mod) - 1
        self.order = base.order ** self.d

    def unpack(self, a):
        B = self.base.order
        digs = []
        for _ in range(self.d):
            a, r = divmod(a, B)
            digs.append(r)
        return digs

    def pack(self, digs):
        B = self.base.order
        a = 0
        for c in reversed(digs):
            a = a * B + c
        return a

    def add(self, a, b):
        ba = self.base
        da, db = self.unpack(a), self.unpack(b)
        return self.pack([ba.add(x, y) for x, y in zip(da, db)])

    def sub(self, a, b):
        ba = self.base
        da, db = self.unpack(a), self.unpack(b)
        return self.pack([ba.sub(x, y) for x, y in zip(da, db)])

    def neg(self, a):
        ba = self.base
        return self.pack([ba.neg(x) for x in self.unpack(a)])

    def mul(self, a, b):
        ba = self.base
        d = self.d
        da, db = self.unpack(a), self.unpack(b)
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    conv[i + j] = ba.add(conv[i + j], ba.mul(x, y))
        # reduce: z^d = -(mod[0] + ... + mod[d-1] z^(d-1))
        for k in range(2 * d - 2, d - 1, -1):
            c = conv[k]
            if c == 0:
                continue
            conv[k] = 0
            for j in range(d):
                if self.mod[j]:
                    conv[k - d + j] = ba.sub(conv[k - d + j], ba.mul(c, self.mod[j]))
        return self.pack(conv[:d])

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r = 1
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self.pow(a, self.order - 2)


# ---- polynomial helpers over a level (for modulus searches) ----


def _pol_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pol_sub(L, f, g):
    out = [0] * max(len(f), len(g))
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = L.sub(out[i], c)
    return _pol_trim(out)


def _pol_mul(L, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x == 0:
            continue
        for j, y in enumerate(g):
            if y:
                out[i + j] = L.add(out[i + j], L.mul(x, y))
    return _pol_trim(out)


def _pol_mod(L, f, g):
    f = list(f)
    dg = len(g) - 1
    ginv = L.inv(g[-1])
    while len(f) - 1 >= dg and f:
        c = L.mul(f[-1], ginv)
        sh = len(f) - 1 - dg
        for j, y in enumerate(g):
            if y:
                f[sh + j] = L.sub(f[sh + j], L.mul(c, y))
        _pol_trim(f)
    return f


def _pol_gcd(L, f, g):
    f, g = list(f), list(g)
    while g:
        f, g = g, _pol_mod(L, f, g)
    if f:
        c = L.inv(f[-1])
        f = [L.mul(c, x) for x in f]
    return f


def _pol_powmod(L, base, n, f):
    r = [1]
    base = _pol_mod(L, list(base), f)
    while n:
        if n & 1:
            r = _pol_mod(L, _pol_mul(L, r, base), f)
        base = _pol_mod(L, _pol_mul(L, base, base), f)
        n >>= 1
    return r


def _is_irreducible(L, mod):
    """Irreducibility of a monic polynomial over the level's field."""
    d = len(mod) - 1
    if d == 1:
        return True
    B = L.order
    x = [0, 1]
    # iterated Frobenius images of x modulo mod
    frob = [x]
    for _ in range(d):
        frob.append(_pol_powmod(L, frob[-1], B, mod))
    if _pol_sub(L, frob[d], x):
        return False
    for ell in _factor(d):
        g = _pol_sub(L, frob[d // ell], x)
        if len(_pol_gcd(L, g, list(mod))) != 1:
            return False
    return True


def _level_lex_key(L, a):
    """Flat F_p coordinate tuple of a packed element, ascending basis order."""
    if isinstance(L, _PrimeLevel):
        return (a,)
    out = []
    for c in L.unpack(a):
        out.extend(_level_lex_key(L.base, c))
    return tuple(out)


def canonical_irreducible(level, d):
    """Lexicographically smallest monic irreducible of degree d over the level.

    Order: coefficient tuples (c_0, ..., c_{d-1}) with each coefficient
    compared by its F_p-coordinate vector.
    """
    elems = sorted(range(level.order), key=lambda a: _level_lex_key(level, a))
    # constant term 0 would make the polynomial divisible by z
    heads = [c for c in elems if c != 0] if d > 1 else elems
    for c0 in heads:
        for rest in _iproduct(elems, repeat=d - 1):
            mod = [c0, *rest, 1]
            if _is_irreducible(level, mod):
                return tuple(mod)
    raise ConfigError("no irreducible polynomial found (impossible)")


@dataclass(frozen=True)
class FieldParams:
    """Description of F_{q^s}: q = p^e via modulus over F_p, then modulus_s over F_q."""

    p: int
    e: int
    modulus: tuple
    s: int
    modulus_s: tuple

    @property
    def q(self):
        return self.p ** self.e

    @property
    def order(self):
        return self.q ** self.s

    @staticmethod
    def make(q, s=1, modulus=None, modulus_s=None):
        """Build params for F_{q^s} with canonical default moduli."""
        if q < 2:
            raise ConfigError("q must be a prime power >= 2")
        p = _factor(q)[0]
        e = 0
        qq = q
        while qq > 1 and qq % p == 0:
            qq //= p
            e += 1
        if p ** e != q:
            raise ConfigError("q = %d is not a prime power" % q)
        if s < 1:
            raise ConfigError("s must be >= 1")
        if q ** s > ORDER_CAP:
            raise ConfigError("q^s exceeds the supported cap 2^20")
        Lp = _PrimeLevel(p)
        if modulus is None:
            modulus = canonical_irreducible(Lp, e) if e > 1 else (0, 1)
        modulus = tuple(modulus)
        if len(modulus) != e + 1:
            raise ConfigError("modulus must have degree e")
        if e > 1 and not _is_irreducible(Lp, list(modulus)):
            raise ConfigError("modulus is reducible over F_p")
        Lq = _ExtLevel(Lp, modulus) if e > 1 else Lp
        if modulus_s is None:
            modulus_s = canonical_irreducible(Lq, s) if s > 1 else (0, 1)
        modulus_s = tuple(modulus_s)
        if len(modulus_s) != s + 1:
            raise ConfigError("modulus_s must have degree s")
        if s > 1 and not _is_irreducible(Lq, list(modulus_s)):
            raise ConfigError("modulus_s is reducible over F_q")
        return FieldParams(p, e, modulus, s, modulus_s)


class Field:
    """Arithmetic context for F_{q^s} on packed-integer elements."""

    def __init__(self, params: FieldParams):
        self.params = params
        self.p = params.p
        self.e = params.e
        self.q = params.q
        self.s = params.s
        self.order = params.order
        if self.order > ORDER_CAP:
            raise ConfigError("q^s exceeds the supported cap 2^20")
        self.dim = params.e * params.s  # F_p dimension
        Lp = _PrimeLevel(self.p)
        Lq = _ExtLevel(Lp, params.modulus) if self.e > 1 else Lp
        self._level = _ExtLevel(Lq, params.modulus_s) if self.s > 1 else Lq
        self._exp = self._log = None
        self._frob_tabs = None
        self._addtab = None
        self._basis_mul = None
        if self.order <= TABLE_MAX:
            self._build_tables()

    # -- table construction --

    def _build_tables(self):
        L = self._level
        n = self.order - 1
        primes = _factor(n)
        g = None
        for cand in range(2, self.order):
            if all(L.pow(cand, n // ell) != 1 for ell in primes):
                g = cand
                break
        if g is None:  # order == 2
            g = 1
        exp = [1] * n
        for i in range(1, n):
            exp[i] = L.mul(exp[i - 1], g)
        log = [0] * self.order
        for i, a in enumerate(exp):
            log[a] = i
        self._exp, self._log = exp, log
        self._frob_tabs = {}
        q = self.q
        for k in range(1, self.s):
            step = pow(q, k, n) if n > 1 else 0
            tab = [0] * self.order
            for i, a in enumerate(exp):
                tab[a] = exp[(i * step) % n] if n > 1 else a
            self._frob_tabs[k] = tab
        if self.p != 2 and self.order <= 512:
            add = self._level.add
            self._addtab = [[add(a, b) for b in range(self.order)]
                            for a in range(self.order)]

    @property
    def basis_mul(self):
        """Packed products of the flat F_p basis monomials (dim x dim)."""
        if self._basis_mul is None:
            self._basis_mul = [[self.mul(self.p ** i, self.p ** j)
                                for j in range(self.dim)] for i in range(self.dim)]
        return self._basis_mul

    # -- scalar operations --

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self._addtab is not None:
            return self._addtab[a][b]
        return self._level.add(a, b)

    def sub(self, a, b):
        if self.p == 2:
            return a ^ b
        return self._level.sub(a, b)

    def neg(self, a):
        if self.p == 2:
            return a
        return self._level.neg(a)

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            n = self.order - 1
            return self._exp[(self._log[a] + self._log[b]) % n]
        return self._level.mul(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_{q^s}")
        if self._exp is not None:
            n = self.order - 1
            return self._exp[(-self._log[a]) % n]
        return self._level.inv(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow_int(self, a, n):
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError("inverse of 0 in F_{q^s}")
            return 0
        if self._exp is not None:
            N = self.order - 1
            return self._exp[(self._log[a] * n) % N]
        return self._level.pow(a, n % (self.order - 1))

    def frob(self, a, k=1):
        """a -> a^(q^k); k is reduced mod s (inverse twists included)."""
        k %= self.s
        if k == 0 or a == 0 or a == 1:
            return a
        if self._frob_tabs is not None:
            return self._frob_tabs[k][a]
        return self.pow_int(a, pow(self.q, k, self.order - 1))

    def int_scalar(self, k):
        """Image of the integer k in the prime field."""
        return k % self.p

    def coords(self, a):
        """Flat F_p coordinate vector, ascending basis order."""
        if not 0 <= a < self.order:
            raise InvalidElement("packed element out of range")
        out = []
        for _ in range(self.dim):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def element(self, coords):
        coords = list(coords)
        if len(coords) != self.dim:
            raise InvalidElement(
                "coordinate vector must have length %d" % self.dim)
        if any(not (0 <= c < self.p) for c in coords):
            raise InvalidElement("coordinates must lie in [0, p)")
        a = 0
        for c in reversed(coords):
            a = a * self.p + c
        return a

    def lex_key(self, a):
        return self.coords(a)

    def in_base(self, a):
        """Whether a lies in F_q (fixed by the q-power Frobenius)."""
        return self.frob(a, 1) == a

    def root_q_minus_1(self, c):
        """Lexicographically smallest y with y^(q-1) = c."""
        q = self.q
        if q == 2 or c == 0 or c == 1:
            return c
        d = q - 1
        n = self.order - 1
        if self._log is not None:
            a = self._log[c]
            if a % d:
                k = d // _gcd(a, d)
                raise NoRootInField(
                    "no (q-1)-st root in F_{q^s}; residue degree s=%d would "
                    "contain one" % (self.s * k), required_s=self.s * k)
            base = a // d
            step = n // d
            roots = [self._exp[(base + j * step) % n] for j in range(d)]
            return min(roots, key=self.lex_key)
        # big-field fallback: existence test then lexicographic scan
        if self.pow_int(c, n // d) != 1:
            raise NoRootInField(
                "no (q-1)-st root in F_{q^s}; enlarge s (a multiple of "
                "%d suffices)" % (self.s * d), required_s=self.s * d)
        for y in sorted(range(1, self.order), key=self.lex_key):
            if self.pow_int(y, d) == c:
                return y
        raise NoRootInField("unreachable", required_s=self.s * d)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=None)
def _field_for(params):
    return Field(params)


def field_for(params):
    """Shared Field instance for the given FieldParams."""
    if isinstance(params, Field):
        return params
    return _field_for(params)


class ResidueElem:
    """An element of F_{q^s} bound to its field context."""

    __slots__ = ("field", "n")

    def __init__(self, field, n):
        self.field = field_for(field)
        if not 0 <= n < self.field.order:
            raise InvalidElement("packed element out of range")
        self.n = n

    @property
    def coords(self):
        return self.field.coords(self.n)

    def __add__(self, other):
        return ResidueElem(self.field, self.field.add(self.n, other.n))

    def __sub__(self, other):
        return ResidueElem(self.field, self.field.sub(self.n, other.n))

    def __neg__(self):
        return ResidueElem(self.field, self.field.neg(self.n))

    def __mul__(self, other):
        return ResidueElem(self.field, self.field.mul(self.n, other.n))

    def __truediv__(self, other):
        return ResidueElem(self.field, self.field.div(self.n, other.n))

    def __pow__(self, n):
        return ResidueElem(self.field, self.field.pow_int(self.n, n))

    def __eq__(self, other):
        return (isinstance(other, ResidueElem)
                and self.field is other.field and self.n == other.n)

    def __hash__(self):
        return hash((id(self.field), self.n))

    def __repr__(self):
        return "ResidueElem%r" % (self.coords,)


def ff_make(params, coords):
    """Element of F_{q^s} from an F_p coordinate vector."""
    f = field_for(params)
    return ResidueElem(f, f.element(coords))


def ff_pow_q(x: ResidueElem, k: int) -> ResidueElem:
    """Frobenius power x^(q^k); k any integer, reduced mod s."""
    return ResidueElem(x.field, x.field.frob(x.n, k))


def ff_root_q_minus_1(c: ResidueElem) -> ResidueElem:
    """Deterministic (q-1)-st root, smallest in lexicographic coordinate order."""
    return ResidueElem(c.field, c.field.root_q_minus_1(c.n))
