"""Shadowed partitions.

An r-tuple (S_1, ..., S_r) of subsets of {0, ..., n-1} is a shadowed
partition of n if the shifted copies S_i + j for 1 <= i <= r,
0 <= j <= i-1 partition {0, ..., n-1}; each S_i casts i-1 shadows to its
right and nothing overlaps.  These tuples index the closed forms for the
exponential and logarithm coefficients of a rank-r Drinfeld module, with
S_i recording which Frobenius powers of the i-th coefficient occur.

Sets are stored as bitmasks (bit j <-> j in S_i).  Enumeration is by the
last-element recursion: removing n-i from S_i (for the unique i whose set
contains an element >= n-i... precisely, adjoining n-i to S_i maps
P_r(n-i) into P_r(n), and the images partition P_r(n)).  The direct
filter over all 2^(rn) tuples is kept as a test oracle.
"""

from .errors import InvalidInput


class ShadowedPartition:
    """One shadowed partition; masks[i-1] is the bitmask of S_i."""

    __slots__ = ("r", "n", "masks")

    def __init__(self, r, n, masks):
        masks = tuple(int(m) for m in masks)
        if len(masks) != r:
            raise InvalidInput("expected %d sets" % r)
        self.r = r
        self.n = n
        self.masks = masks

    @property
    def sets(self):
        return tuple(tuple(j for j in range(self.n) if m >> j & 1)
                     for m in self.masks)

    def is_valid(self):
        """Check the shifted copies S_i + j (0 <= j < i) tile {0..n-1}."""
        full = (1 << self.n) - 1
        seen = 0
        for i, m in enumerate(self.masks, start=1):
            if m < 0 or m >> self.n:
                return False
            for j in range(i):
                cell = m << j
                if cell & seen:
                    return False
                seen |= cell
        return seen == full

    def weights(self, q):
        """w(S_i) = sum of q^j over j in S_i, for each i."""
        return tuple(sum(q ** j for j in range(self.n) if m >> j & 1)
                     for m in self.masks)

    def support(self):
        return tuple(i for i, m in enumerate(self.masks, start=1) if m)

    def union_mask(self):
        out = 0
        for m in self.masks:
            out |= m
        return out

    def __eq__(self, other):
        return (isinstance(other, ShadowedPartition) and self.r == other.r
                and self.n == other.n and self.masks == other.masks)

    def __hash__(self):
        return hash((self.r, self.n, self.masks))

    def __repr__(self):
        return "ShadowedPartition(r=%d, n=%d, sets=%r)" % (self.r, self.n, self.sets)

    def to_json(self, q=None):
        obj = {"n": self.n, "r": self.r,
               "sets": [list(s) for s in self.sets]}
        if q is not None:
            obj["weights"] = list(self.weights(q))
        return obj


def _lex_key(r, n):
    def key(masks):
        return tuple((m >> j) & 1 for m in masks for j in range(n))
    return key


def _enumerate_masks(r, n, memo):
    if n < 0:
        return []
    if n == 0:
        return [(0,) * r]
    got = memo.get(n)
    if got is not None:
        return got
    out = []
    for i in range(1, min(r, n) + 1):
        bit = 1 << (n - i)
        for masks in _enumerate_masks(r, n - i, memo):
            lst = list(masks)
            lst[i - 1] |= bit
            out.append(tuple(lst))
    memo[n] = out
    return out


def enumerate_partitions(r, n, support=None):
    """All shadowed partitions of n into r sets, in lexicographic order of
    the flattened membership vector.  `support` restricts to partitions
    with S_i empty for all i outside it."""
    if r < 1:
        raise InvalidInput("r must be >= 1")
    if n < 0:
        return []
    out = [ShadowedPartition(r, n, masks)
           for masks in sorted(_enumerate_masks(r, n, {}), key=_lex_key(r, n))]
    if support is not None:
        out = restrict_to_support(out, support)
    return out


def enumerate_by_filter(r, n):
    """Oracle: scan all candidate subsets per slot against the defining
    tiling condition, pruning branches whose shadows already overlap.
    Exponential cost; tests only."""
    if n < 0:
        return []
    full = (1 << n) - 1
    out = []

    def rec(masks, seen):
        i = len(masks) + 1
        if i > r:
            if seen == full:
                out.append(ShadowedPartition(r, n, masks))
            return
        for m in range(1 << n):
            cells = 0
            ok = True
            for j in range(i):
                cell = m << j
                if cell & (seen | cells) or cell > full:
                    ok = False
                    break
                cells |= cell
            if ok:
                rec(masks + [m], seen | cells)

    rec([], 0)
    out.sort(key=lambda sp: _lex_key(r, n)(sp.masks))
    return out


def count_partitions(r, n):
    """|P_r(n)| via the r-step Fibonacci recurrence: F_0 = 1, F_{<0} = 0,
    F_n = F_{n-1} + ... + F_{n-r}."""
    if r < 1:
        raise InvalidInput("r must be >= 1")
    if n < 0:
        return 0
    f = {0: 1}
    for k in range(1, n + 1):
        f[k] = sum(f.get(k - i, 0) for i in range(1, r + 1))
    return f[n]


def pi_bijection(i, sp):
    """Shift map P_r(n) -> P_r^i(n+i): add i to every element and put 0
    into S_i.  Images are exactly the partitions whose S_i contains 0."""
    if not 1 <= i <= sp.r:
        raise InvalidInput("i out of range")
    masks = [m << i for m in sp.masks]
    masks[i - 1] |= 1
    return ShadowedPartition(sp.r, sp.n + i, masks)


def psi_injection(i, sp):
    """Last-element map P_r(n) -> P_r(n+i): adjoin n (the new n-i) to S_i.
    Over i = 1..r the images partition the target."""
    if not 1 <= i <= sp.r:
        raise InvalidInput("i out of range")
    masks = list(sp.masks)
    masks[i - 1] |= 1 << sp.n
    return ShadowedPartition(sp.r, sp.n + i, masks)


def restrict_to_support(partitions, support):
    """Partitions with S_i = empty for every i outside `support`."""
    support = set(support)
    return [sp for sp in partitions
            if all(m == 0 for i, m in enumerate(sp.masks, start=1)
                   if i not in support)]
