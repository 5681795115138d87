"""Commutative ring backends with exact arithmetic.

Finite rings carry an additive model: a diagonal abelian group together with
structure constants on its basis.  Modules over them (and over the integers,
which get the one-element additive basis ``{1}``) are computed through that
model in :mod:`antiloc.modules`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Any, Callable, Iterable, Sequence

from . import abelian as ab
from .linalg import BackendUnavailable, EuclideanOps, INT_OPS, smith_generic, smith_int

MAX_FINITE_ORDER = 2 ** 16


class Ring:
    """Base class.  Elements are immutable canonical Python values."""

    is_finite = False
    has_additive_model = False
    descriptor: dict

    def coerce(self, x: Any) -> Any:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def pow(self, a, k: int):
        r = self.one
        for _ in range(k):
            r = self.mul(r, a)
        return r

    def is_zero(self, a) -> bool:
        return a == self.zero

    def fmt(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(repr(self.descriptor))

    def __repr__(self):
        return self.name


# ---------------------------------------------------------------------------
# Integers
# ---------------------------------------------------------------------------


class IntegerRing(Ring):
    has_additive_model = True
    name = "Z"
    zero = 0
    one = 1
    descriptor = {"kind": "Z"}
    group = ab.AbGroup((0,))
    basis_mult = ([[1]],)

    def coerce(self, x):
        if isinstance(x, str):
            return int(x.strip())
        if isinstance(x, tuple):
            (x,) = x
        return int(x)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def to_vec(self, a) -> tuple:
        return (a,)

    def from_vec(self, v) -> int:
        return v[0]

    def mult_matrix(self, a):
        return [[a]]

    def is_unit(self, a) -> bool:
        return a in (1, -1)


ZZ = IntegerRing()


# ---------------------------------------------------------------------------
# Finite rings
# ---------------------------------------------------------------------------


class FiniteRing(Ring):
    """Finite commutative ring given by structure constants.

    ``group`` is the additive group, ``table[i][j]`` is ``b_i * b_j`` in
    coordinates, ``one_vec`` the unit.  Elements are coordinate tuples.
    """

    is_finite = True
    has_additive_model = True

    def __init__(self, group: ab.AbGroup, table, one_vec, name: str, descriptor: dict,
                 fmt: Callable | None = None, parse: Callable | None = None):
        if not group.is_finite:
            raise ValueError("finite ring needs a finite additive group")
        if group.order > MAX_FINITE_ORDER:
            raise BackendUnavailable(f"ring of order {group.order} exceeds 2^16")
        self.group = group
        self.table = [[group.reduce(v) for v in row] for row in table]
        self.one = group.reduce(one_vec)
        self.zero = group.zero()
        self.name = name
        self.descriptor = descriptor
        self._fmt = fmt
        self._parse = parse
        n = group.rank
        # basis_mult[i] is the matrix of x -> b_i x
        self.basis_mult = tuple(
            [[self.table[i][j][r] for j in range(n)] for r in range(n)] for i in range(n)
        )
        self._mul_cache: dict = {}

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def rank(self) -> int:
        return self.group.rank

    def elements(self) -> list:
        return list(self.group.elements())

    def to_vec(self, a) -> tuple:
        return a

    def from_vec(self, v) -> tuple:
        return self.group.reduce(v)

    def coerce(self, x):
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return self.group.reduce([x * c for c in self.one])
        if isinstance(x, str):
            if self._parse is not None:
                return self._parse(x)
            s = x.strip()
            if re.fullmatch(r"-?\d+", s):
                return self.coerce(int(s))
            return self.group.reduce([int(t) for t in s.strip("()[] ").split(",") if t.strip()])
        return self.group.reduce(list(x))

    def add(self, a, b):
        return self.group.add(a, b)

    def neg(self, a):
        return self.group.neg(a)

    def mult_matrix(self, a) -> list:
        n = self.rank
        m = [[0] * n for _ in range(n)]
        for i, c in enumerate(a):
            if c:
                bm = self.basis_mult[i]
                for r in range(n):
                    row, brow = m[r], bm[r]
                    for j in range(n):
                        row[j] += c * brow[j]
        return m

    def mul(self, a, b):
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        n = self.rank
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                ti = self.table[i]
                for j, y in enumerate(b):
                    if y:
                        v = ti[j]
                        xy = x * y
                        for r in range(n):
                            out[r] += xy * v[r]
        res = self.group.reduce(out)
        if len(self._mul_cache) < 200000:
            self._mul_cache[key] = res
        return res

    def is_unit(self, a) -> bool:
        return self.inverse(a) is not None

    def inverse(self, a):
        if self.rank == 0:
            return self.zero
        x = ab.preimage(self.group, self.group, self.mult_matrix(a), self.one)
        return x

    def fmt(self, a) -> str:
        if self._fmt is not None:
            return self._fmt(a)
        return str(tuple(a))

    def int_value(self, a) -> int | None:
        """For rings generated additively by 1: the integer ``k`` with ``a = k * 1``."""
        if self.rank == 1 and self.one == (1,):
            return a[0]
        return None


def ModularRing(n: int) -> FiniteRing:
    """``Z/n`` (``n == 1`` gives the zero ring)."""
    if n < 1:
        raise ValueError("modulus must be positive")
    if n == 1:
        return zero_ring({"kind": "Zmod", "n": 1})
    g = ab.AbGroup((n,))
    return FiniteRing(g, [[(1,)]], (1,), f"Z/{n}", {"kind": "Zmod", "n": n},
                      fmt=lambda a: str(a[0]))


def zero_ring(descriptor: dict | None = None) -> FiniteRing:
    return FiniteRing(ab.TRIVIAL, [], (), "0", descriptor or {"kind": "Zmod", "n": 1},
                      fmt=lambda a: "0")


# ---------------------------------------------------------------------------
# Univariate polynomials over F_p or Q
# ---------------------------------------------------------------------------


def _trim(c: list) -> tuple:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class PolyRing(Ring):
    """``F_p[x]`` (``p`` prime) or ``Q[x]`` (``p == 0``).  Elements: coefficient tuples, low degree first."""

    def __init__(self, p: int = 0, var: str = "x"):
        self.p = p
        self.var = var
        self.zero = ()
        self.one = (self._c(1),)
        field = f"F{p}" if p else "Q"
        self.name = f"{field}[{var}]"
        self.descriptor = {"kind": "Poly", "field": field, "var": var}

    def _c(self, x):
        if self.p:
            return int(x) % self.p
        return Fraction(x)

    def _inv(self, c):
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c

    def coerce(self, x):
        if isinstance(x, str):
            return parse_poly(x, self)
        if isinstance(x, (int, Fraction)):
            return _trim([self._c(x)])
        return _trim([self._c(c) for c in x])

    def add(self, a, b):
        n = max(len(a), len(b))
        return _trim([self._c((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) for i in range(n)])

    def neg(self, a):
        return _trim([self._c(-c) for c in a])

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return _trim([self._c(c) for c in out])

    def degree(self, a) -> int:
        return len(a) - 1

    def divmod(self, a, b):
        if not b:
            raise ZeroDivisionError
        a = list(a)
        q = [self._c(0)] * max(len(a) - len(b) + 1, 0)
        inv = self._inv(b[-1])
        while len(a) >= len(b) and a:
            c = self._c(a[-1] * inv)
            k = len(a) - len(b)
            q[k] = c
            for i, y in enumerate(b):
                a[i + k] = self._c(a[i + k] - c * y)
            a = list(_trim(a))
        return _trim(q), _trim(a)

    def monic(self, a):
        if not a:
            return a, self.one
        inv = self._inv(a[-1])
        return self.mul((inv,), a), (inv,)

    def is_unit(self, a) -> bool:
        return len(a) == 1

    def xgcd(self, a, b):
        """``(g, u, v)`` with ``u a + v b = g`` monic (or zero)."""
        r0, r1 = a, b
        s0, s1 = self.one, ()
        t0, t1 = (), self.one
        while r1:
            q, r = self.divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.sub(s0, self.mul(q, s1))
            t0, t1 = t1, self.sub(t0, self.mul(q, t1))
        if r0:
            inv = (self._inv(r0[-1]),)
            r0, s0, t0 = self.mul(inv, r0), self.mul(inv, s0), self.mul(inv, t0)
        return r0, s0, t0

    def euclidean_ops(self) -> EuclideanOps:
        def normal_unit(a):
            if not a:
                return self.one, self.one
            inv = self._inv(a[-1])
            return (inv,), (a[-1],)

        return EuclideanOps(zero=(), one=self.one, add=self.add, sub=self.sub, mul=self.mul,
                            divmod=self.divmod, size=lambda a: len(a), normal_unit=normal_unit,
                            is_zero=lambda a: not a)

    def fmt(self, a) -> str:
        return format_poly(a, self.var)


def parse_poly(s: str, R: PolyRing):
    s = s.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot parse polynomial {s!r}")
    out: dict[int, Any] = {}
    v = re.escape(R.var)
    for t in terms:
        m = re.fullmatch(rf"([+-]?)(\d+(?:/\d+)?)?\*?({v}(?:\^(\d+))?)?", t)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"bad term {t!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        e = 0 if m.group(3) is None else int(m.group(4) or 1)
        out[e] = out.get(e, 0) + sign * c
    n = max(out) + 1
    coeffs = []
    for i in range(n):
        c = out.get(i, 0)
        if R.p:
            c = Fraction(c)
            coeffs.append(int(c.numerator * pow(c.denominator, -1, R.p)) % R.p)
        else:
            coeffs.append(Fraction(c))
    return _trim(coeffs)


def format_poly(a, var: str = "x") -> str:
    if not a:
        return "0"
    parts = []
    for e in range(len(a) - 1, -1, -1):
        c = a[e]
        if c == 0:
            continue
        if e == 0:
            body = str(c)
        else:
            mon = var if e == 1 else f"{var}^{e}"
            body = mon if c == 1 else f"{c}*{mon}"
        parts.append(body)
    return "+".join(parts).replace("+-", "-")


def QuotientPolyRing(base: PolyRing, modulus) -> FiniteRing:
    """``F_p[x]/(f)`` for monic ``f``; realized as a finite ring."""
    f = base.coerce(modulus)
    if not base.p:
        raise BackendUnavailable("quotients of Q[x] have no finite additive model")
    if not f or f[-1] != 1:
        raise ValueError("modulus must be monic")
    d = len(f) - 1
    if d == 0:
        return zero_ring({"kind": "QuotPoly", "base": base.descriptor, "modulus": base.fmt(f)})

    def vec(poly):
        _, r = base.divmod(poly, f)
        return tuple(list(r) + [0] * (d - len(r)))

    table = [[vec(base.mul(tuple([0] * i + [1]), tuple([0] * j + [1]))) for j in range(d)] for i in range(d)]
    one = vec(base.one)
    name = f"{base.name}/({base.fmt(f)})"
    return FiniteRing(ab.AbGroup((base.p,) * d), table, one, name,
                      {"kind": "QuotPoly", "base": base.descriptor, "modulus": base.fmt(f)},
                      fmt=lambda a: format_poly(_trim(list(a)), base.var),
                      parse=lambda s: vec(parse_poly(s, base)))


def MonomialQuotientRing(p: int, N: int, vars: Sequence[str] = ("x", "y")) -> FiniteRing:
    """``F_p[x, y]/(x^N, y^N)`` with basis ``x^i y^j`` (``i, j < N``)."""
    mons = [(i, j) for i in range(N) for j in range(N)]
    idx = {m: k for k, m in enumerate(mons)}
    n = len(mons)

    def unit(k):
        return tuple(1 if t == k else 0 for t in range(n))

    table = []
    for a in mons:
        row = []
        for b in mons:
            c = (a[0] + b[0], a[1] + b[1])
            row.append(unit(idx[c]) if c in idx else (0,) * n)
        table.append(row)
    x, y = vars

    def fmt(v):
        parts = []
        for k, c in enumerate(v):
            if c:
                i, j = mons[k]
                mon = "*".join(s for s in ((f"{x}^{i}" if i > 1 else x) if i else "",
                                           (f"{y}^{j}" if j > 1 else y) if j else "") if s) or "1"
                parts.append(mon if c == 1 else f"{c}*{mon}")
        return "+".join(parts) or "0"

    R = FiniteRing(ab.AbGroup((p,) * n), table, unit(0), f"F{p}[{x},{y}]/({x}^{N},{y}^{N})",
                   {"kind": "Monomial", "field": f"F{p}", "vars": list(vars), "N": N}, fmt=fmt)
    R.monomials = mons
    R.monomial_index = idx
    return R


# ---------------------------------------------------------------------------
# Localizations of Z and of polynomial rings
# ---------------------------------------------------------------------------


def _int_unit_part_divides_power(a: int, s: int) -> bool:
    """True iff every prime factor of ``a`` divides ``s``."""
    a = abs(a)
    if a == 0:
        return False
    while True:
        g = gcd(a, s)
        if g == 1:
            return a == 1
        while a % g == 0:
            a //= g


class LocalizedRing(Ring):
    """``R[1/s]`` for ``R`` the integers or a polynomial ring.

    Elements are ``(numerator, k)`` meaning ``numerator / s^k`` with ``k`` minimal.
    """

    def __init__(self, base: Ring, s):
        if base is not ZZ and not isinstance(base, PolyRing):
            raise BackendUnavailable(f"cannot localize {base!r} symbolically")
        self.base = base
        self.s = base.coerce(s)
        if base is ZZ:
            self.s = abs(self.s)
        self.zero = (base.zero, 0)
        self.one = (base.one, 0)
        self.name = f"{base.name}[1/{base.fmt(self.s)}]"
        self.descriptor = {"kind": "Localized", "base": base.descriptor, "s": base.fmt(self.s)}

    def _divides(self, a, b) -> tuple[bool, Any]:
        B = self.base
        if B is ZZ:
            return (b % a == 0, b // a if a and b % a == 0 else None)
        q, r = B.divmod(b, a)
        return (not r, q if not r else None)

    def canon(self, num, k: int):
        B = self.base
        if B.is_zero(num):
            return (B.zero, 0)
        while k > 0:
            ok, q = self._divides(self.s, num)
            if not ok:
                break
            num, k = q, k - 1
        if k < 0:
            num, k = B.mul(num, B.pow(self.s, -k)), 0
        return (num, k)

    def coerce(self, x):
        if isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], int) and not isinstance(self.base, PolyRing):
            return self.canon(self.base.coerce(x[0]), x[1])
        if isinstance(x, str) and "/" in x and self.base is ZZ:
            fr = Fraction(x)
            k = 0
            den = fr.denominator
            while den != 1:
                g = gcd(den, self.s)
                if g == 1:
                    raise ValueError(f"{x} is not in {self.name}")
                k += 1
                den //= g
            num = fr * self.s ** k
            return self.canon(int(num), k)
        return self.canon(self.base.coerce(x), 0)

    def element(self, num, k: int = 0):
        return self.canon(self.base.coerce(num), k)

    def add(self, a, b):
        B = self.base
        (x, i), (y, j) = a, b
        k = max(i, j)
        return self.canon(B.add(B.mul(x, B.pow(self.s, k - i)), B.mul(y, B.pow(self.s, k - j))), k)

    def neg(self, a):
        return (self.base.neg(a[0]), a[1])

    def mul(self, a, b):
        return self.canon(self.base.mul(a[0], b[0]), a[1] + b[1])

    def is_unit(self, a) -> bool:
        x = a[0]
        if self.base is ZZ:
            return _int_unit_part_divides_power(x, self.s)
        B = self.base
        # x is a unit iff x divides a power of s
        p = B.one
        for _ in range(len(x) + 1):
            _, r = B.divmod(p, x)
            if not r:
                return True
            p = B.mul(p, self.s)
        return False

    def inverse(self, a):
        if not self.is_unit(a):
            return None
        B = self.base
        x, k = a
        p, m = B.one, 0
        while True:
            ok, q = self._divides(x, p)
            if ok:
                return self.canon(B.mul(q, B.pow(self.s, k)), m)
            p, m = B.mul(p, self.s), m + 1

    def fmt(self, a) -> str:
        num, k = a
        if k == 0:
            return self.base.fmt(num)
        den = self.base.fmt(self.s) if k == 1 else f"{self.base.fmt(self.s)}^{k}"
        return f"{self.base.fmt(num)}/{den}"

    def as_fraction(self, a) -> Fraction:
        if self.base is not ZZ:
            raise TypeError("only for integer localizations")
        return Fraction(a[0], self.s ** a[1])


# ---------------------------------------------------------------------------
# Truncated Laurent series k[[x,y]][x^-1] mod y^N
# ---------------------------------------------------------------------------


class TruncatedLaurentSeriesRing(Ring):
    """Polynomials in ``y`` of degree below ``N`` with Laurent coefficients in ``x``.

    Elements are sorted tuples of ``((i, j), c)`` for ``c x^i y^j``.  The pole
    bound ``k`` is a membership claim: an element belongs to the bounded model
    ``x^{1-k} F_p[[x, y]]`` iff every exponent of ``x`` exceeds ``-k``, i.e. its
    pole order is below ``k``.
    """

    def __init__(self, p: int, vars: Sequence[str] = ("x", "y"), pole_bound: int = 0, order_bound: int = 1):
        if order_bound < 1:
            raise ValueError("order bound must be positive")
        self.p = p
        self.vars = tuple(vars)
        self.k = pole_bound
        self.N = order_bound
        self.zero = ()
        self.one = (((0, 0), 1 % p),) if p != 1 else ()
        self.name = f"F{p}[[{vars[0]},{vars[1]}]][{vars[0]}^-1]/({vars[1]}^{order_bound})"
        self.descriptor = {"kind": "TruncSeries", "field": f"F{p}", "poleBound": pole_bound,
                           "orderBound": order_bound}

    def _norm(self, d: dict) -> tuple:
        return tuple(sorted((m, c % self.p) for m, c in d.items() if c % self.p and m[1] < self.N))

    def monomial(self, i: int, j: int, c: int = 1):
        return self._norm({(i, j): c})

    def coerce(self, x):
        if isinstance(x, int):
            return self._norm({(0, 0): x})
        if isinstance(x, dict):
            return self._norm(x)
        return self._norm(dict(x))

    def add(self, a, b):
        d = dict(a)
        for m, c in b:
            d[m] = d.get(m, 0) + c
        return self._norm(d)

    def neg(self, a):
        return self._norm({m: -c for m, c in a})

    def mul(self, a, b):
        d: dict = {}
        for (i, j), c in a:
            for (u, v), e in b:
                if j + v < self.N:
                    key = (i + u, j + v)
                    d[key] = d.get(key, 0) + c * e
        return self._norm(d)

    def pole_order(self, a) -> int:
        return max([0] + [-i for (i, _), _ in a])

    def in_bound(self, a) -> bool:
        return all(i > -self.k for (i, _), _ in a)

    def fmt(self, a) -> str:
        if not a:
            return "0"
        x, y = self.vars
        out = []
        for (i, j), c in a:
            mon = []
            if i:
                mon.append(f"{x}^{i}" if i != 1 else x)
            if j:
                mon.append(f"{y}^{j}" if j != 1 else y)
            body = "*".join(mon) or "1"
            out.append(body if c == 1 else f"{c}*{body}")
        return "+".join(out)


# ---------------------------------------------------------------------------
# Homomorphisms, covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingHom:
    source: Ring
    target: Ring
    action: Callable = field(compare=False)
    s: Any = None  # defining element for localization maps
    name: str = ""

    def __call__(self, a):
        return self.action(a)

    def compose(self, other: "RingHom") -> "RingHom":
        """``self . other``."""
        return RingHom(other.source, self.target, lambda a: self.action(other.action(a)),
                       name=f"{self.name}.{other.name}")

    def additive_matrix(self) -> list:
        """Matrix of the map on additive coordinates (finite or integer source)."""
        S, T = self.source, self.target
        cols = []
        for b in S.group.basis():
            cols.append(T.to_vec(self(S.from_vec(b))))
        return ab.from_columns(cols, T.group.rank)

    def check(self, samples: Iterable | None = None) -> bool:
        S, T = self.source, self.target
        if T.one != self(S.one) or T.zero != self(S.zero):
            return False
        xs = list(samples) if samples is not None else (S.elements() if S.is_finite else [])
        xs = list(xs)[:40]
        for a in xs:
            for b in xs:
                if self(S.add(a, b)) != T.add(self(a), self(b)):
                    return False
                if self(S.mul(a, b)) != T.mul(self(a), self(b)):
                    return False
        return True


def identity_hom(R: Ring) -> RingHom:
    return RingHom(R, R, lambda a: a, s=R.one, name="id")


@dataclass(frozen=True)
class Cover:
    ring: Ring
    elements: tuple
    bezout_witness: tuple

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a cover needs at least one element")
        if not self.verify():
            raise ValueError("Bezout witness does not sum to 1")

    @property
    def d(self) -> int:
        return len(self.elements)

    def verify(self) -> bool:
        R = self.ring
        total = R.zero
        for c, s in zip(self.bezout_witness, self.elements):
            total = R.add(total, R.mul(c, s))
        return total == R.one

    def describe(self) -> dict:
        R = self.ring
        return {"ring": R.descriptor, "elements": [R.fmt(s) for s in self.elements],
                "witness": [R.fmt(c) for c in self.bezout_witness]}


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def idempotent_chart(R: FiniteRing, s) -> tuple:
    """The idempotent ``e`` with ``eR = s^n R`` for large ``n``.

    ``R[1/s]`` is ``eR`` with localization map ``r -> e r``; the colocalization
    of a module ``M`` is ``eM``.
    """
    if not R.is_finite:
        raise BackendUnavailable("idempotent charts need a finite ring")
    s = R.coerce(s)
    if R.rank == 0:
        return R.zero
    cache = R.__dict__.setdefault("_chart_cache", {})
    if s not in cache:
        cache[s] = _idempotent_chart(R, s)
    return cache[s]


def _idempotent_chart(R: FiniteRing, s) -> tuple:
    t = s
    size = ab.subgroup(R.group, ab.columns(R.mult_matrix(t), R.rank)).group.order
    while True:
        t2 = R.mul(t, s)
        size2 = ab.subgroup(R.group, ab.columns(R.mult_matrix(t2), R.rank)).group.order
        if size2 == size:
            break
        t, size = t2, size2
    if size == 1:
        return R.zero
    # t R = t^2 R, so t = t^2 u and e = t u
    t2 = R.mul(t, t)
    u = ab.preimage(R.group, R.group, R.mult_matrix(t2), t)
    e = R.mul(t, u)
    assert R.mul(e, e) == e
    return e


class _RescaledSub:
    """A cyclic subgroup with coordinates multiplied by a unit."""

    def __init__(self, sub, u: int, uinv: int, n: int):
        self._sub, self.u, self.uinv, self.n = sub, u, uinv, n
        self.group = sub.group
        self.ambient = sub.ambient

    def coords(self, g):
        c = self._sub.coords(g)
        return None if c is None else ((c[0] * self.uinv) % self.n,)

    def embed(self, s):
        return self._sub.embed(((s[0] * self.u) % self.n,))


def _chart_ring(R: FiniteRing, e, descriptor: dict, name: str) -> tuple[FiniteRing, RingHom, "ab.Sub"]:
    sub = ab.subgroup(R.group, ab.columns(R.mult_matrix(e), R.rank))
    G = sub.group
    if G.rank == 1 and G.element_order(sub.coords(e)) == G.order:
        # cyclic chart: rescale coordinates so that the unit is (1,)
        n = G.invariants[0]
        u = sub.coords(e)[0]
        uinv = pow(u, -1, n)
        sub = _RescaledSub(sub, u, uinv, n)
    basis = [sub.embed(b) for b in G.basis()]
    table = [[sub.coords(R.mul(a, b)) for b in basis] for a in basis]
    one = sub.coords(e) if G.rank else ()
    if G.rank == 0:
        S = zero_ring(descriptor)
        S.name = name
    else:
        S = FiniteRing(G, table, one, name, descriptor)
    if S.rank == 1 and S.one == (1,):
        S._fmt = lambda a: str(a[0])
    hom = RingHom(R, S, lambda r: sub.coords(R.mul(e, r)) if G.rank else (), s=None, name="loc")
    S.chart_parent = R
    S.chart_idempotent = e
    S.chart_embed = sub.embed
    return S, hom, sub


def localize_ring(R: Ring, s) -> tuple[Ring, RingHom]:
    """``R[1/s]`` together with the localization homomorphism."""
    if isinstance(R, FiniteRing):
        s = R.coerce(s)
        e = idempotent_chart(R, s)
        desc = {"kind": "Localized", "base": R.descriptor, "s": R.fmt(s)}
        if e == R.one:
            hom = RingHom(R, R, lambda a: a, s=s, name="loc")
            return R, hom
        S, hom, _ = _chart_ring(R, e, desc, f"{R.name}[1/{R.fmt(s)}]")
        return S, RingHom(R, S, hom.action, s=s, name="loc")
    if R is ZZ or isinstance(R, PolyRing):
        s = R.coerce(s)
        if R.is_zero(s):
            Z = zero_ring({"kind": "Localized", "base": R.descriptor, "s": "0"})
            return Z, RingHom(R, Z, lambda a: (), s=s, name="loc")
        if R.is_unit(s):
            return R, RingHom(R, R, lambda a: a, s=s, name="loc")
        L = LocalizedRing(R, s)
        return L, RingHom(R, L, lambda a: L.canon(a, 0), s=s, name="loc")
    if isinstance(R, LocalizedRing):
        t = R.coerce(s)
        if R.is_unit(t):
            return R, RingHom(R, R, lambda a: a, s=t, name="loc")
        B = R.base
        num, k = t
        if B.is_zero(num):
            Z = zero_ring({"kind": "Localized", "base": R.descriptor, "s": "0"})
            return Z, RingHom(R, Z, lambda a: (), s=t, name="loc")
        L = LocalizedRing(B, B.mul(R.s, num))

        def act(a, L=L, R=R):
            x, i = a
            # x / s^i = x t'^i / (s t')^i with t' = num
            return L.canon(B.mul(x, B.pow(num, i)), i)

        return L, RingHom(R, L, act, s=t, name="loc")
    raise BackendUnavailable(f"localization of {R!r} is not supported")


def _signed(R: FiniteRing, a) -> int:
    v = R.int_value(a)
    if v is None:
        return 0
    n = R.group.invariants[0]
    return v - n if v > n // 2 else v


def _finite_norm(R: FiniteRing, a) -> int:
    v = R.int_value(a)
    if v is not None:
        return abs(_signed(R, a))
    return sum(1 for c in a if c)


def unit_ideal_witness(R: Ring, elements: Sequence) -> Cover | None:
    """Coefficients ``c_j`` with ``sum c_j s_j = 1``, or ``None`` if the ideal is proper."""
    if not elements:
        raise ValueError("need at least one element")
    els = tuple(R.coerce(x) for x in elements)
    if R is ZZ:
        g, coeffs = els[0], [1]
        for x in els[1:]:
            g2, u, v = _xgcd_int(g, x)
            coeffs = [c * u for c in coeffs] + [v]
            g = g2
        if abs(g) != 1:
            return None
        if g == -1:
            coeffs = [-c for c in coeffs]
        if len(els) == 2:
            a, b = els
            x, y = coeffs
            best = (abs(x) + abs(y), x, y)
            for t in range(-3, 4):
                cand = (x + t * b, y - t * a)
                score = abs(cand[0]) + abs(cand[1])
                if score < best[0]:
                    best = (score, *cand)
            coeffs = [best[1], best[2]]
        return Cover(R, els, tuple(coeffs))
    if isinstance(R, FiniteRing):
        if R.rank == 0:
            return Cover(R, els, tuple(R.zero for _ in els))
        d = len(els)
        n = R.rank
        G = ab.AbGroup(R.group.invariants * d)
        mat = [[0] * (n * d) for _ in range(n)]
        for j, s in enumerate(els):
            m = R.mult_matrix(s)
            for r in range(n):
                for c in range(n):
                    mat[r][j * n + c] = m[r][c]
        x0 = ab.preimage(G, R.group, mat, R.one)
        if x0 is None:
            return None
        ker = ab.kernel(G, R.group, mat)
        best = None
        if ker.group.order <= 4096:
            cands = (G.add(x0, ker.embed(k)) for k in ker.group.elements())
        else:
            cands = iter([x0])
        for x in cands:
            cs = [tuple(x[j * n:(j + 1) * n]) for j in range(d)]
            score = (sum(_finite_norm(R, c) for c in cs), [(-_signed(R, c) if R.int_value(c) is not None else 0) for c in cs])
            if best is None or score < best[0]:
                best = (score, cs)
        return Cover(R, els, tuple(best[1]))
    if isinstance(R, PolyRing):
        g, coeffs = els[0], [R.one]
        for x in els[1:]:
            g2, u, v = R.xgcd(g, x)
            coeffs = [R.mul(c, u) for c in coeffs] + [v]
            g = g2
        if len(els) == 1:
            g, inv = R.monic(g)
            coeffs = [inv]
        if g != R.one:
            return None
        return Cover(R, els, tuple(coeffs))
    if isinstance(R, LocalizedRing):
        B = R.base
        nums = [x[0] for x in els]
        base_cov_g, coeffs = nums[0], [B.one]
        for x in nums[1:]:
            if B is ZZ:
                g2, u, v = _xgcd_int(base_cov_g, x)
            else:
                g2, u, v = B.xgcd(base_cov_g, x)
            coeffs = [B.mul(c, u) for c in coeffs] + [v]
            base_cov_g = g2
        g_el = R.canon(base_cov_g, 0)
        ginv = R.inverse(g_el)
        if ginv is None:
            return None
        out = tuple(R.mul(R.mul(R.canon(c, 0), R.canon(B.pow(R.s, x[1]), 0)), ginv)
                    for c, x in zip(coeffs, els))
        return Cover(R, els, out)
    raise BackendUnavailable(f"unit ideal decision for {R!r} is not supported")


def _xgcd_int(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def trivial_extension(R: FiniteRing, M) -> tuple[Ring, RingHom]:
    """``S = R + M`` with ``M^2 = 0``; returns ``(S, inclusion R -> S)``.

    ``M`` is any finite module object exposing ``group`` and ``act(r)``.
    """
    if not isinstance(R, FiniteRing):
        raise BackendUnavailable("trivial extensions need a finite base ring")
    G_M = M.group
    if G_M.rank == 0:
        return R, identity_hom(R)
    nR, nM = R.rank, G_M.rank
    n = nR + nM
    G = ab.AbGroup(R.group.invariants + G_M.invariants)
    rbasis = R.group.basis()
    acts = [M.act(b) for b in rbasis]
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < nR and j < nR:
                v = tuple(R.table[i][j]) + (0,) * nM
            elif i < nR:
                col = [acts[i][r][j - nR] for r in range(nM)]
                v = (0,) * nR + tuple(col)
            elif j < nR:
                col = [acts[j][r][i - nR] for r in range(nM)]
                v = (0,) * nR + tuple(col)
            else:
                v = (0,) * n
            row.append(v)
        table.append(row)
    one = tuple(R.one) + (0,) * nM
    desc = {"kind": "TrivExt", "base": R.descriptor, "module": getattr(M, "descriptor", {"group": list(G_M.invariants)})}
    S = FiniteRing(G, table, one, f"{R.name} x| M", desc)
    S.base_rank = nR
    inc = RingHom(R, S, lambda r: tuple(r) + (0,) * nM, name="incl")
    return S, inc


def smith_decompose(matrix: Sequence[Sequence[Any]], ring: Ring = ZZ):
    """``(D, U, V)`` with ``U A V = D`` diagonal and ``d_1 | d_2 | ...``."""
    if ring is ZZ:
        sm = smith_int(matrix, len(matrix), len(matrix[0]) if matrix else 0)
        return sm.S, sm.U, sm.V
    if isinstance(ring, PolyRing):
        A = [[ring.coerce(x) for x in row] for row in matrix]
        return smith_generic(A, ring.euclidean_ops(), len(A), len(A[0]) if A else 0)
    raise BackendUnavailable(f"Smith normal form needs a PID backend, got {ring!r}")


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------

_KEYS = {
    "Z": {"kind"},
    "Zmod": {"kind", "n"},
    "Poly": {"kind", "field", "var"},
    "QuotPoly": {"kind", "base", "modulus"},
    "Localized": {"kind", "base", "s"},
    "TrivExt": {"kind", "base", "module"},
    "TruncSeries": {"kind", "field", "poleBound", "orderBound", "vars"},
    "Monomial": {"kind", "field", "vars", "N"},
}


def _field_char(s: str) -> int:
    if s == "Q":
        return 0
    m = re.fullmatch(r"F(\d+)", s)
    if not m:
        raise ValueError(f"unknown field {s!r}")
    return int(m.group(1))


def ring_from_descriptor(d: dict) -> Ring:
    """Strict parser for ring descriptors (unknown keys are rejected)."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("ring descriptor must be an object with a 'kind'")
    kind = d["kind"]
    if kind not in _KEYS:
        raise ValueError(f"unknown ring kind {kind!r}")
    extra = set(d) - _KEYS[kind]
    if extra:
        raise ValueError(f"unknown keys for {kind}: {sorted(extra)}")
    if kind == "Z":
        return ZZ
    if kind == "Zmod":
        return ModularRing(int(d["n"]))
    if kind == "Poly":
        return PolyRing(_field_char(d["field"]), d.get("var", "x"))
    if kind == "QuotPoly":
        base = ring_from_descriptor(d["base"])
        if not isinstance(base, PolyRing):
            raise ValueError("QuotPoly base must be a Poly ring")
        return QuotientPolyRing(base, d["modulus"])
    if kind == "Localized":
        base = ring_from_descriptor(d["base"])
        return localize_ring(base, d["s"])[0]
    if kind == "TrivExt":
        from .modules import module_from_descriptor

        base = ring_from_descriptor(d["base"])
        M = module_from_descriptor({"module": {**d["module"], "ring": d["base"]}} if "ring" not in d["module"] else {"module": d["module"]})
        return trivial_extension(base, M)[0]
    if kind == "TruncSeries":
        return TruncatedLaurentSeriesRing(_field_char(d["field"]), tuple(d.get("vars", ("x", "y"))),
                                          int(d["poleBound"]), int(d["orderBound"]))
    if kind == "Monomial":
        return MonomialQuotientRing(_field_char(d["field"]), int(d["N"]), tuple(d.get("vars", ("x", "y"))))
    raise AssertionError(kind)
