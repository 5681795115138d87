"""A closed symbolic universe of abelian groups beyond finite presentation.

Summands are ``Z``, ``Z/n``, ``Z[1/P]``, ``Q`` and the Pruefer-type groups
``Z[1/P]/Z`` (``P`` a set of primes, possibly cofinite; ``Q/Z`` is the case of
all primes).  Hom and Ext^1 between summands come from lookup rules; when a
value leaves the universe (p-adic completions and the like) the lookup says
"nonzero, not representable" instead of guessing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

from .linalg import BackendUnavailable


def prime_factors(n: int) -> frozenset:
    n = abs(n)
    out = set()
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return frozenset(out)


@dataclass(frozen=True)
class PrimeSet:
    """A finite set of primes, or the complement of one (``cofinite=True``)."""

    primes: frozenset = frozenset()
    cofinite: bool = False

    @staticmethod
    def of(n: int) -> "PrimeSet":
        return PrimeSet(prime_factors(n))

    @staticmethod
    def all() -> "PrimeSet":
        return PrimeSet(frozenset(), True)

    def __contains__(self, p: int) -> bool:
        return (p not in self.primes) if self.cofinite else (p in self.primes)

    def is_empty(self) -> bool:
        return not self.cofinite and not self.primes

    def union(self, o: "PrimeSet") -> "PrimeSet":
        if self.cofinite and o.cofinite:
            return PrimeSet(self.primes & o.primes, True)
        if self.cofinite:
            return PrimeSet(self.primes - o.primes, True)
        if o.cofinite:
            return PrimeSet(o.primes - self.primes, True)
        return PrimeSet(self.primes | o.primes)

    def intersect(self, o: "PrimeSet") -> "PrimeSet":
        return self.complement().union(o.complement()).complement()

    def complement(self) -> "PrimeSet":
        return PrimeSet(self.primes, not self.cofinite)

    def minus(self, o: "PrimeSet") -> "PrimeSet":
        return self.intersect(o.complement())

    def issubset(self, o: "PrimeSet") -> bool:
        return self.minus(o).is_empty()

    def part(self, n: int) -> int:
        """The largest divisor of ``n`` all of whose primes lie in the set."""
        out = 1
        for p in prime_factors(n):
            if p in self:
                while n % p == 0:
                    n //= p
                    out *= p
        return out

    def label(self) -> str:
        body = ",".join(str(p) for p in sorted(self.primes))
        if self.cofinite:
            return "all" if not self.primes else f"all\\{{{body}}}"
        return body


@dataclass(frozen=True)
class Summand:
    kind: str  # "Z", "Zn", "L", "Q", "D"
    n: int = 0
    P: PrimeSet = PrimeSet()

    def __post_init__(self):
        if self.kind == "Zn" and self.n < 2:
            raise ValueError("Z/n needs n >= 2")
        if self.kind in ("L", "D") and self.P.is_empty():
            raise ValueError("empty prime set")

    def label(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Zn":
            return f"Z/{self.n}"
        if self.kind == "Q":
            return "Q"
        if self.kind == "L":
            return f"Z[1/{self.P.label()}]" if not self.P.cofinite else f"Z[1/P], P={self.P.label()}"
        if self.P.cofinite and not self.P.primes:
            return "Q/Z"
        return f"Z[1/{self.P.label()}]/Z"

    @property
    def is_finite(self) -> bool:
        return self.kind == "Zn"

    @property
    def is_divisible(self) -> bool:
        return self.kind in ("Q", "D")


Z = Summand("Z")
QQ = Summand("Q")


def Zn(n: int) -> Summand:
    return Summand("Zn", n)


def L(P) -> Summand:
    return Summand("L", P=P if isinstance(P, PrimeSet) else PrimeSet.of(P))


def D(P) -> Summand:
    return Summand("D", P=P if isinstance(P, PrimeSet) else PrimeSet.of(P))


def _sorted(ss: Iterable[Summand]) -> tuple:
    order = {"Z": 0, "L": 1, "Q": 2, "Zn": 3, "D": 4}
    return tuple(sorted(ss, key=lambda s: (order[s.kind], s.n, s.P.label())))


@dataclass(frozen=True)
class TameModule:
    """A finite direct sum of tame summands, viewed over ``Z`` (``over`` = 1) or ``Z[1/over]``."""

    summands: tuple
    over: int = 1

    def __post_init__(self):
        object.__setattr__(self, "summands", _sorted(self.summands))
        if self.over != 1:
            Ps = PrimeSet.of(self.over)
            for s in self.summands:
                if not s_invertible(s, Ps):
                    raise ValueError(f"{s.label()} is not a Z[1/{self.over}]-module")

    def label(self) -> str:
        body = " + ".join(s.label() for s in self.summands) or "0"
        return body if self.over == 1 else f"{body} (over Z[1/{self.over}])"

    __repr__ = label

    def is_zero(self) -> bool:
        return not self.summands

    def restrict(self) -> "TameModule":
        return TameModule(self.summands, 1)

    @property
    def descriptor(self) -> dict:
        return {"tame": self.label()}


def s_invertible(s: Summand, Ps: PrimeSet) -> bool:
    """Does every prime in ``Ps`` act invertibly on the summand?"""
    if s.kind == "Z":
        return Ps.is_empty()
    if s.kind == "Zn":
        return all(p not in Ps for p in prime_factors(s.n))
    if s.kind == "L":
        return Ps.issubset(s.P)
    if s.kind == "Q":
        return True
    return Ps.intersect(s.P).is_empty()


def tame(*ss: Summand, over: int = 1) -> TameModule:
    return TameModule(tuple(ss), over)


# ---------------------------------------------------------------------------
# Lookup rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Value:
    """Result of a lookup: a tame module, or a nonzero value outside the universe."""

    module: TameModule | None
    nonzero: bool
    note: str = ""

    @property
    def is_zero(self) -> bool:
        return not self.nonzero


def _val(*ss: Summand, note: str = "") -> Value:
    ss = tuple(s for s in ss if s is not None)
    return Value(TameModule(ss), bool(ss), note)


def _big(note: str) -> Value:
    return Value(None, True, note)


def _cyc(n: int) -> Summand | None:
    return Zn(n) if n >= 2 else None


def hom_summand(a: Summand, b: Summand) -> Value:
    k1, k2 = a.kind, b.kind
    if k1 == "Z":
        return _val(b)
    if k1 == "Zn":
        if k2 in ("Z", "L", "Q"):
            return _val()
        if k2 == "Zn":
            return _val(_cyc(gcd(a.n, b.n)))
        return _val(_cyc(b.P.part(a.n)))
    if k1 == "L":
        if k2 == "Z":
            return _val(note="no nonzero divisible-by-P elements in Z")
        if k2 == "Zn":
            return _val(_cyc(a.P.complement().part(b.n)))
        if k2 == "L":
            return _val(b) if a.P.issubset(b.P) else _val()
        if k2 == "Q":
            return _val(QQ)
        common = a.P.intersect(b.P)
        if common.is_empty():
            return _val(b)
        return _big("contains p-adic numbers for p in " + common.label())
    if k1 == "Q":
        if k2 in ("Z", "Zn", "L"):
            return _val()
        if k2 == "Q":
            return _val(QQ)
        return _big("Hom(Q, Pruefer) is a Q-vector space of continuum dimension")
    # Pruefer
    if k2 in ("Z", "Zn", "L", "Q"):
        return _val()
    common = a.P.intersect(b.P)
    if common.is_empty():
        return _val()
    return _big("product of p-adic integers for p in " + common.label())


def ext1_summand(a: Summand, b: Summand) -> Value:
    k1, k2 = a.kind, b.kind
    if k1 == "Z" or k2 in ("Q", "D"):
        return _val()
    if k1 == "Zn":
        if k2 == "Z":
            return _val(Zn(a.n))
        if k2 == "Zn":
            return _val(_cyc(gcd(a.n, b.n)))
        return _val(_cyc(b.P.complement().part(a.n)))
    if k1 == "L":
        if k2 == "Zn":
            return _val(note="finite groups are cotorsion")
        if k2 == "Z":
            return _big("Ext(Z[1/P], Z) contains the P-adic completion modulo Z")
        if a.P.issubset(b.P):
            return _val()
        return _big("lim^1 of multiplication by a prime outside the target")
    if k1 == "Q":
        if k2 == "Zn":
            return _val()
        return _big("Ext(Q, -) of a reduced torsion-free group")
    # Pruefer
    if k2 == "Zn":
        return _val(_cyc(a.P.part(b.n)))
    if k2 == "Z":
        return _big("product of p-adic integers")
    if a.P.issubset(b.P):
        return _val()
    return _big("p-adic completion for p outside the target primes")


def _combine(vals: list[Value]) -> Value:
    if any(v.module is None for v in vals):
        return Value(None, any(v.nonzero for v in vals), "; ".join(v.note for v in vals if v.note))
    ss = [s for v in vals for s in v.module.summands]
    return Value(TameModule(tuple(ss)), bool(ss))


def tame_hom(A: TameModule, B: TameModule) -> Value:
    return _combine([hom_summand(a, b) for a in A.summands for b in B.summands])


def tame_ext1(A: TameModule, B: TameModule) -> Value:
    return _combine([ext1_summand(a, b) for a in A.summands for b in B.summands])


def is_contraadjusted(M: TameModule) -> bool:
    """Whitelist: finite, divisible (``Q`` and Pruefer) summands only."""
    return all(s.kind in ("Zn", "Q", "D") for s in M.summands)


def is_injective_over(M: TameModule) -> bool:
    """Injective over ``Z[1/over]`` iff divisible."""
    return all(s.is_divisible for s in M.summands)


def tame_localize(M: TameModule, s: int) -> TameModule:
    Ps = PrimeSet.of(s)
    out = []
    for x in M.summands:
        if x.kind == "Z":
            out.append(L(Ps) if not Ps.is_empty() else Z)
        elif x.kind == "Zn":
            m = Ps.complement().part(x.n)
            if m >= 2:
                out.append(Zn(m))
        elif x.kind == "L":
            out.append(L(x.P.union(Ps)))
        elif x.kind == "Q":
            out.append(QQ)
        else:
            P = x.P.minus(Ps)
            if not P.is_empty():
                out.append(D(P))
    return TameModule(tuple(out), abs(s) if abs(s) != 1 else 1)


def tame_colocalize(M: TameModule, s):
    """``Hom_Z(Z[1/s], M)`` by lookup; refuses when the answer leaves the universe."""
    from .modules import Colocalization
    from .rings import ZZ, localize_ring

    s = int(s)
    Ps = PrimeSet.of(s)
    if Ps.is_empty():
        return Colocalization(M, ZZ, "identity", M, "s is a unit")
    v = tame_hom(TameModule((L(Ps),)), M)
    if v.module is None:
        raise BackendUnavailable(f"colocalization of {M.label()} at {s} is not tame: {v.note}")
    Lr, _ = localize_ring(ZZ, s)
    C = TameModule(v.module.summands, abs(s))
    return Colocalization(C, Lr, "evaluation at 1", C.restrict(), "lookup")


def tame_from_localized_module(N) -> TameModule:
    """Restriction of scalars of a f.g. ``Z[1/s]``-module to ``Z``."""
    R = N.ring
    Ps = PrimeSet.of(R.s)
    out = []
    for d in N.invariant_factors():
        if d == 0:
            out.append(L(Ps))
        else:
            out.append(Zn(d))
    return TameModule(tuple(out), R.s)


_TOKEN = re.compile(r"^(Z|Q|Q/Z|Z/(\d+)|Z\[1/([\d,]+)\](/Z)?)$")


def parse_tame(text: str) -> TameModule:
    """Parse ``"Z + Z/4 + Z[1/6] + Q + Z[1/2]/Z + Q/Z"``."""
    out = []
    for tok in [t.strip() for t in text.split("+") if t.strip()]:
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"unknown tame summand {tok!r}")
        if tok == "Z":
            out.append(Z)
        elif tok == "Q":
            out.append(QQ)
        elif tok == "Q/Z":
            out.append(D(PrimeSet.all()))
        elif m.group(2):
            out.append(Zn(int(m.group(2))))
        else:
            ps = frozenset()
            for x in m.group(3).split(","):
                ps |= prime_factors(int(x))
            P = PrimeSet(ps)
            out.append(D(P) if m.group(4) else L(P))
    return TameModule(tuple(out))


# ---------------------------------------------------------------------------
# Products versus localization
# ---------------------------------------------------------------------------


@dataclass
class ProductWitness:
    """``x = (f^{-m})_{m < window}`` in ``prod Z[1/f]`` against ``(prod Z)[1/f]``.

    ``x`` lies in the image of ``(prod Z)[1/f]`` exactly when ``f^k x`` is
    integral for some ``k``; ``min_exponent`` is the least such ``k`` and
    ``blockers[k]`` names a coordinate that is not integral after scaling by ``f^k``.
    """

    f: int
    window: int
    min_exponent: int
    blockers: dict

    @property
    def grows(self) -> bool:
        return self.min_exponent == self.window - 1

    def to_json(self) -> dict:
        return {"f": self.f, "window": self.window, "min_exponent": self.min_exponent,
                "blockers": {str(k): v for k, v in self.blockers.items()}, "grows": self.grows}


def product_localization_witness(window: int, f: int = 2) -> ProductWitness:
    if abs(f) < 2:
        raise ValueError("f must be neither zero nor a unit")
    if window < 1:
        raise ValueError("window must be positive")
    x = [Fraction(1, f ** m) for m in range(window)]
    blockers = {}
    k = 0
    while True:
        bad = [m for m, c in enumerate(x) if (c * f ** k).denominator != 1]
        if not bad:
            break
        blockers[k] = bad[0]
        k += 1
    return ProductWitness(f, window, k, blockers)
