"""Cochain complexes of modules over finite rings (and f.g. modules over Z).

A :class:`Complex` is either bounded (finitely many nonzero terms) or
two-sided periodic: the block ``C^0 -> ... -> C^{p-1}`` repeats, with
``d^{p-1}: C^{p-1} -> C^0`` closing the loop.  Hom computations between
complexes run over a finite window of degrees: the support of a bounded
argument, or one common period when both arguments are periodic.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from math import lcm
from typing import Any, Iterable

from . import abelian as ab
from . import modules as md
from .linalg import BackendUnavailable
from .modules import FPModule, ModuleMap, HomModule

MAX_EXHAUSTIVE = 1 << 16


# ---------------------------------------------------------------------------
# Complexes and chain maps
# ---------------------------------------------------------------------------


class Complex:
    """``d^n: C^n -> C^{n+1}``; terms missing from ``terms`` are zero."""

    def __init__(self, ring, terms: dict, diffs: dict | None = None, period: int | None = None,
                 name: str = "", check: bool = True):
        self.ring = ring
        self.period = period
        self.name = name
        self._zero = md.zero_module(ring)
        if period is not None:
            if set(terms) != set(range(period)):
                raise ValueError("periodic complexes list the degrees 0..p-1")
        self.terms = {n: M for n, M in terms.items() if period is not None or not M.is_zero_module()}
        self.diffs = {}
        for n, f in (diffs or {}).items():
            if f.source.group.rank and f.target.group.rank:
                self.diffs[n] = f
        if check:
            bad = self.square_problems()
            if bad:
                raise ValueError("d.d != 0 in degrees " + ", ".join(map(str, bad)))

    # -- access ------------------------------------------------------------

    def key(self, n: int) -> int:
        return n % self.period if self.period else n

    def term(self, n: int) -> FPModule:
        return self.terms.get(self.key(n), self._zero)

    def d(self, n: int) -> ModuleMap:
        f = self.diffs.get(self.key(n))
        if f is not None:
            return f
        return md.zero_map(self.term(n), self.term(n + 1))

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    def support(self) -> list[int]:
        if self.period:
            return list(range(self.period))
        return sorted(n for n, M in self.terms.items() if not M.is_zero_module())

    def window(self) -> list[int]:
        s = self.support()
        return list(range(s[0], s[-1] + 1)) if s else []

    def is_zero(self) -> bool:
        return all(M.is_zero_module() for M in self.terms.values())

    def square_problems(self) -> list[int]:
        out = []
        for n in self.window():
            a, b = self.d(n), self.d(n + 1)
            if a.source.group.rank and b.target.group.rank and not b.compose(a).is_zero():
                out.append(n)
        return out

    def shift(self, k: int) -> "Complex":
        """``C[k]^n = C^{n+k}`` with differential ``(-1)^k d``."""
        sign = -1 if k % 2 else 1
        if self.period:
            if k % self.period:
                raise ValueError("shift a periodic complex by a multiple of its period only")
            return Complex(self.ring, dict(self.terms), {n: f.scale(sign) if sign < 0 else f
                                                         for n, f in self.diffs.items()}, self.period,
                           name=f"{self.name}[{k}]", check=False)
        terms = {n - k: M for n, M in self.terms.items()}
        diffs = {n - k: (f.scale(sign) if sign < 0 else f) for n, f in self.diffs.items()}
        return Complex(self.ring, terms, diffs, name=f"{self.name}[{k}]", check=False)

    def describe(self) -> str:
        if self.name:
            return self.name
        parts = [f"{n}:{self.term(n).describe()}" for n in self.window()]
        tag = f" (period {self.period})" if self.period else ""
        return "[" + ", ".join(parts) + "]" + tag

    def to_json(self) -> dict:
        out = {"ring": self.ring.descriptor,
               "terms": {str(n): {"invariants": list(self.term(n).group.invariants)} for n in self.window()},
               "differentials": {str(n): self.d(n).matrix for n in self.window()}}
        if self.period:
            out["periodicity"] = {"period": self.period, "block": [0, self.period - 1],
                                  "identification": "C^{n+p} = C^n, d^{n+p} = d^n"}
        return out

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True, default=str).encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"Complex({self.describe()})"


def zero_complex(R) -> Complex:
    return Complex(R, {})


def module_complex(M: FPModule, n: int = 0) -> Complex:
    """``M`` concentrated in degree ``n``."""
    return Complex(M.ring, {n: M})


def disk_complex(E: FPModule, n: int = 0) -> Complex:
    """``D_{n,n+1}(E)``: ``E = E`` in degrees ``n, n+1``."""
    if E.is_zero_module():
        return zero_complex(E.ring)
    return Complex(E.ring, {n: E, n + 1: E}, {n: md.identity_map(E)}, name=f"D_{n},{n + 1}({E.describe()})")


def complex_from_maps(ring, start: int, modules: list, maps: list, name: str = "") -> Complex:
    """``modules[0] -> modules[1] -> ...`` starting in degree ``start``."""
    terms = {start + i: M for i, M in enumerate(modules)}
    diffs = {start + i: f for i, f in enumerate(maps)}
    return Complex(ring, terms, diffs, name=name)


def direct_sum_complex(A: Complex, B: Complex) -> tuple[Complex, list, list]:
    """``A (+) B`` with the inclusion and projection chain maps."""
    if A.period or B.period:
        raise BackendUnavailable("sums of periodic complexes are not needed")
    degs = sorted(set(A.window()) | set(B.window()))
    terms, incs, projs = {}, {}, {}
    for n in degs:
        ds = md.direct_sum(A.term(n), B.term(n))
        terms[n] = ds
    diffs = {}
    for n in degs:
        if n + 1 not in terms:
            continue
        src, tgt = terms[n], terms[n + 1]
        blocks = [tgt.injections[0].compose(A.d(n)).compose(src.projections[0]),
                  tgt.injections[1].compose(B.d(n)).compose(src.projections[1])]
        diffs[n] = blocks[0] + blocks[1]
    C = Complex(A.ring, {n: t.module for n, t in terms.items()}, diffs, check=False)
    iA = ChainMap(A, C, {n: terms[n].injections[0] for n in degs}, check=False)
    iB = ChainMap(B, C, {n: terms[n].injections[1] for n in degs}, check=False)
    pA = ChainMap(C, A, {n: terms[n].projections[0] for n in degs}, check=False)
    pB = ChainMap(C, B, {n: terms[n].projections[1] for n in degs}, check=False)
    return C, [iA, iB], [pA, pB]


class ChainMap:
    """Degreewise maps ``f^n: A^n -> B^n`` commuting with the differentials."""

    def __init__(self, source: Complex, target: Complex, maps: dict, check: bool = True):
        self.source, self.target = source, target
        self.maps = maps
        if check:
            bad = self.problems()
            if bad:
                raise ValueError("not a chain map in degrees " + ", ".join(map(str, bad)))

    def at(self, n: int) -> ModuleMap:
        P = _period(self.source, self.target)
        k = n % P if P else n
        f = self.maps.get(k)
        if f is None:
            return md.zero_map(self.source.term(n), self.target.term(n))
        return f

    def degrees(self) -> list[int]:
        return _window(self.source, self.target)

    def problems(self) -> list[int]:
        out = []
        for n in self.degrees():
            a = self.target.d(n).compose(self.at(n))
            b = self.at(n + 1).compose(self.source.d(n))
            if not a.equals(b):
                out.append(n)
        return out

    def is_zero(self) -> bool:
        return all(self.at(n).is_zero() for n in self.degrees())

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, {n: self.at(n) + (-other.at(n)) for n in self.degrees()},
                        check=False)


def identity_chain_map(C: Complex) -> ChainMap:
    return ChainMap(C, C, {n: md.identity_map(C.term(n)) for n in C.window()}, check=False)


def zero_chain_map(A: Complex, B: Complex) -> ChainMap:
    return ChainMap(A, B, {}, check=False)


@dataclass
class Homotopy:
    """``h^n: A^n -> B^{n-1}``."""

    source: Complex
    target: Complex
    maps: dict

    def at(self, n: int) -> ModuleMap:
        P = _period(self.source, self.target)
        f = self.maps.get(n % P if P else n)
        if f is None:
            return md.zero_map(self.source.term(n), self.target.term(n - 1))
        return f

    def verifies(self, f: ChainMap) -> bool:
        """``f = d h + h d`` in every degree of the window."""
        for n in f.degrees():
            lhs = f.at(n)
            rhs = self.target.d(n - 1).compose(self.at(n)) + self.at(n + 1).compose(self.source.d(n))
            if not lhs.equals(rhs):
                return False
        return True


def _period(A: Complex, B: Complex) -> int | None:
    if A.period and B.period:
        return lcm(A.period, B.period)
    return None


def _window(A: Complex, B: Complex) -> list[int]:
    """Degrees carrying all data of a graded map ``A -> B`` (with a margin of one)."""
    P = _period(A, B)
    if P:
        return list(range(P))
    bounded = [C for C in (A, B) if not C.period]
    if len(bounded) == 2:
        wa, wb = A.window(), B.window()
        if not wa or not wb:
            return []
        lo, hi = max(wa[0], wb[0]), min(wa[-1], wb[-1])
        lo2, hi2 = min(wa[0], wb[0]), max(wa[-1], wb[-1])
        return list(range(lo2 - 1, hi2 + 2))
    w = bounded[0].window()
    return list(range(w[0] - 1, w[-1] + 2)) if w else []


# ---------------------------------------------------------------------------
# Graded Hom groups
# ---------------------------------------------------------------------------


class _Graded:
    """``(+)_n Hom(A^n, B^{n+shift})`` over a window, as one abelian group."""

    def __init__(self, A: Complex, B: Complex, degrees: list[int], shift: int):
        self.A, self.B, self.shift = A, B, shift
        self.blocks = []  # (n, HomModule, offset)
        off = 0
        for n in degrees:
            S, T = A.term(n), B.term(n + shift)
            if S.group.rank == 0 or T.group.rank == 0:
                continue
            H = md.hom_module(S, T)
            r = H.module.group.rank
            if r == 0:
                continue
            self.blocks.append((n, H, off))
            off += r
        self.group = ab.direct_sum(*[H.module.group for _, H, _ in self.blocks]) if self.blocks else ab.TRIVIAL
        self._index = {n: (H, o) for n, H, o in self.blocks}

    def block(self, n: int):
        return self._index.get(n)

    def vector(self, maps: dict, key=lambda n: n) -> tuple:
        """Coordinates of the graded map ``{n: f^n}``."""
        out = [0] * self.group.rank
        for n, H, off in self.blocks:
            f = maps.get(key(n))
            if f is None:
                continue
            c = H.from_map(f)
            out[off:off + len(c)] = c
        return self.group.reduce(out)

    def maps(self, v) -> dict:
        out = {}
        for n, H, off in self.blocks:
            r = H.module.group.rank
            out[n] = H.to_map(tuple(v[off:off + r]))
        return out

    def add_into(self, vec: list, n: int, f: ModuleMap) -> None:
        b = self._index.get(n)
        if b is None:
            return
        H, off = b
        c = H.from_map(f)
        for i, x in enumerate(c):
            vec[off + i] += x


def _key(A: Complex, B: Complex):
    P = _period(A, B)
    return (lambda n: n % P) if P else (lambda n: n)


def chain_map_group(A: Complex, B: Complex):
    """The group of chain maps ``A -> B`` as a subgroup of the graded Hom group."""
    degs = _window(A, B)
    key = _key(A, B)
    G0 = _Graded(A, B, degs, 0)
    G1 = _Graded(A, B, degs, 1)
    cols = []
    for n, H, off in G0.blocks:
        for b in H.module.group.basis():
            f = H.to_map(b)
            vec = [0] * G1.group.rank
            # (d f - f d) at degree n gets d_B f^n; at degree n-1 gets -f^n d_A^{n-1}
            G1.add_into(vec, n, B.d(n).compose(f))
            m = key(n - 1)
            G1.add_into(vec, m, -(f.compose(A.d(n - 1))))
            cols.append(G1.group.reduce(vec))
    if G1.group.rank and cols:
        sub = ab.kernel(G0.group, G1.group, ab.from_columns(cols, G1.group.rank))
    else:
        sub = ab.subgroup(G0.group, G0.group.basis())
    return G0, sub


def _homotopy_operator(A: Complex, B: Complex):
    """The map ``h -> d h + h d`` from ``(+) Hom(A^n, B^{n-1})`` to ``(+) Hom(A^n, B^n)``."""
    degs = _window(A, B)
    key = _key(A, B)
    Gh = _Graded(A, B, degs, -1)
    G0 = _Graded(A, B, degs, 0)
    cols = []
    for n, H, off in Gh.blocks:
        for b in H.module.group.basis():
            h = H.to_map(b)
            vec = [0] * G0.group.rank
            G0.add_into(vec, n, B.d(n - 1).compose(h))
            G0.add_into(vec, key(n - 1), h.compose(A.d(n - 1)))
            cols.append(G0.group.reduce(vec))
    mat = ab.from_columns(cols, G0.group.rank) if G0.group.rank and cols else [[0] * 0 for _ in range(G0.group.rank)]
    return Gh, G0, mat


@dataclass
class NullHomotopyResult:
    homotopy: Homotopy | None
    certificate: dict

    @property
    def found(self) -> bool:
        return self.homotopy is not None


def nullhomotopy_solve(f: ChainMap) -> NullHomotopyResult:
    """Solve ``f = d h + h d`` exactly, or certify that no solution exists.

    The certificate is the nonzero image of ``f`` in the cokernel of
    ``h -> d h + h d`` (recomputable by anyone holding the two complexes).
    """
    A, B = f.source, f.target
    if (not A.period and not A.window()) or (not B.period and not B.window()):
        return NullHomotopyResult(Homotopy(A, B, {}), {"reason": "a zero complex"})
    Gh, G0, mat = _homotopy_operator(A, B)
    target = G0.vector({n: f.at(n) for n in _window(A, B)})
    if G0.group.rank == 0:
        return NullHomotopyResult(Homotopy(A, B, {}), {"reason": "no nonzero graded maps"})
    if Gh.group.rank == 0:
        x = None if not G0.group.is_zero(target) else ()
    else:
        x = ab.preimage(Gh.group, G0.group, mat, target)
    if x is not None:
        h = Homotopy(A, B, Gh.maps(x) if Gh.group.rank else {})
        assert h.verifies(f)
        return NullHomotopyResult(h, {"window": _window(A, B)})
    cols = ab.columns(mat, Gh.group.rank) if Gh.group.rank else []
    q = ab.quotient(G0.group, cols)
    return NullHomotopyResult(None, {"window": _window(A, B), "cokernel": list(q.group.invariants),
                                     "class_of_f": list(q.project(target))})


def homotopy_candidates(A: Complex, B: Complex) -> Iterable[Homotopy]:
    """Every graded map ``A -> B[-1]`` (exhaustive; finite backends only)."""
    degs = _window(A, B)
    blocks = []
    for n in degs:
        S, T = A.term(n), B.term(n - 1)
        if S.group.rank == 0 or T.group.rank == 0:
            continue
        blocks.append((n, list(md.hom_module(S, T).maps())))
    total = 1
    for _, maps in blocks:
        total *= len(maps)
    if total > MAX_EXHAUSTIVE:
        raise BackendUnavailable(f"homotopy search space {total} exceeds {MAX_EXHAUSTIVE}")
    for combo in itertools.product(*[maps for _, maps in blocks]):
        yield Homotopy(A, B, {n: h for (n, _), h in zip(blocks, combo)})


def exhaustive_nullhomotopic(f: ChainMap) -> bool:
    return any(h.verifies(f) for h in homotopy_candidates(f.source, f.target))


def chain_maps(A: Complex, B: Complex) -> list[ChainMap]:
    """All chain maps (finite groups only)."""
    G0, sub = chain_map_group(A, B)
    if sub.group.order is None:
        raise BackendUnavailable("infinite chain-map group")
    out = []
    for x in sub.group.elements():
        out.append(ChainMap(A, B, G0.maps(sub.embed(x)), check=False))
    return out


def chain_map_basis(A: Complex, B: Complex) -> list[ChainMap]:
    G0, sub = chain_map_group(A, B)
    return [ChainMap(A, B, G0.maps(sub.embed(b)), check=False) for b in sub.group.basis()]


def homotopy_classes(A: Complex, B: Complex) -> ab.AbGroup:
    """``Hom_H(A, B)``: chain maps modulo null-homotopic ones."""
    G0, sub = chain_map_group(A, B)
    Gh, G0b, mat = _homotopy_operator(A, B)
    if sub.group.rank == 0:
        return ab.TRIVIAL
    gens = []
    for c in (ab.columns(mat, Gh.group.rank) if Gh.group.rank else []):
        z = sub.coords(c)
        if z is None:
            raise AssertionError("null-homotopic map is not a chain map")
        gens.append(z)
    return ab.quotient(sub.group, gens).group


# ---------------------------------------------------------------------------
# Acyclicity and cocycles
# ---------------------------------------------------------------------------


@dataclass
class AcyclicityReport:
    acyclic: bool
    homology: dict
    cocycles: dict
    cocycle_flags: dict

    def to_json(self) -> dict:
        return {"acyclic": self.acyclic, "homology": {str(k): v for k, v in self.homology.items()},
                "cocycles": {str(k): repr(v.group) for k, v in self.cocycles.items()},
                "cocycle_flags": {str(k): v for k, v in self.cocycle_flags.items()}}


def is_flat_module(M: FPModule) -> bool:
    """Finitely generated flat = projective over finite rings; torsion-free over Z."""
    from .rings import ZZ, FiniteRing

    if M.ring is ZZ:
        return all(d == 0 for d in M.group.invariants)
    if isinstance(M.ring, FiniteRing):
        return md.is_projective_module(M)
    raise BackendUnavailable(f"flatness over {M.ring!r}")


def is_contraadjusted_module(M: FPModule) -> bool:
    from .rings import ZZ, FiniteRing

    if isinstance(M.ring, FiniteRing) or M.group.is_finite:
        return True
    if M.ring is ZZ:
        return False
    raise BackendUnavailable(f"contraadjustedness over {M.ring!r}")


def acyclicity_report(C: Complex) -> AcyclicityReport:
    degs = C.support() if C.period else C.window()
    homology, cocycles, flags = {}, {}, {}
    acyclic = True
    for n in degs:
        Z, zin = md.kernel(C.d(n))
        prev = C.d(n - 1)
        bvecs = [zin.preimage(prev.apply(b)) for b in prev.source.group.basis()]
        H, _ = md.quotient_module(Z, bvecs)
        homology[n] = repr(H.group)
        cocycles[n] = Z
        flags[n] = {"flat": is_flat_module(Z), "contraadjusted": is_contraadjusted_module(Z)}
        if not H.is_zero_module():
            acyclic = False
    return AcyclicityReport(acyclic, homology, cocycles, flags)


# ---------------------------------------------------------------------------
# Tensor products (finite commutative rings)
# ---------------------------------------------------------------------------


def tensor_modules(M: FPModule, N: FPModule) -> FPModule:
    """``M (x)_R N`` from presentations: generators ``m_i (x) n_j``."""
    R = M.ring
    a, b = M.ngens, N.ngens
    rels = []
    for row in M.relations:
        for j in range(b):
            r = [R.zero] * (a * b)
            for i in range(a):
                r[i * b + j] = row[i]
            rels.append(r)
    for row in N.relations:
        for i in range(a):
            r = [R.zero] * (a * b)
            for j in range(b):
                r[i * b + j] = row[j]
            rels.append(r)
    return md.FPModule(R, a * b, rels)


def tensor_map(f: ModuleMap, N: FPModule, TM: FPModule, TMp: FPModule) -> ModuleMap:
    """``f (x) 1_N: M (x) N -> M' (x) N`` on the tensor models built by :func:`tensor_modules`."""
    M, Mp = f.source, f.target
    b = N.ngens
    imgs = []
    for i, g in enumerate(M.gen_vecs):
        coeffs = Mp.express(f.apply(g))
        for j in range(b):
            v = TMp.zero()
            for k, c in enumerate(coeffs):
                v = TMp.add(v, TMp.smul(c, TMp.gen_vecs[k * b + j]))
            imgs.append(v)
    return md.map_from_images(TM, TMp, imgs)


def tensor_complex_module(C: Complex, N: FPModule) -> Complex:
    """``C (x) N`` termwise (enough for tensoring with a module concentrated in degree 0)."""
    terms = {n: tensor_modules(C.term(n), N) for n in (range(C.period) if C.period else C.window())}
    diffs = {}
    for n in terms:
        nxt = C.key(n + 1)
        if nxt in terms:
            diffs[n] = tensor_map(C.d(n), N, terms[n], terms[nxt])
    return Complex(C.ring, terms, diffs, period=C.period, check=False)


# ---------------------------------------------------------------------------
# Ext^1 in the category of complexes
# ---------------------------------------------------------------------------


@dataclass
class ComplexSES:
    i: ChainMap
    p: ChainMap

    def component(self, n: int) -> md.ShortExactSequence:
        return md.ShortExactSequence(self.i.at(n), self.p.at(n))


def _kernel_complex(f: ChainMap) -> tuple[Complex, ChainMap]:
    A = f.source
    degs = A.window()
    terms, incs = {}, {}
    for n in degs:
        K, inc = md.kernel(f.at(n))
        terms[n], incs[n] = K, inc
    diffs = {}
    for n in degs:
        if n + 1 not in terms:
            continue
        K, K1 = terms[n], terms[n + 1]
        cols = [incs[n + 1].preimage(A.d(n).apply(incs[n].apply(b))) for b in K.group.basis()]
        diffs[n] = ModuleMap(K, K1, md._shape(ab.from_columns(cols, K1.group.rank), K1.group.rank, K.group.rank))
    Kc = Complex(A.ring, terms, diffs, check=False)
    return Kc, ChainMap(Kc, A, incs, check=False)


def projective_cover_complex(X: Complex) -> tuple[Complex, ChainMap]:
    """``(+)_n D_{n,n+1}(F_n) ->> X`` for free covers ``F_n ->> X^n``."""
    if X.period:
        raise BackendUnavailable("projective covers of periodic complexes are not built")
    degs = X.window()
    covers = {n: md.free_cover(X.term(n)) for n in degs}
    R = X.ring
    terms, sums = {}, {}
    for n in range(degs[0], degs[-1] + 2):
        Fn = covers[n].source if n in covers else md.zero_module(R)
        Fm = covers[n - 1].source if n - 1 in covers else md.zero_module(R)
        ds = md.direct_sum(Fn, Fm)
        terms[n], sums[n] = ds.module, ds
    diffs = {}
    for n in terms:
        if n + 1 not in terms:
            continue
        s, t = sums[n], sums[n + 1]
        # (a, b) -> (0, a)
        diffs[n] = t.injections[1].compose(s.projections[0])
    P = Complex(R, terms, diffs, check=False)
    maps = {}
    for n in terms:
        s = sums[n]
        a = covers[n].compose(s.projections[0]) if n in covers else md.zero_map(terms[n], X.term(n))
        if n - 1 in covers:
            b = X.d(n - 1).compose(covers[n - 1]).compose(s.projections[1])
            a = a + b
        maps[n] = ModuleMap(terms[n], X.term(n), a.matrix, check=False)
    return P, ChainMap(P, X, maps)


def _chain_vector(G0, f: ChainMap) -> tuple:
    return G0.vector({n: f.at(n) for n in f.degrees()})


@dataclass
class ComplexExt1:
    X: Complex
    Y: Complex
    group: ab.AbGroup
    P: Complex | None = None
    pi: ChainMap | None = None
    K: Complex | None = None
    kin: ChainMap | None = None
    _hom_K: Any = None
    _quot: Any = None
    method: str = "projective cover"

    @property
    def order(self) -> int | None:
        return self.group.order

    def elements(self):
        return self.group.elements()

    def cocycle(self, x) -> ChainMap:
        G0, sub = self._hom_K
        z = self._quot.lift_elt(x)
        return ChainMap(self.K, self.Y, G0.maps(sub.embed(z)), check=False)

    def extension_of(self, x) -> ComplexSES:
        return complex_pushout_extension(self, self.cocycle(x))


def ext1_complexes(X: Complex, Y: Complex) -> ComplexExt1:
    """``Ext^1`` in the abelian category of complexes.

    Bounded ``X``: cokernel of ``Hom_C(P, Y) -> Hom_C(K, Y)`` for the
    projective cover ``P ->> X`` with kernel ``K``.  Termwise-projective
    periodic ``X``: ``Hom_H(X, Y[1])`` (valid since the termwise Ext^1 vanish).
    """
    if X.period:
        if not all(md.is_projective_module(X.term(n)) for n in range(X.period)):
            raise BackendUnavailable("periodic first argument must be termwise projective")
        return ComplexExt1(X, Y, homotopy_classes(X, _shift_one(Y)), method="homotopy classes into Y[1]")
    if X.is_zero():
        return ComplexExt1(X, Y, ab.TRIVIAL, method="zero complex")
    P, pi = projective_cover_complex(X)
    K, kin = _kernel_complex(pi)
    GP, subP = chain_map_group(P, Y)
    GK, subK = chain_map_group(K, Y)
    cols = []
    for b in subP.group.basis():
        f = ChainMap(P, Y, GP.maps(subP.embed(b)), check=False)
        g = ChainMap(K, Y, {n: f.at(n).compose(kin.at(n)) for n in K.window()}, check=False)
        c = subK.coords(_chain_vector(GK, g))
        if c is None:
            raise AssertionError("restriction of a chain map is not a chain map")
        cols.append(c)
    q = ab.quotient(subK.group, cols)
    return ComplexExt1(X, Y, q.group, P, pi, K, kin, (GK, subK), q)


def _shift_one(Y: Complex) -> Complex:
    if Y.period:
        # Y[1] has the same terms; for even periods the sign is absorbed by the shift by p
        terms = {n: Y.term(n + 1) for n in range(Y.period)}
        diffs = {n: Y.d(n + 1).scale(-1) for n in range(Y.period)}
        return Complex(Y.ring, terms, diffs, period=Y.period, check=False)
    return Y.shift(1)


def _module_pushout_data(k: ModuleMap, phi: ModuleMap):
    po = md.pushout(k, phi)
    both = md.hstack([po.i1, po.i2], md.direct_sum(k.target, phi.target).module)
    return po, both


def complex_pushout_extension(E: ComplexExt1, phi: ChainMap) -> ComplexSES:
    """Degreewise pushout of ``K -> P`` along ``phi: K -> Y``: ``0 -> Y -> Z -> X -> 0``."""
    X, Y, P, K = E.X, E.Y, E.P, E.K
    degs = sorted(set(P.window()) | set(Y.window()))
    data = {}
    for n in degs:
        k, f = E.kin.at(n), phi.at(n)
        data[n] = _module_pushout_data(k, f)
    Z = {n: data[n][0].module for n in degs}
    diffs = {}
    for n in degs:
        if n + 1 not in Z:
            continue
        po, both = data[n]
        po1, both1 = data[n + 1]
        dsrc = both.source
        cols = []
        for b in Z[n].group.basis():
            w = both.preimage(b)
            kP = P.term(n).group.rank
            a, y = w[:kP], w[kP:]
            a1 = P.d(n).apply(a) if kP else P.term(n + 1).zero()
            y1 = Y.d(n).apply(y) if Y.term(n).group.rank else Y.term(n + 1).zero()
            cols.append(both1.apply(tuple(a1) + tuple(y1)))
        diffs[n] = ModuleMap(Z[n], Z[n + 1], md._shape(ab.from_columns(cols, Z[n + 1].group.rank),
                                                         Z[n + 1].group.rank, Z[n].group.rank))
    Zc = Complex(X.ring, Z, diffs)
    imaps, pmaps = {}, {}
    for n in degs:
        po, both = data[n]
        imaps[n] = po.i2
        kP = P.term(n).group.rank
        cols = []
        for b in Z[n].group.basis():
            w = both.preimage(b)
            a = w[:kP]
            cols.append(E.pi.at(n).apply(a) if kP else X.term(n).zero())
        pmaps[n] = ModuleMap(Z[n], X.term(n), md._shape(ab.from_columns(cols, X.term(n).group.rank),
                                                          X.term(n).group.rank, Z[n].group.rank))
    return ComplexSES(ChainMap(Y, Zc, imaps), ChainMap(Zc, X, pmaps))


# ---------------------------------------------------------------------------
# Disk-complex adjunction
# ---------------------------------------------------------------------------


@dataclass
class DiskCheck:
    degree: int
    lhs_order: int
    rhs_order: int
    bijective: bool
    images: list

    def to_json(self) -> dict:
        return {"degree": self.degree, "lhs_order": self.lhs_order, "rhs_order": self.rhs_order,
                "bijective": self.bijective, "images": self.images}


def disk_ext_check(E: FPModule, n: int, C: Complex, i: int) -> DiskCheck:
    """``Ext^i_C(D_{n,n+1}(E), C) = Ext^i_R(E, C^n)`` for ``i`` in {0, 1}.

    ``i = 0``: a chain map out of the disk is determined by its degree-``n``
    component.  ``i = 1``: an extension of complexes goes to its degree-``n``
    component.  The map is computed on every element.
    """
    from .ext import ext

    D = disk_complex(E, n)
    Cn = C.term(n)
    if i == 0:
        maps = chain_maps(D, C)
        H = md.hom_module(E, Cn)
        imgs = [H.from_map(f.at(n)) for f in maps]
        distinct = len(set(imgs)) == len(imgs)
        return DiskCheck(0, len(maps), H.order, distinct and len(imgs) == H.order, [list(x) for x in imgs])
    if i != 1:
        raise ValueError("the disk check covers degrees 0 and 1")
    X = ext1_complexes(D, C)
    R1 = ext(E, Cn, 1)
    imgs = []
    for x in X.elements():
        ses = X.extension_of(x).component(n)
        imgs.append(R1.class_of(ses))
    distinct = len(set(imgs)) == len(imgs)
    return DiskCheck(1, X.order, R1.order, distinct and len(imgs) == R1.order, [list(x) for x in imgs])


# ---------------------------------------------------------------------------
# Class membership (semi-decisions against a test set)
# ---------------------------------------------------------------------------


@dataclass
class MembershipReport:
    cls: str
    status: str         # PASS / FAIL / SKIPPED
    testset: str        # fingerprint of the test set
    tested: int
    witness: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Complex):
            w = w.to_json()
        elif w is not None and not isinstance(w, (dict, list, str)):
            w = repr(w)
        return {"class": self.cls, "status": self.status, "testset": self.testset, "tested": self.tested,
                "witness": w, "detail": self.detail}


def testset_fingerprint(tests: list) -> str:
    h = hashlib.sha256()
    for T in tests:
        h.update(T.fingerprint().encode())
    return h.hexdigest()[:16]


def _all_null(A: Complex, B: Complex) -> ChainMap | None:
    """A chain map ``A -> B`` that is not null-homotopic, or ``None``."""
    for f in chain_map_basis(A, B):
        if not nullhomotopy_solve(f).found:
            return f
    return None


def class_membership(C: Complex, cls: str, testset: list | None = None) -> MembershipReport:
    tests = list(testset or [])
    fp = testset_fingerprint(tests)
    if cls == "acyclic_flat_cocycles":
        rep = acyclicity_report(C)
        if not rep.acyclic:
            return MembershipReport(cls, "FAIL", fp, 0, rep.homology, "not acyclic")
        bad = [n for n, fl in rep.cocycle_flags.items() if not fl["flat"]]
        if bad:
            return MembershipReport(cls, "FAIL", fp, 0, {"degree": bad[0], "cocycles": repr(rep.cocycles[bad[0]].group)},
                                    "cocycles not flat")
        return MembershipReport(cls, "PASS", fp, 0, detail="exact decision")
    if C.is_zero():
        return MembershipReport(cls, "PASS", fp, len(tests), detail="zero complex")
    for T in tests:
        if cls == "homotopy_injective":
            if not acyclicity_report(T).acyclic:
                continue
            w = _all_null(T, C)
        elif cls == "coacyclic":
            w = _all_null(C, T)
        elif cls == "contraacyclic":
            w = _all_null(T, C)
        elif cls == "homotopy_flat":
            if T.period or len(T.window()) != 1:
                raise BackendUnavailable("homotopy flatness is tested against modules in degree 0")
            N = T.term(T.window()[0])
            tc = tensor_complex_module(C, N)
            if not acyclicity_report(tc).acyclic and acyclicity_report(C).acyclic:
                return MembershipReport(cls, "FAIL", fp, len(tests), T, "tensor product not acyclic")
            continue
        else:
            raise ValueError(f"unknown class {cls}")
        if w is not None:
            return MembershipReport(cls, "FAIL", fp, len(tests), T, "map not homotopic to zero")
    return MembershipReport(cls, "PASS", fp, len(tests), detail="against the named test set only")


# ---------------------------------------------------------------------------
# Generators for finite test families
# ---------------------------------------------------------------------------


def random_complex(rng: random.Random, modules: list, length: int, start: int = 0, tries: int = 20) -> Complex:
    """A random bounded complex with terms drawn from ``modules`` (d.d = 0 by rejection)."""
    R = modules[0].ring
    terms = [rng.choice(modules) for _ in range(length)]
    diffs = []
    for i in range(length - 1):
        A, B = terms[i], terms[i + 1]
        maps = list(md.hom_module(A, B).maps())
        rng.shuffle(maps)
        chosen = None
        for f in maps[:tries]:
            if i == 0 or diffs[-1] is None or f.compose(diffs[-1]).is_zero():
                chosen = f
                break
        diffs.append(chosen if chosen is not None else md.zero_map(A, B))
    return complex_from_maps(R, start, terms, diffs)
