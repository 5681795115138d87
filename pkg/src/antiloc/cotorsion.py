"""Cotorsion pairs over finite rings: classes, orthogonality, approximations.

Classes are membership predicates on :class:`FPModule` objects.  All
classes are understood to be closed under isomorphism and to contain the
zero module.  A :class:`CotorsionPairSpec` carries the approximation
providers (special precover and special preenvelope sequences).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from . import modules as md
from .ext import ext
from .linalg import BackendUnavailable
from .modules import FPModule, ModuleMap, ShortExactSequence
from .rings import ZZ, FiniteRing

MAX_PERP_BOUND = 1 << 12
MAX_MAPS = 512
MAX_CLASSES = 16
CLOSURE_BOUND = 16    # closure spot checks use members up to this order

CLOSURE_FLAGS = ("extensions", "kernels_of_admissible_epis", "cokernels_of_admissible_monos", "direct_summands")


# ---------------------------------------------------------------------------
# Classes
# ---------------------------------------------------------------------------


@dataclass
class ClassSpec:
    name: str
    membership: Callable[[FPModule], bool | None]
    closure: dict = field(default_factory=dict)
    kind: str = "decision"          # or "certificate"
    degenerate: str = ""
    everything: bool = False        # membership is constantly true

    def member(self, M: FPModule) -> bool | None:
        if M.is_zero_module():
            return True
        return self.membership(M)

    def __repr__(self) -> str:
        return f"ClassSpec({self.name})"


def _flags(**kw) -> dict:
    out = {k: False for k in CLOSURE_FLAGS}
    out.update(kw)
    return out


ALL_CLOSED = _flags(extensions=True, kernels_of_admissible_epis=True, cokernels_of_admissible_monos=True,
                    direct_summands=True)


def all_modules() -> ClassSpec:
    return ClassSpec("all", lambda M: True, dict(ALL_CLOSED), everything=True)


def zero_class() -> ClassSpec:
    return ClassSpec("zero", lambda M: M.is_zero_module(), dict(ALL_CLOSED))


def injective_class() -> ClassSpec:
    return ClassSpec("injective", md.is_injective_module,
                     _flags(extensions=True, cokernels_of_admissible_monos=True, direct_summands=True))


def projective_class() -> ClassSpec:
    return ClassSpec("projective", md.is_projective_module,
                     _flags(extensions=True, kernels_of_admissible_epis=True, direct_summands=True))


def flat_class() -> ClassSpec:
    s = projective_class()
    s.name, s.degenerate = "flat", "degenerate over finite rings: f.g. flat = projective"
    return s


def veryflat_class() -> ClassSpec:
    s = projective_class()
    s.name, s.degenerate = "veryflat-cert", "degenerate over finite rings: f.g. very flat = projective"
    return s


def contraadjusted_class() -> ClassSpec:
    s = all_modules()
    s.name, s.degenerate = "contraadjusted", "degenerate over finite rings: every module is contraadjusted"
    return s


def cotorsion_class() -> ClassSpec:
    """``Ext^1(F, C) = 0`` for flat ``F``: everything over a finite (perfect) ring, finite groups over ``Z``,
    and the series model through contraadjustedness."""
    from . import ext as ex
    from .tame import TameModule, is_contraadjusted

    def member(M) -> bool | None:
        if isinstance(M, ex.SeriesModule):
            return ex.series_contraadjusted(M).is_contraadjusted
        if isinstance(M, TameModule):
            if all(s.is_finite for s in M.summands):
                return True
            return False if not is_contraadjusted(M) else None
        if isinstance(M.ring, FiniteRing):
            return True
        if M.ring is ZZ:
            return all(d != 0 for d in M.invariant_factors())
        return None

    return ClassSpec("cotorsion", member, _flags(extensions=True, cokernels_of_admissible_monos=True,
                                                 direct_summands=True),
                     degenerate="degenerate over finite rings: every module is cotorsion")


def chart_class(e, label: str | None = None) -> ClassSpec:
    """Modules on which the idempotent ``e`` acts as the identity (``eM = M``)."""
    def member(M: FPModule) -> bool:
        return md.scalar_map(M, e).is_surjective()
    return ClassSpec(label or f"chart({e})", member, dict(ALL_CLOSED))


def listed_class(name: str, modules: list, closure: dict | None = None) -> ClassSpec:
    """The isomorphism closure of ``modules`` (plus zero)."""
    mods = list(modules)

    def member(M: FPModule) -> bool:
        return any(md.is_isomorphic(M, X) for X in mods)
    return ClassSpec(name, member, closure or _flags())


REGISTRY: dict[str, Callable[[], ClassSpec]] = {
    "all": all_modules,
    "zero": zero_class,
    "injective": injective_class,
    "projective": projective_class,
    "flat": flat_class,
    "veryflat-cert": veryflat_class,
    "contraadjusted": contraadjusted_class,
    "cotorsion": cotorsion_class,
}


def class_by_name(name: str) -> ClassSpec:
    if name not in REGISTRY:
        raise KeyError(f"unknown class {name!r}; known: {sorted(REGISTRY)}")
    return REGISTRY[name]()


# ---------------------------------------------------------------------------
# Approximation sequences
# ---------------------------------------------------------------------------


@dataclass
class ApproximationSequence:
    """``precover``: ``0 -> B -> A -> E -> 0``; ``preenvelope``: ``0 -> E -> B -> A -> 0``.

    ``A`` is tagged with the left class and ``B`` with the right class.
    """

    kind: str
    sequence: ShortExactSequence
    left: ClassSpec
    right: ClassSpec

    @property
    def E(self) -> FPModule:
        return self.sequence.C if self.kind == "precover" else self.sequence.A

    @property
    def left_term(self) -> FPModule:
        return self.sequence.B if self.kind == "precover" else self.sequence.C

    @property
    def right_term(self) -> FPModule:
        return self.sequence.A if self.kind == "precover" else self.sequence.B

    def problems(self) -> list[str]:
        out = list(self.sequence.problems())
        if self.left.member(self.left_term) is False:
            out.append(f"{self.left_term.describe()} is not in {self.left.name}")
        if self.right.member(self.right_term) is False:
            out.append(f"{self.right_term.describe()} is not in {self.right.name}")
        if self.kind == "precover" and not self.sequence.p.is_surjective():
            out.append("middle term does not map onto E")
        return out

    def validate(self) -> bool:
        return not self.problems()

    def describe(self) -> str:
        s = self.sequence
        return f"0 -> {s.A.describe()} -> {s.B.describe()} -> {s.C.describe()} -> 0"


def _trivial_precover(E: FPModule) -> ShortExactSequence:
    Z = md.zero_module(E.ring)
    return ShortExactSequence(md.zero_map(Z, E), md.identity_map(E))


def _trivial_preenvelope(E: FPModule) -> ShortExactSequence:
    Z = md.zero_module(E.ring)
    return ShortExactSequence(md.identity_map(E), md.zero_map(E, Z))


def free_precover(E: FPModule) -> ShortExactSequence:
    return md.ses_from_surjection(md.free_cover(E))


def injective_preenvelope(E: FPModule) -> ShortExactSequence:
    return md.ses_from_inclusion(md.injective_embedding(E))


# ---------------------------------------------------------------------------
# Pairs
# ---------------------------------------------------------------------------


@dataclass
class CotorsionPairSpec:
    ambient: ClassSpec
    left: ClassSpec
    right: ClassSpec
    precover_provider: Callable[[FPModule], ShortExactSequence] | None = None
    preenvelope_provider: Callable[[FPModule], ShortExactSequence] | None = None
    name: str = ""

    @property
    def degenerate(self) -> str:
        return "; ".join(x for x in (self.left.degenerate, self.right.degenerate) if x)

    def precover(self, E: FPModule) -> ApproximationSequence:
        if self.precover_provider is None:
            raise BackendUnavailable(f"no precover provider for {self.name}")
        return ApproximationSequence("precover", self.precover_provider(E), self.left, self.right)

    def preenvelope(self, E: FPModule) -> ApproximationSequence:
        if self.preenvelope_provider is None:
            raise BackendUnavailable(f"no preenvelope provider for {self.name}")
        return ApproximationSequence("preenvelope", self.preenvelope_provider(E), self.left, self.right)

    def __repr__(self) -> str:
        return f"CotorsionPairSpec({self.name or (self.left.name + ', ' + self.right.name)})"


def pair_all_injective(precover: str = "trivial") -> CotorsionPairSpec:
    """``precover="salce-hull"`` pushes a free cover out along the injective hull of its kernel."""
    pair = CotorsionPairSpec(all_modules(), all_modules(), injective_class(),
                             _trivial_precover, injective_preenvelope, "(all, injective)")
    if precover == "salce-hull":
        pair.precover_provider = lambda E: salce_transform(pair, E, "precover").sequence
    elif precover != "trivial":
        raise ValueError("precover is 'trivial' or 'salce-hull'")
    return pair


def pair_projective_all() -> CotorsionPairSpec:
    return CotorsionPairSpec(all_modules(), projective_class(), all_modules(),
                             free_precover, _trivial_preenvelope, "(projective, all)")


def pair_flat_all() -> CotorsionPairSpec:
    return CotorsionPairSpec(all_modules(), flat_class(), all_modules(),
                             free_precover, _trivial_preenvelope, "(flat, all)")


def pair_veryflat_contraadjusted() -> CotorsionPairSpec:
    return CotorsionPairSpec(all_modules(), veryflat_class(), contraadjusted_class(),
                             free_precover, _trivial_preenvelope, "(veryflat, contraadjusted)")


PAIRS = {
    "all-injective": pair_all_injective,
    "projective-all": pair_projective_all,
    "flat-all": pair_flat_all,
    "veryflat-contraadjusted": pair_veryflat_contraadjusted,
}


# ---------------------------------------------------------------------------
# Ext helpers
# ---------------------------------------------------------------------------


class ExtCache:
    """Memoized vanishing of ``Ext^n(A, B)`` for modules held alive by the caller."""

    def __init__(self):
        self._d: dict = {}

    def zero(self, A: FPModule, B: FPModule, n: int = 1) -> bool:
        key = (id(A), id(B), n)
        if key not in self._d:
            if A.is_zero_module() or B.is_zero_module():
                self._d[key] = True
            else:
                self._d[key] = ext(A, B, n).is_zero()
        return self._d[key]


def enumerate_up_to(R: FiniteRing, bound: int) -> list[FPModule]:
    if not isinstance(R, FiniteRing):
        raise BackendUnavailable("enumeration needs a finite ring")
    if bound > MAX_PERP_BOUND:
        raise ValueError(f"bound {bound} exceeds {MAX_PERP_BOUND}")
    return md.enumerate_modules_by_order(R, bound)


def brute_force_perp(S: list[FPModule] | ClassSpec, R: FiniteRing, bound: int, side: str = "right",
                     cache: ExtCache | None = None) -> list[FPModule]:
    """``S^{perp_1}`` (``side="right"``) or ``{}^{perp_1}S`` among modules of order ``<= bound``.

    ``S`` is a list of modules or a class (then its members up to the bound).
    """
    cache = cache or ExtCache()
    universe = enumerate_up_to(R, bound)
    gens = [M for M in universe if S.member(M)] if isinstance(S, ClassSpec) else list(S)
    if side == "right":
        return [X for X in universe if all(cache.zero(G, X) for G in gens)]
    if side == "left":
        return [X for X in universe if all(cache.zero(X, G) for G in gens)]
    raise ValueError("side is 'left' or 'right'")


# ---------------------------------------------------------------------------
# Orthogonality and hereditariness
# ---------------------------------------------------------------------------


@dataclass
class CheckLine:
    name: str
    status: str
    witness: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": _wjson(self.witness), "detail": self.detail}


def _wjson(w):
    if w is None or isinstance(w, (str, int, float, bool)):
        return w
    if isinstance(w, FPModule):
        return w.describe()
    if isinstance(w, ShortExactSequence):
        return f"0 -> {w.A.describe()} -> {w.B.describe()} -> {w.C.describe()} -> 0"
    if isinstance(w, (list, tuple)):
        return [_wjson(x) for x in w]
    if isinstance(w, dict):
        return {str(k): _wjson(v) for k, v in w.items()}
    return repr(w)


@dataclass
class PairReport:
    pair: str
    checks: list
    degenerate: str = ""

    @property
    def status(self) -> str:
        return "PASS" if all(c.status in ("PASS", "SKIPPED") for c in self.checks) else "FAIL"

    def check(self, name: str) -> CheckLine:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"pair": self.pair, "status": self.status, "degenerate": self.degenerate,
                "checks": [c.to_json() for c in self.checks]}


def orthogonality_check(pair: CotorsionPairSpec, instances: list[FPModule], maximality: bool = True,
                        cache: ExtCache | None = None) -> PairReport:
    """``Ext^1(A, B) = 0`` on the instances, and maximality of both classes on them."""
    cache = cache or ExtCache()
    L = [M for M in instances if pair.left.member(M)]
    Rt = [M for M in instances if pair.right.member(M)]
    checks = []
    bad = next(((A, B) for A in L for B in Rt if not cache.zero(A, B)), None)
    checks.append(CheckLine("ext1-vanishing", "PASS" if bad is None else "FAIL", bad,
                            f"{len(L)} left x {len(Rt)} right"))
    if maximality:
        # an object outside the right class must see a left object with Ext^1 != 0, and dually
        w = None
        for X in instances:
            if pair.right.member(X):
                continue
            if all(cache.zero(A, X) for A in L):
                w = X
                break
        checks.append(CheckLine("right-maximal", "PASS" if w is None else "FAIL", w))
        w = None
        for X in instances:
            if pair.left.member(X):
                continue
            if all(cache.zero(X, B) for B in Rt):
                w = X
                break
        checks.append(CheckLine("left-maximal", "PASS" if w is None else "FAIL", w))
    return PairReport(pair.name, checks, pair.degenerate)


def _maps_between(A: FPModule, B: FPModule, limit: int = MAX_MAPS, seed: int = 0):
    """All maps ``A -> B``, or ``limit`` seeded random ones when Hom is larger."""
    H = md.hom_module(A, B)
    if H.order is None:
        raise BackendUnavailable("infinite Hom group")
    if H.order <= limit:
        return H.maps()
    rng = random.Random(seed)
    inv = H.module.group.invariants
    return (H.to_map(tuple(rng.randrange(d) for d in inv)) for _ in range(limit))


def kernel_closure_witness(cls: ClassSpec, members: list[FPModule]) -> ShortExactSequence | None:
    """An epimorphism between members whose kernel leaves the class."""
    if cls.everything:
        return None
    members = [M for M in members if M.order <= CLOSURE_BOUND]
    for A, B in itertools.product(members, repeat=2):
        for f in _maps_between(A, B):
            if not f.is_surjective():
                continue
            K, inc = md.kernel(f)
            if cls.member(K) is False:
                return ShortExactSequence(inc, f)
    return None


def cokernel_closure_witness(cls: ClassSpec, members: list[FPModule]) -> ShortExactSequence | None:
    """A monomorphism between members whose cokernel leaves the class."""
    if cls.everything:
        return None
    members = [M for M in members if M.order <= CLOSURE_BOUND]
    for A, B in itertools.product(members, repeat=2):
        for f in _maps_between(A, B):
            if not f.is_injective():
                continue
            Q, q = md.cokernel(f)
            if cls.member(Q) is False:
                return ShortExactSequence(f, q)
    return None


def extension_closure_witness(cls: ClassSpec, members: list[FPModule]) -> ShortExactSequence | None:
    """An extension of members whose middle term leaves the class (all classes enumerated)."""
    if cls.everything:
        return None
    members = [M for M in members if M.order <= CLOSURE_BOUND]
    for A, C in itertools.product(members, repeat=2):
        if A.is_zero_module() or C.is_zero_module():
            continue
        E = ext(C, A, 1)
        if E.order is None:
            raise BackendUnavailable("infinite Ext^1")
        G = E.value.group
        if E.order <= MAX_CLASSES:
            xs = G.elements()
        else:
            rng = random.Random(0)
            xs = (tuple(rng.randrange(d) for d in G.invariants) for _ in range(MAX_CLASSES))
        for x in xs:
            ses = E.extension_of(x)
            if cls.member(ses.B) is False:
                return ses
    return None


def summand_closure_witness(cls: ClassSpec, instances: list[FPModule]) -> tuple | None:
    for X, Y in itertools.combinations_with_replacement(instances, 2):
        S = md.direct_sum(X, Y).module
        if cls.member(S):
            for Z in (X, Y):
                if cls.member(Z) is False:
                    return (S, Z)
    return None


def verify_closure(cls: ClassSpec, instances: list[FPModule]) -> list[CheckLine]:
    """Spot-verify each declared closure flag on the instances."""
    members = [M for M in instances if cls.member(M)]
    out = []
    for flag, on in cls.closure.items():
        if not on:
            continue
        if flag == "extensions":
            w = extension_closure_witness(cls, members)
        elif flag == "kernels_of_admissible_epis":
            w = kernel_closure_witness(cls, members)
        elif flag == "cokernels_of_admissible_monos":
            w = cokernel_closure_witness(cls, members)
        else:
            w = summand_closure_witness(cls, instances)
        out.append(CheckLine(f"{cls.name}:{flag}", "PASS" if w is None else "FAIL", w))
    return out


def hereditary_check(pair: CotorsionPairSpec, instances: list[FPModule], degrees: tuple = (2, 3),
                     cache: ExtCache | None = None) -> PairReport:
    """Conditions (i)-(iv): kernel closure of the left class, cokernel closure of the
    right class, ``Ext^2`` vanishing and ``Ext^n`` vanishing for the listed ``n``."""
    cache = cache or ExtCache()
    L = [M for M in instances if pair.left.member(M)]
    Rt = [M for M in instances if pair.right.member(M)]
    checks = []
    w = kernel_closure_witness(pair.left, L)
    checks.append(CheckLine("(i)", "PASS" if w is None else "FAIL", w, "kernels of epimorphisms in the left class"))
    w = cokernel_closure_witness(pair.right, Rt)
    checks.append(CheckLine("(ii)", "PASS" if w is None else "FAIL", w, "cokernels of monomorphisms in the right class"))
    bad = next(((A, B) for A in L for B in Rt if not cache.zero(A, B, 2)), None)
    checks.append(CheckLine("(iii)", "PASS" if bad is None else "FAIL", bad, "Ext^2"))
    bad = next(((A, B, n) for n in degrees for A in L for B in Rt if not cache.zero(A, B, n)), None)
    checks.append(CheckLine("(iv)", "PASS" if bad is None else "FAIL", bad, f"Ext^n for n in {list(degrees)}"))
    return PairReport(pair.name, checks, pair.degenerate)


# ---------------------------------------------------------------------------
# Salce transform
# ---------------------------------------------------------------------------


def salce_transform(pair: CotorsionPairSpec, E: FPModule, direction: str) -> ApproximationSequence:
    """Build the missing approximation of ``E`` from the opposite provider.

    ``preenvelope``: embed ``E`` into an injective ``I`` with cokernel ``Q``,
    take a special precover ``0 -> B' -> A' -> Q -> 0`` and pull it back along
    ``I -> Q``.  ``precover``: dually, cover ``E`` by a free ``F`` with kernel
    ``K``, take a special preenvelope of ``K`` and push out along ``K -> F``.
    """
    if direction == "preenvelope":
        if pair.precover_provider is None:
            raise BackendUnavailable("the Salce transform to preenvelopes needs a precover provider")
        emb = injective_preenvelope(E)
        if emb.C.is_zero_module():
            return ApproximationSequence("preenvelope", emb, pair.left, pair.right)
        pre = pair.precover_provider(emb.C)
        pb = md.pullback(emb.p, pre.p)           # P = I x_Q A'
        P = pb.module
        # E -> P: (i(e), 0)
        cols = []
        for g in E.group.basis():
            v = None
            target_i = emb.i.apply(g)
            z = _pullback_point(pb, target_i, pre.B.zero() if pre.B.group.rank else ())
            cols.append(z)
        j = md.ModuleMap(E, P, md._shape(md.ab.from_columns(cols, P.group.rank), P.group.rank, E.group.rank))
        q = pb.p2                                 # P -> A'
        return ApproximationSequence("preenvelope", ShortExactSequence(j, q), pair.left, pair.right)
    if direction == "precover":
        if pair.preenvelope_provider is None:
            raise BackendUnavailable("the Salce transform to precovers needs a preenvelope provider")
        cov = free_precover(E)
        if cov.A.is_zero_module():
            return ApproximationSequence("precover", cov, pair.left, pair.right)
        env = pair.preenvelope_provider(cov.A)   # 0 -> K -> B -> A' -> 0
        po = md.pushout(cov.i, env.i)            # Q = F (+)_K B
        Q = po.module
        # Q -> E: (f, b) -> p(f)
        both = md.hstack([po.i1, po.i2], md.direct_sum(cov.B, env.B).module)
        cols = []
        for g in Q.group.basis():
            w = both.preimage(g)
            cols.append(cov.p.apply(w[:cov.B.group.rank]))
        p = md.ModuleMap(Q, E, md._shape(md.ab.from_columns(cols, E.group.rank), E.group.rank, Q.group.rank))
        return ApproximationSequence("precover", ShortExactSequence(po.i2, p), pair.left, pair.right)
    raise ValueError("direction is 'precover' or 'preenvelope'")


def _pullback_point(pb, a, b) -> tuple:
    """The element of the pullback with components ``(a, b)``."""
    # pullback sits inside A (+) B via (p1, p2)
    emb = md.vstack([pb.p1, pb.p2], md.direct_sum(pb.p1.target, pb.p2.target).module)
    z = emb.preimage(tuple(a) + tuple(b))
    if z is None:
        raise ValueError("point is not in the pullback")
    return z


# ---------------------------------------------------------------------------
# Restriction to exact subcategories
# ---------------------------------------------------------------------------


def _chart_map(f: ModuleMap, e, src, tgt) -> ModuleMap:
    (S, si), (T, ti) = src, tgt
    cols = [ti.preimage(f.apply(si.apply(b))) for b in S.group.basis()]
    return md.ModuleMap(S, T, md._shape(md.ab.from_columns(cols, T.group.rank), T.group.rank, S.group.rank))


def chart_sequence(ses: ShortExactSequence, e) -> ShortExactSequence:
    """Apply the exact functor ``M -> eM`` to a short exact sequence."""
    a, b, c = (md.chart_module(M, e) for M in (ses.A, ses.B, ses.C))
    return ShortExactSequence(_chart_map(ses.i, e, a, b), _chart_map(ses.p, e, b, c))


@dataclass
class RestrictionReport:
    hypothesis: str
    status: str
    checks: list
    approximations: list

    def to_json(self) -> dict:
        return {"hypothesis": self.hypothesis, "status": self.status, "checks": [c.to_json() for c in self.checks],
                "approximations": [a.describe() for a in self.approximations]}


def restriction_check(pair: CotorsionPairSpec, sub: ClassSpec, instances: list[FPModule], hypothesis: str,
                      idempotent=None) -> RestrictionReport:
    """Restrict ``pair`` to the exact subcategory ``sub``.

    Hypotheses: ``a`` (kernel-closed, left inside ``sub``), ``b``
    (cokernel-closed, right inside ``sub``), ``c`` (``sub`` is the chart of
    an idempotent and both classes are closed under direct summands; the
    approximations are the chart components of the ambient ones).
    """
    inE = [M for M in instances if sub.member(M)]
    checks = []
    w = extension_closure_witness(sub, inE)
    checks.append(CheckLine("extension-closed", "PASS" if w is None else "FAIL", w))
    if hypothesis == "a":
        w = kernel_closure_witness(sub, inE)
        checks.append(CheckLine("kernel-closed", "PASS" if w is None else "FAIL", w))
        w = next((M for M in instances if pair.left.member(M) and not sub.member(M)), None)
        checks.append(CheckLine("left-inside", "PASS" if w is None else "FAIL", w))
    elif hypothesis == "b":
        w = cokernel_closure_witness(sub, inE)
        checks.append(CheckLine("cokernel-closed", "PASS" if w is None else "FAIL", w))
        w = next((M for M in instances if pair.right.member(M) and not sub.member(M)), None)
        checks.append(CheckLine("right-inside", "PASS" if w is None else "FAIL", w))
    elif hypothesis == "c":
        if idempotent is None:
            raise ValueError("hypothesis (c) needs the chart idempotent")
        ok = all(sub.member(md.chart_module(M, idempotent)[0]) for M in instances)
        checks.append(CheckLine("chart-projection", "PASS" if ok else "FAIL"))
        for cls in (pair.left, pair.right):
            w = summand_closure_witness(cls, instances)
            checks.append(CheckLine(f"{cls.name}:direct_summands", "PASS" if w is None else "FAIL", w))
    else:
        raise ValueError("hypothesis is 'a', 'b' or 'c'")
    if any(c.status == "FAIL" for c in checks):
        return RestrictionReport(hypothesis, "FAIL", checks, [])
    approx = []
    for E in inE:
        for kind in ("precover", "preenvelope"):
            a = getattr(pair, kind)(E)
            if hypothesis == "c":
                a = ApproximationSequence(kind, chart_sequence(a.sequence, idempotent), pair.left, pair.right)
            approx.append(a)
            probs = a.problems()
            s = a.sequence
            outside = [M.describe() for M in (s.A, s.B, s.C) if not sub.member(M)]
            if probs or outside:
                checks.append(CheckLine(f"{kind}({E.describe()})", "FAIL", a.describe(),
                                        "; ".join(probs + [f"{x} leaves the subcategory" for x in outside])))
    status = "PASS" if all(c.status == "PASS" for c in checks) else "FAIL"
    return RestrictionReport(hypothesis, status, checks, approx)
