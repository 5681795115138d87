"""Finitely presented modules and maps.

Over rings with an additive model (finite rings and the integers) a module is
computed as an abelian group together with one action matrix per additive
basis element of the ring.  Presentations are kept alongside and recomputed
from the model when a module is produced by a kernel, cokernel, pullback, and
so on.  Over other PIDs (polynomial rings, localized integers) only the
presentation and its invariant factors are available.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, prod
from typing import Any, Iterable, Sequence

from . import abelian as ab
from .linalg import BackendUnavailable, smith_int
from .rings import (ZZ, FiniteRing, IntegerRing, LocalizedRing, PolyRing, Ring, RingHom,
                    idempotent_chart, localize_ring, ring_from_descriptor, smith_decompose)

MAX_ISO_SEARCH = 2 ** 16


def _block_diag(mats: Sequence[list], sizes: Sequence[int]) -> list:
    n = sum(sizes)
    out = [[0] * n for _ in range(n)]
    off = 0
    for m, k in zip(mats, sizes):
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = m[i][j]
        off += k
    return out


def _matvec(m, v):
    return [sum(a * b for a, b in zip(row, v)) for row in m]


class FPModule:
    """A finitely presented module ``R^g / (rows of relations)``.

    ``group`` and ``acts`` give the additive model; ``acts[t]`` is the matrix
    of multiplication by the ``t``-th additive basis element of the ring.
    """

    def __init__(self, ring: Ring, ngens: int, relations: Sequence[Sequence[Any]] = (), *, _model=None,
                 name: str | None = None):
        self.ring = ring
        self._name = name
        if _model is not None:
            self._group, self._acts, self._gens = _model
            self._ngens = None
            self._relations = None
            return
        rels = []
        for row in relations:
            if len(row) != ngens:
                raise ValueError("relation length does not match generator count")
            r = tuple(ring.coerce(x) for x in row)
            if any(not ring.is_zero(x) for x in r):
                rels.append(r)
        self._ngens = ngens
        self._relations = tuple(rels)
        self._group = None
        if ring.has_additive_model:
            self._build_model()

    # -- model ---------------------------------------------------------------

    def _build_model(self) -> None:
        R = self.ring
        g = self._ngens
        n = R.group.rank
        F = ab.AbGroup(R.group.invariants * g)
        gens = []
        for row in self._relations:
            vec = [c for x in row for c in R.to_vec(x)]
            for bm in R.basis_mult:
                gens.append(_matvec(_block_diag([bm] * g, [n] * g), vec))
        q = ab.quotient(F, gens)
        self._group = q.group
        self._acts = tuple(
            ab.reduce_matrix(q.group, ab.compose(q.proj, ab.compose(_block_diag([bm] * g, [n] * g), q.lift, F.rank), F.rank))
            for bm in R.basis_mult
        )
        one = R.to_vec(R.one)
        self._gens = tuple(
            q.project(tuple(one[t] if blk == k else 0 for blk in range(g) for t in range(n))) for k in range(g)
        )
        self._free_proj = q.proj

    def _need_model(self) -> None:
        if self._group is None:
            raise BackendUnavailable(f"no additive model for modules over {self.ring!r}")

    @property
    def group(self) -> ab.AbGroup:
        self._need_model()
        return self._group

    @property
    def acts(self) -> tuple:
        self._need_model()
        return self._acts

    @property
    def gen_vecs(self) -> tuple:
        self._need_model()
        if self._ngens is None:
            self._present()
        return self._gens

    @property
    def ngens(self) -> int:
        if self._ngens is None:
            self._present()
        return self._ngens

    @property
    def relations(self) -> tuple:
        if self._relations is None:
            self._present()
        return self._relations

    def _present(self) -> None:
        """Presentation from the additive model via minimal generators."""
        gens = minimal_generators(self)
        R = self.ring
        if not gens:
            self._ngens, self._relations = 0, ()
            self._gens = ()
            return
        F = free_module(R, len(gens))
        fmap = ModuleMap(F, self, free_map_matrix(self, gens), check=False)
        K, incl = kernel(fmap)
        kg = minimal_generators(K)
        rows = [F.to_free(incl.apply(v)) for v in kg]
        self._ngens = len(gens)
        self._relations = tuple(rows)
        self._gens = tuple(gens)

    @property
    def has_model(self) -> bool:
        return self._group is not None

    # -- arithmetic ----------------------------------------------------------

    def act(self, r) -> list:
        """Matrix of multiplication by the ring element ``r``."""
        R = self.ring
        v = R.to_vec(R.coerce(r))
        k = self.group.rank
        m = [[0] * k for _ in range(k)]
        for c, X in zip(v, self.acts):
            if c:
                for i in range(k):
                    for j in range(k):
                        m[i][j] += c * X[i][j]
        return ab.reduce_matrix(self.group, m)

    def smul(self, r, v) -> tuple:
        return self.group.reduce(_matvec(self.act(r), v))

    def add(self, a, b) -> tuple:
        return self.group.add(a, b)

    def neg(self, a) -> tuple:
        return self.group.neg(a)

    def zero(self) -> tuple:
        return self.group.zero()

    def is_zero_module(self) -> bool:
        if self.has_model:
            return self.group.rank == 0
        return all(d == "unit" for d in self.invariant_factors())

    @property
    def order(self) -> int | None:
        return self.group.order

    def elements(self) -> Iterable[tuple]:
        return self.group.elements()

    def element(self, coeffs: Sequence[Any]) -> tuple:
        """``sum coeffs[k] * gen_k``."""
        out = self.zero()
        for c, gv in zip(coeffs, self.gen_vecs):
            out = self.add(out, self.smul(c, gv))
        return out

    def express(self, v) -> tuple:
        """Ring coefficients on the generators representing ``v``."""
        R = self.ring
        gens = self.gen_vecs
        F = free_module(R, len(gens))
        m = free_map_matrix(self, gens)
        x = ab.preimage(F.group, self.group, m, v)
        if x is None:
            raise ValueError("element not in module")
        return F.to_free(x)

    def to_free(self, v) -> tuple:
        """For a free module ``R^g`` in standard coordinates: split into ring elements."""
        R = self.ring
        n = R.group.rank
        return tuple(R.from_vec(tuple(v[k * n:(k + 1) * n])) for k in range(len(v) // n if n else 0))

    def submodule_closure(self, vecs: Sequence) -> ab.Sub:
        gens = []
        for v in vecs:
            for X in self.acts:
                gens.append(_matvec(X, v))
        return ab.subgroup(self.group, gens)

    # -- invariants over PIDs ------------------------------------------------

    def invariant_factors(self) -> list:
        """Invariant factors over a PID backend (``"unit"`` entries removed, ``0`` = free)."""
        R = self.ring
        rels = list(self.relations)
        g = self.ngens
        if isinstance(R, IntegerRing):
            if g == 0:
                return []
            d, _, _ = smith_decompose([list(r) for r in rels] or [[0] * g], ZZ)
            diag = [d[i][i] if i < len(d) else 0 for i in range(g)]
            return sorted([x for x in diag if x != 1], key=lambda x: (x == 0, x))
        if isinstance(R, LocalizedRing) and R.base is ZZ:
            nums = [[x[0] for x in r] for r in rels] or [[0] * g]
            d, _, _ = smith_decompose(nums, ZZ) if g else ([], None, None)
            out = []
            for i in range(g):
                x = d[i][i] if i < len(d) else 0
                if x:
                    while gcd(x, R.s) != 1:
                        x //= gcd(x, R.s)
                if x != 1:
                    out.append(x)
            return sorted(out, key=lambda x: (x == 0, x))
        if isinstance(R, PolyRing):
            if g == 0:
                return []
            d, _, _ = smith_decompose([list(r) for r in rels] or [[()] * g], R)
            diag = [d[i][i] if i < len(d) else () for i in range(g)]
            return [x for x in diag if x != R.one]
        if R.has_additive_model:
            return list(self.group.canonical_invariants())
        raise BackendUnavailable(f"invariant factors over {R!r}")

    # -- presentation --------------------------------------------------------

    @property
    def descriptor(self) -> dict:
        R = self.ring
        return {"ring": R.descriptor, "generators": self.ngens,
                "relations": [[R.fmt(x) for x in row] for row in self.relations]}

    def __repr__(self) -> str:
        if self._name:
            return self._name
        if self.has_model:
            return f"{self.ring.name}-module[{self.group!r}]"
        return f"{self.ring.name}-module(g={self.ngens}, rels={len(self.relations)})"

    def describe(self) -> str:
        if self.has_model:
            return repr(self.group)
        return repr(self)


def _from_model(ring: Ring, group: ab.AbGroup, acts, gens=None, name=None) -> FPModule:
    if gens is None:
        gens = tuple(group.basis())
    return FPModule(ring, 0, _model=(group, tuple(acts), tuple(gens)), name=name)


def free_module(R: Ring, n: int) -> FPModule:
    return FPModule(R, n, ())


def zero_module(R: Ring) -> FPModule:
    return FPModule(R, 0, ())


def cyclic_module(R: Ring, r) -> FPModule:
    """``R / (r)``."""
    return FPModule(R, 1, [[r]])


def free_map_matrix(M: FPModule, vecs: Sequence) -> list:
    """Additive matrix of ``R^k -> M`` sending ``e_j`` to ``vecs[j]``."""
    cols = []
    R = M.ring
    for v in vecs:
        for X in M.acts:
            cols.append(M.group.reduce(_matvec(X, v)))
    return ab.from_columns(cols, M.group.rank)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class ModuleMap:
    """An R-linear map, stored as an additive matrix (target coords x source coords)."""

    def __init__(self, source: FPModule, target: FPModule, matrix, check: bool = True):
        if source.ring != target.ring:
            raise ValueError("ring mismatch")
        self.source = source
        self.target = target
        self.matrix = ab.reduce_matrix(target.group, [list(r) for r in matrix]) if target.group.rank else []
        if not self.matrix and target.group.rank == 0:
            self.matrix = []
        if check and not self.is_valid():
            raise ValueError("matrix is not an R-linear map")

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def _mat(self) -> list:
        if self.target.group.rank == 0:
            return []
        return self.matrix

    def is_valid(self) -> bool:
        S, T = self.source, self.target
        m = self._mat()
        if T.group.rank and any(len(r) != S.group.rank for r in m):
            return False
        if not ab.is_hom(S.group, T.group, m):
            return False
        for XS, XT in zip(S.acts, T.acts):
            lhs = ab.compose(XT, m, T.group.rank) if T.group.rank else []
            rhs = ab.compose(m, XS, S.group.rank) if T.group.rank else []
            for j in range(S.group.rank):
                col = [lhs[i][j] - rhs[i][j] for i in range(T.group.rank)]
                if not T.group.is_zero(col):
                    return False
        return True

    def apply(self, v) -> tuple:
        return self.target.group.reduce(_matvec(self._mat(), v))

    __call__ = apply

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self . other``."""
        if other.target.group != self.source.group:
            raise ValueError("maps not composable")
        m = ab.compose(self._mat(), other._mat(), self.source.group.rank) if self.target.group.rank else []
        if self.target.group.rank and not m:
            m = [[] for _ in range(self.target.group.rank)]
        return ModuleMap(other.source, self.target, _shape(m, self.target.group.rank, other.source.group.rank), check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        m = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._mat(), other._mat())]
        return ModuleMap(self.source, self.target, m, check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [[-a for a in r] for r in self._mat()], check=False)

    def scale(self, r) -> "ModuleMap":
        X = self.target.act(r)
        m = ab.compose(X, self._mat(), self.target.group.rank) if self.target.group.rank else []
        return ModuleMap(self.source, self.target, _shape(m, self.target.group.rank, self.source.group.rank), check=False)

    def is_zero(self) -> bool:
        return all(self.target.group.is_zero(c) for c in ab.columns(self._mat(), self.source.group.rank)) if self.target.group.rank else True

    def is_injective(self) -> bool:
        return ab.is_injective(self.source.group, self.target.group, self._mat())

    def is_surjective(self) -> bool:
        if self.target.group.rank == 0:
            return True
        return ab.is_surjective(self.source.group, self.target.group, self._mat())

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def equals(self, other: "ModuleMap") -> bool:
        return (self + (-other)).is_zero()

    def preimage(self, v) -> tuple | None:
        return ab.preimage(self.source.group, self.target.group, self._mat(), v)

    def inverse(self) -> "ModuleMap":
        if not self.is_iso():
            raise ValueError("not an isomorphism")
        cols = [self.preimage(b) for b in self.target.group.basis()]
        return ModuleMap(self.target, self.source, _shape(ab.from_columns(cols, self.source.group.rank),
                                                          self.source.group.rank, self.target.group.rank), check=False)

    def ring_matrix(self) -> list:
        """Images of the source generators expressed on the target generators (g_T x g_S)."""
        cols = [self.target.express(self.apply(gv)) for gv in self.source.gen_vecs]
        return [[c[i] for c in cols] for i in range(len(self.target.gen_vecs))]

    def __repr__(self) -> str:
        return f"ModuleMap({self.source!r} -> {self.target!r})"


def _shape(m, rows: int, cols: int) -> list:
    if rows == 0:
        return []
    if not m:
        return [[0] * cols for _ in range(rows)]
    return [list(r) + [0] * (cols - len(r)) for r in m]


def identity_map(M: FPModule) -> ModuleMap:
    k = M.group.rank
    return ModuleMap(M, M, [[1 if i == j else 0 for j in range(k)] for i in range(k)], check=False)


def zero_map(A: FPModule, B: FPModule) -> ModuleMap:
    return ModuleMap(A, B, [[0] * A.group.rank for _ in range(B.group.rank)], check=False)


def map_from_images(source: FPModule, target: FPModule, images: Sequence) -> ModuleMap:
    """The map sending the ``k``-th generator of ``source`` to ``images[k]``."""
    cols = []
    for b in source.group.basis():
        coeffs = source.express(b)
        v = target.zero()
        for c, img in zip(coeffs, images):
            v = target.add(v, target.smul(c, img))
        cols.append(v)
    return ModuleMap(source, target, _shape(ab.from_columns(cols, target.group.rank), target.group.rank, source.group.rank))


def scalar_map(M: FPModule, r) -> ModuleMap:
    return ModuleMap(M, M, M.act(r), check=False)


# ---------------------------------------------------------------------------
# Sub, quotient, kernel, cokernel, sums
# ---------------------------------------------------------------------------


def _module_from_sub(M: FPModule, sub: ab.Sub) -> tuple[FPModule, ModuleMap]:
    S = sub.group
    acts = []
    for X in M.acts:
        cols = [sub.coords(_matvec(X, sub.embed(b))) for b in S.basis()]
        acts.append(_shape(ab.from_columns(cols, S.rank), S.rank, S.rank))
    N = _from_model(M.ring, S, acts)
    incl = ModuleMap(N, M, _shape(sub.incl, M.group.rank, S.rank), check=False)
    return N, incl


def submodule(M: FPModule, vecs: Sequence) -> tuple[FPModule, ModuleMap]:
    return _module_from_sub(M, M.submodule_closure(vecs))


def quotient_module(M: FPModule, vecs: Sequence) -> tuple[FPModule, ModuleMap]:
    sub = M.submodule_closure(vecs)
    q = ab.quotient(M.group, list(sub.gens))
    Q = q.group
    acts = [ab.reduce_matrix(Q, ab.compose(q.proj, ab.compose(X, q.lift, M.group.rank), M.group.rank)) if Q.rank else []
            for X in M.acts]
    N = _from_model(M.ring, Q, [_shape(a, Q.rank, Q.rank) for a in acts])
    proj = ModuleMap(M, N, _shape(q.proj, Q.rank, M.group.rank), check=False)
    return N, proj


def kernel(f: ModuleMap) -> tuple[FPModule, ModuleMap]:
    sub = ab.kernel(f.source.group, f.target.group, f._mat() if f.target.group.rank else [])
    return _module_from_sub(f.source, sub)


def image(f: ModuleMap) -> tuple[FPModule, ModuleMap]:
    return submodule(f.target, ab.columns(f._mat(), f.source.group.rank) if f.target.group.rank else [])


def cokernel(f: ModuleMap) -> tuple[FPModule, ModuleMap]:
    return quotient_module(f.target, ab.columns(f._mat(), f.source.group.rank) if f.target.group.rank else [])


@dataclass
class DirectSum:
    module: FPModule
    injections: list
    projections: list


def direct_sum(*mods: FPModule) -> DirectSum:
    if not mods:
        raise ValueError("need at least one summand")
    R = mods[0].ring
    G = ab.direct_sum(*[M.group for M in mods])
    sizes = [M.group.rank for M in mods]
    nb = len(R.basis_mult)
    acts = [_block_diag([M.acts[t] for M in mods], sizes) for t in range(nb)]
    S = _from_model(R, G, acts)
    inj, proj = [], []
    off = 0
    for M, k in zip(mods, sizes):
        i_m = [[1 if (r == off + c) else 0 for c in range(k)] for r in range(G.rank)]
        p_m = [[1 if (c == off + r) else 0 for c in range(G.rank)] for r in range(k)]
        inj.append(ModuleMap(M, S, _shape(i_m, G.rank, k), check=False))
        proj.append(ModuleMap(S, M, _shape(p_m, k, G.rank), check=False))
        off += k
    return DirectSum(S, inj, proj)


def hstack(maps: Sequence[ModuleMap], source: FPModule) -> ModuleMap:
    """``(f_1, ..., f_n) : A_1 + ... + A_n -> B`` for ``source`` the direct sum."""
    T = maps[0].target
    rows = [[] for _ in range(T.group.rank)]
    for f in maps:
        m = f._mat()
        for i in range(T.group.rank):
            rows[i].extend(m[i] if m else [0] * f.source.group.rank)
    return ModuleMap(source, T, rows, check=False)


def vstack(maps: Sequence[ModuleMap], target: FPModule) -> ModuleMap:
    """``(f_1, ..., f_n)^T : A -> B_1 + ... + B_n``."""
    S = maps[0].source
    rows = []
    for f in maps:
        rows.extend(f._mat())
    return ModuleMap(S, target, _shape(rows, target.group.rank, S.group.rank), check=False)


@dataclass
class Pullback:
    module: FPModule
    p1: ModuleMap  # P -> A
    p2: ModuleMap  # P -> B


def pullback(f: ModuleMap, g: ModuleMap) -> Pullback:
    """Pullback of ``f: A -> C`` and ``g: B -> C``."""
    if f.target.group != g.target.group:
        raise ValueError("pullback needs a common codomain")
    ds = direct_sum(f.source, g.source)
    diff = hstack([f, -g], ds.module)
    P, incl = kernel(diff)
    return Pullback(P, ds.projections[0].compose(incl), ds.projections[1].compose(incl))


@dataclass
class Pushout:
    module: FPModule
    i1: ModuleMap  # A -> Q
    i2: ModuleMap  # B -> Q


def pushout(f: ModuleMap, g: ModuleMap) -> Pushout:
    """Pushout of ``f: C -> A`` and ``g: C -> B``."""
    if f.source.group != g.source.group:
        raise ValueError("pushout needs a common domain")
    ds = direct_sum(f.target, g.target)
    diff = vstack([f, -g], ds.module)
    Q, proj = cokernel(diff)
    return Pushout(Q, proj.compose(ds.injections[0]), proj.compose(ds.injections[1]))


# ---------------------------------------------------------------------------
# Short exact sequences
# ---------------------------------------------------------------------------


class ShortExactSequence:
    """``0 -> A -i-> B -p-> C -> 0`` with exactness verified at construction."""

    def __init__(self, i: ModuleMap, p: ModuleMap, check: bool = True):
        self.i, self.p = i, p
        if check:
            problems = self.problems()
            if problems:
                raise ValueError("not a short exact sequence: " + "; ".join(problems))

    @property
    def A(self) -> FPModule:
        return self.i.source

    @property
    def B(self) -> FPModule:
        return self.i.target

    @property
    def C(self) -> FPModule:
        return self.p.target

    def problems(self) -> list[str]:
        out = []
        if self.i.target.group != self.p.source.group:
            return ["maps not composable"]
        if not self.p.compose(self.i).is_zero():
            out.append("p.i != 0")
        if not self.i.is_injective():
            out.append("i not injective")
        if not self.p.is_surjective():
            out.append("p not surjective")
        K, _ = kernel(self.p)
        if K.order is not None and self.A.order is not None:
            if K.order != self.A.order:
                out.append("image of i is not the kernel of p")
        else:
            Kc, kin = kernel(self.p)
            img = ab.image(self.A.group, self.B.group, self.i._mat())
            if not all(img.contains(kin.apply(b)) for b in Kc.group.basis()):
                out.append("image of i is not the kernel of p")
        return out

    def is_exact(self) -> bool:
        return not self.problems()

    def is_split(self) -> bool:
        """Search for a retraction of ``i`` (exact linear solve over Hom)."""
        H = hom_module(self.B, self.A)
        post = hom_precompose_matrix(H, self.i)
        idA = hom_module(self.A, self.A)
        target = idA.from_map(identity_map(self.A))
        return ab.preimage(H.module.group, idA.module.group, post, target) is not None

    def __repr__(self) -> str:
        return f"0 -> {self.A.describe()} -> {self.B.describe()} -> {self.C.describe()} -> 0"


def ses_from_inclusion(i: ModuleMap) -> ShortExactSequence:
    C, p = cokernel(i)
    return ShortExactSequence(i, p)


def ses_from_surjection(p: ModuleMap) -> ShortExactSequence:
    K, i = kernel(p)
    return ShortExactSequence(i, p)


# ---------------------------------------------------------------------------
# Generators and presentations
# ---------------------------------------------------------------------------


def minimal_generators(M: FPModule) -> list[tuple]:
    """A small generating set, chosen greedily from the additive basis."""
    G = M.group
    if G.rank == 0:
        return []
    cands = sorted(G.basis(), key=lambda v: -(G.element_order(v) or 10 ** 9))
    if not G.is_finite:
        cands = sorted(G.basis(), key=lambda v: 0 if G.element_order(v) == 0 else 1)
    chosen: list = []
    sub = M.submodule_closure([])
    target = G.order
    for v in cands:
        if sub.contains(v):
            continue
        chosen.append(v)
        sub = M.submodule_closure(chosen)
        if target is not None and sub.group.order == target:
            break
    # try to drop redundant generators
    k = 0
    while k < len(chosen):
        rest = chosen[:k] + chosen[k + 1:]
        s2 = M.submodule_closure(rest)
        if all(s2.contains(v) for v in G.basis()):
            chosen = rest
        else:
            k += 1
    return chosen


def free_cover(M: FPModule) -> ModuleMap:
    gens = minimal_generators(M)
    F = free_module(M.ring, len(gens))
    return ModuleMap(F, M, _shape(free_map_matrix(M, gens), M.group.rank, F.group.rank), check=False)


# ---------------------------------------------------------------------------
# Hom
# ---------------------------------------------------------------------------


class HomModule:
    """``Hom_R(M, N)`` with conversions between elements and maps."""

    def __init__(self, M: FPModule, N: FPModule):
        self.M, self.N = M, N
        GM, GN = M.group, N.group
        entries = []  # (i, j, gen, order)
        for i, b in enumerate(GN.invariants):
            for j, a in enumerate(GM.invariants):
                gen, order = ab.cyclic_orders_hom(a, b)
                if order != 1:
                    entries.append((i, j, gen, order))
        self.entries = entries
        P = ab.AbGroup(tuple(entries[e][3] for e in range(len(entries))))
        self.param = P
        # linearity constraints
        rows_total = GN.rank * GM.rank * len(M.acts)
        C = ab.AbGroup(GN.invariants * (GM.rank * len(M.acts)))
        cols = []
        for (i, j, gen, _) in entries:
            col = []
            for XM, XN in zip(M.acts, N.acts):
                # D = XN E - E XM for E = gen * e_ij
                D = [[0] * GM.rank for _ in range(GN.rank)]
                for r in range(GN.rank):
                    D[r][j] += XN[r][i] * gen
                for c in range(GM.rank):
                    D[i][c] -= gen * XM[j][c]
                for c in range(GM.rank):
                    col.extend(D[r][c] for r in range(GN.rank))
            cols.append(col)
        if entries and rows_total:
            cmat = ab.from_columns(cols, rows_total)
            sub = ab.kernel(P, C, cmat)
        else:
            sub = ab.subgroup(P, P.basis())
        self.sub = sub
        H = sub.group
        acts = []
        for XN in N.acts:
            colsH = []
            for b in H.basis():
                mat = self._param_to_matrix(sub.embed(b))
                colsH.append(sub.coords(self._matrix_to_param(ab.compose(XN, mat, GN.rank) if GN.rank else [])))
            acts.append(_shape(ab.from_columns(colsH, H.rank), H.rank, H.rank))
        self.module = _from_model(M.ring, H, acts)

    def _param_to_matrix(self, t) -> list:
        m = [[0] * self.M.group.rank for _ in range(self.N.group.rank)]
        for (i, j, gen, _), x in zip(self.entries, t):
            m[i][j] += gen * x
        return ab.reduce_matrix(self.N.group, m)

    def _matrix_to_param(self, m) -> tuple:
        out = []
        GN = self.N.group
        for (i, j, gen, order) in self.entries:
            x = m[i][j]
            b = GN.invariants[i]
            if b:
                x %= b
            if gen == 0:
                out.append(0)
                continue
            if x % gen:
                raise ValueError("matrix is not a homomorphism")
            out.append(x // gen)
        return self.param.reduce(out)

    def to_map(self, h) -> ModuleMap:
        return ModuleMap(self.M, self.N, _shape(self._param_to_matrix(self.sub.embed(h)), self.N.group.rank, self.M.group.rank), check=False)

    def from_map(self, f: ModuleMap) -> tuple:
        c = self.sub.coords(self._matrix_to_param(f._mat()))
        if c is None:
            raise ValueError("not an R-linear map")
        return c

    def maps(self) -> Iterable[ModuleMap]:
        for h in self.module.elements():
            yield self.to_map(h)

    @property
    def order(self) -> int | None:
        return self.module.order


def hom_module(M: FPModule, N: FPModule) -> HomModule:
    if M.ring != N.ring:
        raise ValueError("ring mismatch")
    return HomModule(M, N)


def hom_precompose_matrix(H: HomModule, g: ModuleMap) -> list:
    """Matrix of ``Hom(B, X) -> Hom(A, X)``, ``h -> h . g`` for ``g: A -> B``; ``H = Hom(B, X)``."""
    HA = hom_module(g.source, H.N)
    cols = [HA.from_map(H.to_map(b).compose(g)) for b in H.module.group.basis()]
    return _shape(ab.from_columns(cols, HA.module.group.rank), HA.module.group.rank, H.module.group.rank)


def hom_postcompose_matrix(H: HomModule, g: ModuleMap) -> list:
    """Matrix of ``Hom(X, A) -> Hom(X, B)``, ``h -> g . h`` for ``g: A -> B``; ``H = Hom(X, A)``."""
    HB = hom_module(H.M, g.target)
    cols = [HB.from_map(g.compose(H.to_map(b))) for b in H.module.group.basis()]
    return _shape(ab.from_columns(cols, HB.module.group.rank), HB.module.group.rank, H.module.group.rank)


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------


def cyclic_modulus(R: Ring) -> int | None:
    """``n`` when ``R`` is additively generated by 1 (so ``R = Z/n``); 0 for Z."""
    if isinstance(R, IntegerRing):
        return 0
    if isinstance(R, FiniteRing):
        if R.rank == 0:
            return 1
        if R.rank == 1 and R.group.element_order(R.one) == R.order:
            return R.order
    return None


def _is_principal_finite(R: Ring) -> bool:
    return cyclic_modulus(R) is not None or (isinstance(R, FiniteRing) and R.descriptor.get("kind") == "QuotPoly")


def fingerprint(M: FPModule) -> tuple:
    R = M.ring
    out = [tuple(M.group.canonical_invariants())]
    if cyclic_modulus(R) is None and isinstance(R, FiniteRing):
        for r in R.elements():
            out.append(ab.image(M.group, M.group, M.act(r)).group.order)
    return tuple(out)


def is_isomorphic(M: FPModule, N: FPModule) -> bool:
    if M.ring != N.ring:
        return False
    if not M.has_model or not N.has_model:
        return M.invariant_factors() == N.invariant_factors()
    if fingerprint(M) != fingerprint(N):
        return False
    if _is_principal_finite(M.ring):
        return True
    return find_isomorphism(M, N) is not None


def find_isomorphism(M: FPModule, N: FPModule) -> ModuleMap | None:
    if M.group.order != N.group.order:
        return None
    H = hom_module(M, N)
    if H.order is None or H.order > MAX_ISO_SEARCH:
        raise BackendUnavailable("isomorphism search space too large")
    for f in H.maps():
        if f.is_injective():
            return f
    return None


# ---------------------------------------------------------------------------
# Scalars: restriction, extension, colocalization
# ---------------------------------------------------------------------------


def restrict_scalars(N: FPModule, hom: RingHom):
    """View an ``S``-module as an ``R``-module along ``hom: R -> S``."""
    R, S = hom.source, hom.target
    if N.ring != S:
        raise ValueError("module is not over the target ring")
    if R.has_additive_model and N.has_model:
        acts = [N.act(hom(R.from_vec(b))) for b in R.group.basis()]
        return _from_model(R, N.group, acts)
    if isinstance(S, LocalizedRing) and R is ZZ and S.base is ZZ:
        from .tame import tame_from_localized_module

        return tame_from_localized_module(N).restrict()
    raise BackendUnavailable(f"restriction along {R!r} -> {S!r} is not representable")


def extend_scalars(M: FPModule, hom: RingHom) -> FPModule:
    """``S (x)_R M``: the presentation with entries mapped through ``hom``."""
    if M.ring != hom.source:
        raise ValueError("module is not over the source ring")
    rels = [[hom(x) for x in row] for row in M.relations]
    return FPModule(hom.target, M.ngens, rels)


def chart_projector(M: FPModule, e) -> ModuleMap:
    return scalar_map(M, e)


@dataclass
class Colocalization:
    module: Any            # Hom_R(R[1/s], M), over ``ring``
    ring: Ring             # R[1/s]
    evaluation: Any        # map Hom_R(R[1/s], M) -> M (R-linear), or a description
    as_r_module: Any       # the same object viewed over R
    note: str = ""


def chart_module(M: FPModule, e) -> tuple[FPModule, ModuleMap]:
    """``eM`` as an R-submodule of ``M`` with its inclusion."""
    return submodule(M, [M.smul(e, b) for b in M.group.basis()])


def to_chart_ring(N: FPModule, S: FiniteRing) -> FPModule:
    """An R-module on which the chart idempotent acts as 1, viewed over ``S = eR``."""
    R = S.chart_parent
    if N.ring != R:
        raise ValueError("module is not over the parent ring")
    acts = [N.act(S.chart_embed(b)) for b in S.group.basis()]
    return _from_model(S, N.group, acts)


def colocalize(M, s) -> Colocalization:
    """``Hom_R(R[1/s], M)`` with its evaluation map to ``M``."""
    from .tame import TameModule, tame_colocalize

    if isinstance(M, TameModule):
        return tame_colocalize(M, s)
    R = M.ring
    if isinstance(R, FiniteRing):
        s = R.coerce(s)
        e = idempotent_chart(R, s)
        S, hom = localize_ring(R, s)
        eM, incl = chart_module(M, e)
        if S is R:
            return Colocalization(M, R, identity_map(M), M, "s is a unit")
        return Colocalization(to_chart_ring(eM, S), S, incl, eM, f"chart idempotent {R.fmt(e)}")
    if R is ZZ:
        s = int(s)
        if s in (1, -1):
            return Colocalization(M, ZZ, identity_map(M), M, "s is a unit")
        # for f.g. M the inverse limit of ... -s-> M -s-> M is the s-divisible
        # part of the torsion: s^k T for k large
        T, tincl = torsion_submodule(M)
        cur = ab.subgroup(M.group, [tincl.apply(b) for b in T.group.basis()])
        steps = 0
        while True:
            nxt = ab.subgroup(M.group, [M.smul(s, cur.embed(b)) for b in cur.group.basis()])
            steps += 1
            if nxt.group.order == cur.group.order:
                break
            cur = nxt
        C, incl = _module_from_sub(M, cur)
        L, _ = localize_ring(ZZ, s)
        return Colocalization(C, L, incl, C, f"stabilized after {steps} steps")
    raise BackendUnavailable(f"colocalization over {R!r}")


def torsion_submodule(M: FPModule) -> tuple[FPModule, ModuleMap]:
    G = M.group
    gens = [b for b in G.basis() if G.invariants[G.basis().index(b)] != 0]
    return submodule(M, gens)


# ---------------------------------------------------------------------------
# Duals, injectivity
# ---------------------------------------------------------------------------


def dual_module(M: FPModule) -> FPModule:
    """``Hom_Z(M, Q/Z)`` for a finite module; characters use the same coordinates."""
    G = M.group
    if not G.is_finite:
        raise BackendUnavailable("duals only for finite modules")
    d = G.invariants
    acts = []
    for X in M.acts:
        Y = [[(X[i][j] * d[j]) // d[i] for i in range(G.rank)] for j in range(G.rank)]
        acts.append(ab.reduce_matrix(G, Y))
    return _from_model(M.ring, G, acts)


def character_value(G: ab.AbGroup, chi, m) -> Fraction:
    return sum((Fraction(a * x, d) for a, x, d in zip(chi, m, G.invariants)), Fraction(0)) % 1


def injective_embedding(M: FPModule) -> ModuleMap:
    """An embedding ``M -> (R^dual)^k`` with ``k`` the number of generators of ``M^dual``."""
    R = M.ring
    if not isinstance(R, FiniteRing):
        raise BackendUnavailable("injective embeddings need a finite ring")
    D = dual_module(M)
    phis = minimal_generators(D)
    Rmod = free_module(R, 1)
    Rd = dual_module(Rmod)
    k = len(phis)
    if k == 0:
        return zero_map(M, zero_module(R))
    I = direct_sum(*([Rd] * k)).module if k > 1 else Rd
    dR = Rd.group.invariants
    rbasis = R.group.basis()
    cols = []
    for m in M.group.basis():
        vec = []
        for phi in phis:
            for t, b in enumerate(rbasis):
                val = character_value(M.group, phi, M.smul(b, m))
                vec.append(int(val * dR[t]) % dR[t])
        cols.append(vec)
    f = ModuleMap(M, I, _shape(ab.from_columns(cols, I.group.rank), I.group.rank, M.group.rank))
    assert f.is_injective()
    return f


_IDEAL_CACHE: dict = {}


def ideals(R: FiniteRing) -> list[ab.Sub]:
    """All ideals of a finite ring, as subgroups of its additive group."""
    key = (repr(R.descriptor), R.order)
    if key in _IDEAL_CACHE:
        return _IDEAL_CACHE[key]
    Rm = free_module(R, 1)
    elements = list(R.elements())
    seen: dict = {}
    frontier = [Rm.submodule_closure([])]
    seen[frozenset([R.zero])] = frontier[0]
    while frontier:
        nxt = []
        for I in frontier:
            members = set(_members(I))
            for x in elements:
                if x in members:
                    continue
                J = Rm.submodule_closure(list(I.gens) + [x])
                key_j = frozenset(_members(J))
                if key_j not in seen:
                    seen[key_j] = J
                    nxt.append(J)
        frontier = nxt
    out = list(seen.values())
    _IDEAL_CACHE[key] = out
    return out


def _members(sub: ab.Sub) -> list:
    return [sub.embed(s) for s in sub.group.elements()]


def is_injective_module(M: FPModule, method: str = "baer") -> bool:
    """Baer criterion: ``Ext^1(R/I, M) = 0`` for every ideal ``I``.

    ``method="prime"`` checks only the residue fields ``R/m`` (enough for
    Noetherian rings, where every prime of a finite ring is maximal); it is
    used for the larger trivial extensions.
    """
    from .ext import ext

    R = M.ring
    if not isinstance(R, FiniteRing):
        raise BackendUnavailable("injectivity decision needs a finite ring")
    if method == "prime":
        tests = residue_field_modules(R)
    elif method == "baer":
        Rm = free_module(R, 1)
        tests = []
        for I in ideals(R):
            Q, _ = quotient_module(Rm, [I.embed(b) for b in I.group.basis()])
            tests.append(Q)
    else:
        raise ValueError("method is 'baer' or 'prime'")
    return all(ext(Q, M, 1).is_zero() for Q in tests)


def primitive_idempotents(R: FiniteRing) -> list:
    idem = [e for e in R.elements() if not R.is_zero(e) and R.mul(e, e) == e]
    return [e for e in idem if not any(f != e and R.mul(f, e) == f for f in idem)]


def residue_field_modules(R: FiniteRing) -> list[FPModule]:
    """``R/m`` for every maximal ideal; ``m`` is ``(1-e)R`` plus the non-units of the local factor ``eR``."""
    Rm = free_module(R, 1)
    out = []
    for e in primitive_idempotents(R):
        comp = R.sub(R.one, e)
        gens = [R.mul(comp, r) for r in R.elements()]
        gens += [R.mul(e, r) for r in R.elements() if not _unit_in_factor(R, e, R.mul(e, r))]
        out.append(quotient_module(Rm, gens)[0])
    return out


def _unit_in_factor(R: FiniteRing, e, x) -> bool:
    return any(R.mul(x, y) == e for y in R.elements())


def residue_field_module(R: FiniteRing) -> FPModule:
    """``R/m`` for a local finite ring."""
    fields = residue_field_modules(R)
    if len(fields) != 1:
        raise ValueError(f"{R!r} is not local")
    return fields[0]


def is_projective_module(M: FPModule) -> bool:
    """Projective iff the free cover splits."""
    p = free_cover(M)
    H = hom_module(M, p.source)
    post = hom_postcompose_matrix(H, p)
    HM = hom_module(M, M)
    return ab.preimage(H.module.group, HM.module.group, post, HM.from_map(identity_map(M))) is not None


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_monic_divisors(R: FiniteRing) -> list:
    from .rings import PolyRing, parse_poly

    base = PolyRing(int(R.descriptor["base"]["field"][1:]), R.descriptor["base"]["var"])
    f = parse_poly(R.descriptor["modulus"], base)
    d = len(f) - 1
    out = []
    for deg in range(d + 1):
        for coeffs in itertools.product(range(base.p), repeat=deg):
            g = tuple(list(coeffs) + [1])
            _, r = base.divmod(f, g)
            if not r:
                out.append(g)
    return out


def enumerate_modules(R: Ring, max_invariants: int = 2, max_order: int | None = None) -> list[FPModule]:
    """Modules up to isomorphism, as sums ``R/(d_1) + ... + R/(d_k)`` for principal rings.

    For other finite rings: direct sums of at most ``max_invariants`` cyclic
    modules ``R/I``, filtered by isomorphism.
    """
    n = cyclic_modulus(R)
    out: list[FPModule] = []
    if n is not None and n > 0:
        divs = [d for d in _divisors(n) if d > 1]
        chains: list[tuple] = [()]
        for _ in range(max_invariants):
            new = []
            for c in chains:
                for d in divs:
                    if (not c or d % c[-1] == 0) and len(c) < max_invariants:
                        new.append(c + (d,))
            chains = list(dict.fromkeys(chains + new))
        for c in sorted(set(chains), key=lambda c: (prod(c), c)):
            if max_order is not None and prod(c) > max_order:
                continue
            k = len(c)
            rels = [[R.coerce(c[i]) if i == j else R.zero for j in range(k)] for i in range(k)]
            out.append(FPModule(R, k, rels, name=f"{R.name}-module " + (" + ".join(f"Z/{x}" for x in c) or "0")))
        return out
    if isinstance(R, FiniteRing) and R.descriptor.get("kind") == "QuotPoly":
        divs = [g for g in _poly_monic_divisors(R) if len(g) > 1]
        from .rings import PolyRing

        base = PolyRing(int(R.descriptor["base"]["field"][1:]), R.descriptor["base"]["var"])
        chains = [()]
        for _ in range(max_invariants):
            new = []
            for c in chains:
                for g in divs:
                    if not c or not base.divmod(g, c[-1])[1]:
                        new.append(c + (g,))
            chains = list(dict.fromkeys(chains + new))
        for c in chains:
            k = len(c)
            rels = [[R.coerce(base.fmt(c[i])) if i == j else R.zero for j in range(k)] for i in range(k)]
            M = FPModule(R, k, rels)
            if max_order is not None and M.order > max_order:
                continue
            out.append(M)
        return out
    if isinstance(R, FiniteRing):
        cyc = []
        Rm = free_module(R, 1)
        for I in ideals(R):
            if I.group.order == R.order:
                continue
            Q, _ = quotient_module(Rm, [I.embed(b) for b in I.group.basis()])
            cyc.append(Q)
        cands = [zero_module(R)]
        for k in range(1, max_invariants + 1):
            for combo in itertools.combinations_with_replacement(range(len(cyc)), k):
                M = direct_sum(*[cyc[i] for i in combo]).module if k > 1 else cyc[combo[0]]
                if max_order is None or M.order <= max_order:
                    cands.append(M)
        for M in cands:
            if not any(is_isomorphic(M, N) for N in out):
                out.append(M)
        return out
    raise BackendUnavailable(f"module enumeration over {R!r}")


def enumerate_modules_by_order(R: Ring, max_order: int) -> list[FPModule]:
    """All modules of order at most ``max_order`` over ``Z/n`` (any number of invariant factors)."""
    n = cyclic_modulus(R)
    if not n:
        raise BackendUnavailable("order enumeration only over Z/n")
    divs = [d for d in _divisors(n) if d > 1]
    out = []

    def rec(chain, size):
        k = len(chain)
        rels = [[R.coerce(chain[i]) if i == j else R.zero for j in range(k)] for i in range(k)]
        out.append(FPModule(R, k, rels, name=f"{R.name}-module " + (" + ".join(f"Z/{x}" for x in chain) or "0")))
        for d in divs:
            if (not chain or d % chain[-1] == 0) and size * d <= max_order:
                rec(chain + (d,), size * d)

    rec((), 1)
    return out


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

_MOD_KEYS = {"ring", "relations", "generators"}


def module_from_descriptor(d: dict):
    """``{"module": {"ring": ..., "relations": [[...]]}}`` or ``{"tame": "Z[1/2]"}``."""
    if not isinstance(d, dict):
        raise ValueError("module descriptor must be an object")
    if set(d) == {"tame"}:
        from .tame import parse_tame

        return parse_tame(d["tame"])
    if set(d) != {"module"}:
        raise ValueError(f"unknown module descriptor keys {sorted(d)}")
    body = d["module"]
    extra = set(body) - _MOD_KEYS
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)}")
    R = ring_from_descriptor(body["ring"])
    rels = body.get("relations", [])
    g = body.get("generators", len(rels[0]) if rels else 0)
    return FPModule(R, g, [[R.coerce(x) if isinstance(x, str) else R.coerce(x) for x in row] for row in rels])
