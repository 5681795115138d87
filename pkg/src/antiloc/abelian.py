"""Finitely generated abelian groups in diagonal form.

A group is ``Z^k / diag(d_1, ..., d_k)`` where each ``d_i`` is 0 (a free
summand) or at least 2.  Elements are integer tuples reduced modulo the
``d_i``.  Homomorphisms are integer matrices acting on column vectors.

Everything else in the package (modules over finite rings, f.g. modules over
the integers, Hom groups, Ext groups) is computed by reducing to subgroups,
kernels and quotients of such groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterator, Sequence

from .linalg import IntSolver, kernel_int, smith_int, solve_int

Vec = tuple
Mat = list


def _red(x: int, d: int) -> int:
    return x % d if d else x


@dataclass(frozen=True)
class AbGroup:
    """``Z^k`` modulo a diagonal lattice; ``invariants[i] == 0`` means free."""

    invariants: tuple

    def __post_init__(self) -> None:
        for d in self.invariants:
            if d < 0 or d == 1:
                raise ValueError(f"bad invariant {d}")

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariants if d == 0)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        return prod(self.invariants) if self.is_finite else None

    def reduce(self, v: Sequence[int]) -> Vec:
        return tuple(_red(x, d) for x, d in zip(v, self.invariants))

    def zero(self) -> Vec:
        return (0,) * self.rank

    def is_zero(self, v: Sequence[int]) -> bool:
        return all(_red(x, d) == 0 for x, d in zip(v, self.invariants))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        return self.reduce([x + y for x, y in zip(a, b)])

    def neg(self, a: Sequence[int]) -> Vec:
        return self.reduce([-x for x in a])

    def scale(self, c: int, a: Sequence[int]) -> Vec:
        return self.reduce([c * x for x in a])

    def basis(self) -> list[Vec]:
        return [tuple(1 if i == j else 0 for i in range(self.rank)) for j in range(self.rank)]

    def elements(self) -> Iterator[Vec]:
        if not self.is_finite:
            raise ValueError("infinite group has no element list")
        return itertools.product(*[range(d) for d in self.invariants])

    def canonical_invariants(self) -> tuple:
        """Invariant factors ``d_1 | d_2 | ...`` (free part last, as zeros)."""
        return snf_invariants(self.invariants)

    def element_order(self, v: Sequence[int]) -> int:
        o = 1
        for x, d in zip(v, self.invariants):
            x = _red(x, d)
            if x == 0:
                continue
            if d == 0:
                return 0
            k = d // gcd(x, d)
            o = o * k // gcd(o, k)
        return o

    def is_isomorphic(self, other: "AbGroup") -> bool:
        return self.canonical_invariants() == other.canonical_invariants()

    def __repr__(self) -> str:
        return group_name(self.invariants)


def snf_invariants(diag: Sequence[int]) -> tuple:
    diag = [d for d in diag if d != 1]
    if not diag:
        return ()
    n = len(diag)
    sm = smith_int([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
    return tuple(d for d in sm.diag if d != 1)


def group_name(invariants: Sequence[int]) -> str:
    inv = [d for d in invariants if d != 1]
    if not inv:
        return "0"
    return " + ".join("Z" if d == 0 else f"Z/{d}" for d in inv)


TRIVIAL = AbGroup(())


def zero_matrix(rows: int, cols: int) -> Mat:
    return [[0] * cols for _ in range(rows)]


def apply(m: Mat, v: Sequence[int], cols: int | None = None) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in m]


def reduce_matrix(G: AbGroup, m: Mat) -> Mat:
    """Reduce each row of ``m`` modulo the invariant of the target coordinate."""
    return [[_red(x, d) for x in row] for row, d in zip(m, G.invariants)]


def columns(m: Mat, ncols: int) -> list[list[int]]:
    return [[row[j] for row in m] for j in range(ncols)]


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> Mat:
    return [[c[i] for c in cols] for i in range(nrows)]


def is_hom(src: AbGroup, tgt: AbGroup, m: Mat) -> bool:
    """``m`` defines a homomorphism iff every source relation maps to zero."""
    for j, d in enumerate(src.invariants):
        if d and not tgt.is_zero([d * row[j] for row in m]):
            return False
    return True


# ---------------------------------------------------------------------------
# Presentations, subgroups, kernels, quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presented:
    """``Z^n / span(relations)`` in diagonal form.

    ``proj`` (k x n) sends ambient vectors to group coordinates, ``lift``
    (n x k) sends group coordinates back to ambient representatives.
    """

    group: AbGroup
    proj: Mat
    lift: Mat
    n: int

    def to_group(self, v: Sequence[int]) -> Vec:
        return self.group.reduce(apply(self.proj, v))

    def to_ambient(self, g: Sequence[int]) -> list[int]:
        return apply(self.lift, g)


def present(n: int, relations: Sequence[Sequence[int]]) -> Presented:
    rels = [list(r) for r in relations if any(r)]
    if not rels:
        eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return Presented(AbGroup((0,) * n), eye, [row[:] for row in eye], n)
    a = from_columns(rels, n)
    sm = smith_int(a, n, len(rels))
    keep = []
    inv = []
    for i in range(n):
        d = sm.diag[i] if i < len(sm.diag) else 0
        if d != 1:
            keep.append(i)
            inv.append(d)
    proj = [sm.U[i][:] for i in keep]
    lift = [[sm.Uinv[r][i] for i in keep] for r in range(n)]
    return Presented(AbGroup(tuple(inv)), proj, lift, n)


def _relation_block(G: AbGroup) -> list[list[int]]:
    """Columns spanning the defining lattice of ``G``."""
    cols = []
    for i, d in enumerate(G.invariants):
        if d:
            c = [0] * G.rank
            c[i] = d
            cols.append(c)
    return cols


@dataclass(frozen=True)
class Sub:
    """A subgroup ``S`` of ``G`` with its inclusion matrix (G-coords x S-coords)."""

    ambient: AbGroup
    group: AbGroup
    incl: Mat
    gens: tuple  # generating vectors in G used to build it
    _pres: Presented = field(repr=False)

    def coords(self, g: Sequence[int]) -> Vec | None:
        """Coordinates of ``g`` in ``S`` or ``None`` when ``g`` is not in ``S``."""
        r = len(self.gens)
        if r == 0:
            return () if self.ambient.is_zero(g) else None
        solver = self.__dict__.get("_solver")
        if solver is None:
            rel = _relation_block(self.ambient)
            a = from_columns(list(self.gens) + rel, self.ambient.rank)
            solver = IntSolver(a, self.ambient.rank, r + len(rel))
            object.__setattr__(self, "_solver", solver)
        x = solver.solve(list(g))
        if x is None:
            return None
        return self.group.reduce(apply(self._pres.proj, x[:r]))

    def contains(self, g: Sequence[int]) -> bool:
        return self.coords(g) is not None

    def embed(self, s: Sequence[int]) -> Vec:
        return self.ambient.reduce(apply(self.incl, s))


def subgroup(G: AbGroup, gens: Sequence[Sequence[int]]) -> Sub:
    gens = tuple(tuple(G.reduce(g)) for g in gens)
    gens = tuple(g for g in gens if not G.is_zero(g))
    r = len(gens)
    if r == 0:
        pres = present(0, [])
        return Sub(G, TRIVIAL, [[] for _ in range(G.rank)], (), pres)
    rel = _relation_block(G)
    a = from_columns(list(gens) + rel, G.rank)
    ker = kernel_int(a, r + len(rel)) if G.rank else [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    pres = present(r, [k[:r] for k in ker])
    incl_raw = [[sum(gens[t][i] * pres.lift[t][c] for t in range(r)) for c in range(pres.group.rank)]
                for i in range(G.rank)]
    return Sub(G, pres.group, reduce_matrix(G, incl_raw), gens, pres)


def kernel(src: AbGroup, tgt: AbGroup, m: Mat) -> Sub:
    k = src.rank
    if k == 0:
        return subgroup(src, [])
    rel = _relation_block(tgt)
    a = [list(row) + [c[i] for c in rel] for i, row in enumerate(m)] if tgt.rank else []
    if not a:
        return subgroup(src, src.basis())
    ker = kernel_int(a, k + len(rel))
    return subgroup(src, [v[:k] for v in ker])


def image(src: AbGroup, tgt: AbGroup, m: Mat) -> Sub:
    return subgroup(tgt, columns(m, src.rank))


@dataclass(frozen=True)
class Quot:
    """``G / span(gens)`` with projection and lift matrices in group coordinates."""

    ambient: AbGroup
    group: AbGroup
    proj: Mat
    lift: Mat

    def project(self, g: Sequence[int]) -> Vec:
        return self.group.reduce(apply(self.proj, g))

    def lift_elt(self, q: Sequence[int]) -> Vec:
        return self.ambient.reduce(apply(self.lift, q))


def quotient(G: AbGroup, gens: Sequence[Sequence[int]]) -> Quot:
    pres = present(G.rank, _relation_block(G) + [list(g) for g in gens])
    return Quot(G, pres.group, pres.proj, reduce_matrix(G, pres.lift))


def preimage(src: AbGroup, tgt: AbGroup, m: Mat, h: Sequence[int]) -> Vec | None:
    """Some ``g`` with ``m g == h`` in ``tgt``, or ``None``."""
    k = src.rank
    rel = _relation_block(tgt)
    if tgt.rank == 0:
        return src.zero()
    a = [list(row) + [c[i] for c in rel] for i, row in enumerate(m)]
    x = solve_int(a, list(h), k + len(rel))
    if x is None:
        return None
    return src.reduce(x[:k])


def is_injective(src: AbGroup, tgt: AbGroup, m: Mat) -> bool:
    return kernel(src, tgt, m).group.rank == 0


def is_surjective(src: AbGroup, tgt: AbGroup, m: Mat) -> bool:
    img = image(src, tgt, m)
    return all(img.contains(b) for b in tgt.basis())


def compose(a: Mat, b: Mat, inner: int) -> Mat:
    """Matrix of ``a . b`` where ``b`` has ``inner`` rows."""
    rows = len(a)
    cols = len(b[0]) if b else 0
    if inner == 0:
        return zero_matrix(rows, cols)
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) for j in range(cols)] for i in range(rows)]


def direct_sum(*groups: AbGroup) -> AbGroup:
    return AbGroup(tuple(d for g in groups for d in g.invariants))


def cyclic_orders_hom(a: int, b: int) -> tuple[int, int]:
    """For ``Hom(Z/a, Z/b)`` (0 meaning Z): (generator value, order of the generator).

    Order 1 means the Hom group is trivial; order 0 means infinite cyclic.
    """
    if b == 0:
        return (1, 0) if a == 0 else (0, 1)
    if a == 0:
        return (1, b)
    g = gcd(a, b)
    return (b // g, g)
