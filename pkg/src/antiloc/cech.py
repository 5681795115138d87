"""Cech coresolutions and the Hom-dual Cech resolutions of principal covers.

Finite rings: ``M[1/s_I] = e_I M`` for the product ``e_I`` of chart
idempotents, and so is ``Hom_R(R[1/s_I], M)``; the coresolution maps are
multiplications by ``e_j`` and the resolution maps are inclusions.

Integers: a localization ``M[1/s_I]`` is the union of its pieces
``{m / s_I^B}``.  For a fixed bound ``B`` the numerators form the complex
``C_B`` with terms ``M / M[s_I^inf]`` and maps ``+-s_j^B``; the Cech complex is
the colimit over ``B``.  Exactness is certified by showing that every
cohomology class of ``C_B`` dies in ``C_{2B}`` for each ``B`` in a sweep.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from . import abelian as ab
from . import modules as md
from .linalg import BackendUnavailable
from .modules import FPModule
from .rings import ZZ, Cover, FiniteRing, idempotent_chart
from .tame import TameModule, is_contraadjusted, tame_localize
from . import tame as tm


class NotContraadjusted(ValueError):
    """Codescent constructions are only defined for contraadjusted modules."""


def subsets(d: int, k: int) -> list[tuple]:
    return list(itertools.combinations(range(d), k))


def omit_sign(J: tuple, j: int) -> int:
    """``(-1)^p`` where ``p`` is the position of ``j`` in ``J``."""
    return -1 if J.index(j) % 2 else 1


@dataclass
class CechComplex:
    """A finite complex of abelian groups indexed by subsets of the cover.

    ``levels[k]`` lists ``(I, description, group)`` for ``|I| = k`` (for the
    Hom resolution the list is read from the top level downwards).  ``diffs[k]``
    is the matrix from the sum at position ``k`` to position ``k + 1``.
    """

    cover: Cover
    input: Any
    direction: str
    positions: list          # list of lists of (I, label, AbGroup)
    diffs: list              # integer matrices between consecutive positions
    exact_at: list = field(default_factory=list)
    squares_zero: bool = True
    notes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(self.exact_at)

    def term_groups(self) -> list[ab.AbGroup]:
        return [ab.direct_sum(*[g for _, _, g in pos]) if pos else ab.TRIVIAL for pos in self.positions]

    def labels(self) -> list[str]:
        out = []
        for pos in self.positions:
            parts = [lab for _, lab, _ in pos if lab != "0"]
            out.append(" + ".join(parts) if parts else "0")
        return out

    def to_json(self) -> dict:
        return {"direction": self.direction, "cover": self.cover.describe(),
                "terms": [[{"index": list(I), "module": lab, "invariants": list(g.invariants)}
                           for I, lab, g in pos] for pos in self.positions],
                "differentials": self.diffs, "exact_at": self.exact_at, "exact": self.exact,
                "squares_zero": self.squares_zero, "notes": self.notes}


def _assemble(src: list, tgt: list, comp: Callable) -> list:
    """Block matrix between direct sums; ``comp(I, J)`` is a block or ``None``."""
    rows = sum(g.rank for _, _, g in tgt)
    cols = sum(g.rank for _, _, g in src)
    out = [[0] * cols for _ in range(rows)]
    r0 = 0
    for J, _, gJ in tgt:
        c0 = 0
        for I, _, gI in src:
            blk = comp(I, J)
            if blk is not None:
                for a in range(gJ.rank):
                    for b in range(gI.rank):
                        out[r0 + a][c0 + b] = blk[a][b]
            c0 += gI.rank
        r0 += gJ.rank
    return ab.reduce_matrix(ab.direct_sum(*[g for _, _, g in tgt]), out) if rows else []


def _exactness(groups: list, diffs: list) -> list[bool]:
    """Exactness of ``0 -> G_0 -> ... -> G_n -> 0`` at every position."""
    out = []
    n = len(groups)
    for k in range(n):
        G = groups[k]
        if k < n - 1:
            K = ab.kernel(G, groups[k + 1], diffs[k]) if G.rank else ab.subgroup(G, [])
        else:
            K = ab.subgroup(G, G.basis())
        if k == 0:
            out.append(K.group.rank == 0)
            continue
        img = ab.image(groups[k - 1], G, diffs[k - 1]) if G.rank else ab.subgroup(G, [])
        out.append(all(img.contains(K.embed(b)) for b in K.group.basis()))
    return out


def _squares_zero(groups: list, diffs: list) -> bool:
    for k in range(len(diffs) - 1):
        A, C = groups[k], groups[k + 2]
        if A.rank == 0 or C.rank == 0:
            continue
        comp = ab.compose(diffs[k + 1], diffs[k], groups[k + 1].rank)
        if any(not C.is_zero(col) for col in ab.columns(comp, A.rank)):
            return False
    return True


# ---------------------------------------------------------------------------
# Finite rings (and finite modules over Z for the Hom side)
# ---------------------------------------------------------------------------


def _chart_subs(M: FPModule, cover: Cover) -> dict:
    """``I -> (subgroup e_I M)`` for every subset ``I`` of the cover."""
    R = M.ring
    es = [idempotent_chart(R, s) for s in cover.elements]
    out = {}
    for k in range(cover.d + 1):
        for I in subsets(cover.d, k):
            e = R.one
            for i in I:
                e = R.mul(e, es[i])
            out[I] = (e, M.submodule_closure([M.smul(e, b) for b in M.group.basis()]))
    return out


def _coprime_subs(M: FPModule, cover: Cover) -> dict:
    """For a finite module over Z: ``I -> elements of order prime to s_I``."""
    out = {}
    for k in range(cover.d + 1):
        for I in subsets(cover.d, k):
            sI = 1
            for i in I:
                sI *= int(cover.elements[i])
            P = tm.PrimeSet.of(sI)
            gens = []
            for b in M.group.basis():
                o = M.group.element_order(b)
                gens.append(M.group.scale(P.part(o), b))
            out[I] = (sI, ab.subgroup(M.group, gens))
    return out


def _label(sub: ab.Sub) -> str:
    return repr(sub.group)


def cech_coresolution(M, cover: Cover) -> CechComplex:
    """``0 -> M -> (+) M[1/s_i] -> (+) M[1/s_i s_j] -> ... -> 0``."""
    if isinstance(M, TameModule):
        raise BackendUnavailable("Cech coresolutions of tame modules are not computed")
    R = M.ring
    if R != cover.ring:
        raise ValueError("cover over a different ring")
    if isinstance(R, FiniteRing):
        return _coresolution_finite(M, cover)
    if R is ZZ:
        return _coresolution_integers(M, cover)
    raise BackendUnavailable(f"Cech coresolution over {R!r}")


def _coresolution_finite(M: FPModule, cover: Cover) -> CechComplex:
    R = M.ring
    subs = _chart_subs(M, cover)
    positions = [[(I, _label(subs[I][1]), subs[I][1].group) for I in subsets(cover.d, k)]
                 for k in range(cover.d + 1)]
    diffs = []
    for k in range(cover.d):
        def comp(I, J, k=k):
            if not set(I) < set(J):
                return None
            (j,) = set(J) - set(I)
            sign = omit_sign(J, j)
            SI, SJ = subs[I][1], subs[J][1]
            ej = idempotent_chart(R, cover.elements[j])
            cols = []
            for b in SI.group.basis():
                v = M.smul(ej, SI.embed(b))
                c = SJ.coords(M.group.scale(sign, v))
                cols.append(c)
            return ab.from_columns(cols, SJ.group.rank) if SJ.group.rank else None
        diffs.append(_assemble(positions[k], positions[k + 1], comp))
    groups = [ab.direct_sum(*[g for _, _, g in pos]) for pos in positions]
    return CechComplex(cover, M, "coresolution", positions, diffs, _exactness(groups, diffs),
                       _squares_zero(groups, diffs), ["terms e_I M for chart idempotents e_I"])


def _hom_resolution_subs(M: FPModule, cover: Cover) -> dict:
    R = M.ring
    if isinstance(R, FiniteRing):
        return {I: v[1] for I, v in _chart_subs(M, cover).items()}
    if R is ZZ:
        if not M.group.is_finite:
            raise NotContraadjusted(
                f"{M.describe()} is not contraadjusted over Z (a free summand has Ext^1(Z[1/s], Z) != 0); "
                "codescent is only considered for contraadjusted modules")
        return {I: v[1] for I, v in _coprime_subs(M, cover).items()}
    raise BackendUnavailable(f"Hom Cech resolution over {R!r}")


def cech_hom_resolution(M, cover: Cover) -> CechComplex:
    """``0 -> Hom(R[1/s_1...s_d], M) -> ... -> (+) Hom(R[1/s_i], M) -> M -> 0``."""
    if isinstance(M, TameModule):
        if not is_contraadjusted(M):
            raise NotContraadjusted(f"{M.label()} is outside the contraadjusted registry")
        raise BackendUnavailable("Hom Cech resolutions of infinite tame modules are not computed")
    if M.ring != cover.ring:
        raise ValueError("cover over a different ring")
    subs = _hom_resolution_subs(M, cover)
    d = cover.d
    # position p holds the subsets of size d - p
    positions = [[(I, _label(subs[I]), subs[I].group) for I in subsets(d, d - p)] for p in range(d + 1)]
    diffs = []
    for p in range(d):
        def comp(J, I):
            if not set(I) < set(J):
                return None
            (j,) = set(J) - set(I)
            sign = omit_sign(J, j)
            SJ, SI = subs[J], subs[I]
            cols = [SI.coords(M.group.scale(sign, SJ.embed(b))) for b in SJ.group.basis()]
            return ab.from_columns(cols, SI.group.rank) if SI.group.rank else None
        diffs.append(_assemble(positions[p], positions[p + 1], lambda J, I: comp(J, I)))
    groups = [ab.direct_sum(*[g for _, _, g in pos]) for pos in positions]
    return CechComplex(cover, M, "hom-resolution", positions, diffs, _exactness(groups, diffs),
                       _squares_zero(groups, diffs), ["terms Hom(R[1/s_I], M) as submodules of M"])


@dataclass
class EpiReport:
    status: str            # "PASS", "FAIL" or "REFUSED"
    surjective: bool | None
    kernel: str | None
    kernel_contraadjusted: bool | None
    reason: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "surjective": self.surjective, "kernel": self.kernel,
                "kernel_contraadjusted": self.kernel_contraadjusted, "reason": self.reason}


def cover_epimorphism_check(M, cover: Cover) -> EpiReport:
    """``(+)_j Hom(R[1/s_j], M) -> M`` is onto with contraadjusted kernel."""
    try:
        C = cech_hom_resolution(M, cover)
    except NotContraadjusted as exc:
        return EpiReport("REFUSED", None, None, None, str(exc))
    groups = C.term_groups()
    src, tgt = groups[-2], groups[-1]
    mat = C.diffs[-1]
    onto = ab.is_surjective(src, tgt, mat) if tgt.rank else True
    K = ab.kernel(src, tgt, mat).group if src.rank else ab.TRIVIAL
    ok = onto  # the kernel is finite, hence contraadjusted
    return EpiReport("PASS" if ok else "FAIL", onto, repr(K), True,
                     "finite modules are contraadjusted")


# ---------------------------------------------------------------------------
# Integers: bounded-denominator approximation
# ---------------------------------------------------------------------------


def _torsion_at(M: FPModule, s: int) -> ab.Sub:
    """``M[s^inf]``: elements killed by a power of ``s``."""
    G = M.group
    if s in (1, -1):
        return ab.subgroup(G, [])
    P = tm.PrimeSet.of(s)
    gens = []
    for b, d in zip(G.basis(), G.invariants):
        if d:
            gens.append(G.scale(d // P.part(d), b))
    return ab.subgroup(G, gens)


@dataclass
class _Bounded:
    positions: list
    quots: dict      # I -> Quot of M
    diffs: list


def _bounded_complex(M: FPModule, cover: Cover, B: int) -> _Bounded:
    G = M.group
    s = [int(x) for x in cover.elements]
    quots = {}
    positions = []
    for k in range(cover.d + 1):
        pos = []
        for I in subsets(cover.d, k):
            sI = 1
            for i in I:
                sI *= s[i]
            T = _torsion_at(M, sI)
            q = ab.quotient(G, [T.embed(b) for b in T.group.basis()])
            quots[I] = q
            pos.append((I, "", q.group))
        positions.append(pos)
    diffs = []
    for k in range(cover.d):
        def comp(I, J):
            if not set(I) < set(J):
                return None
            (j,) = set(J) - set(I)
            c = omit_sign(J, j) * s[j] ** B
            qI, qJ = quots[I], quots[J]
            cols = [qJ.project(G.scale(c, qI.lift_elt(b))) for b in qI.group.basis()]
            return ab.from_columns(cols, qJ.group.rank) if qJ.group.rank else None
        diffs.append(_assemble(positions[k], positions[k + 1], comp))
    return _Bounded(positions, quots, diffs)


def _transition(M: FPModule, cover: Cover, lo: _Bounded, hi: _Bounded, B: int) -> list:
    """Chain map ``C_B -> C_{2B}``: numerators on term ``I`` times ``s_I^B``."""
    G = M.group
    s = [int(x) for x in cover.elements]
    out = []
    for k in range(cover.d + 1):
        def comp(I, J):
            if I != J:
                return None
            sI = 1
            for i in I:
                sI *= s[i]
            q1, q2 = lo.quots[I], hi.quots[I]
            cols = [q2.project(G.scale(sI ** B, q1.lift_elt(b))) for b in q1.group.basis()]
            return ab.from_columns(cols, q2.group.rank) if q2.group.rank else None
        out.append(_assemble(lo.positions[k], hi.positions[k], comp))
    return out


def _classes_die(groups_lo, groups_hi, lo: _Bounded, hi: _Bounded, tau: list) -> list[bool]:
    """At each position: every cocycle of ``C_B`` maps to a coboundary of ``C_{2B}``."""
    out = []
    n = len(groups_lo)
    for k in range(n):
        G, H = groups_lo[k], groups_hi[k]
        if G.rank == 0:
            out.append(True)
            continue
        Z = ab.kernel(G, groups_lo[k + 1], lo.diffs[k]) if k < n - 1 else ab.subgroup(G, G.basis())
        if k == 0:
            img = ab.subgroup(H, [])
        else:
            img = ab.image(groups_hi[k - 1], H, hi.diffs[k - 1]) if H.rank else ab.subgroup(H, [])
        ok = True
        for b in Z.group.basis():
            v = H.reduce(ab.apply(tau[k], Z.embed(b))) if H.rank else ()
            if not img.contains(v):
                ok = False
                break
        out.append(ok)
    return out


def _max_exponent(M: FPModule, cover: Cover) -> int:
    e = 1
    for d in M.group.invariants:
        if not d:
            continue
        for s in cover.elements:
            for p in tm.prime_factors(int(s)):
                k, x = 0, d
                while x % p == 0:
                    x //= p
                    k += 1
                e = max(e, k)
    return e


def _coresolution_integers(M: FPModule, cover: Cover) -> CechComplex:
    for s in cover.elements:
        if int(s) == 0:
            raise BackendUnavailable("the zero element localizes to the zero ring; drop it from the cover")
    Bmax = 2 * _max_exponent(M, cover)
    tame_M = TameModule(tuple(tm.Z if d == 0 else tm.Zn(d) for d in M.invariant_factors()))
    exact = None
    sweep = []
    for B in range(1, Bmax + 1):
        lo = _bounded_complex(M, cover, B)
        hi = _bounded_complex(M, cover, 2 * B)
        glo = [ab.direct_sum(*[g for _, _, g in p]) for p in lo.positions]
        ghi = [ab.direct_sum(*[g for _, _, g in p]) for p in hi.positions]
        tau = _transition(M, cover, lo, hi, B)
        dies = _classes_die(glo, ghi, lo, hi, tau)
        sweep.append({"B": B, "classes_die": dies, "squares_zero": _squares_zero(glo, lo.diffs)})
        exact = dies if exact is None else [a and b for a, b in zip(exact, dies)]
    s = [int(x) for x in cover.elements]
    positions = []
    for k in range(cover.d + 1):
        pos = []
        for I in subsets(cover.d, k):
            sI = 1
            for i in I:
                sI *= s[i]
            T = tame_localize(tame_M, sI) if I else tame_M
            pos.append((I, T.label().split(" (over")[0], lo.positions[k][subsets(cover.d, k).index(I)][2]))
        positions.append(pos)
    C = CechComplex(cover, M, "coresolution", positions, lo.diffs, exact,
                    all(x["squares_zero"] for x in sweep),
                    [f"bounded-denominator sweep B = 1..{Bmax}; term groups shown are numerators at B = {Bmax}",
                     {"sweep": sweep}])
    return C


# ---------------------------------------------------------------------------
# Locality harness
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    status: str  # PASS / FAIL / SKIPPED
    detail: str = ""
    witness: Any = None

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, FPModule):
            w = {"module": w.describe(), "descriptor": w.descriptor}
        elif w is not None and not isinstance(w, (str, int, dict, list)):
            w = repr(w)
        return {"status": self.status, "detail": self.detail, "witness": w}


@dataclass
class LocalityVerdict:
    class_name: str
    instance: str
    cover: str
    checks: dict

    def to_json(self) -> dict:
        return {"class": self.class_name, "instance": self.instance, "cover": self.cover,
                "checks": {k: v.to_json() for k, v in self.checks.items()}}

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if v.status == "FAIL"]


def _localize(M, s):
    if hasattr(M, "localize"):
        return M.localize(s)
    from .rings import localize_ring, RingHom

    S, h = localize_ring(M.ring, s)
    return md.extend_scalars(M, RingHom(M.ring, S, h.action, s=h.s, name="loc")), h


def locality_harness(cls, instances, covers, *, direct_image_instances=None,
                     co: bool = False) -> list[LocalityVerdict]:
    """Per-instance ascent / descent / direct-image (and co-) checks for a class.

    ``cls`` is a :class:`antiloc.cotorsion.ClassSpec`; membership may return
    ``None`` (undecided), which yields SKIPPED.  No universal claim is made.
    """
    out = []
    for M in instances:
        for cover in covers:
            if getattr(M, "ring", None) != cover.ring:
                continue
            checks = {}
            try:
                here = cls.member(M)
                locs = []
                for s in cover.elements:
                    L, h = _localize(M, s)
                    locs.append((s, L, cls.member(L)))
            except BackendUnavailable as exc:
                checks["ascent"] = CheckResult("SKIPPED", str(exc))
                out.append(LocalityVerdict(cls.name, _name(M), _cov(cover), checks))
                continue
            if here is None or any(m is None for _, _, m in locs):
                checks["ascent"] = CheckResult("SKIPPED", "membership undecided")
                checks["descent"] = CheckResult("SKIPPED", "membership undecided")
            else:
                bad = [(s, L) for s, L, m in locs if not m]
                if here and bad:
                    checks["ascent"] = CheckResult("FAIL", f"localization at {bad[0][0]} leaves the class", bad[0][1])
                else:
                    checks["ascent"] = CheckResult("PASS", "vacuous" if not here else "")
                if all(m for _, _, m in locs) and not here:
                    checks["descent"] = CheckResult("FAIL", "all localizations in the class but M is not", M)
                else:
                    checks["descent"] = CheckResult("PASS", "" if all(m for _, _, m in locs) else "vacuous")
            if co:
                checks.update(_co_checks(cls, M, cover))
            out.append(LocalityVerdict(cls.name, _name(M), _cov(cover), checks))
    for (N, hom) in direct_image_instances or []:
        checks = {}
        mN = cls.member(N)
        NR = md.restrict_scalars(N, hom)
        mR = cls.member(NR)
        if mN is None or mR is None:
            checks["direct_image"] = CheckResult("SKIPPED", "membership undecided")
        elif mN and not mR:
            checks["direct_image"] = CheckResult("FAIL", "restriction of scalars leaves the class", NR)
        else:
            checks["direct_image"] = CheckResult("PASS", "" if mN else "vacuous")
        out.append(LocalityVerdict(cls.name, _name(N), repr(hom.source) + " -> " + repr(hom.target), checks))
    return out


def _co_checks(cls, M, cover: Cover) -> dict:
    checks = {}
    if not isinstance(M, FPModule) or not isinstance(M.ring, FiniteRing):
        return {"coascent": CheckResult("SKIPPED", "colocalization outside finite rings"),
                "codescent": CheckResult("SKIPPED", "colocalization outside finite rings")}
    here = cls.member(M)
    cols = [(s, md.colocalize(M, s).module) for s in cover.elements]
    mems = [(s, C, cls.member(C)) for s, C in cols]
    if here is None or any(m is None for _, _, m in mems):
        return {"coascent": CheckResult("SKIPPED", "membership undecided"),
                "codescent": CheckResult("SKIPPED", "membership undecided")}
    bad = [(s, C) for s, C, m in mems if not m]
    checks["coascent"] = (CheckResult("FAIL", f"colocalization at {bad[0][0]} leaves the class", bad[0][1])
                          if here and bad else CheckResult("PASS", "" if here else "vacuous"))
    allin = all(m for _, _, m in mems)
    checks["codescent"] = (CheckResult("FAIL", "all colocalizations in the class but M is not", M)
                           if allin and not here else CheckResult("PASS", "" if allin else "vacuous"))
    return checks


def _name(M) -> str:
    if isinstance(M, FPModule):
        return f"{M.ring.name}: {M.describe()}"
    return getattr(M, "name", repr(M))


def _cov(cover: Cover) -> str:
    return "(" + ", ".join(cover.ring.fmt(s) for s in cover.elements) + ")"
