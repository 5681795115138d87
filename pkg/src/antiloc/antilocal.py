"""Chart-filtered approximation sequences and their certificates.

Over a finite ring ``R`` with a cover ``s_1, ..., s_d`` every chart
``R[1/s_j]`` is ``e_j R`` for an idempotent ``e_j``; localization and
colocalization of a module ``M`` are both ``e_j M``.  The builders follow
the induction by pullbacks (precovers) and pushouts (copreenvelopes) along
the charts, then close up with the Salce square.  Certificates are plain
JSON and :func:`verify_certificate` re-checks them from scratch with the
abelian-group primitives only.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import dataclass, field
from typing import Any

from . import abelian as ab
from . import modules as md
from .cotorsion import (ApproximationSequence, ClassSpec, CotorsionPairSpec, class_by_name, pair_all_injective,
                        pair_projective_all)
from .linalg import BackendUnavailable
from .modules import FPModule, ModuleMap, ShortExactSequence
from .rings import Cover, FiniteRing, idempotent_chart, localize_ring, ring_from_descriptor

log = logging.getLogger(__name__)


class ConstructionError(RuntimeError):
    """A provider or membership check failed; ``diagram`` holds the serialized state."""

    def __init__(self, msg: str, diagram: dict | None = None):
        super().__init__(msg)
        self.diagram = diagram or {}


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def module_to_json(M: FPModule) -> dict:
    return {"invariants": list(M.group.invariants), "acts": [list(map(list, a)) for a in M.acts]}


def module_from_json(R, d: dict) -> FPModule:
    G = ab.AbGroup(tuple(int(x) for x in d["invariants"]))
    acts = [[list(map(int, row)) for row in a] for a in d["acts"]]
    return md._from_model(R, G, acts)


def _vec(v) -> list:
    return [int(x) for x in v]


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


class Chart:
    """``R[1/s]`` as ``eR`` with localization ``M -> eM`` and restriction of scalars."""

    def __init__(self, R: FiniteRing, s, index: int):
        self.R, self.s, self.index = R, R.coerce(s), index
        self.S, self.hom = localize_ring(R, s)
        self.e = idempotent_chart(R, s)

    def restrict(self, N: FPModule) -> FPModule:
        if self.S is self.R:
            return N
        return md.restrict_scalars(N, self.hom)

    def restrict_map(self, f: ModuleMap, src: FPModule, tgt: FPModule) -> ModuleMap:
        return ModuleMap(src, tgt, f.matrix, check=False)

    def localize(self, M: FPModule) -> tuple[FPModule, FPModule, ModuleMap, ModuleMap]:
        """``(N, N|R, M -> N|R, N|R -> M)``: the chart module, its restriction,
        the localization map and the inclusion of ``eM`` (the colocalization map)."""
        eM, inc = md.chart_module(M, self.e)
        if self.S is self.R:
            N = eM
        else:
            N = md.to_chart_ring(eM, self.S)
        NR = self.restrict(N)
        cols = [inc.preimage(M.smul(self.e, b)) for b in M.group.basis()]
        lam = ModuleMap(M, NR, md._shape(ab.from_columns(cols, NR.group.rank), NR.group.rank, M.group.rank))
        incl = ModuleMap(NR, M, inc.matrix, check=False)
        return N, NR, lam, incl


def charts_of(cover: Cover) -> list[Chart]:
    return [Chart(cover.ring, s, j) for j, s in enumerate(cover.elements)]


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass
class FiltrationCertificate:
    """``0 = F_0 < F_1 < ... < F_N = F`` with ``F_i/F_{i-1}`` restricted from chart modules,
    and ``M`` a direct summand of ``F`` (``rho . iota = id_M``)."""

    ring: FiniteRing
    cover: Cover
    module: FPModule
    witness: FPModule
    iota: list
    rho: list
    steps: list = field(default_factory=list)   # dicts: chart, class, generators, images, chart_module
    side: str = "right"
    pruned: list = field(default_factory=list)
    ambient: str = "all"

    @property
    def length(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        R = self.ring
        return {
            "kind": "filtration",
            "ring": R.descriptor,
            "cover": {"elements": [_vec(s) for s in self.cover.elements],
                      "witness": [_vec(c) for c in self.cover.bezout_witness]},
            "ambient": self.ambient,
            "side": self.side,
            "module": module_to_json(self.module),
            "witness": module_to_json(self.witness),
            "iota": self.iota,
            "rho": self.rho,
            "steps": [{"chart": st["chart"], "class": st["class"], "generators": [_vec(g) for g in st["generators"]],
                       "images": [_vec(y) for y in st["images"]], "chart_module": module_to_json(st["chart_module"])}
                      for st in self.steps],
            "pruned": self.pruned,
        }


@dataclass
class StrongDecomposition:
    """``D`` as a direct summand of ``(+)_j D_j|R`` with chart modules ``D_j``."""

    ring: FiniteRing
    cover: Cover
    module: FPModule
    summands: list            # (chart index, class name, chart module)
    iota: list                # D -> sum
    rho: list                 # sum -> D
    side: str = "right"

    def to_json(self) -> dict:
        return {
            "kind": "strong",
            "ring": self.ring.descriptor,
            "cover": {"elements": [_vec(s) for s in self.cover.elements],
                      "witness": [_vec(c) for c in self.cover.bezout_witness]},
            "side": self.side,
            "module": module_to_json(self.module),
            "summands": [{"chart": j, "class": c, "chart_module": module_to_json(N)} for j, c, N in self.summands],
            "iota": self.iota,
            "rho": self.rho,
        }

    def describe(self) -> str:
        parts = [f"{module_label(N)}@{j}" for j, _, N in self.summands]
        return " + ".join(parts) or "0"


def module_label(M: FPModule) -> str:
    return repr(M.group)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _point(emb: ModuleMap, v) -> tuple:
    z = emb.preimage(tuple(v))
    if z is None:
        raise ConstructionError("element is not in the pullback")
    return z


def _pullback_embedding(pb) -> ModuleMap:
    return md.vstack([pb.p1, pb.p2], md.direct_sum(pb.p1.target, pb.p2.target).module)


def _map_from_cols(src: FPModule, tgt: FPModule, cols: list) -> ModuleMap:
    return ModuleMap(src, tgt, md._shape(ab.from_columns(cols, tgt.group.rank), tgt.group.rank, src.group.rank))


def _step(chart: Chart, cls: str, gens: list, images: list, N: FPModule) -> dict:
    return {"chart": chart.index, "class": cls, "generators": [tuple(g) for g in gens],
            "images": [tuple(y) for y in images], "chart_module": N}


def _prune(steps: list) -> tuple[list, list]:
    kept, pruned = [], []
    for st in steps:
        if st["chart_module"].group.rank == 0 or st["chart_module"].order == 1:
            pruned.append({"chart": st["chart"], "reason": "zero quotient"})
            log.debug("pruned zero step on chart %s", st["chart"])
        else:
            kept.append(st)
    return kept, pruned


def _local_left_member(pair: CotorsionPairSpec, N: FPModule) -> bool:
    return pair.left.member(N) is not False


def _local_right_member(pair: CotorsionPairSpec, N: FPModule) -> bool:
    return pair.right.member(N) is not False


def _antilocal_left(charts: list[Chart], local_pairs: list) -> ClassSpec:
    def member(M: FPModule) -> bool:
        return all(_local_left_member(p, c.localize(M)[0]) for c, p in zip(charts, local_pairs))
    return ClassSpec("A_R (chartwise)", member)


def _antilocal_right(charts: list[Chart], local_pairs: list) -> ClassSpec:
    def member(M: FPModule) -> bool:
        return all(_local_right_member(p, c.localize(M)[0]) for c, p in zip(charts, local_pairs))
    return ClassSpec("B_R (chartwise)", member)


def _certified(name: str) -> ClassSpec:
    return ClassSpec(name, lambda M: None, kind="certificate")


# ---------------------------------------------------------------------------
# Precovers by pullbacks
# ---------------------------------------------------------------------------


@dataclass
class PrecoverRun:
    sequence: ApproximationSequence
    certificate: FiltrationCertificate
    tower: list                        # E(0), E(1), ..., E(d)
    invariants: list                   # records of the per-step checks
    total: ModuleMap                   # E(d) -> E


def build_precover_filtration(E: FPModule, cover: Cover, local_pairs: list) -> tuple[ApproximationSequence,
                                                                                       FiltrationCertificate]:
    run = _precover_run(E, cover, local_pairs)
    return run.sequence, run.certificate


def _precover_run(E: FPModule, cover: Cover, local_pairs: list) -> PrecoverRun:
    charts = charts_of(cover)
    if len(local_pairs) != len(charts):
        raise ValueError("one local pair per chart")
    tower = [E]
    down = []            # q_j: E(j) -> E(j-1)
    kernels = []         # B_j|R -> E(j), chart module B_j
    invariants = []
    for chart, pair in zip(charts, local_pairs):
        prev = tower[-1]
        N, NR, lam, _ = chart.localize(prev)
        loc = pair.precover(N)
        probs = loc.problems()
        if probs:
            raise ConstructionError(f"chart {chart.index} precover invalid: {probs}",
                                    {"chart": chart.index, "module": module_to_json(N)})
        seq = loc.sequence
        BR, AR = chart.restrict(seq.A), chart.restrict(seq.B)
        iR = chart.restrict_map(seq.i, BR, AR)
        pR = chart.restrict_map(seq.p, AR, NR)
        pb = md.pullback(lam, pR)
        P = pb.module
        emb = _pullback_embedding(pb)
        cols = [_point(emb, tuple(prev.zero()) + tuple(iR.apply(b))) for b in BR.group.basis()]
        kin = _map_from_cols(BR, P, cols)
        tower.append(P)
        down.append(pb.p1)
        kernels.append((kin, seq.A))
        # E(j)[1/s_j] -> A_j is an isomorphism; E(j)[1/s_k] in A_k for k <= j
        eP, einc = md.chart_module(P, chart.e)
        iso = pb.p2.compose(ModuleMap(eP, P, einc.matrix, check=False)).is_iso()
        members = [_local_left_member(local_pairs[k], charts[k].localize(P)[0]) for k in range(chart.index + 1)]
        invariants.append({"step": chart.index, "localized_iso": iso, "chart_memberships": members})
        if not iso or not all(members):
            raise ConstructionError(f"induction invariant fails at chart {chart.index}",
                                    {"step": chart.index, "localized_iso": iso, "memberships": members,
                                     "E(j)": module_to_json(P)})
    d = len(charts)
    # composites E(d) -> E(j)
    to = {d: md.identity_map(tower[d])}
    for j in range(d, 0, -1):
        to[j - 1] = down[j - 1].compose(to[j])
    total = to[0]
    Bpp, binc = md.kernel(total)
    # K_j = ker(E(d) -> E(j)); K_{j-1}/K_j = B_j
    steps = []
    for j in range(d, 0, -1):
        K, kinc = md.kernel(to[j - 1])
        kin, Bj = kernels[j - 1]
        gens, imgs = [], []
        for b in K.group.basis():
            x = kinc.apply(b)
            y = to[j].apply(x)
            z = kin.preimage(y)
            if z is None:
                raise ConstructionError("kernel element does not come from B_j")
            gens.append(binc.preimage(x))
            imgs.append(z)
        steps.append(_step(charts[j - 1], local_pairs[j - 1].right.name, gens, imgs, Bj))
    steps, pruned = _prune(steps)
    ident = md.identity_map(Bpp).matrix
    cert = FiltrationCertificate(cover.ring, cover, Bpp, Bpp, ident, ident, steps, "right", pruned)
    seq = ShortExactSequence(binc, total)
    left = _antilocal_left(charts, local_pairs)
    approx = ApproximationSequence("precover", seq, left, _certified("B'_R (filtered)"))
    return PrecoverRun(approx, cert, tower, invariants, total)


def build_preenvelope_filtration(F: FPModule, cover: Cover, local_pairs: list) -> tuple[ApproximationSequence,
                                                                                         FiltrationCertificate]:
    """Chart preenvelopes ``F[1/s_k] -> B'_k``, then the Salce pullback with a precover of the cokernel."""
    charts = charts_of(cover)
    Bs, comps = [], []
    for chart, pair in zip(charts, local_pairs):
        N, NR, lam, _ = chart.localize(F)
        loc = pair.preenvelope(N)
        probs = loc.problems()
        if probs:
            raise ConstructionError(f"chart {chart.index} preenvelope invalid: {probs}")
        seq = loc.sequence
        BR = chart.restrict(seq.B)
        comps.append(chart.restrict_map(seq.i, NR, BR).compose(lam))
        Bs.append((BR, seq.B))
    ds = md.direct_sum(*[b for b, _ in Bs])
    Bprime = ds.module
    into = md.vstack(comps, Bprime)
    if not into.is_injective():
        raise ConstructionError("F -> (+) F[1/s_k] is not injective: the elements do not cover")
    Emod, c = md.cokernel(into)
    run = _precover_run(Emod, cover, local_pairs)
    pb = md.pullback(c, run.total)
    B = pb.module
    emb = _pullback_embedding(pb)
    Ed = run.tower[-1]
    j = _map_from_cols(F, B, [_point(emb, tuple(into.apply(f)) + tuple(Ed.zero())) for f in F.group.basis()])
    seq = ShortExactSequence(j, pb.p2)
    # filtration of B: the B'' block (inside E(d)), then the summands of B'
    Bpp = run.certificate.module
    binc = run.sequence.sequence.i
    steps = []
    to_B = lambda x: _point(emb, tuple(Bprime.zero()) + tuple(binc.apply(x)))
    for st in run.certificate.steps:
        steps.append({**st, "generators": [to_B(g) for g in st["generators"]]})
    d = len(charts)
    for k in range(d):
        rest = [ds.projections[m].compose(pb.p1) for m in range(k + 1, d)]
        if rest:
            K, kinc = md.kernel(md.vstack(rest, md.direct_sum(*[Bs[m][0] for m in range(k + 1, d)]).module))
            gens = [kinc.apply(b) for b in K.group.basis()]
        else:
            gens = list(B.group.basis())
        phi = ds.projections[k].compose(pb.p1)
        imgs = [phi.apply(g) for g in gens]
        steps.append(_step(charts[k], local_pairs[k].right.name, gens, imgs, Bs[k][1]))
    steps, pruned = _prune(steps)
    ident = md.identity_map(B).matrix
    cert = FiltrationCertificate(cover.ring, cover, B, B, ident, ident, steps, "right",
                                 run.certificate.pruned + pruned)
    approx = ApproximationSequence("preenvelope", seq, _antilocal_left(charts, local_pairs),
                                   _certified("B'_R (filtered)"))
    return approx, cert


# ---------------------------------------------------------------------------
# Copreenvelopes by pushouts
# ---------------------------------------------------------------------------


@dataclass
class CopreenvelopeRun:
    sequence: ApproximationSequence
    certificate: FiltrationCertificate
    tower: list
    invariants: list
    total: ModuleMap                   # E -> E(d)


def build_copreenvelope_filtration(E: FPModule, cover: Cover, local_pairs: list) -> tuple[ApproximationSequence,
                                                                                           FiltrationCertificate]:
    run = _copreenvelope_run(E, cover, local_pairs)
    return run.sequence, run.certificate


def _copreenvelope_run(E: FPModule, cover: Cover, local_pairs: list) -> CopreenvelopeRun:
    if not isinstance(E.ring, FiniteRing):
        raise BackendUnavailable("copreenvelope runs are finite-ring only (all finite modules are contraadjusted)")
    charts = charts_of(cover)
    tower, ups, quots, invariants = [E], [], [], []
    for chart, pair in zip(charts, local_pairs):
        prev = tower[-1]
        N, NR, _, incl = chart.localize(prev)
        loc = pair.preenvelope(N)
        probs = loc.problems()
        if probs:
            raise ConstructionError(f"chart {chart.index} preenvelope invalid: {probs}")
        seq = loc.sequence
        BR, AR = chart.restrict(seq.B), chart.restrict(seq.C)
        iR = chart.restrict_map(seq.i, NR, BR)
        pR = chart.restrict_map(seq.p, BR, AR)
        po = md.pushout(iR, incl)
        Q = po.module
        both = md.hstack([po.i1, po.i2], md.direct_sum(BR, prev).module)
        cols = []
        for g in Q.group.basis():
            w = both.preimage(g)
            cols.append(pR.apply(w[:BR.group.rank]) if BR.group.rank else AR.zero())
        q = _map_from_cols(Q, AR, cols)
        tower.append(Q)
        ups.append(po.i2)
        quots.append((q, seq.C))
        members = [_local_right_member(local_pairs[k], charts[k].localize(Q)[0]) for k in range(chart.index + 1)]
        invariants.append({"step": chart.index, "chart_memberships": members})
        if not all(members):
            raise ConstructionError(f"induction invariant fails at chart {chart.index}",
                                    {"step": chart.index, "memberships": members, "E(j)": module_to_json(Q)})
    d = len(charts)
    frm = {0: md.identity_map(E)}
    for j in range(1, d + 1):
        frm[j] = ups[j - 1].compose(frm[j - 1])
    total = frm[d]
    # E(i) -> E(d)
    into_d = {d: md.identity_map(tower[d])}
    for i in range(d - 1, -1, -1):
        into_d[i] = into_d[i + 1].compose(ups[i])
    App, c = md.cokernel(total)
    steps = []
    for i in range(1, d + 1):
        q, Ai = quots[i - 1]
        gens = [c.apply(into_d[i].apply(b)) for b in tower[i].group.basis()]
        imgs = [q.apply(b) for b in tower[i].group.basis()]
        steps.append(_step(charts[i - 1], local_pairs[i - 1].left.name, gens, imgs, Ai))
    steps, pruned = _prune(steps)
    ident = md.identity_map(App).matrix
    cert = FiltrationCertificate(cover.ring, cover, App, App, ident, ident, steps, "left", pruned)
    seq = ShortExactSequence(total, c)
    approx = ApproximationSequence("preenvelope", seq, _certified("A'_R (filtered)"),
                                   _antilocal_right(charts, local_pairs))
    return CopreenvelopeRun(approx, cert, tower, invariants, total)


def build_coprecover_filtration(F: FPModule, cover: Cover, local_pairs: list) -> tuple[ApproximationSequence,
                                                                                        FiltrationCertificate]:
    """Chart precovers of the colocalizations, the epimorphism ``(+) A'_k -> F``, then the Salce pushout."""
    charts = charts_of(cover)
    As, comps = [], []
    for chart, pair in zip(charts, local_pairs):
        N, NR, _, incl = chart.localize(F)
        loc = pair.precover(N)
        probs = loc.problems()
        if probs:
            raise ConstructionError(f"chart {chart.index} precover invalid: {probs}")
        seq = loc.sequence
        AR = chart.restrict(seq.B)
        comps.append(incl.compose(chart.restrict_map(seq.p, AR, NR)))
        As.append((AR, seq.B))
    ds = md.direct_sum(*[a for a, _ in As])
    Aprime = ds.module
    sigma = md.hstack(comps, Aprime)
    if not sigma.is_surjective():
        raise ConstructionError("(+) Hom(R[1/s_k], F) -> F is not surjective")
    Emod, einc = md.kernel(sigma)
    run = _copreenvelope_run(Emod, cover, local_pairs)
    po = md.pushout(einc, run.total)
    A = po.module
    Ed = run.tower[-1]
    both = md.hstack([po.i1, po.i2], md.direct_sum(Aprime, Ed).module)
    cols = []
    for g in A.group.basis():
        w = both.preimage(g)
        cols.append(sigma.apply(w[:Aprime.group.rank]))
    p = _map_from_cols(A, F, cols)
    seq = ShortExactSequence(po.i2, p)
    steps = []
    d = len(charts)
    for k in range(d):
        gens, imgs = [], []
        for m in range(k + 1):
            for b in As[m][0].group.basis():
                gens.append(po.i1.apply(ds.injections[m].apply(b)))
                imgs.append(b if m == k else As[k][0].zero())
        steps.append(_step(charts[k], local_pairs[k].left.name, gens, imgs, As[k][1]))
    base = [po.i1.apply(b) for b in Aprime.group.basis()]
    # the A'' block: lift each step of the run's certificate through E(d) -> A
    cpp = run.sequence.sequence.p          # E(d) -> A''
    for st in run.certificate.steps:
        Ai = st["chart_module"]
        gens = list(base)
        imgs = [Ai.zero() for _ in base]
        for g, y in zip(st["generators"], st["images"]):
            x = cpp.preimage(g)
            gens.append(po.i2.apply(x))
            imgs.append(y)
        steps.append({**st, "generators": gens, "images": imgs})
    steps, pruned = _prune(steps)
    ident = md.identity_map(A).matrix
    cert = FiltrationCertificate(cover.ring, cover, A, A, ident, ident, steps, "left",
                                 run.certificate.pruned + pruned)
    approx = ApproximationSequence("precover", seq, _certified("A'_R (filtered)"),
                                   _antilocal_right(charts, local_pairs))
    return approx, cert


# ---------------------------------------------------------------------------
# Strong antilocality
# ---------------------------------------------------------------------------


def _solve_retraction(iota: ModuleMap) -> ModuleMap | None:
    """``rho`` with ``rho . iota = id``."""
    D, T = iota.source, iota.target
    H = md.hom_module(T, D)
    mat = md.hom_precompose_matrix(H, iota)
    HD = md.hom_module(D, D)
    idv = HD.from_map(md.identity_map(D))
    if H.module.group.rank == 0:
        return md.zero_map(T, D) if HD.module.group.is_zero(idv) else None
    x = ab.preimage(H.module.group, HD.module.group, mat, idv)
    return None if x is None else H.to_map(x)


def _solve_section(sigma: ModuleMap) -> ModuleMap | None:
    """``tau`` with ``sigma . tau = id``."""
    S, D = sigma.source, sigma.target
    H = md.hom_module(D, S)
    mat = md.hom_postcompose_matrix(H, sigma)
    HD = md.hom_module(D, D)
    idv = HD.from_map(md.identity_map(D))
    if H.module.group.rank == 0:
        return md.zero_map(D, S) if HD.module.group.is_zero(idv) else None
    x = ab.preimage(H.module.group, HD.module.group, mat, idv)
    return None if x is None else H.to_map(x)


@dataclass
class DecompositionFailure:
    sequence: ShortExactSequence
    reason: str


def strong_decompose(D: FPModule, cover: Cover, local_pairs: list, side: str = "right"):
    """Exhibit ``D`` as a summand of a sum of chart modules.

    ``side="right"``: chart preenvelopes ``D[1/s_k] -> B_k`` and a retraction of
    ``D -> (+) B_k``.  ``side="left"``: chart precovers ``A_k -> Hom(R[1/s_k], D)``
    and a section of ``(+) A_k -> D``.  Returns a :class:`StrongDecomposition`
    or a :class:`DecompositionFailure` carrying the non-split sequence.
    """
    charts = charts_of(cover)
    parts, maps = [], []
    for chart, pair in zip(charts, local_pairs):
        N, NR, lam, incl = chart.localize(D)
        if side == "right":
            seq = pair.preenvelope(N).sequence
            XR = chart.restrict(seq.B)
            maps.append(chart.restrict_map(seq.i, NR, XR).compose(lam))
            parts.append((chart.index, pair.right.name, seq.B, XR))
        else:
            seq = pair.precover(N).sequence
            XR = chart.restrict(seq.B)
            maps.append(incl.compose(chart.restrict_map(seq.p, XR, NR)))
            parts.append((chart.index, pair.left.name, seq.B, XR))
    ds = md.direct_sum(*[p[3] for p in parts])
    if side == "right":
        iota = md.vstack(maps, ds.module)
        rho = _solve_retraction(iota)
        if rho is None:
            return DecompositionFailure(md.ses_from_inclusion(iota), "D -> (+) B_k does not split")
    else:
        rho = md.hstack(maps, ds.module)
        iota = _solve_section(rho)
        if iota is None:
            return DecompositionFailure(md.ses_from_surjection(rho), "(+) A_k -> D does not split")
    # prune zero summands
    keep = [i for i, p in enumerate(parts) if p[3].group.rank and p[3].order > 1]
    if len(keep) != len(parts):
        sub = md.direct_sum(*[parts[i][3] for i in keep]) if keep else None
        if sub is None:
            Z = md.zero_module(D.ring)
            return StrongDecomposition(cover.ring, cover, D, [], md.zero_map(D, Z).matrix, md.zero_map(Z, D).matrix, side)
        P = md.vstack([ds.projections[i] for i in keep], sub.module)
        I = md.hstack([ds.injections[i] for i in keep], sub.module)
        iota, rho = P.compose(iota), rho.compose(I)
    summ = [(parts[i][0], parts[i][1], parts[i][2]) for i in keep]
    return StrongDecomposition(cover.ring, cover, D, summ, iota.matrix, rho.matrix, side)


# ---------------------------------------------------------------------------
# Verification (independent of the builders)
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    ok: bool
    diagnostics: list

    def __bool__(self) -> bool:
        return self.ok


class _Reject(Exception):
    pass


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise _Reject(msg)


def _mat(m, rows: int, cols: int) -> list:
    m = [[int(x) for x in r] for r in (m or [])]
    if rows == 0:
        _need(not m, "matrix has rows for a zero target")
        return []
    _need(len(m) == rows and all(len(r) == cols for r in m), f"matrix shape must be {rows}x{cols}")
    return m


def _check_model(R: FiniteRing, G: ab.AbGroup, acts: list, label: str) -> None:
    """Module axioms for an action of ``R`` on ``G`` given on the additive basis of ``R``."""
    n = G.rank
    _need(len(acts) == len(R.basis_mult), f"{label}: one action matrix per ring basis element")
    mats = [_mat(a, n, n) for a in acts]
    for a in mats:
        _need(ab.is_hom(G, G, a), f"{label}: action is not additive")
    # additive orders and multiplicativity on basis elements
    for i, bi in enumerate(R.group.basis()):
        o = R.group.invariants[i]
        _need(all(G.is_zero([o * x for x in col]) for col in ab.columns(mats[i], n)) if n else True,
              f"{label}: basis element {i} of order {o} acts with larger order")
    one = R.one
    act_one = _combo(mats, one, n)
    for c, col in enumerate(ab.columns(act_one, n) if n else []):
        e = [0] * n
        e[c] = 1
        _need(G.reduce(col) == G.reduce(e), f"{label}: 1 does not act as the identity")
    for i, bi in enumerate(R.group.basis()):
        for j, bj in enumerate(R.group.basis()):
            prod = _combo(mats, R.mul(bi, bj), n)
            lhs = ab.compose(mats[i], mats[j], n) if n else []
            _need(ab.reduce_matrix(G, lhs) == ab.reduce_matrix(G, prod), f"{label}: action is not multiplicative")


def _combo(mats: list, coeffs, n: int) -> list:
    out = [[0] * n for _ in range(n)]
    for c, m in zip(coeffs, mats):
        for r in range(n):
            for k in range(n):
                out[r][k] += c * m[r][k]
    return out


def _linear(R, GA, actsA, GB, actsB, m, label: str) -> None:
    _need(ab.is_hom(GA, GB, m), f"{label}: not additive")
    for t in range(len(R.basis_mult)):
        if not (GA.rank and GB.rank):
            continue
        l = ab.compose(m, actsA[t], GA.rank)
        r = ab.compose(actsB[t], m, GB.rank)
        _need(ab.reduce_matrix(GB, l) == ab.reduce_matrix(GB, r), f"{label}: not R-linear")


def _load_cover(R: FiniteRing, d: dict) -> tuple:
    els = [R.group.reduce(v) for v in d["elements"]]
    wit = [R.group.reduce(v) for v in d["witness"]]
    _need(len(els) == len(wit) and els, "cover needs elements and matching witness")
    total = R.zero
    for c, s in zip(wit, els):
        total = R.add(total, R.mul(c, s))
    _need(total == R.one, "Bezout witness does not sum to 1")
    return els, wit


def _load_module(R, d: dict, label: str) -> tuple:
    G = ab.AbGroup(tuple(int(x) for x in d["invariants"]))
    acts = [[[int(x) for x in row] for row in a] for a in d["acts"]]
    _check_model(R, G, acts, label)
    return G, acts


def _chart_module_over_R(R, s, d: dict, label: str) -> tuple:
    """Load a chart module (over ``R[1/s]``), check it, restrict it to ``R``."""
    S, hom = localize_ring(R, s)
    GS, actsS = _load_module(S, d, label)
    N = md._from_model(S, GS, actsS)
    NR = N if S is R else md.restrict_scalars(N, hom)
    return N, NR


def _act_elt(R, acts, r, n) -> list:
    return _combo(acts, r, n)


def verify_certificate(cert) -> Verdict:
    """Re-validate a :class:`FiltrationCertificate`, :class:`StrongDecomposition` or its JSON."""
    data = cert.to_json() if hasattr(cert, "to_json") else cert
    try:
        data = json.loads(json.dumps(data))
        kind = data.get("kind")
        if kind == "filtration":
            return _verify_filtration(data)
        if kind == "strong":
            return _verify_strong(data)
        return Verdict(False, [f"unknown certificate kind {kind!r}"])
    except _Reject as exc:
        return Verdict(False, [str(exc)])
    except (KeyError, TypeError, ValueError, IndexError, AssertionError, ZeroDivisionError, BackendUnavailable) as exc:
        return Verdict(False, [f"malformed certificate: {type(exc).__name__}: {exc}"])


def _verify_filtration(data: dict) -> Verdict:
    diag = []
    # only the unrelaxed mode is defined
    _need(data.get("ambient", "all") == "all", f"unsupported ambient {data.get('ambient')!r}")
    R = ring_from_descriptor(data["ring"])
    _need(isinstance(R, FiniteRing), "finite rings only")
    els, _ = _load_cover(R, data["cover"])
    d = len(els)
    steps = data["steps"]
    _need(len(steps) <= 2 * d, f"filtration length {len(steps)} exceeds 2d = {2 * d}")
    GM, actsM = _load_module(R, data["module"], "module")
    GF, actsF = _load_module(R, data["witness"], "witness")
    iota = _mat(data["iota"], GF.rank, GM.rank)
    rho = _mat(data["rho"], GM.rank, GF.rank)
    _linear(R, GM, actsM, GF, actsF, iota, "iota")
    _linear(R, GF, actsF, GM, actsM, rho, "rho")
    if GM.rank:
        ri = ab.reduce_matrix(GM, ab.compose(rho, iota, GF.rank))
        idm = ab.reduce_matrix(GM, [[1 if r == c else 0 for c in range(GM.rank)] for r in range(GM.rank)])
        _need(ri == idm, "summand witness: rho . iota != id")
    prev_sub = ab.subgroup(GF, [])
    prev_gens: list = []
    for i, st in enumerate(steps, 1):
        tag = f"step {i}"
        j = int(st["chart"])
        _need(0 <= j < d, f"{tag}: chart index out of range")
        s = els[j]
        N, NR = _chart_module_over_R(R, s, st["chart_module"], f"{tag} chart module")
        GN = NR.group
        # the chart tag: s_j acts invertibly on the quotient
        sa = ab.reduce_matrix(GN, _act_elt(R, NR.acts, s, GN.rank)) if GN.rank else []
        _need(ab.is_injective(GN, GN, sa) and ab.is_surjective(GN, GN, sa) if GN.rank else True,
              f"{tag}: chart tag {j} is wrong (s_{j} does not act invertibly on the quotient)")
        cls = class_by_name(st["class"])
        _need(cls.member(N) is not False, f"{tag}: chart module is not in {st['class']}")
        gens = [GF.reduce([int(x) for x in g]) for g in st["generators"]]
        imgs = [GN.reduce([int(x) for x in y]) for y in st["images"]]
        _need(len(gens) == len(imgs), f"{tag}: generators and images differ in number")
        sub = ab.subgroup(GF, gens)
        # submodule
        for t in range(len(R.basis_mult)):
            for g in gens:
                _need(sub.contains(GF.reduce(ab.apply(actsF[t], g))), f"{tag}: F_{i} is not a submodule")
        for g in prev_gens:
            _need(sub.contains(g), f"{tag}: F_{i - 1} is not contained in F_{i}")
        # phi: F_i -> N|R on generators; well defined, linear, onto, kernel F_{i-1}
        n = len(gens)
        free = ab.AbGroup((0,) * n)
        gmat = ab.from_columns(gens, GF.rank) if n else []
        ymat = ab.from_columns(imgs, GN.rank) if n else []

        def solve(v):
            return ab.preimage(free, GF, gmat, v) if n else (None if not GF.is_zero(v) else ())

        if n:
            for rel in _relations(free, GF, gmat):
                _need(GN.is_zero(ab.apply(ymat, rel)) if GN.rank else True, f"{tag}: quotient map is not well defined")
        for t in range(len(R.basis_mult)):
            for g, y in zip(gens, imgs):
                c = solve(GF.reduce(ab.apply(actsF[t], g)))
                _need(c is not None, f"{tag}: F_{i} is not a submodule")
                lhs = GN.reduce(ab.apply(ymat, c)) if GN.rank else ()
                rhs = GN.reduce(ab.apply(NR.acts[t], y)) if GN.rank else ()
                _need(lhs == rhs, f"{tag}: quotient map is not R-linear")
        if GN.rank:
            _need(ab.subgroup(GN, imgs).group.order == GN.order, f"{tag}: quotient map is not onto")
        for g in prev_gens:
            c = solve(g)
            _need(c is not None, f"{tag}: F_{i - 1} is not contained in F_{i}")
            _need(GN.is_zero(ab.apply(ymat, c)) if GN.rank else True, f"{tag}: F_{i - 1} is not killed")
        _need(sub.group.order == prev_sub.group.order * (GN.order or 1),
              f"{tag}: F_{i}/F_{i - 1} has the wrong size")
        diag.append(f"{tag}: chart {j}, quotient {GN!r}")
        prev_sub, prev_gens = sub, gens
    _need(prev_sub.group.order == GF.order, "the filtration does not exhaust F")
    return Verdict(True, diag)


def _relations(free: ab.AbGroup, G: ab.AbGroup, m: list) -> list:
    return [ab.kernel(free, G, m).embed(b) for b in ab.kernel(free, G, m).group.basis()]


def _verify_strong(data: dict) -> Verdict:
    R = ring_from_descriptor(data["ring"])
    _need(isinstance(R, FiniteRing), "finite rings only")
    els, _ = _load_cover(R, data["cover"])
    GD, actsD = _load_module(R, data["module"], "module")
    groups, acts = [], []
    for i, sm in enumerate(data["summands"]):
        j = int(sm["chart"])
        _need(0 <= j < len(els), f"summand {i}: chart index out of range")
        N, NR = _chart_module_over_R(R, els[j], sm["chart_module"], f"summand {i}")
        G = NR.group
        sa = ab.reduce_matrix(G, _act_elt(R, NR.acts, els[j], G.rank)) if G.rank else []
        _need((ab.is_injective(G, G, sa) and ab.is_surjective(G, G, sa)) if G.rank else True,
              f"summand {i}: chart tag {j} is wrong")
        _need(class_by_name(sm["class"]).member(N) is not False, f"summand {i}: not in {sm['class']}")
        groups.append(G)
        acts.append(NR.acts)
    GT = ab.direct_sum(*groups) if groups else ab.TRIVIAL
    actsT = []
    for t in range(len(R.basis_mult)):
        m = [[0] * GT.rank for _ in range(GT.rank)]
        off = 0
        for G, a in zip(groups, acts):
            for r in range(G.rank):
                for c in range(G.rank):
                    m[off + r][off + c] = a[t][r][c]
            off += G.rank
        actsT.append(m)
    iota = _mat(data["iota"], GT.rank, GD.rank)
    rho = _mat(data["rho"], GD.rank, GT.rank)
    if GT.rank:
        _linear(R, GD, actsD, GT, actsT, iota, "iota")
    if GD.rank:
        _linear(R, GT, actsT, GD, actsD, rho, "rho")
        ri = ab.reduce_matrix(GD, ab.compose(rho, iota, GT.rank) if GT.rank else [[0] * GD.rank for _ in range(GD.rank)])
        idm = ab.reduce_matrix(GD, [[1 if r == c else 0 for c in range(GD.rank)] for r in range(GD.rank)])
        _need(ri == idm, "rho . iota != id")
    return Verdict(True, [f"{len(groups)} chart summands"])


# ---------------------------------------------------------------------------
# Mutation corpus
# ---------------------------------------------------------------------------


def _nonzero_vec(G_inv: list) -> list:
    for i, d in enumerate(G_inv):
        if d != 1:
            v = [0] * len(G_inv)
            v[i] = 1
            return v
    return []


def mutate(cert_json: dict) -> list[tuple[str, dict]]:
    """Invalid variants of a valid filtration certificate (each must be rejected)."""
    out = []
    base = cert_json
    steps = base["steps"]
    d = len(base["cover"]["elements"])

    def m(name, fn):
        c = copy.deepcopy(base)
        if fn(c) is not False:
            out.append((name, c))

    def forge_tag(c, i):
        c["steps"][i]["chart"] = (c["steps"][i]["chart"] + 1) % d

    def pad(c):
        z = {"chart": 0, "class": steps[0]["class"] if steps else "all", "generators": [], "images": [],
             "chart_module": {"invariants": [], "acts": [[] for _ in c["witness"]["acts"]]}}
        last = c["steps"][-1] if c["steps"] else None
        while len(c["steps"]) <= 2 * d:
            c["steps"].append(copy.deepcopy(last) if last else copy.deepcopy(z))

    def zero_images(c, i):
        c["steps"][i]["images"] = [[0] * len(y) for y in c["steps"][i]["images"]]

    def drop(c, i):
        del c["steps"][i]

    def swap(c):
        c["steps"][0], c["steps"][1] = c["steps"][1], c["steps"][0]

    def bad_rho(c):
        c["rho"] = [[0] * len(r) for r in c["rho"]]

    def bad_cover(c):
        c["cover"]["witness"] = [[0] * len(w) for w in c["cover"]["witness"]]

    def bad_class(c, i):
        c["steps"][i]["class"] = "zero"

    def drop_generator(c, i):
        if len(c["steps"][i]["generators"]) < 1:
            return False
        c["steps"][i]["generators"].pop()
        c["steps"][i]["images"].pop()

    def bad_action(c):
        acts = c["witness"]["acts"]
        if not acts or not acts[0]:
            return False
        acts[0][0][0] += 1

    for i in range(len(steps)):
        m(f"forged-tag-{i}", lambda c, i=i: forge_tag(c, i))
        m(f"zero-images-{i}", lambda c, i=i: zero_images(c, i))
        m(f"drop-step-{i}", lambda c, i=i: drop(c, i))
        m(f"wrong-class-{i}", lambda c, i=i: bad_class(c, i))
        m(f"drop-generator-{i}", lambda c, i=i: drop_generator(c, i))
    if len(steps) >= 2:
        m("swap-steps", swap)
    m("length-2d+1", pad)
    if base["rho"] and any(base["rho"]):
        m("broken-summand-witness", bad_rho)
    m("bad-cover-witness", bad_cover)
    m("broken-action", bad_action)
    return out


# ---------------------------------------------------------------------------
# Tame Z runs (free modules only)
# ---------------------------------------------------------------------------


@dataclass
class TameRun:
    kind: str
    sequence: tuple          # labels of the three terms
    filtration: list         # (chart element, label) steps
    checks: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "sequence": list(self.sequence),
                "filtration": [list(x) for x in self.filtration], "checks": self.checks}


def tame_antilocal_run(rank: int, cover: tuple, kind: str) -> TameRun:
    """Builders for ``E = Z^rank`` over ``Z`` with the pairs (all, injective) on the charts.

    Precover: every chart of a free module is free, so the chart precovers are
    trivial and ``B'' = 0``.  Preenvelope: the chart preenvelopes are the
    injective hulls ``Z[1/s]^r -> Q^r``; the cokernel ``Q^{rd}/Z^r`` keeps a
    trivial precover, so ``B = Q^{rd}``.
    """
    from . import tame as tm

    E = tm.TameModule(tuple([tm.Z] * rank))
    charts = [tm.tame_localize(E, s) for s in cover]
    checks = {"chart_free": all(all(x.kind == "L" for x in C.summands) for C in charts)}
    if kind == "precover":
        return TameRun(kind, ("0", E.label(), E.label()), [], checks)
    if kind != "preenvelope":
        raise ValueError("kind is 'precover' or 'preenvelope'")
    hulls = [tm.TameModule(tuple([tm.QQ] * rank), abs(s)) for s in cover]
    checks["hulls_injective"] = all(tm.is_injective_over(H) for H in hulls)
    checks["chart_tags"] = all(all(tm.s_invertible(x, tm.PrimeSet.of(s)) for x in H.summands)
                               for H, s in zip(hulls, cover))
    B = tm.TameModule(tuple([tm.QQ] * (rank * len(cover))))
    # Z^r sits diagonally; the quotient of Q^{rd} is Q^{r(d-1)} + (Q/Z)^r
    A = tm.TameModule(tuple([tm.QQ] * (rank * (len(cover) - 1)) + [tm.D(tm.PrimeSet.all())] * rank))
    checks["length_bound"] = len(cover) <= 2 * len(cover) and len(hulls) <= 2 * len(cover)
    return TameRun(kind, (E.label(), B.label(), A.label()), [(s, H.restrict().label()) for s, H in zip(cover, hulls)],
                   checks)


# ---------------------------------------------------------------------------
# Convenience: the local pairs used by the scenarios
# ---------------------------------------------------------------------------


def local_pairs_for(cover: Cover, name: str) -> list:
    """Chart pairs by name: ``all-injective`` (hull-based precovers) or ``projective-all``."""
    out = []
    for _ in cover.elements:
        if name == "all-injective":
            out.append(pair_all_injective(precover="salce-hull"))
        elif name == "projective-all":
            out.append(pair_projective_all())
        else:
            raise KeyError(name)
    return out
