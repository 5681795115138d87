"""Shared hypothesis strategies over small finite rings and their modules."""
from hypothesis import strategies as st

from antiloc import modules as md
from antiloc.rings import ModularRing, PolyRing, QuotientPolyRing

MODULI = [2, 3, 4, 6, 8, 9, 12]


def zmod_rings():
    return st.sampled_from(MODULI).map(ModularRing)


def small_rings():
    return st.one_of(zmod_rings(), st.sampled_from(["x^2", "x^2+x", "x^2+x+1"]).map(
        lambda m: QuotientPolyRing(PolyRing(2), m)))


@st.composite
def presented(draw, R=None, max_gens=2, max_rels=2):
    """A module given by a random relation matrix over ``R``."""
    R = R or draw(small_rings())
    g = draw(st.integers(0, max_gens))
    els = R.elements()
    rows = draw(st.lists(st.lists(st.sampled_from(els), min_size=g, max_size=g), max_size=max_rels))
    return md.FPModule(R, g, rows)


@st.composite
def ring_and_modules(draw, k=2, **kw):
    R = draw(small_rings())
    return R, [draw(presented(R, **kw)) for _ in range(k)]


@st.composite
def module_map(draw, R=None):
    """A random homomorphism between two random modules."""
    R = R or draw(zmod_rings())
    A = draw(presented(R))
    B = draw(presented(R))
    H = md.hom_module(A, B)
    hs = list(H.module.elements())
    return H.to_map(draw(st.sampled_from(hs)))
