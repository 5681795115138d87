import pytest
from hypothesis import given, settings, strategies as st

from antiloc import cotorsion as ct
from antiloc import modules as md
from antiloc.rings import ModularRing, PolyRing, QuotientPolyRing, idempotent_chart

from strategies import presented, zmod_rings

Z4, Z12 = ModularRing(4), ModularRing(12)
MODS4 = md.enumerate_modules_by_order(Z4, 16)


def cyc(R, n):
    return md.cyclic_module(R, R.coerce(n))


class TestOrthogonality:
    def test_all_injective(self):
        rep = ct.orthogonality_check(ct.pair_all_injective(), MODS4)
        assert rep.status == "PASS"
        assert {c.name for c in rep.checks} == {"ext1-vanishing", "right-maximal", "left-maximal"}

    def test_projective_all(self):
        assert ct.orthogonality_check(ct.pair_projective_all(), md.enumerate_modules_by_order(Z12, 24)).status == "PASS"

    def test_flat_degenerate(self):
        p = ct.pair_flat_all()
        rep = ct.orthogonality_check(p, md.enumerate_modules_by_order(Z12, 24))
        assert rep.status == "PASS" and "degenerate" in rep.to_json()["degenerate"]


class TestHereditary:
    def test_all_injective(self):
        rep = ct.hereditary_check(ct.pair_all_injective(), MODS4)
        assert [c.status for c in rep.checks[:3]] == ["PASS"] * 3

    def test_projective_all(self):
        assert ct.hereditary_check(ct.pair_projective_all(), MODS4).status == "PASS"

    def test_broken_pair(self):
        left = ct.listed_class("broken", [cyc(Z4, 0), md.direct_sum(cyc(Z4, 2), cyc(Z4, 0)).module])
        broken = ct.CotorsionPairSpec(ct.all_modules(), left, ct.all_modules(), name="broken")
        line = ct.hereditary_check(broken, MODS4, degrees=(2,)).check("(i)")
        assert line.status == "FAIL"
        ses = line.witness
        assert md.is_isomorphic(ses.A, cyc(Z4, 2)) and not left.member(ses.A)


class TestApproximations:
    def test_salce_preenvelope(self):
        a = ct.salce_transform(ct.pair_all_injective(), cyc(Z4, 2), "preenvelope")
        assert a.describe() == "0 -> Z/2 -> Z/4 -> Z/2 -> 0"
        assert not a.problems()

    def test_already_injective(self):
        assert ct.pair_all_injective().preenvelope(md.free_module(Z4, 1)).describe() == "0 -> Z/4 -> Z/4 -> 0 -> 0"

    def test_zero(self):
        assert ct.pair_all_injective().preenvelope(md.zero_module(Z4)).describe() == "0 -> 0 -> 0 -> 0 -> 0"

    @given(zmod_rings(), st.data(), st.sampled_from(["precover", "preenvelope"]))
    def test_sequences_validate(self, R, data, kind):
        E = data.draw(presented(R))
        for pair in (ct.pair_all_injective("salce-hull"), ct.pair_projective_all()):
            a = getattr(pair, kind)(E)
            assert not a.problems()
            ends = (a.sequence.p.target if kind == "precover" else a.sequence.i.source)
            assert md.is_isomorphic(ends, E)

    @given(zmod_rings(), st.data())
    def test_salce_twice(self, R, data):
        E = data.draw(presented(R))
        pair = ct.pair_all_injective()
        pre = ct.salce_transform(pair, E, "precover")
        assert not pre.problems()
        pair2 = ct.pair_all_injective("salce-hull")
        env = ct.salce_transform(pair2, E, "preenvelope")
        assert env.kind == "preenvelope" and not env.problems()


class TestPerp:
    def test_charts_generate_everything(self):
        R1 = md.free_module(Z12, 1)
        S = [md.colocalize(R1, s).as_r_module for s in Z12.elements()]
        assert len(ct.brute_force_perp(S, Z12, 24)) == len(ct.enumerate_up_to(Z12, 24))

    def test_free_generator(self):
        assert len(ct.brute_force_perp([md.free_module(Z4, 1)], Z4, 16)) == len(MODS4)

    def test_all_gives_injectives(self):
        perp = ct.brute_force_perp(MODS4, Z4, 16)
        assert [M.describe() for M in perp] == ["0", "Z/4", "Z/4 + Z/4"]

    @settings(max_examples=20)
    @given(st.lists(st.integers(0, len(MODS4) - 1), min_size=1, max_size=4), st.data())
    def test_antitone(self, idx, data):
        small = [MODS4[i] for i in idx]
        extra = data.draw(st.lists(st.integers(0, len(MODS4) - 1), max_size=3))
        big = small + [MODS4[i] for i in extra]
        P_small = ct.brute_force_perp(small, Z4, 16)
        P_big = ct.brute_force_perp(big, Z4, 16)
        assert all(any(md.is_isomorphic(M, N) for N in P_small) for M in P_big)


class TestRestriction:
    def test_trivial(self):
        assert ct.restriction_check(ct.pair_all_injective(), ct.all_modules(), MODS4[:6], "a").status == "PASS"

    def test_chart(self):
        e = idempotent_chart(Z12, Z12.coerce(3))
        sub = ct.chart_class(e)
        rep = ct.restriction_check(ct.pair_all_injective(), sub, md.enumerate_modules_by_order(Z12, 24), "c",
                                   idempotent=e)
        assert rep.status == "PASS"

    def test_left_outside(self):
        e = idempotent_chart(Z12, Z12.coerce(3))
        rep = ct.restriction_check(ct.pair_projective_all(), ct.chart_class(e),
                                   md.enumerate_modules_by_order(Z12, 24), "a")
        assert rep.status == "FAIL"
        line = next(c for c in rep.checks if c.name == "left-inside")
        assert line.status == "FAIL" and md.is_projective_module(line.witness)


class TestRegistry:
    def test_names(self):
        assert {"all", "zero", "injective", "projective", "flat", "veryflat-cert", "contraadjusted",
                "cotorsion"} <= set(ct.REGISTRY)
        with pytest.raises(KeyError):
            ct.class_by_name("nonsense")

    @pytest.mark.parametrize("name", sorted(ct.REGISTRY))
    def test_zero_is_member(self, name):
        assert ct.class_by_name(name).member(md.zero_module(Z4)) is True

    def test_flat_is_projective_over_finite_rings(self):
        R = QuotientPolyRing(PolyRing(2), "x^2")
        flat = ct.flat_class()
        for M in (md.free_module(R, 1), md.cyclic_module(R, R.coerce("x"))):
            assert flat.member(M) == md.is_projective_module(M)
