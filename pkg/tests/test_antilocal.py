import json

import pytest
from hypothesis import given, settings, strategies as st

from antiloc import antilocal as al
from antiloc import cotorsion as ct
from antiloc import modules as md
from antiloc.rings import ModularRing, PolyRing, QuotientPolyRing, unit_ideal_witness

Z12 = ModularRing(12)
COV = unit_ideal_witness(Z12, [Z12.coerce(3), Z12.coerce(4)])
HULL = al.local_pairs_for(COV, "all-injective")
TRIVIAL = [ct.pair_all_injective(), ct.pair_all_injective()]
PROJ = al.local_pairs_for(COV, "projective-all")
BUILDERS = {"precover": al.build_precover_filtration, "preenvelope": al.build_preenvelope_filtration,
            "copreenvelope": al.build_copreenvelope_filtration, "coprecover": al.build_coprecover_filtration}
E2 = md.cyclic_module(Z12, Z12.coerce(2))


class TestPrecover:
    def test_z2(self):
        seq, cert = al.build_precover_filtration(E2, COV, HULL)
        assert seq.describe() == "0 -> Z/4 -> Z/2 + Z/4 -> Z/2 -> 0"
        assert cert.length == 1 <= 2
        assert [(s["chart"], s["class"]) for s in cert.steps] == [(0, "injective")]
        assert al.verify_certificate(cert).ok

    def test_zero(self):
        seq, cert = al.build_precover_filtration(md.zero_module(Z12), COV, HULL)
        assert seq.describe() == "0 -> 0 -> 0 -> 0 -> 0" and cert.length == 0

    def test_tame_integers(self):
        run = al.tame_antilocal_run(1, [2, 3], "precover")
        assert run.sequence == ("0", "Z", "Z")


class TestPreenvelope:
    def test_z2_trivial_pairs(self):
        seq, cert = al.build_preenvelope_filtration(E2, COV, TRIVIAL)
        assert seq.describe() == "0 -> Z/2 -> Z/4 -> Z/2 -> 0"
        assert md.is_injective_module(seq.sequence.i.target)
        assert al.verify_certificate(cert).ok

    def test_chart_object(self):
        F = md.cyclic_module(Z12, Z12.coerce(3))  # Z/3 lives on the chart of 4
        seq, cert = al.build_preenvelope_filtration(F, COV, HULL)
        assert al.verify_certificate(cert).ok and cert.length <= 2

    def test_tame_integers(self):
        run = al.tame_antilocal_run(1, [2, 3], "preenvelope")
        assert run.sequence == ("Z", "Q + Q", "Q + Q/Z")
        assert run.filtration == [(2, "Q"), (3, "Q")]
        assert all(run.checks.values())


class TestCoconstructions:
    def test_z12_projective_all(self):
        seq, cert = al.build_copreenvelope_filtration(md.free_module(Z12, 1), COV, PROJ)
        assert not seq.problems() and al.verify_certificate(cert).ok

    def test_z6(self):
        Z6 = ModularRing(6)
        cov = unit_ideal_witness(Z6, [Z6.coerce(3), Z6.coerce(4)])
        pairs = al.local_pairs_for(cov, "projective-all")
        for M in md.enumerate_modules_by_order(Z6, 36):
            seq, cert = al.build_copreenvelope_filtration(M, cov, pairs)
            assert not seq.problems() and al.verify_certificate(cert).ok


class TestStrong:
    def test_z12(self):
        d = al.strong_decompose(md.free_module(Z12, 1), COV, HULL, "right")
        assert [(j, N.describe()) for j, _, N in d.summands] == [(0, "Z/4"), (1, "Z/3")]
        assert al.verify_certificate(d).ok

    def test_zero(self):
        d = al.strong_decompose(md.zero_module(Z12), COV, HULL, "right")
        assert d.summands == []

    def test_free_rank_two(self):
        d = al.strong_decompose(md.free_module(Z12, 2), COV, HULL, "right")
        assert d.describe() == "Z/4 + Z/4@0 + Z/3 + Z/3@1"

    def test_non_injective_fails(self):
        d = al.strong_decompose(md.cyclic_module(Z12, Z12.coerce(6)), COV, HULL, "right")
        assert isinstance(d, al.DecompositionFailure)


class TestVerifier:
    def cert(self):
        return al.build_preenvelope_filtration(md.free_module(Z12, 1), COV, HULL)[1].to_json()

    def test_json_roundtrip(self):
        c = json.loads(json.dumps(self.cert()))
        assert al.verify_certificate(c).ok

    def test_forged_tag(self):
        c = self.cert()
        c["steps"][0]["chart"] = 1 - c["steps"][0]["chart"]
        v = al.verify_certificate(c)
        assert not v.ok and any("step 1" in d for d in v.diagnostics)

    def test_length_bound(self):
        c = self.cert()
        c["steps"] = c["steps"] + [c["steps"][-1]] * (2 * COV.d + 1 - len(c["steps"]))
        v = al.verify_certificate(c)
        assert not v.ok and any("length" in d for d in v.diagnostics)

    def test_relaxed_ambient_rejected(self):
        c = self.cert()
        c["ambient"] = "exact-subcategory"
        v = al.verify_certificate(c)
        assert not v.ok and any("ambient" in d for d in v.diagnostics)

    def test_garbage(self):
        assert not al.verify_certificate({"kind": "filtration"}).ok
        assert not al.verify_certificate({"kind": "mystery"}).ok

    @pytest.mark.parametrize("kind", ["precover", "preenvelope"])
    def test_mutants(self, kind):
        for M in md.enumerate_modules_by_order(Z12, 24):
            _, cert = BUILDERS[kind](M, COV, HULL)
            for name, mut in al.mutate(cert.to_json()):
                assert not al.verify_certificate(mut).ok, (M.describe(), name)


F2 = QuotientPolyRing(PolyRing(2), "x^2+x")
F2COV = unit_ideal_witness(F2, [F2.coerce("x"), F2.coerce("x+1")])


@settings(max_examples=25)
@given(st.sampled_from(["Z12", "Z6", "F2"]), st.data(), st.sampled_from(sorted(BUILDERS)))
def test_builders_verify(ring, data, kind):
    if ring == "F2":
        R, cov = F2, F2COV
    else:
        R = ModularRing(int(ring[1:]))
        cov = unit_ideal_witness(R, [R.coerce(3), R.coerce(4)])
    mods = md.enumerate_modules_by_order(R, 36) if ring != "F2" else [
        md.free_module(F2, 1), md.cyclic_module(F2, F2.coerce("x")), md.free_module(F2, 2)]
    M = data.draw(st.sampled_from(mods))
    style = "all-injective" if kind in ("precover", "preenvelope") else "projective-all"
    seq, cert = BUILDERS[kind](M, cov, al.local_pairs_for(cov, style))
    assert not seq.problems()
    assert cert.length <= 2 * cov.d
    assert al.verify_certificate(cert).ok
