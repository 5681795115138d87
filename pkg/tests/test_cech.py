import pytest
from hypothesis import given, strategies as st

from antiloc import cech
from antiloc import cotorsion as ct
from antiloc import ext as ex
from antiloc import modules as md
from antiloc.rings import ZZ, ModularRing, unit_ideal_witness

from strategies import presented, small_rings

Z12 = ModularRing(12)
COV = unit_ideal_witness(Z12, [Z12.coerce(3), Z12.coerce(4)])
ZCOV = unit_ideal_witness(ZZ, [2, 3])


class TestCoresolution:
    def test_crt(self):
        C = cech.cech_coresolution(md.free_module(Z12, 1), COV)
        assert C.labels() == ["Z/12", "Z/4 + Z/3", "0"]
        assert C.exact and C.squares_zero

    def test_trivial_cover(self):
        M = md.cyclic_module(Z12, Z12.coerce(2))
        C = cech.cech_coresolution(M, unit_ideal_witness(Z12, [Z12.one]))
        assert C.labels() == ["Z/2", "Z/2"] and C.exact

    def test_integers(self):
        C = cech.cech_coresolution(md.free_module(ZZ, 1), ZCOV)
        assert C.labels() == ["Z", "Z[1/2] + Z[1/3]", "Z[1/2,3]"]
        assert C.exact

    @given(small_rings(), st.data())
    def test_exact_on_random_covers(self, R, data):
        els = R.elements()
        elems = data.draw(st.lists(st.sampled_from(els), min_size=1, max_size=3))
        cov = unit_ideal_witness(R, elems)
        if cov is None:
            elems = elems + [R.one]
            cov = unit_ideal_witness(R, elems)
        M = data.draw(presented(R))
        C = cech.cech_coresolution(M, cov)
        assert C.exact and C.squares_zero
        assert len(C.labels()) == len(elems) + 1


class TestHomResolution:
    def test_z12(self):
        C = cech.cech_hom_resolution(md.free_module(Z12, 1), COV)
        assert C.labels() == ["0", "Z/4 + Z/3", "Z/12"] and C.exact

    def test_z3_over_integers(self):
        C = cech.cech_hom_resolution(md.cyclic_module(ZZ, 3), ZCOV)
        assert C.labels() == ["0", "Z/3", "Z/3"] and C.exact

    def test_trivial_cover(self):
        M = md.cyclic_module(Z12, Z12.coerce(6))
        C = cech.cech_hom_resolution(M, unit_ideal_witness(Z12, [Z12.one]))
        assert C.exact and C.labels()[-2:] == ["Z/6", "Z/6"]


class TestEpimorphism:
    def test_z12(self):
        r = cech.cover_epimorphism_check(md.free_module(Z12, 1), COV)
        assert r.status == "PASS" and r.kernel == "0"

    def test_z3(self):
        assert cech.cover_epimorphism_check(md.cyclic_module(ZZ, 3), ZCOV).status == "PASS"

    def test_integers_refused(self):
        r = cech.cover_epimorphism_check(md.free_module(ZZ, 1), ZCOV)
        assert r.status == "REFUSED" and "contraadjusted" in r.reason


class TestHarness:
    def test_flat_pass(self):
        for n in (12, 4, 3):
            R = ModularRing(n)
            covs = [unit_ideal_witness(R, [R.one])]
            if n == 12:
                covs.append(COV)
            verdicts = cech.locality_harness(ct.flat_class(), md.enumerate_modules_by_order(R, 16), covs)
            assert verdicts and not any(v.failed for v in verdicts)

    def test_cotorsion_ascent_fails_on_series(self):
        M = ex.SeriesModule(6, 2)
        v = cech.locality_harness(ct.cotorsion_class(), [M], [ex.series_cover(M)])[0]
        assert v.checks["ascent"].status == "FAIL"
        assert v.checks["ascent"].witness.inverted

    @pytest.mark.parametrize("name", sorted(ct.REGISTRY))
    def test_trivial_cover_passes(self, name):
        R = ModularRing(4)
        verdicts = cech.locality_harness(ct.class_by_name(name), md.enumerate_modules_by_order(R, 8),
                                         [unit_ideal_witness(R, [R.one])])
        assert not any(v.failed for v in verdicts)

    def test_undecided_is_skipped(self):
        undecided = ct.ClassSpec("undecided", lambda M: None)
        v = cech.locality_harness(undecided, [md.free_module(Z12, 1)], [COV])[0]
        assert v.checks["ascent"].status == "SKIPPED" and not v.failed

    def test_injective_colocal(self):
        verdicts = cech.locality_harness(ct.injective_class(), md.enumerate_modules_by_order(Z12, 24), [COV], co=True)
        assert not any(v.failed for v in verdicts)
        assert any("coascent" in v.checks for v in verdicts)
