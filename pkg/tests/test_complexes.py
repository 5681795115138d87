import random

import pytest
from hypothesis import given, settings, strategies as st

from antiloc import complexes as cx
from antiloc import modules as md
from antiloc.rings import ModularRing
from antiloc.scenarios import cyclic_complexes, dual_numbers, eps_complex

Z4, Z12 = ModularRing(4), ModularRing(12)
Z2 = md.cyclic_module(Z4, Z4.coerce(2))
F4 = md.free_module(Z4, 1)
TWO = md.scalar_map(F4, Z4.coerce(2))


def acyclic_tests(R, rng, count=12):
    mods = [M for M in md.enumerate_modules_by_order(R, 16) if not M.is_zero_module()]
    out = [cx.disk_complex(M, n) for M in mods[:4] for n in (-1, 0, 1)]
    while len(out) < count:
        B = rng.choice(mods)
        A, inc = md.submodule(B, [rng.choice(list(B.elements()))])
        Q, q = md.cokernel(inc)
        out.append(cx.complex_from_maps(R, rng.randint(-1, 1), [A, B, Q], [inc, q]))
    return out


class TestDisk:
    def test_shape(self):
        D = cx.disk_complex(Z2, 0)
        assert D.window() == [0, 1] and D.d(0).is_iso()

    def test_zero(self):
        assert cx.disk_complex(md.zero_module(Z4), 3).is_zero()

    def test_ext_matches_module_ext(self):
        assert cx.ext1_complexes(cx.disk_complex(Z2, 0), cx.module_complex(Z2, 0)).order == 2

    @settings(max_examples=15)
    @given(st.integers(0, 10 ** 6), st.sampled_from([0, 1]))
    def test_disk_lemma(self, seed, i):
        rng = random.Random(seed)
        mods = [M for M in md.enumerate_modules_by_order(Z4, 8) if not M.is_zero_module()]
        C = cx.random_complex(rng, mods, rng.randint(1, 3))
        n = rng.choice(C.window())
        chk = cx.disk_ext_check(rng.choice(mods), n, C, i)
        assert chk.bijective and chk.lhs_order == chk.rhs_order


class TestNullHomotopy:
    def test_identity_on_disk(self):
        res = cx.nullhomotopy_solve(cx.identity_chain_map(cx.disk_complex(Z2, 0)))
        assert res.found and res.homotopy.verifies(cx.identity_chain_map(cx.disk_complex(Z2, 0)))

    def test_obstructed(self):
        A = cx.module_complex(Z2, 0)
        B = cx.complex_from_maps(Z4, -1, [F4, F4], [TWO])
        f = cx.ChainMap(A, B, {0: md.map_from_images(Z2, F4, [(2,)])})
        assert not f.problems()
        res = cx.nullhomotopy_solve(f)
        assert not res.found and res.certificate["class_of_f"] == [1]
        assert not cx.exhaustive_nullhomotopic(f)

    def test_zero_map(self):
        D = cx.disk_complex(Z2, 0)
        res = cx.nullhomotopy_solve(cx.zero_chain_map(D, D))
        assert res.found and all(res.homotopy.at(n).is_zero() for n in (-1, 0, 1, 2))

    @settings(max_examples=25)
    @given(st.integers(0, 10 ** 6))
    def test_agrees_with_exhaustive(self, seed):
        rng = random.Random(seed)
        family = cyclic_complexes(Z4, 3)
        C = rng.choice(family)
        G0, sub = cx.chain_map_group(C, C)
        x = tuple(rng.randrange(d) for d in sub.group.invariants)
        f = cx.ChainMap(C, C, G0.maps(sub.embed(x)))
        assert cx.nullhomotopy_solve(f).found == cx.exhaustive_nullhomotopic(f)


class TestAcyclicity:
    def test_crt(self):
        A, B = md.cyclic_module(Z12, Z12.coerce(3)), md.cyclic_module(Z12, Z12.coerce(4))
        S = md.direct_sum(A, B).module
        R = md.free_module(Z12, 1)
        f = md.map_from_images(R, S, [S.add(S.element([1, 0]), S.element([0, 1]))])
        C = cx.complex_from_maps(Z12, 0, [R, S], [f])
        assert cx.acyclicity_report(C).acyclic

    def test_zero(self):
        rep = cx.acyclicity_report(cx.zero_complex(Z4))
        assert rep.acyclic

    def test_eps(self):
        rep = cx.acyclicity_report(eps_complex())
        assert rep.acyclic
        assert rep.to_json()["cocycles"] == {"0": "Z/2"}
        assert rep.to_json()["cocycle_flags"]["0"]["flat"] is False

    def test_eps_period_two(self):
        assert cx.acyclicity_report(eps_complex(period=2)).acyclic


class TestMembership:
    def test_bounded_injectives_homotopy_injective(self):
        tests = acyclic_tests(Z4, random.Random(0))
        I = cx.complex_from_maps(Z4, 0, [F4, F4, F4], [TWO, TWO])
        rep = cx.class_membership(I, "homotopy_injective", tests)
        assert rep.status == "PASS" and rep.tested == len(tests)
        assert rep.testset == cx.testset_fingerprint(tests)

    def test_eps_not_flat_cocycles(self):
        assert cx.class_membership(eps_complex(), "acyclic_flat_cocycles").status == "FAIL"

    @pytest.mark.parametrize("cls", ["homotopy_injective", "coacyclic", "contraacyclic", "acyclic_flat_cocycles"])
    def test_zero_complex(self, cls):
        tests = acyclic_tests(Z4, random.Random(1), 6)
        assert cx.class_membership(cx.zero_complex(Z4), cls, tests).status == "PASS"

    def test_non_injective_term_detected(self):
        # 0 -> Z/2 -> Z/4 -> Z/2 -> 0 in degrees 0..2; id on Z/2 cannot factor through 2 = 0
        inc = md.map_from_images(Z2, F4, [(2,)])
        q = md.cokernel(inc)[1]
        tests = [cx.disk_complex(Z2, -1), cx.complex_from_maps(Z4, 0, [Z2, F4, q.target], [inc, q])]
        assert cx.class_membership(cx.module_complex(Z2, 0), "homotopy_injective", tests).status == "FAIL"


class TestComplexExt:
    def test_periodic_projective(self):
        E = dual_numbers()
        assert cx.ext1_complexes(eps_complex(E), cx.disk_complex(md.free_module(E, 1), 0)).order == 1

    @settings(max_examples=15)
    @given(st.integers(0, 10 ** 6))
    def test_contractible_projective_left(self, seed):
        rng = random.Random(seed)
        mods = [M for M in md.enumerate_modules_by_order(Z4, 8) if not M.is_zero_module()]
        Y = cx.random_complex(rng, mods, rng.randint(1, 3))
        assert cx.ext1_complexes(cx.disk_complex(F4, rng.randint(-1, 1)), Y).order == 1

    def test_classes_are_extensions(self):
        X = cx.module_complex(Z2, 0)
        G = cx.ext1_complexes(X, X)
        assert G.order == 2
        for x in G.elements():
            ses = G.extension_of(x)
            assert all(ses.component(n).is_exact() for n in (-1, 0, 1))
