import pytest
from hypothesis import given, strategies as st

from antiloc import modules as md
from antiloc.rings import (ZZ, ModularRing, MonomialQuotientRing, PolyRing, QuotientPolyRing, idempotent_chart,
                           localize_ring, ring_from_descriptor, smith_decompose, trivial_extension,
                           unit_ideal_witness)

from strategies import small_rings

Z12 = ModularRing(12)


def c(R, x):
    return R.coerce(x)


class TestLocalize:
    def test_z12_at_2_is_z3(self):
        S, h = localize_ring(Z12, c(Z12, 2))
        assert S.order == 3
        killed = [x for x in range(12) if S.is_zero(h(c(Z12, x)))]
        assert killed == [0, 3, 6, 9]

    def test_integers_at_1(self):
        S, h = localize_ring(ZZ, 1)
        assert S is ZZ
        assert h(7) == 7

    def test_unit_gives_identity(self):
        S, h = localize_ring(Z12, c(Z12, 5))
        assert S is Z12
        assert all(h(c(Z12, x)) == c(Z12, x) for x in range(12))


class TestUnitIdeal:
    def test_integers(self):
        cov = unit_ideal_witness(ZZ, [2, 3])
        assert cov.bezout_witness == (-1, 1)

    def test_z12(self):
        cov = unit_ideal_witness(Z12, [c(Z12, 3), c(Z12, 4)])
        assert cov.bezout_witness == (c(Z12, -1), c(Z12, 1))
        assert cov.verify()

    def test_non_unit_ideal(self):
        assert unit_ideal_witness(ZZ, [2, 4]) is None

    def test_describe(self):
        assert unit_ideal_witness(ZZ, [2, 3]).describe()["witness"] == ["-1", "1"]


class TestIdempotent:
    @pytest.mark.parametrize("n,s,e", [(12, 3, 9), (12, 5, 1), (4, 2, 0), (12, 4, 4), (30, 6, 6)])
    def test_values(self, n, s, e):
        R = ModularRing(n)
        assert idempotent_chart(R, c(R, s)) == c(R, e)

    @given(small_rings(), st.data())
    def test_idempotent_and_divides_power(self, R, data):
        s = data.draw(st.sampled_from(R.elements()))
        e = idempotent_chart(R, s)
        assert R.mul(e, e) == e
        # eR = R[1/s]: s acts invertibly on eR and e lies in the ideal of a power of s
        S, _ = localize_ring(R, s)
        assert S.order == len({R.mul(e, r) for r in R.elements()})


class TestTrivialExtension:
    def test_z4_by_z2(self):
        R = ModularRing(4)
        S, inc = trivial_extension(R, md.cyclic_module(R, 2))
        assert S.order == 8
        eps = [a for a in S.elements() if a not in {inc(r) for r in R.elements()}]
        m = next(a for a in eps if S.add(a, a) == S.zero and S.mul(a, inc(c(R, 1))) == a)
        assert S.is_zero(S.mul(m, m))

    def test_zero_module(self):
        R = ModularRing(6)
        S, _ = trivial_extension(R, md.zero_module(R))
        assert S.order == R.order

    def test_monomial_dual(self):
        R = MonomialQuotientRing(2, 2)
        M = md.dual_module(md.free_module(R, 1))
        S, _ = trivial_extension(R, M)
        assert S.order == R.order * M.order == 256


class TestSmith:
    def test_integer(self):
        D, U, V = smith_decompose([[2, 0], [0, 3]])
        assert D == [[1, 0], [0, 6]]

    def test_polynomial(self):
        P = PolyRing(2)
        D, _, _ = smith_decompose([[P.coerce("x"), P.zero], [P.zero, P.coerce("x+1")]], P)
        assert D[0][0] == P.one and D[1][1] == P.coerce("x^2+x")

    def test_identity(self):
        assert smith_decompose([[1, 0], [0, 1]])[0] == [[1, 0], [0, 1]]


class TestDescriptors:
    def test_roundtrip_names(self):
        R = ring_from_descriptor({"kind": "QuotPoly", "base": {"kind": "Poly", "field": "F2"}, "modulus": "x^2+x"})
        assert R.order == 4
        assert ring_from_descriptor({"kind": "Zmod", "n": 12}).order == 12
        assert ring_from_descriptor({"kind": "Localized", "base": {"kind": "Zmod", "n": 12}, "s": 3}).order == 4

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            ring_from_descriptor({"kind": "Zmod", "n": 12, "m": 1})
        with pytest.raises(ValueError):
            ring_from_descriptor({"kind": "Banach"})

    def test_quotient_ring_is_product(self):
        R = QuotientPolyRing(PolyRing(2), "x^2+x")
        assert sorted(R.mul(a, a) == a for a in R.elements()) == [True] * 4
