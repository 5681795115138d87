import pytest
from hypothesis import given, strategies as st

from antiloc import tame as tm


def T(text):
    return tm.parse_tame(text)


@pytest.mark.parametrize("a,b,zero", [
    ("Z[1/2]", "Z", True), ("Q", "Z", True), ("Q/Z", "Z", True), ("Z", "Z", False),
    ("Z/3", "Q/Z", False), ("Z/3", "Z", True), ("Z[1/2]", "Q", False), ("Q", "Z/5", True),
])
def test_hom_table(a, b, zero):
    assert tm.tame_hom(T(a), T(b)).is_zero is zero


@pytest.mark.parametrize("text,inj", [("Q", True), ("Q/Z", True), ("Z", False), ("Z/4", False), ("Z[1/2]/Z", True)])
def test_injective_over_integers(text, inj):
    assert tm.is_injective_over(T(text)) is inj


def test_localize():
    assert tm.tame_localize(T("Z + Z/4 + Z/3"), 2).label() == "Z[1/2] + Z/3 (over Z[1/2])"


def test_contraadjusted():
    assert not tm.is_contraadjusted(T("Z"))
    assert tm.is_contraadjusted(T("Q + Z/4"))


@given(st.sampled_from([2, 3, 5, 6, 10]))
def test_localizations_have_no_maps_to_z(s):
    assert tm.tame_hom(tm.tame(tm.L(tm.PrimeSet.of(s))), T("Z")).is_zero


class TestProductWitness:
    @pytest.mark.parametrize("M", [1, 2, 7, 32])
    def test_grows(self, M):
        w = tm.product_localization_witness(M)
        assert w.grows and w.min_exponent == M - 1

    @given(st.integers(1, 40), st.sampled_from([2, 3, 5]))
    def test_exponent_is_window_minus_one(self, M, f):
        assert tm.product_localization_witness(M, f).min_exponent == M - 1
