"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a one-line verdict; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""
import time

import pytest

from antiloc import modules as md
from antiloc import scenarios as sc
from antiloc.rings import ZZ

RESULTS: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title, self.notes = number, title, []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        extra = f" [{'; '.join(self.notes)}]" if self.notes else ""
        line = f"{status} criterion {self.number:2d} {self.title} ({dt:.2f}s){extra}"
        if exc is not None:
            line += f" -- {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        RESULTS.append(line)
        print(line)
        return False


def scenario(c: Criterion, sid: str, **params) -> sc.Report:
    r = sc.run_scenario(sid, params or None, seed=0)
    c.note(", ".join(f"{k}={v}" for k, v in sorted(r.counts.items()) if isinstance(v, int))[:160])
    failing = [ch for ch in r.checks if ch["status"] == "FAIL"]
    assert r.status == "PASS", failing[:1]
    return r


def test_c01_cech_sweep():
    with Criterion(1, "Cech exactness sweep over Z/6, Z/12, Z/30") as c:
        t0 = time.perf_counter()
        r = scenario(c, "cech-crt", n=[6, 12, 30], cover=None, max_factors=2)
        assert time.perf_counter() - t0 < 10
        assert r.counts["pairs"] == 696


def test_c02_codescent_witnesses():
    with Criterion(2, "colocalize(Z, 2) = colocalize(Z, 3) = 0") as c:
        t0 = time.perf_counter()
        for s in (2, 3):
            col = md.colocalize(md.free_module(ZZ, 1), s)
            assert col.module.is_zero_module() and col.module.order == 1
        assert time.perf_counter() - t0 < 1


def test_c03_contraadjusted_grid():
    with Criterion(3, "telescope grid N = 2..16, k < N") as c:
        t0 = time.perf_counter()
        r = scenario(c, "contraadjusted-counterexample", N=[2, 16])
        assert r.counts["instances"] == sum(range(2, 17))
        assert time.perf_counter() - t0 < 5


def test_c04_neeman_windows():
    with Criterion(4, "Neeman windows M = 1..32") as c:
        r = scenario(c, "neeman-product", windows=[1, 32], f=2)
        assert r.counts["windows"] == 32


def test_c05_adjunction_suite():
    with Criterion(5, "adjunction suite") as c:
        t0 = time.perf_counter()
        r = scenario(c, "adjunction-suite")
        assert r.counts["instances"] >= 200
        assert all(r.counts.get(k, 0) > 0 for k in ("tensor:0", "tensor:1", "hom:0", "hom:1"))
        assert time.perf_counter() - t0 < 30


def test_c06_inflation_restriction():
    with Criterion(6, "inflation-restriction exactness") as c:
        r = scenario(c, "inflation-restriction")
        assert r.counts["instances"] >= 100


def test_c07_antilocal_construction():
    with Criterion(7, "antilocal precover/preenvelope over Z/12, cover (3,4)") as c:
        r = scenario(c, "antilocal-filtration-finite-ring", builders=["precover", "preenvelope"], min_mutants=30)
        assert r.counts["max_length"] <= 4
        assert r.counts["mutants"] >= 30


def test_c08_strong_antilocality():
    with Criterion(8, "injective iff strong decomposition, order <= 144") as c:
        r = scenario(c, "injective-strong-antilocal", max_order=144)
        assert r.counts["modules"] == 46


def test_c09_disk_ext():
    with Criterion(9, "disk-complex Ext bijection") as c:
        r = scenario(c, "disk-ext")
        assert r.counts["instances"] >= 50


def test_c10_nullhomotopy_oracle():
    with Criterion(10, "null-homotopy solver vs exhaustive search over Z/4") as c:
        t0 = time.perf_counter()
        r = scenario(c, "nullhomotopy-oracle")
        assert r.counts["maps"] > 500
        assert time.perf_counter() - t0 < 60


def test_c11_complex_pairs():
    with Criterion(11, "complex-pair Ext^1 samples and the eps-complex") as c:
        r = scenario(c, "complex-pairs-orthogonality")
        assert r.counts["instances"] >= 100
        names = {ch["name"]: ch["status"] for ch in r.checks}
        assert names["eps-complex is acyclic"] == "PASS"
        assert names["eps-complex cocycles are not flat"] == "PASS"


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
