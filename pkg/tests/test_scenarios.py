import json
import pathlib

import jsonschema
import pytest

from antiloc import antilocal as al
from antiloc import modules as md
from antiloc import scenarios as sc
from antiloc.rings import ModularRing

SCHEMA = json.loads((pathlib.Path(__file__).parents[1] / "docs" / "schema.json").read_text())
FAST = ["naive-codescent", "contraadjusted-counterexample", "neeman-product", "all-modules-not-antilocal",
        "cotorsion-not-local", "broken-pair"]


def test_catalog():
    cat = sc.list_scenarios()
    assert len(cat) >= 12
    assert all(e["anchor"] and e["provenance"] in {"REFERENCE", "DERIVED"} for e in cat)
    for required in ["cech-crt", "flat-very-local", "veryflat-very-local-cert", "naive-codescent",
                     "contraadjusted-counterexample", "injective-nonlocal-trivext", "neeman-product",
                     "all-modules-not-antilocal", "injective-strong-antilocal", "antilocal-filtration-finite-ring",
                     "colocal-codescent-harness", "complex-pairs-orthogonality"]:
        assert required in sc.REGISTRY


def test_naive_codescent():
    r = sc.run_scenario("naive-codescent")
    assert r.status == "PASS"
    assert {c["name"] for c in r.checks} >= {"Hom(Z[1/2], Z) = 0", "Hom(Z[1/3], Z) = 0"}


def test_cech_crt_example():
    r = sc.run_scenario("cech-crt", {"n": 12, "cover": [3, 4]})
    assert r.status == "PASS" and r.witnesses["Z/12"] == ["Z/12", "Z/4 + Z/3", "0"]


def test_all_modules_not_antilocal():
    r = sc.run_scenario("all-modules-not-antilocal")
    assert r.status == "PASS" and r.counts["filtrations"] == 50


def test_neeman_skip_is_reported():
    r = sc.run_scenario("neeman-product")
    assert r.status == "PASS"
    assert [c["status"] for c in r.checks] == ["PASS", "SKIPPED"]


@pytest.mark.parametrize("sid", FAST)
def test_json_schema_and_determinism(sid):
    a, b = sc.run_scenario(sid, seed=7), sc.run_scenario(sid, seed=7)
    doc = json.loads(sc.emit_report(a, "json"))
    jsonschema.validate(doc, SCHEMA)
    assert a.digest() == b.digest()
    assert json.dumps(a.to_json(timings=False), sort_keys=True) == json.dumps(b.to_json(timings=False), sort_keys=True)


def test_seed_changes_sampled_body():
    a = sc.run_scenario("all-modules-not-antilocal", seed=1)
    assert a.seed == 1 and a.bounds["filtrations"] == 50


def test_fail_markdown_has_witness_module():
    M = md.cyclic_module(ModularRing(12), ModularRing(12).coerce(6))
    check = {"name": "synthetic", "status": "FAIL", "detail": "", "witness": {"module": al.module_to_json(M)}}
    rep = sc.Report("synthetic", "FAIL", [check], {}, {}, {}, 0)
    jsonschema.validate(json.loads(sc.emit_report(rep, "json")), SCHEMA)
    text = sc.emit_report(rep, "md")
    assert "witness for synthetic" in text and json.dumps(al.module_to_json(M)["invariants"]) in text.replace("\n", "").replace(" ", "")


def test_fail_without_witness_is_schema_invalid():
    rep = sc.Report("synthetic", "FAIL", [{"name": "x", "status": "FAIL", "detail": ""}], {}, {}, {}, 0)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(json.loads(sc.emit_report(rep, "json")), SCHEMA)


def test_unknown_id_and_params():
    with pytest.raises(KeyError):
        sc.run_scenario("no-such-thing")
    with pytest.raises(KeyError):
        sc.run_scenario("naive-codescent", {"bogus": 1})


def test_bound_overflow():
    with pytest.raises(sc.BoundOverflow):
        sc.run_scenario("contraadjusted-counterexample", {"N": [2, 500]})
    with pytest.raises(sc.BoundOverflow):
        sc.run_scenario("injective-strong-antilocal", {"max_order": 10 ** 6})


def test_backend_error_becomes_fail_with_witness():
    r = sc.run_scenario("cech-crt", {"n": 12, "cover": [2, 2]})
    assert r.status == "FAIL"
    jsonschema.validate(json.loads(sc.emit_report(r, "json")), SCHEMA)


def test_parallel_matches_serial():
    ids = ["naive-codescent", "neeman-product", "broken-pair"]
    serial = [r.digest() for r in sc.run_many(ids)]
    parallel = [r.digest() for r in sc.run_many(ids, workers=2)]
    assert serial == parallel


def test_unknown_format():
    with pytest.raises(ValueError):
        sc.emit_report(sc.run_scenario("broken-pair"), "pdf")
