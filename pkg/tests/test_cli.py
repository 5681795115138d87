import json

import pytest

from antiloc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_list(capsys):
    code, out = run(capsys, "list")
    assert code == 0 and "cech-crt" in out


def test_verify_exit_codes(capsys, tmp_path):
    code, out = run(capsys, "verify", "--scenario", "naive-codescent")
    assert code == 0 and out.startswith("PASS")
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"n": 12, "cover": [2, 2]}))
    code, out = run(capsys, "verify", "--scenario", "cech-crt", "--params", str(p))
    assert code == 1 and "FAIL" in out


def test_report_json(capsys):
    code, out = run(capsys, "report", "--scenario", "neeman-product", "--format", "json", "--seed", "3")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 3 and doc["status"] == "PASS"


def test_report_md(capsys):
    code, out = run(capsys, "report", "--scenario", "broken-pair", "--format", "md")
    assert code == 0 and out.startswith("## broken-pair: PASS")


def test_emit_and_verify_cert(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"builders": ["precover"], "min_mutants": 1}))
    code, out = run(capsys, "verify", "--scenario", "antilocal-filtration-finite-ring", "--params", str(params),
                    "--emit-cert", str(tmp_path / "certs"))
    assert code == 0
    files = sorted((tmp_path / "certs").glob("*.json"))
    assert files
    code, out = run(capsys, "verify-cert", str(files[0]))
    assert code == 0 and out.startswith("ACCEPT")
    bad = json.loads(files[0].read_text())
    bad["steps"][0]["chart"] = 1 - bad["steps"][0]["chart"]
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    code, out = run(capsys, "verify-cert", str(tmp_path / "bad.json"))
    assert code == 1 and out.startswith("REJECT")


def test_enumerate_modules(capsys, tmp_path):
    ring = tmp_path / "r.json"
    ring.write_text(json.dumps({"kind": "Zmod", "n": 12}))
    code, out = run(capsys, "enumerate-modules", "--ring", str(ring), "--max-size", "144")
    assert code == 0 and out.strip().splitlines()[-1].startswith("46 modules")


def test_bad_descriptor(capsys, tmp_path):
    ring = tmp_path / "r.json"
    ring.write_text(json.dumps({"kind": "Zmod", "n": 12, "extra": 1}))
    assert cli.main(["enumerate-modules", "--ring", str(ring), "--max-size", "4"]) == 2


def test_unknown_scenario(capsys):
    assert cli.main(["verify", "--scenario", "nope"]) == 2
    assert "nope" in capsys.readouterr().err


def test_missing_params_file(tmp_path):
    assert cli.main(["verify", "--scenario", "disk-ext", "--params", str(tmp_path / "none.json")]) == 2
