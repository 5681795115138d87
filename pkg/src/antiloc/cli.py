"""Command line entry point: ``antiloc verify|list|report|enumerate-modules|verify-cert``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import antilocal as al
from . import modules as md
from . import scenarios as sc
from .linalg import BackendUnavailable
from .rings import ring_from_descriptor


class UsageError(ValueError):
    pass


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _params_for(ids: list[str], path: str | None) -> dict:
    """A params file is either one scenario's parameters or a map from scenario id to parameters."""
    if not path:
        return {}
    data = _load_json(path)
    if not isinstance(data, dict):
        raise UsageError("params file must hold a JSON object")
    if data and all(k in sc.REGISTRY for k in data):
        return data
    if len(ids) != 1:
        raise UsageError("a flat params file needs exactly one --scenario")
    return {ids[0]: data}


def _emit_certs(report: sc.Report, directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, cert in sorted(report.certificates.items()):
        path = os.path.join(directory, f"{report.scenario}--{name}.json")
        with open(path, "w") as fh:
            json.dump(cert, fh, sort_keys=True, indent=1)
        paths.append(path)
    return paths


def _run(args) -> list[sc.Report]:
    ids = args.scenario or list(sc.REGISTRY)
    unknown = [i for i in ids if i not in sc.REGISTRY]
    if unknown:
        raise UsageError(f"unknown scenario(s): {', '.join(unknown)}")
    return sc.run_many(ids, _params_for(ids, args.params), args.seed, args.workers)


def cmd_verify(args) -> int:
    reports = _run(args)
    for r in reports:
        print(f"{r.status:8s} {r.scenario:36s} {r.timings.get('wall_s', 0):8.2f}s  {r.digest()[:12]}")
        for c in r.checks:
            if c["status"] != "PASS":
                print(f"         {c['status']}: {c['name']}  {c.get('detail', '')}")
        if args.emit_cert:
            for path in _emit_certs(r, args.emit_cert):
                print(f"         wrote {path}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_list(args) -> int:
    for entry in sc.list_scenarios():
        print(f"{entry['id']:36s} [{entry['provenance']}] {entry['anchor']}: {entry['description']}")
    return 0


def cmd_report(args) -> int:
    reports = _run(args)
    if args.format == "json":
        docs = [json.loads(sc.emit_report(r, "json")) for r in reports]
        print(json.dumps(docs[0] if len(docs) == 1 else docs, sort_keys=True, indent=2))
    else:
        print("\n".join(sc.emit_report(r, "md") for r in reports))
    return 0 if all(r.passed for r in reports) else 1


def cmd_enumerate(args) -> int:
    R = ring_from_descriptor(_load_json(args.ring))
    try:
        mods, what = md.enumerate_modules_by_order(R, args.max_size), "modules"
    except BackendUnavailable:
        # complete classification is only implemented over Z/n
        mods, what = sc.small_modules(R, args.max_size), "sums of cyclic modules"
    for M in mods:
        print(f"{M.order:6d}  {M.describe()}")
    print(f"{len(mods)} {what} of order <= {args.max_size} over {R.name}")
    return 0


def cmd_verify_cert(args) -> int:
    verdict = al.verify_certificate(_load_json(args.file))
    print("ACCEPT" if verdict.ok else "REJECT")
    for d in verdict.diagnostics:
        print(f"  {d}")
    return 0 if verdict.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="antiloc", description="verification engine for local and antilocal classes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def runs(p):
        p.add_argument("--scenario", action="append", help="scenario id (repeatable; default all)")
        p.add_argument("--params", help="JSON parameters file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1, help="process pool size")

    v = sub.add_parser("verify", help="run scenarios, exit 0 iff all PASS")
    runs(v)
    v.add_argument("--emit-cert", metavar="DIR", help="write certificates produced by the run")
    v.set_defaults(func=cmd_verify)

    sub.add_parser("list", help="show the scenario catalog").set_defaults(func=cmd_list)

    r = sub.add_parser("report", help="run scenarios and print reports")
    runs(r)
    r.add_argument("--format", choices=("json", "md"), default="json")
    r.set_defaults(func=cmd_report)

    e = sub.add_parser("enumerate-modules", help="list modules over a finite ring up to isomorphism")
    e.add_argument("--ring", required=True, help="ring descriptor JSON file")
    e.add_argument("--max-size", type=int, required=True)
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("verify-cert", help="re-validate a certificate file")
    c.add_argument("file")
    c.set_defaults(func=cmd_verify_cert)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KeyError, ValueError, OSError, BackendUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
