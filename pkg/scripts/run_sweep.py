#!/usr/bin/env python3
"""Run every registered scenario and write one JSON and one markdown report each.

    python3 scripts/run_sweep.py --out reports --seed 0 --workers 4
"""
import argparse
import json
import pathlib
import sys

from antiloc import scenarios as sc


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", action="append")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = args.only or list(sc.REGISTRY)
    summary = []
    for r in sc.run_many(ids, seed=args.seed, workers=args.workers):
        (out / f"{r.scenario}.json").write_text(sc.emit_report(r, "json"))
        (out / f"{r.scenario}.md").write_text(sc.emit_report(r, "md"))
        summary.append({"scenario": r.scenario, "status": r.status, "digest": r.digest(),
                        "wall_s": r.timings.get("wall_s")})
        print(f"{r.status:8s} {r.scenario:36s} {r.timings.get('wall_s', 0):7.2f}s")
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return 0 if all(s["status"] == "PASS" for s in summary) else 1


if __name__ == "__main__":
    sys.exit(main())
