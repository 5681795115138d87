#!/usr/bin/env python3
"""Re-run the seeded scenarios over a range of seeds and count failures.

Digests are compared between two runs of the same seed to confirm determinism.
"""
import argparse
import sys

from antiloc import scenarios as sc

SEEDED = ["complex-pairs-orthogonality", "adjunction-suite", "inflation-restriction", "disk-ext",
          "all-modules-not-antilocal"]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--only", action="append")
    args = ap.parse_args()
    bad = 0
    for sid in args.only or SEEDED:
        for seed in range(args.seeds):
            a = sc.run_scenario(sid, seed=seed)
            b = sc.run_scenario(sid, seed=seed)
            same = a.digest() == b.digest()
            bad += (a.status != "PASS") + (not same)
            print(f"{sid:32s} seed={seed:<3d} {a.status:6s} deterministic={same} {a.counts.get('instances', '')}")
    print(f"{bad} problems")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
