#!/usr/bin/env python3
"""Build antilocal certificates over Z/n and report how each mutant kind fares.

    python3 scripts/mutation_corpus.py --n 12 --cover 3 4
"""
import argparse
import collections
import sys

from antiloc import antilocal as al
from antiloc.rings import ModularRing, unit_ideal_witness
from antiloc.scenarios import modules_with_factors


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--cover", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--pairs", default="all-injective", choices=["all-injective", "projective-all"])
    args = ap.parse_args()

    R = ModularRing(args.n)
    cov = unit_ideal_witness(R, [R.coerce(x) for x in args.cover])
    pairs = al.local_pairs_for(cov, args.pairs)
    tally = collections.Counter()
    leaked = []
    for M in modules_with_factors(R, 2):
        for build in (al.build_precover_filtration, al.build_preenvelope_filtration):
            _, cert = build(M, cov, pairs)
            for name, mut in al.mutate(cert.to_json()):
                kind = name.rstrip("-0123456789")
                ok = al.verify_certificate(mut).ok
                tally[(kind, "accepted" if ok else "rejected")] += 1
                if ok:
                    leaked.append((M.describe(), build.__name__, name))
    for (kind, outcome), k in sorted(tally.items()):
        print(f"{kind:28s} {outcome:9s} {k}")
    for row in leaked:
        print("ACCEPTED MUTANT", *row)
    return 1 if leaked else 0


if __name__ == "__main__":
    sys.exit(main())
