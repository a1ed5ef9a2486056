"""Check the defining relations of D_F over the standard configuration grid.

Prints a one-line summary per configuration; ``--json`` dumps the full reports.
"""

import argparse
import json
import sys

from demazure import suites


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--prec", type=int, default=8)
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()
    reports = []
    for cfg in suites.relation_grid(args.prec):
        rep = suites.relations(cfg, seed=args.seed, samples=args.samples)
        reports.append(rep)
        if not args.json:
            bad = sum(not c["ok"] for c in rep["checks"])
            print(f"{rep['config']}: {'ok' if rep['ok'] else f'{bad} failures'} ({len(rep['checks'])} checks)")
    if args.json:
        print(json.dumps(reports, indent=1, sort_keys=True))
    return 0 if all(r["ok"] for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
