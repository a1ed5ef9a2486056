"""Run the ten acceptance criteria outside pytest and print one line each.

    python scripts/run_acceptance.py [--only 1,3,7]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import acceptance_criteria as ac  # noqa: E402
from demazure.powerseries import DIVISION_LEDGER  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--only", default="", help="comma-separated criterion numbers")
    args = parser.parse_args()
    wanted = {int(x) for x in args.only.split(",") if x} or set(range(1, 11))
    DIVISION_LEDGER.reset()
    failed = 0
    for number, fn in enumerate(ac.CRITERIA, start=1):
        if number not in wanted:
            continue
        t0 = time.perf_counter()
        ok, detail = fn()
        failed += not ok
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:5.1f}s)  {detail}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
