#!/usr/bin/env python3
"""Drive both cross-validation loops and print a compact summary.

Usage: python3 scripts/run_roundtrips.py [--seed N] [--asp-count N]
       [--logic-count N] [--workers N]
"""

import argparse
import sys
import time

from aspsigma.cli import report_digest, roundtrip_asp, roundtrip_logic
from aspsigma.corpus import CorpusSpec


def summarize(label, reports, elapsed):
    bad = [r for r in reports if not r.skipped and not r.agreed]
    skipped = [r for r in reports if r.skipped]
    print(
        f"{label}: {len(reports)} instances, {len(bad)} disagreements, "
        f"{len(skipped)} skipped, {elapsed:.1f}s, digest "
        f"{report_digest(reports)[:16]}"
    )
    for r in bad:
        print("  " + r.line())
    for r in skipped[:5]:
        print("  " + r.line())
    return not bad


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--asp-count", type=int, default=500)
    ap.add_argument("--logic-count", type=int, default=120)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    t0 = time.monotonic()
    asp = roundtrip_asp(
        CorpusSpec(count=args.asp_count, seed=args.seed),
        timeout=10.0,
        workers=args.workers,
    )
    ok1 = summarize("asp->logic", asp, time.monotonic() - t0)

    t0 = time.monotonic()
    logic = roundtrip_logic(
        CorpusSpec(count=args.logic_count, seed=args.seed),
        timeout=30.0,
        workers=args.workers,
    )
    ok2 = summarize("logic->asp", logic, time.monotonic() - t0)
    sys.exit(0 if ok1 and ok2 else 1)


if __name__ == "__main__":
    main()
