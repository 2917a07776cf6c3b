#!/usr/bin/env python3
"""Run every named scenario at the pinned sizes and print the verdicts.

Writes one JSON per scenario into --out-dir and exits nonzero if any
verdict failed.  This is the same pipeline the acceptance tests run.
"""

import argparse
import json
import sys
from pathlib import Path

from finbound.scenarios import SCENARIOS, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="out/scenarios")
    ap.add_argument("--only", nargs="*", default=None,
                    help="subset of scenario names")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    names = args.only if args.only else list(SCENARIOS)
    failures = 0
    for name in names:
        res = run_scenario(name)
        for line in res.lines():
            print(line)
        payload = {"scenario": res.scenario, "passed": res.passed,
                   "verdicts": res.verdicts, "values": res.values,
                   "seconds": res.seconds}
        (out / f"{name}.json").write_text(json.dumps(payload, indent=2,
                                                     sort_keys=True))
        failures += 0 if res.passed else 1
    print(f"\n{len(names) - failures}/{len(names)} scenarios passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
