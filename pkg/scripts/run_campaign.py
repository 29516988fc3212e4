#!/usr/bin/env python3
"""Run the full verification campaign at default trial counts and write the
JSON report. Exit code 0 means every trial of every property passed."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from specrank.propsuite import CampaignSettings, run_campaign  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240)
    parser.add_argument("--out", default="campaign_report.json")
    args = parser.parse_args()

    started = time.perf_counter()
    report = run_campaign(CampaignSettings(seed=args.seed))
    elapsed = time.perf_counter() - started

    Path(args.out).write_text(report.to_json_str())
    for prop in report.properties:
        status = "ok" if prop.fail_count == 0 else "FAIL"
        print(f"{prop.name:28s} {prop.pass_count:5d}/{prop.trials:<5d} "
              f"worst={prop.worst_residual:9.2e}  {status}")
    print(f"\nseed={report.seed} failures={report.total_failures} "
          f"skipped={report.total_skipped} elapsed={elapsed:.1f}s "
          f"-> {args.out}")
    return 0 if report.total_failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
