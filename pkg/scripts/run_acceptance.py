#!/usr/bin/env python3
"""
Run the acceptance scenarios one after another.

Each scenario is one CLI invocation. A failing scenario does not stop the rest;
a summary is printed at the end. Exit code is 1 when any scenario failed.

    python scripts/run_acceptance.py --threads 4
"""
import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from lowmach.cli import EXIT_OK, main  # noqa: E402

SCENARIOS = [
    ("assumptions", ["verify-assumptions", str(ROOT / "configs" / "default_sweep.cfg")]),
    ("model H reference", ["run-modelh", str(ROOT / "configs" / "default_sweep.cfg")]),
    ("1D sweep", ["sweep", str(ROOT / "configs" / "default_sweep.cfg")]),
    ("2D sweep", ["sweep", str(ROOT / "configs" / "demo_2d.cfg")]),
]


def run_scenario(name, argv):
    """Run one CLI invocation and report its exit code."""
    print(f"\n\n{'=' * 80}")
    print(f"Running scenario: {name}")
    print(f"{'=' * 80}\n")

    code = main(argv)
    if code != EXIT_OK:
        print(f"\n\nScenario {name} FAILED with exit code {code}")
        return False
    print(f"\n\nScenario {name} PASSED")
    return True


def main_acceptance():
    parser = argparse.ArgumentParser(description="Run the lowmach acceptance scenarios")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--skip-2d", action="store_true", help="Skip the 2D sweep")
    args = parser.parse_args()

    failed = []
    scenarios = [s for s in SCENARIOS if not (args.skip_2d and s[0] == "2D sweep")]
    for name, argv in scenarios:
        if not run_scenario(name, ["--threads", str(args.threads)] + argv):
            failed.append(name)

    print("\n\n")
    print(f"{'=' * 80}")
    print("Acceptance Summary")
    print(f"{'=' * 80}")
    print(f"Total scenarios: {len(scenarios)}")
    print(f"Passed: {len(scenarios) - len(failed)}")
    print(f"Failed: {len(failed)}")

    if failed:
        print("\nFailed scenarios:")
        for name in failed:
            print(f"  - {name}")
        return 1
    print("\nAll scenarios passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main_acceptance())
