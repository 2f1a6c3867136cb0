"""Replay of a full engagement with the operator loop on automatic.

Runs the committed single-threat and four-launch scenarios to their
outcomes and prints the decision timeline; equivalent to

    riskring replay --scenario tests/fixtures/scenarios/single_far.txt --policy auto --out trace.txt
"""

import os

from riskring.scenario import load_scenario
from riskring.session import run_replay
from riskring.surrogate import load_model_set

HERE = os.path.dirname(__file__)
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")


def main():
    models = load_model_set(os.path.join(FIXTURES, "models", "manifest.txt"))
    for name in ("single_far", "four_close"):
        scenario = load_scenario(os.path.join(FIXTURES, "scenarios", f"{name}.txt"))
        result = run_replay(scenario, models, policy=None)
        print(f"=== {name}: outcome={result.outcome} after {result.duration_s:.0f} s, "
              f"closest approach {result.min_md_m:.0f} m")
        engagements = [
            line for line in result.trace_text.splitlines() if line.startswith("row")
        ]
        for line in engagements[:5]:
            print("   ", line[:110])
        print(f"    ... {len(engagements)} rows total")


if __name__ == "__main__":
    main()
