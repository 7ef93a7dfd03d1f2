"""Record simplex-type density floors used by the acceptance checks.

Run once from the repository root:

    python3 scripts/calibrate_density_floors.py

It draws one seeded uniform set of 40000 points in Z_9^5, runs a sampled
census for k = 1, 2 and both metrics, and writes the measured densities to
tests/fixtures/density_floors.json.  The acceptance check reruns the same
configuration and requires every density to be within 5% of the recorded
value.
"""

from __future__ import annotations

import json
from pathlib import Path

from zndots import harness as H
from zndots import simplices as sx

N, D, SIZE, SEED, BUDGET = 9, 5, 40000, 2024, 10**7
FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "density_floors.json"


def measure() -> list[dict]:
    E = H.generate_set(H.ExperimentConfig(n=N, d=D, set_size=SIZE, seed=SEED), 0)
    rows = []
    for k in (1, 2):
        for metric in sx.METRICS:
            c = sx.census(E, k, metric, mode="sampled", budget=BUDGET, seed=SEED + k)
            sat = sx.saturation_estimate(c)
            rows.append(
                {
                    "k": k,
                    "metric": metric,
                    "distinct": c.distinct_count,
                    "density": sx.density(c),
                    "plateaued": sat.plateaued,
                }
            )
    return rows


def main() -> None:
    payload = {
        "n": N,
        "d": D,
        "set_size": SIZE,
        "seed": SEED,
        "budget": BUDGET,
        "tolerance": 0.05,
        "floors": measure(),
    }
    FIXTURE.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {FIXTURE}")


if __name__ == "__main__":
    main()
