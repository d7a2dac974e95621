#!/usr/bin/env python3
"""Regenerate data/observations_synthetic.csv.

The real state-level observation matrix behind the published index is not
public, so the shipped fixture is synthetic: one latent mobility factor
per state, and each indicator loads on it with indicator-specific strength,
sign matching its declared direction, plus independent noise. That gives
the pipeline realistic structure (a dominant first component) while staying
fully reproducible from the seed below.

Run from the repository root:

    python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from smi.dataset import Direction, load_indicator_metadata  # noqa: E402

SEED = 20240817

STATES = [
    "Andhra Pradesh",
    "Assam",
    "Bihar",
    "Chhattisgarh",
    "Delhi",
    "Gujarat",
    "Haryana",
    "Himachal Pradesh",
    "Jammu and Kashmir",
    "Jharkhand",
    "Karnataka",
    "Kerala",
    "Madhya Pradesh",
    "Maharashtra",
    "Odisha",
    "Punjab",
    "Rajasthan",
    "Tamil Nadu",
    "Telangana",
    "Uttar Pradesh",
    "Uttarakhand",
    "West Bengal",
]


def main() -> None:
    registry = load_indicator_metadata(ROOT / "data" / "indicators.csv")
    rng = np.random.default_rng(SEED)
    n = len(STATES)

    latent = rng.normal(0.0, 1.0, n)
    columns = []
    for spec in registry:
        strength = rng.uniform(0.45, 0.85)
        noise = rng.normal(0.0, float(np.sqrt(1.0 - strength**2)), n)
        z = strength * latent + noise
        if spec.direction is Direction.NEGATIVE:
            z = -z
        offset = rng.uniform(20.0, 80.0)
        scale = rng.uniform(5.0, 20.0)
        columns.append(offset + scale * z)

    out = ROOT / "data" / "observations_synthetic.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", *registry.ids])
        for i, state in enumerate(STATES):
            writer.writerow([state, *(f"{col[i]:.3f}" for col in columns)])
    print(f"wrote {out} ({n} states x {len(registry)} indicators, seed {SEED})")


if __name__ == "__main__":
    main()
