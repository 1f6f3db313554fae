#!/usr/bin/env python3
"""
Regenerate tests/fixtures/k4_oracle.json: the minimum raw stress of the unit
complete graph K4 drawn in the plane.

Dense multi-start L-BFGS over random starts; the best value is written with
full precision. Run with: python scripts/k4_oracle.py [--starts N]
"""
import argparse
import json
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "k4_oracle.json"


def k4_stress(flat: np.ndarray) -> float:
    x = flat.reshape(4, 2)
    total = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            total += (1.0 - np.linalg.norm(x[i] - x[j])) ** 2
    return total


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--starts", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    best = np.inf
    for _ in range(args.starts):
        res = minimize(k4_stress, rng.uniform(-1.0, 1.0, 8), method="L-BFGS-B", options={"ftol": 1e-16, "gtol": 1e-12})
        res = minimize(k4_stress, res.x, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 20000})
        best = min(best, float(res.fun))

    payload = {
        "graph": "K4",
        "dims": 2,
        "alpha": 0,
        "summation": "i<j",
        "starts": args.starts,
        "seed": args.seed,
        "raw_stress": best,
    }
    FIXTURE.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"s*_4 = {best!r}")


if __name__ == "__main__":
    main()
