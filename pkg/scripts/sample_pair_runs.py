#!/usr/bin/env python3
"""Simulate seeded particle-pair runs and compare against the exact law.

Each simulated pair yields one outcome quadruple (m1, n1, m2, n2); the
empirical frequencies converge to the exact 16-outcome distribution and the
empirical CHSH value stays classical.
"""

import argparse
import math
import sys

import numpy as np

from qmeas.experiments import EprBellConfig, WhichWayConfig, quadruple_sample_check
from qmeas.states import entangled_pair_state


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--angles-deg", type=float, nargs=4, default=[0.0, 45.0, 22.5, 67.5])
    parser.add_argument("--gamma1", type=float, default=0.5)
    parser.add_argument("--gamma2", type=float, default=0.5)
    parser.add_argument("--n-samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=20260808)
    args = parser.parse_args()

    t1, t1p, t2, t2p = (math.radians(a) for a in args.angles_deg)
    config = EprBellConfig(
        WhichWayConfig(t1, t1p, args.gamma1), WhichWayConfig(t2, t2p, args.gamma2)
    )
    check = quadruple_sample_check(entangled_pair_state(), config, args.n_samples, args.seed)

    print(f"n = {args.n_samples}, seed = {args.seed}")
    print(f"total-variation distance to exact law: {check.tv_distance:.5f}")
    print("top cells (m1 n1 m2 n2: count, exact probability):")
    order = np.argsort(check.counts.reshape(-1))[::-1][:5]
    for flat in order:
        idx = np.unravel_index(flat, (2, 2, 2, 2))
        label = " ".join("+-"[k] for k in idx)
        print(
            f"  {label}: {int(check.counts[idx]):7d}   {check.exact.probabilities[idx]:.5f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
