#!/usr/bin/env python3
"""Scan the rotating-wave approximation error against the drive strength.

For a two-level system at resonance the counter-rotating terms shrink with
g/omega; this prints the measured state-vector deviation for a few ratios so
the trend is visible.
"""

import argparse

import numpy as np

from nrabi import IntegrationConfig, LevelSystem, StateVector, rwa_error


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--ratios", type=float, nargs="+", default=[0.05, 0.02, 0.01],
        help="g/omega values to scan",
    )
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--cycles", type=float, default=4.0, help="Rabi cycles per run")
    args = parser.parse_args()

    psi0 = StateVector.basis(2, 0)
    print(f"{'g/omega':>10} {'t_end':>12} {'max deviation':>16}")
    for ratio in args.ratios:
        g = ratio * args.omega
        system = LevelSystem.resonant((0.0, args.omega), {(0, 1): g})
        t_end = args.cycles * 2.0 * np.pi / g
        err = rwa_error(system, psi0, t_end, 201, IntegrationConfig(rel_tol=1e-8))
        print(f"{ratio:>10.4f} {t_end:>12.2f} {err:>16.6e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
