"""Replication study: masked updates versus classical discarding.

Repeats the bivariate missing-data experiment over many seeds and
aggregates forecast accuracy (standardized squared error per variable) and
the posterior correlation estimate at partially missing times. Mirrors the
`mvdlm simulate` CLI subcommand but keeps the results in memory.

Run:  python3 demos/replication_study.py [replications]
"""
import sys

import numpy as np

import mvdlm as mv


def main():
    M = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    cfg = mv.LocalLevelConfig(T=100, corr=0.8, seed=0)
    summary = mv.replicate_experiment(M, cfg, mv.DEFAULT_MISSING_PATTERN)

    print(f"replications           : {summary.n_replications}")
    print(f"partially missing times: {summary.partial_times}")
    print()
    print(f"{'':22}{'variable 1':>11} {'variable 2':>11}")
    print(f"{'mean MSSE, masked':22}{summary.mean_msse_new[0]:11.4f} "
          f"{summary.mean_msse_new[1]:11.4f}")
    print(f"{'mean MSSE, classical':22}{summary.mean_msse_classical[0]:11.4f} "
          f"{summary.mean_msse_classical[1]:11.4f}")
    diff = summary.mean_msse_classical - summary.mean_msse_new
    print(f"{'classical - masked':22}{diff[0]:+11.4f} {diff[1]:+11.4f}")
    print()
    print(f"fraction of replications where the masked filter wins on every")
    print(f"variable simultaneously : {summary.win_fraction:.3f}")
    print()
    print(f"posterior correlation estimate at partial gaps (true value {cfg.corr}):")
    per_time = summary.partial_corr.mean(axis=0)
    for t, c in zip(summary.partial_times, per_time):
        print(f"  t={t:3d}  mean over replications = {c:.3f}")
    print(f"  overall mean = {summary.mean_partial_corr:.3f}")
    print()
    print("Both filters standardize errors by their own running covariance")
    print("estimate, which keeps each mode's MSSE near 1 and the differences")
    print("between modes tiny; the clearer payoff of the masked updates is the")
    print("correlation estimate at the gaps, which tracks the generating value.")

    spread = np.abs(summary.msse_new - summary.msse_classical).mean(axis=0)
    print(f"\nmean |per-replication MSSE difference|: {np.round(spread, 4)}")


if __name__ == "__main__":
    main()
