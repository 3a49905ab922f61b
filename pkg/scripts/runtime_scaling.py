#!/usr/bin/env python3
"""Solver wall-clock versus band size, with a fitted log-log slope."""

import argparse

from crloading.experiments import runtime_scaling
from crloading.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.strip())
    ap.add_argument("--config", required=True)
    ap.add_argument("--sizes", default="64,128,256,512,1024")
    ap.add_argument("--repeats", type=int, default=7,
                    help="median over this many timed solves per size")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    cfg = load_scenario(args.config)
    sizes = [int(s) for s in args.sizes.split(",")]
    rows, slope = runtime_scaling(cfg, sizes, repeats=args.repeats,
                                  master_seed=args.seed)
    for n, t in rows:
        print(f"N={n:<5d}  median {t * 1e3:8.3f} ms")
    print(f"log-log slope: {slope:.3f}")


if __name__ == "__main__":
    main()
