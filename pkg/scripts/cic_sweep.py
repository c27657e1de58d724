"""Sample random cic expression trees and check that each one is positive real.

    python scripts/cic_sweep.py --count 500 --max-depth 6 --csv sweep.csv
"""
import argparse
import csv
import sys
import time
from dataclasses import dataclass

from passivecones.ratfun import GridSpec, cic_eval, cic_sample, pr_check, tree_depth


@dataclass
class SweepConfig:
    count: int = 500
    max_depth: int = 6
    m: int = 1
    seed: int = 0
    grid: str = ""


def sweep(cfg):
    grid = GridSpec.parse(cfg.grid)
    rows = []
    for k in range(cfg.count):
        seed = cfg.seed + k
        tree = cic_sample(1 + k % cfg.max_depth, seed, cfg.m)
        F = cic_eval(tree, cfg.m)
        v = pr_check(F, grid)
        rows.append({"seed": seed, "depth": tree_depth(tree), "degree": F.max_degree(),
                     "is_pr": v.is_pr, "failures": len(v.failures)})
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=SweepConfig.count)
    p.add_argument("--max-depth", type=int, default=SweepConfig.max_depth)
    p.add_argument("--m", type=int, default=SweepConfig.m)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--grid", default=SweepConfig.grid)
    p.add_argument("--csv", help="write one row per sample")
    a = p.parse_args(argv)
    cfg = SweepConfig(a.count, a.max_depth, a.m, a.seed, a.grid)
    t0 = time.perf_counter()
    rows = sweep(cfg)
    bad = [r["seed"] for r in rows if not r["is_pr"]]
    print(f"{len(rows) - len(bad)}/{len(rows)} positive real, "
          f"max degree {max(r['degree'] for r in rows)}, {time.perf_counter() - t0:.1f}s")
    if bad:
        print(f"failing seeds: {bad}")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
