"""Closed form, series and Monte Carlo side by side for a grid of (k, m).

    python scripts/headline_table.py --samples 200000 --seed 1
"""
import argparse
from dataclasses import dataclass, field

from lampkernel.closedform import c_of_p
from lampkernel.genfun import dimension_partial_sum
from lampkernel.percolation import estimate_dimension


@dataclass
class Config:
    grid: list = field(default_factory=lambda: [(1, 2), (1, 3), (3, 4), (3, 5), (5, 6), (5, 8)])
    samples: int = 200_000
    seed: int = 1
    threads: int = 1


def main(cfg: Config) -> None:
    print(f"{'k':>2} {'m':>3} {'closed form':>14} {'series N=400':>14} {'monte carlo':>12} {'stderr':>9} {'z':>6}  verdict")
    for k, m in cfg.grid:
        res = c_of_p(k, m)
        c = float(res.value_float)
        s = float(dimension_partial_sum(k, m, 400, "float"))
        est = estimate_dimension(k, m, cfg.samples, cfg.seed, threads=cfg.threads)
        z = (est.estimate - c) / est.stderr
        print(f"{k:>2} {m:>3} {c:14.10f} {s:14.10f} {est.estimate:12.6f} {est.stderr:9.2e} {z:6.2f}  {res.rationality.kind}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--threads", type=int, default=Config.threads)
    ns = ap.parse_args()
    main(Config(samples=ns.samples, seed=ns.seed, threads=ns.threads))
