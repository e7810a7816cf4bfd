"""Partial sums of the kernel-dimension series against the closed form.

Writes a CSV with columns k, m, N, partial_sum, closed_form, gap so the
approach from below can be plotted.

    python scripts/series_convergence.py --k 3 --m 4 --N 400 --every 20
"""
import argparse
import csv
import sys
from dataclasses import dataclass

import mpmath

from lampkernel.closedform import c_of_p
from lampkernel.genfun import partial_sums


@dataclass
class Config:
    k: int = 3
    m: int = 4
    N: int = 400
    every: int = 20
    out: str = "-"


def main(cfg: Config) -> None:
    sums = partial_sums(cfg.k, cfg.m, cfg.N, "float")
    c = c_of_p(cfg.k, cfg.m, certify=False).value_float
    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(["k", "m", "N", "partial_sum", "closed_form", "gap"])
    with mpmath.workprec(256):
        for n in range(0, cfg.N + 1, cfg.every):
            w.writerow([cfg.k, cfg.m, n, mpmath.nstr(sums[n], 25), mpmath.nstr(c, 25),
                        mpmath.nstr(c - sums[n], 5)])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, default in vars(Config()).items():
        ap.add_argument(f"--{f}", type=type(default), default=default)
    main(Config(**vars(ap.parse_args())))
