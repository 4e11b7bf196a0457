"""Optimal threshold and optimum versus the second process's reversion rate.

Two variants of a two-process system are swept over theta_2 in [0.1, 1.0]
(mu = 1, eps = 0):

* variant A: sigma_sq = [2, 1], theta_1 = 0.5;
* variant B: sigma_sq = [1, 1], theta_1 = 1.0.

When the budget binds (f_max = 0.5) the threshold is exactly constant: the
constrained branch depends only on (K, eps, mu, f_max). With a slack budget
(f_max = 1.5) the optimum beta* falls as the second process gets faster (its
stationary variance shrinks), and the threshold mostly falls with it, though
not quite monotonically: tau*(theta_2) turns back up after a shallow minimum
near theta_2 ~ 0.95 in variant A.
"""

import csv
import pathlib

import numpy as np

from ousampler import SystemConfig, solve

OUT = pathlib.Path(__file__).parent / "output"

VARIANTS = {
    "A": dict(theta1=0.5, sigma_sq=(2.0, 1.0)),
    "B": dict(theta1=1.0, sigma_sq=(1.0, 1.0)),
}


def main():
    OUT.mkdir(exist_ok=True)
    grid = np.round(np.arange(0.1, 1.01, 0.1), 10)
    path = OUT / "fig4.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "theta_2", "f_max", "tau_star", "beta_star", "binding"])
        for name, v in VARIANTS.items():
            print(f"variant {name}: theta_1={v['theta1']}, sigma_sq={v['sigma_sq']}")
            print(" theta_2   tau*(f=0.5)  tau*(f=1.5)  beta*(f=1.5)")
            for th2 in grid:
                row = []
                for f_max in (0.5, 1.5):
                    cfg = SystemConfig(K=2, theta=(v["theta1"], float(th2)),
                                       sigma_sq=v["sigma_sq"], mu=1.0,
                                       eps=0.0, f_max=f_max)
                    pol = solve(cfg)
                    w.writerow([name, th2, f_max, pol.tau_star, pol.beta_star,
                                pol.binding])
                    row.append(pol)
                print(f"  {th2:5.1f}   {row[0].tau_star:10.6f}  {row[1].tau_star:10.6f}"
                      f"  {row[1].beta_star:11.6f}")
            print()
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
