"""Optimal threshold versus erasure probability, for three sampling budgets.

A two-process system (theta = [0.1, 0.5], sigma_sq = [1, 2], mu = 1) is solved
across eps in {0, 0.05, ..., 0.9} for f_max in {0.5, 0.95, 1.5}:

* f_max = 0.5 < mu: the budget binds everywhere, tau* = h_inverse(2/(1-eps));
* f_max = 1.5 > mu: the budget can never bind, tau* = g_inverse(beta*);
* f_max = 0.95: the budget starts slack and overtakes near eps ~ 0.70, where
  the constrained branch crosses the unconstrained one.

Writes one CSV per budget (including the inactive branch, so the crossing is
visible) and a PNG when matplotlib is available.
"""

import csv
import pathlib

import numpy as np

from ousampler import SystemConfig, solve

OUT = pathlib.Path(__file__).parent / "output"


def config(eps, f_max):
    return SystemConfig(K=2, theta=(0.1, 0.5), sigma_sq=(1.0, 2.0),
                        mu=1.0, eps=eps, f_max=f_max)


def main():
    OUT.mkdir(exist_ok=True)
    eps_grid = np.arange(0.0, 0.91, 0.05)
    curves = {}
    for f_max in (0.5, 0.95, 1.5):
        rows = []
        for eps in eps_grid:
            pol = solve(config(float(eps), f_max))
            rows.append((float(eps), pol.tau_star, pol.beta_star,
                         pol.tau_unconstrained, pol.tau_constrained, pol.binding))
        curves[f_max] = rows
        path = OUT / f"fig2_fmax_{f_max}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "tau_star", "beta_star",
                        "tau_unconstrained", "tau_constrained", "binding"])
            w.writerows(rows)
        print(f"wrote {path}")

    print("\n eps    tau*(f=0.5)  tau*(f=0.95)  tau*(f=1.5)  binding(f=0.95)")
    for i, eps in enumerate(eps_grid):
        r05, r95, r15 = curves[0.5][i], curves[0.95][i], curves[1.5][i]
        print(f" {eps:4.2f}   {r05[1]:10.4f}  {r95[1]:11.4f}  {r15[1]:10.4f}  {r95[5]}")

    flips = [e for (e, *_, b), (e2, *_, b2) in zip(curves[0.95], curves[0.95][1:])
             if b != b2 for e in [e2]]
    if flips:
        print(f"\nf_max=0.95: constraint becomes binding between "
              f"eps={flips[0] - 0.05:.2f} and eps={flips[0]:.2f}")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    styles = {0.5: "o-", 0.95: "s-", 1.5: "^-"}
    for f_max, rows in curves.items():
        ax.plot(eps_grid, [r[1] for r in rows], styles[f_max], ms=3,
                label=f"$f_{{max}}={f_max}$")
    ax.plot(eps_grid, [r[4] for r in curves[0.95]], "k:",
            label="constrained branch ($f_{max}=0.95$)")
    ax.set_xlabel(r"erasure probability $\epsilon$")
    ax.set_ylabel(r"optimal threshold $\tau^*$")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "fig2.png", dpi=150)
    print(f"wrote {OUT / 'fig2.png'}")


if __name__ == "__main__":
    main()
