"""Shared test fixtures: configs, quadrature oracles, and two independent
routes to the simulator's stationary MSE (a literal event-loop reference and
a Monte Carlo evaluation of the exactly-coupled closed form)."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from ousampler import SystemConfig, maf_select, mse_integral
from ousampler.functionals import make_context, h_fn, mean_epoch_service


def fig2_config(eps=0.3, f_max=0.95) -> SystemConfig:
    return SystemConfig(K=2, theta=(0.1, 0.5), sigma_sq=(1.0, 2.0),
                        mu=1.0, eps=eps, f_max=f_max)


def gamma_quad(x: float, n: int) -> float:
    """Defining integral of the regularized incomplete gamma, by quadrature."""
    if x == 0:
        return 0.0
    lg = math.lgamma(n)
    val, _ = integrate.quad(
        lambda t: math.exp((n - 1) * math.log(t) - t - lg) if t > 0 else 0.0,
        0.0, x, limit=200, epsabs=1e-13, epsrel=1e-13,
    )
    return val


def mse_quad(theta, sigma_sq, a, b, s) -> float:
    """Quadrature of the instantaneous MSE over [a, b] for a sample stamped at s."""
    f = lambda t: sigma_sq / (2 * theta) * (1 - math.exp(-2 * theta * (t - s)))
    val, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13)
    return val


def reference_run(config: SystemConfig, tau: float, epochs: int, seed: int,
                  mode: str = "grouped") -> dict:
    """Literal per-attempt event loop, independent of the vectorized simulator.

    Serves processes by calling maf_select at every sampling decision, draws
    each attempt's service and erasure individually, and places waits per the
    requested mode. Virtual time-0 samples carry an index stagger so the
    initial MAF ties resolve in index order (same convention as run()).
    """
    rng = np.random.default_rng(seed)
    K, mu, eps = config.K, config.mu, config.eps
    th, s2 = config.theta, config.sigma_sq
    warm = max(K - 1, 1)
    # Virtual samples staggered so process 0 is oldest and every warm-up tie
    # resolves to index order (the stationary regime of lowest-index
    # tie-breaking); the stationary sum MSE genuinely depends on which process
    # occupies which serving position, so the stagger direction matters.
    last_gen = -1e-9 * (K - np.arange(K))
    t = 0.0
    prev_ytot = math.inf
    rows = []
    for _ in range(warm + epochs):
        w = max(tau - prev_ytot, 0.0)
        start = t
        if mode == "grouped":
            t += w
        old_gen = last_gen.copy()
        recep = np.zeros(K)
        new_gen = np.zeros(K)
        ytot = 0.0
        samples = 0
        for _pos in range(K):
            k = maf_select(t - last_gen)
            if mode == "split":
                t += w / K
            while True:
                gen = t
                y = rng.exponential(1.0 / mu)
                t += y
                ytot += y
                samples += 1
                if eps == 0.0 or rng.random() >= eps:
                    break
            recep[k] = t
            new_gen[k] = gen
            last_gen[k] = gen
        end = t
        contrib = np.array([
            mse_integral(th[k], s2[k], start, recep[k], old_gen[k])
            + mse_integral(th[k], s2[k], recep[k], end, new_gen[k])
            for k in range(K)
        ])
        rows.append((contrib, end - start, samples, ytot, w))
        prev_ytot = ytot
    rows = rows[warm:]
    c = np.array([r[0].sum() for r in rows])
    length = np.array([r[1] for r in rows])
    samples = np.array([r[2] for r in rows])
    ratio = c.sum() / length.sum()
    resid = c - ratio * length
    se = resid.std(ddof=1) / math.sqrt(len(rows)) / length.mean()
    return {
        "sum_mse": ratio,
        "sum_mse_stderr": se,
        "sampling_freq": samples.sum() / length.sum(),
        "mean_epoch_length": length.mean(),
        "mean_epoch_length_stderr": length.std(ddof=1) / math.sqrt(len(rows)),
        "mean_epoch_service": np.mean([r[3] for r in rows]),
    }


def coupled_policy_mse(config: SystemConfig, tau: float, n: int, seed: int) -> float:
    """Exactly-coupled stationary MSE of the threshold policy, by Monte Carlo.

    Unlike the solver's closed form, this keeps the dependence between the age
    at reception (the successful attempt's service time, one summand of the
    epoch service total) and the wait computed from that total:

        E[e^(-2 th A_end,k)] = E[e^(-2 th (L_k + V_k + [tau - Ytot]^+))] * E[e^(-2 th P_k)]

    with L_k the last service of process k, V_k the later-served processes'
    service total, P_k the earlier-through-k total of a fresh epoch.
    """
    rng = np.random.default_rng(seed)
    K, mu, eps = config.K, config.mu, config.eps
    M = rng.geometric(1.0 - eps, size=(n, K))
    L = rng.exponential(1.0 / mu, size=(n, K))
    fail = rng.gamma((M - 1).astype(float), 1.0 / mu)
    T = fail + L
    ytot = T.sum(axis=1)
    wait = np.maximum(tau - ytot, 0.0)
    ctx = make_context(config)
    den = h_fn(ctx, tau) + mean_epoch_service(ctx)
    num = 0.0
    for k in range(K):
        th = config.theta[k]
        lap = mu / (mu + 2.0 * th)
        v = T[:, k + 1:].sum(axis=1)
        p = T[:, :k + 1].sum(axis=1)
        a_end = float(np.mean(np.exp(-2 * th * (L[:, k] + v + wait)))
                      * np.mean(np.exp(-2 * th * p)))
        num += config.sigma_sq[k] / (2 * th) * (den - (lap - a_end) / (2 * th))
    return num / den
