"""Monte Carlo oracles for the closed-form epoch functionals.

Every closed form in :mod:`ousampler.functionals` is the expectation of an
explicit random quantity. These helpers estimate those expectations directly
from draws of the epoch service time (a negative-binomial number of exp(mu)
attempt durations), so agreement checks never share code with the series
implementations they judge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import functionals as fn
from .model import SystemConfig
from .simulator import ou_transition
from .special import negbin_pmf

__all__ = [
    "OracleCheck",
    "draw_epoch_service",
    "mc_h",
    "mc_f",
    "mc_mean_service",
    "negbin_bin_checks",
    "ou_moment_checks",
    "run_battery",
]


@dataclass(frozen=True)
class OracleCheck:
    """One analytic-vs-Monte-Carlo comparison."""

    name: str
    analytic: float
    estimate: float
    stderr: float
    z: float

    @property
    def ok(self) -> bool:
        return abs(self.z) <= 3.0

    def describe(self) -> str:
        status = "pass" if self.ok else "FAIL"
        return (f"[{status}] {self.name}: analytic={self.analytic:.8g} "
                f"mc={self.estimate:.8g} se={self.stderr:.3g} z={self.z:+.2f}")


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


def draw_epoch_service(k: int, eps: float, mu: float, n: int,
                       rng: np.random.Generator) -> np.ndarray:
    """n draws of the epoch total service time (k successes over the channel)."""
    rho = rng.negative_binomial(k, 1.0 - eps, n) + k
    return rng.gamma(rho.astype(float)) / mu


def mc_h(k: int, eps: float, mu: float, tau: float, n: int,
         rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo E[(tau - Ytot)^+]."""
    y = draw_epoch_service(k, eps, mu, n, rng)
    return _mean_se(np.maximum(tau - y, 0.0))


def mc_f(k: int, eps: float, mu: float, theta: float, tau: float, n: int,
         rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo E[e^(-2 theta max(tau, Ytot))]."""
    y = draw_epoch_service(k, eps, mu, n, rng)
    return _mean_se(np.exp(-2.0 * theta * np.maximum(tau, y)))


def mc_mean_service(k: int, eps: float, mu: float, n: int,
                    rng: np.random.Generator) -> tuple[float, float]:
    y = draw_epoch_service(k, eps, mu, n, rng)
    return _mean_se(y)


def negbin_bin_checks(k: int, eps: float, n: int, rng: np.random.Generator,
                      min_expected: float = 25.0) -> list[OracleCheck]:
    """Per-bin comparison of negbin_pmf with simulated Bernoulli attempt streams."""
    rho = rng.negative_binomial(k, 1.0 - eps, n) + k
    checks = []
    r = k
    while True:
        p = negbin_pmf(r, k, eps)
        if n * p < min_expected and r > k:
            break
        emp = float(np.mean(rho == r))
        se = np.sqrt(max(p * (1.0 - p), 1e-300) / n)
        checks.append(OracleCheck(f"negbin_pmf(rho={r})", p, emp, se, (emp - p) / se))
        r += 1
        if eps == 0.0:
            break
    return checks


def ou_moment_checks(theta: float, sigma_sq: float, x0: float, delta: float,
                     n: int, rng: np.random.Generator) -> list[OracleCheck]:
    """Mean and variance of the exact OU transition against their closed forms."""
    draws = ou_transition(np.full(n, x0), theta, sigma_sq, delta, rng)
    mean_true = x0 * np.exp(-theta * delta)
    var_true = sigma_sq / (2.0 * theta) * -np.expm1(-2.0 * theta * delta)
    m, m_se = _mean_se(draws)
    centered = (draws - mean_true) ** 2
    v, v_se = _mean_se(centered)
    return [
        OracleCheck(f"ou_transition mean (delta={delta})", mean_true, m, m_se,
                    (m - mean_true) / m_se),
        OracleCheck(f"ou_transition var (delta={delta})", var_true, v, v_se,
                    (v - var_true) / v_se),
    ]


def run_battery(config: SystemConfig, draws: int, seed: int,
                n_tuples: int = 5) -> list[OracleCheck]:
    """Config-anchored oracle battery: h_fn, f_fn, mean service, negbin, OU moments.

    Randomized tau values (seeded) probe the functionals at the config's own
    (K, eps, mu); the OU checks use the config's first process.
    """
    rng = np.random.default_rng(seed)
    ctx = fn.make_context(config)
    k, eps, mu = config.K, config.eps, config.mu
    checks: list[OracleCheck] = []

    taus = rng.uniform(0.0, 4.0 * fn.mean_epoch_service(ctx), n_tuples)
    for tau in taus:
        est, se = mc_h(k, eps, mu, tau, draws, rng)
        a = fn.h_fn(ctx, tau)
        checks.append(OracleCheck(f"h_fn(tau={tau:.3f})", a, est, se,
                                  (est - a) / se if se > 0 else 0.0))
    for tau in taus:
        idx = int(rng.integers(0, k))
        est, se = mc_f(k, eps, mu, config.theta[idx], tau, draws, rng)
        a = fn.f_fn(ctx, tau, idx)
        checks.append(OracleCheck(f"f_fn(tau={tau:.3f}, k={idx})", a, est, se,
                                  (est - a) / se if se > 0 else 0.0))

    est, se = mc_mean_service(k, eps, mu, draws, rng)
    a = fn.mean_epoch_service(ctx)
    checks.append(OracleCheck("mean_epoch_service", a, est, se, (est - a) / se))

    checks.extend(negbin_bin_checks(k, eps, min(draws, 1_000_000), rng))
    checks.extend(ou_moment_checks(config.theta[0], config.sigma_sq[0], 1.5, 0.8,
                                   min(draws, 1_000_000), rng))
    return checks
