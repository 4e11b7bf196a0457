"""Closed-form epoch functionals of the threshold waiting policy.

With ``Ytot`` the total service time of one epoch (a negative-binomial mixture
of Gamma(rho, mu) variables) and ``Y ~ exp(mu)`` a single service time:

* ``g_fn(tau)``    -- sum_k s2_k/(2 th_k) (1 - E[e^(-2 th_k Y)] e^(-2 th_k tau)),
  the marginal MSE level reached by waiting ``tau`` past an epoch boundary;
  strictly increasing with range (g_fn(0), sum_k s2_k/(2 th_k)).
* ``h_fn(tau)``    -- E[(tau - Ytot)^+], the mean wait spent by the threshold
  policy with threshold ``tau``.
* ``f_fn(tau, k)`` -- E[e^(-2 th_k max(tau, Ytot))].
* ``dinkelbach_p(beta, tau)`` -- the parameterized numerator-minus-denominator
  gap whose root in ``beta`` (with ``tau`` coupled by the solver) is the
  minimum long-term average sum MSE.

All series share one :class:`~ousampler.special.TruncationPlan` held by the
context, and each call evaluates the incomplete-gamma ladder once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import SystemConfig, ensure_valid
from .special import TruncationPlan, make_truncation_plan, reg_gamma_ladder

__all__ = [
    "AnalyticContext",
    "make_context",
    "g_fn",
    "g_ceiling",
    "g_inverse",
    "h_fn",
    "h_inverse",
    "f_fn",
    "mean_epoch_service",
    "dinkelbach_p",
    "mse_numerator_denominator",
]

_INV_TOL = 1e-12  # absolute tau tolerance of the bracketed bisections


@dataclass(frozen=True, eq=False)
class AnalyticContext:
    """Immutable bundle of a config, its series plan and cached per-process factors."""

    config: SystemConfig
    plan: TruncationPlan
    laplace_service: np.ndarray = field(repr=False)  # E[e^(-2 th_k Y)] = mu/(mu + 2 th_k)
    theta: np.ndarray = field(repr=False)
    sigma_sq: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.plan.k != self.config.K or self.plan.eps != self.config.eps:
            raise ValueError("truncation plan does not match the config's (K, eps)")


def make_context(config: SystemConfig, series_tol: float = 1e-12) -> AnalyticContext:
    ensure_valid(config)
    theta = np.asarray(config.theta)
    return AnalyticContext(
        config=config,
        plan=make_truncation_plan(config.K, config.eps, series_tol),
        laplace_service=config.mu / (config.mu + 2.0 * theta),
        theta=theta,
        sigma_sq=np.asarray(config.sigma_sq),
    )


def _check_tau(tau: float) -> float:
    if not tau >= 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return float(tau)


def g_fn(ctx: AnalyticContext, tau: float) -> float:
    tau = _check_tau(tau)
    return float(
        np.sum(
            ctx.sigma_sq
            / (2.0 * ctx.theta)
            * (1.0 - ctx.laplace_service * np.exp(-2.0 * ctx.theta * tau))
        )
    )


def g_ceiling(ctx: AnalyticContext) -> float:
    """Supremum of g_fn: the sum of stationary variances."""
    return float(np.sum(ctx.sigma_sq / (2.0 * ctx.theta)))


def g_inverse(ctx: AnalyticContext, beta: float) -> float:
    """Threshold tau with g_fn(tau) = beta, clamped to 0 for beta <= g_fn(0).

    Bracketed bisection on the strictly increasing g_fn (tolerance 1e-12 in
    tau). beta at or above the stationary-variance ceiling has no finite
    preimage and is a domain error.
    """
    if beta >= g_ceiling(ctx):
        raise ValueError(
            f"beta={beta} is not below the stationary-variance ceiling {g_ceiling(ctx)}"
        )
    if beta <= g_fn(ctx, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while g_fn(ctx, hi) < beta:
        hi *= 2.0
    while hi - lo > _INV_TOL:
        mid = 0.5 * (lo + hi)
        if g_fn(ctx, mid) < beta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _gamma_ladders(ctx: AnalyticContext, x: float):
    """gamma(x, rho) and gamma(x, rho+1) over the plan's rho range."""
    ladder = reg_gamma_ladder(x, ctx.plan.rho_max + 1)
    rho_lo, rho_hi = ctx.plan.rho_min, ctx.plan.rho_max
    return ladder[rho_lo - 1 : rho_hi], ladder[rho_lo : rho_hi + 1]


def h_fn(ctx: AnalyticContext, tau: float) -> float:
    """Mean wait E[(tau - Ytot)^+] of the threshold policy.

    Series form: sum_rho w_rho [tau gamma(mu tau, rho) - rho/mu gamma(mu tau, rho+1)].
    """
    tau = _check_tau(tau)
    if tau == 0.0:
        return 0.0
    mu = ctx.config.mu
    g_rho, g_rho1 = _gamma_ladders(ctx, mu * tau)
    rho = ctx.plan.rho
    return float(np.sum(ctx.plan.weights * (tau * g_rho - rho / mu * g_rho1)))


def h_inverse(ctx: AnalyticContext, c: float) -> float:
    """Threshold tau with h_fn(tau) = c; defined for every c >= 0 (H is unbounded)."""
    if not c >= 0:
        raise ValueError(f"c must be nonnegative, got {c}")
    if c == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while h_fn(ctx, hi) < c:
        hi *= 2.0
    while hi - lo > _INV_TOL:
        mid = 0.5 * (lo + hi)
        if h_fn(ctx, mid) < c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def f_fn(ctx: AnalyticContext, tau: float, k: int) -> float:
    """E[e^(-2 th_k max(tau, Ytot))] for zero-based process index k.

    Series form: sum_rho w_rho [e^(-2 th tau) gamma(mu tau, rho)
    + (mu/(2 th + mu))^rho (1 - gamma((2 th + mu) tau, rho))].
    """
    tau = _check_tau(tau)
    if not 0 <= k < ctx.config.K:
        raise IndexError(f"process index {k} out of range for K={ctx.config.K}")
    mu = ctx.config.mu
    th = ctx.theta[k]
    rho = ctx.plan.rho
    lap_rho = ctx.laplace_service[k] ** rho.astype(float)
    if tau == 0.0:
        return float(np.sum(ctx.plan.weights * lap_rho))
    g_mu, _ = _gamma_ladders(ctx, mu * tau)
    g_shift, _ = _gamma_ladders(ctx, (2.0 * th + mu) * tau)
    return float(
        np.sum(ctx.plan.weights * (np.exp(-2.0 * th * tau) * g_mu + lap_rho * (1.0 - g_shift)))
    )


def mean_epoch_service(ctx: AnalyticContext) -> float:
    """E[Ytot] = K / (mu (1 - eps)), by Wald's identity."""
    cfg = ctx.config
    return cfg.K / (cfg.mu * (1.0 - cfg.eps))


def mse_numerator_denominator(ctx: AnalyticContext, tau: float) -> tuple[float, float]:
    """Numerator and denominator of the long-term average sum MSE at threshold tau.

    denominator = mean epoch length  E[Gamma] = h_fn(tau) + E[Ytot]
    numerator   = sum_k s2_k/(2 th_k) (E[Gamma] - lap_k (1 - f_fn(tau, k)) / (2 th_k))
    """
    tau = _check_tau(tau)
    den = h_fn(ctx, tau) + mean_epoch_service(ctx)
    num = 0.0
    for k in range(ctx.config.K):
        th = ctx.theta[k]
        num += (
            ctx.sigma_sq[k]
            / (2.0 * th)
            * (den - ctx.laplace_service[k] * (1.0 - f_fn(ctx, tau, k)) / (2.0 * th))
        )
    return num, den


def dinkelbach_p(ctx: AnalyticContext, beta: float, tau: float) -> float:
    """Parameterized gap numerator - beta * denominator at (beta, tau).

    Affine and strictly decreasing in beta for fixed tau (slope is minus the
    mean epoch length); zero exactly at the optimal (beta*, tau*) pair.
    """
    num, den = mse_numerator_denominator(ctx, tau)
    return num - beta * den
