"""Optimal threshold and minimum long-term average sum MSE.

The optimal waiting policy is ``w(z) = max(tau* - z, 0)`` where ``z`` is the
previous epoch's total service time. The threshold is the larger of two
candidates: the unconstrained branch ``g_inverse(beta*)`` and the constrained
branch ``h_inverse(c)`` with ``c`` the mean wait forced by the sampling
budget. ``beta*`` is the unique root of the Dinkelbach gap
``p(beta) = numerator(tau(beta)) - beta * denominator(tau(beta))`` with
``tau(beta) = max(g_inverse(beta), h_inverse(c))``, found by bracketed
bisection on ``beta``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, asdict

from . import functionals as fn
from .model import SystemConfig, ensure_valid

__all__ = [
    "SolverError",
    "SolverSettings",
    "OptimalPolicy",
    "constraint_level",
    "solve",
    "waiting",
    "policy_mse",
]

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Root bracketing or convergence failed (internal-consistency error)."""


@dataclass(frozen=True)
class SolverSettings:
    beta_tol: float = 1e-9    # |p| at the accepted root
    tau_tol: float = 1e-12    # inversion tolerance (informational; see functionals)
    series_tol: float = 1e-12 # truncation tail mass
    max_iter: int = 200

    def __post_init__(self):
        if min(self.beta_tol, self.tau_tol, self.series_tol) <= 0 or self.max_iter < 1:
            raise ValueError("solver settings must be positive with max_iter >= 1")


@dataclass(frozen=True)
class OptimalPolicy:
    """Solver output: threshold, optimum, both candidate branches, diagnostics."""

    tau_star: float
    beta_star: float
    tau_unconstrained: float
    tau_constrained: float
    binding: bool
    residual: float

    def to_dict(self) -> dict:
        return asdict(self)


def constraint_level(config: SystemConfig) -> float:
    """Mean wait the sampling budget forces per epoch: [K/f_max - K/mu]^+ / (1-eps).

    Zero exactly when f_max >= mu (the budget can never bind then).
    """
    ensure_valid(config)
    return max(config.K / config.f_max - config.K / config.mu, 0.0) / (1.0 - config.eps)


def waiting(z: float, tau: float) -> float:
    """Wait applied at an epoch start given the previous epoch's service total z."""
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return max(tau - z, 0.0)


def _tau_of_beta(ctx, beta: float, tau_c: float) -> float:
    return max(fn.g_inverse(ctx, beta), tau_c)


def solve(config: SystemConfig, settings: SolverSettings | None = None) -> OptimalPolicy:
    """Solve for the optimal threshold policy of a validated config.

    Raises :class:`SolverError` if the Dinkelbach gap does not change sign on
    the beta bracket (impossible for valid configs) or does not converge
    within ``settings.max_iter`` bisection steps.
    """
    settings = settings or SolverSettings()
    ensure_valid(config)
    ctx = fn.make_context(config, settings.series_tol)
    tau_c = fn.h_inverse(ctx, constraint_level(config))
    ceiling = fn.g_ceiling(ctx)

    def p_of(beta: float) -> tuple[float, float]:
        tau = _tau_of_beta(ctx, beta, tau_c)
        return fn.dinkelbach_p(ctx, beta, tau), tau

    lo, hi = 1e-12, ceiling - 1e-12
    p_lo, _ = p_of(lo)
    p_hi, _ = p_of(hi)
    if not (p_lo > 0.0 > p_hi):
        raise SolverError(
            f"no sign change on the beta bracket: p({lo})={p_lo}, p({hi})={p_hi}"
        )
    # Uniqueness of the root rests on beta -> p(beta, tau(beta)) decreasing;
    # spot-check rather than assume silently.
    p_mid, _ = p_of(0.5 * (lo + hi))
    if not (p_lo > p_mid > p_hi):
        logger.warning(
            "dinkelbach gap is not monotone on the spot-check grid "
            "(p_lo=%g, p_mid=%g, p_hi=%g); proceeding on the sign change",
            p_lo, p_mid, p_hi,
        )

    beta = tau = p_val = None
    for _ in range(settings.max_iter):
        beta = 0.5 * (lo + hi)
        p_val, tau = p_of(beta)
        if abs(p_val) < settings.beta_tol:
            break
        if p_val > 0.0:
            lo = beta
        else:
            hi = beta
    else:
        raise SolverError(
            f"no convergence in {settings.max_iter} iterations; "
            f"best iterate beta={beta}, tau={tau}, p={p_val}"
        )

    tau_u = fn.g_inverse(ctx, beta)
    return OptimalPolicy(
        tau_star=max(tau_u, tau_c),
        beta_star=beta,
        tau_unconstrained=tau_u,
        tau_constrained=tau_c,
        binding=tau_c > tau_u,
        residual=abs(p_val),
    )


def policy_mse(config: SystemConfig, tau: float, settings: SolverSettings | None = None) -> float:
    """Long-term average sum MSE achieved by threshold ``tau`` (not necessarily tau*)."""
    settings = settings or SolverSettings()
    ensure_valid(config)
    ctx = fn.make_context(config, settings.series_tol)
    num, den = fn.mse_numerator_denominator(ctx, tau)
    return num / den
