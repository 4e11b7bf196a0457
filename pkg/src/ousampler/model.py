"""Problem instances and the elementary Ornstein-Uhlenbeck error quantities.

A system is K independent OU processes ``dX = -theta_k X dt + sigma_k dW``
watched through one sensor, one exp(mu) server and an erasure channel with
erasure probability eps, under a total sampling-frequency budget f_max.
Everything downstream (closed-form functionals, solver, simulator) consumes
the validated, immutable :class:`SystemConfig` plus the three little MSE
functions defined here.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "ConfigError",
    "SystemConfig",
    "OuState",
    "stationary_variance",
    "mse_instant",
    "mse_integral",
    "validate",
    "ensure_valid",
    "config_from_dict",
    "config_to_dict",
]


class ConfigError(ValueError):
    """A problem instance violates its invariants."""


@dataclass(frozen=True)
class SystemConfig:
    """Full problem instance.

    theta and sigma_sq are per-process vectors: theta_k is the mean-reversion
    rate (1/time) and sigma_sq_k the squared noise scale of process k, so the
    stationary variance of process k is sigma_sq_k / (2 theta_k).
    """

    K: int
    theta: tuple[float, ...]
    sigma_sq: tuple[float, ...]
    mu: float
    eps: float
    f_max: float

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(v) for v in np.atleast_1d(self.theta)))
        object.__setattr__(self, "sigma_sq", tuple(float(v) for v in np.atleast_1d(self.sigma_sq)))


@dataclass(frozen=True)
class OuState:
    """A process value at a point in time."""

    value: float
    time: float


def stationary_variance(theta_k: float, sigma_sq_k: float) -> float:
    """Stationary variance sigma^2 / (2 theta) of one OU process."""
    if theta_k <= 0:
        raise ValueError(f"theta must be positive, got {theta_k}")
    return sigma_sq_k / (2.0 * theta_k)


def mse_instant(theta_k: float, sigma_sq_k: float, delta):
    """Estimation MSE at age ``delta`` since the last received sample's timestamp.

    Equals ``sigma^2/(2 theta) * (1 - e^(-2 theta delta))``: zero for a fresh
    sample, saturating at the stationary variance. Accepts array ``delta``.
    """
    if theta_k <= 0:
        raise ValueError(f"theta must be positive, got {theta_k}")
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0):
        raise ValueError("age delta must be nonnegative")
    out = sigma_sq_k / (2.0 * theta_k) * (-np.expm1(-2.0 * theta_k * delta))
    return float(out) if out.ndim == 0 else out


def mse_integral(theta_k: float, sigma_sq_k: float, a, b, s):
    """Integral of the instantaneous MSE over [a, b] for a sample stamped at s.

    Closed form of ``int_a^b mse(t - s) dt`` for ``s <= a <= b``:

        sigma^2/(2 theta) * [ (b - a) - (e^(-2 theta (a-s)) - e^(-2 theta (b-s))) / (2 theta) ]

    The exponential difference is evaluated as ``-e^(-2 theta (a-s)) * expm1(-2 theta (b-a))``
    so nearby endpoints do not cancel. Broadcasts over array arguments.
    """
    if theta_k <= 0:
        raise ValueError(f"theta must be positive, got {theta_k}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s > a) or np.any(a > b):
        raise ValueError("need s <= a <= b")
    th2 = 2.0 * theta_k
    out = sigma_sq_k / th2 * ((b - a) + np.exp(-th2 * (a - s)) * np.expm1(-th2 * (b - a)) / th2)
    return float(out) if out.ndim == 0 else out


def validate(config: SystemConfig) -> list[str]:
    """All invariant violations of a config (empty list means valid)."""
    v: list[str] = []
    k = config.K
    if not float(k).is_integer() or k < 1:
        v.append(f"K must be a positive integer, got {k!r}")
        return v  # vector-length checks below would be meaningless
    if len(config.theta) != k:
        v.append(f"theta must have length K={k}, got {len(config.theta)}")
    if len(config.sigma_sq) != k:
        v.append(f"sigma_sq must have length K={k}, got {len(config.sigma_sq)}")
    for i, th in enumerate(config.theta):
        if not np.isfinite(th) or th <= 0:
            v.append(f"theta[{i}] must be a positive finite real, got {th}")
    for i, s2 in enumerate(config.sigma_sq):
        if not np.isfinite(s2) or s2 <= 0:
            v.append(f"sigma_sq[{i}] must be a positive finite real, got {s2}")
    if not np.isfinite(config.mu) or config.mu <= 0:
        v.append(f"mu must be a positive finite real, got {config.mu}")
    if not np.isfinite(config.f_max) or config.f_max <= 0:
        v.append(f"f_max must be a positive finite real, got {config.f_max}")
    if not 0.0 <= config.eps < 1.0:
        v.append(f"erasure probability must be in [0, 1), got {config.eps}")
    return v


def ensure_valid(config: SystemConfig) -> SystemConfig:
    violations = validate(config)
    if violations:
        raise ConfigError("; ".join(violations))
    return config


def config_to_dict(config: SystemConfig) -> dict:
    d = asdict(config)
    d["theta"] = list(d["theta"])
    d["sigma_sq"] = list(d["sigma_sq"])
    return d


def config_from_dict(doc: dict) -> SystemConfig:
    """Build a config from the JSON document schema (exact keys, no extras)."""
    required = {"K", "theta", "sigma_sq", "mu", "eps", "f_max"}
    missing = required - doc.keys()
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    extra = doc.keys() - required - {"solver"}
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    try:
        if not float(doc["K"]).is_integer():
            raise ConfigError(f"K must be an integer, got {doc['K']!r}")
        cfg = SystemConfig(
            K=int(doc["K"]),
            theta=tuple(float(v) for v in doc["theta"]),
            sigma_sq=tuple(float(v) for v in doc["sigma_sq"]),
            mu=float(doc["mu"]),
            eps=float(doc["eps"]),
            f_max=float(doc["f_max"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc
    return ensure_valid(cfg)
