"""Command-line front end: solve, simulate, sweep, verify.

Config files are JSON documents with exactly the keys
``{"K", "theta", "sigma_sq", "mu", "eps", "f_max"}`` plus an optional
``"solver"`` object ``{"beta_tol", "tau_tol", "series_tol", "max_iter"}``.
Sweep specs hold a ``base`` config, a ``parameter`` (one of ``eps``, ``K``,
``theta_k``, ``f_max``; ``theta_k`` takes a 1-based ``index``) and a strictly
monotone ``values`` list.

Single results are JSON with an embedded run manifest; sweeps are CSV with a
``<out>.manifest.json`` sidecar. Exit codes: 0 success, 2 config error,
3 solver failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, asdict, replace
from datetime import datetime, timezone

from . import __version__
from .model import ConfigError, SystemConfig, config_from_dict, config_to_dict
from .oracles import run_battery
from .simulator import WaitMode, estimate_sampling_freq, run, write_trace
from .solver import OptimalPolicy, SolverError, SolverSettings, solve

__all__ = ["RunManifest", "SweepSpec", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

_SWEEP_HEADER = ["parameter_value", "tau_star", "beta_star",
                 "tau_unconstrained", "tau_constrained", "binding"]


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written alongside every command's output."""

    config_hash: str
    solver: dict
    seeds: list[int]
    tool_version: str
    timestamp: str

    def to_dict(self) -> dict:
        return asdict(self)


def _make_manifest(doc: dict, settings: SolverSettings, seeds: list[int]) -> RunManifest:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return RunManifest(
        config_hash=hashlib.sha256(canonical.encode()).hexdigest(),
        solver=asdict(settings),
        seeds=seeds,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter family of configs for figure reproduction."""

    base: SystemConfig
    parameter: str
    values: tuple[float, ...]
    index: int | None = None  # 1-based process index, theta_k only

    def config_at(self, value) -> SystemConfig:
        if self.parameter == "eps":
            return replace(self.base, eps=float(value))
        if self.parameter == "f_max":
            return replace(self.base, f_max=float(value))
        if self.parameter == "theta_k":
            theta = list(self.base.theta)
            theta[self.index - 1] = float(value)
            return replace(self.base, theta=tuple(theta))
        k = int(value)
        return replace(self.base, K=k,
                       theta=(self.base.theta[0],) * k,
                       sigma_sq=(self.base.sigma_sq[0],) * k)


def parse_sweep_spec(doc: dict) -> SweepSpec:
    for key in ("base", "parameter", "values"):
        if key not in doc:
            raise ConfigError(f"sweep spec is missing key {key!r}")
    base = config_from_dict(doc["base"])
    parameter = doc["parameter"]
    if parameter not in ("eps", "K", "theta_k", "f_max"):
        raise ConfigError(f"unknown sweep parameter {parameter!r}")
    values = tuple(doc["values"])
    if not values:
        raise ConfigError("sweep values must be nonempty")
    diffs = [b - a for a, b in zip(values, values[1:])]
    if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)) and len(values) > 1:
        raise ConfigError("sweep values must be strictly monotone")
    index = doc.get("index")
    if parameter == "theta_k":
        if index is None or not 1 <= int(index) <= base.K:
            raise ConfigError("theta_k sweeps need a 1-based 'index' in [1, K]")
        index = int(index)
    if parameter == "K":
        if any(not float(v).is_integer() or v < 1 for v in values):
            raise ConfigError("K sweep values must be positive integers")
        if len(set(base.theta)) != 1 or len(set(base.sigma_sq)) != 1:
            raise ConfigError("K sweeps need a symmetric base config "
                              "(all theta equal, all sigma_sq equal)")
    spec = SweepSpec(base=base, parameter=parameter, values=values, index=index)
    for v in values:  # substitution must keep the config valid
        config_from_dict(config_to_dict(spec.config_at(v)))
    return spec


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _load_config(path: str) -> tuple[SystemConfig, SolverSettings, dict]:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    config = config_from_dict(doc)
    return config, _settings_from(doc, path), doc


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out is None:
        print(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def cmd_solve(args) -> int:
    config, settings, doc = _load_config(args.config)
    policy = solve(config, settings)
    out = policy.to_dict()
    out["manifest"] = _make_manifest(doc, settings, []).to_dict()
    _emit(out, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config, settings, doc = _load_config(args.config)
    if args.epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {args.epochs}")
    policy: OptimalPolicy = solve(config, settings)
    tau = policy.tau_star if args.tau is None else args.tau
    if tau < 0:
        raise ConfigError(f"tau must be nonnegative, got {tau}")
    stats = run(config, tau, args.epochs, seed=args.seed, mode=WaitMode(args.mode),
                track_paths=args.track_paths, collect_records=args.trace is not None)
    if args.trace is not None:
        write_trace(stats, args.trace)
    out = stats.to_dict()
    out["tau"] = tau
    out["beta_star"] = policy.beta_star
    out["z_score"] = (stats.sum_mse - policy.beta_star) / stats.sum_mse_stderr
    out["sampling_freq_check"] = estimate_sampling_freq(stats)
    out["manifest"] = _make_manifest(doc, settings, [args.seed]).to_dict()
    _emit(out, args.out)
    return EXIT_OK


def _settings_from(doc: dict, path: str) -> SolverSettings:
    solver_doc = doc.get("solver", {})
    unknown = solver_doc.keys() - {"beta_tol", "tau_tol", "series_tol", "max_iter"}
    if unknown:
        raise ConfigError(f"{path}: unknown solver keys {sorted(unknown)}")
    try:
        return SolverSettings(**solver_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad solver settings: {exc}") from exc


def cmd_sweep(args) -> int:
    doc = _load_json(args.spec)
    spec = parse_sweep_spec(doc)
    settings = _settings_from(doc, args.spec)
    rows = []
    for v in spec.values:  # solves are independent; rows stay in input order
        policy = solve(spec.config_at(v), settings)
        rows.append([f"{float(v):.12g}", f"{policy.tau_star:.12g}",
                     f"{policy.beta_star:.12g}", f"{policy.tau_unconstrained:.12g}",
                     f"{policy.tau_constrained:.12g}",
                     "true" if policy.binding else "false"])
    with open(args.out_csv, "w", newline="") as fh:
        fh.write(",".join(_SWEEP_HEADER) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    manifest = _make_manifest(doc, settings, []).to_dict()
    with open(args.out_csv + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    config, settings, doc = _load_config(args.config)
    if args.draws < 1:
        raise ConfigError(f"draws must be >= 1, got {args.draws}")
    if args.draws < 10_000:
        print(f"warning: {args.draws} draws has low power; "
              "z-scores will be noisy", file=sys.stderr)
    checks = run_battery(config, args.draws, args.seed)
    for check in checks:
        print(check.describe())
    n_fail = sum(not c.ok for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    manifest = _make_manifest(doc, settings, [args.seed]).to_dict()
    print("manifest: " + json.dumps(manifest))
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ousampler",
        description="Optimal threshold sampling of Ornstein-Uhlenbeck processes "
                    "over an erasure channel: solver, simulator, sweeps, oracles.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="optimal threshold and minimum sum MSE")
    s.add_argument("config")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("simulate", help="exact-distribution Monte Carlo of the policy")
    s.add_argument("config")
    s.add_argument("--tau", type=float, default=None,
                   help="threshold (default: the solver's tau*)")
    s.add_argument("--epochs", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=[m.value for m in WaitMode], default="grouped")
    s.add_argument("--track-paths", action="store_true",
                   help="also simulate OU paths for estimator verification")
    s.add_argument("--trace", help="write a per-epoch CSV trace here")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("sweep", help="solve along a parameter grid, emit CSV")
    s.add_argument("spec")
    s.add_argument("out_csv")
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("verify", help="Monte Carlo oracle battery")
    s.add_argument("config")
    s.add_argument("--draws", type=int, default=10_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
