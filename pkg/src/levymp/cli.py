"""Command dispatch, configuration and report emission.

One run = one command + one effective configuration, assembled from an
optional JSON/TOML config file with command-line flags taking precedence.
The effective configuration is echoed into the output directory next to the
reports, every emitted file is written atomically, and all floats carry 17
significant digits so reports re-parse bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import reports
from .closedform import exists_multiple
from .errors import LevyMPError
from .estimator import (
    INCONCLUSIVE,
    estimate_beta_threshold,
    intersection_scan,
    predicted_exponent,
    series_threshold_scan,
)
from .estimator.powerfit import check_fit_validity, fit_from_estimates, region_ladder
from .kernels import ANISOTROPIC, LOG_CORRECTED, KernelSpec, RegionSpec
from .pathsim import scaling_check, simulate_diagonal_stable
from .spectral import StabilityExponent, classify_exponent, diagonal_profile

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INCONCLUSIVE = 3

COMMANDS = (
    "analyze",
    "dim",
    "exists",
    "verify-prop31",
    "verify-prop42",
    "verify-threshold",
    "verify-intersection",
    "simulate",
    "scaling-check",
)


class ConfigError(LevyMPError, ValueError):
    """A configuration field is missing, duplicated or malformed."""


@dataclass
class RunConfig:
    """Effective settings of one run; flags win over the config file."""

    command: str
    matrix: list | None = None
    alphas: list | None = None
    scale_c: float = 2.0
    k: int = 2
    seed: int = 0
    samples: int = 100_000
    ladder: list = field(default_factory=list)
    direction: str = "diagonal"
    fixed: float = 3.0
    beta_grid: list | None = None
    tol: float = 0.05
    m_max: int = 16384
    spectral_tol: float = 1e-8
    T: float = 1.0
    n_steps: int = 1000
    n_paths: int = 10_000
    c: float | None = None
    out: str = "."
    strict: bool = False

    def echo_dict(self) -> dict:
        d = asdict(self)
        if d["alphas"] is not None:
            d["alphas"] = [str(a) for a in d["alphas"]]
        return d


def _parse_alpha_token(tok):
    tok = str(tok).strip()
    if "/" in tok:
        return Fraction(tok)
    return float(tok)


def parse_alphas(text) -> list:
    if isinstance(text, (list, tuple)):
        return [_parse_alpha_token(t) for t in text]
    return [_parse_alpha_token(t) for t in str(text).split(",") if t.strip()]


def parse_matrix(text) -> list:
    if isinstance(text, list):
        rows = text
    else:
        rows = json.loads(text)
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"matrix: expected a square array of arrays, got shape {arr.shape}")
    return [[float(v) for v in row] for row in arr]


def parse_float_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    return [float(t) for t in str(text).split(",") if t.strip()]


def load_config_file(path: str) -> dict:
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".toml"):
        try:
            import tomllib as toml
        except ImportError:
            import tomli as toml
        return toml.loads(raw.decode())
    try:
        return json.loads(raw.decode())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc


_FIELD_PARSERS = {
    "matrix": parse_matrix,
    "alphas": parse_alphas,
    "ladder": parse_float_list,
    "beta_grid": parse_float_list,
    "scale_c": float,
    "k": int,
    "seed": int,
    "samples": int,
    "direction": str,
    "fixed": float,
    "tol": float,
    "m_max": int,
    "spectral_tol": float,
    "T": float,
    "n_steps": int,
    "n_paths": int,
    "c": float,
    "out": str,
    "strict": bool,
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    layers = []
    if args.config:
        layers.append(load_config_file(args.config))
    cli_layer = {
        key: getattr(args, key)
        for key in _FIELD_PARSERS
        if getattr(args, key, None) is not None
    }
    layers.append(cli_layer)
    for layer in layers:
        for key, value in layer.items():
            if key == "command":
                continue
            if key not in _FIELD_PARSERS:
                raise ConfigError(f"unknown config field {key!r}")
            try:
                setattr(cfg, key, _FIELD_PARSERS[key](value))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"field {key!r}: {exc}") from exc
    return cfg


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _profile_and_exponent(cfg: RunConfig):
    """Resolve the process spec: exactly one of matrix / alphas."""
    _require(
        (cfg.matrix is None) != (cfg.alphas is None),
        "exactly one of 'matrix' and 'alphas' must be supplied",
    )
    if cfg.matrix is not None:
        exp = StabilityExponent(matrix=np.array(cfg.matrix), scale_c=cfg.scale_c)
        return classify_exponent(exp, tol=cfg.spectral_tol), exp
    alphas = cfg.alphas
    profile = diagonal_profile([float(a) for a in alphas])
    if all(isinstance(a, Fraction) for a in alphas):
        # Keep rational indices exact so boundary comparisons stay exact.
        profile = type(profile)(
            alphas=tuple(sorted(alphas, reverse=True)),
            real_parts=profile.real_parts,
            multiplicities=profile.multiplicities,
            case_label=profile.case_label,
            rotation_b=profile.rotation_b,
            nilpotent_block_sizes=profile.nilpotent_block_sizes,
        )
    mat = np.diag([1.0 / float(a) for a in alphas])
    exp = StabilityExponent(matrix=mat, scale_c=cfg.scale_c)
    return profile, exp


def _resolve_qr_ladder(cfg: RunConfig) -> list:
    _require(bool(cfg.ladder), "a --ladder of rung values is required")
    if cfg.direction == "diagonal":
        return [(v, v) for v in cfg.ladder]
    if cfg.direction == "q_axis":
        return [(v, cfg.fixed) for v in cfg.ladder]
    if cfg.direction == "r_axis":
        return [(cfg.fixed, v) for v in cfg.ladder]
    raise ConfigError(f"direction must be diagonal/q_axis/r_axis, got {cfg.direction!r}")


def _out_path(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out, name)


def _echo_config(cfg: RunConfig):
    reports.write_json(_out_path(cfg, "run_config.json"), cfg.echo_dict())


def _print_table(rows):
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key.ljust(width)}  {val}")


def _cmd_analyze(cfg: RunConfig) -> int:
    profile, _ = _profile_and_exponent(cfg)
    reports.write_json(_out_path(cfg, "analyze.json"), profile.to_dict())
    _print_table(
        [
            ("case", profile.case_label),
            ("alphas", ", ".join(f"{float(a):.6g}" for a in profile.alphas)),
            ("rotation_b", str(profile.rotation_b)),
            ("nilpotent_blocks", str(list(profile.nilpotent_block_sizes))),
        ]
    )
    return EXIT_OK


def _cmd_dim(cfg: RunConfig, name: str) -> int:
    profile, _ = _profile_and_exponent(cfg)
    report = exists_multiple(profile, cfg.k)
    reports.write_json(_out_path(cfg, f"{name}.json"), report.to_dict())
    dim_str = "n/a (existence only)" if report.dim_value is None else f"{float(report.dim_value):.12g}"
    _print_table(
        [
            ("k", str(report.k)),
            ("case", profile.case_label),
            ("exists", str(report.exists)),
            ("boundary_case", str(report.boundary_case)),
            ("dim_value", dim_str),
            ("source", report.source),
        ]
    )
    return EXIT_OK


def _emit_ladder_fit(cfg: RunConfig, name: str, kernel: KernelSpec, extra: dict) -> int:
    ladder = _resolve_qr_ladder(cfg)
    if len(ladder) < 5:
        raise ConfigError("ladder needs at least 5 rungs")
    check_fit_validity(kernel, cfg.k)
    estimates = region_ladder(kernel, cfg.k, ladder, cfg.samples, cfg.seed)
    fit = fit_from_estimates(kernel, cfg.k, estimates)
    rows = [
        (est.region.q, est.region.r, est.value, est.std_error, est.n_samples)
        for est in estimates
    ]
    reports.write_csv(
        _out_path(cfg, f"{name}.csv"), ("q", "r", "estimate", "std_error", "n"), rows
    )
    doc = {
        "fit": fit.to_dict(),
        "target_exponent": predicted_exponent(kernel, cfg.k),
        "k": cfg.k,
        **extra,
    }
    reports.write_json(_out_path(cfg, f"{name}.json"), doc)
    _print_table(
        [
            ("slope", f"{fit.slope:.6g}"),
            ("target", f"{doc['target_exponent']:.6g}"),
            ("r_squared", f"{fit.r_squared:.6g}"),
        ]
    )
    return EXIT_OK


def _cmd_verify_prop31(cfg: RunConfig) -> int:
    _require(cfg.alphas is not None and len(cfg.alphas) == 2, "needs --alphas a1,a2")
    a1, a2 = (float(a) for a in cfg.alphas)
    kernel = KernelSpec(variant=ANISOTROPIC, alphas=(a1, a2))
    return _emit_ladder_fit(cfg, "verify-prop31", kernel, {"alphas": [a1, a2]})


def _cmd_verify_prop42(cfg: RunConfig) -> int:
    _require(cfg.alphas is not None and len(cfg.alphas) in (1, 2), "needs --alphas a")
    alpha = float(cfg.alphas[0])
    kernel = KernelSpec(variant=LOG_CORRECTED, alphas=(alpha, alpha))
    return _emit_ladder_fit(cfg, "verify-prop42", kernel, {"alpha": alpha})


def _cmd_verify_threshold(cfg: RunConfig) -> int:
    _require(cfg.alphas is not None and len(cfg.alphas) == 2, "needs --alphas a1,a2")
    a1, a2 = (float(a) for a in cfg.alphas)
    est = estimate_beta_threshold(a1, a2, cfg.k, cfg.tol, m_max=cfg.m_max)
    if cfg.beta_grid:
        grid = [float(b) for b in cfg.beta_grid]
    else:
        grid = sorted(
            {round(min(max(est.value + off, 0.05), 2.0), 6) for off in (-0.3, -0.15, 0.0, 0.15, 0.3)}
        )
    scans = series_threshold_scan(a1, a2, cfg.k, grid, cfg.m_max)
    rows = []
    for beta, verdict in scans:
        for m, partial in verdict.ladder:
            rows.append((beta, int(m), partial))
    reports.write_csv(
        _out_path(cfg, "verify-threshold.csv"), ("beta", "M", "partial_sum"), rows
    )
    from .closedform import beta_threshold_R2

    closed = float(beta_threshold_R2(a1, a2, cfg.k))
    doc = {
        "threshold": est.to_dict(),
        "closed_form": closed,
        "scans": [
            {"beta": beta, "verdict": v.verdict, "tail_exponent": v.tail_exponent}
            for beta, v in scans
        ],
    }
    reports.write_json(_out_path(cfg, "verify-threshold.json"), doc)
    _print_table(
        [
            ("estimate", f"{est.value:.6g}"),
            ("bracket", f"[{est.low:.6g}, {est.high:.6g}]"),
            ("closed_form", f"{closed:.6g}"),
        ]
    )
    if cfg.strict and est.high - est.low > cfg.tol:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_verify_intersection(cfg: RunConfig) -> int:
    _require(cfg.alphas is not None, "needs --alphas (one value per coordinate)")
    alphas = tuple(float(a) for a in cfg.alphas)
    d = len(alphas)
    kernel = KernelSpec(variant=ANISOTROPIC, alphas=alphas)
    _require(bool(cfg.ladder), "needs --ladder of radii")
    verdict, std_errors = intersection_scan(
        kernel, cfg.k, d, cfg.ladder, cfg.samples, cfg.seed
    )
    rows = [
        (radius, partial, se, cfg.samples)
        for (radius, partial), se in zip(verdict.ladder, std_errors)
    ]
    reports.write_csv(
        _out_path(cfg, "verify-intersection.csv"),
        ("radius", "partial_value", "std_error", "n"),
        rows,
    )
    doc = {"verdict": verdict.to_dict(), "k": cfg.k, "d": d, "alphas": list(alphas)}
    reports.write_json(_out_path(cfg, "verify-intersection.json"), doc)
    _print_table(
        [
            ("verdict", verdict.verdict),
            ("tail_exponent", f"{verdict.tail_exponent:.6g}"),
        ]
    )
    if cfg.strict and verdict.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig) -> int:
    _require(cfg.alphas is not None, "needs --alphas")
    alphas = [float(a) for a in cfg.alphas]
    path = simulate_diagonal_stable(alphas, cfg.T, cfg.n_steps, cfg.seed)
    header = ("t",) + tuple(f"x{j + 1}" for j in range(path.dim))
    rows = [
        (float(t),) + tuple(float(v) for v in row)
        for t, row in zip(path.times, path.values)
    ]
    reports.write_csv(_out_path(cfg, "simulate.csv"), header, rows)
    print(f"wrote {len(rows)} grid points for d={path.dim}")
    return EXIT_OK


def _cmd_scaling_check(cfg: RunConfig) -> int:
    profile, exp = _profile_and_exponent(cfg)
    c = cfg.c if cfg.c is not None else exp.scale_c
    report = scaling_check(profile, exp, c, cfg.T, cfg.n_paths, cfg.seed)
    rows = [(t, j, s, p) for t, j, s, p in report.records]
    reports.write_csv(
        _out_path(cfg, "scaling-check.csv"),
        ("t", "coordinate", "ks_stat", "p_value"),
        rows,
    )
    reports.write_json(_out_path(cfg, "scaling-check.json"), report.to_dict())
    _print_table([("min_p_value", f"{report.min_p_value():.6g}")])
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    _echo_config(cfg)
    if cfg.command == "analyze":
        return _cmd_analyze(cfg)
    if cfg.command == "dim":
        return _cmd_dim(cfg, "dim")
    if cfg.command == "exists":
        return _cmd_dim(cfg, "exists")
    if cfg.command == "verify-prop31":
        return _cmd_verify_prop31(cfg)
    if cfg.command == "verify-prop42":
        return _cmd_verify_prop42(cfg)
    if cfg.command == "verify-threshold":
        return _cmd_verify_threshold(cfg)
    if cfg.command == "verify-intersection":
        return _cmd_verify_intersection(cfg)
    if cfg.command == "simulate":
        return _cmd_simulate(cfg)
    if cfg.command == "scaling-check":
        return _cmd_scaling_check(cfg)
    raise ConfigError(f"unknown command {cfg.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levymp",
        description="Multiple-point dimension/existence toolkit for operator semistable processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON or TOML config file; flags override it")
        p.add_argument("--matrix", help='exponent matrix as JSON rows, e.g. "[[0.75,0],[1,0.75]]"')
        p.add_argument("--alphas", help="comma list of indices; fractions like 4/3 stay exact")
        p.add_argument("--scale-c", dest="scale_c", type=float, help="semistable scale c > 1")
        p.add_argument("--k", type=int, help="multiplicity k >= 2 (or >= 1 for ladders)")
        p.add_argument("--seed", type=int, help="64-bit stream seed")
        p.add_argument("--samples", type=int, help="Monte Carlo samples per point")
        p.add_argument("--ladder", help="comma list of ladder rungs (q=r, axis values or radii)")
        p.add_argument("--direction", choices=("diagonal", "q_axis", "r_axis"))
        p.add_argument("--fixed", type=float, help="fixed coordinate for axis ladders")
        p.add_argument("--beta-grid", dest="beta_grid", help="comma list of betas to scan")
        p.add_argument("--tol", type=float, help="threshold bisection tolerance (>= 0.05)")
        p.add_argument("--m-max", dest="m_max", type=int, help="series truncation bound")
        p.add_argument("--spectral-tol", dest="spectral_tol", type=float, help="eigenvalue clustering tol")
        p.add_argument("--T", type=float, help="time horizon")
        p.add_argument("--n-steps", dest="n_steps", type=int, help="path grid steps")
        p.add_argument("--n-paths", dest="n_paths", type=int, help="marginal sample size")
        p.add_argument("--c", type=float, help="scaling factor to test (default: scale_c)")
        p.add_argument("--out", help="output directory (default '.')")
        p.add_argument("--strict", action="store_const", const=True, help="exit 3 on inconclusive verdicts")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return run(cfg)
    except LevyMPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
