"""Command-line entry point.

    leemodel sigma        --config run.json [--out sigma.csv]
    leemodel boundstate   --config run.json [--out report.json]
    leemodel verify      [--config run.json] [--out report.json] [--tol 1e-8]
    leemodel limit-study  --config run.json [--out study.csv]

Exit status: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import NonPositiveU0, NumericalError, ParameterError
from .model import Gaussian, Local, MassSpectrum, SharpCutoff, make_params
from .renorm import (PhysicalParams, bare_internal_energy, contact_lambda, physical_from_bare,
                     renormalized_coupling_sq, solve_bound_state)
from .scattering import bracket, sweep
from .verify import limit_study_rows, limit_convergence_study, run_suite

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

SIGMA_HEADER = ["k", "dsigma_dphi", "sigma", "delta0", "re_bracket", "im_bracket"]
LIMIT_HEADER = ["g0_sq", "sigma", "abs_diff"]


class ConfigError(ParameterError):
    pass


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BareSpec:
    U0: float
    g0: float
    form_factor: Union[Local, SharpCutoff, Gaussian]


@dataclass(frozen=True)
class PhysicalSpec:
    E0: float
    g0_sq: float          # math.inf for the delta limit


@dataclass(frozen=True)
class SweepSpec:
    k_min: float
    k_max: float
    n_points: int
    spacing: str = "log"

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.k_min, self.k_max, self.n_points)
        return np.linspace(self.k_min, self.k_max, self.n_points)


@dataclass(frozen=True)
class LimitSpec:
    k: float
    g0_sq_grid: tuple


@dataclass(frozen=True)
class SweepConfig:
    M: float
    m: float
    parameterization: Union[BareSpec, PhysicalSpec]
    sweep: Optional[SweepSpec] = None
    limit_study: Optional[LimitSpec] = None
    csv_path: Optional[str] = None
    report_path: Optional[str] = None


def _num(d: dict, key: str, where: str) -> float:
    if key not in d:
        raise ConfigError(f"missing field '{key}' in {where}")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"field '{key}' in {where} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"field '{key}' in {where} must be finite")
    return float(v)


def _section(d: dict, key: str) -> dict:
    if key not in d:
        raise ConfigError(f"missing section '{key}'")
    if not isinstance(d[key], dict):
        raise ConfigError(f"section '{key}' must be an object")
    return d[key]


def _form_factor(d: dict):
    kind = d.get("type")
    if kind == "local":
        return Local()
    if kind in ("sharp_cutoff", "gaussian"):
        lam = _num(d, "lambda", "form_factor")
        return SharpCutoff(lam) if kind == "sharp_cutoff" else Gaussian(lam)
    raise ConfigError(f"form_factor.type must be local, sharp_cutoff or gaussian, got {kind!r}")


def parse_config(raw: dict) -> SweepConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    masses = _section(raw, "masses")
    M, m = _num(masses, "M", "masses"), _num(masses, "m", "masses")
    MassSpectrum(M, m)

    p = _section(raw, "parameterization")
    kind = p.get("type")
    if kind == "bare":
        ff = _form_factor(_section(p, "form_factor"))
        spec = BareSpec(_num(p, "U0", "parameterization"), _num(p, "g0", "parameterization"), ff)
        make_params(M, m, spec.U0, spec.g0, ff)
    elif kind == "physical":
        E0 = _num(p, "E0", "parameterization")
        g = p.get("g0_sq")
        if g == "infinity":
            g0_sq = math.inf
        else:
            g0_sq = _num(p, "g0_sq", "parameterization")
        spec = PhysicalSpec(E0, g0_sq)
        PhysicalParams(E0, M * m / (M + m), g0_sq)
    else:
        raise ConfigError(f"parameterization.type must be 'bare' or 'physical', got {kind!r}")

    sw = None
    if "sweep" in raw:
        s = _section(raw, "sweep")
        n = s.get("n_points")
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError("sweep.n_points must be an integer")
        sw = SweepSpec(_num(s, "k_min", "sweep"), _num(s, "k_max", "sweep"), n, s.get("spacing", "log"))
        if not (sw.k_min > 0 and sw.k_max > sw.k_min and sw.n_points >= 2):
            raise ConfigError("sweep needs 0 < k_min < k_max and n_points >= 2")
        if sw.spacing not in ("log", "linear"):
            raise ConfigError(f"sweep.spacing must be log or linear, got {sw.spacing!r}")

    ls = None
    if "limit_study" in raw:
        s = _section(raw, "limit_study")
        k = _num(s, "k", "limit_study")
        if not k > 0:
            raise ConfigError("limit_study.k must be positive")
        grid = s.get("g0_sq_grid")
        if grid is None:
            lo, hi = _num(s, "g0_sq_min", "limit_study"), _num(s, "g0_sq_max", "limit_study")
            n = s.get("n_points", 41)
            if not (lo > 0 and hi > 0 and isinstance(n, int) and n >= 1):
                raise ConfigError("limit_study range needs positive bounds and integer n_points")
            grid = list(np.geomspace(lo, hi, n))
        if not isinstance(grid, list) or not all(
                isinstance(g, (int, float)) and not isinstance(g, bool) for g in grid):
            raise ConfigError("limit_study.g0_sq_grid must be a list of numbers")
        ls = LimitSpec(k, tuple(float(g) for g in grid))

    out = raw.get("outputs", {})
    if not isinstance(out, dict):
        raise ConfigError("section 'outputs' must be an object")
    return SweepConfig(M, m, spec, sw, ls, out.get("csv_path"), out.get("report_path"))


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(raw)


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "infinity" if v > 0 else ("-infinity" if v < 0 else "nan")
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def _write_json(path: str, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")


def _mu(cfg: SweepConfig) -> float:
    return MassSpectrum(cfg.M, cfg.m).mu


def _physical(cfg: SweepConfig) -> tuple[PhysicalParams, dict]:
    """Physical parameters, solving the bound state first for bare input."""
    spec = cfg.parameterization
    if isinstance(spec, PhysicalSpec):
        phys = PhysicalParams(spec.E0, _mu(cfg), spec.g0_sq)
        return phys, {"source": "physical"}
    if isinstance(spec.form_factor, Local):
        raise ConfigError("bare parameterization needs a regulated form factor (sharp_cutoff or gaussian)")
    params = make_params(cfg.M, cfg.m, spec.U0, spec.g0, spec.form_factor)
    phys = physical_from_bare(params)
    return phys, {"source": "bare", "U0": spec.U0, "g0": spec.g0}


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_sigma(cfg: SweepConfig, out: Optional[str]) -> int:
    if cfg.sweep is None:
        raise ConfigError("sigma needs a 'sweep' section")
    csv_path = out or cfg.csv_path
    if not csv_path:
        raise ConfigError("no CSV path: set outputs.csv_path or pass --out")
    phys, info = _physical(cfg)
    points = sweep(phys, cfg.sweep.grid())
    rows = []
    for pt in points:
        B = bracket(phys, pt.k)
        rows.append((pt.k, pt.dsigma_dphi, pt.sigma, pt.delta0, B.real, B.imag))
    _write_csv(csv_path, SIGMA_HEADER, rows)
    if cfg.report_path:
        _write_json(cfg.report_path, {"command": "sigma", "E0": phys.E0, "mu": phys.mu,
                                      "g0_sq": phys.g0_sq, "g_sq": phys.g_sq,
                                      "n_points": len(rows), **info})
    print(f"wrote {len(rows)} rows to {csv_path} (E0 = {_fmt(phys.E0)})")
    return EXIT_OK


def cmd_boundstate(cfg: SweepConfig, out: Optional[str]) -> int:
    spec = cfg.parameterization
    if not isinstance(spec, BareSpec):
        raise ConfigError("boundstate needs a bare parameterization")
    if isinstance(spec.form_factor, Local):
        raise ConfigError("boundstate needs a regulated form factor (sharp_cutoff or gaussian)")
    params = make_params(cfg.M, cfg.m, spec.U0, spec.g0, spec.form_factor)
    E0 = solve_bound_state(params)
    U0_back = bare_internal_energy(E0, params)
    report = {
        "E0": E0,
        "mu": params.mu,
        "U0": params.U0,
        "U0_round_trip_residual": abs(U0_back - params.U0),
        "g0_sq": params.g0_sq,
        "g_sq": renormalized_coupling_sq(params.g0_sq, params.mu, E0),
    }
    try:
        report["lambda"] = contact_lambda(params)
    except NonPositiveU0:
        report["lambda_note"] = "omitted: contact coupling g0^2/U0 requires U0 > 0"
    for key, val in report.items():
        print(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    path = out or cfg.report_path
    if path:
        _write_json(path, {"command": "boundstate", **report})
    return EXIT_OK


def cmd_verify(cfg: Optional[SweepConfig], out: Optional[str], tol: Optional[float]) -> int:
    kwargs = {}
    if cfg is not None:
        kwargs["mu"] = _mu(cfg)
        spec = cfg.parameterization
        if isinstance(spec, PhysicalSpec):
            kwargs["E0"], kwargs["g0_sq"] = spec.E0, spec.g0_sq
        elif not isinstance(spec.form_factor, Local):
            if isinstance(spec.form_factor, SharpCutoff):
                kwargs["sharp_cutoff"] = spec.form_factor.cutoff
            else:
                kwargs["gaussian_cutoff"] = spec.form_factor.cutoff
    reports = run_suite(tol=tol, **kwargs)
    n_failed = sum(not r.passed for r in reports)
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.target}  err={r.rel_error:.3e}  tol={r.tolerance:.1e}")
    print(f"{len(reports) - n_failed}/{len(reports)} checks passed")
    path = out or (cfg.report_path if cfg is not None else None)
    if path:
        _write_json(path, {"command": "verify", "passed": n_failed == 0, "n_checks": len(reports),
                           "n_failed": n_failed, "checks": [r.as_dict() for r in reports]})
    return EXIT_OK if n_failed == 0 else EXIT_VERIFY_FAILED


def cmd_limit_study(cfg: SweepConfig, out: Optional[str]) -> int:
    spec = cfg.parameterization
    if not isinstance(spec, PhysicalSpec):
        raise ConfigError("limit-study needs a physical parameterization")
    if cfg.limit_study is None:
        raise ConfigError("limit-study needs a 'limit_study' section")
    csv_path = out or cfg.csv_path
    if not csv_path:
        raise ConfigError("no CSV path: set outputs.csv_path or pass --out")
    mu, k = _mu(cfg), cfg.limit_study.k
    grid = cfg.limit_study.g0_sq_grid
    rows, sigma_inf = limit_study_rows(k, mu, spec.E0, grid)
    slope = limit_convergence_study(k, mu, spec.E0, grid)
    _write_csv(csv_path, LIMIT_HEADER, rows)
    print(f"slope = {_fmt(slope)}")
    if cfg.report_path:
        _write_json(cfg.report_path, {"command": "limit-study", "k": k, "mu": mu, "E0": spec.E0,
                                      "log_ratio": math.log(k * k / (2 * mu * spec.E0)),
                                      "sigma_delta_limit": sigma_inf, "slope": slope,
                                      "n_points": len(rows)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (overrides the config)")
    common.add_argument("--tol", type=float, help="override every verification tolerance")

    parser = argparse.ArgumentParser(prog="leemodel",
                                     description="Scattering observables of the Galilean Lee model.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("sigma", True), ("boundstate", True),
                               ("verify", False), ("limit-study", True)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=needs_config, help="JSON configuration file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else None
        if args.command == "sigma":
            return cmd_sigma(cfg, args.out)
        if args.command == "boundstate":
            return cmd_boundstate(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.tol)
        return cmd_limit_study(cfg, args.out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
