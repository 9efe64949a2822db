"""Command-line front end: ``stekloff <command> [flags]``.

Exit codes: 0 success, 1 I/O failure, 2 domain or validity error,
3 oracle disagreement, 4 model invariant violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import ball, radial
from .blockop.fixedpoint import default_window, fixed_point_eigensolve, tau_curves
from .blockop.model import load_model, make_model, with_omega
from .blockop.verify import verify_model
from .config import OUT_DIR_ENV, ConfigError, RunConfig, parse_dims, parse_seeds, parse_window, read_config
from .errors import AssumptionError, DomainError, ModelInvariantError, PoleError, StekloffError
from .serialize import to_csv, to_json

__all__ = ["main", "build_parser", "resolve_config", "EXIT_OK", "EXIT_IO", "EXIT_DOMAIN", "EXIT_DISAGREE",
           "EXIT_INVARIANT", "EXIT_USAGE"]

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_DISAGREE, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2, 3, 4, 64

BALL_HEADER = ("family", "degree", "omega", "lambda", "multiplicity", "residual")
TAU_HEADER = ("side", "branch", "lambda", "tau")
FIXED_HEADER = ("side", "branch", "lambda_star")
MODIFIED_HEADER = ("problem", "degree", "basis_size", "lambda")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stekloff", description="Electromagnetic Stekloff eigenvalue laboratory.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    specs = {
        "ball-spectrum": "analytic TE/TM spectrum of the unit ball",
        "model-verify": "check a synthetic block model against every reduction",
        "tau-curves": "sample tau-curves and their fixed points",
        "modified": "radial Galerkin spectra of the modified problems",
    }
    for name, help_ in specs.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help="key = value file; flags override it")
        s.add_argument("--omega", type=float)
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or .)")
        if name in ("ball-spectrum", "modified"):
            s.add_argument("--n-max", type=int, dest="n_max")
        if name == "ball-spectrum":
            s.add_argument("--convention", choices=("standard", "reversed"))
        if name == "model-verify":
            s.add_argument("--dims")
            s.add_argument("--seeds")
            s.add_argument("--jobs", type=int)
        if name in ("model-verify", "tau-curves"):
            s.add_argument("--model", help="golden, degenerate or a model JSON path")
        if name == "tau-curves":
            s.add_argument("--side", choices=("W1", "V"))
            s.add_argument("--window")
            s.add_argument("--grid", type=int)
            s.add_argument("--dims")
            s.add_argument("--seeds")
        if name == "modified":
            s.add_argument("--basis", type=int)
            s.add_argument("--problem", choices=("ScalarLB", "SProjection", "both"))
            s.add_argument("--mu", type=float)
    return p


def resolve_config(args) -> RunConfig:
    """Merge the config file (if any) with flags; flags win."""
    values = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
        if values.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {values['command']!r}, not {args.command!r}")
    converters = {"dims": parse_dims, "seeds": parse_seeds, "window": parse_window}
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = converters[key](val) if key in converters else val
    values["command"] = args.command
    return RunConfig(**values)


def _out_dir(cfg: RunConfig) -> str:
    d = cfg.out or os.environ.get(OUT_DIR_ENV) or "."
    os.makedirs(d, exist_ok=True)
    return d


def _write(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _fmt(cfg):
    return cfg.format or "csv"


def _table(cfg, header, rows):
    if _fmt(cfg) == "json":
        return to_json([dict(zip(header, r)) for r in rows])
    return to_csv(header, rows)


def cmd_ball_spectrum(cfg: RunConfig) -> int:
    omega = 1.0 if cfg.omega is None else cfg.omega
    poles = []
    for n in range(1, cfg.n_max + 1):
        for fn in (ball.te_eigenvalue, ball.tm_eigenvalue):
            try:
                fn(n, omega)
            except PoleError as exc:
                poles.append(f"{exc.family.value} n={exc.degree}")
    if poles:
        print(f"error: pole frequency omega={omega!r} for degrees: {', '.join(poles)}", file=sys.stderr)
        return EXIT_DOMAIN
    res = ball.ball_spectrum(omega, cfg.n_max, convention=cfg.convention)
    rows = [(r.mode.family.value, r.mode.degree, r.omega, r.eigenvalue, r.multiplicity, r.residual) for r in res]
    _write(os.path.join(_out_dir(cfg), f"ball_spectrum.{_fmt(cfg)}"), _table(cfg, BALL_HEADER, rows))
    return EXIT_OK


def _verify_one(job):
    """Worker: returns (label, exit_code, report_or_message)."""
    label, model_spec, dims, seed, omega = job
    try:
        if model_spec is not None:
            model = load_model(model_spec, omega)
        else:
            model = make_model(dims, seed=seed, omega=1.0 if omega is None else omega)
        report = verify_model(model)
    except ModelInvariantError as exc:
        return label, EXIT_INVARIANT, f"model invariant violated [{exc.invariant}]: {exc}"
    except (DomainError, AssumptionError, StekloffError) as exc:
        return label, EXIT_DOMAIN, str(exc)
    code = EXIT_DISAGREE if report["status"]["oracle_disagreement"] else EXIT_OK
    return label, code, report


def cmd_model_verify(cfg: RunConfig) -> int:
    if cfg.format == "csv":
        raise UsageError("model-verify writes JSON reports only; use --format json")
    if cfg.model is not None:
        name = os.path.splitext(os.path.basename(cfg.model))[0]
        jobs = [(name, cfg.model, None, None, cfg.omega)]
    else:
        jobs = [(f"seed{s}", None, cfg.dims, s, cfg.omega) for s in cfg.seeds]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_verify_one, jobs))
    else:
        results = [_verify_one(j) for j in jobs]
    out = _out_dir(cfg)
    codes = []
    for label, code, payload in results:
        codes.append(code)
        if isinstance(payload, str):
            print(f"error: {label}: {payload}", file=sys.stderr)
            continue
        _write(os.path.join(out, f"model_verify_{label}.json"), to_json(payload))
        fails = payload["status"]["audit_failures"]
        if fails:
            print(f"{label}: audit failures (exceptional frequency): {', '.join(fails)}")
        if code == EXIT_DISAGREE:
            print(f"error: {label}: oracle disagreement", file=sys.stderr)
    for c in (EXIT_INVARIANT, EXIT_DISAGREE, EXIT_DOMAIN):
        if c in codes:
            return c
    return EXIT_OK


def cmd_tau_curves(cfg: RunConfig) -> int:
    if cfg.model is not None:
        model = load_model(cfg.model, cfg.omega)
    else:
        model = make_model(cfg.dims, seed=cfg.seeds[0], omega=1.0 if cfg.omega is None else cfg.omega)
    window = default_window(model, cfg.side) if cfg.window is None else cfg.window
    fp = fixed_point_eigensolve(model, cfg.side, search_window=window, grid_points=cfg.grid)
    lo = window[0]
    if cfg.side == "V" and cfg.window is None:
        # V-side curves are real only where the frozen pencil is definite
        lo = 0.0
    grid = np.linspace(lo, window[1], cfg.grid)
    curves = tau_curves(model, cfg.side, grid)
    rows = [(cfg.side, c.branch, x, t) for c in curves for x, t in c.samples]
    fixed = sorted(((cfg.side, r.branch, r.eigenvalue) for r in fp.roots), key=lambda r: (r[2], r[1]))
    out = _out_dir(cfg)
    _write(os.path.join(out, f"tau_curves.{_fmt(cfg)}"), _table(cfg, TAU_HEADER, rows))
    _write(os.path.join(out, f"tau_fixed_points.{_fmt(cfg)}"), _table(cfg, FIXED_HEADER, fixed))
    return EXIT_OK


def _ladder(m):
    sizes, k = [], 4
    while k < m:
        sizes.append(k)
        k *= 2
    return sizes + [m]


def cmd_modified(cfg: RunConfig) -> int:
    omega = 1.0 if cfg.omega is None else cfg.omega
    problems = ("ScalarLB", "SProjection") if cfg.problem == "both" else (cfg.problem,)
    if "SProjection" in problems and cfg.mu != 1.0:
        raise DomainError("mu other than 1 is only supported for the ScalarLB problem")
    rows = []
    for prob in problems:
        for n in range(1, cfg.n_max + 1):
            for m in _ladder(cfg.basis):
                if prob == "ScalarLB":
                    res = radial.scalar_lb_solve(n, m, omega=omega, mu=cfg.mu)
                else:
                    res = radial.s_projection_solve(n, omega, m)
                rows.extend((prob, n, m, lam) for lam in res.eigenvalues)
    _write(os.path.join(_out_dir(cfg), f"modified.{_fmt(cfg)}"), _table(cfg, MODIFIED_HEADER, rows))
    return EXIT_OK


COMMAND_TABLE = {
    "ball-spectrum": cmd_ball_spectrum,
    "model-verify": cmd_model_verify,
    "tau-curves": cmd_tau_curves,
    "modified": cmd_modified,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMAND_TABLE))
        cfg = resolve_config(args)
        return COMMAND_TABLE[cfg.command](cfg)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except ModelInvariantError as exc:
        print(f"error: model invariant violated [{exc.invariant}]: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, AssumptionError, StekloffError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
