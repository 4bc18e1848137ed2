"""
Command-line entry point.

    evps sweep-k    --modes 4 --r 0.2 --k-min 0 --k-max 2 --step 0.02 --out fig.csv
    evps sweep-n    --n-values 4 8 12 16 --k-values 0 0.24 0.82
    evps sweep-loss --modes 4 --l-min 0 --l-max 0.95 --step 0.01
    evps sweep-r    --modes 2 --r-min 0.01 --r-max 0.5 --step 0.01
    evps logneg     --modes 2 --r 1e-3 --k 0 --subtract --splitting 1:2
    evps optima     --modes 4 --criterion max-gain
    evps validate   [--full]

Values resolve as flag > --config JSON file > Settings default. Exit codes:
0 success, 1 numerical failure, 2 usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .core.config import get_settings
from .core.errors import ConfigError, EvpsError, NumericalError, UsageError
from .core.logging import setup_logging
from .quantum.splittings import classify, parse_explicit, parse_splitting
from .schemas import GhzParams, SweepConfig, SweepResult
from .services.export import write_plot_script, write_result
from .services.optima import locate_optima, loss_thresholds
from .services.pipeline import evaluate_composite, evaluate_direct
from .services.sweeps import (
    ASYMPTOTE_K,
    DEFAULT_K_GRID,
    DEFAULT_LOSS_GRID,
    DEFAULT_R_GRID,
    run_sweep,
)
from .services.validation import run_validation

logger = logging.getLogger(__name__)

FAMILIES = {
    "sweep-k": "k_sweep",
    "sweep-n": "n_sweep",
    "sweep-loss": "loss_sweep",
    "sweep-r": "r_sweep",
}
DEFAULT_N_GRID = [4.0, 8.0, 12.0, 16.0]


# ============ Parser ============
def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--modes", type=int, help="Number of physical modes N.")
    parser.add_argument("--r", type=float, help="Total squeezing r = r1 + r2.")
    parser.add_argument("--k", type=float, help="Squeezing ratio k = r2/r1.")
    parser.add_argument("--splitting", action="append",
                        help="Splitting: canonical label, 'A+B:n|C:m|trace:p', "
                             "'trace:A+B:n|C:m|D:p' or '1,2:3,4'. Repeatable.")
    parser.add_argument("--loss", type=float, help="Uniform loss parameter l in [0, 1].")
    parser.add_argument("--cutoff", type=int, help="Starting Fock cutoff per mode.")
    parser.add_argument("--cutoff-ceiling", type=int, help="Largest cutoff tried.")
    parser.add_argument("--tap-reflectivity", type=float,
                        help="Weak-tap reflectivity multiplying the success weight.")
    parser.add_argument("--direct", action="store_true", default=None,
                        help="Use the full tensor over physical modes.")


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    _add_state_flags(parser)
    parser.add_argument("--step", type=float, help="Grid step.")
    parser.add_argument("--k-values", type=float, nargs="+", help="k series per grid point.")
    parser.add_argument("--max-traced", type=int, help="Traced modes allowed in all-canonical.")
    parser.add_argument("--jobs", type=int, help="Parallel worker processes.")
    parser.add_argument("--out", type=Path, help="Output CSV (JSON written alongside).")
    parser.add_argument("--config", type=Path, help="JSON file with SweepConfig fields.")
    parser.add_argument("--emit-plot-script", action="store_true",
                        help="Write <out>.plot.py next to the CSV.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evps",
        description="Entanglement enhancement via photon subtraction in CV GHZ states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR.")
    parser.add_argument("--log-format", choices=["json", "console"])
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("sweep-k", help="Gain against k.")
    _add_sweep_flags(k)
    k.add_argument("--k-min", type=float)
    k.add_argument("--k-max", type=float)
    k.add_argument("--asymptote", action="store_true",
                   help=f"Append k in {ASYMPTOTE_K} to the grid.")

    n = sub.add_parser("sweep-n", help="Gain against N.")
    _add_sweep_flags(n)
    n.add_argument("--n-values", type=int, nargs="+")

    loss = sub.add_parser("sweep-loss", help="Gain against loss.")
    _add_sweep_flags(loss)
    loss.add_argument("--l-min", type=float)
    loss.add_argument("--l-max", type=float)

    r = sub.add_parser("sweep-r", help="Log-negativity against r.")
    _add_sweep_flags(r)
    r.add_argument("--r-min", type=float)
    r.add_argument("--r-max", type=float)

    logneg = sub.add_parser("logneg", help="Log-negativity of one state.")
    _add_state_flags(logneg)
    logneg.add_argument("--subtract", action="store_true",
                        help="Report the value after photon subtraction.")

    optima = sub.add_parser("optima", help="Optimum k from a k sweep.")
    _add_sweep_flags(optima)
    optima.add_argument("--k-min", type=float)
    optima.add_argument("--k-max", type=float)
    optima.add_argument("--criterion", choices=["max-gain", "all-splittings-beat-k0"],
                        default="max-gain")
    optima.add_argument("--from", dest="source", type=Path,
                        help="Read a k sweep JSON instead of running one.")

    validate = sub.add_parser("validate", help="Run the oracle suite.")
    validate.add_argument("--full", action="store_true",
                          help="Include lossy full-tensor N=4 cases.")
    return parser


# ============ Config resolution ============
def _range(lo: Optional[float], hi: Optional[float], step: Optional[float],
           default: List[float]) -> Optional[List[float]]:
    if lo is None and hi is None and step is None:
        return None
    lo = default[0] if lo is None else lo
    hi = default[-1] if hi is None else hi
    step = (default[1] - default[0]) if step is None else step
    if step <= 0 or hi < lo:
        raise UsageError(f"empty grid from {lo} to {hi} with step {step}", parameter="step")
    count = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(count + 1)]


def _flag_grid(args: argparse.Namespace, family: str) -> Optional[List[float]]:
    step = getattr(args, "step", None)
    if family in ("k_sweep",):
        grid = _range(args.k_min, args.k_max, step, DEFAULT_K_GRID)
        if getattr(args, "asymptote", False):
            grid = (grid or list(DEFAULT_K_GRID)) + [k for k in ASYMPTOTE_K
                                                     if not grid or k > grid[-1]]
        return grid
    if family == "n_sweep":
        return [float(v) for v in args.n_values] if args.n_values else None
    if family == "loss_sweep":
        return _range(args.l_min, args.l_max, step, DEFAULT_LOSS_GRID)
    return _range(args.r_min, args.r_max, step, DEFAULT_R_GRID)


DEFAULT_GRIDS = {
    "k_sweep": DEFAULT_K_GRID,
    "n_sweep": DEFAULT_N_GRID,
    "loss_sweep": DEFAULT_LOSS_GRID,
    "r_sweep": DEFAULT_R_GRID,
}


def _load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}", parameter="config") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object", parameter="config")
    return data


def resolve_config(args: argparse.Namespace, family: str) -> SweepConfig:
    """Merge flags over the config file over Settings defaults."""
    settings = get_settings()
    data = _load_config_file(getattr(args, "config", None))
    data["family"] = family

    params = dict(data.get("params") or {})
    for flag, key in (("modes", "N"), ("r", "r"), ("k", "k")):
        value = getattr(args, flag, None)
        if value is not None:
            params[key] = value
    if family == "n_sweep" and "N" not in params:
        params["N"] = 4
    if "N" not in params:
        raise UsageError("the mode count is required (--modes or params.N)", parameter="modes")
    params.setdefault("r", settings.default_r)
    data["params"] = params

    overrides = {
        "splittings": args.splitting,
        "k_values": getattr(args, "k_values", None),
        "loss": args.loss,
        "cutoff": args.cutoff,
        "cutoff_ceiling": args.cutoff_ceiling,
        "max_traced": getattr(args, "max_traced", None),
        "tap_reflectivity": args.tap_reflectivity,
        "jobs": getattr(args, "jobs", None),
        "output": getattr(args, "out", None),
        "direct": args.direct,
        "grid": _flag_grid(args, family),
    }
    data.update({key: value for key, value in overrides.items() if value is not None})
    data.setdefault("grid", DEFAULT_GRIDS[family])
    data.setdefault("jobs", settings.jobs)
    data.setdefault("output", Path(settings.output_dir) / f"{family}.csv")
    return SweepConfig(**data)


# ============ Commands ============
def _cmd_sweep(args: argparse.Namespace, family: str) -> int:
    config = resolve_config(args, family)
    result = run_sweep(config)
    if config.output is not None:
        print(f"wrote {len(result.rows)} rows to {Path(config.output).with_suffix('.csv')}")
        if args.emit_plot_script:
            print(f"wrote {write_plot_script(result, config.output)}")
    if family == "loss_sweep":
        for threshold in loss_thresholds(result):
            value = "none" if threshold.threshold is None else f"{threshold.threshold:.4f}"
            print(f"threshold k={threshold.k:g} {threshold.splitting}: {value}")
    return 0


def _cmd_logneg(args: argparse.Namespace) -> int:
    settings = get_settings()
    if args.modes is None:
        raise UsageError("--modes is required", parameter="modes")
    if not args.splitting:
        raise UsageError("--splitting is required", parameter="splitting")
    params = GhzParams(N=args.modes, r=settings.default_r if args.r is None else args.r,
                       k=args.k or 0.0)
    loss = args.loss or 0.0
    for text in args.splitting:
        if args.direct and ":" in text and "|" not in text:
            target = parse_explicit(text, params.N)
            report = evaluate_direct(params, target, loss=loss, cutoff=args.cutoff,
                                     cutoff_ceiling=args.cutoff_ceiling,
                                     tap_reflectivity=args.tap_reflectivity)
        else:
            splitting = parse_splitting(text, params.N)
            evaluate = evaluate_direct if args.direct else evaluate_composite
            report = evaluate(params, splitting, loss=loss, cutoff=args.cutoff,
                              cutoff_ceiling=args.cutoff_ceiling,
                              tap_reflectivity=args.tap_reflectivity)
        value = report.e_after if args.subtract else report.e_before
        label = report.splitting.label
        if len(args.splitting) == 1:
            print(f"{value:.6f}")
        else:
            print(f"{label}\t{value:.6f}")
        logger.info(f"logneg {label}", extra={"extra_data": report.model_dump(mode="json")})
    return 0


def _cmd_optima(args: argparse.Namespace) -> int:
    if args.source is not None:
        document = _load_config_file(args.source)
        config = SweepConfig(**document["provenance"]["config"])
        result = SweepResult(config=config, rows=document["rows"],
                             provenance=document["provenance"])
    else:
        if args.out is None:
            args.out = Path(get_settings().output_dir) / "optima_k_sweep.csv"
        result = run_sweep(resolve_config(args, "k_sweep"))
    report = locate_optima(result, args.criterion)
    print(report.model_dump_json(indent=2))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cases = run_validation(full=args.full)
    for case in cases:
        observed = "n/a" if case.observed is None else f"{case.observed:.8f}"
        status = "PASS" if case.passed else "FAIL"
        print(f"{status}  {case.name}: observed {observed}, expected {case.expected:.8f} "
              f"(tol {case.tolerance:g}) {case.detail}".rstrip())
    failed = sum(1 for case in cases if not case.passed)
    print(f"{len(cases) - failed}/{len(cases)} cases passed")
    return 0 if failed == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_level=args.log_level,
                  json_format=None if args.log_format is None else args.log_format == "json")
    try:
        if args.command in FAMILIES:
            return _cmd_sweep(args, FAMILIES[args.command])
        if args.command == "logneg":
            return _cmd_logneg(args)
        if args.command == "optima":
            return _cmd_optima(args)
        return _cmd_validate(args)
    except (UsageError, ValidationError) as exc:
        print(f"evps: usage error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"evps: numerical failure: {exc}", file=sys.stderr)
        return 1
    except EvpsError as exc:
        print(f"evps: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
