"""Command-line front end.

Subcommands::

    gswdenoise sweep    (CONFIG | --preset figure1 | --manifest FILE) -o results.csv
    gswdenoise rho      --lambda-min 2 --lambda-max 8 --step 0.5 [--field real] [--mc N]
    gswdenoise risk     --eta 0,0.05,10 --sigma 1 --lambda 4.09 [--field real]
    gswdenoise denoise  INPUT --sigma S --rule "gsw(4.09)" -o OUTPUT

Exit codes: 0 success, 2 usage or config error, 3 numerical failure.
Tables are CSV with 17 significant digits. The sweep thread count comes
from ``$GSWDENOISE_THREADS`` and never changes the numbers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .configfile import ConfigError, canonical_items, config_digest, load_config, parse_config
from .errors import DomainError, NumericalError, UnsupportedConfigurationError
from .risk import Regime, risk_curve
from .shrinkage import Field, ObservationVector, OracleMMSE, denoise, parse_rule
from .simkit import RandomStream, mc_rho_oracle, run_sweep
from .specfun import check_threshold, rho_gsw_complex, rho_gsw_real
from .vectorio import VectorFormatError, format_float, read_vector, write_vector

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

PRESETS = ("figure1",)

SWEEP_COLUMNS = ["sigma", "inv_sigma2_db", "rule", "mse_mean", "mse_stderr",
                 "trials", "analytic_oracle", "analytic_ls"]


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format_float(float(v))


def _write_table(rows, header, out, comments=()):
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _preset_text(name: str) -> str:
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("gswdenoise").joinpath("presets", f"{name}.cfg").read_text("utf-8")


def _manifest_path(output: str) -> Path:
    return Path(output + ".manifest.json")


# ---------------------------------------------------------------------------
# Subcommands

def cmd_sweep(args) -> int:
    overrides = {k: v for k, v in (("trials", args.trials), ("seed", args.seed),
                                   ("field", args.field)) if v is not None}
    if args.field:
        # switching field also switches the phase mode to that field's default
        overrides["phase_mode"] = "random_phase" if args.field == "complex" else "unit_real"
    sources = [s for s in (args.config, args.preset, args.manifest) if s]
    if len(sources) != 1:
        raise UsageError("give exactly one of CONFIG, --preset or --manifest")
    if args.preset:
        cfg = parse_config(_preset_text(args.preset), f"preset:{args.preset}", overrides)
    elif args.manifest:
        try:
            with open(args.manifest, encoding="utf-8") as fh:
                manifest = json.load(fh)
            text = "".join(f"{k} = {v}\n" for k, v in manifest["config"].items())
        except (OSError, ValueError, KeyError, AttributeError) as exc:
            raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
        cfg = parse_config(text, args.manifest, overrides)
    else:
        if not Path(args.config).is_file():
            raise UsageError(f"config file not found: {args.config}")
        cfg = load_config(args.config, overrides)

    started = time.time()
    result = run_sweep(cfg)
    elapsed = time.time() - started

    digest = config_digest(cfg)
    rows = ([r[c] for c in SWEEP_COLUMNS] for r in result.rows())
    comments = [f"gswdenoise {__version__} sweep", f"config_sha256={digest}"]
    _write_table(rows, SWEEP_COLUMNS, args.output, comments)

    if args.output not in (None, "-"):
        manifest = {
            "tool": "gswdenoise",
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "seed": cfg.seed,
            "wall_clock_seconds": elapsed,
            "config_sha256": digest,
            "config": dict(canonical_items(cfg)),
        }
        with open(_manifest_path(args.output), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _lambda_grid(lo: float, hi: float, step: float):
    if step <= 0:
        raise UsageError("--step must be positive")
    try:
        check_threshold(lo)
    except DomainError as exc:
        raise UsageError(f"--lambda-min: {exc}") from None
    if hi < lo:
        raise UsageError("--lambda-max must be >= --lambda-min")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def cmd_rho(args) -> int:
    field = Field.parse(args.field)
    rho = rho_gsw_complex if field is Field.COMPLEX else rho_gsw_real
    header = ["lambda", "rho"]
    if args.mc:
        header += ["rho_mc", "rho_mc_stderr"]
    rows = []
    for i, lam in enumerate(_lambda_grid(args.lambda_min, args.lambda_max, args.step)):
        row = [lam, rho(lam)]
        if args.mc:
            est, se = mc_rho_oracle(lam, field, args.mc, RandomStream(args.seed, i))
            row += [est, se]
        rows.append(row)
    _write_table(rows, header, args.output)
    return EXIT_OK


def _float_list(text: str):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    if not vals:
        raise UsageError("the grid is empty")
    return vals


def cmd_risk(args) -> int:
    try:
        check_threshold(args.lam)
    except DomainError as exc:
        raise UsageError(f"--lambda: {exc}") from None
    curve = risk_curve(_float_list(args.eta), args.sigma, args.lam, Field.parse(args.field))
    header = ["eta", "high_snr_mse", "low_snr_mse", "oracle_mmse", "ls_mse"]
    order = [Regime.HIGH_SNR, Regime.LOW_SNR, Regime.ORACLE, Regime.LS]
    rows = [[eta] + [vals[r] for r in order] for eta, vals in curve.rows()]
    _write_table(rows, header, args.output)
    return EXIT_OK


def cmd_denoise(args) -> int:
    try:
        values, field = read_vector(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    n = values.shape[0]
    default_lam = args.lam
    if default_lam is None and n > 1:
        default_lam = 1.1 * math.sqrt(2.0 * math.log(n))
    rule = parse_rule(args.rule, default_lam)
    truth = None
    if isinstance(rule, OracleMMSE):
        if not args.truth:
            raise UsageError("the oracle rule needs --truth")
        truth, truth_field = read_vector(args.truth)
        if truth_field is not field or truth.shape != values.shape:
            raise UsageError("--truth must match the input field and length")
    obs = ObservationVector.from_values(values, args.sigma, field)
    estimate = denoise(rule, obs, truth)
    write_vector(args.output, estimate, field)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gswdenoise", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep and write a CSV table")
    p.add_argument("config", nargs="?", help="key = value config file")
    p.add_argument("--preset", choices=PRESETS, help="use a bundled config")
    p.add_argument("--manifest", help="rerun from a manifest written by a previous sweep")
    p.add_argument("-o", "--output", default="-", help="CSV path (default: stdout)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--field", choices=["real", "complex"])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rho", help="tabulate the residual-variance constant")
    p.add_argument("--lambda-min", type=float, default=2.0)
    p.add_argument("--lambda-max", type=float, default=8.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--field", choices=["real", "complex"], default="complex")
    p.add_argument("--mc", type=int, metavar="SAMPLES", help="add a Monte Carlo column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("risk", help="tabulate analytical MSE predictions")
    p.add_argument("--eta", required=True, help="comma-separated |x|/sigma values")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--field", choices=["real", "complex"], default="complex")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("denoise", help="denoise a vector file")
    p.add_argument("input")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--rule", default="gsw", help='e.g. "gsw(4.09)", "sw", "st", "js", "ls"')
    p.add_argument("--lambda", dest="lam", type=float,
                   help="threshold for gsw/st without an argument (default 1.1*sqrt(2 ln N))")
    p.add_argument("--truth", help="clean signal file, for the oracle rule")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_denoise)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError, VectorFormatError, DomainError,
            UnsupportedConfigurationError) as exc:
        print(f"gswdenoise {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"gswdenoise {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
