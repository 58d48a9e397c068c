"""Command line entry point: one subcommand per verification suite, plus ``all``.

Exit status: 0 all contracts pass, 1 a contract failed, 2 usage error,
3 config file could not be parsed, 4 output directory not writable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import arith
from .suites import DEFAULT_TOLERANCES, SUITES, SuiteResult, coefficient_table, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG, EXIT_OUTPUT = 0, 1, 2, 3, 4

LIST_KEYS = {"t_list", "q_list", "X_list", "M_list"}
INT_KEYS = {"n_max", "euler_n_max", "euler_P", "certificates", "hecke_limit", "ramanujan_q", "ramanujan_m",
            "seed", "workers"}
FLOAT_KEYS = {"osc_t"}
STR_KEYS = {"out", "g_form", "smoothing"}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> tuple[dict, dict]:
    """Flat ``key = value`` lines; ``#`` starts a comment; ``tol.NAME = x`` sets a tolerance."""
    cfg, tol = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key.startswith("tol."):
                name = key[4:]
                if name not in DEFAULT_TOLERANCES:
                    raise ConfigError(f"line {lineno}: unknown tolerance {name!r}")
                tol[name] = float(value)
            elif key in LIST_KEYS:
                cfg[key] = [float(v) for v in value.split(",") if v.strip()]
            elif key in INT_KEYS:
                cfg[key] = int(value)
            elif key in FLOAT_KEYS:
                cfg[key] = float(value)
            elif key in STR_KEYS:
                cfg[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return cfg, tol


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(path: Path, rows: list[dict]) -> None:
    columns: list[str] = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in columns])


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n")


def write_artifacts(out: Path, result: SuiteResult, cfg: dict) -> None:
    stem = result.name.replace("-", "_")
    write_rows(out / f"{stem}.csv", result.rows)
    if result.name == "coeffs":
        arith.write_coefficients_csv(coefficient_table(int(cfg.get("n_max", 100_000))), out / "coefficients.csv")
    if result.name == "lvalue":
        write_json(out / "lvalue.json", result.summary["values"])
    if result.name == "exponent-scan":
        rows = [{"t": r["t"], "sup_ratio": r["value"], "abs_L": r["abs_L"]} for r in result.rows if r["case"] == "sup_ratio"]
        write_rows(out / "exponent_scan_table.csv", rows)
        with (out / "exponent_scan_table.csv").open("a") as fh:
            fh.write(f"# fit: slope={result.summary['slope']!r} intercept={result.summary['intercept']!r}\n")
        # wall-clock data lives apart from the deterministic artifacts
        write_rows(out / "exponent_scan_timing.csv", result.summary["timing"])


def _common_options(suppress: bool) -> argparse.ArgumentParser:
    # on subcommands the defaults are suppressed so options given before the
    # subcommand name are not reset
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS if suppress else None)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--out", type=Path, help="output directory (default: results)")
    common.add_argument("--workers", type=int, help="worker threads for per-case sweeps")
    common.add_argument("--seed", type=int, help="seed for randomized property suites")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--t", dest="t_list", type=float, action="append", help="t value (repeatable)")
    common.add_argument("--n-max", dest="n_max", type=int, help="coefficient table size")
    common.add_argument("--form", dest="g_form", choices=["delta", "divisor"], help="second form for lvalue")
    common.add_argument("--smoothing", choices=["contour", "dyadic"], help="primary AFE smoothing for lvalue")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subconvex", description="Verification suites for the delta-method "
                                     "subconvexity argument.", parents=[_common_options(False)])
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    for name in list(SUITES) + ["all"]:
        sub.add_parser(name, parents=[_common_options(True)], help=f"run the {name} suite" if name != "all" else "run every suite")
    return parser


def _merge(args: argparse.Namespace, parser: argparse.ArgumentParser) -> tuple[dict, dict, Path, int, int]:
    cfg, tol = {}, {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg, tol = parse_config(text)
    # flags win over the config file
    for key in ("t_list", "n_max", "g_form", "smoothing"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep or name not in DEFAULT_TOLERANCES:
            parser.error(f"--tol expects NAME=VALUE with NAME in {sorted(DEFAULT_TOLERANCES)}")
        try:
            tol[name] = float(value)
        except ValueError:
            parser.error(f"--tol {name}: {value!r} is not a number")
    out = args.out if args.out is not None else Path(cfg.get("out", "results"))
    workers = args.workers if args.workers is not None else int(cfg.get("workers", 1))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    if workers < 1:
        parser.error("--workers must be >= 1")
    return cfg, tol, out, workers, seed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg, tol, out, workers, seed = _merge(args, parser)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"output directory not writable: {exc}", file=sys.stderr)
        return EXIT_OUTPUT

    names = list(SUITES) if args.command == "all" else [args.command]
    records = []
    for name in names:
        result = run_suite(name, cfg, tol, workers=workers, seed=seed)
        write_artifacts(out, result, cfg)
        records.append(result.record())
        status = "PASS" if result.ok else "FAIL"
        print(f"{name:16s} {status}  cases={len(result.rows)} failures={result.failures} "
              f"max_gap={result.max_gap:.3e} wall_ms={result.wall_ms}")
    write_json(out / "summary.json", records if args.command == "all" else records[0])
    return EXIT_OK if all(r["failures"] == 0 and r["cases"] > 0 for r in records) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
