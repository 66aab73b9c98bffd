"""Command-line front end.

Verbs: thermo, ratio, simulate, analyze, roundtrip, limit-sweep.

Exit codes: 0 success (including estimates flagged invalid), 1 invalid
configuration or input file, 2 I/O failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, workflows
from .config import ConfigError, load_config
from .estimator import thresholds_for_levels
from .fermi2d import OracleError
from .fileio import SchemaError, dump_json, read_trace, write_events, write_table, write_trace

log = logging.getLogger("rtsthermo")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, default_format: str):
    p.add_argument("--config", type=Path, help="JSON configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. --set reservoir.n2=200 (repeatable)")
    p.add_argument("--seed", type=int, help="random seed (overrides the config)")
    p.add_argument("--out", type=Path, help="output directory; primary output goes to stdout if omitted")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtsthermo", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thermo", help="2D bath thermodynamics with the Fermi-Dirac oracle")
    _common(p, "csv")
    p.add_argument("--sweep", help="temperature sweep, e.g. T=0.1:10:100")
    p.add_argument("--no-oracle", action="store_true", help="skip the numerical oracle columns")

    p = sub.add_parser("ratio", help="occupation probabilities, ratio and state equation")
    _common(p, "json")
    p.add_argument("--n2-sweep", action="store_true", help="append the N2 -> infinity convergence table")

    p = sub.add_parser("simulate", help="write a telegraph trace, its sidecar and the event list")
    _common(p, "csv")
    p.add_argument("--name", default="trace", help="file stem inside --out (default: trace)")

    p = sub.add_parser("analyze", help="recover dwell statistics and temperature from a trace")
    _common(p, "json")
    p.add_argument("trace", type=Path, help="trace CSV (sidecar JSON read from the same stem)")

    p = sub.add_parser("roundtrip", help="simulate then analyze, optionally over many seeds")
    _common(p, "json")
    p.add_argument("--repetitions", "-R", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("limit-sweep", help="finite vs infinite bath ratio over N2")
    _common(p, "csv")
    p.add_argument("--n2-min", type=int)
    p.add_argument("--n2-max", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--fixed-area", action="store_true",
                   help="keep the bath area fixed (mu then grows with N2)")
    return parser


def _emit(args, name: str, payload, table=False):
    fmt = args.format
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"{name}.{fmt}"
        with open(path, "w") as fh:
            _write(fh, payload, fmt, table)
        log.info("wrote %s", path)
    else:
        _write(sys.stdout, payload, fmt, table)


def _write(fh, payload, fmt, table):
    if table:
        write_table(fh, payload, fmt)
    elif fmt == "json":
        fh.write(dump_json(payload))
    else:
        write_table(fh, [{"quantity": k, "value": v} for k, v in _flatten(payload).items()], "csv")


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = dump_json(v).replace("\n", " ").strip()
        else:
            out[key] = v
    return out


def cmd_thermo(args, cfg):
    temps = None
    if args.sweep:
        name, temps = workflows.parse_sweep(args.sweep)
        if name != "T":
            raise ConfigError(f"--sweep: only T can be swept, got {name!r}")
    _emit(args, "thermo", workflows.thermo_rows(cfg, temps, oracle=not args.no_oracle), table=True)


def cmd_ratio(args, cfg):
    report = workflows.ratio_report(cfg)
    if args.n2_sweep:
        report["convergence"] = workflows.limit_sweep(cfg)
    _emit(args, "ratio", report)


def cmd_simulate(args, cfg):
    out = args.out or Path("out")
    events, trace, sidecar = workflows.simulate(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = write_trace(out / f"{args.name}.csv", trace, sidecar)
    write_events(out / f"{args.name}_events.csv", events)
    log.info("wrote %s (%d samples, %d transitions)", path, trace.samples.size, events.n_transitions)
    print(dump_json({"trace": str(path), "sidecar": str(path.with_suffix(".json")),
                     "events": str(out / f"{args.name}_events.csv"),
                     "n_samples": int(trace.samples.size), "n_transitions": events.n_transitions}), end="")


def cmd_analyze(args, cfg):
    trace, sidecar = read_trace(args.trace)
    detection = cfg.detection
    det_raw = cfg.raw["detection"]
    meta = sidecar.get("metadata", {})
    # without explicit thresholds, prefer the levels recorded with the trace
    if det_raw.get("threshold_low") is None and det_raw.get("threshold_high") is None and meta:
        detection = thresholds_for_levels(meta["current_1_A"], meta["current_2_A"], meta["noise_sigma_A"],
                                          det_raw["k_sigma"], det_raw["min_dwell_samples"])
    result = workflows.analyze(cfg, trace, detection)
    result["trace"] = str(args.trace)
    _emit(args, "results", result)


def cmd_roundtrip(args, cfg):
    if args.repetitions is not None and args.repetitions < 1:
        raise ConfigError(f"--repetitions must be >= 1, got {args.repetitions}")
    res = workflows.roundtrip(cfg, args.repetitions, args.workers)
    if args.format == "csv":
        _emit(args, "roundtrip", res["runs"], table=True)
        log.info("summary: %s", res["summary"])
    else:
        _emit(args, "roundtrip", res)


def cmd_limit_sweep(args, cfg):
    res = workflows.limit_sweep(cfg, args.n2_min, args.n2_max, args.points,
                                False if args.fixed_area else None)
    if args.format == "csv":
        _emit(args, "limit_sweep", res["rows"], table=True)
        print(f"# slope {res['slope']!r} log_gap_slope {res['log_gap_slope']!r}", file=sys.stderr)
    else:
        _emit(args, "limit_sweep", res)


COMMANDS = {
    "thermo": cmd_thermo,
    "ratio": cmd_ratio,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "roundtrip": cmd_roundtrip,
    "limit-sweep": cmd_limit_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.overrides, seed=args.seed)
        COMMANDS[args.command](args, cfg)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OracleError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
