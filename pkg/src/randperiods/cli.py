"""Command-line front end.

    randperiods <command> [--config PATH] [overrides] [--out DIR]

Each run writes manifest.json into the output directory first, then one CSV per
report, then rewrites the manifest with the end time.  Exit codes: 0 success,
2 a statistical assertion or fit failed, 1 usage or config error.
"""
import argparse
import datetime as dt
import os
import sys
from dataclasses import replace

from . import __version__
from . import experiments as exp
from .config import SCHEMA_VERSION, config_to_dict, load_config, parse_config, parse_h
from .errors import ConfigError, EmptyCluster, PoorFit, RandPeriodsError
from .periods import period_table, period_vector
from .spectral import enumerate_cluster
from .tables import write_csv, write_json

OUT_ENV = "RANDPERIODS_OUT"
COMMANDS = ("modes", "period", "moments", "tail", "concentration", "sweep", "lq", "det-examples", "all")

STANDARD_CONFIG = {
    "version": SCHEMA_VERSION,
    "manifold": {"kind": "torus", "dim": 2},
    "window": {"a": 1.0, "D": 6.0},
    "h": [0.1],
    "submanifold": {"kind": "torus_line", "base": [0.0, 0.0], "direction": [1, 0], "closed": True},
    "samples": 100_000,
    "seed": 7,
}

SCHEMA_HELP = f"""config schema (version {SCHEMA_VERSION}):
  version        {SCHEMA_VERSION}
  manifold       {{"kind": "torus", "dim": 2|3}} or {{"kind": "sphere"}}
  window         {{"a": 1.0, "D": 6.0}}
  h | h_inv      strictly decreasing h list, e.g. "h": [0.1] or "h_inv": [20, 80, 320]
  submanifold    {{"kind": "torus_line", "direction": [1, 0], "closed": true}}
                 {{"kind": "torus_line", "base": [0, 0], "direction": [0, 1], "length": 1.0}}
                 {{"kind": "torus_subtorus", "fixed": [[2, 0.0]], "ambient_dim": 3}}
                 {{"kind": "sphere_great_arc", "e1": [0, 0, 1], "e2": [1, 0, 0], "length": 1.0}}
                 {{"kind": "sphere_latitude", "colatitude": 1.5707963267948966}}
  p, q           integer lists (defaults [1, 2, 3] and [2, 4, 6])
  samples, seed, workers, lq_samples, r_points, lambda_points, sweep_mc_samples
without --config the standard T^2 setup is used (gamma = {{x_2 = 0}}, D = 6, h = 0.1)."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n\n{SCHEMA_HELP}")


def build_parser():
    p = _Parser(prog="randperiods", description="Random eigenfunction period experiments.",
                epilog=SCHEMA_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--h", nargs="+", help="h values (floats or fractions like 1/320)")
    p.add_argument("--D", type=float, help="window width")
    p.add_argument("--p", nargs="+", type=int, help="moment orders")
    p.add_argument("--q", nargs="+", type=int, help="L^q exponents")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count M")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    return p


def _raw_config(args):
    raw = dict(load_config(args.config)) if args.config else dict(STANDARD_CONFIG)
    if args.h:
        raw.pop("h_inv", None)
        raw["h"] = [parse_h(v) for v in args.h]
    if args.D is not None:
        raw["window"] = {**raw.get("window", {}), "D": args.D}
    for key in ("p", "q", "samples", "seed", "workers"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return raw


def _now():
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def _reports(command, config, extras):
    """Yield (file stem, (header, rows), passed or None)."""
    if command == "modes":
        rows = []
        for h in config.h:
            c = enumerate_cluster(config.manifold, config.window, h)
            freqs = c.frequencies
            rows.extend((h, lab, int(f2), float(f))
                        for lab, f2, f in zip(c.label_strings(), c.freq_sq, freqs))
        yield "modes", (["h", "modeLabel", "freq_sq", "freq"], rows), None
    elif command == "period":
        rows, summary = [], []
        for h in config.h:
            c = enumerate_cluster(config.manifold, config.window, h)
            pv = period_vector(c, config.submanifold)
            head, prow = period_table(pv)
            rows.extend((h,) + tuple(r) for r in prow)
            summary.append((h, c.dimension, pv.squared_norm))
        yield "period", (["h"] + head, rows), None
        yield "period_summary", (["h", "n_modes", "ns"], summary), None
    elif command == "moments":
        r = exp.run_moments(config)
        yield "moments", r.table(), r.passed
    elif command == "tail":
        r = exp.run_tail(config)
        yield "tail", r.table(), None
        yield "tail_summary", r.summary_table(), r.passed
    elif command == "concentration":
        r = exp.run_concentration(config, extras.get("lq_samples"))
        yield "concentration", r.table(), None
        yield "concentration_gaps", r.gap_table(), None
        yield "concentration_rates", r.rate_table(), None
        yield "concentration_fits", r.fit_table(), r.passed
    elif command == "sweep":
        r = exp.run_scaling_sweep(config)
        yield "sweep", r.table(), r.passed
    elif command == "lq":
        if extras.get("lq_samples"):
            config = replace(config, samples=extras["lq_samples"])
        r = exp.run_lq_medians(config)
        yield "lq", r.table(), r.passed
    elif command == "det-examples":
        r = exp.run_deterministic_examples()
        yield "det_examples", r.table(), r.passed


def run(command, raw, out_dir):
    config, extras = parse_config(raw)
    os.makedirs(out_dir, exist_ok=True)
    manifest = {"tool": "randperiods", "version": __version__, "command": command,
                "config": config_to_dict(raw), "seed": config.seed, "start": _now(), "end": None,
                "reports": {}, "passed": None}
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_json(manifest, manifest_path)
    commands = [c for c in COMMANDS if c != "all"] if command == "all" else [command]
    if command == "all" and len(config.h) < 4:
        commands.remove("sweep")
    ok = True
    for cmd in commands:
        for stem, (header, rows), passed in _reports(cmd, config, extras):
            name = f"{stem}.csv"
            write_csv(header, rows, os.path.join(out_dir, name))
            manifest["reports"][stem] = {"path": name, "passed": passed}
            if passed is not None:
                ok = ok and bool(passed)
    manifest["end"] = _now()
    manifest["passed"] = ok
    write_json(manifest, manifest_path)
    return ok


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    out_dir = args.out or os.environ.get(OUT_ENV) or "out"
    try:
        raw = _raw_config(args)
        ok = run(args.command, raw, out_dir)
    except EmptyCluster as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except PoorFit as e:
        print(f"fit failed: {e}", file=sys.stderr)
        return 2
    except ConfigError as e:
        print(f"config error: {e}\n\n{SCHEMA_HELP}", file=sys.stderr)
        return 1
    except RandPeriodsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except MemoryError:
        print("error: the requested cluster does not fit in memory; raise h or narrow the window",
              file=sys.stderr)
        return 1
    print(f"{args.command}: {'ok' if ok else 'statistical check FAILED'} -> {out_dir}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
