"""Command-line driver.

Subcommands::

    chanrecon flops        FLOP ratio sweep          -> <out>/flops.csv
    chanrecon simulate     multi-user link drops     -> <out>/simulate.csv
    chanrecon bound-check  residual bound Monte Carlo -> <out>/bound_check.csv
    chanrecon validate     check a config file

Common flags: ``--config PATH``, ``--seed U64`` (overrides ``master_seed``),
``--out DIR`` (overrides ``output_dir``).  Exit codes: 0 success, 2 config
error, 3 numerical failure.

CSV files are UTF-8, comma separated, LF terminated, with a header row and
floats written with 9 significant digits, so identical inputs give
byte-identical files.
"""

import argparse
import csv
import io
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bound import SpectrumSpec, bound_grid, empirical_residual_mean
from .config import load_config
from .errors import ChanReconError, ConfigError, ConstraintError, DimensionError, NumericalError
from .flops import ratio_sweep
from .link import LinkConfig, MethodSpec, simulate_drop
from .numerics import derive_seed

__all__ = ["main", "cmd_flops", "cmd_simulate", "cmd_boundcheck", "format_value", "render_csv"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def format_value(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, Fraction, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return f"{x:.9g}"
    return str(x)


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _write(out_dir, name, header, rows):
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(header, rows))
    return path


def _methods(cfg):
    methods = [MethodSpec("direct_svd")] if cfg.methods.direct_svd else []
    methods += [MethodSpec("method1", l) for l in sorted(set(cfg.methods.method1_l))]
    return methods


# -- commands ------------------------------------------------------------------

FLOPS_HEADER = ["nt", "l", "direct", "method1", "ratio"]
SIMULATE_HEADER = ["snr_db", "method", "l", "mean_rate", "stderr", "ro_over_direct_pct"]
BOUND_HEADER = ["spectrum", "d", "p", "l", "bound", "mean", "stderr", "pass"]


def cmd_flops(cfg):
    """FLOP sweep rows over the configured Nt list and sketch widths."""
    m = cfg.scenario.ue_antennas
    s = cfg.link.streams_per_user
    rows = []
    for l in sorted(set(cfg.methods.method1_l)):
        for nt, direct, rand, ratio in ratio_sweep(sorted(set(cfg.flops.nt)), m, l, s, cfg.flops.n_sub):
            rows.append((nt, l, direct, rand, ratio))
    rows.sort(key=lambda r: (r[0], r[1]))
    return FLOPS_HEADER, rows


def cmd_simulate(cfg):
    """Mean sum rate per SNR and method over the configured drops."""
    ln = cfg.link
    snrs = list(ln.snr_db)
    cfgs = [LinkConfig.from_snr_db(ln.num_users, ln.streams_per_user, snr, ln.tx_power) for snr in snrs]
    methods = _methods(cfg)
    rates = {(i, m.label): [] for i in range(len(cfgs)) for m in methods}
    for d in range(ln.drops):
        reports = simulate_drop(cfg.scenario, methods, cfgs, derive_seed(cfg.master_seed, 2, d))
        for key, rep in reports.items():
            rates[key].append(rep.sum_rate)
    rows = []
    for i, snr in enumerate(snrs):
        direct = np.mean(rates[(i, "direct_svd")]) if cfg.methods.direct_svd else math.nan
        for m in methods:
            r = np.asarray(rates[(i, m.label)])
            mean = float(r.mean())
            stderr = float(r.std(ddof=1) / np.sqrt(r.size)) if r.size > 1 else 0.0
            pct = 100.0 * mean / direct if direct else math.nan
            rows.append((float(snr), m.name, "" if m.l is None else m.l, mean, stderr, pct))
    return SIMULATE_HEADER, rows


def cmd_boundcheck(cfg):
    """Bound versus Monte Carlo mean over every spectrum and (d, p) pair."""
    bd = cfg.bound
    rows = []
    for si, (name, sv) in enumerate(cfg.bound_spectra()):
        spec = SpectrumSpec(sv, bd.nt, name)
        for d, p in bound_grid(bd.m):
            seed = derive_seed(cfg.master_seed, 3, si, d, p)
            rep = empirical_residual_mean(spec, d, p, bd.trials, seed, slack=bd.slack)
            rows.append((name, d, p, rep.l, rep.bound, rep.empirical_mean, rep.stderr, rep.passed))
    return BOUND_HEADER, rows


# -- summaries -------------------------------------------------------------------

def _summarize_flops(rows, cfg):
    lines = ["Method I / Direct SVD FLOP ratio (M=%d, S=%d):" % (cfg.scenario.ue_antennas, cfg.link.streams_per_user)]
    for nt in (128, 200):
        sel = [r for r in rows if r[0] == nt]
        if sel:
            lines.append(f"  Nt={nt}: " + ", ".join(f"L={r[1]} {100 * float(r[4]):.2f}%" for r in sel))
    return "\n".join(lines)


def _summarize_simulate(rows, cfg):
    bw = cfg.link.bandwidth_hz
    lines = [f"{'SNR':>6} {'method':>12} {'L':>3} {'rate b/s/Hz':>12} {'Mbit/s':>10} {'% direct':>9}"]
    for snr, name, l, mean, _, pct in rows:
        pct_s = "" if math.isnan(pct) else f"{pct:.2f}"
        lines.append(f"{snr:>6g} {name:>12} {str(l):>3} {mean:>12.3f} {mean * bw / 1e6:>10.1f} {pct_s:>9}")
    return "\n".join(lines)


def _summarize_bound(rows, cfg):
    passed = sum(1 for r in rows if r[-1])
    worst = max(rows, key=lambda r: (r[5] / r[4]) if r[4] > 0 else 0.0)
    return (f"bound check: {passed}/{len(rows)} grid points pass "
            f"(tightest: {worst[0]} d={worst[1]} p={worst[2]} mean/bound="
            f"{(worst[5] / worst[4]) if worst[4] > 0 else 0.0:.3f})")


COMMANDS = {
    "flops": (cmd_flops, "flops.csv", _summarize_flops),
    "simulate": (cmd_simulate, "simulate.csv", _summarize_simulate),
    "bound-check": (cmd_boundcheck, "bound_check.csv", _summarize_bound),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="chanrecon", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("flops", "FLOP ratio sweep"), ("simulate", "multi-user link simulation"),
                        ("bound-check", "Monte Carlo check of the residual bound"),
                        ("validate", "validate a configuration file")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="INI configuration file (defaults if omitted)")
        p.add_argument("--seed", type=int, help="master seed override (unsigned 64-bit)")
        p.add_argument("--out", help="output directory override")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.master_seed = args.seed
        if args.out is not None:
            cfg.output_dir = args.out
        cfg.validate()
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"config OK: Nt={cfg.scenario.nt}, M={cfg.scenario.ue_antennas}, "
              f"K={cfg.link.num_users}, S={cfg.link.streams_per_user}, "
              f"L={list(cfg.methods.method1_l)}, seed={cfg.master_seed}")
        return EXIT_OK

    func, filename, summarize = COMMANDS[args.command]
    try:
        header, rows = func(cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConstraintError, DimensionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChanReconError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    path = _write(cfg.output_dir, filename, header, rows)
    print(summarize(rows, cfg))
    print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
