"""Command-line entry point: ``toeplitz-sarnak <command> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 malformed
scale, 4 file format problem, 5 the construction could not be carried out.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import complexity, correlation, mixing, mobius, structure
from .builder import (
    ConstructionError,
    build_block_scheme,
    build_sparse_readout,
    build_readout,
    mobius_fill,
    schedule_ones,
)
from .odometer import ScaleError, parse_scale
from .seqfile import (
    SequenceFormatError,
    read_filling,
    read_sequence,
    write_filling,
    write_sequence,
    write_z,
)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SCALE = 3
EXIT_FORMAT = 4
EXIT_BUILD = 5

# reference prefixes of the block scheme with q = 7 and q = (7, 6)
BLOCK_7 = "0100***" * 10 + "0100"
BLOCK_42 = "0100000" "0100100" "0100000" + "0100***" * 3 + "0100000" "0100100" "0100000" "0100"
READOUT_3K = (
    "Y1 Y2 Y3 y1 Y4 Y5 y1 Y6 Y7 y1 y2 Y8 y1 Y9 Y10 y1 Y11 Y12 y1 y2 Y13 "
    "y1 Y14 Y15 y1 Y16 Y17 y1 y2 y3 y1 Y18 Y19 y1 Y20"
)


class UsageError(Exception):
    pass


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _jobs(args):
    return args.jobs or os.cpu_count() or 1


# -- sieve ----------------------------------------------------------------------------


def cmd_sieve(args):
    table = mobius.mobius_sieve(args.n_max, args.segment_size, _jobs(args))
    write_sequence(args.out, table.symbols(), {"construction": "mobius", "n_max": args.n_max})
    dens = mobius.squarefree_density(table, args.n_max)
    print(f"n_max={args.n_max} mertens={table.mertens(args.n_max)} squarefree={float(dens):.9f}")
    return 0


# -- build ----------------------------------------------------------------------------


def _read_blocks(path):
    blocks = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) - set("0123456789"):
            raise SequenceFormatError(f"{path}: block lines must be digit strings")
        blocks.append([int(c) for c in line])
    return blocks


def cmd_build_block(args):
    qs = args.q
    if args.blocks == "auto":
        if args.r is None or len(args.r) != len(qs):
            raise UsageError("--blocks auto needs --r with one entry per q")
        blocks = schedule_ones(qs, args.r)
    else:
        blocks = _read_blocks(args.blocks)
    filling = build_block_scheme(qs, blocks, args.window)
    if args.complete is not None:
        filling = filling.completed(args.complete)
    write_filling(args.out, filling, {"q": qs})
    print(f"window={args.window} steps={filling.n_steps} unfilled={len(filling.unfilled_positions())}")
    return 0


def cmd_build_readout(args):
    scale = parse_scale(args.scale, bound=args.window)
    kind = args.y[0]
    meta = {"y": kind}
    if kind == "mobius":
        table = mobius.mobius_sieve(args.window, n_jobs=_jobs(args))
        filling = mobius_fill(scale, args.window, table)
    elif kind == "file":
        if len(args.y) != 2:
            raise UsageError("--y file needs a path")
        y, holes, _ = read_sequence(args.y[1])
        if holes.any():
            raise SequenceFormatError(f"{args.y[1]}: y may not contain unfilled cells")
        filling = build_readout(y, scale, args.window)
        meta["y_path"] = args.y[1]
    elif kind == "words":
        _, filling, ks = build_sparse_readout(scale, args.window, args.m_max)
        meta["k_indices"] = ks
    else:
        raise UsageError(f"unknown --y source {kind!r}")
    write_filling(args.out, filling, meta)
    if args.z_out:
        write_z(args.z_out, filling)
    print(f"window={args.window} steps={filling.n_steps} scale={scale.descriptor}")
    return 0


# -- analyze --------------------------------------------------------------------------


def _empirical_report(x, scale, path):
    n = x.size
    periods = [p for p in scale.periods_upto(n) if p < n]
    if not periods:
        raise ScaleError(f"no scale period below the sequence length {n}")
    L = (n // periods[-1]) * periods[-1]
    report = structure.DensityReport(subject=f"{path} (empirical)", window=n, full_period=L)
    best = Fraction(0)
    for k, p in enumerate(periods, start=1):
        per = structure.periodic_part(x, p, mode="empirical")
        dens = Fraction(int(np.count_nonzero(per <= L)), L)
        report.levels.append((k, p, dens))
        best = max(best, dens)
    report.defect = 1 - best
    return report


def cmd_analyze(args):
    side = Path(str(args.input) + ".steps.npz")
    if side.exists():
        filling, _ = read_filling(args.input)
        report = structure.regularity_defect(filling, args.banach, subject=str(args.input))
    else:
        x, holes, header = read_sequence(args.input)
        spec = args.scale or header.get("meta", {}).get("scale")
        if spec is None:
            raise UsageError("--scale is required when the file carries no scale")
        report = _empirical_report(x, parse_scale(spec, bound=x.size), args.input)
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0


# -- correlate ------------------------------------------------------------------------


def cmd_correlate(args):
    if args.sarnak:
        if not args.scale or not args.n:
            raise UsageError("--sarnak needs --scale and --n")
        scale = parse_scale(args.scale, bound=args.n)
        table = mobius.mobius_sieve(args.n, n_jobs=_jobs(args))
        filling = mobius_fill(scale, args.n, table)
        res = correlation.strong_correlation_check(filling, table, args.n)
        lo, hi = res.rho_interval
        print(f"A_n={res.average:.9f} bound={res.bound:.9f} rho=[{float(lo):.9g}, {float(hi):.9g}]")
        print("verdict: holds" if res.holds else "verdict: FAILS")
        return 0 if res.holds else EXIT_FAIL
    if not args.a or not args.b:
        raise UsageError("give --a and --b, or --sarnak")
    xa, ha, _ = read_sequence(args.a)
    xb, hb, _ = read_sequence(args.b)
    if ha.any() or hb.any():
        raise SequenceFormatError("correlation inputs may not contain unfilled cells")
    series = correlation.correlate(xa, xb, args.schedule)
    text = series.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- census ---------------------------------------------------------------------------


def cmd_census(args):
    x, holes, _ = read_sequence(args.input)
    if holes.any():
        raise SequenceFormatError(f"{args.input}: census needs a fully filled sequence")
    if args.abs:
        x = np.abs(x)
    if args.prefix:
        x = x[: args.prefix]
    if args.n_min > args.n_max:
        raise UsageError("--n-min exceeds --n-max")
    reports = [
        complexity.block_census(x, n, args.zero_cap, _jobs(args))
        for n in range(args.n_min, args.n_max + 1)
    ]
    text = complexity.census_csv(reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- verify ---------------------------------------------------------------------------


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--lemma {args.lemma} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _readout_z(args, window):
    scale = parse_scale(args.scale, bound=window)
    # z does not depend on y, so zeros serve as symbols
    return build_readout(np.zeros(window, dtype=np.int64), scale, window), scale


def _verdict(ok):
    print("verdict: holds" if ok else "verdict: FAILS")
    return 0 if ok else EXIT_FAIL


def cmd_verify(args):
    lemma = args.lemma
    if lemma == "shiftz1":
        _need(args, "scale", "k")
        scale = parse_scale(args.scale, bound=args.window or 10**7)
        pk = scale.period(args.k)
        if pk is None:
            raise ScaleError(f"p_{args.k} is beyond the bound")
        filling, _ = _readout_z(args, args.window or pk)
        measured, formula, ok = complexity.verify_zero_frequency(filling, args.k)
        print(f"k={args.k} p_k={pk} measured={measured} formula={formula}")
        return _verdict(ok)
    if lemma == "shiftz2":
        _need(args, "scale", "k", "j_max")
        scale = parse_scale(args.scale, bound=10**7)
        pk = scale.period(args.k)
        if pk is None:
            raise ScaleError(f"p_{args.k} is beyond the bound")
        filling, _ = _readout_z(args, (args.j_max + 1) * pk)
        ok = complexity.verify_replacement(filling, args.k, args.j_max)
        print(f"k={args.k} p_k={pk} j_max={args.j_max}")
        return _verdict(ok)
    if lemma == "shiftz5":
        _need(args, "scale", "m", "window")
        filling, _ = _readout_z(args, args.window)
        pos = complexity.sparse_pattern_search(filling.initial.astype(np.int8), args.m)
        print(f"m={args.m} window={args.window} position={pos}")
        return _verdict(pos is not None)
    if lemma == "claim":
        _need(args, "scale", "m", "window")
        scale = parse_scale(args.scale, bound=args.window)
        ks = complexity.find_claim_indices(scale, args.m, args.window)
        print(f"k_m={','.join(map(str, ks))}")
        ok = len(ks) == args.m and all(b > a + m for m, (a, b) in enumerate(zip(ks, ks[1:]), 1))
        return _verdict(ok)
    if lemma == "staszek1":
        _need(args, "periods")
        residues = args.residues or [0] * len(args.periods)
        ok = mobius.density_independence_check(args.periods, residues)
        print(f"periods={args.periods} residues={residues} density=1/{math.prod(args.periods)}")
        return _verdict(ok)
    if lemma == "staszek2":
        _need(args, "k")
        res = mobius.tail_product_bound(args.k)
        print(f"k={args.k} product>={res.lower_estimate:.12g} bound={res.bound:.12g}")
        return _verdict(res.holds)
    if lemma == "nowy":
        _need(args, "M", "n")
        if args.progressions:
            progs = [tuple(int(v) for v in t.split(":")) for t in args.progressions.split(",")]
        else:
            rng = np.random.default_rng(args.seed)
            progs = [(int(p), int(rng.integers(p))) for p in rng.integers(2, 50, size=5)]
        emp, bound = mobius.progression_hit_density(args.M, args.r, progs, args.n)
        print(f"progressions={progs} empirical={float(emp):.9g} bound={float(bound):.9g}")
        return _verdict(emp <= bound + Fraction(args.slack))
    raise UsageError(f"unknown lemma {lemma!r}")


# -- mixing ---------------------------------------------------------------------------


def cmd_mixing(args):
    x, holes, header = read_sequence(args.input)
    if holes.any():
        raise SequenceFormatError(f"{args.input}: mixing needs a fully filled sequence")
    spec = args.scale or header.get("meta", {}).get("scale")
    if spec is None and "q" in header.get("meta", {}):
        spec = ",".join(str(p) for p in np.cumprod(header["meta"]["q"]))
    if spec is None:
        raise UsageError("--scale is required when the file carries no scale")
    scale = parse_scale(spec, bound=x.size)
    if args.plan:
        plans = mixing.plans_from_text(Path(args.plan).read_text())
        y = x
        for plan in plans:
            y = mixing.apply_window_shift(y, plan)
    elif args.auto:
        pairs = [tuple(int(v) for v in t.split(",")) for t in args.auto.split(";") if t]
        y, plans = mixing.run_plans(x, scale, pairs)
    else:
        y, plans = mixing.auto_plan(x, scale, args.steps, Fraction(args.budget))
    meta = dict(header.get("meta", {}))
    meta["mixing_steps"] = len(plans)
    write_sequence(args.out, y, meta)
    if args.plan_out:
        Path(args.plan_out).write_text(mixing.plans_to_text(plans))
    rho = sum((p.rho for p in plans), Fraction(0))
    frac = mixing.modified_fraction(x, y)
    print(f"steps={len(plans)} sum_rho={float(rho):.9g} modified={float(frac):.9g}")
    return 0


# -- figures --------------------------------------------------------------------------


def render_readout_tokens(filling, length):
    toks = []
    for i in range(length):
        k = int(filling.step[i])
        toks.append(("Y" if filling.initial[i] else "y") + str(k))
    return " ".join(toks)


def figure_outputs():
    """Regenerated reference prefixes keyed by name."""
    fig1 = build_block_scheme([7], [[0, 1, 0, 0]], len(BLOCK_7))
    fig2 = build_block_scheme([7, 6], [[0, 1, 0, 0], [0, 0, 0, 1, 0, 0, 0, 0, 0]], len(BLOCK_42))
    n = len(READOUT_3K.split())
    scale = parse_scale("3^k", bound=n)
    readout = build_readout(np.zeros(n, dtype=np.int64), scale, n)
    return {
        "block-7": fig1.render(),
        "block-42": fig2.render(),
        "readout-3k": render_readout_tokens(readout, n),
    }


FIXTURES = {"block-7": BLOCK_7, "block-42": BLOCK_42, "readout-3k": READOUT_3K}


def cmd_reproduce(args):
    out = figure_outputs()
    bad = 0
    for name, expected in FIXTURES.items():
        got = out[name]
        if got == expected:
            print(f"{name}: ok ({len(expected)} chars)")
            if args.verbose:
                print(f"  {got}")
        else:
            bad += 1
            print(f"{name}: DIFF")
            print(f"  expected {expected}")
            print(f"  got      {got}")
    print(f"diffs={bad}")
    return 0 if bad == 0 else EXIT_FAIL


# -- parser ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="toeplitz-sarnak", description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=_positive, default=None, help="worker threads (default: all cores)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="tabulate the Moebius function")
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--segment-size", type=_positive, default=1 << 20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("build", help="construct a Toeplitz prefix")
    bsub = p.add_subparsers(dest="scheme", required=True)
    b = bsub.add_parser("block", help="block scheme")
    b.add_argument("--q", type=_int_list, required=True)
    b.add_argument("--r", type=_int_list, default=None, help="r_k for --blocks auto")
    b.add_argument("--blocks", required=True, help="text file with one block per line, or 'auto'")
    b.add_argument("--window", type=_positive, required=True)
    b.add_argument("--complete", type=int, default=None, metavar="SYMBOL",
                   help="fill the cells left free by the last step with SYMBOL")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_block)
    b = bsub.add_parser("readout", help="readout scheme")
    b.add_argument("--scale", required=True)
    b.add_argument("--y", nargs="+", required=True, metavar="SOURCE", help="mobius | file PATH | words")
    b.add_argument("--window", type=_positive, required=True)
    b.add_argument("--m-max", type=_positive, default=4)
    b.add_argument("--out", required=True)
    b.add_argument("--z-out", default=None)
    b.set_defaults(func=cmd_build_readout)

    p = sub.add_parser("analyze", help="periodic-part densities and the regularity defect")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--scale", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--banach", type=_positive, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("correlate", help="Cesaro correlation of two sequences")
    p.add_argument("--a", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--schedule", choices=["geometric", "all"], default="geometric")
    p.add_argument("--out", default=None)
    p.add_argument("--sarnak", action="store_true", help="strong-correlation check of a Moebius fill")
    p.add_argument("--scale", default=None)
    p.add_argument("--n", type=_positive, default=None)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("census", help="distinct block counts")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--n-min", type=_positive, required=True)
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--zero-cap", type=float, default=None)
    p.add_argument("--prefix", type=_positive, default=None)
    p.add_argument("--abs", action="store_true", help="census of |x|")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="check one lemma numerically")
    p.add_argument(
        "--lemma",
        required=True,
        choices=["shiftz1", "shiftz2", "shiftz5", "staszek1", "staszek2", "nowy", "claim"],
    )
    p.add_argument("--scale", default=None)
    p.add_argument("--k", type=_positive, default=None)
    p.add_argument("--j-max", type=int, default=None)
    p.add_argument("--m", type=_positive, default=None)
    p.add_argument("--window", type=_positive, default=None)
    p.add_argument("--periods", type=_int_list, default=None)
    p.add_argument("--residues", type=_int_list, default=None)
    p.add_argument("--M", type=_positive, default=None)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--n", type=_positive, default=None)
    p.add_argument("--progressions", default=None, help="p:r,p:r,...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slack", type=float, default=0.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mixing", help="window-shift modifications")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--scale", default=None)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plan", default=None, help="plan file to replay")
    g.add_argument("--auto", default=None, help="r,q pairs separated by ';'")
    p.add_argument("--steps", type=_positive, default=3, help="steps for the automatic planner")
    p.add_argument("--budget", type=Fraction, default=Fraction(1, 20))
    p.add_argument("--out", required=True)
    p.add_argument("--plan-out", default=None)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("reproduce-figures", help="regenerate the reference prefixes and diff them")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScaleError as exc:
        print(f"scale error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (SequenceFormatError, FileNotFoundError) as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ConstructionError, mixing.PlanError) as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_BUILD


if __name__ == "__main__":
    sys.exit(main())
