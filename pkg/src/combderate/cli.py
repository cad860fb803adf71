"""Command-line front end.

Every table goes out as CSV with a ``#`` provenance line carrying the full
configuration, so a file can be regenerated from its own header.

Examples:
  combderate coeffs --all
  combderate deviation --order 3
  combderate deviation --sharpened
  combderate deviation --cascade 3+1 --m 4:32:4
  combderate response --order 3 --m 4 --limit
  combderate response --compensate --order 3 --m 4 --two-stage both
  combderate simulate --order 1 --m 4 --derated --in impulse.txt
  combderate selftest --seed 0
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import response as fr
from .coeffs import MAX_ORDER, DegenerateOrder, InvalidOrder, derating_spec, table1
from .compensator import compensated_response, maxflat_coeffs, maxflat_coeffs_derated, narrowband_ok
from .stream import (
    InputRangeError,
    direct_fir_oracle,
    integrators_wrap,
    plan_wordlength,
    read_samples,
    run_chain,
    validate_samples,
    write_samples,
)

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_sweep(text: str) -> list[int]:
    """Parse ``start:stop:step`` (stop included when aligned), a comma list or one integer."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0:
                raise ValueError
            values = list(range(start, stop + 1, step))
        else:
            values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse sweep {text!r} (expected start:stop:step or a comma list)") from None
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"sweep {text!r} must be a non-empty increasing list")
    if min(values) < 2:
        raise UsageError("decimation factors must be >= 2")
    return values


def _fmt_db(x: float) -> str:
    return f"{x:.6f}"


def _provenance(args: argparse.Namespace) -> str:
    skip = {"func", "infile", "out", "report"}
    items = [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip and v is not None]
    return f"# combderate {args.command} " + " ".join(items)


def _emit(args, header: list[str], rows: list[list], notes: list[str] = ()) -> None:
    buf = io.StringIO()
    buf.write(_provenance(args) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _check_order(order: int) -> None:
    if order == 0:
        raise UsageError("N = 0 is degenerate: b_0 -> inf and the derating filter is the pure delay z^-1")
    if order < 0 or order > MAX_ORDER:
        raise UsageError("order out of validity range (N < 12)")


# -- commands ---------------------------------------------------------------


def cmd_coeffs(args) -> int:
    if args.all:
        orders = [row[0] for row in table1()]
    elif args.order is not None:
        try:
            derating_spec(args.order)
        except DegenerateOrder as exc:
            raise UsageError(f"{exc}; not listed in the coefficient table") from None
        except InvalidOrder:
            raise UsageError("order out of validity range (N < 12)") from None
        orders = [args.order]
    else:
        raise UsageError("give --order N or --all")
    rows = []
    for n in orders:
        s = derating_spec(n)
        taps = "(" + ",".join(str(t) for t in s.int_taps) + ")"
        rows.append([n, s.b.numerator, s.b.denominator, s.scale_A, taps, s.norm, s.extra_bits])
    _emit(args, ["N", "b_num", "b_den", "A", "taps", "norm", "W_b"], rows)
    return EXIT_OK


def _variant_columns(args) -> list[tuple[str, str, int]]:
    """(column label, variant name, order) for the selected filter family."""
    variants = args.variants
    if variants is None:
        variants = "underated" if getattr(args, "limit", False) else "both"
    want = {"both": ("underated", "derated"), "underated": ("underated",), "derated": ("derated",)}[variants]
    if args.sharpened:
        base = [("sharpened", "sharpened", 2), ("sharpened_derated", "sharpened-derated", 2)]
    elif args.cascade:
        inner, outer = fr.CASCADE_PRESETS[args.cascade]
        base = [("cascade", "cascade", inner), ("cascade_derated", "cascade-derated", inner)]
    else:
        _check_order(args.order)
        base = [("underated", "conventional", args.order), ("derated", "derated", args.order)]
    picked = [base[0]] if "underated" in want else []
    if "derated" in want:
        picked.append(base[1])
    return picked


def _deviation_table(args) -> int:
    cols = _variant_columns(args)
    ms = parse_sweep(args.m)
    curves = [fr.deviation_sweep(variant, order, ms, args.l) for _, variant, order in cols]
    header = ["M"] + [f"deviation_db_{label}" for label, _, _ in cols]
    if args.cascade:
        inner = fr.CASCADE_PRESETS[args.cascade][0]
        curves.append(fr.deviation_sweep("conventional", inner, ms, args.l))
        header.append(f"deviation_db_conventional_{inner}")
    rows = [[m] + [_fmt_db(c.deviation_db[i]) for c in curves] for i, m in enumerate(ms)]
    _emit(args, header, rows)
    return EXIT_OK


def cmd_deviation(args) -> int:
    return _deviation_table(args)


def cmd_sharpen(args) -> int:
    args.sharpened, args.cascade = True, None
    return _deviation_table(args)


def cmd_cascade(args) -> int:
    args.sharpened = False
    return _deviation_table(args)


def cmd_response(args) -> int:
    m = args.m
    if m < 2:
        raise UsageError("--m must be >= 2")
    grid = fr.frequency_grid(m, args.grid, args.span)
    columns: list[tuple[str, np.ndarray]] = []
    notes = []
    if args.compensate:
        _check_order(args.order)
        stages = {"on": (True,), "off": (False,), "both": (False, True)}[args.two_stage]
        if not narrowband_ok(args.l):
            notes.append(f"warning: 3-tap maximally flat compensator is a narrow-band design (L > 4), L = {args.l}")
        for two in stages:
            label = "two_stage" if two else "single_stage"
            columns.append((label, compensated_response(args.order, m, args.l, two, grid, warn=False)))
    else:
        for label, variant, order in _variant_columns(args):
            columns.append((label, fr.variant_response(variant, order, m, grid)))
    if args.limit:
        if args.sharpened or args.cascade or args.compensate:
            raise UsageError("--limit applies to the conventional/derated comb only")
        columns.append(("limit", fr.sinc_limit(args.order, grid)))
    rows = []
    dbs = [fr.FrequencyResponse(grid, v).magnitude_db for _, v in columns]
    for i, w in enumerate(grid):
        rows.append([f"{w / np.pi:.6f}"] + [_fmt_db(d[i]) for d in dbs])
    _emit(args, ["omega_over_pi"] + [f"mag_db_{label}" for label, _ in columns], rows, notes)
    return EXIT_OK


def cmd_compensate(args) -> int:
    _check_order(args.order)
    ms = parse_sweep(args.m)
    notes = []
    if not narrowband_ok(args.l):
        notes.append(f"warning: 3-tap maximally flat compensator is a narrow-band design (L > 4), L = {args.l}")
    edge = fr.BandContext(args.l).band_edge
    two = maxflat_coeffs_derated(args.order)
    rows = []
    for m in ms:
        one = maxflat_coeffs(args.order, m)
        g1 = abs(compensated_response(args.order, m, args.l, False, edge, warn=False))
        g2 = abs(compensated_response(args.order, m, args.l, True, edge, warn=False))
        rows.append([
            m,
            f"{float(one.c0):.12f}", f"{float(one.c1):.12f}",
            f"{float(two.c0):.12f}", f"{float(two.c1):.12f}",
            _fmt_db(20 * np.log10(g1)), _fmt_db(20 * np.log10(g2)),
        ])
    header = ["M", "c0_single", "c1_single", "c0_two_stage", "c1_two_stage",
              "edge_gain_db_single", "edge_gain_db_two_stage"]
    _emit(args, header, rows, notes)
    return EXIT_OK


def cmd_simulate(args) -> int:
    _check_order(args.order)
    if args.m < 2:
        raise UsageError("--m must be >= 2")
    if args.bits < 1:
        raise UsageError("--bits must be >= 1")
    if args.infile in (None, "-"):
        raw = read_samples(sys.stdin)
    else:
        with open(args.infile, encoding="utf-8") as fh:
            raw = read_samples(fh)
    x = validate_samples(raw, args.bits)
    plan = plan_wordlength(args.order, args.m, args.bits, args.derated)
    y = run_chain(x, args.order, args.m, args.derated, plan, args.fir_position)
    ref = direct_fir_oracle(x, args.order, args.m, args.derated)
    match = bool(np.array_equal(np.asarray(y, dtype=object), np.asarray(ref, dtype=object)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_samples(fh, y)
    else:
        write_samples(sys.stdout, y)
    report = [
        f"order: {args.order}",
        f"decim: {args.m}",
        f"derated: {str(args.derated).lower()}",
        f"fir_position: {args.fir_position}",
        f"input_bits: {plan.input_bits}",
        f"comb_growth_bits: {plan.comb_growth_bits}",
        f"derate_bits: {plan.derate_bits}",
        f"total_bits: {plan.total_bits}",
        f"gain: {plan.gain}",
        f"input_samples: {len(x)}",
        f"output_samples: {len(y)}",
        f"integrators_wrapped: {str(integrators_wrap(x, args.order, plan)).lower()}",
        f"oracle_match: {str(match).lower()}",
    ]
    text = "\n".join(report) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK if match else EXIT_SELFTEST


def cmd_selftest(args) -> int:
    from .selftest import SUITES, run_all

    names = args.suite or None
    if names:
        unknown = set(names) - set(SUITES)
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    results = run_all(args.seed, names)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combderate",
        description="Derating filters for comb decimators: coefficients, responses, deviation sweeps, simulation.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Examples:" + __doc__.split("Examples:", 1)[1],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, order_default=3, m_default=None, l_default=2):
        p.add_argument("--order", "-N", type=int, default=order_default, help="comb order N")
        if m_default is not None:
            p.add_argument("--m", default=m_default, help="decimation factors, start:stop:step or list")
        p.add_argument("--l", type=int, default=l_default, help="post-decimation factor L (band edge pi/L)")
        p.add_argument("--out", help="output path (default stdout)")

    def family(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--sharpened", action="store_true", help="sharpened comb 3H^2 - 2H^3")
        g.add_argument("--cascade", choices=sorted(fr.CASCADE_PRESETS), help="bifurcated-zero preset")
        p.add_argument("--variants", choices=["both", "underated", "derated"],
                       help="default both (underated only with --limit)")

    p = sub.add_parser("coeffs", help="derating coefficients (Table of b_N, A_N, W_b)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--order", "-N", type=int)
    g.add_argument("--all", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("deviation", help="pass-band deviation vs M")
    common(p, m_default="4:32:4")
    family(p)
    p.set_defaults(func=cmd_deviation)

    p = sub.add_parser("sharpen", help="deviation curves of the sharpened comb")
    common(p, m_default="4:32:4")
    p.add_argument("--variants", choices=["both", "underated", "derated"], default="both")
    p.set_defaults(func=cmd_sharpen)

    p = sub.add_parser("cascade", help="deviation curves of the bifurcated-zero comb")
    common(p, m_default="4:32:4")
    p.add_argument("--preset", dest="cascade", choices=sorted(fr.CASCADE_PRESETS), default="3+1")
    p.add_argument("--variants", choices=["both", "underated", "derated"], default="both")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("response", help="sampled magnitude responses")
    common(p)
    p.add_argument("--m", type=int, default=4, help="decimation factor")
    p.add_argument("--grid", type=int, default=fr.DEFAULT_GRID_DENSITY, help="points per unit of omega/pi")
    p.add_argument("--span", type=float, help="upper limit in units of pi (default min(M, 8))")
    p.add_argument("--limit", action="store_true", help="add the M -> inf sinc^N column")
    family(p)
    p.add_argument("--compensate", action="store_true", help="composite with maximally flat compensator")
    p.add_argument("--two-stage", choices=["on", "off", "both"], default="both")
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("compensate", help="maximally flat compensator coefficients and edge gains")
    common(p, m_default="4:32:4", l_default=8)
    p.set_defaults(func=cmd_compensate)

    p = sub.add_parser("simulate", help="run the integer comb decimator on a sample file")
    p.add_argument("--order", "-N", type=int, default=3)
    p.add_argument("--m", type=int, default=4)
    d = p.add_mutually_exclusive_group()
    d.add_argument("--derated", dest="derated", action="store_true", default=True)
    d.add_argument("--underated", dest="derated", action="store_false")
    p.add_argument("--bits", type=int, default=16, help="input word length B_in")
    p.add_argument("--fir-position", choices=["input", "output"], default="input")
    p.add_argument("--in", dest="infile", help="newline-delimited integers (default stdin)")
    p.add_argument("--out", help="decimated output samples (default stdout)")
    p.add_argument("--report", help="report path (default stderr)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"combderate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputRangeError as exc:
        print(f"combderate {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
