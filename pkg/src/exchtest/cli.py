"""Command line interface.

Subcommands: test (evaluate a stream from a file), simulate (generate a
stream from a named source, then evaluate), confseq (confidence sequence
for a binary success rate), replicate (regenerate pinned figures),
verify-theory (randomized checks of the structural lemmas).

Exit codes: 0 the test rejected (or verify-theory passed), 3 the test did
not reject, 5 verify-theory failed, 10 bad usage or configuration, 11 bad
input data, 12 unexpected internal error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from .calibrate import (calibrated_eprocess, log_adjusted_eprocess,
                        log_p_process)
from .confseq import conf_interval_trajectory, running_intersection_trajectory
from .counts import check_alphabet_order
from .experiments import (FAMILIES, REPLICATION_IDS, compute_trajectory,
                          replicate_figure)
from .forkconvex import verify_theory_report
from .sources import (Bernoulli, Changepoint, DriftingBernoulli, Markov1,
                      MarkovK, Pattern, TimeVaryingMarkov, sample)
from .svgplot import line_plot

EXIT_REJECT = 0
EXIT_NO_REJECT = 3
EXIT_THEORY_FAIL = 5
EXIT_USAGE = 10
EXIT_INPUT = 11
EXIT_INTERNAL = 12

_LN10 = math.log(10.0)


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".12g")


def _write_csv(out_path, columns, rows) -> None:
    fh = open(out_path, "w", newline="") if out_path else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if out_path:
            fh.close()


def _parse_float_list(text, expect, what):
    parts = text.split(",")
    if len(parts) not in (expect if isinstance(expect, tuple) else (expect,)):
        raise CliError(f"{what} needs {expect} comma-separated values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise CliError(f"could not parse {what} from {text!r}")


def parse_source(spec: str):
    """Source strings: bern:P, markov:P10,P11[,INIT], markovk:K:P...,
    sticky, drift, changepoint:P,Q,N, pattern:DIGITS."""
    name, _, rest = spec.partition(":")
    try:
        if name == "bern":
            return Bernoulli(*_parse_float_list(rest, 1, "bern"))
        if name == "markov":
            vals = _parse_float_list(rest, (2, 3), "markov")
            return Markov1(*vals)
        if name == "markovk":
            k_text, _, probs = rest.partition(":")
            k = int(k_text)
            vals = _parse_float_list(probs, 1 << k, "markovk"
                                     ) if probs else None
            if vals is None:
                raise CliError("markovk needs k and context probabilities")
            return MarkovK(k, tuple(vals))
        if name == "sticky":
            return TimeVaryingMarkov()
        if name == "drift":
            return DriftingBernoulli()
        if name == "changepoint":
            p, q, n = _parse_float_list(rest, 3, "changepoint")
            return Changepoint(p, q, int(n))
        if name == "pattern":
            if not rest or not rest.isdigit():
                raise CliError(f"pattern needs a digit string, got {rest!r}")
            return Pattern(rest)
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad source {spec!r}: {exc}")
    raise CliError(f"unknown source kind {name!r}")


def _is_digit_stream(tokens, d: int) -> bool:
    return (d <= 10
            and all(tok.isdigit() for tok, _ in tokens)
            and any(len(tok) > 1 for tok, _ in tokens))


def _ingest_text(path: str, d: int) -> np.ndarray:
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT)
    tokens = [(tok, i + 1) for i, line in enumerate(lines)
              for tok in line.split()]
    if not tokens:
        raise CliError(f"{path}: no symbols found", EXIT_INPUT)
    symbols = []
    if _is_digit_stream(tokens, d):
        for tok, lineno in tokens:
            symbols.extend((int(ch), lineno) for ch in tok)
    else:
        for tok, lineno in tokens:
            try:
                symbols.append((int(tok), lineno))
            except ValueError:
                raise CliError(f"{path}:{lineno}: not a symbol: {tok!r}",
                               EXIT_INPUT)
    for value, lineno in symbols:
        if not 0 <= value < d:
            raise CliError(
                f"{path}:{lineno}: symbol {value} outside alphabet 0..{d - 1}",
                EXIT_INPUT)
    return np.array([v for v, _ in symbols], dtype=np.int64)


def _ingest_csv(path: str, d: int, column: str, threshold) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT)
    rows = [(r, i + 1) for i, r in enumerate(rows) if any(cell.strip() for cell in r)]
    if not rows:
        raise CliError(f"{path}: empty file", EXIT_INPUT)
    header, header_line = rows[0]
    col_idx = None
    data = rows
    names = [cell.strip() for cell in header]
    if column in names:
        col_idx = names.index(column)
        data = rows[1:]
    else:
        try:
            col_idx = int(column)
        except ValueError:
            raise CliError(f"{path}: no column named {column!r} "
                           f"(header: {', '.join(names)})", EXIT_INPUT)
        first_cell = header[col_idx].strip() if col_idx < len(header) else ""
        try:
            float(first_cell)
        except ValueError:
            data = rows[1:]  # header row present, skip it
    if not data:
        raise CliError(f"{path}: no data rows", EXIT_INPUT)
    symbols = np.empty(len(data), dtype=np.int64)
    for j, (row, lineno) in enumerate(data):
        if col_idx >= len(row):
            raise CliError(f"{path}:{lineno}: missing column {col_idx}",
                           EXIT_INPUT)
        cell = row[col_idx].strip()
        try:
            value = float(cell)
        except ValueError:
            raise CliError(f"{path}:{lineno}: not a number: {cell!r}", EXIT_INPUT)
        if threshold is not None:
            symbols[j] = 1 if value > threshold else 0
        else:
            if value != int(value):
                raise CliError(f"{path}:{lineno}: symbol {cell!r} is not an "
                               f"integer (use --threshold to binarize)",
                               EXIT_INPUT)
            symbols[j] = int(value)
    bad = np.nonzero((symbols < 0) | (symbols >= d))[0]
    if bad.size:
        j = int(bad[0])
        raise CliError(f"{path}:{data[j][1]}: symbol {symbols[j]} outside "
                       f"alphabet 0..{d - 1}", EXIT_INPUT)
    return symbols


def _load_stream(args, d: int) -> np.ndarray:
    has_input = getattr(args, "input", None) is not None
    has_source = getattr(args, "source", None) is not None
    if has_input and has_source:
        raise CliError("give either --input or --source, not both")
    if has_input:
        if args.column is not None:
            return _ingest_csv(args.input, d, args.column, args.threshold)
        if args.threshold is not None:
            raise CliError("--threshold requires --column")
        return _ingest_text(args.input, d)
    if has_source:
        if args.tmax is None:
            raise CliError("--source requires --tmax")
        if args.tmax < 1:
            raise CliError(f"--tmax must be >= 1, got {args.tmax}")
        return sample(parse_source(args.source), args.tmax, args.seed)
    raise CliError("no data: give --input FILE or --source SPEC")


def _check_eval_config(args):
    if not 0.0 < args.alpha < 1.0:
        raise CliError(f"--alpha must lie in (0, 1), got {args.alpha}")
    try:
        check_alphabet_order(args.alphabet, args.order)
    except ValueError as exc:
        raise CliError(str(exc))


def _evaluate(args, x: np.ndarray) -> int:
    d, k = args.alphabet, args.order
    threshold_log = math.log(1.0 / args.alpha)
    traj = compute_trajectory(x, d, k, args.family)
    log_p = log_p_process(traj)
    if d == 2:
        lo, hi, _ = conf_interval_trajectory(x, args.alpha, k)
    else:
        lo = np.full(len(x), math.nan)
        hi = np.full(len(x), math.nan)
    basis = log_adjusted_eprocess(traj) if args.adjust else traj
    stopped = np.maximum.accumulate(basis) >= threshold_log
    columns = ["t", "symbol", "log10_evidence", "p_value",
               "conf_lo", "conf_hi", "stopped"]
    cols = [np.arange(1, len(x) + 1), x, traj / _LN10, np.exp(log_p),
            lo, hi, stopped.astype(np.int64)]
    if args.calibrate:
        columns.append("log10_calibrated")
        cols.append(calibrated_eprocess(traj) / _LN10)
    if args.adjust:
        columns.append("log10_adjusted")
        cols.append(basis / _LN10)
    _write_csv(args.out, columns, zip(*cols))
    if args.plot:
        t = np.arange(1, len(x) + 1)
        curves = [("log10 evidence", t, traj / _LN10)]
        if args.adjust:
            curves.append(("log10 adjusted", t, basis / _LN10))
        line_plot(args.plot, curves, title=f"{args.family} e-process",
                  xlabel="t", ylabel="log10 evidence", log_x=True,
                  hlines=[(f"1/alpha = {1.0 / args.alpha:g}",
                           threshold_log / _LN10)])
    return EXIT_REJECT if bool(stopped[-1]) else EXIT_NO_REJECT


def _cmd_test(args) -> int:
    _check_eval_config(args)
    if args.input is None:
        raise CliError("test requires --input FILE")
    x = _load_stream(args, args.alphabet)
    return _evaluate(args, x)


def _cmd_simulate(args) -> int:
    _check_eval_config(args)
    if args.source is None:
        raise CliError("simulate requires --source SPEC")
    x = _load_stream(args, args.alphabet)
    return _evaluate(args, x)


def _cmd_confseq(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise CliError(f"--alpha must lie in (0, 1), got {args.alpha}")
    check_alphabet_order(2, args.order)
    x = _load_stream(args, 2)
    lo, hi, empty = conf_interval_trajectory(x, args.alpha, args.order)
    run_lo, run_hi, run_empty = running_intersection_trajectory(lo, hi, empty)
    t = np.arange(1, len(x) + 1)
    columns = ["t", "symbol", "lo", "hi", "lo_run", "hi_run", "empty"]
    _write_csv(args.out, columns,
               zip(t, x, lo, hi, run_lo, run_hi, run_empty.astype(np.int64)))
    if args.plot:
        line_plot(args.plot,
                  [("lower", t, run_lo), ("upper", t, run_hi)],
                  title=f"confidence sequence, alpha={args.alpha}",
                  xlabel="t", ylabel="success rate")
    return EXIT_REJECT if bool(run_empty[-1]) else EXIT_NO_REJECT


def _cmd_replicate(args) -> int:
    try:
        fig = replicate_figure(args.figure, reps=args.reps)
    except ValueError as exc:
        raise CliError(str(exc))
    _write_csv(args.out, fig["columns"], fig["rows"])
    if args.plot:
        log_x = not args.figure.startswith("fig8")
        line_plot(args.plot, fig["curves"], title=fig["title"],
                  xlabel="t", ylabel="", log_x=log_x)
    return 0


def _cmd_verify_theory(args) -> int:
    if args.trials < 1:
        raise CliError(f"--trials must be >= 1, got {args.trials}")
    report = verify_theory_report(trials=args.trials, seed=args.seed)
    lemma, hull, nsm = report["lemma"], report["hull"], report["nsm"]
    print(f"combination lemma: {lemma['n_trials']} trials at horizon "
          f"{lemma['horizon']}, max tree defect {lemma['max_lr_gap']:.3g}, "
          f"max drift {lemma['max_drift_after']:.3g} "
          f"(tol {lemma['tol']:g}): {'PASS' if lemma['passed'] else 'FAIL'}")
    print(f"hull construction: {hull['n_targets']} targets at horizon "
          f"{hull['horizon']}, max agreement gap {hull['max_agreement_gap']:.3g} "
          f"(tol {hull['tol']:g}): {'PASS' if hull['passed'] else 'FAIL'}")
    print(f"grid supermartingales: {nsm['n_candidates']} candidates "
          f"({nsm['n_grid_pass']} pass grid, {nsm['n_grid_fail']} fail), "
          f"implication failures {nsm['implication_failures']}: "
          f"{'PASS' if nsm['passed'] else 'FAIL'}")
    print(f"overall: {'PASS' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else EXIT_THEORY_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exchtest",
                     description="Sequential tests of exchangeability "
                                 "against Markovian alternatives.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def add_eval_flags(p):
        p.add_argument("--alpha", type=float, default=0.05,
                       help="rejection threshold 1/alpha (default 0.05)")
        p.add_argument("--order", type=int, default=1,
                       help="Markov order of the alternative (default 1)")
        p.add_argument("--alphabet", type=int, default=2,
                       help="alphabet size d (default 2)")
        p.add_argument("--family", choices=FAMILIES, default="core",
                       help="e-process family (default core)")
        p.add_argument("--calibrate", action="store_true",
                       help="add a calibrated e-process column")
        p.add_argument("--adjust", action="store_true",
                       help="track the running maximum with the adjusted "
                            "e-process and stop on it")
        add_output_flags(p)

    def add_output_flags(p):
        p.add_argument("--out", help="write CSV here (default stdout)")
        p.add_argument("--plot", help="write an SVG plot here")

    def add_input_flags(p):
        p.add_argument("--input", help="file of symbols (text or CSV)")
        p.add_argument("--column", help="CSV column name or index")
        p.add_argument("--threshold", type=float,
                       help="binarize the CSV column: 1 if value > threshold")

    def add_source_flags(p):
        p.add_argument("--source", help="source spec, e.g. markov:0.1,0.9")
        p.add_argument("--tmax", type=int, help="stream length to simulate")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")

    p_test = sub.add_parser("test", help="evaluate a recorded stream")
    add_input_flags(p_test)
    add_eval_flags(p_test)
    p_test.set_defaults(func=_cmd_test, source=None)

    p_sim = sub.add_parser("simulate", help="sample a source, then test it")
    add_source_flags(p_sim)
    add_eval_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate, input=None, column=None,
                       threshold=None)

    p_cs = sub.add_parser("confseq",
                          help="confidence sequence for a binary rate")
    add_input_flags(p_cs)
    add_source_flags(p_cs)
    p_cs.add_argument("--alpha", type=float, default=0.05)
    p_cs.add_argument("--order", type=int, default=1)
    add_output_flags(p_cs)
    p_cs.set_defaults(func=_cmd_confseq)

    p_rep = sub.add_parser("replicate", help="regenerate a pinned figure")
    p_rep.add_argument("figure", choices=REPLICATION_IDS)
    p_rep.add_argument("--reps", type=int, default=None,
                       help="override repetition count where applicable")
    add_output_flags(p_rep)
    p_rep.set_defaults(func=_cmd_replicate)

    p_vt = sub.add_parser("verify-theory",
                          help="randomized checks of the structural lemmas")
    p_vt.add_argument("--trials", type=int, default=10_000)
    p_vt.add_argument("--seed", type=int, default=0)
    p_vt.set_defaults(func=_cmd_verify_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"exchtest: error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, TypeError) as exc:
        print(f"exchtest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"exchtest: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover
        print(f"exchtest: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
