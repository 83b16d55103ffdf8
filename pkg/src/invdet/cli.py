"""Command-line front end.

Exit codes: 0 success, 1 property failure, 2 usage or configuration error,
3 numerical failure.
"""

import argparse
import csv
import io
import json
import logging
import sys

from . import performance
from .config import ConfigError, read_config, spec_from_config
from .detectors import DetectorKind
from .errors import (
    DimensionMismatch,
    DomainError,
    DuplicateFrequency,
    InsufficientTrials,
    InvdetError,
    NotBracketable,
    NotPositiveDefinite,
    QuadratureNotConverged,
    RankDeficient,
)
from .params import Dims
from .verification import SUITES, run_suite

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CSV_HEADER = ("detector", "sinr_db", "eta", "pd_closed", "pd_mc", "pd_stderr")

class UsageError(Exception):
    pass


def _num(x):
    # repr is locale independent and round-trips exactly
    return "" if x is None else repr(float(x))


def curves_to_csv(curves):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in curves:
        for row in c.rows:
            w.writerow([c.detector.value, _num(row.sinr_db), _num(row.eta),
                        _num(row.pd_closed), _num(row.pd_mc), _num(row.pd_stderr)])
    return buf.getvalue()


def curves_to_json(curves):
    doc = [
        {
            "detector": c.detector.value,
            "eta": c.eta,
            "achieved_pfa": c.achieved_pfa,
            "rows": [dict(zip(CSV_HEADER[1:], (r.sinr_db, r.eta, r.pd_closed, r.pd_mc, r.pd_stderr)))
                     for r in c.rows],
        }
        for c in curves
    ]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dims(args):
    try:
        return Dims(args.N, args.K, args.r, args.t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_pfa(args):
    dims = _dims(args)
    kind = DetectorKind.parse(args.detector)
    if not performance.has_closed_form(kind, dims):
        raise UsageError(f"no closed-form false-alarm probability for {kind.value}")
    pairs = []
    for eta in args.eta or []:
        pairs.append({"eta": eta, "pfa": performance.pfa(kind, eta, dims)})
    for target in args.pfa or []:
        if not 0 < target <= 1:
            raise UsageError("--pfa values must lie in (0, 1]")
        pairs.append({"eta": performance.invert_threshold(kind, dims, target), "pfa": target})
    doc = {"detector": kind.value, "N": dims.N, "K": dims.K, "r": dims.r, "t": dims.t, "results": pairs}
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def _run_curves(args, monte_carlo):
    from .montecarlo import run_experiment

    cfg = read_config(args.config)
    spec = spec_from_config(cfg, threads=args.threads, paper_scale=args.paper_scale, monte_carlo=monte_carlo)
    curves = run_experiment(spec)
    fmt = args.format or cfg["format"]
    output = args.output if args.output is not None else cfg.get("output")
    _emit(curves_to_csv(curves) if fmt == "csv" else curves_to_json(curves), output)
    return EXIT_OK


def cmd_pd_curve(args):
    """Closed-form sweep; Monte Carlo only where the config asks for it or no formula exists."""
    return _run_curves(args, None)


def cmd_simulate(args):
    """Monte Carlo Pd for every detector alongside the closed forms."""
    return _run_curves(args, True)


def cmd_verify(args):
    result = run_suite(args.suite, trials=args.trials, seed=args.seed)
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", args.output)
    return EXIT_OK if result.passed else EXIT_PROPERTY


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser():
    parser = _Parser(prog="invdet", description="Invariant adaptive detection: performance and verification.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pfa", help="false-alarm probability or threshold inversion")
    p.add_argument("--detector", required=True, choices=[k.value for k in DetectorKind])
    for name in ("N", "K", "r", "t"):
        p.add_argument(f"--{name}", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--eta", type=float, nargs="+", help="thresholds to evaluate")
    group.add_argument("--pfa", type=float, nargs="+", help="target probabilities to invert")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_pfa)

    for name, func, text in (("pd-curve", cmd_pd_curve, "Pd-vs-SINR sweep from a JSON config"),
                             ("simulate", cmd_simulate, "Monte Carlo experiment from a JSON config")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="config path or shipped name (fig1 ... fig4, fig1_desk ...)")
        p.add_argument("--threads", type=_positive_int, default=1)
        p.add_argument("--output", help="output path; '-' or omitted writes to stdout")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--paper-scale", action="store_true",
                       help="Pfa 1e-4 with 1e6 threshold trials")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int)
    p.add_argument("--output", help="write the JSON summary here instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"invdet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, InsufficientTrials, DimensionMismatch, DomainError,
            DuplicateFrequency, RankDeficient, NotPositiveDefinite) as exc:
        print(f"invdet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureNotConverged, NotBracketable, InvdetError, ArithmeticError) as exc:
        print(f"invdet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"invdet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
