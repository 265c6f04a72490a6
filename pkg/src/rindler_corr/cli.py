"""Command-line entry point: ``rindler-corr <verb> [flags]``.

Exit status 0 on success, 1 on a domain, config or usage error, 2 when a
verification finds a discrepancy above tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import RindlerCorrError, VerificationError
from .measures import MEASURE_FIELDS, critical_r, crossing_point, negativity_AR_closed
from .params import ModePoint, acceleration_from_squeezing
from .sweep import FIGURE_DEFAULTS, FigureRecipe, SweepConfig, figure_data, limit_study, oracle_failures, run_sweep
from .verify import TOLERANCE, verify_point

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _flatten(groups):
    return [x for g in groups for x in g] if groups else None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rindler-corr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", metavar="verb", parser_class=_Parser)
    sub.required = True

    sw = sub.add_parser("sweep", help="evaluate measures on an (N, r) grid")
    sw.add_argument("--config", help="flat JSON file with SweepConfig keys")
    sw.add_argument("--n", type=_int_list, nargs="+", help="occupation bounds, e.g. --n 1 2 15")
    sw.add_argument("--r-min", type=float)
    sw.add_argument("--r-max", type=float)
    sw.add_argument("--steps", type=int)
    sw.add_argument("--r-values", type=_float_list, nargs="+", help="explicit grid instead of min/max/steps")
    sw.add_argument("--x-axis", choices=("r", "omega_over_a"))
    sw.add_argument("--measures", help=f"comma list from {','.join(MEASURE_FIELDS)}")
    sw.add_argument("--oracle-check", action="store_true", default=None)
    sw.add_argument("--max-oracle-n", type=int)
    sw.add_argument("--out", help="output file (default: stdout)")
    sw.add_argument("--format", choices=("csv", "json"))
    sw.add_argument("--threads", type=int, help="worker threads (default: $RINDLER_CORR_THREADS)")

    fg = sub.add_parser("figure", help="emit the data table behind a named figure")
    fg.add_argument("--id", required=True, dest="figure_id", choices=sorted(FIGURE_DEFAULTS))
    fg.add_argument("--out", help="output file (default: stdout)")
    fg.add_argument("--format", choices=("csv", "json"), default="csv")
    fg.add_argument("--plot", help="also render the figure to this image file")
    fg.add_argument("--x-axis", choices=("r", "omega_over_a"), default="r", help="x axis of --plot")
    fg.add_argument("--n", type=_int_list, nargs="+", dest="n_list")
    fg.add_argument("--proxy-n", type=int, help="large-N stand-in for unbounded N (0 disables)")
    fg.add_argument("--r-min", type=float)
    fg.add_argument("--r-max", type=float)
    fg.add_argument("--steps", type=int)
    fg.add_argument("--n1", type=int, help="rc_vs_n: reference N")
    fg.add_argument("--n-max", type=int, help="rc_vs_n: largest N")
    fg.add_argument("--r-lo", type=float, help="rc_vs_n: crossing search bracket")
    fg.add_argument("--r-hi", type=float)
    fg.add_argument("--threads", type=int)

    vf = sub.add_parser("verify", help="compare closed forms with the dense oracle")
    vf.add_argument("--n", type=int, required=True)
    vf.add_argument("--r", type=float, required=True)
    vf.add_argument("--tolerance", type=float, default=TOLERANCE)

    cr = sub.add_parser("crossing", help="squeezing where two AR negativity curves cross")
    cr.add_argument("--n1", type=int, required=True)
    cr.add_argument("--n2", type=int, required=True)
    cr.add_argument("--r-lo", type=float, default=1e-3)
    cr.add_argument("--r-hi", type=float, default=5.0)

    ct = sub.add_parser("critical", help="squeezing where the conservation deviation reaches epsilon")
    ct.add_argument("--n", type=int, required=True)
    ct.add_argument("--epsilon", type=float, required=True)
    ct.add_argument("--r-hi", type=float, default=30.0)

    lm = sub.add_parser("limit", help="measures versus N at fixed r")
    lm.add_argument("--r", type=float, required=True)
    lm.add_argument("--n-seq", type=_int_list, nargs="+", required=True)
    return parser


def _emit(text, out, stream):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)


def _sweep_mapping(args) -> dict:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("--config: expected a JSON object")
    inline = {
        "n_list": _flatten(args.n),
        "r_min": args.r_min,
        "r_max": args.r_max,
        "steps": args.steps,
        "r_values": _flatten(args.r_values),
        "x_axis": args.x_axis,
        "measures": args.measures,
        "oracle_check": args.oracle_check,
        "max_oracle_n": args.max_oracle_n,
        "out": args.out,
        "format": args.format,
    }
    data.update({k: v for k, v in inline.items() if v is not None})
    return data


def _cmd_sweep(args, stdout):
    cfg = SweepConfig.from_mapping(_sweep_mapping(args))
    table = run_sweep(cfg, args.threads)
    if not cfg.out:
        stdout.write(table.to_csv() if cfg.format == "csv" else table.to_json())
    bad = oracle_failures(table)
    if bad:
        print(f"oracle discrepancy >= {TOLERANCE:g} in {len(bad)} rows", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_figure(args, stdout):
    keys = ("n_list", "proxy_n", "r_min", "r_max", "steps", "n1", "n_max", "r_lo", "r_hi")
    params = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if "n_list" in params:
        params["n_list"] = tuple(_flatten(params["n_list"]))
    recipe = FigureRecipe(args.figure_id, params)
    table = figure_data(recipe, args.threads)
    _emit(table.to_csv() if args.format == "csv" else table.to_json(), args.out, stdout)
    if args.plot:
        from .plotting import render_figure

        render_figure(args.figure_id, table, args.plot, args.x_axis)
    return EXIT_OK


def _cmd_verify(args, stdout):
    report = verify_point(ModePoint(args.n, args.r), args.tolerance)
    stdout.write(f"# verify n_max={args.n} r={args.r:.17g} tolerance={args.tolerance:g}\n")
    stdout.write("group,name,max_abs_diff,status\n")
    for group, name, value in report.items():
        status = "ok" if value < args.tolerance else "FAIL"
        stdout.write(f"{group},{name},{value:.3e},{status}\n")
    stdout.write(f"# max discrepancy {report.max_discrepancy:.3e}: {'pass' if report.passed else 'FAIL'}\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_crossing(args, stdout):
    rc = crossing_point(args.n1, args.n2, (args.r_lo, args.r_hi))
    delta = 1e-4 * max(1.0, rc)
    stdout.write(f"r_c={rc:.17g}\nomega_over_a_c={acceleration_from_squeezing(rc):.17g}\n")
    stdout.write("r,neg_AR_n1,neg_AR_n2,difference\n")
    for r in (rc - delta, rc, rc + delta):
        a = negativity_AR_closed(ModePoint(args.n1, r))
        b = negativity_AR_closed(ModePoint(args.n2, r))
        stdout.write(f"{r:.17g},{a:.17g},{b:.17g},{a - b:.3e}\n")
    return EXIT_OK


def _cmd_critical(args, stdout):
    r = critical_r(args.n, args.epsilon, (0.0, args.r_hi))
    stdout.write(f"r_l={r:.17g}\nomega_over_a_l={acceleration_from_squeezing(r):.17g}\n")
    return EXIT_OK


def _cmd_limit(args, stdout):
    try:
        report = limit_study(args.r, _flatten(args.n_seq))
    except VerificationError as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    stdout.write(report.table.to_csv())
    for (a, b), rc in report.crossings.items():
        stdout.write(f"# crossing N={a},{b}: {'none in bracket' if rc is None else f'{rc:.10g}'}\n")
    stdout.write(f"# neg_AR ordering in N: {report.ordering or 'not determined'}\n")
    return EXIT_OK


_COMMANDS = {
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
    "crossing": _cmd_crossing,
    "critical": _cmd_critical,
    "limit": _cmd_limit,
}


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.verb](args, stdout)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (RindlerCorrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
