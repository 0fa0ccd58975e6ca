"""Command-line interface.

Subcommands::

    madkit mad          corrected MAD of numbers from a file or stdin
    madkit factors      Monte-Carlo estimation of correction factors
    madkit efficiency   variance ratios of the three MAD estimators
    madkit sensitivity  dispersion of MAD estimates across distributions
    madkit fit          least-squares fit of the large-n factor equation
    madkit tables       dump a built-in factor table

Exit codes: 0 success, 2 usage or input error, 3 internal invariant
failure.  Simulation output is CSV preceded by a provenance comment line;
with a fixed ``--seed`` the CSV body is byte-identical across runs and
thread counts.
"""
from __future__ import annotations

import argparse
import os
import sys

import madkit
from madkit.distributions import DEFAULT_SENSITIVITY_SET, parse_spec
from madkit.errors import InternalCheckError, MadkitError
from madkit.mad import MODEL_CHOICES, factor_table, mad_corrected
from madkit.quantiles import THD_SQRT, parse_estimator
from madkit.simulate import (
    SimulationConfig,
    efficiency,
    estimate_factors,
    fit_embedded,
    sensitivity,
)

_FMT = "%.10g"


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _estimator_list(text: str):
    return [parse_estimator(part) for part in text.split(",") if part.strip()]


def _split_top_level(text: str) -> list[str]:
    # Split on commas not nested in parentheses: distribution specs carry
    # their own commas, e.g. pareto(loc=1,shape=0.5),uniform(a=0,b=1).
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p for p in (s.strip() for s in parts) if p]


def _dist_list(text: str):
    return [parse_spec(part) for part in _split_top_level(text)]


def _range(text: str) -> tuple[float, float]:
    low, sep, high = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LOW..HIGH, got {text!r}")
    try:
        return float(low), float(high)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric bounds in {text!r}")


def _default_threads() -> int:
    env = os.environ.get("MADKIT_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _read_numbers(path: str) -> list[float]:
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    values = []
    for lineno, line in enumerate(lines, start=1):
        for token in line.replace(",", " ").split():
            try:
                value = float(token)
            except ValueError:
                raise MadkitError(f"line {lineno}: could not parse {token!r} as a number")
            if value != value or value in (float("inf"), float("-inf")):
                raise MadkitError(f"line {lineno}: non-finite value {token!r} rejected")
            values.append(value)
    return values


def _write_report(body: str, out_path, provenance: str) -> None:
    text = provenance + body
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(args) -> str:
    return (
        f"# seed={args.seed} reps={args.reps} version={madkit.__version__}\n"
    )


def _add_sim_flags(parser, default_reps: int) -> None:
    parser.add_argument("--n", type=_int_list, required=True, metavar="LIST",
                        help="comma-separated sample sizes, e.g. 2,3,5,10")
    parser.add_argument("--reps", type=int, default=default_reps,
                        help=f"repetitions per cell (default {default_reps})")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--estimators", type=_estimator_list, default=None, metavar="LIST",
                        help="subset of sm,hd,thd-sqrt (default: all three)")
    parser.add_argument("--chunk-size", type=int, default=16384,
                        help="repetitions per work chunk (default 16384)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads; results do not depend on this "
                             "(default: MADKIT_THREADS or 1)")
    parser.add_argument("--out", default=None, metavar="PATH",
                        help="write CSV to PATH instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="madkit",
        description="Bias-corrected median absolute deviation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"madkit {madkit.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mad = sub.add_parser("mad", help="corrected MAD of input numbers")
    p_mad.add_argument("input", nargs="?", default="-",
                       help="input file of numbers, or - for stdin (default)")
    p_mad.add_argument("--estimator", type=parse_estimator, default=THD_SQRT,
                       help="sm, hd, thd-sqrt, or thd(W) (default thd-sqrt)")
    p_mad.add_argument("--model", choices=sorted(MODEL_CHOICES), default="default",
                       help="correction-factor model (default: default)")
    p_mad.add_argument("--csv", action="store_true", help="emit CSV instead of the key/value form")

    p_factors = sub.add_parser("factors", help="Monte-Carlo correction factors")
    _add_sim_flags(p_factors, default_reps=1_000_000)

    p_eff = sub.add_parser("efficiency", help="relative efficiency vs the sm baseline")
    _add_sim_flags(p_eff, default_reps=10_000)

    p_sens = sub.add_parser("sensitivity", help="dispersion of MAD estimates per distribution")
    _add_sim_flags(p_sens, default_reps=1_000)
    p_sens.add_argument("--dist", type=_dist_list, default=list(DEFAULT_SENSITIVITY_SET),
                        metavar="SPECS",
                        help="comma-separated distribution specs, e.g. "
                             "'cauchy(x0=0,gamma=1),uniform(a=0,b=1)' "
                             "(default: the built-in 20-distribution set)")

    p_fit = sub.add_parser("fit", help="fit the large-n prediction equation to a table")
    p_fit.add_argument("--estimator", choices=("sm", "hd", "thd-sqrt", "park"), default="sm")
    p_fit.add_argument("--range", type=_range, default=(100.0, 500.0), metavar="LOW..HIGH",
                       help="fit on tabulated sizes with LOW < n <= HIGH (default 100..500)")
    p_fit.add_argument("--out", default=None, metavar="PATH")

    p_tables = sub.add_parser("tables", help="dump a built-in factor table as CSV")
    p_tables.add_argument("--estimator", choices=("sm", "hd", "thd-sqrt", "park"), default="sm")
    p_tables.add_argument("--out", default=None, metavar="PATH")

    return parser


def _cmd_mad(args) -> int:
    values = _read_numbers(args.input)
    if len(values) < 2:
        raise MadkitError(f"need at least 2 numbers, got {len(values)}")
    result = mad_corrected(values, args.estimator, MODEL_CHOICES[args.model])
    if args.csv:
        sys.stdout.write("n,estimator,mad0,factor,mad\n")
        sys.stdout.write(
            f"{result.n},{result.estimator.label},{_FMT % result.uncorrected},"
            f"{_FMT % result.factor},{_FMT % result.corrected}\n"
        )
    else:
        sys.stdout.write(f"n          {result.n}\n")
        sys.stdout.write(f"estimator  {result.estimator.label}\n")
        sys.stdout.write(f"mad0       {_FMT % result.uncorrected}\n")
        sys.stdout.write(f"factor     {_FMT % result.factor}\n")
        sys.stdout.write(f"mad        {_FMT % result.corrected}\n")
    return 0


def _config_from(args, need_dists: bool = False) -> SimulationConfig:
    kwargs = dict(
        sample_sizes=tuple(args.n),
        repetitions=args.reps,
        master_seed=args.seed,
        chunk_size=args.chunk_size,
    )
    if args.estimators is not None:
        kwargs["estimators"] = tuple(args.estimators)
    if need_dists:
        kwargs["distributions"] = tuple(args.dist)
    return SimulationConfig(**kwargs)


def _threads_of(args) -> int:
    return args.threads if args.threads is not None else _default_threads()


def _cmd_factors(args) -> int:
    report = estimate_factors(_config_from(args), threads=_threads_of(args))
    _write_report(report.to_csv(), args.out, _provenance(args))
    return 0


def _cmd_efficiency(args) -> int:
    report = efficiency(_config_from(args), threads=_threads_of(args))
    _write_report(report.to_csv(), args.out, _provenance(args))
    return 0


def _cmd_sensitivity(args) -> int:
    report = sensitivity(_config_from(args, need_dists=True), threads=_threads_of(args))
    _write_report(report.to_csv(), args.out, _provenance(args))
    return 0


def _cmd_fit(args) -> int:
    result = fit_embedded(args.estimator, args.range)
    _write_report(result.to_csv(), args.out, f"# version={madkit.__version__}\n")
    return 0


def _cmd_tables(args) -> int:
    table = factor_table(args.estimator)
    lines = ["n,c_n"]
    lines += [f"{n},{table[n]:.4f}" for n in sorted(table)]
    _write_report("\n".join(lines) + "\n", args.out, f"# version={madkit.__version__}\n")
    return 0


_COMMANDS = {
    "mad": _cmd_mad,
    "factors": _cmd_factors,
    "efficiency": _cmd_efficiency,
    "sensitivity": _cmd_sensitivity,
    "fit": _cmd_fit,
    "tables": _cmd_tables,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InternalCheckError as exc:
        print(f"madkit: internal check failed: {exc}", file=sys.stderr)
        return 3
    except MadkitError as exc:
        print(f"madkit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"madkit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
