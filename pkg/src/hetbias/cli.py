"""Command-line entry point: ``hetbias <command> [options]``."""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import DataError, InfeasibleMoments, NumericalFailure
from .experiments import ExperimentConfig, run_invariance_study
from .formats import BadCell, MissingColumn, dumps_json, read_dataset_csv, write_csv
from .inference import RegressionDataset, hccme_report, screening
from .minimax import (
    Normalization,
    a_star_analytic,
    bias_profile,
    minimax_a_numeric,
    normal_asymptotic_profile,
    normalize,
    worst_case_negative,
    worst_case_positive,
)
from .regressors import MomentTarget, generate_with_moments, standardize, three_point_sequence

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4
EXIT_NO_FILE = 5
EXIT_NO_COLUMN = 6
EXIT_BAD_CELL = 7

EPILOG = """\
exit codes:
  0  success
  1  validate: at least one check failed
  2  usage error (bad or missing flags)
  3  data error (constant regressor, too few rows, singular controls, ...)
  4  numerical failure (no bracket for a*, moment matching failed)
  5  input file not found
  6  requested column missing from the CSV header
  7  empty or non-numeric cell in a requested column

The seed defaults to $HETBIAS_SEED, then 1; it is always echoed.
"""

DEFAULT_SEED = 1


class UsageError(Exception):
    pass


def _resolve_seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get("HETBIAS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"HETBIAS_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _snap_three_point(t: int, m: float) -> float:
    """Accept an M typed with limited digits if T/(2 M^2) is nearly integral."""
    k_real = t / (2.0 * m * m)
    k = round(k_real)
    if k >= 1 and abs(k_real - k) <= 1e-6 * k_real:
        return math.sqrt(t / (2.0 * k))
    return m


def _regressor(args, config):
    if args.three_point:
        t = int(args.three_point[0])
        m = _snap_three_point(t, args.three_point[1])
        config["source"] = {"kind": "three-point", "t": t, "m": m}
        return three_point_sequence(t, m)
    if args.generate:
        t, skew, kurt = args.generate
        seed = _resolve_seed(args.seed)
        config["source"] = {"kind": "generate", "t": int(t), "skewness": skew,
                            "kurtosis": kurt}
        config["seed"] = seed
        return generate_with_moments(int(t), MomentTarget(skew, kurt), seed)
    if args.csv:
        if not args.col:
            raise UsageError("--csv needs --col")
        data = read_dataset_csv(args.csv, [args.col])
        config["source"] = {"kind": "csv", "path": args.csv, "column": args.col}
        return standardize(data[args.col])
    raise UsageError("choose a regressor source: --three-point, --generate or --csv")


def _add_source(p, asymptotic=False):
    g = p.add_argument_group("regressor source")
    g.add_argument("--three-point", nargs=2, type=float, metavar=("T", "M"),
                   help="symmetric regressor on {-M, 0, M}")
    g.add_argument("--generate", nargs=3, type=float, metavar=("T", "SKEW", "KURT"),
                   help="random regressor with exactly matched sample moments")
    g.add_argument("--csv", metavar="PATH")
    g.add_argument("--col", metavar="NAME")
    if asymptotic:
        g.add_argument("--asymptotic-normal", action="store_true",
                       help="large-T curves for a normal regressor")
    p.add_argument("--seed", type=int)
    p.add_argument("--u", type=float, default=1.0, help="variance bound U (default 1)")
    p.add_argument("--normalization", choices=[n.value for n in Normalization],
                   default=Normalization.T_OVER_U.value)


def _emit(text: str, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(command, config):
    meta = {"command": command, "version": __version__}
    meta.update(config)
    return meta


def cmd_bias_curve(args) -> int:
    if args.a_steps < 1:
        raise UsageError("--a-steps must be at least 1")
    if args.a_steps > 1 and not args.a_max > args.a_min:
        raise UsageError("--a-max must exceed --a-min")
    if args.a_min < 0:
        raise UsageError("--a-min must be non-negative")
    if not args.u > 0:
        raise UsageError("--u must be positive")
    grid = np.linspace(args.a_min, args.a_max, args.a_steps)
    config = {"a_min": args.a_min, "a_max": args.a_max, "a_steps": args.a_steps,
              "u": args.u}
    if args.asymptotic_normal:
        # Large-T limits only exist on the T^2 s^2 / U scale.
        config["source"] = {"kind": "asymptotic-normal"}
        config["normalization"] = Normalization.T2S2_OVER_U.value
        prof = normal_asymptotic_profile(grid)
    else:
        reg = _regressor(args, config)
        config["normalization"] = args.normalization
        config["t"] = reg.t_count
        config["kurtosis"] = reg.kurtosis
        config["skewness"] = reg.skewness
        prof = bias_profile(reg, grid, args.u, args.normalization)
    config.setdefault("seed", None)
    rows = [[a, p, m, "grid"] for a, p, m in zip(prof.a_grid, prof.b_plus, prof.b_minus)]
    rows.append([prof.a_star, prof.b_plus_at_star, prof.b_minus_at_star, "crossing"])
    _emit(write_csv(_meta(args.command, config), ["a", "b_plus", "b_minus", "kind"], rows),
          args.output)
    return EXIT_OK


def cmd_minimax(args) -> int:
    if not args.u > 0:
        raise UsageError("--u must be positive")
    config = {"u": args.u, "normalization": args.normalization}
    reg = _regressor(args, config)
    config.setdefault("seed", None)
    a_num = minimax_a_numeric(reg, args.u)
    a_an = a_star_analytic(reg.kurtosis, reg.t_count)

    def scaled(v):
        return normalize(v, args.normalization, reg.t_count, reg.s_squared, args.u)

    result = {
        "a_star_numeric": a_num,
        "a_star_analytic": a_an,
        "agreement": abs(a_num - a_an),
        "kurtosis": reg.kurtosis,
        "skewness": reg.skewness,
        "t": reg.t_count,
        "b_plus_at_star": scaled(worst_case_positive(a_num, reg, args.u)[0]),
        "b_minus_at_star": scaled(worst_case_negative(a_num, reg, args.u)[0]),
    }
    _emit(dumps_json({"command": "minimax", "config": config, "result": result,
                      "version": __version__}), args.output)
    return EXIT_OK


def _cell_tag(skew, kurt):
    return f"K{format(kurt, 'g')}_S{format(skew, 'g')}"


def table1_csv(cfg: ExperimentConfig, normalization: str, long: bool = False) -> str:
    rows = run_invariance_study(cfg)
    meta = _meta("table1", {
        "t": cfg.t_count, "kurtosis": list(cfg.kurtosis_targets),
        "skewness": list(cfg.skewness_targets), "samples": cfg.samples_per_cell,
        "seed": cfg.seed, "u": cfg.bound_u, "normalization": normalization,
        "layout": "long" if long else "wide",
    })
    if long:
        header = ["cell", "sample", "target_skewness", "target_kurtosis", "skewness",
                  "kurtosis", "a_star_numeric", "a_star_analytic", "max_bias_raw",
                  "max_bias_t_over_u", "max_bias_t2s2_over_u", "failed"]
        body = [[r.cell_index, r.sample_index, r.target_skewness, r.target_kurtosis,
                 r.skewness, r.kurtosis, r.a_star_numeric, r.a_star_analytic,
                 r.max_bias_raw, r.max_bias_t_over_u, r.max_bias_t2s2_over_u, r.failed]
                for r in rows]
        return write_csv(meta, header, body)
    header = ["sample"]
    for s, k in cfg.cells:
        tag = _cell_tag(s, k)
        header += [f"a_star_{tag}", f"mb_{tag}"]
    n = cfg.samples_per_cell
    body = []
    for i in range(n):
        line = [i + 1]
        for ci in range(len(cfg.cells)):
            r = rows[ci * n + i]
            line += [r.a_star_numeric, r.max_bias(normalization)]
        body.append(line)
    return write_csv(meta, header, body)


def cmd_table1(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    cfg = ExperimentConfig(t_count=args.t, kurtosis_targets=args.kurtosis,
                           skewness_targets=args.skewness, samples_per_cell=args.samples,
                           seed=_resolve_seed(args.seed), bound_u=args.u)
    _emit(table1_csv(cfg, args.normalization, args.long), args.output)
    return EXIT_OK


def _human_report(rep, verdict=None) -> str:
    def g(v):
        return "-" if v is None else format(v, ".4g")

    out = [f"slope {g(rep.beta2)}  intercept {g(rep.beta1)}  T={rep.t_count}  "
           f"K={g(rep.kurtosis_used)}  a*={g(rep.a_star_used)}",
           f"{'estimator':<18}{'a':>10}{'variance':>12}{'std.err':>12}{'max bias':>12}"]
    for e in rep.entries:
        mark = "*" if e.label == "MinimaxFinite" else " "
        out.append(f"{mark}{e.label:<17}{g(e.a):>10}{g(e.variance_estimate):>12}"
                   f"{g(e.std_error):>12}{g(e.worst_case_bias_bound):>12}")
    lo, hi = rep.significance_interval_finite
    out.append(f"interval (a = a*, multiplier 2): [{g(lo)}, {g(hi)}]")
    lo, hi = rep.significance_interval
    out.append(f"interval (a = K+1, multiplier 2): [{g(lo)}, {g(hi)}]")
    out.append(f"significant ({rep.interval_rule} rule): {'yes' if rep.significant else 'no'}")
    if rep.degenerate_sample_size:
        out.append("warning: K + 1 >= T, finite-sample a* undefined; used K + 1")
    if verdict is not None:
        out.append(f"screening verdict: {verdict.verdict.value}")
    return "\n".join(out) + "\n"


def cmd_audit(args) -> int:
    if args.u is not None and not args.u > 0:
        raise UsageError("--u must be positive")
    controls = [c.strip() for c in args.controls.split(",") if c.strip()] if args.controls else []
    cols = read_dataset_csv(args.csv, [args.y, args.x, *controls])
    w = np.column_stack([cols[c] for c in controls]) if controls else None
    data = RegressionDataset(cols[args.y], cols[args.x], w)
    rule = "asymptotic" if args.asymptotic_interval else "finite"
    config = {"csv": args.csv, "y": args.y, "x": args.x, "controls": controls,
              "u": args.u, "interval_rule": rule}
    verdict = None
    if controls:
        verdict = screening(data, args.u, rule)
        rep = verdict.alone
    else:
        rep = hccme_report(data, args.u, rule)
    if args.json:
        result = {"report": rep.as_dict()}
        if verdict is not None:
            result["screening"] = verdict.as_dict()
        _emit(dumps_json({"command": "audit", "config": config, "result": result,
                          "version": __version__}), args.output)
    else:
        _emit(_human_report(rep, verdict), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_all

    if args.reps < 1000:
        raise UsageError("--reps must be at least 1000")
    seed = _resolve_seed(args.seed)
    print(f"# validate seed={seed} reps={args.reps}")
    results = run_all(seed, args.reps)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetbias", epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Exact bias and minimax scaling of Eicker-White variance estimates.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    for name in ("bias-curve", "figure1-data"):
        p = sub.add_parser(name, epilog=EPILOG, formatter_class=fmt,
                           help="worst-case bias curves over a grid of a"
                           if name == "bias-curve" else "alias: bias-curve --asymptotic-normal")
        _add_source(p, asymptotic=True)
        p.add_argument("--a-min", type=float, default=0.0)
        p.add_argument("--a-max", type=float, default=8.0)
        p.add_argument("--a-steps", type=int, default=161)
        p.add_argument("--output", "-o")
        p.set_defaults(func=cmd_bias_curve)

    p = sub.add_parser("minimax", epilog=EPILOG, formatter_class=fmt,
                       help="numeric and closed-form minimax a (JSON)")
    _add_source(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_minimax)

    p = sub.add_parser("table1", epilog=EPILOG, formatter_class=fmt,
                       help="invariance study over (kurtosis, skewness) cells (CSV)")
    p.add_argument("--t", type=int, default=100)
    p.add_argument("--kurtosis", type=float, nargs="+", default=[3.0, 4.0])
    p.add_argument("--skewness", type=float, nargs="+", default=[0.0, 1.0])
    p.add_argument("--samples", type=int, default=6)
    p.add_argument("--seed", type=int)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--normalization", choices=[n.value for n in Normalization],
                   default=Normalization.T_OVER_U.value)
    p.add_argument("--long", action="store_true", help="one row per generated sequence")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("audit", epilog=EPILOG, formatter_class=fmt,
                       help="robust slope inference on a CSV dataset")
    p.add_argument("--csv", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--controls", help="comma-separated control columns (enables screening)")
    p.add_argument("--u", type=float, help="variance bound for worst-case bias")
    p.add_argument("--asymptotic-interval", action="store_true",
                   help="decide significance with a = K+1 instead of finite-sample a*")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("validate", epilog=EPILOG, formatter_class=fmt,
                       help="run the oracle checks end to end")
    p.add_argument("--reps", type=int, default=20000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "figure1-data":
        args.asymptotic_normal = True
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hetbias: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleMoments as exc:
        print(f"hetbias: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"hetbias: error: {exc}", file=sys.stderr)
        return EXIT_NO_FILE
    except MissingColumn as exc:
        print(f"hetbias: error: {exc.args[0]}", file=sys.stderr)
        return EXIT_NO_COLUMN
    except BadCell as exc:
        print(f"hetbias: error: {exc}", file=sys.stderr)
        return EXIT_BAD_CELL
    except DataError as exc:
        print(f"hetbias: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"hetbias: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
