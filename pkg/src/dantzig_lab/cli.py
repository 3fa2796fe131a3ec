"""Command-line front end.

Every subcommand prints one JSON document to standard output.  Exit status
is 0 on success, 1 on a usage or input error and 2 when a numerical
routine fails.  Options may also be given in a JSON file via ``--config``;
keys use the option names with dashes replaced by underscores, and flags on
the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, conditions, cv, estimators, experiments, problem
from .errors import BudgetExceededError, DantzigLabError, NumericalError
from .serialization import dumps


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common():
    parent = _Parser(add_help=False)
    parent.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    parent.add_argument("--config", type=Path, help="JSON file of option defaults")
    return parent


def _data(parent, response=True):
    parent.add_argument("--design", type=Path, required=True, help="headerless n x p CSV")
    if response:
        parent.add_argument("--response", type=Path, required=True, help="single-column CSV")
    parent.add_argument("--normalize", action="store_true", help="rescale columns to |X_j|^2 = n first")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="dantzig-lab", description="Dantzig selector and Lasso laboratory.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", parents=[common], help="draw a synthetic problem and write CSV files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--design-kind", default="iid-gaussian", choices=problem.DESIGN_KINDS)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.0, help="equicorrelation for custom-correlation")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("fit", parents=[common], help="fit one estimator")
    _data(p)
    p.add_argument("--method", default="dantzig", choices=estimators.METHODS)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="penalty; default sigma*sqrt(2 n log p), doubled for the Lasso")
    p.add_argument("--sigma", type=float, help="noise level; estimated when omitted")

    p = sub.add_parser("diagnose", parents=[common], help="restricted eigenvalue and coherence conditions")
    _data(p, response=False)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k-bar", type=float)
    p.add_argument("--k-underline", type=float, default=conditions.DEFAULT_K_UNDERLINE)
    p.add_argument("--M", type=float, default=conditions.DEFAULT_M)
    p.add_argument("--epsilon", type=float, default=conditions.DEFAULT_EPSILON)
    p.add_argument("--budget", type=int, default=conditions.DEFAULT_BUDGET)

    p = sub.add_parser("screen", parents=[common], help="marginal screening")
    _data(p)
    p.add_argument("--sigma", type=float, help="noise level; estimated when omitted")
    p.add_argument("--cutoff", default="standardized", choices=analysis.CUTOFFS)

    p = sub.add_parser("importance", parents=[common], help="candidate-variable importance")
    _data(p)
    p.add_argument("--method", default="lasso", choices=("dantzig", "lasso"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--r2-threshold", type=float, default=analysis.DEFAULT_R2_THRESHOLD)
    p.add_argument("--cutoff", default="standardized", choices=analysis.CUTOFFS)

    p = sub.add_parser("cv", parents=[common], help="cross-validate the penalty")
    _data(p)
    p.add_argument("--method", default="dantzig", choices=("dantzig", "lasso"))
    p.add_argument("--folds", type=int, default=cv.DEFAULT_FOLDS)
    p.add_argument("--grid-c", type=float, default=cv.DEFAULT_GRID_C)
    p.add_argument("--test-size", type=int)
    p.add_argument("--sigma", type=float, help="grid scale; estimated when omitted")
    p.add_argument("--curve-csv", type=Path, help="also write the error curve here")

    p = sub.add_parser("rate-experiment", parents=[common], help="error rate against sqrt(s log p / n)")
    p.add_argument("--n-values", type=_ints, default=[200, 400, 800, 1600])
    p.add_argument("--p-factor", type=int, default=2)
    p.add_argument("--s", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--design-kind", default="iid-gaussian", choices=problem.DESIGN_KINDS)
    p.add_argument("--replications", type=int, default=50)
    p.add_argument("--estimators", default="dantzig,lasso")
    p.add_argument("--lambda-scale", type=float, default=1.0)

    p = sub.add_parser("objective-comparison", parents=[common], help="sup-norm fit against the Dantzig fit")
    defaults = experiments.ComparisonConfig()
    p.add_argument("--n", type=int, default=defaults.n)
    p.add_argument("--p", type=int, default=defaults.p)
    p.add_argument("--n-terms", type=int, default=defaults.n_terms)
    p.add_argument("--sigma", type=float, default=defaults.sigma)
    p.add_argument("--spike-prob", type=float, default=defaults.spike_prob)
    p.add_argument("--spike-scale", type=float, default=defaults.spike_scale)
    p.add_argument("--replications", type=int, default=defaults.replications)
    p.add_argument("--n-test", type=int, default=defaults.n_test)
    p.add_argument("--outlier", type=float, help="shift of one response, in units of sigma")
    return parser


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}")
    if not isinstance(config, dict):
        raise UsageError("config file must hold a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    subparser.set_defaults(**config)
    return parser.parse_args(argv)


def _load(args, response=True):
    for path in (args.design, getattr(args, "response", None) if response else None):
        if path is not None and not Path(path).is_file():
            raise UsageError(f"no such file: {path}")
    return problem.load_problem(args.design, args.response if response else None, normalize=args.normalize)


def _sigma(prob, args):
    if args.sigma is not None:
        return float(args.sigma), "given"
    return estimators.estimate_sigma(prob, seed=args.seed), "estimated"


def _penalty(prob, args, method):
    if args.lam is not None:
        return float(args.lam), "given", None
    sigma_hat, _ = _sigma(prob, args)
    lam = estimators.lambda_default(prob.n, prob.p, sigma_hat)
    return (2.0 * lam if method == "lasso" else lam), "default", sigma_hat


def cmd_simulate(args):
    spec = problem.SyntheticSpec(args.n, args.p, args.s, args.sigma, args.design_kind, args.seed,
                                 args.alpha, args.beta, args.r, not args.no_normalize)
    prob, beta0 = problem.simulate(spec)
    meta = problem.write_problem(prob, args.out, seed=args.seed, beta0=beta0,
                                 extra={"design_kind": args.design_kind, "s": int(beta0.sparsity)})
    meta["files"] = {k: str(Path(args.out) / f"{k}.csv") for k in ("design", "response", "beta0")}
    return meta


def cmd_fit(args):
    prob = _load(args)
    if args.method == "chebyshev":
        res = estimators.chebyshev_fit(prob)
        return {**res.to_dict(), "lambda_source": "given", "sigma_hat": None}
    lam, source, sigma_hat = _penalty(prob, args, args.method)
    res = estimators.fit(prob, args.method, lam)
    return {**res.to_dict(), "lambda_source": source, "sigma_hat": sigma_hat}


def cmd_diagnose(args):
    prob = _load(args, response=False)
    report = conditions.evaluate_conditions(prob, args.s, args.k_bar, args.k_underline, args.M,
                                            args.epsilon, args.budget)
    return report.to_dict()


def _screen_dict(prob, sigma_hat, source, cutoff):
    if sigma_hat <= 0:
        raise UsageError("the noise level must be positive for screening")
    return {
        "screened_in": analysis.screen(prob, sigma_hat, cutoff),
        "statistics": analysis.screen_statistics(prob, sigma_hat),
        "cutoff": analysis.screen_cutoff(prob.n, prob.p, cutoff),
        "cutoff_kind": cutoff,
        "sigma_hat": sigma_hat,
        "sigma_source": source,
    }


def cmd_screen(args):
    prob = _load(args)
    sigma_hat, source = _sigma(prob, args)
    return _screen_dict(prob, sigma_hat, source, args.cutoff)


def cmd_importance(args):
    prob = _load(args)
    sigma_hat, source = _sigma(prob, args)
    lam = args.lam
    if lam is None:
        base = estimators.lambda_default(prob.n, prob.p, sigma_hat)
        lam = 2.0 * base if args.method == "lasso" else base
    res = estimators.fit(prob, args.method, lam)
    if not res.support:
        raise UsageError("the fit selected no variables; lower --lambda")
    report = analysis.candidate_importance_procedure(prob, res, args.K, args.r2_threshold,
                                                     sigma_hat if sigma_hat > 0 else None)
    out = report.to_dict()
    out["fit"] = res.to_dict()
    out["screen"] = _screen_dict(prob, sigma_hat, source, args.cutoff) if sigma_hat > 0 else {}
    return out


def cmd_cv(args):
    prob = _load(args)
    sigma_hat, _ = _sigma(prob, args)
    if sigma_hat <= 0:
        raise UsageError("the grid needs a positive noise level; pass --sigma")
    grid = cv.default_grid(prob, sigma_hat, args.grid_c, method=args.method)
    result = cv.cross_validate(prob, cv.CvPlan(grid, args.method, args.folds, args.test_size, args.seed))
    if args.curve_csv is not None:
        with open(args.curve_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "mean_error", "std_error"])
            for row in zip(result.lambdas, result.mean_error, result.std_error):
                w.writerow([repr(float(v)) for v in row])
    return {**result.to_dict(), "sigma_hat": sigma_hat}


def cmd_rate(args):
    est = tuple(e.strip() for e in args.estimators.split(",") if e.strip())
    bad = [e for e in est if e not in ("dantzig", "lasso")]
    if bad:
        raise UsageError(f"unknown estimators: {', '.join(bad)}")
    config = experiments.ExperimentConfig.rate_grid(
        args.n_values, args.p_factor, args.s, args.sigma, replications=args.replications,
        seed=args.seed, estimators=est, lambda_scale=args.lambda_scale,
    )
    if args.design_kind != "iid-gaussian":
        cells = tuple(experiments.Cell(c.n, c.p, c.s, c.sigma, args.design_kind) for c in config.cells)
        config = experiments.ExperimentConfig(cells, config.replications, config.seed, est, config.lambda_scale)
    return experiments.run_rate_study(config).to_dict()


def cmd_comparison(args):
    config = experiments.ComparisonConfig(
        n=args.n, p=args.p, n_terms=args.n_terms, sigma=args.sigma, spike_prob=args.spike_prob,
        spike_scale=args.spike_scale, replications=args.replications, seed=args.seed,
        n_test=args.n_test, outlier=args.outlier,
    )
    return experiments.run_objective_comparison(config)


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "diagnose": cmd_diagnose,
    "screen": cmd_screen,
    "importance": cmd_importance,
    "cv": cmd_cv,
    "rate-experiment": cmd_rate,
    "objective-comparison": cmd_comparison,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (NumericalError, BudgetExceededError) as exc:
        print(f"dantzig-lab: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (DantzigLabError, ValueError, OSError) as exc:
        print(f"dantzig-lab: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(dumps(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
