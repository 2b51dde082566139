"""Command-line front end: ``rflogit {simulate,fit,predict,mc}``.

Exit codes: 0 ok, 2 usage, 3 parse, 4 dimension, 5 single class,
6 separation, 7 convergence.
"""

import argparse
import logging
import os
import sys

import numpy as np

from .csvio import (
    parse_curves_csv,
    parse_response_csv,
    write_curves_csv,
    write_predictions_csv,
    write_response_csv,
)
from .errors import DimensionError, InvalidArgumentError, RFLogitError
from .funcsample import presmooth
from .modelfile import load_model, save_model
from .montecarlo import McConfig, run_mc, write_runs_csv, write_summary_csv
from .pipeline import METHODS, fit_model
from .simgen import CONTAMINATION_LEVELS, SimConfig, contaminate, generate

logger = logging.getLogger("rflogit")

EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _method_list(text):
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {', '.join(METHODS)}")
    return methods


def _check_contamination(cl):
    if not 0.0 <= cl < 0.5:
        raise InvalidArgumentError(f"contamination must lie in [0, 0.5), got {cl}")
    if not any(np.isclose(cl, g) for g in CONTAMINATION_LEVELS):
        logger.warning("contamination %g is outside the standard grid %s", cl, CONTAMINATION_LEVELS)


def cmd_simulate(args):
    _check_contamination(args.contamination)
    n_train = args.n_train if args.n_train is not None else int(round(0.7 * args.n))
    cfg = SimConfig(n=args.n, grid_points=args.grid, n_train=n_train,
                    contamination=args.contamination, seed=args.seed,
                    coef_param=args.coef_param, response_flip=args.response_flip)
    rng = np.random.default_rng(args.seed)
    raw, y, _ = generate(cfg, rng)
    train = np.arange(n_train)
    idx = np.empty(0, dtype=int)
    if args.contamination > 0:
        raw, y, idx = contaminate(raw, y, cfg, rng, train_idx=train)
    os.makedirs(args.out, exist_ok=True)
    write_curves_csv(raw, os.path.join(args.out, "curves.csv"))
    write_response_csv(y, os.path.join(args.out, "response.csv"))
    flagged = np.zeros(cfg.n, dtype=int)
    flagged[idx] = 1
    with open(os.path.join(args.out, "design.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("index,train,contaminated\n")
        for i in range(cfg.n):
            fh.write(f"{i},{int(i < n_train)},{flagged[i]}\n")
    print(f"wrote {cfg.n} curves on {cfg.grid_points} points ({idx.size} contaminated) to {args.out}")
    return 0


def _load_curves(path, window):
    return presmooth(parse_curves_csv(path), window)


def cmd_fit(args):
    raw = _load_curves(args.curves, args.smooth_window)
    y = parse_response_csv(args.response)
    if y.size != raw.n:
        raise DimensionError(f"{raw.n} curves but {y.size} responses")
    model = fit_model(raw, y, args.method, num_basis=args.num_basis,
                      var_threshold=args.var_threshold, seed=args.seed)
    save_model(model, args.out)
    fit = model.fit
    print(f"M={model.basis.num_functions} K={model.eigen.K} "
          f"explained={float(model.eigen.explained[-1])!r} "
          f"rejected={int(np.sum(fit.weights == 0))} objective={fit.objective_value!r} "
          f"converged={fit.converged}")
    return 0


def cmd_predict(args):
    model = load_model(args.model)
    raw = _load_curves(args.curves, args.smooth_window)
    prob, labels = model.predict(raw)
    write_predictions_csv(prob, labels, args.out)
    return 0


def cmd_mc(args):
    for cl in args.contamination_list:
        _check_contamination(cl)
    cfg = McConfig(runs=args.runs, contamination_levels=args.contamination_list,
                   methods=args.methods, seed=args.seed, num_basis=args.num_basis,
                   coef_param=args.coef_param, response_flip=args.response_flip,
                   threads=args.threads)
    if cfg.runs < 1 or cfg.threads < 1:
        raise InvalidArgumentError("--runs and --threads must be positive")
    results, records = run_mc(cfg)
    write_summary_csv(results, args.out)
    if args.runs_out:
        write_runs_csv(records, args.runs_out)
    for res in results.values():
        fails = len(res.failures)
        if res.imse:
            print(f"{res.method} cl={res.contamination!r}: median IMSE={res.median_imse:.4f} "
                  f"median AUC={res.median_auc:.4f} median fit={np.median(res.fit_seconds):.3f}s "
                  f"failed={fails}")
        else:
            print(f"{res.method} cl={res.contamination!r}: all {fails} fits failed")
    return 0


def build_parser():
    p = _Parser(prog="rflogit", description="Robust functional logistic regression.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="generate a seeded simulated dataset")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--grid", type=int, default=201, help="number of grid points")
    s.add_argument("--contamination", type=float, default=0.0)
    s.add_argument("--n-train", type=int, default=None, help="training rows (default 70%% of n)")
    s.add_argument("--coef-param", choices=("variance", "sd"), default="variance")
    s.add_argument("--response-flip", choices=("original", "outlier"), default="original",
                   help="flip the replaced row's response, or one drawn from the outlier")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit a model to curves and responses")
    f.add_argument("--curves", required=True)
    f.add_argument("--response", required=True)
    f.add_argument("--method", choices=METHODS, default="rfpca-wby")
    f.add_argument("--var-threshold", type=float, default=0.99)
    f.add_argument("--num-basis", type=int, default=None, help="skip the automatic selection")
    f.add_argument("--smooth-window", type=int, default=0, help="odd moving-average width (off)")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", required=True, help="model file (JSON)")
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("predict", help="predict probabilities for new curves")
    r.add_argument("--model", required=True)
    r.add_argument("--curves", required=True)
    r.add_argument("--smooth-window", type=int, default=0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_predict)

    m = sub.add_parser("mc", help="Monte-Carlo comparison on simulated data")
    m.add_argument("--runs", type=int, default=50)
    m.add_argument("--contamination-list", type=_float_list, default=(0.0,))
    m.add_argument("--methods", type=_method_list, default=METHODS)
    m.add_argument("--num-basis", type=int, default=None)
    m.add_argument("--coef-param", choices=("variance", "sd"), default="variance")
    m.add_argument("--response-flip", choices=("original", "outlier"), default="original",
                   help="flip the replaced row's response, or one drawn from the outlier")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--out", required=True, help="summary CSV")
    m.add_argument("--runs-out", default=None, help="optional per-fit CSV")
    m.set_defaults(func=cmd_mc)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RFLogitError as exc:
        print(f"rflogit: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"rflogit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
