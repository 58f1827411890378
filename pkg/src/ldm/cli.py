"""Command-line interface: train, predict, cv, margins, eval.

Exit codes are stable: 0 success, 1 usage error, 2 data error, 3 solver
error.  Every subcommand that consumes randomness takes a --seed and is
deterministic end to end for a fixed seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import kernel_ldm, linear_ldm, model_io, model_selection
from .analysis import accuracy, compute_margins, write_cumulative_csv
from .data import apply_normalizer, fit_normalizer, format_real, load_sparse_file
from .errors import DataError, LdmError, SolverError
from .kernels import LINEAR, RBF, KernelSpec, rbf_width_base


class UsageError(LdmError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise UsageError(f"{self.prog}: {message}")


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be nonnegative")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="ldm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model and write it to disk")
    p_train.add_argument("data")
    p_train.add_argument("--solver", choices=["kernel", "linear"], default="kernel")
    p_train.add_argument("--kernel", choices=[LINEAR, RBF], default=LINEAR)
    p_train.add_argument("--width", type=_positive_float, default=None,
                         help="rbf width; defaults to the mean pairwise distance")
    p_train.add_argument("--c", type=_positive_float, default=1.0)
    p_train.add_argument("--lambda1", type=_nonneg_float, default=0.0)
    p_train.add_argument("--lambda2", type=_nonneg_float, default=0.0)
    p_train.add_argument("--epochs", type=_positive_int, default=None)
    p_train.add_argument("--tol", type=_positive_float, default=None)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--eta0", type=_positive_float, default=None)
    p_train.add_argument("--t0", type=_positive_int, default=None)
    p_train.add_argument("--model-out", required=True)

    p_pred = sub.add_parser("predict", help="write one +1/-1 prediction per instance")
    p_pred.add_argument("model")
    p_pred.add_argument("data")
    p_pred.add_argument("-o", "--out", default=None, help="output path (default stdout)")
    p_pred.add_argument("--scores", action="store_true", help="append raw scores")

    p_cv = sub.add_parser("cv", help="grid search by k-fold cross-validation")
    p_cv.add_argument("data")
    p_cv.add_argument("--solver", choices=["kernel", "linear"], default="kernel")
    p_cv.add_argument("--kernel", choices=[LINEAR, RBF], default=LINEAR)
    p_cv.add_argument("--k", type=_positive_int, default=5)
    p_cv.add_argument("--seed", type=int, default=0)
    p_cv.add_argument("--c-grid", type=_float_list, default=None)
    p_cv.add_argument("--lambda-grid", type=_float_list, default=None)
    p_cv.add_argument("--width-grid", type=_float_list, default=None,
                      help="multipliers of the per-fold mean pairwise distance")
    p_cv.add_argument("--epochs", type=_positive_int, default=None)
    p_cv.add_argument("--tol", type=_positive_float, default=None)
    p_cv.add_argument("--log-csv", default=None)

    p_marg = sub.add_parser("margins", help="margin summary and cumulative curve")
    p_marg.add_argument("model")
    p_marg.add_argument("data")
    p_marg.add_argument("--csv-out", default=None)

    p_eval = sub.add_parser("eval", help="accuracy of a predictions file")
    p_eval.add_argument("predictions")
    p_eval.add_argument("data")

    return parser


def _decision_values(model, instances) -> np.ndarray:
    if isinstance(model, kernel_ldm.KernelLdmModel):
        return kernel_ldm.decision_values(model, instances)
    return linear_ldm.decision_values_linear(model, instances)


def cmd_train(args) -> int:
    dataset = load_sparse_file(args.data)
    if args.solver == "kernel":
        width = args.width
        if args.kernel == RBF and width is None:
            normalized = apply_normalizer(fit_normalizer(dataset), dataset)
            width = rbf_width_base(normalized, seed=args.seed)
        spec = KernelSpec(args.kernel, width)
        params = kernel_ldm.KernelLdmParams(
            lambda1=args.lambda1,
            lambda2=args.lambda2,
            c=args.c,
            tolerance=args.tol if args.tol is not None else 1e-3,
            max_epochs=args.epochs if args.epochs is not None else 1000,
            seed=args.seed,
        )
        model, report = kernel_ldm.solve(dataset, spec, params)
        print(f"trained kernel model on {dataset.m} instances")
        print(
            f"converged={'yes' if report.converged else 'no'} "
            f"epochs={report.epochs} steps={report.steps} "
            f"kkt={format_real(report.kkt_violation)}"
        )
        if report.objective_trace:
            print(f"dual_objective={format_real(report.objective_trace[-1])}")
        print(f"loo_bound={format_real(report.loo_bound)}")
    else:
        params = linear_ldm.LinearLdmParams(
            lambda1=args.lambda1,
            lambda2=args.lambda2,
            c=args.c,
            epochs=args.epochs if args.epochs is not None else 5,
            eta0=args.eta0,
            t0=args.t0,
            seed=args.seed,
        )
        model, report = linear_ldm.train(dataset, params)
        print(f"trained linear model on {dataset.m} instances, dimension {dataset.dimension}")
        print(f"epochs={report.epochs} steps={report.steps}")
        print(f"objective={format_real(report.objective_trace[-1])}")
    model_io.save_model(args.model_out, model, args.c, args.lambda1, args.lambda2)
    print(f"model written to {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    model = model_io.load_model(args.model)
    dataset = load_sparse_file(args.data)
    scores = _decision_values(model, dataset.instances)
    lines = []
    for score in scores:
        label = "+1" if score >= 0.0 else "-1"
        lines.append(f"{label}\t{format_real(float(score))}" if args.scores else label)
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def cmd_cv(args) -> int:
    dataset = load_sparse_file(args.data)
    grid_kwargs = {}
    if args.c_grid:
        grid_kwargs["c_values"] = args.c_grid
    if args.lambda_grid:
        grid_kwargs["lambda_values"] = args.lambda_grid
    if args.width_grid:
        grid_kwargs["width_multipliers"] = args.width_grid
    grid = model_selection.SearchGrid(**grid_kwargs)
    kernel_options = {}
    linear_options = {}
    if args.epochs is not None:
        kernel_options["max_epochs"] = args.epochs
        linear_options["epochs"] = args.epochs
    if args.tol is not None:
        kernel_options["tolerance"] = args.tol
    result = model_selection.cross_validate(
        dataset,
        solver=args.solver,
        kernel_kind=args.kernel,
        grid=grid,
        k=args.k,
        seed=args.seed,
        kernel_options=kernel_options,
        linear_options=linear_options,
    )
    for config, mean in result.means:
        width = "na" if config.width_multiplier is None else format_real(config.width_multiplier)
        print(
            f"c={format_real(config.c)} lambda1={format_real(config.lambda1)} "
            f"lambda2={format_real(config.lambda2)} width={width} "
            f"mean_accuracy={format_real(mean)}"
        )
    if args.log_csv:
        model_selection.write_cv_log(result, args.log_csv)
    best = result.best
    best_width = "na" if best.width_multiplier is None else format_real(best.width_multiplier)
    print(
        f"BEST c={format_real(best.c)} lambda1={format_real(best.lambda1)} "
        f"lambda2={format_real(best.lambda2)} width={best_width}"
    )
    return 0


def cmd_margins(args) -> int:
    model = model_io.load_model(args.model)
    dataset = load_sparse_file(args.data)
    scores = _decision_values(model, dataset.instances)
    stats = compute_margins(scores, dataset.labels)
    if args.csv_out:
        write_cumulative_csv(stats, args.csv_out)
    print(
        f"mean={format_real(stats.mean)} variance={format_real(stats.variance)} "
        f"min={format_real(stats.minimum)}"
    )
    return 0


def cmd_eval(args) -> int:
    with open(args.predictions, "r", encoding="utf-8") as fh:
        tokens = [line.split()[0] for line in fh if line.strip()]
    try:
        preds = np.array([float(int(tok)) for tok in tokens])
    except ValueError as exc:
        raise DataError(f"bad prediction token: {exc}") from exc
    if preds.size and not np.all(np.abs(preds) == 1.0):
        raise DataError("predictions must be +1 or -1")
    dataset = load_sparse_file(args.data)
    if preds.size != dataset.m:
        raise DataError(
            f"length mismatch: {preds.size} predictions vs {dataset.m} instances"
        )
    print(f"accuracy={accuracy(preds, dataset.labels):.6f}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "margins": cmd_margins,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
