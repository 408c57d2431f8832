"""Command line entry point: single-shot computations and the experiment runs."""
from __future__ import annotations
from pathlib import Path
from typing import Any, Dict, List, Optional
import argparse
import json
import logging
import math
import sys

import numpy as np
from pydantic import ValidationError

from .logic import asymptotics, density, spectral, ssl
from .logic.config_handler import AppConfig, AppConfigHandler
from .logic.graph import build_graph
from .logic.harness import ExperimentRunner, config_plane
from .model.asymptotics_model import TVariant
from .model.exceptions import BigSslException, InvalidInputError, VariantInconsistencyError
from .model.graph_model import KernelParams
from .model.signal_model import LabeledSet
from .services import io_handler
from .services.logging_setup import build_logger

INTERPOLATION_METHODS = ("big-ls", "big-min", "harmonic")
EXPERIMENTS = ("fig2", "fig3", "recovery-demo", "cut-scaling", "bias-check")


class JsonArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as a JSON document on stderr, exit code 2."""

    def error(self, message):
        _print_error("UsageError", message)
        self.exit(2)


def _print_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _json_float(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _dump(document: Any) -> None:
    print(json.dumps(document, indent=4, default=str))


# -----------------------------
# ARGUMENTS
# -----------------------------
# flags whose dest is an AppConfig field; everything else is an I/O argument
def _add_config_flags(parser: argparse.ArgumentParser, *names: str) -> None:
    specs = {
        "model": dict(type=Path, help="GMM model JSON document"),
        "plane_normal": dict(type=float, nargs="+"),
        "plane_offset": dict(type=float),
        "offsets": dict(type=float, nargs="+"),
        "sigma": dict(type=float),
        "truncation": dict(type=float),
        "sample_sizes": dict(type=int, nargs="+"),
        "orders": dict(type=int, nargs="+"),
        "fig3_n": dict(type=int),
        "fig3_m": dict(type=int),
        "trials": dict(type=int),
        "base_seed": dict(type=int),
        "workers": dict(type=int),
        "min_side_points": dict(type=int),
        "variant": dict(choices=[v.value for v in TVariant]),
        "bias_n": dict(type=int),
        "bias_sigma": dict(type=float),
        "bias_orders": dict(type=int, nargs="+"),
        "bias_trials": dict(type=int),
        "recovery_n": dict(type=int),
        "recovery_sigma": dict(type=float),
        "recovery_step": dict(type=int),
        "cut_n": dict(type=int),
        "cut_trials": dict(type=int),
        "eigen_cap": dict(type=int),
        "coefficient_tol": dict(type=float),
        "cutoff_order": dict(type=int),
        "residual_tol": dict(type=float),
        "lstsq_rcond": dict(type=float),
        "threshold": dict(type=float),
        "schedule_x": dict(type=float),
        "schedule_y": dict(type=float),
        "log_base": dict(type=float),
        "output_dir": dict(type=Path),
        "log_file": dict(type=Path),
    }
    for name in names:
        parser.add_argument("--" + name.replace("_", "-"), dest=name, default=None, **specs[name])


def build_parser() -> argparse.ArgumentParser:
    parser = JsonArgumentParser(prog="big-ssl", description=__doc__)
    parser.add_argument("--config", type=Path, default=None, help="JSON config document")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=JsonArgumentParser)

    p = commands.add_parser("sample", help="draw points from the mixture")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="defaults to base_seed")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--labels-out", type=Path, default=None,
                   help="also write boundary-indicator labels for the first --labeled points")
    p.add_argument("--labeled", type=int, default=None, help="labeled prefix size (default: all points)")
    _add_config_flags(p, "model", "base_seed", "plane_normal", "plane_offset")

    p = commands.add_parser("build-graph", help="Gaussian-kernel graph of a point cloud as an edge list")
    p.add_argument("--points", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_config_flags(p, "sigma", "truncation")

    p = commands.add_parser("bandwidth", help="omega_m of the indicator of one side of the boundary")
    p.add_argument("--points", type=Path, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_config_flags(p, "sigma", "truncation", "plane_normal", "plane_offset", "model")

    p = commands.add_parser("interpolate", help="semi-supervised scores from labeled nodes")
    p.add_argument("--points", type=Path, required=True)
    p.add_argument("--labels", type=Path, required=True)
    p.add_argument("--method", choices=INTERPOLATION_METHODS, default="big-ls")
    p.add_argument("--omega", type=float, default=None, help="big-ls cutoff; estimated when omitted")
    p.add_argument("--out", type=Path, required=True)
    _add_config_flags(p, "sigma", "truncation", "eigen_cap", "cutoff_order", "residual_tol",
                      "lstsq_rcond", "threshold")

    p = commands.add_parser("limits", help="asymptotic limits and condition report as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None, help="sample size for the condition report (default fig3_n)")
    _add_config_flags(p, "model", "sigma", "plane_normal", "plane_offset")

    for name in EXPERIMENTS:
        p = commands.add_parser(name, help=f"run the {name} experiment")
        _add_config_flags(p, "model", "plane_normal", "plane_offset", "offsets", "sigma", "truncation",
                          "sample_sizes", "orders", "fig3_n", "fig3_m", "trials", "base_seed", "workers",
                          "min_side_points", "variant", "bias_n", "bias_sigma", "bias_orders",
                          "bias_trials", "recovery_n", "recovery_sigma", "recovery_step", "cut_n",
                          "cut_trials", "eigen_cap", "coefficient_tol", "cutoff_order", "residual_tol",
                          "lstsq_rcond", "threshold", "output_dir", "log_file")

    p = commands.add_parser("schedule", help="(sigma, m) schedule over sample sizes")
    _add_config_flags(p, "model", "sample_sizes", "schedule_x", "schedule_y", "log_base")
    return parser


def load_config(args: argparse.Namespace, logger: Optional[logging.Logger] = None) -> AppConfig:
    """Config file merged over defaults, then command line flags on top."""
    handler = AppConfigHandler(args.config, auto_initialize_if_missing=args.config is None, logger=logger)
    handler.load_from_json()
    updates: Dict[str, Any] = {k: v for k, v in vars(args).items() if k in AppConfig.model_fields}
    if updates.get("model") is not None:
        updates["model"] = io_handler.load_model(updates["model"]).model_dump()
    for key in ("output_dir", "log_file"):
        if updates.get(key) is not None:
            updates[key] = str(updates[key])
    return handler.update_from_dict(updates)


# -----------------------------
# COMMANDS
# -----------------------------
def cmd_sample(args, config: AppConfig, logger: logging.Logger) -> int:
    seed = config.base_seed if args.seed is None else args.seed
    cloud = density.sample(config.model, args.n, seed)
    io_handler.save_point_cloud(cloud, args.out)
    logger.info(f"Wrote {cloud.n} points to {args.out}")
    if args.labels_out is not None:
        size = cloud.n if args.labeled is None else args.labeled
        if not 0 < size <= cloud.n:
            raise InvalidInputError(f"--labeled must be in 1..{cloud.n}, got {size}")
        s = density.indicator_from_boundary(cloud, config_plane(config))
        labeled = LabeledSet.from_signal(s, np.arange(size))
        io_handler.save_labels(labeled, args.labels_out)
        logger.info(f"Wrote {labeled.size} labels to {args.labels_out}")
    return 0


def _graph_from_points(path: Path, config: AppConfig):
    cloud = io_handler.load_point_cloud(path)
    params = KernelParams(sigma=config.sigma, dimension=cloud.dimension)
    return cloud, build_graph(cloud, params, config.truncation)


def cmd_build_graph(args, config: AppConfig, logger: logging.Logger) -> int:
    _, graph = _graph_from_points(args.points, config)
    header = io_handler.save_graph(graph, args.out)
    logger.info(f"Wrote edge list to {args.out} and header to {header}")
    return 0


def cmd_bandwidth(args, config: AppConfig, logger: logging.Logger) -> int:
    cloud, graph = _graph_from_points(args.points, config)
    s = density.indicator_from_boundary(cloud, config_plane(config))
    omega = spectral.bandwidth_estimate(graph, s, args.m)
    _dump({"n": graph.n, "m": args.m, "sigma": config.sigma, "inside": int(s.sum()), "omega": omega})
    return 0


def cmd_interpolate(args, config: AppConfig, logger: logging.Logger) -> int:
    _, graph = _graph_from_points(args.points, config)
    labeled = io_handler.load_labels(args.labels)
    labeled.check_range(graph.n)

    if args.method == "harmonic":
        scores = ssl.harmonic_interpolate(graph, labeled)
    else:
        basis = spectral.fourier_basis(graph, config.eigen_cap)
        if args.method == "big-min":
            result = ssl.interpolate_min_bandwidth(basis, labeled, config.residual_tol, config.lstsq_rcond)
            logger.info(f"Minimum bandwidth {result.omega_min:.6g} with {result.n_components} components")
            scores = result.signal
        else:
            omega = args.omega
            if omega is None:
                omega = spectral.cutoff_frequency(graph, labeled, config.cutoff_order, logger=logger)
                logger.info(f"Estimated cutoff frequency {omega:.6g}")
            scores = ssl.interpolate_ls(basis, labeled, omega, config.lstsq_rcond)

    io_handler.save_scores(ssl.make_prediction(scores, config.threshold), args.out)
    return 0


def _prediction_or_none(config: AppConfig, plane, m: int, variant: TVariant) -> Optional[float]:
    try:
        return asymptotics.finite_m_prediction(config.model, plane, m, config.sigma, variant)
    except VariantInconsistencyError:
        return None


def cmd_limits(args, config: AppConfig, logger: logging.Logger) -> int:
    plane = config_plane(config)
    n = config.fig3_n if args.n is None else args.n
    report = asymptotics.check_conditions(n, config.sigma, args.m, config.model.dimension)
    _dump({
        "m": args.m,
        "sigma": config.sigma,
        "plane": plane.model_dump(),
        "region_mass": density.region_mass(config.model, plane),
        "limit_bandwidth": asymptotics.limit_bandwidth(config.model, plane),
        "cut_limit": asymptotics.cut_limit(config.model, plane),
        "finite_m_prediction": {v.value: _prediction_or_none(config, plane, args.m, v) for v in TVariant},
        "bias_limit": {v.value: asymptotics.bias_limit(config.model, plane, args.m, v) for v in TVariant},
        "t_coefficient": {v.value: asymptotics.t_coefficient(args.m, v) for v in TVariant},
        "conditions": {k: _json_float(v) if isinstance(v, float) else v for k, v in report.as_dict().items()},
    })
    return 0


def cmd_experiment(args, config: AppConfig, logger: logging.Logger) -> int:
    runner = ExperimentRunner(config, logger=logger)
    run = {
        "fig2": runner.run_fig2,
        "fig3": runner.run_fig3,
        "recovery-demo": runner.run_recovery_demo,
        "cut-scaling": runner.run_cut_scaling,
        "bias-check": runner.run_bias_check,
    }[args.command]
    output = run()
    _dump({"command": args.command, "csv": output.csv_path, "svg": output.svg_paths})
    return 0


def cmd_schedule(args, config: AppConfig, logger: logging.Logger) -> int:
    rows = asymptotics.schedule_sweep(config.sample_sizes, config.schedule_x, config.schedule_y,
                                      config.model.dimension, config.log_base)
    _dump([{k: _json_float(v) if isinstance(v, float) else v for k, v in row.items()} for row in rows])
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "build-graph": cmd_build_graph,
    "bandwidth": cmd_bandwidth,
    "interpolate": cmd_interpolate,
    "limits": cmd_limits,
    "schedule": cmd_schedule,
    **{name: cmd_experiment for name in EXPERIMENTS},
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        logger = build_logger("big_ssl", level=getattr(logging, args.log_level), log_file=config.log_file)
        return COMMANDS[args.command](args, config, logger)
    except (BigSslException, ValidationError, OSError, ValueError) as e:
        _print_error(type(e).__name__, str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
