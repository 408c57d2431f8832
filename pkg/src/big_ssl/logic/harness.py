from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import pandas as pd
from scipy import stats as sp_stats

from ..model.asymptotics_model import TVariant
from ..model.config_model import AppConfig
from ..model.density_model import Hyperplane
from ..model.exceptions import BigSslException, InfeasibleCutoffError, InvalidInputError
from ..model.graph_model import KernelParams
from ..model.signal_model import LabeledSet
from ..services.logging_setup import build_logger
from ..services.seeding import trial_seed
from ..services.svg_chart import ChartStyle, emit_svg
from . import asymptotics, density, spectral, ssl
from .graph import build_graph, cut_interpretations

SUMMARY_COLUMNS = ["n", "m", "c", "trials_used", "excluded", "failed",
                   "mean_omega", "std_omega", "sup_p", "prediction_m", "variant"]
CSV_FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class TrialTask:
    n: int
    m: int
    c: float
    trial: int
    seed: int


@dataclass
class TrialResult:
    task: TrialTask
    omega: float = math.nan
    degenerate: bool = False
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ExperimentOutput:
    table: pd.DataFrame
    csv_path: Optional[Path] = None
    svg_paths: List[Path] = field(default_factory=list)


def config_plane(config: AppConfig, offset: Optional[float] = None) -> Hyperplane:
    """Boundary x . normal = offset; the normal defaults to the first axis."""
    offset = config.plane_offset if offset is None else offset
    if config.plane_normal is None:
        return Hyperplane.axis_aligned(config.model.dimension, axis=0, offset=offset)
    return Hyperplane.from_vector(config.plane_normal, offset)


def write_csv(table: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="nan")
    return path


class ExperimentRunner:
    """
    Monte-Carlo experiments over the configured mixture, boundary and grids.

    Every trial draws its sample from a seed derived from (n, m, c, trial) and
    the base seed, so outputs depend on the configuration only.
    """

    def __init__(self, config: AppConfig, logger: Optional[logging.Logger] = None):
        self.config = config
        self.logger = logger or build_logger("big_ssl.harness", log_file=config.log_file)
        self._reference_cache: Dict[Tuple[int, float], Tuple[float, float]] = {}

    # -------------------------
    # Helpers
    # -------------------------
    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_dir)

    def plane(self, offset: float) -> Hyperplane:
        return config_plane(self.config, offset)

    def _kernel(self, sigma: float) -> KernelParams:
        return KernelParams(sigma=sigma, dimension=self.config.model.dimension)

    def _tasks(self, sizes: Sequence[int], orders: Sequence[int], offsets: Sequence[float]) -> List[TrialTask]:
        tasks = []
        for n in sizes:
            for m in orders:
                for c in offsets:
                    for t in range(self.config.trials):
                        tasks.append(TrialTask(n=n, m=m, c=float(c), trial=t,
                                               seed=trial_seed(self.config.base_seed, n, m, c, t)))
        return tasks

    def _map(self, fn, items: Sequence):
        """Runs fn over items, in parallel when workers > 1; results keep the input order."""
        if self.config.workers <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            return list(executor.map(fn, items))

    # -------------------------
    # Bandwidth trials
    # -------------------------
    def _bandwidth_trial(self, task: TrialTask) -> TrialResult:
        try:
            cloud = density.sample(self.config.model, task.n, task.seed)
            s = density.indicator_from_boundary(cloud, self.plane(task.c))
            inside = int(s.sum())
            if min(inside, task.n - inside) < self.config.min_side_points:
                self.logger.debug(f"Trial {task} degenerate: {inside} of {task.n} points inside")
                return TrialResult(task=task, degenerate=True)
            graph = build_graph(cloud, self._kernel(self.config.sigma), self.config.truncation)
            omega = spectral.bandwidth_estimate(graph, s, task.m)
            return TrialResult(task=task, omega=omega)
        except Exception as e:
            self.logger.error(f"Trial n={task.n} m={task.m} c={task.c} #{task.trial} failed: {e}")
            self.logger.exception(e)
            return TrialResult(task=task, error=str(e))

    def _references(self, m: int, c: float) -> Tuple[float, float]:
        key = (m, c)
        if key not in self._reference_cache:
            plane = self.plane(c)
            sup_p = asymptotics.limit_bandwidth(self.config.model, plane)
            try:
                prediction = asymptotics.finite_m_prediction(self.config.model, plane, m,
                                                             self.config.sigma, self.config.variant)
            except BigSslException as e:
                self.logger.warning(f"No finite-m prediction for m={m}, c={c}: {e}")
                prediction = math.nan
            self._reference_cache[key] = (sup_p, prediction)
        return self._reference_cache[key]

    def summarize(self, results: Sequence[TrialResult]) -> pd.DataFrame:
        """Per (n, m, c) aggregate in grid order; degenerate and failed trials are counted, not averaged."""
        if not results:
            return pd.DataFrame(columns=SUMMARY_COLUMNS)
        frame = pd.DataFrame({
            "n": [r.task.n for r in results],
            "m": [r.task.m for r in results],
            "c": [r.task.c for r in results],
            "omega": [r.omega for r in results],
            "degenerate": [r.degenerate for r in results],
            "failed": [r.failed for r in results],
        })
        summary = frame.groupby(["n", "m", "c"], sort=False).agg(
            trials_used=("omega", "count"),
            excluded=("degenerate", "sum"),
            failed=("failed", "sum"),
            mean_omega=("omega", "mean"),
            std_omega=("omega", lambda x: x.std(ddof=0)),
        ).reset_index()

        references = [self._references(int(m), float(c)) for m, c in zip(summary["m"], summary["c"])]
        summary["sup_p"] = [r[0] for r in references]
        summary["prediction_m"] = [r[1] for r in references]
        summary["variant"] = TVariant(self.config.variant).value
        summary["excluded"] = summary["excluded"].astype(np.int64)
        summary["failed"] = summary["failed"].astype(np.int64)
        return summary[SUMMARY_COLUMNS]

    def run_bandwidth_grid(self, sizes: Sequence[int], orders: Sequence[int],
                           offsets: Sequence[float]) -> pd.DataFrame:
        tasks = self._tasks(sizes, orders, offsets)
        self.logger.info(f"Running {len(tasks)} bandwidth trials on {self.config.workers} worker(s)")
        results = self._map(self._bandwidth_trial, tasks)
        failed = sum(r.failed for r in results)
        if failed:
            self.logger.warning(f"{failed} of {len(results)} trials failed and were skipped")
        return self.summarize(results)

    # -------------------------
    # Experiments
    # -------------------------
    def run_fig2(self, write: bool = True) -> ExperimentOutput:
        """omega_m against n for every configured order, boundary at plane_offset."""
        cfg = self.config
        table = self.run_bandwidth_grid(cfg.sample_sizes, cfg.orders, [cfg.plane_offset])
        output = ExperimentOutput(table=table)
        if write:
            output.csv_path = write_csv(table, self.output_dir / "fig2.csv")
            for m in cfg.orders:
                subset = table[table["m"] == m]
                style = ChartStyle(x_column="n", title=f"m = {m}, c = {cfg.plane_offset:g}",
                                   x_label="sample size n")
                self._write_svg(output, subset, style, f"fig2_m{m}.svg")
        return output

    def run_fig3(self, write: bool = True) -> ExperimentOutput:
        """omega_m against the boundary offset c at fixed n and m."""
        cfg = self.config
        table = self.run_bandwidth_grid([cfg.fig3_n], [cfg.fig3_m], cfg.offsets)
        output = ExperimentOutput(table=table)
        if write:
            output.csv_path = write_csv(table, self.output_dir / "fig3.csv")
            style = ChartStyle(x_column="c", title=f"n = {cfg.fig3_n}, m = {cfg.fig3_m}",
                               x_label="boundary offset c")
            self._write_svg(output, table, style, "fig3.svg")
        return output

    def _write_svg(self, output: ExperimentOutput, table: pd.DataFrame, style: ChartStyle, name: str) -> None:
        """Charts the rows with a finite mean; a chart with nothing to show is skipped."""
        rows = table.dropna(subset=[style.mean_column])
        if rows.empty:
            self.logger.warning(f"No finite {style.mean_column} values, {name} not written")
            return
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(emit_svg(rows, style), encoding="utf-8")
        output.svg_paths.append(path)

    def run_recovery_demo(self, write: bool = True) -> ExperimentOutput:
        """
        Grows a random labeled set until the cutoff estimate exceeds the exact
        bandwidth of the indicator and reports both interpolators at each size.
        """
        cfg = self.config
        n = cfg.recovery_n
        seed = trial_seed(cfg.base_seed, n, 0, cfg.plane_offset, 0)
        cloud = density.sample(cfg.model, n, seed)
        s = density.indicator_from_boundary(cloud, self.plane(cfg.plane_offset))
        graph = build_graph(cloud, self._kernel(cfg.recovery_sigma), cfg.truncation)
        basis = spectral.fourier_basis(graph, cfg.eigen_cap)
        bandwidth = spectral.exact_bandwidth(basis, s, cfg.coefficient_tol)
        order = np.random.default_rng(seed).permutation(n)
        self.logger.info(f"Recovery demo: n={n}, exact bandwidth {bandwidth:.6g}")

        rows = []
        size = min(cfg.recovery_step, n)
        while True:
            labeled = LabeledSet.from_signal(s, order[:size])
            rows.append(self._recovery_row(graph, basis, labeled, s, bandwidth))
            if rows[-1]["condition_met"] or size == n:
                break
            size = min(size + cfg.recovery_step, n)

        table = pd.DataFrame(rows)
        output = ExperimentOutput(table=table)
        if write:
            output.csv_path = write_csv(table, self.output_dir / "recovery_demo.csv")
            style = ChartStyle(x_column="labeled_size", mean_column="ls_accuracy", std_column=None,
                               reference_column=None, prediction_column="min_accuracy",
                               mean_label="least-squares accuracy", prediction_label="min-bandwidth accuracy",
                               title=f"recovery, n = {n}", x_label="labeled nodes", y_label="accuracy")
            self._write_svg(output, table, style, "recovery_demo.svg")
        return output

    def _recovery_row(self, graph, basis, labeled: LabeledSet, s, bandwidth: float) -> dict:
        cfg = self.config
        cutoff = spectral.cutoff_frequency(graph, labeled, cfg.cutoff_order, logger=self.logger)
        row = {"labeled_size": labeled.size, "cutoff": cutoff, "bandwidth": bandwidth,
               "condition_met": bool(cutoff > bandwidth)}

        try:
            f_ls = ssl.interpolate_ls(basis, labeled, cutoff, cfg.lstsq_rcond)
            row["ls_error"] = float(np.max(np.abs(f_ls - s)))
            row["ls_accuracy"] = float(np.mean(ssl.predict(f_ls, cfg.threshold) == s))
        except (InfeasibleCutoffError, InvalidInputError) as e:
            self.logger.debug(f"No LS interpolant with {labeled.size} labels: {e}")
            row["ls_error"], row["ls_accuracy"] = math.nan, math.nan

        try:
            result = ssl.interpolate_min_bandwidth(basis, labeled, cfg.residual_tol, cfg.lstsq_rcond)
            row["omega_min"] = result.omega_min
            row["min_error"] = float(np.max(np.abs(result.signal - s)))
            row["min_accuracy"] = float(np.mean(ssl.predict(result.signal, cfg.threshold) == s))
        except InfeasibleCutoffError as e:
            self.logger.debug(f"No min-bandwidth interpolant with {labeled.size} labels: {e}")
            row["omega_min"], row["min_error"], row["min_accuracy"] = math.nan, math.nan, math.nan
        return row

    def run_cut_scaling(self, write: bool = True) -> ExperimentOutput:
        """Both n-scalings of the cut statistic against the boundary integral of p^2."""
        cfg = self.config
        plane = self.plane(cfg.plane_offset)
        limit = asymptotics.cut_limit(cfg.model, plane)
        rows = []
        for t in range(cfg.cut_trials):
            seed = trial_seed(cfg.base_seed, cfg.cut_n, 1, cfg.plane_offset, t)
            cloud = density.sample(cfg.model, cfg.cut_n, seed)
            s = density.indicator_from_boundary(cloud, plane)
            graph = build_graph(cloud, self._kernel(cfg.sigma), cfg.truncation)
            cuts = cut_interpretations(graph, s)
            rows.append({"trial": t, "laplacian_scaled": cuts.laplacian_scaled,
                         "raw_scaled": cuts.raw_scaled, "limit": limit})

        table = pd.DataFrame(rows)
        for column in ("laplacian_scaled", "raw_scaled"):
            table[f"{column}_rel_error"] = (table[column] - limit).abs() / limit
        self.logger.info(
            f"Cut scaling: limit {limit:.6g}, laplacian-scaled mean {table['laplacian_scaled'].mean():.6g}, "
            f"raw-scaled mean {table['raw_scaled'].mean():.6g}"
        )
        output = ExperimentOutput(table=table)
        if write:
            output.csv_path = write_csv(table, self.output_dir / "cut_scaling.csv")
        return output

    def run_bias_check(self, write: bool = True) -> ExperimentOutput:
        """
        Empirical mean of V with a 99% confidence interval per order, next to
        the bias limits under both t(m) variants.
        """
        cfg = self.config
        plane = self.plane(cfg.plane_offset)
        kernel = self._kernel(cfg.bias_sigma)

        def one_trial(item: Tuple[int, int]) -> float:
            m, t = item
            seed = trial_seed(cfg.base_seed, cfg.bias_n, m, cfg.plane_offset, t)
            try:
                cloud = density.sample(cfg.model, cfg.bias_n, seed)
                s = density.indicator_from_boundary(cloud, plane)
                graph = build_graph(cloud, kernel, cfg.truncation)
                return asymptotics.y_statistic(graph, s, m).v
            except Exception as e:
                self.logger.error(f"Bias trial m={m} #{t} failed: {e}")
                self.logger.exception(e)
                return math.nan

        items = [(m, t) for m in cfg.bias_orders for t in range(cfg.bias_trials)]
        values = np.asarray(self._map(one_trial, items), dtype=np.float64).reshape(len(cfg.bias_orders),
                                                                                  cfg.bias_trials)
        rows = []
        for m, v in zip(cfg.bias_orders, values):
            v = v[np.isfinite(v)]
            mean = float(v.mean()) if v.size else math.nan
            std = float(v.std(ddof=1)) if v.size > 1 else 0.0
            half_width = float(sp_stats.t.ppf(0.995, v.size - 1)) * std / math.sqrt(v.size) if v.size > 1 else 0.0
            corrected = asymptotics.bias_limit(cfg.model, plane, m, TVariant.CORRECTED)
            printed = asymptotics.bias_limit(cfg.model, plane, m, TVariant.PRINTED)
            low, high = mean - half_width, mean + half_width
            rows.append({
                "m": m, "trials_used": int(v.size), "mean_v": mean, "std_v": std,
                "ci_low": low, "ci_high": high,
                "bias_corrected": corrected, "bias_printed": printed,
                "corrected_rel_error": abs(mean - corrected) / abs(corrected) if corrected else math.nan,
                "corrected_in_ci": bool(low <= corrected <= high),
                "printed_in_ci": bool(low <= printed <= high),
            })
        table = pd.DataFrame(rows)
        output = ExperimentOutput(table=table)
        if write:
            output.csv_path = write_csv(table, self.output_dir / "bias_check.csv")
        return output
