import math

import numpy as np
import pandas as pd
import pytest

from big_ssl.logic import harness
from big_ssl.logic.harness import SUMMARY_COLUMNS, ExperimentRunner, config_plane


def with_updates(config, **updates):
    return config.model_copy(update=updates)


# --- bandwidth grids ---

def test_fig2_table_and_outputs(small_config, quiet_logger):
    output = ExperimentRunner(small_config, quiet_logger).run_fig2()
    table = output.table
    assert list(table.columns) == SUMMARY_COLUMNS
    assert len(table) == 4
    assert list(zip(table["n"], table["m"])) == [(120, 2), (120, 4), (200, 2), (200, 4)]
    counts = table["trials_used"] + table["excluded"] + table["failed"]
    assert (counts == small_config.trials).all()
    assert (table["variant"] == "corrected").all()
    assert output.csv_path.name == "fig2.csv"
    assert sorted(p.name for p in output.svg_paths) == ["fig2_m2.svg", "fig2_m4.svg"]
    assert all(p.read_text(encoding="utf-8").lstrip().startswith("<?xml") for p in output.svg_paths)


def test_fig2_outputs_are_reproducible(small_config, quiet_logger, tmp_path):
    first = ExperimentRunner(with_updates(small_config, output_dir=tmp_path / "a"), quiet_logger).run_fig2()
    second = ExperimentRunner(with_updates(small_config, output_dir=tmp_path / "b"), quiet_logger).run_fig2()
    assert first.csv_path.read_bytes() == second.csv_path.read_bytes()
    for a, b in zip(first.svg_paths, second.svg_paths):
        assert a.read_bytes() == b.read_bytes()


def test_parallel_run_matches_serial(small_config, quiet_logger):
    serial = ExperimentRunner(small_config, quiet_logger).run_fig2(write=False).table
    parallel = ExperimentRunner(with_updates(small_config, workers=3), quiet_logger).run_fig2(write=False).table
    pd.testing.assert_frame_equal(serial, parallel)


def test_single_trial_has_zero_spread(small_config, quiet_logger):
    table = ExperimentRunner(with_updates(small_config, trials=1), quiet_logger).run_fig2(write=False).table
    assert (table["std_omega"] == 0.0).all()
    assert (table["trials_used"] == 1).all()


def test_fig3_sweeps_offsets(small_config, quiet_logger):
    output = ExperimentRunner(small_config, quiet_logger).run_fig3()
    table = output.table
    assert list(table["c"]) == [-1.0, 0.0, 1.0]
    assert (table["n"] == 150).all() and (table["m"] == 4).all()
    centre = table[table["c"] == 0.0].iloc[0]
    assert centre["sup_p"] == pytest.approx(0.13279, rel=1e-4)
    assert 0 < centre["prediction_m"] < centre["sup_p"]
    assert [p.name for p in output.svg_paths] == ["fig3.svg"]


def test_degenerate_boundary_is_excluded(small_config, quiet_logger):
    config = with_updates(small_config, offsets=[-8.0, 0.0])
    output = ExperimentRunner(config, quiet_logger).run_fig3()
    far = output.table.iloc[0]
    assert far["trials_used"] == 0
    assert far["excluded"] == config.trials
    assert math.isnan(far["mean_omega"])
    assert ",nan," in output.csv_path.read_text(encoding="utf-8")
    assert len(output.svg_paths) == 1


def test_all_degenerate_sweep_writes_no_chart(small_config, quiet_logger):
    config = with_updates(small_config, offsets=[-8.0])
    output = ExperimentRunner(config, quiet_logger).run_fig3()
    assert output.csv_path.exists()
    assert output.svg_paths == []


def test_failing_trials_are_counted(small_config, quiet_logger, monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("solver exploded")

    monkeypatch.setattr(harness.spectral, "bandwidth_estimate", broken)
    table = ExperimentRunner(small_config, quiet_logger).run_fig2(write=False).table
    assert (table["failed"] == small_config.trials).all()
    assert (table["trials_used"] == 0).all()


def test_summarize_of_nothing_is_empty(small_config, quiet_logger):
    table = ExperimentRunner(small_config, quiet_logger).summarize([])
    assert table.empty
    assert list(table.columns) == SUMMARY_COLUMNS


# --- other experiments ---

def test_recovery_demo_stops_once_condition_holds(small_config, quiet_logger):
    output = ExperimentRunner(small_config, quiet_logger).run_recovery_demo()
    table = output.table
    sizes = list(table["labeled_size"])
    assert sizes == [10, 20, 30, 40][: len(sizes)]
    assert not table["condition_met"].iloc[:-1].any()
    last = table.iloc[-1]
    assert last["condition_met"]
    assert last["cutoff"] > last["bandwidth"]
    assert last["ls_accuracy"] == 1.0
    assert last["ls_error"] <= 1e-6
    assert output.csv_path.name == "recovery_demo.csv"


def test_cut_scaling_readings(small_config, quiet_logger):
    table = ExperimentRunner(small_config, quiet_logger).run_cut_scaling().table
    assert len(table) == small_config.cut_trials
    np.testing.assert_allclose(table["raw_scaled"], small_config.cut_n * table["laplacian_scaled"], rtol=1e-10)
    assert table["limit"].nunique() == 1
    assert table["limit"].iloc[0] == pytest.approx(0.0159, rel=5e-3)


def test_bias_check_structure(small_config, quiet_logger):
    output = ExperimentRunner(small_config, quiet_logger).run_bias_check()
    table = output.table
    assert list(table["m"]) == small_config.bias_orders
    assert (table["trials_used"] == small_config.bias_trials).all()
    assert (table["ci_low"] <= table["mean_v"]).all() and (table["mean_v"] <= table["ci_high"]).all()
    first = table[table["m"] == 1].iloc[0]
    assert first["bias_printed"] == 0.0
    assert first["bias_corrected"] > 0.0
    assert output.csv_path.name == "bias_check.csv"


# --- plumbing ---

def test_config_plane_uses_normal(small_config):
    plane = config_plane(with_updates(small_config, plane_normal=[0.0, 2.0]), offset=0.5)
    np.testing.assert_allclose(plane.normal_array, [0.0, 1.0])
    assert plane.offset == 0.5
    assert config_plane(small_config).normal_array[0] == 1.0
