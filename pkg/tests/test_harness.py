"""Experimentos reprodutíveis: seeds, resumos e execuções pequenas"""
import dataclasses
import math

import pandas as pd
import pytest

from config.config_loader import parse_experiment_config
from experiments.harness import (CONVERGENCE_COLUMNS, REFERENCE_VALUES, RUN_COLUMNS, build_tasks,
                                 convergence_grid, run_experiment, summarize_convergence,
                                 summarize_table1, validation_report)
from experiments.seeds import derive_seed, derive_seeds
from infrastructure.shapes import make_shape

SETTINGS = {
    'experiments': {'workers': 1, 'float_format': '%.10f'},
    'database': {'enabled': False},
}


def _config(tmp_path, **overrides):
    raw = {
        "experiment": "table1",
        "shape": "astroid",
        "shape_params": {},
        "r_list": [0.5],
        "n_list": [60, 30],
        "replications": 3,
        "master_seed": 2024,
        "grid_h": None,
        "out_dir": str(tmp_path / "saida"),
        "workers": 1,
    }
    raw.update(overrides)
    return parse_experiment_config(raw)


def test_seeds_are_deterministic_and_distinct():
    seeds = derive_seeds(7, 100)
    assert seeds == [derive_seed(7, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert derive_seed(8, 0) != seeds[0]
    with pytest.raises(ValueError):
        derive_seed(-1, 0)
    with pytest.raises(ValueError):
        derive_seed(1, -1)


def test_tasks_are_ordered_by_r_n_replication(tmp_path):
    config = _config(tmp_path, r_list=[0.5, 0.25])
    tasks = build_tasks(config, {'numerics': {'accept_tol_factor': 1e-10}})
    keys = [(t['r'], t['n'], t['replication']) for t in tasks]
    assert keys == sorted(keys)
    assert len(tasks) == 2 * 2 * 3
    assert all(t['accept_tol_factor'] == 1e-10 for t in tasks)
    # a mesma replicação usa o mesmo seed em todas as células
    assert len({t['seed'] for t in tasks if t['replication'] == 0}) == 1


def test_table1_outputs_are_reproducible(tmp_path):
    first = _config(tmp_path / "a")
    second = dataclasses.replace(first, out_dir=str(tmp_path / "b"))
    result = run_experiment(first, SETTINGS)
    run_experiment(second, SETTINGS)

    assert list(result.runs.columns) == RUN_COLUMNS
    assert len(result.runs) == 6
    assert list(result.runs['n'].unique()) == [30, 60]
    for name in ("runs.csv", "summary.csv"):
        assert (tmp_path / "a" / "saida" / name).read_bytes() == \
            (tmp_path / "b" / "saida" / name).read_bytes()
    assert (tmp_path / "a" / "saida" / "timings.csv").exists()
    assert result.experiment_id is None
    assert result.summary['L_true'].iloc[0] == pytest.approx(6.0)


def test_convergence_run_writes_curves(tmp_path):
    config = _config(tmp_path, experiment="convergence", shape="disc",
                     shape_params={"radius": 0.5}, r_list=[0.25], n_list=[100],
                     replications=2, grid_h=0.02)
    result = run_experiment(config, SETTINGS)
    assert set(CONVERGENCE_COLUMNS) <= set(result.runs.columns)
    assert (tmp_path / "saida" / "curves.svg").exists()
    row = result.summary.iloc[0]
    assert row['runs'] == 2
    assert row['degenerate'] == 0
    assert row['h'] == pytest.approx(0.02)
    assert 0 < row['dh_set'] < 0.5


def test_convergence_grid_uses_diagonal_cells_setting(tmp_path):
    config = _config(tmp_path, experiment="convergence", shape="disc",
                     shape_params={"radius": 0.5})
    xmin, xmax, ymin, ymax = make_shape("disc", {"radius": 0.5}).bounding_box
    diagonal = math.hypot(xmax - xmin, ymax - ymin)
    assert convergence_grid(config, {"raster": {"diagonal_cells": 64}}).h == pytest.approx(diagonal / 64)
    assert convergence_grid(config).h == pytest.approx(diagonal / 2048)
    fixed = dataclasses.replace(config, grid_h=0.05)
    assert convergence_grid(fixed, {"raster": {"diagonal_cells": 64}}).h == pytest.approx(0.05)


def test_summaries_on_fabricated_runs():
    runs = pd.DataFrame({
        'shape': ['astroid'] * 4, 'r': [0.25] * 4, 'n': [100, 100, 200, 200],
        'replication': [0, 1, 0, 1], 'seed': ['1', '2', '1', '2'],
        'length': [5.0, 5.2, 5.5, 5.7], 'isolated': [2, 0, 0, 0],
        'dh_set': [0.2, math.nan, 0.1, 0.3], 'dh_boundary': [0.3, math.nan, 0.2, 0.2],
        'd_mu': [0.05, 0.5, 0.02, 0.04],
    })
    table = summarize_table1(runs, 6.0)
    assert list(table['mean']) == pytest.approx([5.1, 5.6])
    assert table['std'].iloc[0] == pytest.approx(math.sqrt(0.02))
    assert table['stderr'].iloc[0] == pytest.approx(0.1)
    assert table['mean_isolated'].iloc[0] == pytest.approx(1.0)
    assert table['rel_bias'].iloc[1] == pytest.approx(-0.4 / 6.0)
    assert 'L_true' not in summarize_table1(runs, None).columns

    curves = summarize_convergence(runs)
    assert list(curves['degenerate']) == [1, 0]
    assert curves['dh_set'].iloc[0] == pytest.approx(0.2)
    assert curves['d_mu'].iloc[1] == pytest.approx(0.03)


def test_validation_report_checks_reference_cells():
    summary = pd.DataFrame({
        'shape': ['astroid', 'astroid', 'disc'], 'r': [0.25, 0.25, 0.25],
        'n': [5000, 10000, 5000], 'mean': [5.70, 5.50, 3.0], 'std': [0.07, 0.05, 0.1],
    })
    checks = validation_report(summary)
    assert [c['n'] for c in checks] == [5000, 10000]
    assert [c['passed'] for c in checks] == [True, False]


def test_reference_table_covers_every_cell():
    expected = {(shape, r, n) for shape, radii in (("astroid", (0.25, 0.5, 1.0)),
                                                   ("catalan_trisectrix", (0.5, 2.0, 5.0)))
                for r in radii for n in (5000, 10000)}
    assert set(REFERENCE_VALUES) == expected
    for ref in REFERENCE_VALUES.values():
        lo, hi = ref["range"]
        assert lo < ref["mean"] < hi
        assert ref["std"] > 0
    # o desvio cai com n em todas as células
    for shape, r, _ in expected:
        assert REFERENCE_VALUES[(shape, r, 10000)]["std"] < REFERENCE_VALUES[(shape, r, 5000)]["std"]


@pytest.mark.slow
def test_astroid_length_matches_reference_mean(tmp_path):
    config = _config(tmp_path, r_list=[0.25], n_list=[5000], replications=10)
    result = run_experiment(config, SETTINGS)
    checks = result.checks
    assert len(checks) == 1
    assert checks[0]['passed']


@pytest.mark.slow
def test_trisectrix_length_matches_reference_mean(tmp_path):
    config = _config(tmp_path, shape="catalan_trisectrix", r_list=[2.0], n_list=[5000],
                     replications=20)
    result = run_experiment(config, SETTINGS)
    (check,) = result.checks
    assert check['passed']


@pytest.mark.slow
def test_annulus_convergence_at_ten_thousand_points(tmp_path):
    config = _config(tmp_path, experiment="convergence", shape="annulus",
                     shape_params={"inner": 0.25, "outer": 0.5}, r_list=[0.25],
                     n_list=[10000], replications=20)
    result = run_experiment(config, SETTINGS)
    row = result.summary.iloc[0]
    assert row['degenerate'] == 0
    assert row['dh_set'] <= 0.05
    assert row['dh_boundary'] <= 0.05
    assert row['mean_length'] == pytest.approx(1.5 * math.pi, rel=0.03)
