import numpy as np
import pandas as pd
import pytest

from core.errors import GeometryDomainError
from core.geometry import Point2, PointSet
from core.rconvex_hull import build_hull
from database.results_store import RUN_COLUMNS, ResultsStore, config_hash
from infrastructure.data_manager import (DataManager, read_mask, read_points_csv,
                                         write_arcs_csv, write_mask, write_points_csv)
from infrastructure.raster import GridMask


def test_points_csv_round_trip_is_exact(tmp_path, rng):
    points = PointSet.from_array(rng.random((50, 2)) * 1e-3 + 1e3)
    path = tmp_path / "pontos.csv"
    write_points_csv(points, str(path))
    assert np.array_equal(read_points_csv(str(path)).coords, points.coords)


def test_points_csv_reports_bad_line(tmp_path):
    path = tmp_path / "pontos.csv"
    path.write_text("x,y\n0.0,0.0\n1.0,\n2.0,2.0\n")
    with pytest.raises(GeometryDomainError, match="linha 3"):
        read_points_csv(str(path))


def test_points_csv_requires_header(tmp_path):
    path = tmp_path / "pontos.csv"
    path.write_text("a,b\n0.0,0.0\n")
    with pytest.raises(GeometryDomainError, match="x,y"):
        read_points_csv(str(path))


def test_points_csv_dedupe_factor(tmp_path):
    path = tmp_path / "pontos.csv"
    path.write_text("x,y\n0.0,0.0\n1e-14,0.0\n1.0,1.0\n")
    assert len(read_points_csv(str(path))) == 2
    assert len(read_points_csv(str(path), dedupe_tolerance=0.0)) == 3
    assert len(read_points_csv(str(path), dedupe_factor=1e-16)) == 3


def test_mask_round_trip(tmp_path):
    occ = np.zeros((4, 6), dtype=bool)
    occ[0, :2] = True
    occ[3, 5] = True
    mask = GridMask(Point2(-0.25, 1.5), 0.125, 6, 4, occ)
    path = tmp_path / "mascara.pbm"
    write_mask(mask, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "P1"
    assert lines[3] == "0 0 0 0 0 1"
    clone = read_mask(str(path))
    assert clone.same_header(mask)
    assert np.array_equal(clone.occupancy, occ)


def test_mask_without_origin_comment_is_rejected(tmp_path):
    path = tmp_path / "mascara.pbm"
    path.write_text("P1\n2 1\n1 0\n")
    with pytest.raises(GeometryDomainError, match="origin"):
        read_mask(str(path))


def test_arcs_csv(tmp_path, unit_square):
    path = tmp_path / "arcos.csv"
    write_arcs_csv(build_hull(unit_square, 1.0), str(path))
    table = pd.read_csv(path)
    assert len(table) == 4
    assert (table["radius"] == 1.0).all()


def test_data_manager_tracks_outputs(tmp_path):
    manager = DataManager(str(tmp_path / "saida"))
    manager.initialize()
    manager.save_table("summary.csv", pd.DataFrame({"r": [0.25], "mean": [5.9]}))
    assert manager.load_table("summary.csv")["mean"].iloc[0] == pytest.approx(5.9)
    assert manager.load_table("nada.csv") is None
    assert set(manager.get_output_stats()) == {"summary.csv"}


def _record(replication, length):
    return {"shape": "astroid", "r": 0.25, "n": 100, "replication": replication,
            "seed": 2 ** 63 + replication, "length": length, "isolated": 1, "wall_time": 0.5}


def test_results_store_round_trip(tmp_path):
    config = {"experiment": "table1", "shape": "astroid", "r_list": [0.25]}
    with ResultsStore(str(tmp_path / "db" / "runs.db")) as store:
        experiment_id = store.start_experiment("table1", "astroid", config)
        assert store.save_runs(experiment_id, [_record(1, 5.0), _record(0, 6.0)]) == 2
        runs = store.get_runs(experiment_id)
        assert list(runs.columns) == RUN_COLUMNS
        assert list(runs["replication"]) == [0, 1]
        assert runs["seed"].iloc[0] == str(2 ** 63)
        summary = store.get_summary(experiment_id)
        assert summary["mean_length"].iloc[0] == pytest.approx(5.5)
        assert summary["runs"].iloc[0] == 2
        assert store.list_experiments()[0]["config_hash"] == config_hash(config)


def test_experiments_are_found_by_config(tmp_path):
    config = {"shape": "astroid", "n_list": [100]}
    with ResultsStore(str(tmp_path / "runs.db")) as store:
        first = store.start_experiment("table1", "astroid", config)
        store.start_experiment("table1", "astroid", {"shape": "disc"})
        matches = store.get_experiments_by_config({"n_list": [100], "shape": "astroid"})
        assert [m["id"] for m in matches] == [first]
        store.backup(str(tmp_path / "copia.db"))
    assert (tmp_path / "copia.db").exists()
    assert len(config_hash(config)) == 16
