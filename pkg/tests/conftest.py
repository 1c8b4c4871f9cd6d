import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from core.geometry import PointSet  # noqa: E402
from infrastructure.shapes import SampleRequest, make_shape, sample_uniform  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def unit_square():
    return PointSet.from_array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def annulus_sample():
    shape = make_shape("annulus", {"inner": 0.25, "outer": 0.5})
    return sample_uniform(SampleRequest(shape, 200, 7))


@pytest.fixture
def settings_file(tmp_path):
    """settings.yaml isolado: logs e banco dentro de tmp_path"""
    path = tmp_path / "settings.yaml"
    path.write_text(
        "logging:\n"
        "  level: WARNING\n"
        f"  directory: {tmp_path / 'logs'}\n"
        "  file_output: false\n"
        "experiments:\n"
        "  workers: 1\n"
        "database:\n"
        "  enabled: false\n"
        f"  path: {tmp_path / 'runs.db'}\n",
        encoding="utf-8",
    )
    return str(path)
