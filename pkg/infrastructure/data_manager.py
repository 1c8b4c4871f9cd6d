"""
Gerenciador de Dados - arquivos de pontos, máscaras, arcos e relatórios
"""
import logging
import os
import re
from typing import Dict, Optional

import numpy as np
import pandas as pd

from core.errors import GeometryDomainError
from core.geometry import Point2, PointSet
from core.rconvex_hull import RConvexHull
from infrastructure.raster import GridMask

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10f"
_HEADER_RE = re.compile(r"#\s*origin=([^,\s]+),([^\s]+)\s+h=([^\s]+)")


def _ensure_parent(path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def read_points_csv(path: str, dedupe_tolerance: Optional[float] = None,
                    dedupe_factor: Optional[float] = None) -> PointSet:
    """
    Lê um CSV com cabeçalho x,y.

    Linhas com campo ausente ou não finito são rejeitadas com o número da linha.
    """
    try:
        df = pd.read_csv(path, dtype=str, skipinitialspace=True, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise GeometryDomainError(f"Falha ao ler {path}: {e}")
    columns = [c.strip() for c in df.columns]
    if "x" not in columns or "y" not in columns:
        raise GeometryDomainError(f"{path}: cabeçalho deve conter x,y (recebeu {columns})")
    df.columns = columns

    xs = pd.to_numeric(df["x"].str.strip(), errors="coerce").to_numpy(dtype=float)
    ys = pd.to_numeric(df["y"].str.strip(), errors="coerce").to_numpy(dtype=float)
    bad = ~(np.isfinite(xs) & np.isfinite(ys))
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        # +2: cabeçalho e numeração a partir de 1
        raise GeometryDomainError(
            f"{path}: linha {first + 2} com campo ausente ou não finito "
            f"({int(bad.sum())} linhas inválidas)")
    coords = np.column_stack([xs, ys])
    if dedupe_tolerance is None and dedupe_factor is not None and len(coords):
        dedupe_tolerance = dedupe_factor * float(np.hypot(*np.ptp(coords, axis=0)))
    points = PointSet.from_array(coords, dedupe_tolerance)
    logger.debug(f"{len(points)} pontos lidos de {path}")
    return points


def write_points_csv(points: PointSet, path: str):
    _ensure_parent(path)
    df = pd.DataFrame(points.coords, columns=["x", "y"])
    # repr garante ida e volta exata dos floats
    with open(path, "w", encoding="utf-8", newline="") as file:
        file.write("x,y\n")
        for x, y in df.itertuples(index=False):
            file.write(f"{x!r},{y!r}\n")
    logger.debug(f"{len(points)} pontos gravados em {path}")


def write_mask(mask: GridMask, path: str):
    """Bitmap P1 com a linha do topo (maior y) primeiro"""
    _ensure_parent(path)
    with open(path, "w", encoding="ascii") as file:
        file.write("P1\n")
        file.write(f"# origin={mask.origin.x!r},{mask.origin.y!r} h={mask.h!r}\n")
        file.write(f"{mask.width} {mask.height}\n")
        for row in mask.occupancy[::-1]:
            file.write(" ".join("1" if v else "0" for v in row))
            file.write("\n")


def read_mask(path: str) -> GridMask:
    try:
        with open(path, "r", encoding="ascii") as file:
            lines = file.read().splitlines()
    except OSError as e:
        raise GeometryDomainError(f"Falha ao ler máscara {path}: {e}")

    if not lines or lines[0].strip() != "P1":
        raise GeometryDomainError(f"{path}: máscara deve começar com P1")
    origin = h = None
    tokens = []
    for line in lines[1:]:
        stripped = line.strip()
        if stripped.startswith("#"):
            match = _HEADER_RE.match(stripped)
            if match:
                origin = Point2(float(match.group(1)), float(match.group(2)))
                h = float(match.group(3))
            continue
        tokens.extend(stripped.split())
    if origin is None:
        raise GeometryDomainError(f"{path}: comentário '# origin=x,y h=h' ausente")
    if len(tokens) < 2:
        raise GeometryDomainError(f"{path}: dimensões ausentes")

    width, height = int(tokens[0]), int(tokens[1])
    bits = tokens[2:]
    if len(bits) == 1 and len(bits[0]) == width * height:
        bits = list(bits[0])
    if len(bits) != width * height or any(b not in ("0", "1") for b in bits):
        raise GeometryDomainError(f"{path}: esperado {width * height} bits 0/1, "
                                  f"recebeu {len(bits)}")
    occupancy = (np.array(bits) == "1").reshape(height, width)[::-1]
    return GridMask(origin, h, width, height, occupancy)


def write_arcs_csv(hull: RConvexHull, path: str, float_format: str = FLOAT_FORMAT):
    _ensure_parent(path)
    hull.arc_table().to_csv(path, index=False, float_format=float_format)
    logger.debug(f"{len(hull.boundary.arcs)} arcos gravados em {path}")


def write_table(df: pd.DataFrame, path: str, float_format: str = FLOAT_FORMAT):
    _ensure_parent(path)
    df.to_csv(path, index=False, float_format=float_format, lineterminator="\n")


class DataManager:
    """Organiza os arquivos de saída de um experimento num diretório"""

    def __init__(self, out_dir: str, float_format: str = FLOAT_FORMAT):
        self.out_dir = out_dir
        self.float_format = float_format
        self.written: Dict[str, str] = {}

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def initialize(self):
        os.makedirs(self.out_dir, exist_ok=True)
        logger.debug(f"Diretório de saída: {self.out_dir}")

    def save_table(self, name: str, df: pd.DataFrame) -> str:
        path = self.path(name)
        write_table(df, path, self.float_format)
        self.written[name] = path
        logger.info(f"💾 {name}: {len(df)} linhas em {path}")
        return path

    def save_points(self, name: str, points: PointSet) -> str:
        path = self.path(name)
        write_points_csv(points, path)
        self.written[name] = path
        return path

    def save_mask(self, name: str, mask: GridMask) -> str:
        path = self.path(name)
        write_mask(mask, path)
        self.written[name] = path
        return path

    def load_table(self, name: str) -> Optional[pd.DataFrame]:
        path = self.path(name)
        if not os.path.exists(path):
            return None
        return pd.read_csv(path)

    def get_output_stats(self) -> Dict[str, int]:
        """Tamanho em bytes de cada arquivo gravado"""
        return {name: os.path.getsize(path) for name, path in self.written.items()
                if os.path.exists(path)}
