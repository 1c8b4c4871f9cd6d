"""
Representação raster de conjuntos planos

Uma célula está ocupada sse o seu centro pertence ao conjunto. Distâncias
são sempre entre centros de células (transformada de distância euclidiana
exata do scipy.ndimage).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from core.errors import GeometryDomainError
from core.geometry import Point2
from core.rconvex_hull import RConvexHull, fill_grid

logger = logging.getLogger(__name__)

Box = Tuple[float, float, float, float]

DEFAULT_DIAGONAL_CELLS = 2048
CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class GridSpec:
    """Cabeçalho da grade: origem (canto inferior esquerdo), passo h e dimensões"""
    origin: Point2
    h: float
    width: int
    height: int

    def __post_init__(self):
        if not self.h > 0:
            raise GeometryDomainError(f"h deve ser > 0, recebeu {self.h}")
        if self.width < 1 or self.height < 1:
            raise GeometryDomainError(f"Grade sem células: {self.width}x{self.height}")

    @classmethod
    def from_box(cls, box: Box, h: float, margin: float = 0.0) -> "GridSpec":
        xmin, xmax, ymin, ymax = box
        if not h > 0:
            raise GeometryDomainError(f"h deve ser > 0, recebeu {h}")
        pad = margin + 2.0 * h
        width = int(math.ceil((xmax - xmin + 2.0 * pad) / h))
        height = int(math.ceil((ymax - ymin + 2.0 * pad) / h))
        return cls(Point2(xmin - pad, ymin - pad), float(h), max(width, 1), max(height, 1))

    @property
    def xs(self) -> np.ndarray:
        return self.origin.x + (np.arange(self.width) + 0.5) * self.h

    @property
    def ys(self) -> np.ndarray:
        return self.origin.y + (np.arange(self.height) + 0.5) * self.h

    @property
    def window(self) -> Box:
        return (self.origin.x, self.origin.x + self.width * self.h,
                self.origin.y, self.origin.y + self.height * self.h)

    def centers(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def cell_of(self, xy: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Índices (linha, coluna) das células que contêm os pontos, e máscara de validade"""
        xy = np.atleast_2d(xy)
        col = np.floor((xy[:, 0] - self.origin.x) / self.h).astype(np.int64)
        row = np.floor((xy[:, 1] - self.origin.y) / self.h).astype(np.int64)
        valid = (col >= 0) & (col < self.width) & (row >= 0) & (row < self.height)
        return row, col, valid

    def empty(self) -> "GridMask":
        return GridMask(self.origin, self.h, self.width, self.height,
                        np.zeros((self.height, self.width), dtype=bool))


@dataclass(frozen=True, eq=False)
class GridMask:
    """Subconjunto rasterizado de uma janela; occupancy tem forma (height, width)"""
    origin: Point2
    h: float
    width: int
    height: int
    occupancy: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.shape != (self.height, self.width):
            raise GeometryDomainError(
                f"occupancy {occ.shape} incompatível com {self.height}x{self.width}")
        occ = occ.copy()
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @classmethod
    def from_spec(cls, spec: GridSpec, occupancy: np.ndarray) -> "GridMask":
        return cls(spec.origin, spec.h, spec.width, spec.height, occupancy)

    @property
    def header(self) -> GridSpec:
        return GridSpec(self.origin, self.h, self.width, self.height)

    def with_occupancy(self, occupancy: np.ndarray) -> "GridMask":
        return GridMask(self.origin, self.h, self.width, self.height, occupancy)

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    @property
    def area(self) -> float:
        return self.h * self.h * self.count

    @property
    def is_empty(self) -> bool:
        return not self.occupancy.any()

    @property
    def margin(self) -> float:
        """Menor folga (em unidades de comprimento) entre as células ocupadas e a borda"""
        if self.is_empty:
            return math.inf
        rows = np.flatnonzero(self.occupancy.any(axis=1))
        cols = np.flatnonzero(self.occupancy.any(axis=0))
        cells = min(rows[0], self.height - 1 - rows[-1], cols[0], self.width - 1 - cols[-1])
        return float(cells) * self.h

    def same_header(self, other: "GridMask") -> bool:
        return (self.width == other.width and self.height == other.height
                and math.isclose(self.h, other.h, rel_tol=1e-12)
                and math.isclose(self.origin.x, other.origin.x, rel_tol=0, abs_tol=1e-12 * self.h)
                and math.isclose(self.origin.y, other.origin.y, rel_tol=0, abs_tol=1e-12 * self.h))


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distância de cada centro de célula ao centro ocupado mais próximo"""
    origin: Point2
    h: float
    width: int
    height: int
    values: np.ndarray


def require_same_header(a: GridMask, b: GridMask):
    if not a.same_header(b):
        raise GeometryDomainError("Máscaras com cabeçalhos de grade diferentes")


def require_margin(mask: GridMask, radius: float, what: str = "morfologia"):
    if mask.margin + 1e-12 * mask.h < radius:
        deficit = radius - mask.margin
        raise GeometryDomainError(
            f"Margem insuficiente para {what}: {mask.margin:.6g} < {radius:.6g} "
            f"(faltam {deficit:.6g})")


def default_h(box: Box, diagonal_cells: int = DEFAULT_DIAGONAL_CELLS) -> float:
    if diagonal_cells < 1:
        raise GeometryDomainError(f"diagonal_cells deve ser >= 1, recebeu {diagonal_cells}")
    xmin, xmax, ymin, ymax = box
    return math.hypot(xmax - xmin, ymax - ymin) / diagonal_cells


def grid_for_box(box: Box, h: Optional[float] = None, margin: float = 0.0,
                 diagonal_cells: int = DEFAULT_DIAGONAL_CELLS) -> GridSpec:
    """Janela que cobre a caixa com a margem pedida; h padrão = diagonal/diagonal_cells"""
    if h is None:
        h = default_h(box, diagonal_cells)
    return GridSpec.from_box(box, h, margin)


def polygon_fill(vertices: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Preenchimento par-ímpar de um polígono fechado nos centros de célula"""
    v = np.asarray(vertices, dtype=float)
    a, b = v, np.roll(v, -1, axis=0)
    occ = np.zeros((len(ys), len(xs)), dtype=bool)
    for row, y in enumerate(ys):
        crosses = (a[:, 1] <= y) != (b[:, 1] <= y)
        if not crosses.any():
            continue
        a0, b0 = a[crosses], b[crosses]
        t = (y - a0[:, 1]) / (b0[:, 1] - a0[:, 1])
        x_cross = np.sort(a0[:, 0] + t * (b0[:, 0] - a0[:, 0]))
        occ[row] = np.searchsorted(x_cross, xs, side="right") % 2 == 1
    return occ


def _region_box(region) -> Box:
    if isinstance(region, RConvexHull):
        return region.sample.bounding_box
    return tuple(region.bounding_box)


def rasterize(region, h: Optional[float] = None,
              window: Union[Box, GridSpec, None] = None, margin: float = 0.0) -> GridMask:
    """
    Rasteriza um ShapeSpec ou um RConvexHull.

    Sem janela, usa a caixa envolvente expandida por margin (+ 2 células).
    Com janela, exige que ela cubra a caixa envolvente mais a margem.
    """
    box = _region_box(region)
    if isinstance(window, GridSpec):
        spec = window
    else:
        if h is None:
            h = default_h(box)
        if not h > 0:
            raise GeometryDomainError(f"h deve ser > 0, recebeu {h}")
        if window is None:
            spec = grid_for_box(box, h, margin)
        else:
            wx0, wx1, wy0, wy1 = window
            width = int(math.ceil((wx1 - wx0) / h))
            height = int(math.ceil((wy1 - wy0) / h))
            spec = GridSpec(Point2(wx0, wy0), float(h), width, height)

    wx0, wx1, wy0, wy1 = spec.window
    deficit = max(wx0 - (box[0] - margin), (box[1] + margin) - wx1,
                  wy0 - (box[2] - margin), (box[3] + margin) - wy1)
    if deficit > 1e-12 * spec.h:
        raise GeometryDomainError(f"Janela pequena demais: faltam {deficit:.6g} para cobrir "
                                  f"a caixa envolvente com margem {margin:.6g}")

    xs, ys = spec.xs, spec.ys
    if isinstance(region, RConvexHull):
        occ = fill_grid(region, xs, ys, nudge=1e-9 * spec.h)
    elif getattr(region, "polygon", None) is not None:
        occ = polygon_fill(region.polygon, xs, ys)
    else:
        occ = np.zeros((spec.height, spec.width), dtype=bool)
        for row, y in enumerate(ys):
            pts = np.column_stack([xs, np.full(spec.width, y)])
            occ[row] = region.contains_points(pts)
    mask = GridMask.from_spec(spec, occ)
    logger.debug(f"rasterize: {spec.width}x{spec.height} células, h={spec.h:.3g}, "
                 f"ocupadas={mask.count}")
    return mask


def edt(mask: GridMask) -> DistanceField:
    """Transformada de distância euclidiana exata até as células ocupadas"""
    if mask.is_empty:
        raise GeometryDomainError("edt de máscara vazia")
    values = ndimage.distance_transform_edt(~mask.occupancy, sampling=mask.h)
    return DistanceField(mask.origin, mask.h, mask.width, mask.height, values)


def inner_distance(mask: GridMask) -> np.ndarray:
    """Distância de cada célula à célula desocupada mais próxima (fora da janela conta)"""
    padded = np.pad(mask.occupancy, 1, constant_values=False)
    values = ndimage.distance_transform_edt(padded, sampling=mask.h)
    return values[1:-1, 1:-1]


def dilate(mask: GridMask, rho: float) -> GridMask:
    if rho < 0:
        raise GeometryDomainError(f"rho deve ser >= 0, recebeu {rho}")
    if mask.is_empty:
        return mask
    require_margin(mask, rho, "dilatação")
    return mask.with_occupancy(edt(mask).values <= rho)


def erode(mask: GridMask, rho: float) -> GridMask:
    """Complemento da dilatação do complemento; fora da janela é desocupado"""
    if rho < 0:
        raise GeometryDomainError(f"rho deve ser >= 0, recebeu {rho}")
    if mask.is_empty:
        return mask
    return mask.with_occupancy(inner_distance(mask) > rho)


def closing(mask: GridMask, rho: float) -> GridMask:
    return erode(dilate(mask, rho), rho)


def opening(mask: GridMask, rho: float) -> GridMask:
    """União das bolas de raio rho contidas na máscara"""
    inner = erode(mask, rho)
    if inner.is_empty:
        return inner
    # B(erosão, rho) fica dentro da máscara, então cabe na janela
    return mask.with_occupancy(edt(inner).values <= rho)


def boundary_mask(mask: GridMask) -> GridMask:
    """Células ocupadas 4-adjacentes a células desocupadas"""
    inner = ndimage.binary_erosion(mask.occupancy, structure=CROSS, border_value=0)
    return mask.with_occupancy(mask.occupancy & ~inner)


def band_zone(mask: GridMask, band: int) -> np.ndarray:
    """Células a até `band` células da fronteira"""
    border = boundary_mask(mask)
    if border.is_empty:
        return np.zeros_like(mask.occupancy)
    dist = ndimage.distance_transform_edt(~border.occupancy)
    return dist <= band
