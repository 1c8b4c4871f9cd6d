"""
Primitivas planas: pontos, conjuntos de pontos, discos, arcos e distâncias
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from core.errors import GeometryDomainError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
DEDUPE_FACTOR = 1e-12

PointLike = Union["Point2", Sequence[float], np.ndarray]


def wrap_angle(angle: float) -> float:
    """Normaliza um ângulo para o intervalo (-pi, pi]"""
    wrapped = math.pi - ((math.pi - angle) % TWO_PI)
    return float(wrapped)


@dataclass(frozen=True)
class Point2:
    """Ponto do plano com coordenadas finitas"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryDomainError(f"Coordenadas não finitas: ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other: PointLike) -> float:
        ox, oy = as_xy(other)
        return math.hypot(self.x - ox, self.y - oy)


def as_xy(point: PointLike) -> Tuple[float, float]:
    """Converte Point2 / tupla / array em (x, y)"""
    if isinstance(point, Point2):
        return point.x, point.y
    arr = np.asarray(point, dtype=float).reshape(-1)
    if arr.size != 2:
        raise GeometryDomainError(f"Ponto deve ter 2 coordenadas, recebeu {arr.size}")
    return float(arr[0]), float(arr[1])


@dataclass(frozen=True, eq=False)
class PointSet:
    """
    Amostra plana deduplicada.

    coords é um array (n, 2) somente-leitura; source_index guarda, para cada
    ponto mantido, o índice na entrada original.
    """
    coords: np.ndarray
    dedupe_tolerance: float = 0.0
    source_index: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise GeometryDomainError(f"coords deve ter forma (n, 2), recebeu {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise GeometryDomainError("PointSet com coordenadas não finitas")
        if self.dedupe_tolerance < 0:
            raise GeometryDomainError("dedupe_tolerance deve ser >= 0")
        coords = coords.copy()
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_array(cls, points, dedupe_tolerance: Optional[float] = None) -> "PointSet":
        """
        Cria um PointSet fundindo pontos a distância <= tolerância.

        Tolerância padrão: 1e-12 vezes a diagonal da caixa envolvente.
        Mantém sempre a primeira ocorrência.
        """
        if isinstance(points, PointSet):
            points = points.coords
        coords = np.asarray(points, dtype=float)
        if coords.size == 0:
            coords = coords.reshape(0, 2)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise GeometryDomainError(f"Esperado array (n, 2), recebeu {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise GeometryDomainError("Pontos com coordenadas não finitas")

        n = len(coords)
        if dedupe_tolerance is None:
            if n > 0:
                diag = float(np.hypot(*(coords.max(axis=0) - coords.min(axis=0))))
            else:
                diag = 0.0
            dedupe_tolerance = DEDUPE_FACTOR * diag

        keep = np.ones(n, dtype=bool)
        if n > 1:
            pairs = cKDTree(coords).query_pairs(dedupe_tolerance, output_type="ndarray")
            if len(pairs):
                pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
                for i, j in pairs:
                    if keep[i]:
                        keep[j] = False
                logger.debug(f"Deduplicação removeu {int((~keep).sum())} pontos")

        index = np.flatnonzero(keep)
        return cls(coords=coords[keep], dedupe_tolerance=float(dedupe_tolerance),
                   source_index=index)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, idx: int) -> Point2:
        x, y = self.coords[idx]
        return Point2(float(x), float(y))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @cached_property
    def kdtree(self) -> cKDTree:
        return cKDTree(self.coords)

    @property
    def bounding_box(self) -> Tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax)"""
        self._require_nonempty()
        lo = self.coords.min(axis=0)
        hi = self.coords.max(axis=0)
        return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])

    @cached_property
    def diameter(self) -> float:
        if len(self) < 2:
            return 0.0
        pts = self.coords
        try:
            pts = pts[ConvexHull(pts).vertices]
        except (QhullError, ValueError):
            pass
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff ** 2).sum(axis=-1)).max())

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet.from_array(np.vstack([self.coords, other.coords]))

    def _require_nonempty(self):
        if len(self) == 0:
            raise GeometryDomainError("Conjunto de pontos vazio")


@dataclass(frozen=True)
class Disc:
    """Disco fechado B(center, radius)"""
    center: Point2
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryDomainError(f"Raio do disco deve ser > 0, recebeu {self.radius}")

    def contains(self, point: PointLike, open_disc: bool = False) -> bool:
        d = self.center.distance(point)
        return d < self.radius if open_disc else d <= self.radius


@dataclass(frozen=True)
class ArcSegment:
    """Arco de círculo; sweep com sinal (anti-horário positivo)"""
    center: Point2
    radius: float
    start_angle: float
    sweep: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryDomainError(f"Raio do arco deve ser > 0, recebeu {self.radius}")
        if abs(self.sweep) > TWO_PI + 1e-12:
            raise GeometryDomainError(f"|sweep| > 2*pi: {self.sweep}")
        object.__setattr__(self, "start_angle", wrap_angle(self.start_angle))

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    def point_at(self, angle: float) -> np.ndarray:
        return np.array([self.center.x + self.radius * math.cos(angle),
                         self.center.y + self.radius * math.sin(angle)])

    @property
    def start_point(self) -> np.ndarray:
        return self.point_at(self.start_angle)

    @property
    def end_point(self) -> np.ndarray:
        return self.point_at(self.end_angle)

    @property
    def midpoint(self) -> np.ndarray:
        return self.point_at(self.start_angle + 0.5 * self.sweep)

    @property
    def length(self) -> float:
        return arc_length(self)


def arc_length(arc: ArcSegment) -> float:
    """Comprimento radius * |sweep|"""
    return arc.radius * abs(arc.sweep)


def dist_to_set(x: PointLike, points: PointSet) -> float:
    """Distância euclidiana de x ao ponto mais próximo do conjunto"""
    points._require_nonempty()
    d, _ = points.kdtree.query(as_xy(x))
    return float(d)


def nearest_point(x: PointLike, points: PointSet,
                  tie_tolerance: float = 0.0) -> Tuple[Point2, bool]:
    """
    Projeção de x no conjunto.

    O flag unique é falso quando um segundo ponto atinge o mínimo a menos de
    tie_tolerance.
    """
    points._require_nonempty()
    if tie_tolerance < 0:
        raise GeometryDomainError("tie_tolerance deve ser >= 0")
    xy = as_xy(x)
    if len(points) == 1:
        return points[0], True
    d, idx = points.kdtree.query(xy, k=2)
    unique = bool(d[1] - d[0] > tie_tolerance)
    return points[int(idx[0])], unique


def hausdorff_pointsets(a: PointSet, b: PointSet) -> float:
    """Distância de Hausdorff entre dois conjuntos finitos"""
    a._require_nonempty()
    b._require_nonempty()
    d_ab, _ = b.kdtree.query(a.coords)
    d_ba, _ = a.kdtree.query(b.coords)
    return float(max(d_ab.max(), d_ba.max()))


def convex_hull_perimeter(points: PointSet) -> float:
    """Perímetro do fecho convexo (segmento degenerado conta ida e volta)"""
    points._require_nonempty()
    if len(points) < 3:
        return 2.0 * points.diameter
    try:
        # em 2-D, ConvexHull.area é o perímetro
        return float(ConvexHull(points.coords).area)
    except QhullError:
        return 2.0 * points.diameter


def convex_hull_contains(points: PointSet, xy: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Teste vetorizado de pertinência ao fecho convexo da amostra"""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    if len(points) < 3:
        return np.zeros(len(xy), dtype=bool)
    try:
        hull = ConvexHull(points.coords)
    except QhullError:
        return np.zeros(len(xy), dtype=bool)
    # equations: normal . x + offset <= 0 dentro
    values = xy @ hull.equations[:, :2].T + hull.equations[:, 2]
    return np.all(values <= tol, axis=1)
