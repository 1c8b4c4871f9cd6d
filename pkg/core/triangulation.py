"""
Triangulação de Delaunay com dual de Voronoi

Construção inicial pelo qhull (scipy.spatial.Delaunay); orientação e
legalidade de cada aresta conferidas com os predicados exatos. Empates
cocirculares ficam com a diagonal incidente ao menor índice do quadrilátero.
"""
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError

from core.errors import GeometryDomainError
from core.geometry import PointSet
from core.predicates import incircle, incircle_many, orient2d_many

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


def _key(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class VoronoiEdge:
    """Aresta de Voronoi dual a (i, j): segmento, raio (end=None) ou reta"""
    start: np.ndarray
    end: Optional[np.ndarray]
    direction: Optional[np.ndarray]
    two_sided: bool = False


@dataclass(frozen=True, eq=False)
class Triangulation:
    vertices: PointSet
    triangles: np.ndarray
    edge_triangles: Dict[Edge, Tuple[int, ...]]

    @property
    def is_degenerate(self) -> bool:
        return len(self.triangles) == 0

    @cached_property
    def edges(self) -> np.ndarray:
        """Arestas não direcionadas (k, 2), ordenadas"""
        if not self.edge_triangles:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edge_triangles), dtype=np.int64)

    @cached_property
    def hull_edges(self) -> List[Edge]:
        if self.is_degenerate:
            return sorted(self.edge_triangles)
        return sorted(e for e, ts in self.edge_triangles.items() if len(ts) == 1)

    @cached_property
    def circumcenters(self) -> np.ndarray:
        return circumcenters(self.vertices.coords, self.triangles)

    def voronoi_edge(self, i: int, j: int) -> VoronoiEdge:
        key = _key(i, j)
        if key not in self.edge_triangles:
            raise GeometryDomainError(f"Aresta ({i}, {j}) não pertence à triangulação")
        p, q = self.vertices.coords[key[0]], self.vertices.coords[key[1]]
        chord = q - p
        normal = np.array([-chord[1], chord[0]]) / np.hypot(*chord)
        tris = self.edge_triangles[key]
        if not tris:
            return VoronoiEdge(start=0.5 * (p + q), end=None, direction=normal, two_sided=True)
        centers = self.circumcenters[list(tris)]
        if len(tris) == 2:
            return VoronoiEdge(start=centers[0], end=centers[1], direction=None)
        # aresta do fecho: raio para fora, longe do terceiro vértice
        third = [v for v in self.triangles[tris[0]] if v not in key][0]
        if np.dot(self.vertices.coords[third] - p, normal) > 0:
            normal = -normal
        return VoronoiEdge(start=centers[0], end=None, direction=normal)


def circumcenters(coords: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    if len(triangles) == 0:
        return np.empty((0, 2))
    a = coords[triangles[:, 0]]
    b = coords[triangles[:, 1]] - a
    c = coords[triangles[:, 2]] - a
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    b2 = (b ** 2).sum(axis=1)
    c2 = (c ** 2).sum(axis=1)
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / d
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / d
    return a + np.column_stack([ux, uy])


def _degenerate(points: PointSet) -> Triangulation:
    """Cadeia de arestas para entradas colineares ou com menos de 3 pontos"""
    n = len(points)
    if n < 2:
        return Triangulation(points, np.empty((0, 3), dtype=np.int64), {})
    coords = points.coords
    far = int(np.argmax(((coords - coords[0]) ** 2).sum(axis=1)))
    direction = coords[far] - coords[0]
    order = np.argsort(coords @ direction, kind="stable")
    edges = {_key(int(i), int(j)): () for i, j in zip(order[:-1], order[1:])}
    return Triangulation(points, np.empty((0, 3), dtype=np.int64), edges)


def _all_collinear(coords: np.ndarray) -> bool:
    far = int(np.argmax(((coords - coords[0]) ** 2).sum(axis=1)))
    if far == 0:
        return True
    m = len(coords)
    signs = orient2d_many(np.repeat(coords[:1], m, axis=0),
                          np.repeat(coords[far:far + 1], m, axis=0), coords)
    return not np.any(signs)


def _build_adjacency(triangles: List[List[int]]) -> Dict[Edge, set]:
    adjacency: Dict[Edge, set] = defaultdict(set)
    for t, (a, b, c) in enumerate(triangles):
        adjacency[_key(a, b)].add(t)
        adjacency[_key(b, c)].add(t)
        adjacency[_key(c, a)].add(t)
    return adjacency


def _opposite(tri: List[int], i: int, j: int) -> int:
    for v in tri:
        if v != i and v != j:
            return v
    raise GeometryDomainError("Triângulo degenerado na adjacência")


def _rotate_to_edge(tri: List[int], a: int, b: int) -> Tuple[int, int, int]:
    """Rotaciona (ccw) para começar pela aresta dirigida a->b, se existir"""
    for k in range(3):
        if tri[k] == a and tri[(k + 1) % 3] == b:
            return tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
    raise KeyError((a, b))


def _should_flip(coords: np.ndarray, a: int, b: int, c: int, d: int) -> bool:
    sign = incircle(coords[a], coords[b], coords[c], coords[d])
    if sign > 0:
        return True
    if sign == 0:
        return min(a, b, c, d) in (c, d)
    return False


def _legalize(coords: np.ndarray, triangles: List[List[int]],
              adjacency: Dict[Edge, set], queue: deque) -> int:
    """Flips de Lawson a partir das arestas da fila; devolve o número de flips"""
    flips = 0
    cap = 10 * max(len(coords), 10)
    queued = set(queue)
    while queue:
        key = queue.popleft()
        queued.discard(key)
        tris = adjacency.get(key)
        if not tris or len(tris) != 2:
            continue
        t1, t2 = tuple(tris)
        i, j = key
        try:
            a, b, c = _rotate_to_edge(triangles[t1], i, j)
        except KeyError:
            t1, t2 = t2, t1
            a, b, c = _rotate_to_edge(triangles[t1], i, j)
        d = _opposite(triangles[t2], a, b)
        if not _should_flip(coords, a, b, c, d):
            continue
        if flips >= cap:
            logger.warning("⚠️ Limite de flips atingido na legalização de Delaunay")
            break
        # quadrilátero anti-horário a -> d -> b -> c; nova diagonal c-d
        triangles[t1] = [a, d, c]
        triangles[t2] = [d, b, c]
        del adjacency[_key(a, b)]
        adjacency[_key(c, d)] = {t1, t2}
        adjacency[_key(a, d)].discard(t2)
        adjacency[_key(a, d)].add(t1)
        adjacency[_key(b, c)].discard(t1)
        adjacency[_key(b, c)].add(t2)
        flips += 1
        for edge in (_key(a, d), _key(d, b), _key(b, c), _key(c, a)):
            if edge not in queued:
                queue.append(edge)
                queued.add(edge)
    return flips


def delaunay(points: PointSet) -> Triangulation:
    """
    Triangulação de Delaunay de um PointSet deduplicado.

    Menos de 3 pontos ou pontos colineares resultam numa triangulação
    degenerada: só a cadeia de arestas, sem triângulos.
    """
    n = len(points)
    if n == 0:
        raise GeometryDomainError("Triangulação de conjunto vazio")
    coords = points.coords
    if n < 3 or _all_collinear(coords):
        logger.debug(f"Triangulação degenerada para {n} pontos")
        return _degenerate(points)

    try:
        qhull = Delaunay(coords)
    except QhullError as e:
        logger.warning(f"⚠️ qhull falhou ({e}); repetindo com joggle")
        qhull = Delaunay(coords, qhull_options="QJ")
    if len(getattr(qhull, "coplanar", [])):
        logger.warning(f"⚠️ qhull descartou {len(qhull.coplanar)} pontos quase coincidentes")

    simplices = np.asarray(qhull.simplices, dtype=np.int64)
    signs = orient2d_many(coords[simplices[:, 0]], coords[simplices[:, 1]],
                          coords[simplices[:, 2]])
    flipped = signs < 0
    simplices[flipped] = simplices[flipped][:, [0, 2, 1]]
    if np.any(signs == 0):
        logger.warning(f"⚠️ {int((signs == 0).sum())} triângulos de área nula descartados")
        simplices = simplices[signs != 0]

    triangles = simplices.tolist()
    adjacency = _build_adjacency(triangles)

    # checagem vetorizada das arestas internas
    interior = [(k, tuple(ts)) for k, ts in adjacency.items() if len(ts) == 2]
    queue: deque = deque()
    if interior:
        quads = []
        for (i, j), (t1, t2) in interior:
            try:
                a, b, c = _rotate_to_edge(triangles[t1], i, j)
            except KeyError:
                t1, t2 = t2, t1
                a, b, c = _rotate_to_edge(triangles[t1], i, j)
            quads.append((a, b, c, _opposite(triangles[t2], a, b)))
        quads = np.array(quads, dtype=np.int64)
        signs = incircle_many(coords[quads[:, 0]], coords[quads[:, 1]],
                              coords[quads[:, 2]], coords[quads[:, 3]])
        smallest = quads.min(axis=1)
        tie_flip = (signs == 0) & ((smallest == quads[:, 2]) | (smallest == quads[:, 3]))
        suspect = np.flatnonzero((signs > 0) | tie_flip)
        for k in suspect:
            queue.append(interior[k][0])

    if queue:
        flips = _legalize(coords, triangles, adjacency, queue)
        logger.debug(f"Legalização de Delaunay: {flips} flips")

    tri_array = np.array(triangles, dtype=np.int64).reshape(-1, 3)
    edge_triangles = {k: tuple(sorted(v)) for k, v in adjacency.items() if v}
    return Triangulation(points, tri_array, edge_triangles)
