"""
Fecho r-convexo de uma amostra plana

O complemento do fecho é a união dos discos abertos de raio r vazios de
pontos da amostra. A fronteira é formada por arcos de círculos de raio r
centrados nos "vértices" do conjunto de centros vazios: pontos a distância r
de dois (ou mais) pontos da amostra e a distância >= r de todos os outros.

Escolha do lado de cada aresta: as duas candidatas a centro de uma aresta de
Delaunay com comprimento < 2r (uma de cada lado da corda) são testadas
diretamente contra a amostra, e não pela direção da aresta de Voronoi dual.
Cada centro vazio aceito expõe o setor entre seus contatos extremos; o que
outros discos vazios cobrem é recortado, e uma peça cujo ponto médio ainda
cai num disco vazio é descartada. O resultado é o mesmo da regra por Voronoi:
um arco sobrevive exatamente quando há um disco aberto vazio tangente a ele
do lado de fora.

Convenções:
  - todo arco é orientado no sentido horário em torno do seu centro
    (sweep negativo), de modo que o fecho fica sempre à esquerda;
  - extremidades são identificadas por chaves canônicas: ('s', i) para o
    ponto i da amostra e ('x', i, j, lado) para o cruzamento dos círculos
    dos centros i < j, lado relativo à reta dirigida de i para j.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from core.errors import ChainClosureError, GeometryDomainError
from core.geometry import (TWO_PI, ArcSegment, Point2, PointLike, PointSet,
                           arc_length, as_xy, dist_to_set)
from core.triangulation import delaunay

logger = logging.getLogger(__name__)

ACCEPT_TOL_FACTOR = 1e-9
STITCH_TOL_FACTOR = 1e-9
STITCH_FALLBACK_FACTOR = 1e-6
ANGLE_TOL = 1e-9
TANGENT_SLACK = 1e-10
QUERY_CHUNK = 2_000_000

Key = Tuple


@dataclass(frozen=True)
class BoundaryArc:
    """Arco da fronteira com suas extremidades e o centro vazio que o gerou"""
    arc: ArcSegment
    endpoint_i: int
    endpoint_j: int
    center_id: int
    start_key: Key
    end_key: Key


@dataclass(frozen=True)
class _ArcArrays:
    centers: np.ndarray
    radius: float
    start: np.ndarray
    sweep: np.ndarray
    lo: np.ndarray
    width: np.ndarray
    p_start: np.ndarray
    p_end: np.ndarray
    p_mid: np.ndarray


def _arrays_for(arcs: Sequence[BoundaryArc], r: float) -> _ArcArrays:
    m = len(arcs)
    centers = np.array([[a.arc.center.x, a.arc.center.y] for a in arcs]).reshape(m, 2)
    start = np.array([a.arc.start_angle for a in arcs], dtype=float)
    sweep = np.array([a.arc.sweep for a in arcs], dtype=float)
    lo = np.where(sweep > 0, start, start + sweep)
    width = np.abs(sweep)

    def at(angle):
        return centers + r * np.column_stack([np.cos(angle), np.sin(angle)])

    return _ArcArrays(centers=centers, radius=r, start=start, sweep=sweep, lo=lo,
                      width=width, p_start=at(start), p_end=at(start + sweep),
                      p_mid=at(start + 0.5 * sweep))


@dataclass(frozen=True, eq=False)
class HullBoundary:
    arcs: Tuple[BoundaryArc, ...]
    chains: Tuple[Tuple[int, ...], ...]
    component_ids: Tuple[int, ...]
    chain_areas: Tuple[float, ...]
    radius: float

    @cached_property
    def arrays(self) -> _ArcArrays:
        return _arrays_for(self.arcs, self.radius)

    @property
    def n_components(self) -> int:
        return len(set(self.component_ids))


@dataclass(frozen=True, eq=False)
class RConvexHull:
    sample: PointSet
    r: float
    boundary: HullBoundary
    isolated: FrozenSet[int]
    regular: FrozenSet[int]
    centers: np.ndarray

    @property
    def length(self) -> float:
        return boundary_length(self)

    @property
    def tolerance(self) -> float:
        return ACCEPT_TOL_FACTOR * self.r

    def arc_table(self) -> pd.DataFrame:
        """Tabela de arcos no formato de --out-arcs"""
        chain_of = {}
        for cid, chain in enumerate(self.boundary.chains):
            for k in chain:
                chain_of[k] = cid
        rows = []
        for k, b in enumerate(self.boundary.arcs):
            rows.append({
                'chain_id': chain_of.get(k, -1),
                'center_x': b.arc.center.x,
                'center_y': b.arc.center.y,
                'radius': b.arc.radius,
                'start_angle': b.arc.start_angle,
                'sweep': b.arc.sweep,
                'endpoint_i': b.endpoint_i,
                'endpoint_j': b.endpoint_j,
            })
        columns = ['chain_id', 'center_x', 'center_y', 'radius', 'start_angle',
                   'sweep', 'endpoint_i', 'endpoint_j']
        return pd.DataFrame(rows, columns=columns)


# ---------------------------------------------------------------------------
# Construção
# ---------------------------------------------------------------------------

def _candidate_centers(sample: PointSet, r: float) -> np.ndarray:
    """Centros a distância r de ambos os extremos de cada aresta de Delaunay"""
    tri = delaunay(sample)
    edges = tri.edges
    if len(edges) == 0:
        return np.empty((0, 2))
    p = sample.coords[edges[:, 0]]
    q = sample.coords[edges[:, 1]]
    chord = q - p
    d = np.hypot(chord[:, 0], chord[:, 1])
    keep = d < 2.0 * r
    p, chord, d = p[keep], chord[keep], d[keep]
    if len(d) == 0:
        return np.empty((0, 2))
    half = 0.5 * d
    height = np.sqrt(np.maximum((r - half) * (r + half), 0.0))
    normal = np.column_stack([-chord[:, 1], chord[:, 0]]) / d[:, None]
    mid = p + 0.5 * chord
    return np.vstack([mid + height[:, None] * normal, mid - height[:, None] * normal])


def _merge_centers(centers: np.ndarray, tol: float) -> np.ndarray:
    """Funde centros quase idênticos (pares de um mesmo círculo cocircular)"""
    if len(centers) < 2:
        return centers
    pairs = cKDTree(centers).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return centers
    parent = list(range(len(centers)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in pairs:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = sorted({find(i) for i in range(len(centers))})
    return centers[roots]


def _contact_pieces(center: np.ndarray, contacts: List[int],
                    sample: PointSet) -> List[Tuple[float, float, Key, Key]]:
    """
    Arcos expostos de um centro vazio, em coordenadas anti-horárias
    (lo, largura, chave em lo, chave em lo + largura).

    Contatos num semiplano: setor entre os contatos extremos. Caso
    contrário, o círculo inteiro entre contatos consecutivos.
    """
    vec = sample.coords[contacts] - center
    angles = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), TWO_PI)
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    idx = [contacts[k] for k in order]
    m = len(idx)
    gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
    pieces = []
    if gaps.max() > math.pi:
        skip = int(np.argmax(gaps))
        spans = [(k, (k + 1) % m) for k in range(m) if k != skip]
    else:
        spans = [(k, (k + 1) % m) for k in range(m)]
    for a, b in spans:
        width = float(gaps[a])
        if width <= ANGLE_TOL:
            continue
        pieces.append((float(angles[a]), width, ('s', idx[a]), ('s', idx[b])))
    return pieces


def _crossing_keys(i: int, j: int) -> Tuple[Key, Key]:
    """Chaves dos pontos em theta - phi e theta + phi vistos do círculo i"""
    lo, hi = (i, j) if i < j else (j, i)
    if i < j:
        return ('x', lo, hi, 'R'), ('x', lo, hi, 'L')
    return ('x', lo, hi, 'L'), ('x', lo, hi, 'R')


def _clip_piece(lo: float, width: float, key_lo: Key, key_hi: Key,
                covers: List[Tuple[float, float, Key, Key]]
                ) -> List[Tuple[float, float, Key, Key]]:
    """Subtrai arcos cobertos (abertos) de [lo, lo + width]"""
    snap = ANGLE_TOL
    intervals = []
    for start, extent, key_a, key_b in covers:
        u = (start - lo) % TWO_PI
        if u > TWO_PI - snap:
            u -= TWO_PI
        v = u + extent
        parts = [(u, v, key_a, key_b)]
        if v > TWO_PI:
            parts = [(u, TWO_PI, key_a, None), (0.0, v - TWO_PI, None, key_b)]
        for a, b, ka, kb in parts:
            if b <= snap or a >= width - snap:
                continue
            intervals.append((a, b, ka, kb))
    if not intervals:
        return [(lo, width, key_lo, key_hi)]

    intervals.sort(key=lambda t: t[0])
    kept = []
    cursor, cursor_key = 0.0, key_lo
    for a, b, ka, kb in intervals:
        if a > cursor + snap:
            kept.append((cursor, a, cursor_key, ka))
        if b > cursor:
            cursor, cursor_key = b, kb
    if cursor < width - snap:
        kept.append((cursor, width, cursor_key, key_hi))

    result = []
    for a, b, ka, kb in kept:
        if b - a <= ANGLE_TOL or ka is None or kb is None:
            continue
        a_snap = 0.0 if a <= snap else a
        b_snap = width if b >= width - snap else b
        ka = key_lo if a_snap == 0.0 else ka
        kb = key_hi if b_snap == width else kb
        result.append((lo + a_snap, b_snap - a_snap, ka, kb))
    return result


def _covered_by_empty_disc(points: np.ndarray, sample: PointSet, r: float,
                           tol: float) -> np.ndarray:
    """
    Teste exato de pertinência ao complemento do fecho para pontos soltos.

    z está no complemento sse dist(z, amostra) >= r ou existe um ponto x da
    amostra com 0 < |z - x| < 2r cuja projeção radial c = x + r (z - x)/|z - x|
    é um centro vazio (dist(c, amostra) >= r).
    """
    if len(points) == 0:
        return np.zeros(0, dtype=bool)
    tree = sample.kdtree
    d, _ = tree.query(points)
    covered = d >= r - tol
    neighbors = tree.query_ball_point(points, 2.0 * r)
    for k in np.flatnonzero(~covered):
        idx = np.asarray(neighbors[k], dtype=np.int64)
        if len(idx) == 0:
            continue
        vec = points[k] - sample.coords[idx]
        rho = np.hypot(vec[:, 0], vec[:, 1])
        ok = (rho > tol) & (rho < 2.0 * r - tol)
        if not np.any(ok):
            continue
        proj = sample.coords[idx[ok]] + r * vec[ok] / rho[ok, None]
        gap = np.abs(rho[ok] - r)
        dproj, _ = tree.query(proj)
        if np.any((dproj >= r - tol) & (gap < r - 2.0 * tol)):
            covered[k] = True
    return covered


def _signed_chain_area(arcs: Sequence[BoundaryArc], chain: Sequence[int], r: float) -> float:
    pts = np.array([arcs[k].arc.start_point for k in chain])
    x, y = pts[:, 0], pts[:, 1]
    shoelace = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    segments = sum(0.5 * r * r * (arcs[k].arc.sweep - math.sin(arcs[k].arc.sweep))
                   for k in chain)
    return shoelace + segments


def _fragment(arcs: Sequence[BoundaryArc], chain: Sequence[int]) -> List[Dict]:
    return [{'arc': k, 'start_key': arcs[k].start_key, 'end_key': arcs[k].end_key,
             'start': tuple(arcs[k].arc.start_point), 'end': tuple(arcs[k].arc.end_point)}
            for k in chain]


def _stitch(arcs: Sequence[BoundaryArc], r: float, stitch_factor: float,
            fallback_factor: float) -> List[Tuple[int, ...]]:
    """Encadeia arcos cabeça-cauda pelas chaves; coordenadas como recurso"""
    m = len(arcs)
    by_start: Dict[Key, List[int]] = defaultdict(list)
    for k, a in enumerate(arcs):
        by_start[a.start_key].append(k)
    starts = np.array([a.arc.start_point for a in arcs]).reshape(m, 2)
    used = np.zeros(m, dtype=bool)
    tight, loose = stitch_factor * r, fallback_factor * r

    def nearest_unused(point: np.ndarray, tol: float) -> Optional[int]:
        free = np.flatnonzero(~used)
        if len(free) == 0:
            return None
        d = np.hypot(*(starts[free] - point).T)
        best = int(np.argmin(d))
        return int(free[best]) if d[best] <= tol else None

    chains = []
    for seed in range(m):
        if used[seed]:
            continue
        used[seed] = True
        chain = [seed]
        first_key, first_point = arcs[seed].start_key, starts[seed]
        current = seed
        while True:
            end_key = arcs[current].end_key
            if end_key == first_key:
                break
            nxt = next((k for k in by_start.get(end_key, ()) if not used[k]), None)
            if nxt is None:
                end_point = arcs[current].arc.end_point
                gap = float(np.hypot(*(end_point - first_point)))
                if gap <= tight:
                    break
                nxt = nearest_unused(end_point, tight)
                if nxt is None:
                    nxt = nearest_unused(end_point, loose)
                    if nxt is None and gap <= loose:
                        logger.warning(f"⚠️ Cadeia fechada com folga {gap:.3e}")
                        break
                    if nxt is not None:
                        logger.warning("⚠️ Extremidades unidas pela tolerância ampliada")
                if nxt is None:
                    raise ChainClosureError(
                        f"Não foi possível fechar a cadeia a partir do arco {seed}",
                        fragment=_fragment(arcs, chain))
            used[nxt] = True
            chain.append(nxt)
            current = nxt
        chains.append(tuple(chain))
    return chains


def _components(arcs: Sequence[BoundaryArc], chains: Sequence[Tuple[int, ...]],
                areas: Sequence[float], r: float) -> Tuple[int, ...]:
    """Componentes conexas: cadeias externas, buracos e vértices compartilhados"""
    parent = list(range(len(chains)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    owner: Dict[Key, int] = {}
    for cid, chain in enumerate(chains):
        for k in chain:
            key = arcs[k].start_key
            if key in owner:
                union(owner[key], cid)
            else:
                owner[key] = cid

    outers = [c for c, a in enumerate(areas) if a > 0]
    for cid, area in enumerate(areas):
        if area > 0:
            continue
        anchor = arcs[chains[cid][0]].arc.midpoint[None, :]
        best, best_area = None, math.inf
        for oid in outers:
            sub = _arrays_for([arcs[k] for k in chains[oid]], r)
            if abs(_winding(sub, anchor)[0]) > 0.5 and areas[oid] < best_area:
                best, best_area = oid, areas[oid]
        if best is not None:
            union(cid, best)

    labels: Dict[int, int] = {}
    result = []
    for cid in range(len(chains)):
        root = find(cid)
        labels.setdefault(root, len(labels))
        result.append(labels[root])
    return tuple(result)


def build_hull(sample: PointSet, r: float,
               accept_tol_factor: float = ACCEPT_TOL_FACTOR,
               stitch_factor: float = STITCH_TOL_FACTOR,
               fallback_factor: float = STITCH_FALLBACK_FACTOR) -> RConvexHull:
    """
    Constrói o fecho r-convexo da amostra.

    Raises:
        GeometryDomainError: r <= 0 ou amostra vazia
        ChainClosureError: falha numérica ao fechar uma cadeia de arcos
    """
    if not r > 0 or not math.isfinite(r):
        raise GeometryDomainError(f"r deve ser > 0, recebeu {r}")
    if len(sample) == 0:
        raise GeometryDomainError("Amostra vazia")
    tol = accept_tol_factor * r

    candidates = _candidate_centers(sample, r)
    if len(candidates):
        dmin, _ = sample.kdtree.query(candidates)
        accepted = candidates[dmin >= r - tol]
    else:
        accepted = candidates
    centers = _merge_centers(accepted, tol)
    logger.debug(f"build_hull: {len(candidates)} candidatos, {len(centers)} centros vazios")

    # arcos expostos por centro, já recortados pelos discos vizinhos
    pieces: List[Tuple[int, float, float, Key, Key]] = []
    if len(centers):
        contacts = sample.kdtree.query_ball_point(centers, r + tol)
        center_tree = cKDTree(centers)
        neighbors = center_tree.query_ball_point(centers, 2.0 * r)
        for i, center in enumerate(centers):
            own = sorted(int(k) for k in contacts[i])
            if len(own) < 2:
                continue
            covers = []
            for j in neighbors[i]:
                if j == i:
                    continue
                vec = centers[j] - center
                dist = math.hypot(vec[0], vec[1])
                if dist <= tol or dist >= 2.0 * r * (1.0 - TANGENT_SLACK):
                    continue
                theta = math.atan2(vec[1], vec[0])
                phi = math.acos(dist / (2.0 * r))
                key_minus, key_plus = _crossing_keys(i, int(j))
                covers.append((theta - phi, 2.0 * phi, key_minus, key_plus))
            for lo, width, key_lo, key_hi in _contact_pieces(center, own, sample):
                for plo, pw, kl, kh in _clip_piece(lo, width, key_lo, key_hi, covers):
                    pieces.append((i, plo, pw, kl, kh))

    # peças inteiramente cobertas por discos vazios que não são vértices
    if pieces:
        mids = np.array([centers[i] + r * np.array([math.cos(lo + 0.5 * w),
                                                     math.sin(lo + 0.5 * w)])
                         for i, lo, w, _, _ in pieces])
        covered = _covered_by_empty_disc(mids, sample, r, tol)
        if covered.any():
            logger.debug(f"build_hull: {int(covered.sum())} peças descartadas pelo teste exato")
        pieces = [p for p, c in zip(pieces, covered) if not c]

    arcs = []
    for i, lo, width, key_lo, key_hi in pieces:
        # sentido horário: começa em lo + width, termina em lo
        arcs.append(BoundaryArc(
            arc=ArcSegment(center=Point2(float(centers[i, 0]), float(centers[i, 1])),
                           radius=r, start_angle=lo + width, sweep=-width),
            endpoint_i=key_hi[1] if key_hi[0] == 's' else -1,
            endpoint_j=key_lo[1] if key_lo[0] == 's' else -1,
            center_id=i, start_key=key_hi, end_key=key_lo))

    chains = _stitch(arcs, r, stitch_factor, fallback_factor) if arcs else []
    areas = [_signed_chain_area(arcs, c, r) for c in chains]
    component_ids = _components(arcs, chains, areas, r) if chains else ()
    boundary = HullBoundary(arcs=tuple(arcs), chains=tuple(chains),
                            component_ids=component_ids, chain_areas=tuple(areas),
                            radius=r)

    regular = frozenset(k[1] for a in arcs for k in (a.start_key, a.end_key) if k[0] == 's')
    others = np.array(sorted(set(range(len(sample))) - regular), dtype=np.int64)
    isolated: FrozenSet[int] = frozenset()
    if len(others):
        if arcs:
            wind = _winding(boundary.arrays, sample.coords[others])
            isolated = frozenset(int(k) for k, w in zip(others, wind) if abs(w) < 0.5)
        else:
            isolated = frozenset(int(k) for k in others)

    hull = RConvexHull(sample=sample, r=float(r), boundary=boundary, isolated=isolated,
                       regular=regular, centers=centers)
    logger.debug(f"build_hull: {len(arcs)} arcos, {len(chains)} cadeias, "
                 f"{len(isolated)} pontos isolados, L={boundary_length(hull):.6f}")
    return hull


# ---------------------------------------------------------------------------
# Consultas
# ---------------------------------------------------------------------------

def _angle_in_arc(theta: np.ndarray, lo: np.ndarray, width: np.ndarray,
                  slack: float = 0.0) -> np.ndarray:
    return np.mod(theta - lo, TWO_PI) <= width + slack


def _winding(arrays: _ArcArrays, xy: np.ndarray) -> np.ndarray:
    """Número de voltas das cadeias em torno de cada ponto (vetorizado em blocos)"""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    m = len(arrays.sweep)
    out = np.zeros(len(xy))
    if m == 0 or len(xy) == 0:
        return out
    step = max(1, QUERY_CHUNK // m)
    r = arrays.radius
    chord = arrays.p_end - arrays.p_start
    mid_side = np.sign(chord[:, 0] * (arrays.p_mid[:, 1] - arrays.p_start[:, 1])
                       - chord[:, 1] * (arrays.p_mid[:, 0] - arrays.p_start[:, 0]))
    full = np.hypot(chord[:, 0], chord[:, 1]) <= 1e-15 * max(r, 1.0)
    for s in range(0, len(xy), step):
        block = xy[s:s + step]
        px = arrays.p_start[None, :, 0] - block[:, None, 0]
        py = arrays.p_start[None, :, 1] - block[:, None, 1]
        qx = arrays.p_end[None, :, 0] - block[:, None, 0]
        qy = arrays.p_end[None, :, 1] - block[:, None, 1]
        delta = np.arctan2(px * qy - py * qx, px * qx + py * qy)
        delta[:, full] = 0.0
        dx = block[:, None, 0] - arrays.centers[None, :, 0]
        dy = block[:, None, 1] - arrays.centers[None, :, 1]
        inside_circle = dx * dx + dy * dy < r * r
        side = np.sign(chord[None, :, 0] * (block[:, None, 1] - arrays.p_start[None, :, 1])
                       - chord[None, :, 1] * (block[:, None, 0] - arrays.p_start[None, :, 0]))
        in_segment = inside_circle & ((side == mid_side[None, :]) | full[None, :])
        delta = delta + TWO_PI * np.sign(arrays.sweep)[None, :] * in_segment
        out[s:s + step] = delta.sum(axis=1) / TWO_PI
    return out


def _on_arcs(arrays: _ArcArrays, xy: np.ndarray, tol: float) -> np.ndarray:
    xy = np.atleast_2d(xy)
    m = len(arrays.sweep)
    out = np.zeros(len(xy), dtype=bool)
    if m == 0:
        return out
    step = max(1, QUERY_CHUNK // m)
    r = arrays.radius
    for s in range(0, len(xy), step):
        block = xy[s:s + step]
        dx = block[:, None, 0] - arrays.centers[None, :, 0]
        dy = block[:, None, 1] - arrays.centers[None, :, 1]
        near = np.abs(np.hypot(dx, dy) - r) <= tol
        within = _angle_in_arc(np.arctan2(dy, dx), arrays.lo[None, :], arrays.width[None, :],
                               slack=tol / r)
        out[s:s + step] = np.any(near & within, axis=1)
    return out


def contains_points(hull: RConvexHull, xy) -> np.ndarray:
    """Pertinência vetorizada: pontos da amostra, arcos e número de voltas"""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    tol = hull.tolerance
    d, _ = hull.sample.kdtree.query(xy)
    result = d <= tol
    if not hull.boundary.arcs:
        return result
    arrays = hull.boundary.arrays
    rest = np.flatnonzero(~result)
    if len(rest):
        wind = _winding(arrays, xy[rest])
        inside = np.abs(wind) > 0.5
        undecided = rest[~inside]
        result[rest[inside]] = True
        if len(undecided):
            result[undecided] = _on_arcs(arrays, xy[undecided], tol)
    return result


def contains(hull: RConvexHull, x: PointLike) -> bool:
    """True sse x não está em nenhum disco aberto de raio r vazio de amostra"""
    return bool(contains_points(hull, np.array([as_xy(x)]))[0])


def isolated_points(hull: RConvexHull) -> PointSet:
    idx = np.array(sorted(hull.isolated), dtype=np.int64)
    return PointSet(coords=hull.sample.coords[idx].reshape(-1, 2),
                    dedupe_tolerance=hull.sample.dedupe_tolerance, source_index=idx)


def boundary_length(hull: RConvexHull) -> float:
    """L(S_n): soma dos comprimentos dos arcos da fronteira"""
    return float(sum(arc_length(b.arc) for b in hull.boundary.arcs))


def area(hull: RConvexHull) -> float:
    return float(sum(hull.boundary.chain_areas))


def distance_to_boundary(hull: RConvexHull, xy) -> np.ndarray:
    """Distância de cada ponto aos arcos e aos pontos isolados"""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    best = np.full(len(xy), np.inf)
    if hull.isolated:
        iso = isolated_points(hull)
        d, _ = iso.kdtree.query(xy)
        best = np.minimum(best, d)
    if not hull.boundary.arcs:
        return best
    arrays = hull.boundary.arrays
    m = len(arrays.sweep)
    step = max(1, QUERY_CHUNK // m)
    r = arrays.radius
    for s in range(0, len(xy), step):
        block = xy[s:s + step]
        dx = block[:, None, 0] - arrays.centers[None, :, 0]
        dy = block[:, None, 1] - arrays.centers[None, :, 1]
        radial = np.abs(np.hypot(dx, dy) - r)
        within = _angle_in_arc(np.arctan2(dy, dx), arrays.lo[None, :], arrays.width[None, :])
        d_start = np.hypot(block[:, None, 0] - arrays.p_start[None, :, 0],
                           block[:, None, 1] - arrays.p_start[None, :, 1])
        d_end = np.hypot(block[:, None, 0] - arrays.p_end[None, :, 0],
                         block[:, None, 1] - arrays.p_end[None, :, 1])
        d = np.where(within, radial, np.minimum(d_start, d_end))
        best[s:s + step] = np.minimum(best[s:s + step], d.min(axis=1))
    return best


def fill_grid(hull: RConvexHull, xs: np.ndarray, ys: np.ndarray,
              nudge: float = 0.0) -> np.ndarray:
    """
    Preenchimento por linhas de varredura (par-ímpar) nos centros de célula.

    Retorna array booleano (len(ys), len(xs)).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float) + nudge
    occ = np.zeros((len(ys), len(xs)), dtype=bool)
    if not hull.boundary.arcs:
        return occ
    arrays = hull.boundary.arrays
    r = arrays.radius
    s = (ys[:, None] - arrays.centers[None, :, 1]) / r
    valid = np.abs(s) < 1.0
    t1 = np.arcsin(np.clip(s, -1.0, 1.0))
    t2 = math.pi - t1
    x1 = arrays.centers[None, :, 0] + r * np.cos(t1)
    x2 = arrays.centers[None, :, 0] + r * np.cos(t2)
    ok1 = valid & _angle_in_arc(t1, arrays.lo[None, :], arrays.width[None, :])
    ok2 = valid & _angle_in_arc(t2, arrays.lo[None, :], arrays.width[None, :])
    for row in np.flatnonzero(ok1.any(axis=1) | ok2.any(axis=1)):
        crossings = np.sort(np.concatenate([x1[row, ok1[row]], x2[row, ok2[row]]]))
        occ[row] = np.searchsorted(crossings, xs, side="right") % 2 == 1
    return occ


# ---------------------------------------------------------------------------
# Oráculo de força bruta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _disc_offsets(r: float, pitch: float) -> np.ndarray:
    k = int(math.ceil(r / pitch))
    g = np.arange(-k, k + 1) * pitch
    gx, gy = np.meshgrid(g, g)
    offsets = np.column_stack([gx.ravel(), gy.ravel()])
    return offsets[np.hypot(offsets[:, 0], offsets[:, 1]) < r]


def hull_membership_oracle(sample: PointSet, r: float, x: PointLike, pitch: float) -> bool:
    """
    Veredito de força bruta: x está fora sse algum centro y de uma grade de
    passo pitch em B(x, r) tem dist(y, amostra) >= r e |y - x| < r.

    Erro unilateral O(pitch): pontos a menos de ~pitch da fronteira podem
    ser declarados dentro.
    """
    if not pitch > 0:
        raise GeometryDomainError(f"pitch deve ser > 0, recebeu {pitch}")
    xy = np.array(as_xy(x))
    if dist_to_set(xy, sample) >= r:
        return False
    d, _ = sample.kdtree.query(xy + _disc_offsets(float(r), float(pitch)))
    return not bool(np.any(d >= r))
