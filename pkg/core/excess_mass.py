"""
Excesso de massa e estimação de conjuntos de nível

H_lambda(A) = P(A) - lambda·mu(A) sob um modelo de densidade e a sua versão
empírica H_{n,lambda}(A) = P_n(A) - lambda·mu(A). O estimador maximiza a
versão empírica sobre uma família finita de candidatos: conjuntos de nível
superiores de um estimador de núcleo, fechados e depois abertos com raio r
(bolas de raio r rolam por fora e por dentro).
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import ndimage

from core.errors import GeometryDomainError
from core.geometry import PointSet
from infrastructure.raster import (DEFAULT_DIAGONAL_CELLS, GridMask, GridSpec, closing,
                                   grid_for_box, opening)
from infrastructure.set_metrics import measure_distance
from infrastructure.shapes import ShapeSpec, analytic_area

logger = logging.getLogger(__name__)

KDE_TRUNCATE = 4.0
LAMBDA_STEPS = 20
LAMBDA_HEADROOM = 1.2
DEFAULT_CANDIDATES = 10
TIE_TOL = 1e-12

FAMILY_NOTE = ("Família substituta finita: conjuntos de nível do estimador de núcleo "
               "fechados e abertos com raio r; o máximo não percorre todos os conjuntos com alcance >= r.")


@dataclass(frozen=True)
class DensityModel:
    """Uniforme numa forma ou mistura de uniformes com pesos"""
    shapes: Tuple[ShapeSpec, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        if not self.shapes or len(self.shapes) != len(self.weights):
            raise GeometryDomainError("DensityModel: formas e pesos incompatíveis")
        if any(w <= 0 for w in self.weights):
            raise GeometryDomainError("DensityModel: pesos devem ser positivos")
        if not math.isclose(sum(self.weights), 1.0, rel_tol=0, abs_tol=1e-9):
            raise GeometryDomainError(f"DensityModel: pesos somam {sum(self.weights)}")
        for shape in self.shapes:
            if not (analytic_area(shape) or 0) > 0:
                raise GeometryDomainError(f"DensityModel: {shape.variant} sem área conhecida")

    @classmethod
    def uniform(cls, shape: ShapeSpec) -> "DensityModel":
        return cls((shape,), (1.0,))

    @classmethod
    def mixture(cls, shapes: Sequence[ShapeSpec], weights: Sequence[float]) -> "DensityModel":
        return cls(tuple(shapes), tuple(float(w) for w in weights))

    @property
    def support_box(self) -> Tuple[float, float, float, float]:
        boxes = np.array([s.bounding_box for s in self.shapes])
        return (float(boxes[:, 0].min()), float(boxes[:, 1].max()),
                float(boxes[:, 2].min()), float(boxes[:, 3].max()))

    def density(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        values = np.zeros(len(xy))
        for shape, weight in zip(self.shapes, self.weights):
            values += (weight / analytic_area(shape)) * shape.contains_points(xy)
        return values


@dataclass(frozen=True, eq=False)
class CandidateFamily:
    """Candidatos com cabeçalho comum; o último é sempre a máscara vazia"""
    candidates: Tuple[GridMask, ...]
    thresholds: Tuple[float, ...]
    radius: float
    bandwidth: float
    kde_max: float

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def header(self) -> GridSpec:
        return self.candidates[0].header

    @property
    def areas(self) -> np.ndarray:
        return np.array([c.area for c in self.candidates])


@dataclass(frozen=True, eq=False)
class ExcessMassReport:
    table: pd.DataFrame
    h_matrix: pd.DataFrame
    max_d_mu: float
    transition_lambda: float
    first_empty_lambda: Optional[float]
    note: str = FAMILY_NOTE


def _grid_density(model: DensityModel, spec: GridSpec) -> np.ndarray:
    wx0, wx1, wy0, wy1 = spec.window
    sx0, sx1, sy0, sy1 = model.support_box
    if sx0 < wx0 or sx1 > wx1 or sy0 < wy0 or sy1 > wy1:
        raise GeometryDomainError("A grade não cobre o suporte do modelo")
    return model.density(spec.centers()).reshape(spec.height, spec.width)


def model_probability(model: DensityModel, mask: GridMask) -> float:
    """P(A) integrada célula a célula"""
    if mask.is_empty:
        return 0.0
    dens = _grid_density(model, mask.header)
    return float(dens[mask.occupancy].sum() * mask.h * mask.h)


def empirical_probability(sample: PointSet, mask: GridMask) -> float:
    if len(sample) == 0 or mask.is_empty:
        return 0.0
    row, col, valid = mask.header.cell_of(sample.coords)
    hits = mask.occupancy[row[valid], col[valid]]
    return float(np.count_nonzero(hits)) / len(sample)


def excess_mass_model(model: DensityModel, mask: GridMask, lam: float) -> float:
    if lam < 0:
        raise GeometryDomainError(f"lambda deve ser >= 0, recebeu {lam}")
    return model_probability(model, mask) - lam * mask.area


def empirical_excess_mass(sample: PointSet, mask: GridMask, lam: float) -> float:
    if lam < 0:
        raise GeometryDomainError(f"lambda deve ser >= 0, recebeu {lam}")
    return empirical_probability(sample, mask) - lam * mask.area


def true_level_set(model: DensityModel, spec: GridSpec, lam: float) -> GridMask:
    """{f >= lambda}; para lambda = 0, o suporte {f > 0}"""
    dens = _grid_density(model, spec)
    occ = dens > 0 if lam <= 0 else dens >= lam
    return GridMask.from_spec(spec, occ)


def auto_bandwidth(sample: PointSet) -> float:
    """n^(-1/6) vezes o desvio padrão médio das coordenadas"""
    n = len(sample)
    if n < 2:
        raise GeometryDomainError("Largura de banda automática requer n >= 2")
    spread = math.sqrt(float(np.mean(sample.coords.var(axis=0, ddof=1))))
    return n ** (-1.0 / 6.0) * spread


def kde_grid(sample: PointSet, spec: GridSpec, bandwidth: float) -> np.ndarray:
    """Estimador de núcleo gaussiano nas células: contagens binadas + filtro gaussiano"""
    if not bandwidth > 0:
        raise GeometryDomainError(f"Largura de banda degenerada: {bandwidth}")
    row, col, valid = spec.cell_of(sample.coords)
    dropped = int((~valid).sum())
    if dropped:
        logger.warning(f"⚠️ {dropped} pontos fora da grade ignorados no estimador de núcleo")
    counts = np.zeros((spec.height, spec.width))
    np.add.at(counts, (row[valid], col[valid]), 1.0)
    smooth = ndimage.gaussian_filter(counts, sigma=bandwidth / spec.h, mode="constant",
                                     truncate=KDE_TRUNCATE)
    return smooth / (len(sample) * spec.h * spec.h)


def levelset_grid(sample: PointSet, r: float, bandwidth: float, h: Optional[float] = None,
                  diagonal_cells: int = DEFAULT_DIAGONAL_CELLS) -> GridSpec:
    return grid_for_box(sample.bounding_box, h, margin=r + KDE_TRUNCATE * bandwidth,
                        diagonal_cells=diagonal_cells)


def default_thresholds(kde_max: float, count: int = DEFAULT_CANDIDATES) -> List[float]:
    return [kde_max * k / count for k in range(count)]


def _smoothed_level_set(level: np.ndarray, spec: GridSpec, r: float) -> GridMask:
    """Fechamento e abertura de raio r numa tela ampliada, recortada de volta à grade"""
    pad = int(math.ceil(r / spec.h)) + 2
    canvas = GridSpec(spec.origin, spec.h, spec.width + 2 * pad, spec.height + 2 * pad)
    big = GridMask.from_spec(canvas, np.pad(level, pad, constant_values=False))
    smoothed = opening(closing(big, r), r).occupancy[pad:-pad, pad:-pad]
    return GridMask.from_spec(spec, smoothed)


def build_candidate_family(sample: PointSet, r: float, thresholds: Optional[Sequence[float]] = None,
                           bandwidth: Union[float, str] = "auto",
                           grid: Optional[GridSpec] = None,
                           candidates: int = DEFAULT_CANDIDATES) -> CandidateFamily:
    """
    Um candidato por limiar t: {f_n >= t} (t = 0 usa f_n > 0) fechado e
    depois aberto com raio r; a máscara vazia é acrescentada ao final.

    A abertura descarta manchas que não contêm uma bola de raio r. As duas
    operações são crescentes: a família continua encaixada.
    """
    if not r > 0:
        raise GeometryDomainError(f"r deve ser > 0, recebeu {r}")
    if bandwidth == "auto":
        bandwidth = auto_bandwidth(sample)
    bandwidth = float(bandwidth)
    if not bandwidth > 0:
        raise GeometryDomainError(f"Largura de banda degenerada: {bandwidth}")
    if grid is None:
        grid = levelset_grid(sample, r, bandwidth)

    kde = kde_grid(sample, grid, bandwidth)
    kde_max = float(kde.max())
    if thresholds is None:
        if candidates < 1:
            raise GeometryDomainError(f"candidates deve ser >= 1, recebeu {candidates}")
        thresholds = default_thresholds(kde_max, candidates)
    thresholds = [float(t) for t in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise GeometryDomainError("Limiares devem estar em ordem crescente")

    masks = []
    for t in thresholds:
        level = kde > 0 if t <= 0 else kde >= t
        masks.append(_smoothed_level_set(level, grid, r))
    masks.append(grid.empty())
    logger.info(f"Família de candidatos: {len(masks)} máscaras, banda={bandwidth:.4g}, "
                f"r={r:g}")
    return CandidateFamily(tuple(masks), tuple(thresholds) + (math.inf,), float(r),
                           bandwidth, kde_max)


def _argmax(values: np.ndarray, areas: np.ndarray) -> int:
    """Maior valor; empates vão para a menor área e depois para o menor índice"""
    best = values.max()
    tied = np.flatnonzero(values >= best - TIE_TOL)
    return int(tied[np.lexsort((tied, areas[tied]))][0])


def level_set_estimate(sample: PointSet, lam: float,
                       family: CandidateFamily) -> Tuple[GridMask, float]:
    if len(family) == 0:
        raise GeometryDomainError("Família de candidatos vazia")
    if lam < 0:
        raise GeometryDomainError(f"lambda deve ser >= 0, recebeu {lam}")
    probs = np.array([empirical_probability(sample, c) for c in family.candidates])
    values = probs - lam * family.areas
    idx = _argmax(values, family.areas)
    return family.candidates[idx], float(values[idx])


def default_lambdas(kde_max: float, steps: int = LAMBDA_STEPS,
                    headroom: float = LAMBDA_HEADROOM) -> List[float]:
    """steps valores igualmente espaçados em (0, headroom·max]"""
    top = headroom * kde_max
    return [top * k / steps for k in range(1, steps + 1)]


def uniform_deviation(sample: PointSet, model: DensityModel, family: CandidateFamily) -> float:
    """max sobre os candidatos de |P_n(A) - P(A)|"""
    if len(family) == 0:
        raise GeometryDomainError("Família de candidatos vazia")
    return float(max(abs(empirical_probability(sample, c) - model_probability(model, c))
                     for c in family.candidates))


def lambda_sweep(sample: PointSet, model: Optional[DensityModel], family: CandidateFamily,
                 lambdas: Optional[Sequence[float]] = None, steps: int = LAMBDA_STEPS,
                 headroom: float = LAMBDA_HEADROOM) -> ExcessMassReport:
    """
    Varredura em lambda com certificado do argmax.

    transition_lambda é o ponto exato em que o vazio passa a ser o argmax,
    max P_n(A)/mu(A) sobre os candidatos não vazios; first_empty_lambda é o
    primeiro valor da grade em que o vazio é escolhido.
    Sem modelo, as colunas h_model, d_mu e sup_dev ficam NaN.
    """
    if lambdas is None:
        lambdas = default_lambdas(family.kde_max, steps, headroom)
    lambdas = sorted(float(v) for v in lambdas)
    if not lambdas:
        raise GeometryDomainError("Grade de lambda vazia")

    areas = family.areas
    emp = np.array([empirical_probability(sample, c) for c in family.candidates])
    if model is not None:
        density = _grid_density(model, family.header)
        cell = family.header.h ** 2
        mod = np.array([density[c.occupancy].sum() * cell for c in family.candidates])
        sup_dev = float(np.abs(emp - mod).max())
    else:
        mod = np.full(len(family), np.nan)
        sup_dev = math.nan
        density = None
    empty_ids = {i for i, c in enumerate(family.candidates) if c.is_empty}
    filled = areas > 0
    transition = float((emp[filled] / areas[filled]).max()) if filled.any() else 0.0

    rows = []
    matrix = []
    first_empty = None
    for lam in lambdas:
        values = emp - lam * areas
        idx = _argmax(values, areas)
        if density is not None:
            truth = GridMask.from_spec(family.header, density > 0 if lam <= 0 else density >= lam)
            d_mu = measure_distance(family.candidates[idx], truth)
        else:
            d_mu = math.nan
        if first_empty is None and idx in empty_ids:
            first_empty = lam
        rows.append({
            "lambda": lam,
            "candidate_id": idx,
            "h_emp": float(values[idx]),
            "h_model": float(mod[idx] - lam * areas[idx]),
            "d_mu": d_mu,
            "sup_dev": sup_dev,
        })
        matrix.append(values)

    table = pd.DataFrame(rows, columns=["lambda", "candidate_id", "h_emp", "h_model",
                                        "d_mu", "sup_dev"])
    h_matrix = pd.DataFrame(matrix, index=pd.Index(lambdas, name="lambda"),
                            columns=[f"c{i}" for i in range(len(family))])
    max_d_mu = float(table["d_mu"].max()) if model is not None else math.nan
    logger.info(f"✅ Varredura em lambda: {len(lambdas)} valores, max d_mu={max_d_mu:.4g}, "
                f"transição para vazio em {transition:.6g} (grade: {first_empty})")
    return ExcessMassReport(table, h_matrix, max_d_mu, transition, first_empty)
