"""
Métricas entre conjuntos rasterizados: volume paralelo, conteúdos de
Minkowski (externo e bilateral), distância em medida e Hausdorff
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy import ndimage

from core.errors import GeometryDomainError
from infrastructure.raster import (GridMask, inner_distance, boundary_mask, edt,
                                   require_margin, require_same_header)

logger = logging.getLogger(__name__)

EPS_MULTIPLIER = 3.0
EPS_LEVELS = 5


def default_epsilons(h: float, multiplier: float = EPS_MULTIPLIER,
                     levels: int = EPS_LEVELS) -> List[float]:
    """{3h·2^k}, k = 0..4"""
    return [multiplier * h * 2.0 ** k for k in range(levels)]


def parallel_volume(mask: GridMask, eps: float) -> float:
    """Área do conjunto paralelo fechado B(A, eps)"""
    if eps < 0:
        raise GeometryDomainError(f"eps deve ser >= 0, recebeu {eps}")
    require_margin(mask, eps, "volume paralelo")
    if mask.is_empty:
        return 0.0
    field = edt(mask).values
    return mask.h * mask.h * float(np.count_nonzero(field <= eps))


def _check_eps_list(mask: GridMask, eps_list: Optional[Sequence[float]]) -> np.ndarray:
    if eps_list is None:
        eps_list = default_epsilons(mask.h)
    eps = np.asarray(list(eps_list), dtype=float)
    if eps.size < 2:
        raise GeometryDomainError("São necessários pelo menos 2 valores de eps")
    if np.any(np.diff(eps) < 0):
        raise GeometryDomainError("eps_list deve estar ordenada")
    if eps[0] < 3.0 * mask.h * (1.0 - 1e-9):
        raise GeometryDomainError(f"eps mínimo {eps[0]:.4g} < 3h = {3.0 * mask.h:.4g}")
    if mask.is_empty:
        raise GeometryDomainError("Conteúdo de Minkowski de máscara vazia")
    require_margin(mask, float(eps[-1]), "conteúdo de Minkowski")
    return eps


def _intercept(eps: np.ndarray, values: np.ndarray) -> float:
    slope, intercept = np.polyfit(eps, values, 1)
    logger.debug(f"Ajuste linear de Minkowski: intercepto={intercept:.6g}, inclinação={slope:.6g}")
    return float(intercept)


def outer_minkowski(mask: GridMask, eps_list: Optional[Sequence[float]] = None) -> float:
    """
    Conteúdo de Minkowski externo extrapolado para eps -> 0.

    lambda(eps) = (volume paralelo - área)/eps é aproximadamente afim em eps
    (fórmula de Steiner); devolve o intercepto do ajuste linear.
    """
    eps = _check_eps_list(mask, eps_list)
    field = edt(mask).values
    cell = mask.h * mask.h
    area = mask.area
    lam = np.array([(cell * np.count_nonzero(field <= e) - area) / e for e in eps])
    return _intercept(eps, lam)


def two_sided_minkowski(mask: GridMask, eps_list: Optional[Sequence[float]] = None) -> float:
    """
    Conteúdo bilateral: mu(B(fronteira, eps)) / 2eps extrapolado.

    A vizinhança da fronteira é o gradiente morfológico
    dilatação(eps) menos erosão(eps).
    """
    eps = _check_eps_list(mask, eps_list)
    outer = edt(mask).values
    inner = inner_distance(mask)
    cell = mask.h * mask.h
    lam = np.array([cell * (np.count_nonzero(outer <= e) - np.count_nonzero(inner > e)) / (2.0 * e)
                    for e in eps])
    return _intercept(eps, lam)


def measure_distance(a: GridMask, b: GridMask) -> float:
    """h²·|A Δ B|"""
    require_same_header(a, b)
    return a.h * a.h * float(np.count_nonzero(a.occupancy ^ b.occupancy))


def _directed(a: GridMask, b: GridMask) -> float:
    field = ndimage.distance_transform_edt(~b.occupancy, sampling=b.h)
    return float(field[a.occupancy].max())


def hausdorff_masks(a: GridMask, b: GridMask) -> float:
    require_same_header(a, b)
    if a.is_empty or b.is_empty:
        raise GeometryDomainError("Hausdorff com máscara vazia")
    return max(_directed(a, b), _directed(b, a))


def hausdorff_boundaries(a: GridMask, b: GridMask) -> float:
    require_same_header(a, b)
    return hausdorff_masks(boundary_mask(a), boundary_mask(b))
