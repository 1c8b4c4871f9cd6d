"""
Verificação de condições de forma sobre máscaras: r-convexidade,
r-rolling externo e conectividade local interior (ILC)
"""
import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import ndimage

from core.errors import GeometryDomainError
from infrastructure.raster import (CROSS, GridMask, band_zone, closing, edt, inner_distance,
                                   require_margin)

logger = logging.getLogger(__name__)

DEFAULT_BAND = 2


def rconvexity_check(mask: GridMask, r: float, band: int = DEFAULT_BAND,
                     slack: Optional[float] = None) -> bool:
    """
    Compara o fechamento de raio r com a própria máscara.

    O fechamento usa r - slack (padrão 2h): na grade, bolas abertas de raio
    r e fechadas se confundem abaixo da escala da célula, e pontas finas
    perdem células na rasterização.
    """
    if not r > 0:
        raise GeometryDomainError(f"r deve ser > 0, recebeu {r}")
    require_margin(mask, r, "teste de r-convexidade")
    if mask.is_empty:
        return True
    if slack is None:
        slack = DEFAULT_BAND * mask.h
    closed = closing(mask, max(r - slack, 0.0))
    diff = closed.occupancy ^ mask.occupancy
    outside = diff & ~band_zone(mask, band)
    if outside.any():
        logger.debug(f"r-convexidade falhou: {int(outside.sum())} células fora da faixa")
        return False
    return True


def rolling_check(mask: GridMask, r: float, tol: Optional[float] = None) -> bool:
    """Todo ponto de fronteira é tocado por fora por uma bola de raio r"""
    if not r > 0:
        raise GeometryDomainError(f"r deve ser > 0, recebeu {r}")
    require_margin(mask, 2.0 * r, "teste de r-rolling")
    if mask.is_empty:
        return True
    if tol is None:
        tol = 2.0 * mask.h
    centers = edt(mask).values >= r - tol
    if not centers.any():
        return False
    to_centers = ndimage.distance_transform_edt(~centers, sampling=mask.h)
    border = mask.occupancy & ~ndimage.binary_erosion(mask.occupancy, structure=CROSS,
                                                      border_value=0)
    worst = float(to_centers[border].max())
    if worst > r + tol:
        logger.debug(f"r-rolling falhou: célula de fronteira a {worst:.4g} do centro admissível")
        return False
    return True


def _disc_footprint(k: int, alpha: float, h: float) -> np.ndarray:
    offs = np.arange(-k, k + 1) * h
    gx, gy = np.meshgrid(offs, offs)
    return gx * gx + gy * gy <= alpha * alpha


def ilc_check(mask: GridMask, alpha: float) -> bool:
    """
    Para toda célula ocupada x, o interior de B(x, alpha) ∩ máscara é
    não vazio e 4-conexo.

    Células a mais de alpha + 2h do complemento têm a bola inteira dentro
    da máscara e passam trivialmente.
    """
    if not alpha > mask.h:
        raise GeometryDomainError(f"alpha deve ser > h ({mask.h:.4g}), recebeu {alpha}")
    if mask.is_empty:
        return True
    k = int(math.ceil(alpha / mask.h))
    footprint = _disc_footprint(k, alpha, mask.h)
    padded = np.pad(mask.occupancy, k, constant_values=False)
    near = mask.occupancy & (inner_distance(mask) <= alpha + 2.0 * mask.h)
    rows, cols = np.nonzero(near)
    for row, col in zip(rows, cols):
        patch = padded[row:row + 2 * k + 1, col:col + 2 * k + 1] & footprint
        interior = ndimage.binary_erosion(patch, structure=CROSS, border_value=0)
        if not interior.any():
            logger.debug(f"ILC falhou em ({row}, {col}): interior vazio")
            return False
        _, n_labels = ndimage.label(interior, structure=CROSS)
        if n_labels != 1:
            logger.debug(f"ILC falhou em ({row}, {col}): {n_labels} componentes")
            return False
    return True


def ilc_profile(mask: GridMask, alphas: Sequence[float]) -> Dict[float, bool]:
    """Veredito ILC para cada alpha"""
    return {float(a): ilc_check(mask, a) for a in sorted(alphas)}
