"""
Predicados geométricos filtrados (orientação e incírculo)

Avaliação em ponto flutuante com cota de erro; casos incertos caem para
aritmética racional exata (fractions.Fraction), que é exata para qualquer
float finito.
"""
import logging
from fractions import Fraction
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

# Cotas de erro relativas (eps = 2^-53)
_EPS = np.finfo(float).eps / 2.0
ORIENT_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
INCIRCLE_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def _incircle_exact(a, b, c, d) -> int:
    ax, ay = Fraction(a[0]) - Fraction(d[0]), Fraction(a[1]) - Fraction(d[1])
    bx, by = Fraction(b[0]) - Fraction(d[0]), Fraction(b[1]) - Fraction(d[1])
    cx, cy = Fraction(c[0]) - Fraction(d[0]), Fraction(c[1]) - Fraction(d[1])
    alift = ax * ax + ay * ay
    blift = bx * bx + by * by
    clift = cx * cx + cy * cy
    det = (alift * (bx * cy - cx * by)
           + blift * (cx * ay - ax * cy)
           + clift * (ax * by - bx * ay))
    return (det > 0) - (det < 0)


def orient2d(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    """Sinal da orientação de (a, b, c): +1 anti-horário, -1 horário, 0 colinear"""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    errbound = ORIENT_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _orient_exact(a[0], a[1], b[0], b[1], c[0], c[1])


def incircle(a: Sequence[float], b: Sequence[float], c: Sequence[float],
             d: Sequence[float]) -> int:
    """+1 se d está dentro do círculo por (a, b, c) anti-horário, -1 fora, 0 cocircular"""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc = bdx * cdy - cdx * bdy
    ca = cdx * ady - adx * cdy
    ab = adx * bdy - bdx * ady
    det = alift * bc + blift * ca + clift * ab
    permanent = (alift * (abs(bdx * cdy) + abs(cdx * bdy))
                 + blift * (abs(cdx * ady) + abs(adx * cdy))
                 + clift * (abs(adx * bdy) + abs(bdx * ady)))
    errbound = INCIRCLE_ERRBOUND * permanent
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _incircle_exact(a, b, c, d)


def orient2d_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Versão vetorizada de orient2d; arrays (m, 2) -> sinais (m,)"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    errbound = ORIENT_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    signs = np.where(det > errbound, 1, np.where(-det > errbound, -1, 0)).astype(np.int8)
    uncertain = np.flatnonzero(np.abs(det) <= errbound)
    if uncertain.size:
        logger.debug(f"orient2d: {uncertain.size} casos resolvidos em aritmética exata")
    for k in uncertain:
        signs[k] = _orient_exact(a[k, 0], a[k, 1], b[k, 0], b[k, 1], c[k, 0], c[k, 1])
    return signs


def incircle_many(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Versão vetorizada de incircle; arrays (m, 2) -> sinais (m,)"""
    a, b, c, d = (np.asarray(v, dtype=float) for v in (a, b, c, d))
    adx, ady = a[:, 0] - d[:, 0], a[:, 1] - d[:, 1]
    bdx, bdy = b[:, 0] - d[:, 0], b[:, 1] - d[:, 1]
    cdx, cdy = c[:, 0] - d[:, 0], c[:, 1] - d[:, 1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = (alift * (np.abs(bdx * cdy) + np.abs(cdx * bdy))
                 + blift * (np.abs(cdx * ady) + np.abs(adx * cdy))
                 + clift * (np.abs(adx * bdy) + np.abs(bdx * ady)))
    errbound = INCIRCLE_ERRBOUND * permanent
    signs = np.where(det > errbound, 1, np.where(-det > errbound, -1, 0)).astype(np.int8)
    uncertain = np.flatnonzero(np.abs(det) <= errbound)
    if uncertain.size:
        logger.debug(f"incircle: {uncertain.size} casos resolvidos em aritmética exata")
    for k in uncertain:
        signs[k] = _incircle_exact(a[k], b[k], c[k], d[k])
    return signs
