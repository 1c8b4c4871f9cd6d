"""
Exportação SVG de fechos, máscaras e curvas de convergência

O eixo y é invertido (y da tela cresce para baixo). Arcos da fronteira saem
como comandos A verdadeiros, não como polilinhas.
"""
import logging
import math
import os
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from core.geometry import TWO_PI, PointSet
from core.rconvex_hull import RConvexHull
from infrastructure.raster import GridMask

logger = logging.getLogger(__name__)

CANVAS_PX = 800.0
CURVE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
CURVE_METRICS = ["dh_set", "dh_boundary", "d_mu"]


class _Frame:
    """Transformação do plano para a tela com escala uniforme"""

    def __init__(self, box: Tuple[float, float, float, float], pad: float = 0.0):
        xmin, xmax, ymin, ymax = box
        self.xmin, self.ymax = xmin - pad, ymax + pad
        span = max(xmax - xmin + 2 * pad, ymax - ymin + 2 * pad, 1e-12)
        self.scale = CANVAS_PX / span
        self.width = max(1.0, (xmax - xmin + 2 * pad) * self.scale)
        self.height = max(1.0, (ymax - ymin + 2 * pad) * self.scale)

    def x(self, x: float) -> float:
        return (x - self.xmin) * self.scale

    def y(self, y: float) -> float:
        return (self.ymax - y) * self.scale


def _header(width: float, height: float) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (f'<svg width="{int(math.ceil(width))}" height="{int(math.ceil(height))}" '
         f'viewBox="0 0 {width:.6f} {height:.6f}" xmlns="http://www.w3.org/2000/svg">'),
    ]


def _write(rows: List[str], path: str):
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as file:
            file.write("\n".join(rows + ["</svg>"]))
            file.write("\n")
    except OSError as e:
        raise OSError(f"Falha ao gravar SVG em {path}: {e}") from e
    logger.debug(f"SVG gravado em {path}")


def _arc_commands(frame: _Frame, arc) -> List[str]:
    """Um ou dois comandos A (arcos de volta inteira são divididos)"""
    pieces = 2 if abs(arc.sweep) >= TWO_PI - 1e-9 else 1
    step = arc.sweep / pieces
    radius = arc.radius * frame.scale
    commands = []
    for k in range(1, pieces + 1):
        end = arc.point_at(arc.start_angle + k * step)
        large = 1 if abs(step) > math.pi else 0
        # com y invertido, anti-horário no plano vira horário na tela
        sweep_flag = 1 if step > 0 else 0
        commands.append(f"A {radius:.6f} {radius:.6f} 0 {large} {sweep_flag} "
                        f"{frame.x(end[0]):.6f} {frame.y(end[1]):.6f}")
    return commands


def _points(frame: _Frame, coords: np.ndarray, radius: float, color: str) -> List[str]:
    return [f'<circle cx="{frame.x(x):.6f}" cy="{frame.y(y):.6f}" r="{radius:.3f}" fill="{color}"/>'
            for x, y in coords]


def render_hull(hull: RConvexHull, path: str, sample: Optional[PointSet] = None):
    """Cadeias preenchidas em cinza (par-ímpar), pontos isolados como pontos pretos"""
    pad = 0.05 * max(hull.sample.diameter, hull.r) if len(hull.sample) else 1.0
    frame = _Frame(hull.sample.bounding_box, pad)
    rows = _header(frame.width, frame.height)

    arcs = hull.boundary.arcs
    commands: List[str] = []
    for chain in hull.boundary.chains:
        first = arcs[chain[0]].arc.start_point
        commands.append(f"M {frame.x(first[0]):.6f} {frame.y(first[1]):.6f}")
        for k in chain:
            commands.extend(_arc_commands(frame, arcs[k].arc))
        commands.append("Z")
    if commands:
        rows.append('<path fill="#bdbdbd" fill-rule="evenodd" stroke="black" '
                    'stroke-width="1.0000" d="')
        rows.extend(commands)
        rows.append('"/>')

    if sample is not None:
        rows.extend(_points(frame, sample.coords, 0.8, "#1f77b4"))
    isolated = hull.sample.coords[sorted(hull.isolated)] if hull.isolated else np.empty((0, 2))
    rows.extend(_points(frame, isolated, 2.0, "black"))
    _write(rows, path)
    logger.info(f"🖼️ Fecho com {len(arcs)} arcos salvo em {path}")


def _runs(row: np.ndarray) -> List[Tuple[int, int]]:
    """Trechos [início, fim) de células ocupadas numa linha"""
    padded = np.concatenate([[False], row, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2], edges[1::2]))


def render_mask(mask: GridMask, path: str):
    """Cada trecho horizontal de células ocupadas vira um retângulo"""
    x0, y0 = mask.origin.x, mask.origin.y
    frame = _Frame((x0, x0 + mask.width * mask.h, y0, y0 + mask.height * mask.h))
    rows = _header(frame.width, frame.height)
    cell = mask.h * frame.scale
    rows.append('<g fill="#525252" shape-rendering="crispEdges">')
    for i, row in enumerate(mask.occupancy):
        top = frame.y(y0 + (i + 1) * mask.h)
        for start, stop in _runs(row):
            rows.append(f'<rect x="{frame.x(x0 + start * mask.h):.6f}" y="{top:.6f}" '
                        f'width="{(stop - start) * cell:.6f}" height="{cell:.6f}"/>')
    rows.append('</g>')
    _write(rows, path)
    logger.info(f"🖼️ Máscara {mask.width}x{mask.height} salva em {path}")


def render_curves(table: pd.DataFrame, path: str, x_column: str = "n",
                  metrics: Sequence[str] = CURVE_METRICS):
    """Polilinhas (uma por r e métrica), eixo x em log10(n)"""
    metrics = [m for m in metrics if m in table.columns]
    width, height, margin = CANVAS_PX, 0.6 * CANVAS_PX, 60.0
    rows = _header(width, height)

    data = table.dropna(subset=metrics, how="all")
    xs = np.log10(data[x_column].to_numpy(dtype=float)) if len(data) else np.empty(0)
    values = data[metrics].to_numpy(dtype=float) if len(data) else np.empty((0, 0))
    finite = values[np.isfinite(values)] if values.size else np.empty(0)
    x_lo, x_hi = (xs.min(), xs.max()) if len(xs) else (0.0, 1.0)
    y_hi = finite.max() if len(finite) else 1.0
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_hi = y_hi if y_hi > 0 else 1.0

    def sx(v):
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(v):
        return height - margin - v / y_hi * (height - 2 * margin)

    rows.append(f'<g stroke="black" stroke-width="1">'
                f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}"/>'
                f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}"/></g>')
    rows.append(f'<text x="{width / 2:.1f}" y="{height - 15:.1f}" font-size="14" '
                f'text-anchor="middle">log10({x_column})</text>')
    rows.append(f'<text x="{margin - 5:.1f}" y="{margin - 10:.1f}" font-size="12">{y_hi:.4g}</text>')

    color = 0
    group_keys = ["r"] if "r" in data.columns else []
    groups = data.groupby(group_keys) if group_keys else [((None,), data)]
    for key, group in groups:
        group = group.sort_values(x_column)
        gx = np.log10(group[x_column].to_numpy(dtype=float))
        for metric in metrics:
            gy = group[metric].to_numpy(dtype=float)
            keep = np.isfinite(gy)
            if not keep.any():
                continue
            stroke = CURVE_COLORS[color % len(CURVE_COLORS)]
            color += 1
            points = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(gx[keep], gy[keep]))
            rows.append(f'<polyline fill="none" stroke="{stroke}" stroke-width="2" points="{points}"/>')
            label = metric if key[0] is None else f"{metric} r={key[0]:g}"
            rows.append(f'<text x="{width - margin:.1f}" y="{margin + 16 * color:.1f}" font-size="12" '
                        f'text-anchor="end" fill="{stroke}">{label}</text>')
    _write(rows, path)
    logger.info(f"🖼️ Curvas salvas em {path}")


def render_svg(obj, path: str, sample: Optional[PointSet] = None):
    """Despacha pelo tipo: RConvexHull, GridMask ou tabela de curvas"""
    if isinstance(obj, RConvexHull):
        render_hull(obj, path, sample)
    elif isinstance(obj, GridMask):
        render_mask(obj, path)
    elif isinstance(obj, pd.DataFrame):
        render_curves(obj, path)
    else:
        raise TypeError(f"render_svg não sabe desenhar {type(obj).__name__}")
