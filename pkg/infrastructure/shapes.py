"""
Catálogo de formas de referência

Cada forma tem teste de pertinência, caixa envolvente, amostrador uniforme
por rejeição e, quando conhecidos, comprimento de fronteira e área exatos.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from matplotlib.path import Path
from scipy.integrate import quad

from core.errors import GeometryDomainError, ShapeSamplingError
from core.geometry import PointLike, PointSet, as_xy

logger = logging.getLogger(__name__)

Box = Tuple[float, float, float, float]

TRISECTRIX_LENGTH = 20.7846
TRISECTRIX_SEGMENTS = 4096
MIN_ACCEPTANCE = 1e-3
SAMPLE_BATCH = 4096


@dataclass(frozen=True, eq=False)
class ShapeSpec:
    """Forma analítica imutável; params já inclui os valores padrão"""
    variant: str
    params: Dict[str, float]
    bounding_box: Box
    polygon: Optional[np.ndarray] = field(default=None, repr=False)
    provenance: Dict = field(default_factory=dict, repr=False)

    def contains_points(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        if self.polygon is not None:
            return _polygon_path(self).contains_points(xy)
        return _MEMBERSHIP[self.variant](self.params, xy[:, 0], xy[:, 1])

    def contains(self, x: PointLike) -> bool:
        return bool(self.contains_points(np.array([as_xy(x)]))[0])

    @property
    def name(self) -> str:
        return self.variant


@dataclass(frozen=True)
class SampleRequest:
    shape: ShapeSpec
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise GeometryDomainError(f"n deve ser >= 1, recebeu {self.n}")


# ---------------------------------------------------------------------------
# Pertinência
# ---------------------------------------------------------------------------

def _outside(x, y, cx, cy, radius):
    return (x - cx) ** 2 + (y - cy) ** 2 >= radius * radius


def _box(x, y, x0, x1, y0, y1):
    return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)


def _disc(p, x, y):
    return (x - p["cx"]) ** 2 + (y - p["cy"]) ** 2 <= p["radius"] ** 2


def _annulus(p, x, y):
    d2 = x * x + y * y
    return (d2 <= p["outer"] ** 2) & (d2 >= p["inner"] ** 2)


def _rectangle(p, x, y):
    return (np.abs(x) <= p["half_width"]) & (np.abs(y) <= p["half_height"])


def _lens(p, x, y):
    half = 0.5 * p["distance"]
    r2 = p["radius"] ** 2
    return ((x - half) ** 2 + y * y <= r2) & ((x + half) ** 2 + y * y <= r2)


def _astroid(p, x, y):
    a = p["scale"]
    return np.abs(x) ** (2.0 / 3.0) + np.abs(y) ** (2.0 / 3.0) <= a ** (2.0 / 3.0)


def _two_discs(p, x, y):
    half = 0.5 * p["separation"]
    return (((x + half) ** 2 + y * y <= p["radius1"] ** 2)
            | ((x - half) ** 2 + y * y <= p["radius2"] ** 2))


def _fig1a(p, x, y):
    r = p["r"]
    left = _box(x, y, 0.0, 2 * r, 0.0, 2 * r) & _outside(x, y, 2 * r, r, r)
    right = _box(x, y, 3 * r, 5 * r, 0.0, 2 * r) & _outside(x, y, 3 * r, r, r)
    return left | right


def _fig1b(p, x, y):
    r, w = p["r"], p["plate"]
    cusp_right = (_box(x, y, 0.0, r, 0.0, 2 * r)
                  & _outside(x, y, r, 2 * r, r) & _outside(x, y, r, 0.0, r))
    cusp_down = (_box(x, y, r, 3 * r, 2 * r, 3 * r)
                 & _outside(x, y, r, 2 * r, r) & _outside(x, y, 3 * r, 2 * r, r))
    plate = _box(x, y, 2 * r, 2 * r + w, 0.0, 2 * r)
    return cusp_right | cusp_down | plate


def _fig3_pinch(p, x, y):
    r = p["r"]
    return _box(x, y, 0.0, 4 * r, 0.0, 2 * r) & _outside(x, y, 2 * r, 2 * r, 2 * r)


_MEMBERSHIP: Dict[str, Callable] = {
    "disc": _disc,
    "annulus": _annulus,
    "rectangle": _rectangle,
    "lens": _lens,
    "astroid": _astroid,
    "two_discs": _two_discs,
    "fig1a": _fig1a,
    "fig1b": _fig1b,
    "fig3_pinch": _fig3_pinch,
}


# ---------------------------------------------------------------------------
# Trissetriz de Catalan
# ---------------------------------------------------------------------------

def _trisectrix_xy(t: np.ndarray, a: float) -> np.ndarray:
    return np.column_stack([a * (1.0 - 3.0 * t * t), a * t * (3.0 - t * t)])


@lru_cache(maxsize=None)
def trisectrix_scale(length: float = TRISECTRIX_LENGTH) -> float:
    """Escala a tal que o laço tenha o perímetro pedido (quadratura numérica)"""
    t_max = math.sqrt(3.0)

    def speed(t):
        return math.hypot(-6.0 * t, 3.0 - 3.0 * t * t)

    unit_length, err = quad(speed, -t_max, t_max, epsabs=1e-13, epsrel=1e-13)
    a = length / unit_length
    logger.debug(f"Trissetriz calibrada: a={a:.10f} (erro da quadratura {err:.1e})")
    return a


def trisectrix_polygon(a: float, segments: int = TRISECTRIX_SEGMENTS) -> np.ndarray:
    t_max = math.sqrt(3.0)
    t = np.linspace(-t_max, t_max, segments + 1)[:-1]
    return _trisectrix_xy(t, a)


@lru_cache(maxsize=32)
def _polygon_path(shape: ShapeSpec) -> Path:
    vertices = shape.polygon
    return Path(np.vstack([vertices, vertices[:1]]), closed=True)


# ---------------------------------------------------------------------------
# Construção
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    defaults: Dict[str, float]
    description: str


SHAPE_CATALOG: Dict[str, CatalogEntry] = {
    "disc": CatalogEntry("disc", {"radius": 0.5, "cx": 0.0, "cy": 0.0},
                         "Disco fechado de raio radius centrado em (cx, cy)"),
    "annulus": CatalogEntry("annulus", {"inner": 0.25, "outer": 0.5},
                            "Anel B(0, outer) menos o disco aberto B(0, inner)"),
    "rectangle": CatalogEntry("rectangle", {"half_width": 0.5, "half_height": 0.5},
                              "Retângulo centrado na origem (padrão: quadrado unitário)"),
    "lens": CatalogEntry("lens", {"radius": 1.0, "distance": 1.0},
                         "Interseção de dois discos de raio radius com centros a distance"),
    "astroid": CatalogEntry("astroid", {"scale": 1.0},
                            "Astroide |x|^(2/3) + |y|^(2/3) <= scale^(2/3); perímetro 6·scale"),
    "catalan_trisectrix": CatalogEntry(
        "catalan_trisectrix", {"length": TRISECTRIX_LENGTH},
        "Laço da cúbica de Tschirnhausen, escala calibrada para o perímetro length"),
    "two_discs": CatalogEntry("two_discs",
                              {"radius1": 0.5, "radius2": 0.5, "separation": 2.0},
                              "Dois discos disjuntos com centros em (±separation/2, 0)"),
    "fig1a": CatalogEntry("fig1a", {"r": 1.0},
                          "Dois blocos 2r×2r separados por r, com entalhes de raio r "
                          "voltados um para o outro (r-convexo, alcance nulo)"),
    "fig1b": CatalogEntry("fig1b", {"r": 1.0, "plate": 0.05},
                          "Peças com cúspides de arcos de raio r e placa fina de largura "
                          "plate, padrão r/20 (r-rolling, não r-convexo)"),
    "fig3_pinch": CatalogEntry("fig3_pinch", {"r": 1.0},
                               "Retângulo 4r×2r menos disco aberto de raio 2r tangente à base "
                               "(sem ILC no ponto de tangência)"),
}


def parse_params(text: Optional[str]) -> Dict[str, float]:
    """'k=v,k2=v2' -> {'k': v, 'k2': v2}"""
    params: Dict[str, float] = {}
    if not text:
        return params
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise GeometryDomainError(f"Parâmetro sem '=': {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise GeometryDomainError(f"Valor inválido para {key.strip()}: {value!r}")
    return params


def _validate(variant: str, p: Dict[str, float]):
    positive = [k for k in ("radius", "outer", "half_width", "half_height", "scale", "length",
                            "radius1", "radius2", "r", "plate") if k in p]
    for key in positive:
        if not p[key] > 0:
            raise GeometryDomainError(f"{variant}: {key} deve ser > 0, recebeu {p[key]}")
    if variant == "annulus" and not 0 <= p["inner"] < p["outer"]:
        raise GeometryDomainError("annulus: requer 0 <= inner < outer")
    if variant == "lens" and not 0 <= p["distance"] < 2 * p["radius"]:
        raise GeometryDomainError("lens: requer 0 <= distance < 2·radius")
    if variant == "two_discs" and not p["separation"] > p["radius1"] + p["radius2"]:
        raise GeometryDomainError("two_discs: discos devem ser disjuntos")
    if variant == "fig1b" and not p["plate"] < p["r"]:
        raise GeometryDomainError("fig1b: plate deve ser < r")


def _bounding_box(variant: str, p: Dict[str, float]) -> Box:
    if variant == "disc":
        R = p["radius"]
        return (p["cx"] - R, p["cx"] + R, p["cy"] - R, p["cy"] + R)
    if variant == "annulus":
        return (-p["outer"], p["outer"], -p["outer"], p["outer"])
    if variant == "rectangle":
        return (-p["half_width"], p["half_width"], -p["half_height"], p["half_height"])
    if variant == "lens":
        half = 0.5 * p["distance"]
        top = math.sqrt(p["radius"] ** 2 - half * half)
        return (half - p["radius"], p["radius"] - half, -top, top)
    if variant == "astroid":
        return (-p["scale"], p["scale"], -p["scale"], p["scale"])
    if variant == "two_discs":
        half = 0.5 * p["separation"]
        top = max(p["radius1"], p["radius2"])
        return (-half - p["radius1"], half + p["radius2"], -top, top)
    if variant == "fig1a":
        return (0.0, 5 * p["r"], 0.0, 2 * p["r"])
    if variant == "fig1b":
        return (0.0, 3 * p["r"], 0.0, 3 * p["r"])
    if variant == "fig3_pinch":
        return (0.0, 4 * p["r"], 0.0, 2 * p["r"])
    raise GeometryDomainError(f"Forma desconhecida: {variant}")


def make_shape(name: str, params: Optional[Dict[str, float]] = None) -> ShapeSpec:
    """Cria uma forma do catálogo, completando os parâmetros com os padrões"""
    if name not in SHAPE_CATALOG:
        raise GeometryDomainError(
            f"Forma desconhecida: {name} (disponíveis: {', '.join(SHAPE_CATALOG)})")
    entry = SHAPE_CATALOG[name]
    params = dict(params or {})
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise GeometryDomainError(f"{name}: parâmetros desconhecidos {sorted(unknown)}")
    p = {**entry.defaults, **{k: float(v) for k, v in params.items()}}
    if name == "fig1b" and "plate" not in params:
        p["plate"] = p["r"] / 20.0
    _validate(name, p)

    if name == "catalan_trisectrix":
        a = trisectrix_scale(p["length"])
        provenance = {
            "parametrization": "x = a(1 - 3t^2), y = a t (3 - t^2), t em [-sqrt(3), sqrt(3)]",
            "a": a,
            "segments": TRISECTRIX_SEGMENTS,
        }
        return ShapeSpec(name, p, (-8.0 * a, a, -2.0 * a, 2.0 * a),
                         polygon=trisectrix_polygon(a), provenance=provenance)

    provenance = {}
    if name.startswith("fig"):
        provenance = {"unidade": "r", "caixa": _bounding_box(name, p)}
    return ShapeSpec(name, p, _bounding_box(name, p), provenance=provenance)


def make_fig_shape(which: str, r: float = 1.0, **extra: float) -> ShapeSpec:
    if which not in ("fig1a", "fig1b", "fig3_pinch"):
        raise GeometryDomainError(f"Figura desconhecida: {which}")
    return make_shape(which, {"r": r, **extra})


def contains(shape: ShapeSpec, x: PointLike) -> bool:
    return shape.contains(x)


def analytic_length(shape: ShapeSpec) -> Optional[float]:
    """Comprimento da fronteira; None para as figuras"""
    p, v = shape.params, shape.variant
    if v == "disc":
        return 2.0 * math.pi * p["radius"]
    if v == "annulus":
        return 2.0 * math.pi * (p["inner"] + p["outer"])
    if v == "rectangle":
        return 4.0 * (p["half_width"] + p["half_height"])
    if v == "lens":
        return 4.0 * p["radius"] * math.acos(p["distance"] / (2.0 * p["radius"]))
    if v == "astroid":
        return 6.0 * p["scale"]
    if v == "catalan_trisectrix":
        return p["length"]
    if v == "two_discs":
        return 2.0 * math.pi * (p["radius1"] + p["radius2"])
    return None


def analytic_area(shape: ShapeSpec) -> Optional[float]:
    p, v = shape.params, shape.variant
    if v == "disc":
        return math.pi * p["radius"] ** 2
    if v == "annulus":
        return math.pi * (p["outer"] ** 2 - p["inner"] ** 2)
    if v == "rectangle":
        return 4.0 * p["half_width"] * p["half_height"]
    if v == "lens":
        R, d = p["radius"], p["distance"]
        return 2.0 * R * R * math.acos(d / (2.0 * R)) - 0.5 * d * math.sqrt(4.0 * R * R - d * d)
    if v == "astroid":
        return 3.0 * math.pi * p["scale"] ** 2 / 8.0
    if v == "catalan_trisectrix":
        a = shape.provenance["a"]
        return 72.0 * math.sqrt(3.0) / 5.0 * a * a
    if v == "two_discs":
        return math.pi * (p["radius1"] ** 2 + p["radius2"] ** 2)
    if v == "fig1a":
        return 2.0 * (4.0 - 0.5 * math.pi) * p["r"] ** 2
    if v == "fig1b":
        return (4.0 - math.pi) * p["r"] ** 2 + 2.0 * p["r"] * p["plate"]
    if v == "fig3_pinch":
        return (8.0 - 2.0 * math.pi) * p["r"] ** 2
    return None


def sample_uniform(req: SampleRequest) -> PointSet:
    """
    n pontos uniformes na forma por rejeição a partir da caixa envolvente.

    Determinístico dado o seed; cada requisição usa o seu próprio gerador.
    """
    shape = req.shape
    rng = np.random.default_rng(req.seed)
    xmin, xmax, ymin, ymax = shape.bounding_box
    lo, hi = np.array([xmin, ymin]), np.array([xmax, ymax])

    chunks: List[np.ndarray] = []
    accepted = 0
    drawn = 0
    batch = max(SAMPLE_BATCH, 2 * req.n)
    while accepted < req.n:
        candidates = lo + (hi - lo) * rng.random((batch, 2))
        inside = candidates[shape.contains_points(candidates)]
        drawn += batch
        accepted += len(inside)
        chunks.append(inside)
        if drawn >= 10 * SAMPLE_BATCH and accepted < MIN_ACCEPTANCE * drawn:
            raise ShapeSamplingError(
                f"Taxa de aceitação {accepted / drawn:.2e} < {MIN_ACCEPTANCE:.0e} para "
                f"{shape.variant}: caixa envolvente mal configurada?")
    points = np.vstack(chunks)[:req.n]
    logger.debug(f"sample_uniform({shape.variant}, n={req.n}): aceitos {accepted}/{drawn} "
                 f"({accepted / drawn:.1%})")
    return PointSet.from_array(points)


def catalog_rows() -> List[Dict[str, str]]:
    """Linhas do catálogo para --list"""
    rows = []
    for entry in SHAPE_CATALOG.values():
        params = ", ".join(f"{k}={v:g}" for k, v in entry.defaults.items())
        rows.append({"forma": entry.name, "parametros": params, "descricao": entry.description})
    return rows
