"""
Carregador de Configurações

settings.yaml traz os padrões numéricos, de log e de armazenamento;
os arquivos de experimento (JSON) descrevem uma execução reprodutível.
"""
import json
import yaml
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from core.errors import ConfigError

logger = logging.getLogger(__name__)

SETTINGS_PATH = "config/settings.yaml"

EXPERIMENT_KEYS = frozenset({
    "experiment", "shape", "shape_params", "r_list", "n_list", "replications",
    "master_seed", "grid_h", "out_dir", "workers",
})
EXPERIMENTS = ("table1", "convergence")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def load_settings(settings_path: str = SETTINGS_PATH) -> Dict[str, Any]:
    """Carrega settings.yaml, cria o arquivo padrão se não existir"""
    try:
        if not os.path.exists(settings_path):
            logger.warning(f"⚠️ {settings_path} não encontrado, criando configuração padrão")
            create_default_settings(settings_path)

        with open(settings_path, 'r', encoding='utf-8') as file:
            settings = yaml.safe_load(file) or {}

        settings = _merge_defaults(DEFAULT_SETTINGS, settings)
        settings = apply_env_vars(settings)
        validate_settings(settings)

        logger.debug(f"Configurações carregadas de {settings_path}")
        return settings

    except yaml.YAMLError as e:
        logger.error(f"❌ YAML inválido em {settings_path}: {e}")
        raise ConfigError(f"YAML inválido em {settings_path}: {e}")


def _merge_defaults(defaults: Dict[str, Any], values: Dict[str, Any]) -> Dict[str, Any]:
    merged = {}
    for key, default in defaults.items():
        value = values.get(key, default)
        if isinstance(default, dict) and isinstance(value, dict):
            value = _merge_defaults(default, value)
        merged[key] = value
    for key, value in values.items():
        if key not in merged:
            merged[key] = value
    return merged


def validate_settings(settings: Dict[str, Any]):
    """Valida se as seções obrigatórias estão presentes e coerentes"""
    required_sections = ['logging', 'numerics', 'raster', 'excess_mass', 'experiments', 'database']

    for section in required_sections:
        if not isinstance(settings.get(section), dict):
            raise ConfigError(f"Seção obrigatória ausente: {section}")

    level = str(settings['logging']['level']).upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"Nível de log inválido: {level}")

    numerics = settings['numerics']
    for key in ('dedupe_factor', 'accept_tol_factor', 'stitch_tol_factor', 'stitch_fallback_factor'):
        if not float(numerics[key]) > 0:
            raise ConfigError(f"numerics.{key} deve ser > 0")
    if numerics['stitch_fallback_factor'] < numerics['stitch_tol_factor']:
        raise ConfigError("numerics.stitch_fallback_factor deve ser >= stitch_tol_factor")

    raster = settings['raster']
    if int(raster['diagonal_cells']) < 16:
        raise ConfigError("raster.diagonal_cells deve ser >= 16")
    if int(raster['band']) < 0:
        raise ConfigError("raster.band deve ser >= 0")

    em = settings['excess_mass']
    if int(em['lambda_steps']) < 1 or float(em['lambda_headroom']) <= 0:
        raise ConfigError("excess_mass: lambda_steps >= 1 e lambda_headroom > 0")
    if int(em['candidates']) < 1:
        raise ConfigError("excess_mass.candidates deve ser >= 1")

    if int(settings['experiments']['workers']) < 1:
        raise ConfigError("experiments.workers deve ser >= 1")

    if settings['numerics']['accept_tol_factor'] > 1e-6:
        logger.warning("⚠️ accept_tol_factor > 1e-6 pode aceitar centros que não são vazios")


def apply_env_vars(settings: Dict[str, Any]) -> Dict[str, Any]:
    """Aplica variáveis de ambiente às configurações"""
    level = os.getenv('RCONVEX_LOG_LEVEL')
    if level:
        settings['logging']['level'] = level.upper()

    workers = os.getenv('RCONVEX_WORKERS')
    if workers:
        try:
            settings['experiments']['workers'] = int(workers)
        except ValueError:
            raise ConfigError(f"RCONVEX_WORKERS inválido: {workers!r}")

    db_path = os.getenv('RCONVEX_DB_PATH')
    if db_path:
        settings['database']['path'] = db_path

    return settings


# Configuração padrão caso o arquivo não exista
DEFAULT_SETTINGS = {
    'logging': {
        'level': 'INFO',
        'directory': 'logs',
        'file_output': True,
    },
    'numerics': {
        'dedupe_factor': 1e-12,
        'accept_tol_factor': 1e-9,
        'stitch_tol_factor': 1e-9,
        'stitch_fallback_factor': 1e-6,
    },
    'raster': {
        'diagonal_cells': 2048,
        'band': 2,
    },
    'excess_mass': {
        'lambda_steps': 20,
        'lambda_headroom': 1.2,
        'candidates': 10,
    },
    'experiments': {
        'workers': 4,
        'float_format': '%.10f',
    },
    'database': {
        'enabled': True,
        'path': 'data/rconvex_runs.db',
    },
}


def create_default_settings(settings_path: str = SETTINGS_PATH):
    """Cria arquivo de configuração padrão"""
    directory = os.path.dirname(settings_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(settings_path, 'w', encoding='utf-8') as file:
        yaml.dump(DEFAULT_SETTINGS, file, default_flow_style=False, sort_keys=False)

    logger.info(f"Arquivo de configuração padrão criado: {settings_path}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    shape: str
    shape_params: Dict[str, float]
    r_list: Tuple[float, ...]
    n_list: Tuple[int, ...]
    replications: int
    master_seed: int
    grid_h: Optional[float]
    out_dir: str
    workers: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "shape": self.shape,
            "shape_params": dict(self.shape_params),
            "r_list": list(self.r_list),
            "n_list": list(self.n_list),
            "replications": self.replications,
            "master_seed": self.master_seed,
            "grid_h": self.grid_h,
            "out_dir": self.out_dir,
            "workers": self.workers,
        }


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_experiment_config(raw: Any, source: str = "<config>") -> ExperimentConfig:
    """Valida um documento de experimento já decodificado"""
    from infrastructure.shapes import SHAPE_CATALOG

    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: o documento deve ser um objeto JSON")
    keys = set(raw)
    missing = sorted(EXPERIMENT_KEYS - keys)
    extra = sorted(keys - EXPERIMENT_KEYS)
    if missing or extra:
        raise ConfigError(f"{source}: chaves ausentes {missing}, chaves desconhecidas {extra}")

    if raw["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"{source}: experiment deve ser um de {EXPERIMENTS}")
    if raw["shape"] not in SHAPE_CATALOG:
        raise ConfigError(f"{source}: forma desconhecida {raw['shape']!r}")

    params = raw["shape_params"]
    if params is None:
        params = {}
    if not isinstance(params, dict) or not all(_is_number(v) for v in params.values()):
        raise ConfigError(f"{source}: shape_params deve mapear nomes para números")

    r_list = raw["r_list"]
    if not isinstance(r_list, list) or not r_list or not all(_is_number(r) and r > 0 for r in r_list):
        raise ConfigError(f"{source}: r_list deve ser uma lista não vazia de valores > 0")
    n_list = raw["n_list"]
    if not isinstance(n_list, list) or not n_list or not all(_is_int(n) and n >= 1 for n in n_list):
        raise ConfigError(f"{source}: n_list deve ser uma lista não vazia de inteiros >= 1")
    if not _is_int(raw["replications"]) or raw["replications"] < 1:
        raise ConfigError(f"{source}: replications deve ser inteiro >= 1")
    seed = raw["master_seed"]
    if not _is_int(seed) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"{source}: master_seed deve ser inteiro de 64 bits sem sinal")
    grid_h = raw["grid_h"]
    if grid_h is not None and not (_is_number(grid_h) and grid_h > 0):
        raise ConfigError(f"{source}: grid_h deve ser > 0 ou null")
    if not isinstance(raw["out_dir"], str) or not raw["out_dir"]:
        raise ConfigError(f"{source}: out_dir deve ser um caminho")
    if not _is_int(raw["workers"]) or raw["workers"] < 1:
        raise ConfigError(f"{source}: workers deve ser inteiro >= 1")

    return ExperimentConfig(
        experiment=raw["experiment"],
        shape=raw["shape"],
        shape_params={k: float(v) for k, v in params.items()},
        r_list=tuple(float(r) for r in r_list),
        n_list=tuple(int(n) for n in n_list),
        replications=int(raw["replications"]),
        master_seed=int(seed),
        grid_h=None if grid_h is None else float(grid_h),
        out_dir=raw["out_dir"],
        workers=int(raw["workers"]),
    )


def load_experiment_config(config_path: str) -> ExperimentConfig:
    """Lê o arquivo JSON do experimento"""
    if not os.path.exists(config_path):
        raise ConfigError(f"Arquivo de experimento não encontrado: {config_path}")
    try:
        with open(config_path, 'r', encoding='utf-8') as file:
            raw = json.load(file)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path}: JSON inválido: {e}")

    config = parse_experiment_config(raw, config_path)
    logger.info(f"✅ Experimento {config.experiment} carregado de {config_path}")
    return config
