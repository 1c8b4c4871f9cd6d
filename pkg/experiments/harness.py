"""
Experimentos reprodutíveis

table1: média e desvio de L(S_n) por (r, n) em R replicações.
convergence: medianas de d_H(S_n,S), d_H(∂S_n,∂S) e d_μ(S_n,S) por (r, n).

Cada replicação usa seed = derive_seed(master_seed, i); o resultado dos CSVs
depende só da configuração. Tempo de parede vai para timings.csv e para o banco.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.config_loader import ExperimentConfig
from core.errors import GeometryDomainError
from core.rconvex_hull import (ACCEPT_TOL_FACTOR, STITCH_FALLBACK_FACTOR, STITCH_TOL_FACTOR,
                               boundary_length, build_hull)
from database.results_store import ResultsStore
from experiments.seeds import derive_seed
from infrastructure.data_manager import FLOAT_FORMAT, DataManager
from infrastructure.raster import (DEFAULT_DIAGONAL_CELLS, GridMask, GridSpec, grid_for_box,
                                   rasterize)
from infrastructure.set_metrics import hausdorff_boundaries, hausdorff_masks, measure_distance
from infrastructure.shapes import SampleRequest, analytic_length, make_shape, sample_uniform

logger = logging.getLogger(__name__)

RUN_COLUMNS = ['shape', 'r', 'n', 'replication', 'seed', 'length', 'isolated']
CONVERGENCE_COLUMNS = ['dh_set', 'dh_boundary', 'd_mu']

# (forma, r, n) -> (média de referência, desvio de referência, intervalo aceito para a média)
REFERENCE_VALUES: Dict[Tuple[str, float, int], Dict] = {
    ('astroid', 0.25, 5000): {'mean': 5.7024, 'std': 0.0695, 'range': (5.66, 5.74)},
    ('astroid', 0.25, 10000): {'mean': 5.7709, 'std': 0.0539, 'range': (5.73, 5.81)},
    ('astroid', 0.5, 5000): {'mean': 5.6848, 'std': 0.0705, 'range': (5.64, 5.72)},
    ('astroid', 0.5, 10000): {'mean': 5.7584, 'std': 0.0542, 'range': (5.72, 5.80)},
    ('astroid', 1.0, 5000): {'mean': 5.6730, 'std': 0.0698, 'range': (5.63, 5.71)},
    ('astroid', 1.0, 10000): {'mean': 5.7500, 'std': 0.0537, 'range': (5.71, 5.79)},
    # trisectrix: posição calibrada só pelo perímetro, faixa mais larga
    ('catalan_trisectrix', 0.5, 5000): {'mean': 20.8722, 'std': 0.0697, 'range': (20.68, 21.04)},
    ('catalan_trisectrix', 0.5, 10000): {'mean': 20.8289, 'std': 0.0479, 'range': (20.64, 20.99)},
    ('catalan_trisectrix', 2.0, 5000): {'mean': 20.6383, 'std': 0.0637, 'range': (20.45, 20.80)},
    ('catalan_trisectrix', 2.0, 10000): {'mean': 20.6821, 'std': 0.0454, 'range': (20.49, 20.85)},
    ('catalan_trisectrix', 5.0, 5000): {'mean': 20.6131, 'std': 0.0633, 'range': (20.42, 20.78)},
    ('catalan_trisectrix', 5.0, 10000): {'mean': 20.6661, 'std': 0.0453, 'range': (20.47, 20.83)},
}

ProgressCallback = Callable[[int], None]


@dataclass
class ExperimentResult:
    """Tabelas produzidas por um experimento"""
    config: ExperimentConfig
    runs: pd.DataFrame
    summary: pd.DataFrame
    timings: pd.DataFrame
    paths: Dict[str, str] = field(default_factory=dict)
    checks: List[Dict] = field(default_factory=list)
    experiment_id: Optional[int] = None


# ---------------------------------------------------------------------------
# Replicação (executa no processo trabalhador)
# ---------------------------------------------------------------------------

_SHAPE_MASKS: Dict[Tuple, GridMask] = {}


def _shape_mask(shape_name: str, params: Tuple, spec: GridSpec) -> GridMask:
    key = (shape_name, params, spec)
    mask = _SHAPE_MASKS.get(key)
    if mask is None:
        mask = rasterize(make_shape(shape_name, dict(params)), window=spec)
        _SHAPE_MASKS.clear()
        _SHAPE_MASKS[key] = mask
    return mask


def run_replication(task: Dict) -> Dict:
    """
    Uma replicação: amostra, fecho, comprimento e (opcionalmente) as distâncias.

    Função de nível de módulo para poder ser enviada ao ProcessPoolExecutor.
    """
    started = time.perf_counter()
    shape = make_shape(task['shape'], dict(task['params']))
    sample = sample_uniform(SampleRequest(shape, task['n'], task['seed']))
    hull = build_hull(sample, task['r'],
                      accept_tol_factor=task.get('accept_tol_factor', ACCEPT_TOL_FACTOR),
                      stitch_factor=task.get('stitch_tol_factor', STITCH_TOL_FACTOR),
                      fallback_factor=task.get('stitch_fallback_factor', STITCH_FALLBACK_FACTOR))
    record = {
        'shape': task['shape'],
        'r': task['r'],
        'n': task['n'],
        'replication': task['replication'],
        'seed': task['seed'],
        'length': boundary_length(hull),
        'isolated': len(hull.isolated),
    }

    spec = task.get('grid')
    if spec is not None:
        truth = _shape_mask(task['shape'], task['params'], spec)
        estimate = rasterize(hull, window=spec)
        if estimate.is_empty:
            # só pontos isolados: não há máscara para comparar
            record.update({'dh_set': math.nan, 'dh_boundary': math.nan,
                           'd_mu': measure_distance(estimate, truth)})
        else:
            record.update({
                'dh_set': hausdorff_masks(estimate, truth),
                'dh_boundary': hausdorff_boundaries(estimate, truth),
                'd_mu': measure_distance(estimate, truth),
            })

    record['wall_time'] = time.perf_counter() - started
    return record


# ---------------------------------------------------------------------------
# Orquestração
# ---------------------------------------------------------------------------


def build_tasks(config: ExperimentConfig, settings: Optional[Dict] = None,
                grid: Optional[GridSpec] = None) -> List[Dict]:
    """Tarefas ordenadas por (r, n, replicação)"""
    numerics = (settings or {}).get('numerics', {})
    params = tuple(sorted(config.shape_params.items()))
    seeds = [derive_seed(config.master_seed, i) for i in range(config.replications)]
    tasks = []
    for r in sorted(config.r_list):
        for n in sorted(config.n_list):
            for i, seed in enumerate(seeds):
                task = {
                    'shape': config.shape, 'params': params, 'r': r, 'n': n,
                    'replication': i, 'seed': seed, 'grid': grid,
                }
                for key in ('accept_tol_factor', 'stitch_tol_factor', 'stitch_fallback_factor'):
                    if key in numerics:
                        task[key] = float(numerics[key])
                tasks.append(task)
    return tasks


def execute_tasks(tasks: List[Dict], workers: int,
                  progress: Optional[ProgressCallback] = None) -> List[Dict]:
    """Executa as replicações; a ordem do resultado é a ordem das tarefas"""
    records = []
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            records.append(run_replication(task))
            if progress:
                progress(1)
        return records

    with ProcessPoolExecutor(max_workers=workers) as executor:
        for record in executor.map(run_replication, tasks, chunksize=1):
            records.append(record)
            if progress:
                progress(1)
    return records


def _split_records(records: List[Dict], extra: List[str]) -> Tuple[pd.DataFrame, pd.DataFrame]:
    df = pd.DataFrame(records)
    df = df.sort_values(['r', 'n', 'replication'], kind='mergesort').reset_index(drop=True)
    df['seed'] = df['seed'].astype(str)
    runs = df[RUN_COLUMNS + extra].copy()
    timings = df[['r', 'n', 'replication', 'wall_time']].copy()
    return runs, timings


def summarize_table1(runs: pd.DataFrame, true_length: Optional[float]) -> pd.DataFrame:
    """Média, desvio amostral, erro padrão e (se conhecido) L(S) e viés relativo"""
    grouped = runs.groupby(['shape', 'r', 'n'], sort=True)
    summary = grouped['length'].agg(runs='count', mean='mean', std='std').reset_index()
    summary['stderr'] = summary['std'] / np.sqrt(summary['runs'])
    summary['mean_isolated'] = grouped['isolated'].mean().to_numpy()
    if true_length is not None:
        summary['L_true'] = true_length
        summary['rel_bias'] = (summary['mean'] - true_length) / true_length
    return summary


def summarize_convergence(runs: pd.DataFrame) -> pd.DataFrame:
    """Medianas das distâncias por (r, n), ignorando replicações sem máscara"""
    grouped = runs.groupby(['shape', 'r', 'n'], sort=True)
    curves = grouped[CONVERGENCE_COLUMNS].median().reset_index()
    curves.insert(3, 'runs', grouped.size().to_numpy())
    curves['mean_length'] = grouped['length'].mean().to_numpy()
    curves['degenerate'] = grouped['dh_set'].apply(lambda s: int(s.isna().sum())).to_numpy()
    return curves


def validation_report(summary: pd.DataFrame) -> List[Dict]:
    """Compara as médias com os valores de referência, quando existem"""
    checks = []
    for row in summary.itertuples(index=False):
        ref = REFERENCE_VALUES.get((row.shape, float(row.r), int(row.n)))
        if ref is None:
            continue
        lo, hi = ref['range']
        checks.append({
            'shape': row.shape, 'r': row.r, 'n': row.n, 'mean': row.mean, 'std': row.std,
            'ref_mean': ref['mean'], 'ref_std': ref['std'], 'passed': bool(lo <= row.mean <= hi),
        })

    for check in checks:
        ref_std = f"{check['ref_std']:.4f}" if check['ref_std'] is not None else "-"
        status = "OK" if check['passed'] else "FORA"
        report = f"""
╔══════════════════════════════════════════════╗
║          COMPARAÇÃO COM REFERÊNCIA           ║
╠══════════════════════════════════════════════╣
║ Forma: {check['shape']:>38} ║
║ r: {check['r']:>42g} ║
║ n: {check['n']:>42d} ║
║ Média: {check['mean']:>38.4f} ║
║ Média de referência: {check['ref_mean']:>24.4f} ║
║ Desvio: {check['std']:>37.4f} ║
║ Desvio de referência: {ref_std:>23} ║
║ Situação: {status:>35} ║
╚══════════════════════════════════════════════╝
        """
        if check['passed']:
            logger.info(report)
        else:
            logger.warning(report)
    return checks


def _store_results(config: ExperimentConfig, records: List[Dict], settings: Optional[Dict]) -> Optional[int]:
    db = (settings or {}).get('database', {})
    if not db.get('enabled', False):
        return None
    with ResultsStore(db['path']) as store:
        previous = store.get_experiments_by_config(config.to_dict())
        if previous:
            logger.info(f"Configuração já executada {len(previous)} vez(es) (último id {previous[0]['id']})")
        experiment_id = store.start_experiment(config.experiment, config.shape, config.to_dict())
        store.save_runs(experiment_id, records)
    return experiment_id


def _workers(config: ExperimentConfig, settings: Optional[Dict]) -> int:
    limit = (settings or {}).get('experiments', {}).get('workers')
    return config.workers if limit is None else max(1, min(config.workers, int(limit)))


def _float_format(settings: Optional[Dict]) -> str:
    return (settings or {}).get('experiments', {}).get('float_format', FLOAT_FORMAT)


def run_table1(config: ExperimentConfig, settings: Optional[Dict] = None,
               progress: Optional[ProgressCallback] = None) -> ExperimentResult:
    """Reproduz as linhas L(S_n) da tabela de médias e desvios"""
    shape = make_shape(config.shape, config.shape_params)
    true_length = analytic_length(shape)
    if true_length is None:
        logger.warning(f"⚠️ {config.shape} não tem comprimento analítico: resumo sem L_true")

    tasks = build_tasks(config, settings)
    logger.info(f"🔬 table1: {config.shape}, {len(tasks)} replicações "
                f"({len(config.r_list)} r x {len(config.n_list)} n x {config.replications})")
    records = execute_tasks(tasks, _workers(config, settings), progress)

    runs, timings = _split_records(records, [])
    summary = summarize_table1(runs, true_length)

    result = ExperimentResult(config, runs, summary, timings)
    result.checks = validation_report(summary)
    _write_outputs(result, settings)
    result.experiment_id = _store_results(config, records, settings)
    return result


def convergence_grid(config: ExperimentConfig, settings: Optional[Dict] = None) -> GridSpec:
    """Grade comum às máscaras da forma e dos fechos; sem grid_h, h = diagonal/diagonal_cells"""
    shape = make_shape(config.shape, config.shape_params)
    cells = (settings or {}).get('raster', {}).get('diagonal_cells', DEFAULT_DIAGONAL_CELLS)
    return grid_for_box(shape.bounding_box, config.grid_h, diagonal_cells=int(cells))


def run_convergence(config: ExperimentConfig, settings: Optional[Dict] = None,
                    progress: Optional[ProgressCallback] = None) -> ExperimentResult:
    """Curvas das medianas de d_H(S_n,S), d_H(∂S_n,∂S) e d_μ(S_n,S)"""
    grid = convergence_grid(config, settings)
    tasks = build_tasks(config, settings, grid)
    logger.info(f"🔬 convergence: {config.shape}, {len(tasks)} replicações, "
                f"grade {grid.width}x{grid.height} (h={grid.h:.4g})")
    records = execute_tasks(tasks, _workers(config, settings), progress)

    runs, timings = _split_records(records, CONVERGENCE_COLUMNS)
    summary = summarize_convergence(runs)
    summary['h'] = grid.h
    degenerate = int(summary['degenerate'].sum())
    if degenerate:
        logger.warning(f"⚠️ {degenerate} replicações sem região (só pontos isolados) "
                       f"ignoradas nas medianas de Hausdorff")

    result = ExperimentResult(config, runs, summary, timings)
    _write_outputs(result, settings)
    result.experiment_id = _store_results(config, records, settings)
    return result


def _write_outputs(result: ExperimentResult, settings: Optional[Dict]):
    manager = DataManager(result.config.out_dir, _float_format(settings))
    manager.initialize()
    result.paths['runs'] = manager.save_table('runs.csv', result.runs)
    result.paths['summary'] = manager.save_table('summary.csv', result.summary)
    result.paths['timings'] = manager.save_table('timings.csv', result.timings)

    if result.config.experiment == 'convergence':
        from interface.svg_render import render_svg
        path = manager.path('curves.svg')
        render_svg(result.summary, path)
        result.paths['curves'] = path


EXPERIMENT_RUNNERS = {
    'table1': run_table1,
    'convergence': run_convergence,
}


def run_experiment(config: ExperimentConfig, settings: Optional[Dict] = None,
                   progress: Optional[ProgressCallback] = None) -> ExperimentResult:
    runner = EXPERIMENT_RUNNERS.get(config.experiment)
    if runner is None:
        raise GeometryDomainError(f"Experimento desconhecido: {config.experiment}")
    started = time.perf_counter()
    result = runner(config, settings, progress)
    logger.info(f"✅ {config.experiment} concluído em {time.perf_counter() - started:.1f}s "
                f"-> {config.out_dir}")
    return result
