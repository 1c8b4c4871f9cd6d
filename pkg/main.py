#!/usr/bin/env python3
"""
rconvex-toolkit
Ponto de entrada principal (fecho r-convexo, testes de forma, amostragem,
conjuntos de nível e experimentos)

Códigos de saída: 0 sucesso, 2 erro de configuração/domínio, 3 teste de forma
reprovado, 4 diagnóstico numérico.
"""
import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import numpy as np

from config.config_loader import load_experiment_config, load_settings
from core.errors import ChainClosureError, ConfigError, GeometryDomainError
from core.excess_mass import (DensityModel, auto_bandwidth, build_candidate_family, lambda_sweep,
                              level_set_estimate, levelset_grid)
from core.rconvex_hull import boundary_length, build_hull
from experiments.harness import run_experiment
from infrastructure.data_manager import (read_mask, read_points_csv, write_arcs_csv,
                                         write_mask, write_points_csv, write_table)
from infrastructure.shape_checks import ilc_check, rconvexity_check, rolling_check
from infrastructure.shapes import (SampleRequest, catalog_rows, make_shape, parse_params,
                                   sample_uniform)
from interface.console import print_catalog, print_checks, print_summary, progress_bar
from interface.svg_render import render_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_CHECK_FAILED = 3
EXIT_NUMERIC = 4


def setup_logging(settings: dict, cli_level: Optional[str] = None):
    """Arquivo diário em logs/ e stderr; stdout fica para os resultados"""
    log_cfg = settings['logging']
    level = (cli_level or log_cfg['level']).upper()
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_cfg.get('file_output', True):
        directory = Path(log_cfg.get('directory', 'logs'))
        directory.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(
            directory / f'rconvex_{datetime.now().strftime("%Y%m%d")}.log', encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _numerics(settings: dict) -> dict:
    numerics = settings['numerics']
    return {
        'accept_tol_factor': float(numerics['accept_tol_factor']),
        'stitch_factor': float(numerics['stitch_tol_factor']),
        'fallback_factor': float(numerics['stitch_fallback_factor']),
    }


def cmd_hull(args, settings: dict) -> int:
    sample = read_points_csv(args.input, dedupe_factor=float(settings['numerics']['dedupe_factor']))
    hull = build_hull(sample, args.r, **_numerics(settings))
    logger.info(f"✅ Fecho com {len(hull.boundary.arcs)} arcos, "
                f"{len(hull.boundary.chains)} cadeias, {len(hull.isolated)} pontos isolados")
    if args.out_arcs:
        write_arcs_csv(hull, args.out_arcs, settings['experiments']['float_format'])
    if args.out_svg:
        render_svg(hull, args.out_svg, sample if args.overlay else None)
    if args.length:
        print(f"{boundary_length(hull):.10f}")
    return EXIT_OK


def cmd_check(args, settings: dict) -> int:
    mask = read_mask(args.input)
    band = int(settings['raster']['band'])
    if args.test == 'rconvex':
        passed = rconvexity_check(mask, args.r, band=band)
    elif args.test == 'rolling':
        passed = rolling_check(mask, args.r)
    else:
        passed = ilc_check(mask, args.alpha if args.alpha is not None else args.r)
    print("pass" if passed else "fail")
    logger.info(f"{'✅' if passed else '❌'} {args.test}: {'aprovado' if passed else 'reprovado'}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_sample(args, settings: dict) -> int:
    if args.list:
        print_catalog(catalog_rows())
        return EXIT_OK
    if not args.shape or args.n is None or not args.out:
        raise GeometryDomainError("sample exige --shape, --n e --out (ou --list)")
    shape = make_shape(args.shape, parse_params(args.params))
    points = sample_uniform(SampleRequest(shape, args.n, args.seed))
    write_points_csv(points, args.out)
    logger.info(f"✅ {len(points)} pontos de {shape.name} gravados em {args.out}")
    return EXIT_OK


def _excess_mass_options(settings: dict) -> dict:
    em = settings['excess_mass']
    return {
        'candidates': int(em['candidates']),
        'steps': int(em['lambda_steps']),
        'headroom': float(em['lambda_headroom']),
    }


def parse_lambda_grid(text: str) -> List[float]:
    """'a:b:steps' -> steps valores igualmente espaçados em [a, b]"""
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise GeometryDomainError(f"--lambda-grid deve ser a:b:steps, recebeu {text!r}")
    if steps < 1 or b < a:
        raise GeometryDomainError(f"--lambda-grid inválida: {text!r}")
    return [float(v) for v in np.linspace(a, b, steps)]


def cmd_levelset(args, settings: dict) -> int:
    if args.lambda_value is not None and args.lambda_grid is not None:
        raise GeometryDomainError("levelset aceita só um de --lambda e --lambda-grid")
    options = _excess_mass_options(settings)
    sample = read_points_csv(args.input, dedupe_factor=float(settings['numerics']['dedupe_factor']))
    bandwidth = auto_bandwidth(sample) if args.bandwidth == "auto" else float(args.bandwidth)
    if not args.r > 0:
        raise GeometryDomainError(f"r deve ser > 0, recebeu {args.r}")
    grid = levelset_grid(sample, args.r, bandwidth,
                         diagonal_cells=int(settings['raster']['diagonal_cells']))
    family = build_candidate_family(sample, args.r, bandwidth=bandwidth, grid=grid,
                                    candidates=options['candidates'])

    model = None
    if args.shape:
        model = DensityModel.uniform(make_shape(args.shape, parse_params(args.params)))

    if args.lambda_value is not None:
        lambdas = [args.lambda_value]
    elif args.lambda_grid is not None:
        lambdas = parse_lambda_grid(args.lambda_grid)
    else:
        lambdas = None
    report = lambda_sweep(sample, model, family, lambdas,
                          steps=options['steps'], headroom=options['headroom'])
    lambdas = list(report.table["lambda"])
    if args.out_report:
        write_table(report.table, args.out_report, settings['experiments']['float_format'])
    if args.out_mask:
        # com grade, grava o conjunto escolhido para o primeiro lambda
        mask, value = level_set_estimate(sample, lambdas[0], family)
        write_mask(mask, args.out_mask)
        logger.info(f"Máscara para lambda={lambdas[0]:g} (H_n={value:.4g}) em {args.out_mask}")
    print_summary(report.table, "📊 Varredura em lambda")
    logger.info(f"Transição para o vazio em lambda={report.transition_lambda:.6g}")
    return EXIT_OK


def cmd_run(args, settings: dict) -> int:
    config = load_experiment_config(args.config)
    total = len(config.r_list) * len(config.n_list) * config.replications
    with progress_bar(total, config.experiment, enabled=not args.quiet) as advance:
        result = run_experiment(config, settings, advance)
    print_summary(result.summary, f"📊 {config.experiment}: {config.shape}")
    print_checks(result.checks)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rconvex", description="Fecho r-convexo e estimação de conjuntos")
    parser.add_argument("--settings", default="config/settings.yaml")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hull", help="fecho r-convexo de uma amostra")
    p.add_argument("--input", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--out-arcs")
    p.add_argument("--out-svg")
    p.add_argument("--overlay", action="store_true", help="desenha a amostra sobre o fecho")
    p.add_argument("--length", action="store_true", help="imprime L(S_n) no stdout")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("check", help="testa condições de forma numa máscara")
    p.add_argument("--input", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--test", choices=["rconvex", "rolling", "ilc"], required=True)
    p.add_argument("--alpha", type=float, help="raio do teste ilc (padrão: r)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sample", help="amostra uniforme de uma forma do catálogo")
    p.add_argument("--shape")
    p.add_argument("--params")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("levelset", help="estimação de conjuntos de nível por excesso de massa")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda", dest="lambda_value", type=float)
    p.add_argument("--lambda-grid")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--out-report")
    p.add_argument("--out-mask")
    p.add_argument("--shape", help="modelo uniforme para h_model, d_mu e sup_dev")
    p.add_argument("--params")
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("run", help="executa um experimento descrito em JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--quiet", action="store_true", help="sem barra de progresso")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_settings(args.settings)
    except ConfigError as e:
        logging.basicConfig(level=logging.ERROR)
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    setup_logging(settings, args.log_level)

    try:
        return args.func(args, settings)
    except ConfigError as e:
        logger.error(f"❌ Configuração inválida: {e}")
        return EXIT_ERROR
    except ChainClosureError as e:
        logger.error(f"❌ Diagnóstico numérico: {e}")
        for record in e.fragment:
            logger.debug(f"   fragmento: {record}")
        return EXIT_NUMERIC
    except (GeometryDomainError, ValueError) as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"❌ Erro de E/S: {e}")
        return EXIT_ERROR
    except KeyboardInterrupt:
        logger.info("Interrompido pelo usuário")
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Erro fatal: {e}", exc_info=True)
        return EXIT_NUMERIC


if __name__ == "__main__":
    # Verificar Python 3.9+
    if sys.version_info < (3, 9):
        print("❌ Python 3.9+ é necessário!")
        sys.exit(1)

    sys.exit(main())
