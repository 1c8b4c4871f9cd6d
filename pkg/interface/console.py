"""
Saída de terminal - tabelas e barra de progresso
"""
import logging
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional

import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

logger = logging.getLogger(__name__)

# stdout fica livre para --length
console = Console(stderr=True)


def _fmt(value) -> str:
    if isinstance(value, float):
        if value != value:
            return "-"
        return f"{value:.4f}" if abs(value) < 1e4 else f"{value:.4g}"
    return str(value)


def summary_table(df: pd.DataFrame, title: str) -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for column in df.columns:
        justify = "left" if df[column].dtype == object else "right"
        table.add_column(str(column), justify=justify)
    for row in df.itertuples(index=False):
        table.add_row(*(_fmt(v) for v in row))
    return table


def print_summary(df: pd.DataFrame, title: str = "📊 Resumo"):
    console.print(summary_table(df, title))


def print_catalog(rows: List[Dict[str, str]]):
    table = Table(title="📐 Formas disponíveis", show_header=True, header_style="bold cyan")
    table.add_column("Forma", style="cyan")
    table.add_column("Parâmetros (padrão)")
    table.add_column("Descrição")
    for row in rows:
        table.add_row(row['forma'], row['parametros'], row['descricao'])
    Console().print(table)


def print_checks(checks: List[Dict]):
    """Painel com a comparação contra os valores de referência"""
    if not checks:
        return
    lines = []
    for check in checks:
        mark = "[green]✅[/green]" if check['passed'] else "[red]❌[/red]"
        lines.append(f"{mark} {check['shape']} r={check['r']:g} n={check['n']}: "
                     f"{check['mean']:.4f} (referência {check['ref_mean']:.4f})")
    console.print(Panel("\n".join(lines), title="📈 Referência"))


@contextmanager
def progress_bar(total: int, description: str, enabled: bool = True) -> Iterator[Optional[Callable[[int], None]]]:
    """Entrega um callback advance(k) ou None quando desativado"""
    if not enabled:
        yield None
        return
    progress = Progress(TextColumn("[bold blue]{task.description}"), BarColumn(),
                        MofNCompleteColumn(), TimeElapsedColumn(), console=console)
    with progress:
        task = progress.add_task(description, total=total)
        yield lambda k=1: progress.advance(task, k)
