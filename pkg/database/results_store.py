"""
Armazenamento de Resultados - SQLite

Guarda cada experimento (configuração + hash) e os registros por replicação,
incluindo o tempo de execução que não vai para os CSVs determinísticos.
"""
import sqlite3
import logging
import json
import hashlib
import os
import shutil
from datetime import datetime
from typing import Dict, Iterable, List

import pandas as pd

logger = logging.getLogger(__name__)

RUN_COLUMNS = ['shape', 'r', 'n', 'replication', 'seed', 'length', 'isolated', 'wall_time']


def config_hash(config: Dict) -> str:
    payload = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


class ResultsStore:
    """Gerencia as operações do banco de resultados"""

    def __init__(self, db_path: str):
        self.db_path = db_path
        self.conn = None

    def initialize(self):
        """Abre o banco e cria as tabelas"""
        try:
            directory = os.path.dirname(self.db_path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            self.conn = sqlite3.connect(self.db_path)
            self.conn.row_factory = sqlite3.Row
            self._create_tables()
            logger.debug(f"Banco de resultados pronto em {self.db_path}")
        except sqlite3.Error as e:
            logger.error(f"Erro ao inicializar banco: {e}")
            raise

    def __enter__(self) -> "ResultsStore":
        self.initialize()
        return self

    def __exit__(self, *exc):
        self.close()

    def _create_tables(self):
        cursor = self.conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS experiments (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                created_at DATETIME DEFAULT CURRENT_TIMESTAMP,
                name TEXT NOT NULL,
                shape TEXT NOT NULL,
                config_json TEXT NOT NULL,
                config_hash TEXT NOT NULL
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                experiment_id INTEGER NOT NULL REFERENCES experiments(id),
                shape TEXT NOT NULL,
                r REAL NOT NULL,
                n INTEGER NOT NULL,
                replication INTEGER NOT NULL,
                seed TEXT NOT NULL,
                length REAL NOT NULL,
                isolated INTEGER NOT NULL,
                wall_time REAL
            )
        """)

        cursor.execute("CREATE INDEX IF NOT EXISTS idx_runs_experiment ON runs(experiment_id)")
        cursor.execute("CREATE INDEX IF NOT EXISTS idx_runs_cell ON runs(shape, r, n)")
        cursor.execute("CREATE INDEX IF NOT EXISTS idx_experiments_hash ON experiments(config_hash)")

        self.conn.commit()

    def start_experiment(self, name: str, shape: str, config: Dict) -> int:
        """Registra um experimento e devolve o seu id"""
        cursor = self.conn.cursor()
        cursor.execute("""
            INSERT INTO experiments (created_at, name, shape, config_json, config_hash)
            VALUES (?, ?, ?, ?, ?)
        """, (datetime.now().isoformat(timespec="seconds"), name, shape,
              json.dumps(config, sort_keys=True), config_hash(config)))
        self.conn.commit()
        experiment_id = cursor.lastrowid
        logger.debug(f"Experimento salvo com ID: {experiment_id}")
        return experiment_id

    def save_runs(self, experiment_id: int, records: Iterable[Dict]) -> int:
        rows = [(experiment_id, rec['shape'], float(rec['r']), int(rec['n']),
                 int(rec['replication']), str(rec['seed']), float(rec['length']),
                 int(rec['isolated']), rec.get('wall_time'))
                for rec in records]
        self.conn.executemany("""
            INSERT INTO runs (experiment_id, shape, r, n, replication, seed, length,
                              isolated, wall_time)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
        """, rows)
        self.conn.commit()
        logger.debug(f"{len(rows)} replicações salvas para o experimento {experiment_id}")
        return len(rows)

    def get_runs(self, experiment_id: int) -> pd.DataFrame:
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT shape, r, n, replication, seed, length, isolated, wall_time
            FROM runs
            WHERE experiment_id = ?
            ORDER BY r, n, replication
        """, (experiment_id,))
        data = [tuple(row) for row in cursor.fetchall()]
        return pd.DataFrame(data, columns=RUN_COLUMNS)

    def get_summary(self, experiment_id: int) -> pd.DataFrame:
        """Média, contagem e tempo médio por (r, n)"""
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT r, n,
                   COUNT(*) as runs,
                   AVG(length) as mean_length,
                   AVG(isolated) as mean_isolated,
                   AVG(wall_time) as mean_wall_time
            FROM runs
            WHERE experiment_id = ?
            GROUP BY r, n
            ORDER BY r, n
        """, (experiment_id,))
        data = [tuple(row) for row in cursor.fetchall()]
        return pd.DataFrame(data, columns=['r', 'n', 'runs', 'mean_length', 'mean_isolated',
                                           'mean_wall_time'])

    def list_experiments(self, limit: int = 20) -> List[Dict]:
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT id, created_at, name, shape, config_hash
            FROM experiments
            ORDER BY id DESC
            LIMIT ?
        """, (limit,))
        return [dict(row) for row in cursor.fetchall()]

    def get_experiments_by_config(self, config: Dict) -> List[Dict]:
        """Execuções anteriores com a mesma configuração"""
        cursor = self.conn.cursor()
        cursor.execute("""
            SELECT id, created_at, name, shape
            FROM experiments
            WHERE config_hash = ?
            ORDER BY id DESC
        """, (config_hash(config),))
        return [dict(row) for row in cursor.fetchall()]

    def backup(self, backup_path: str):
        """Faz backup do banco de dados"""
        try:
            shutil.copy2(self.db_path, backup_path)
            logger.info(f"Backup criado: {backup_path}")
        except OSError as e:
            logger.error(f"Erro ao criar backup: {e}")

    def close(self):
        """Fecha a conexão com o banco"""
        if self.conn:
            self.conn.close()
            self.conn = None
            logger.debug("Conexão com banco fechada")
