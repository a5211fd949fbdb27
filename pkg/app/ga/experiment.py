"""Серии запусков ГА и таблица сравнения операторов."""
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from app.ga.engine import evolve, run_rng
from app.ga.individual import Individual
from app.models.images import BinaryWatermark
from app.models.schemas import CrossoverKind, ExperimentRow, GAConfig, MutationKind, RunStats
from app.utils.formatting import format_number

EXPERIMENT_COLUMNS = ["crossover", "mutation", "nc0", "av0", "nc_final", "av_final", "iter"]


def _run_once(task: Tuple[np.ndarray, GAConfig, int]) -> Tuple[List[int], RunStats]:
    """Один запуск в рабочем процессе; возвращает перестановку с нуля и статистику."""
    bits, cfg, run_index = task
    original = BinaryWatermark(bits=bits)
    best, stats = evolve(original, cfg, run_rng(cfg.rng_seed, run_index))
    return best.perm.tolist(), stats


def evolve_runs(
    original: BinaryWatermark,
    cfg: GAConfig,
    runs: int,
    max_workers: int = 1
) -> List[Tuple[Individual, RunStats]]:
    """
    Независимые запуски ГА; запуск i использует поток (cfg.rng_seed, i).

    Результат не зависит от max_workers.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")

    tasks = [(original.bits, cfg, run_index) for run_index in range(runs)]
    if max_workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(_run_once, tasks))
    else:
        outcomes = [_run_once(task) for task in tasks]

    return [
        (Individual.from_perm(original, np.asarray(perm, dtype=np.int64)), stats)
        for perm, stats in outcomes
    ]


def summarize_runs(crossover: CrossoverKind, mutation: MutationKind, stats: List[RunStats]) -> ExperimentRow:
    """
    Агрегирование запусков одной пары операторов.

    NC-столбцы - лучшее значение по запускам, Av-столбцы - среднее,
    iter - среднее поколение первого достижения итогового лучшего.
    """
    initial = np.array([s.nc0 for s in stats])
    final = np.array([s.nc_final for s in stats])
    return ExperimentRow(
        crossover=crossover,
        mutation=mutation,
        nc0=float(initial.min()),
        av0=float(initial.mean()),
        nc_final=float(final.min()),
        av_final=float(final.mean()),
        iter=float(np.mean([s.found_at for s in stats]))
    )


def run_experiment(
    original: BinaryWatermark,
    crossovers: Iterable[CrossoverKind],
    mutations: Iterable[MutationKind],
    runs: int,
    cfg: GAConfig,
    max_workers: int = 1
) -> List[ExperimentRow]:
    """
    Сетка операторов скрещивания и мутации.

    Args:
        original: Исходный водяной знак
        crossovers: Виды скрещивания
        mutations: Виды мутации
        runs: Число запусков на ячейку
        cfg: Базовые параметры ГА (crossover/mutation подменяются)
        max_workers: Число процессов для независимых запусков

    Returns:
        Строки в порядке crossovers x mutations
    """
    rows: List[ExperimentRow] = []
    for crossover, mutation in product(list(crossovers), list(mutations)):
        cell_cfg = cfg.model_copy(update={
            "crossover": CrossoverKind(crossover),
            "mutation": MutationKind(mutation)
        })
        results = evolve_runs(original, cell_cfg, runs, max_workers)
        row = summarize_runs(cell_cfg.crossover, cell_cfg.mutation, [stats for _, stats in results])
        logger.info(
            f"{row.crossover.value}+{row.mutation.value}: NC0={row.nc0:.4f} "
            f"NC_final={row.nc_final:.4f} iter={row.iter:.1f}"
        )
        rows.append(row)
    return rows


def experiment_frame(rows: List[ExperimentRow], extra: Optional[dict] = None) -> pd.DataFrame:
    """Таблица результатов с отформатированными числами (для CSV)."""
    records = []
    for row in rows:
        record = {name: getattr(row, name) for name in EXPERIMENT_COLUMNS}
        record["crossover"] = row.crossover.value
        record["mutation"] = row.mutation.value
        records.append({
            key: format_number(value) if isinstance(value, float) else value
            for key, value in record.items()
        })

    frame = pd.DataFrame(records, columns=EXPERIMENT_COLUMNS)
    if extra:
        for column, value in extra.items():
            frame.insert(0, column, value)
    return frame
