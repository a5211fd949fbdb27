"""Стационарный генетический алгоритм поиска перестановки водяного знака."""
import math
from typing import List, Optional, Set, Tuple

import numpy as np
from loguru import logger

from app.exceptions import GAConfigError
from app.ga.crossover import crossover_classical, crossover_x
from app.ga.individual import Individual
from app.ga.mutation import mutate, mutate_perm
from app.ga.selection import rank_population, select_parent
from app.models.images import BinaryWatermark
from app.models.schemas import CrossoverKind, GAConfig, MutationKind, RunStats

# Ограничение на число попыток собрать начальную популяцию без дубликатов
INIT_ATTEMPTS_PER_INDIVIDUAL = 100


def run_rng(seed: int, run_index: int = 0) -> np.random.Generator:
    """Независимый поток случайных чисел для запуска run_index."""
    return np.random.default_rng(np.random.SeedSequence([seed, run_index]))


class SteadyStateGA:
    """
    Стационарный ГА: за поколение два потомка скрещивания и один потомок мутации
    замещают худших особей.

    Обязанности:
    1. Начальная популяция из mu различных случайных перестановок
    2. Ранговая селекция родителей
    3. Политика «без дубликатов» (по белым множествам)
    4. Элитизм и сбор статистики
    """

    def __init__(
        self,
        original: BinaryWatermark,
        cfg: GAConfig,
        rng: Optional[np.random.Generator] = None
    ):
        k = original.white_count
        if k == 0 or k == original.size:
            raise GAConfigError("Watermark is all black or all white: there is nothing to permute")
        if math.comb(original.size, k) < cfg.pop_size:
            raise GAConfigError(
                f"Only {math.comb(original.size, k)} distinct white sets exist, "
                f"population of {cfg.pop_size} is impossible"
            )

        self.original = original
        self.cfg = cfg
        self.rng = rng if rng is not None else run_rng(cfg.rng_seed)
        self.population: List[Individual] = []
        self._births = 0

    def _stamp(self, ind: Individual) -> Individual:
        ind.birth = self._births
        self._births += 1
        return ind

    def initialize_population(self) -> List[Individual]:
        """Случайные перестановки с попарно различными белыми множествами."""
        seen: Set[bytes] = set()
        population: List[Individual] = []
        attempts = INIT_ATTEMPTS_PER_INDIVIDUAL * self.cfg.pop_size

        while len(population) < self.cfg.pop_size:
            if attempts == 0:
                raise GAConfigError("Could not draw a duplicate-free initial population")
            attempts -= 1

            ind = Individual.from_perm(self.original, self.rng.permutation(self.original.size))
            if ind.signature in seen:
                continue
            seen.add(ind.signature)
            population.append(self._stamp(ind))

        self.population = population
        return population

    def best(self) -> Individual:
        return rank_population(self.population)[-1]

    def _make_distinct(self, child: Individual, seen: Set[bytes]) -> Optional[Individual]:
        """Повторная SwM-мутация дубликата; None, если попытки исчерпаны."""
        retries = self.cfg.duplicate_retries
        while child.signature in seen:
            if retries == 0:
                return None
            retries -= 1
            child = Individual.from_perm(
                self.original, mutate_perm(MutationKind.SWM, child.perm, self.rng)
            )
        return child

    def _offspring(self, ranked: List[Individual]) -> List[Individual]:
        s = self.cfg.selection_pressure
        children: List[Individual] = []

        if self.cfg.crossover is CrossoverKind.X:
            for _ in range(2):
                p1 = select_parent(ranked, s, self.rng)
                p2 = select_parent(ranked, s, self.rng)
                fitter, other = (p1, p2) if p1.fitness <= p2.fitness else (p2, p1)
                children.append(crossover_x(self.original, fitter, other, self.rng))
        else:
            p1 = select_parent(ranked, s, self.rng)
            p2 = select_parent(ranked, s, self.rng)
            children.extend(crossover_classical(self.cfg.crossover, p1, p2, self.rng, self.original))

        parent = select_parent(ranked, s, self.rng)
        children.append(mutate(self.cfg.mutation, parent, self.rng, self.original))
        return children

    def step(self) -> int:
        """
        Одно поколение.

        Returns:
            Число принятых потомков (0..3)
        """
        ranked = rank_population(self.population)
        seen = {ind.signature for ind in ranked}

        accepted: List[Individual] = []
        for child in self._offspring(ranked):
            child = self._make_distinct(child, seen)
            if child is None:
                logger.debug("Offspring discarded after exhausting duplicate retries")
                continue
            seen.add(child.signature)
            accepted.append(self._stamp(child))

        # ranked упорядочена от худшей к лучшей
        self.population = ranked[len(accepted):] + accepted
        return len(accepted)

    def run(self) -> Tuple[Individual, RunStats]:
        """
        Полный запуск: инициализация и cfg.generations поколений.

        Returns:
            Кортеж (лучшая особь, RunStats)
        """
        self.initialize_population()
        history = [self.best().fitness]

        for generation in range(1, self.cfg.generations + 1):
            self.step()
            history.append(self.best().fitness)
            logger.debug(f"Generation {generation}: best NC={history[-1]:.4f}")

        best = self.best()
        found_at = next(i for i, value in enumerate(history) if value == history[-1])
        stats = RunStats(
            nc0=history[0],
            nc_final=history[-1],
            found_at=found_at,
            per_generation_best=history
        )
        return best, stats


def evolve(
    original: BinaryWatermark,
    cfg: GAConfig,
    rng: Optional[np.random.Generator] = None
) -> Tuple[Individual, RunStats]:
    """
    Поиск перестановки водяного знака с минимальной NC относительно исходного.

    Args:
        original: Исходный водяной знак (0 < k < m^2)
        cfg: Параметры ГА
        rng: Генератор; по умолчанию поток запуска 0 от cfg.rng_seed

    Returns:
        Кортеж (лучшая особь, статистика запуска)
    """
    logger.info(
        f"Evolving {cfg.crossover.value}+{cfg.mutation.value}: m={original.side}, "
        f"k={original.white_count}, mu={cfg.pop_size}, generations={cfg.generations}"
    )
    best, stats = SteadyStateGA(original, cfg, rng).run()
    logger.info(f"GA finished: NC {stats.nc0:.4f} -> {stats.nc_final:.4f} (found at {stats.found_at})")
    return best, stats
