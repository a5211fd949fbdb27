"""Ранговая селекция с линейным ранжированием."""
from typing import List, Sequence

import numpy as np

from app.ga.individual import Individual


def linear_ranking_probabilities(mu: int, s: float) -> np.ndarray:
    """
    Вероятности выбора по рангам 1..mu (ранг mu - лучшая особь).

    P_i = (2 - s)/mu + 2(i - 1)(s - 1)/(mu(mu - 1))
    """
    if mu < 2:
        raise ValueError("Linear ranking needs at least two individuals")
    if not 1.0 <= s <= 2.0:
        raise ValueError(f"Selection pressure must lie in [1, 2], got {s}")
    ranks = np.arange(1, mu + 1, dtype=np.float64)
    return (2.0 - s) / mu + 2.0 * (ranks - 1.0) * (s - 1.0) / (mu * (mu - 1.0))


def rank_population(population: Sequence[Individual]) -> List[Individual]:
    """
    Сортировка от худшей (ранг 1) к лучшей (ранг mu).

    Худшая особь - с наибольшей NC; при равенстве раньше идет более старая.
    """
    return sorted(population, key=lambda ind: (-ind.fitness, ind.birth))


def select_parent(
    ranked_population: Sequence[Individual],
    s: float,
    rng: np.random.Generator
) -> Individual:
    """Выбор родителя; ranked_population упорядочена функцией rank_population."""
    probabilities = linear_ranking_probabilities(len(ranked_population), s)
    index = rng.choice(len(ranked_population), p=probabilities)
    return ranked_population[int(index)]
