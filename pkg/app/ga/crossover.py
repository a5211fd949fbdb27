"""Операторы скрещивания: X (по белым множествам) и классические OX, PMX, CX, ER."""
import math
from typing import Optional, Tuple

import numpy as np

from app.exceptions import DimensionMismatchError
from app.ga.individual import Individual
from app.models.images import BinaryWatermark
from app.models.schemas import CrossoverKind


# =============================================================================
# Crossover X
# =============================================================================

def perm_for_white_set(original: BinaryWatermark, white_set: np.ndarray) -> np.ndarray:
    """
    Каноническая перестановка, переводящая белые пиксели исходника в white_set.

    Белые позиции исходника (по возрастанию) -> white_set (по возрастанию),
    черные -> дополнение (по возрастанию).
    """
    size = original.size
    target_mask = np.zeros(size, dtype=bool)
    target_mask[white_set] = True

    perm = np.empty(size, dtype=np.int64)
    source_mask = original.flat.astype(bool)
    perm[np.flatnonzero(source_mask)] = np.flatnonzero(target_mask)
    perm[np.flatnonzero(~source_mask)] = np.flatnonzero(~target_mask)
    return perm


def sample_white_set(
    s1: np.ndarray,
    s2: np.ndarray,
    size: int,
    rng: np.random.Generator,
    r: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Выборка белого множества потомка.

    Returns:
        Кортеж (S, child) где S - floor(k*r)-подмножество s1, а child = S + T,
        T - (k - |S|)-подмножество s2 \\ S (с добором вне s1 | s2 при нехватке)
    """
    k = s1.shape[0]
    take = int(math.floor(k * r))

    s = np.sort(rng.choice(s1, size=take, replace=False)) if take else np.empty(0, dtype=np.int64)
    need = k - take

    pool = np.setdiff1d(s2, s, assume_unique=True)
    if pool.shape[0] >= need:
        t = rng.choice(pool, size=need, replace=False) if need else np.empty(0, dtype=np.int64)
    else:
        deficit = need - pool.shape[0]
        outside = np.setdiff1d(np.arange(size), np.union1d(s1, s2), assume_unique=True)
        t = np.concatenate([pool, rng.choice(outside, size=deficit, replace=False)])

    child = np.sort(np.concatenate([s, t]).astype(np.int64))
    return s, child


def crossover_x(
    original: BinaryWatermark,
    fitter: Individual,
    other: Individual,
    rng: np.random.Generator,
    r: Optional[float] = None
) -> Individual:
    """
    Скрещивание X: floor(k*r) белых позиций от более приспособленного родителя,
    остальные - случайно из белых позиций второго родителя.

    Args:
        original: Исходный водяной знак
        fitter: Родитель с меньшей (лучшей) NC
        other: Второй родитель
        rng: Генератор случайных чисел
        r: Доля от первого родителя; по умолчанию U[0.5, 1]

    Returns:
        Одна особь-потомок
    """
    if fitter.size != other.size or fitter.size != original.size:
        raise DimensionMismatchError("Parents and watermark must have the same length")

    s1 = fitter.white_set
    s2 = other.white_set
    if s1.shape[0] != s2.shape[0]:
        raise DimensionMismatchError("Parents have different white counts")

    if r is None:
        r = float(rng.uniform(0.5, 1.0))

    _, child_set = sample_white_set(s1, s2, original.size, rng, r)
    return Individual.from_perm(original, perm_for_white_set(original, child_set))


# =============================================================================
# Classical permutation crossovers (0-based permutations)
# =============================================================================

def _cut_points(n: int, rng: np.random.Generator) -> Tuple[int, int]:
    a, b = sorted(rng.choice(n + 1, size=2, replace=False).tolist())
    return a, b


def order_crossover(p1: np.ndarray, p2: np.ndarray, a: int, b: int) -> np.ndarray:
    """OX: сегмент [a, b) от p1, остальное в порядке p2 начиная с позиции b."""
    n = p1.shape[0]
    child = np.empty(n, dtype=np.int64)
    child[a:b] = p1[a:b]

    in_segment = np.zeros(n, dtype=bool)
    in_segment[p1[a:b]] = True

    order = np.concatenate([p2[b:], p2[:b]])
    fill = order[~in_segment[order]]
    positions = np.concatenate([np.arange(b, n), np.arange(0, a)])
    child[positions] = fill
    return child


def partially_mapped_crossover(p1: np.ndarray, p2: np.ndarray, a: int, b: int) -> np.ndarray:
    """PMX: сегмент [a, b) от p1, вытесненные гены p2 размещаются по цепочке отображения."""
    n = p1.shape[0]
    child = p2.astype(np.int64).copy()
    child[a:b] = p1[a:b]

    pos_in_p2 = np.empty(n, dtype=np.int64)
    pos_in_p2[p2] = np.arange(n)
    in_segment = np.zeros(n, dtype=bool)
    in_segment[p1[a:b]] = True

    for i in range(a, b):
        gene = int(p2[i])
        if in_segment[gene]:
            continue
        j = i
        while a <= j < b:
            j = int(pos_in_p2[p1[j]])
        child[j] = gene
    return child


def cycle_crossover(p1: np.ndarray, p2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """CX: нечетные циклы (первый, третий, ...) от своего родителя, четные - от другого."""
    n = p1.shape[0]
    pos_in_p1 = np.empty(n, dtype=np.int64)
    pos_in_p1[p1] = np.arange(n)

    child1 = p1.astype(np.int64).copy()
    child2 = p2.astype(np.int64).copy()
    visited = np.zeros(n, dtype=bool)

    cycle_index = 0
    for start in range(n):
        if visited[start]:
            continue
        cycle = []
        idx = start
        while not visited[idx]:
            visited[idx] = True
            cycle.append(idx)
            idx = int(pos_in_p1[p2[idx]])
        if cycle_index % 2 == 1:
            child1[cycle] = p2[cycle]
            child2[cycle] = p1[cycle]
        cycle_index += 1
    return child1, child2


def edge_recombination(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    ER: построение потомка по объединенной таблице смежности (циклической).

    Следующим берется сосед с наименьшим числом оставшихся ребер,
    при равенстве - случайный; при тупике - случайный непосещенный ген.
    """
    n = p1.shape[0]
    neighbors = [set() for _ in range(n)]
    for parent in (p1, p2):
        genes = parent.tolist()
        for left, gene, right in zip(np.roll(parent, 1).tolist(), genes, np.roll(parent, -1).tolist()):
            neighbors[gene].update((left, right))
    for gene in range(n):
        neighbors[gene].discard(gene)

    remaining = set(range(n))
    current = int(p1[0]) if rng.random() < 0.5 else int(p2[0])
    child = [current]

    while len(child) < n:
        remaining.discard(current)
        for gene in neighbors[current]:
            neighbors[gene].discard(current)

        candidates = neighbors[current]
        if candidates:
            fewest = min(len(neighbors[g]) for g in candidates)
            options = sorted(g for g in candidates if len(neighbors[g]) == fewest)
        else:
            options = sorted(remaining)
        current = options[int(rng.integers(len(options)))]
        child.append(current)

    return np.asarray(child, dtype=np.int64)


def crossover_classical(
    kind: CrossoverKind,
    p1: Individual,
    p2: Individual,
    rng: np.random.Generator,
    original: BinaryWatermark
) -> Tuple[Individual, Individual]:
    """
    Классическое скрещивание перестановок.

    Args:
        kind: OX, PMX, CX или ER
        p1: Первый родитель
        p2: Второй родитель
        rng: Генератор случайных чисел
        original: Исходный водяной знак (для вычисления приспособленности)

    Returns:
        Два потомка; для ER единственный потомок продублирован
    """
    kind = CrossoverKind(kind)
    if p1.size != p2.size:
        raise DimensionMismatchError(f"Parent lengths differ: {p1.size} vs {p2.size}")

    a_perm, b_perm = p1.perm, p2.perm

    if kind is CrossoverKind.OX:
        a, b = _cut_points(p1.size, rng)
        children = (order_crossover(a_perm, b_perm, a, b), order_crossover(b_perm, a_perm, a, b))
    elif kind is CrossoverKind.PMX:
        a, b = _cut_points(p1.size, rng)
        children = (
            partially_mapped_crossover(a_perm, b_perm, a, b),
            partially_mapped_crossover(b_perm, a_perm, a, b)
        )
    elif kind is CrossoverKind.CX:
        children = cycle_crossover(a_perm, b_perm)
    elif kind is CrossoverKind.ER:
        child = edge_recombination(a_perm, b_perm, rng)
        children = (child, child.copy())
    else:
        raise ValueError(f"Unsupported classical crossover: {kind.value}")

    return (
        Individual.from_perm(original, children[0]),
        Individual.from_perm(original, children[1])
    )
