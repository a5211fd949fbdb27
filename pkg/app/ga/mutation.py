"""Мутации перестановок: вставка, обмен, инверсия и перемешивание сегмента."""
from typing import Tuple

import numpy as np

from app.ga.individual import Individual
from app.models.images import BinaryWatermark
from app.models.schemas import MutationKind


def insert_mutation(perm: np.ndarray, i: int, j: int) -> np.ndarray:
    """InsM: элемент с позиции i удаляется и вставляется на позицию j."""
    genes = np.delete(perm, i)
    return np.insert(genes, j, perm[i]).astype(np.int64)


def swap_positions(perm: np.ndarray, i: int, j: int) -> np.ndarray:
    """SwM: обмен элементов на позициях i и j."""
    out = np.array(perm, dtype=np.int64)
    out[[i, j]] = out[[j, i]]
    return out


def invert_segment(perm: np.ndarray, i: int, j: int) -> np.ndarray:
    """InvM: разворот сегмента [i, j] (включительно)."""
    out = np.array(perm, dtype=np.int64)
    out[i:j + 1] = out[i:j + 1][::-1]
    return out


def scramble_segment(perm: np.ndarray, i: int, j: int, rng: np.random.Generator) -> np.ndarray:
    """ScM: случайное перемешивание сегмента [i, j] (включительно)."""
    out = np.array(perm, dtype=np.int64)
    out[i:j + 1] = rng.permutation(out[i:j + 1])
    return out


def _segment(n: int, rng: np.random.Generator) -> Tuple[int, int]:
    i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
    return i, j


def mutate_perm(kind: MutationKind, perm: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Применение мутации к массиву-перестановке (с нуля)."""
    kind = MutationKind(kind)
    n = perm.shape[0]
    if n < 2:
        return np.array(perm, dtype=np.int64)

    i, j = _segment(n, rng)
    if kind is MutationKind.INSM:
        # Направление вставки тоже случайно
        if rng.random() < 0.5:
            i, j = j, i
        return insert_mutation(perm, i, j)
    if kind is MutationKind.SWM:
        return swap_positions(perm, i, j)
    if kind is MutationKind.INVM:
        return invert_segment(perm, i, j)
    return scramble_segment(perm, i, j, rng)


def mutate(
    kind: MutationKind,
    ind: Individual,
    rng: np.random.Generator,
    original: BinaryWatermark
) -> Individual:
    """
    Мутация особи.

    Args:
        kind: InsM, SwM, InvM или ScM
        ind: Родитель
        rng: Генератор случайных чисел
        original: Исходный водяной знак (для вычисления приспособленности)

    Returns:
        Новая особь
    """
    return Individual.from_perm(original, mutate_perm(kind, ind.perm, rng))
