"""Особь ГА: перестановка пикселей водяного знака и производные от нее данные."""
from typing import List

import numpy as np

from app.exceptions import DimensionMismatchError, PermutationError
from app.models.images import BinaryWatermark
from app.services.metrics_service import nc


def check_permutation(perm: np.ndarray, size: int) -> np.ndarray:
    """Проверка, что perm - биекция на {0..size-1}; возвращает int64-массив."""
    perm = np.asarray(perm)
    if perm.ndim != 1 or perm.shape[0] != size:
        raise DimensionMismatchError(f"Permutation length {perm.shape} does not match {size}")
    if perm.dtype.kind not in "iu":
        raise PermutationError("Permutation entries must be integers")
    perm = perm.astype(np.int64)
    if not np.array_equal(np.sort(perm), np.arange(size)):
        raise PermutationError("Permutation is not a bijection")
    return perm


def apply_permutation(w: BinaryWatermark, perm: np.ndarray) -> BinaryWatermark:
    """
    Перестановка пикселей водяного знака.

    Бит на плоской позиции perm[i] результата равен биту i исходного знака
    (индексы с нуля).
    """
    perm = check_permutation(perm, w.size)
    out = np.empty(w.size, dtype=np.uint8)
    out[perm] = w.flat
    return BinaryWatermark.from_flat(out, w.side)


def invert_permutation(w: BinaryWatermark, perm: np.ndarray) -> BinaryWatermark:
    """Обратное к apply_permutation: восстановление исходной ориентации."""
    perm = check_permutation(perm, w.size)
    return BinaryWatermark.from_flat(w.flat[perm], w.side)


class Individual:
    """
    Особь: перестановка (генотип), множество белых позиций и кэш приспособленности.

    Приспособленность - NC между переставленным и исходным знаком;
    чем меньше, тем лучше.
    """

    __slots__ = ("perm", "white_mask", "fitness", "birth")

    def __init__(self, perm: np.ndarray, white_mask: np.ndarray, fitness: float, birth: int = 0):
        self.perm = perm
        self.white_mask = white_mask
        self.fitness = fitness
        self.birth = birth

    @classmethod
    def from_perm(cls, original: BinaryWatermark, perm: np.ndarray, birth: int = 0) -> "Individual":
        permuted = apply_permutation(original, perm)
        perm = np.asarray(perm, dtype=np.int64)
        perm.setflags(write=False)
        white_mask = permuted.flat.astype(bool)
        white_mask.setflags(write=False)
        return cls(perm=perm, white_mask=white_mask, fitness=nc(original, permuted), birth=birth)

    @property
    def size(self) -> int:
        return int(self.perm.shape[0])

    @property
    def white_set(self) -> np.ndarray:
        """Отсортированные позиции белых пикселей после перестановки (с нуля)."""
        return np.flatnonzero(self.white_mask)

    @property
    def signature(self) -> bytes:
        """Ключ для политики «без дубликатов»: особи равны, если равны их белые множества."""
        return np.packbits(self.white_mask).tobytes()

    def perm_one_based(self) -> List[int]:
        return (self.perm + 1).tolist()

    def __repr__(self) -> str:
        return f"Individual(size={self.size}, fitness={self.fitness:.4f}, birth={self.birth})"


def fitness(original: BinaryWatermark, ind: Individual) -> float:
    """Пересчет приспособленности особи (NC с исходным знаком)."""
    if ind.size != original.size:
        raise DimensionMismatchError(f"Individual length {ind.size} does not match watermark {original.size}")
    return nc(original, apply_permutation(original, ind.perm))
