"""Матрицы Адамара и расширенное блочное преобразование Адамара."""
from functools import lru_cache
from typing import Any, Dict, Iterable, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import hadamard

from app.exceptions import DimensionMismatchError


class HadamardMatrix(BaseModel):
    """
    Нормализованная матрица Адамара порядка 4t (или 1, 2 для базы рекурсии).

    Инварианты проверяются при создании: H H^T == order * I в целых числах,
    первая строка и первый столбец состоят из +1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _check_entries(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        entries = np.asarray(data.get("entries"))
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.size == 0:
            raise ValueError("Hadamard matrix must be square and non-empty")
        if not np.all(np.abs(entries) == 1):
            raise ValueError("Hadamard entries must be +1 or -1")

        entries = entries.astype(np.int64)
        order = entries.shape[0]
        if not np.array_equal(entries @ entries.T, order * np.eye(order, dtype=np.int64)):
            raise ValueError("rows are not pairwise orthogonal")
        if not (np.all(entries[0] == 1) and np.all(entries[:, 0] == 1)):
            raise ValueError("Hadamard matrix is not normalized")

        entries = entries.copy()
        entries.setflags(write=False)
        return {**data, "entries": entries}

    @classmethod
    def from_entries(cls, entries: np.ndarray) -> "HadamardMatrix":
        """Проверка и обертка матрицы, построенной другим способом (например, Пэли)."""
        return cls(entries=entries)

    @property
    def order(self) -> int:
        return int(self.entries.shape[0])

    def as_float(self) -> np.ndarray:
        return self.entries.astype(np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HadamardMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


@lru_cache(maxsize=None)
def sylvester(order: int) -> HadamardMatrix:
    """
    Конструкция Сильвестра H_2n = [[H_n, H_n], [H_n, -H_n]], H_1 = [1].

    Args:
        order: Степень двойки >= 1

    Returns:
        HadamardMatrix указанного порядка
    """
    if not isinstance(order, (int, np.integer)) or not _is_power_of_two(int(order)):
        raise ValueError(f"Sylvester order must be a power of two, got {order}")
    return HadamardMatrix(entries=hadamard(int(order), dtype=np.int64))


# Матрицы, построенные не по Сильвестру (например, Пэли), по порядку
_registry: Dict[int, HadamardMatrix] = {}


def register_hadamard(H: HadamardMatrix) -> None:
    """
    Регистрация матрицы для порядка, которого нет у Сильвестра.

    Зарегистрированный порядок участвует в select_order и используется
    кодеком при встраивании и извлечении.
    """
    if H.order % 4 != 0:
        raise DimensionMismatchError(f"Only orders 4t can carry a watermark, got {H.order}")
    _registry[H.order] = H
    logger.info(f"Registered Hadamard matrix of order {H.order}")


def unregister_hadamard(order: int) -> None:
    """Удаление зарегистрированной матрицы (отсутствующий порядок игнорируется)."""
    _registry.pop(order, None)


def matrix_for(order: int) -> HadamardMatrix:
    """
    Матрица Адамара для порядка ключа.

    Args:
        order: Порядок 4t

    Returns:
        Зарегистрированная матрица, иначе матрица Сильвестра

    Raises:
        DimensionMismatchError: Порядок не степень двойки и не зарегистрирован
    """
    if order in _registry:
        return _registry[order]
    if _is_power_of_two(order):
        return sylvester(order)
    raise DimensionMismatchError(
        f"No Hadamard matrix of order {order} is available; register one with register_hadamard"
    )


def available_orders(limit: int) -> list[int]:
    """Порядки 4t (Сильвестра и зарегистрированные), не превосходящие limit."""
    orders = {o for o in _registry if o <= limit}
    order = 4
    while order <= limit:
        orders.add(order)
        order *= 2
    return sorted(orders)


def select_order(block_side: int, available: Optional[Iterable[int]] = None) -> int:
    """
    Выбор наибольшего доступного порядка 4t, помещающегося в блок.

    Args:
        block_side: Сторона блока floor(n/m)
        available: Доступные порядки (по умолчанию available_orders)

    Returns:
        Порядок 4t <= block_side
    """
    candidates = sorted(
        o for o in (available if available is not None else available_orders(block_side))
        if o % 4 == 0 and o <= block_side
    )
    if not candidates:
        raise ValueError(f"No Hadamard order 4t <= {block_side} is available")
    return candidates[-1]


def _check_shape(H: HadamardMatrix, block: np.ndarray) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.shape[-2:] != (H.order, H.order):
        raise DimensionMismatchError(
            f"Block shape {block.shape[-2:]} does not match Hadamard order {H.order}"
        )
    return block


def forward(H: HadamardMatrix, block: np.ndarray) -> np.ndarray:
    """
    Прямое расширенное преобразование B = H A H^T / 4t.

    Принимает один блок (4t, 4t) или стопку блоков (..., 4t, 4t).
    """
    block = _check_shape(H, block)
    h = H.as_float()
    return h @ block @ h.T / H.order


def inverse(H: HadamardMatrix, coeffs: np.ndarray) -> np.ndarray:
    """Обратное преобразование A = H^T B H / 4t; форма как у forward."""
    coeffs = _check_shape(H, coeffs)
    h = H.as_float()
    return h.T @ coeffs @ h / H.order
