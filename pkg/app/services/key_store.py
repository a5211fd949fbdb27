"""Хранение ключа водяного знака (JSON) и экспорт перестановки (текст)."""
from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from app.exceptions import KeyFormatError, PermutationError
from app.ga.individual import check_permutation
from app.models.schemas import WatermarkKey

PathLike = Union[str, Path]


def save_key(key: WatermarkKey, path: PathLike) -> Path:
    """Запись ключа в UTF-8 JSON с фиксированным порядком полей."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(key.model_dump_json() + "\n", encoding="utf-8")
    logger.debug(f"Key saved to {path}")
    return path


def load_key(path: PathLike) -> WatermarkKey:
    """
    Чтение ключа.

    Отсутствующее поле perm означает тождественную перестановку.

    Raises:
        KeyFormatError: Файл не читается, поврежден или имеет другую версию
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise KeyFormatError(f"Cannot read key {path}: {e}") from e

    try:
        key = WatermarkKey.model_validate_json(raw)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise KeyFormatError(f"Invalid key {path}: {messages}") from e

    logger.debug(f"Key loaded from {path}: m={key.m}, n={key.n}, order={key.order}")
    return key


def save_permutation(perm: np.ndarray, m: int, path: PathLike) -> Path:
    """
    Экспорт перестановки: первая строка m, вторая - m^2 образов с единицы.

    Args:
        perm: Перестановка с нуля
        m: Сторона водяного знака
        path: Путь к файлу
    """
    perm = check_permutation(perm, m * m)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(f"{m}\n{' '.join(str(v) for v in (perm + 1).tolist())}\n", encoding="utf-8")
    return path


def load_permutation(path: PathLike) -> np.ndarray:
    """Чтение перестановки в формате save_permutation; возвращает массив с нуля."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").split("\n")
    try:
        m = int(lines[0].strip())
        values = np.array([int(v) for v in lines[1].split()], dtype=np.int64)
    except (IndexError, ValueError) as e:
        raise PermutationError(f"Malformed permutation file {path}: {e}") from e
    return check_permutation(values - 1, m * m)
