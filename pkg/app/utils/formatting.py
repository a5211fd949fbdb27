"""Форматирование чисел и запись таблиц результатов."""
import math
from pathlib import Path
from typing import Union

import pandas as pd
from loguru import logger


def format_number(value: float) -> str:
    """
    Текстовое представление числа для таблиц.

    +inf -> "inf", NaN -> "nan", целые значения без ".0",
    остальные - кратчайшее точное представление.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value.is_integer():
        return str(int(value))
    return repr(value)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Запись таблицы в CSV без индекса (создает каталог при необходимости)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Table written to {path} ({len(frame)} rows)")
    return path
