"""Метрики качества: MSE, PSNR и нормализованная корреляция."""
import math
from typing import Optional

import numpy as np

from app.exceptions import DimensionMismatchError, UndefinedNCError
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import QualityReport


def _check_pair(a: GrayImage, b: GrayImage) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatchError(f"Image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    if a.encoding is not b.encoding:
        raise DimensionMismatchError(
            f"Image encodings differ: {a.encoding.value} vs {b.encoding.value}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    """Среднеквадратичная ошибка двух изображений одного размера и кодировки."""
    _check_pair(a, b)
    diff = a.as_float() - b.as_float()
    return float(np.mean(diff * diff))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """
    PSNR = 10 log10(range^2 / MSE), range = 255 или 1.

    Returns:
        Значение в дБ; +inf для совпадающих изображений
    """
    error = mse(a, b)
    if error == 0.0:
        return math.inf
    return float(10.0 * math.log10(a.range_max ** 2 / error))


def nc(w: BinaryWatermark, ew: BinaryWatermark) -> float:
    """
    Нормализованная корреляция исходного и извлеченного водяных знаков.

    Для бинарных знаков равна |white(w) & white(ew)| / sqrt(k_w * k_ew).
    """
    if w.bits.shape != ew.bits.shape:
        raise DimensionMismatchError(f"Watermark shapes differ: {w.bits.shape} vs {ew.bits.shape}")

    k_w = w.white_count
    k_ew = ew.white_count
    if k_w == 0 or k_ew == 0:
        raise UndefinedNCError("NC is undefined for an all-black watermark")

    overlap = int(np.count_nonzero(w.flat & ew.flat))
    return overlap / math.sqrt(k_w * k_ew)


def quality_report(
    cover: GrayImage,
    marked: GrayImage,
    wm: Optional[BinaryWatermark] = None,
    extracted: Optional[BinaryWatermark] = None
) -> QualityReport:
    """Сводка MSE/PSNR и (при наличии знаков) NC."""
    correlation = nc(wm, extracted) if wm is not None and extracted is not None else None
    return QualityReport(mse=mse(cover, marked), psnr=psnr(cover, marked), nc=correlation)
