"""Синтетические покрытия и водяные знаки для экспериментов и тестов."""
import numpy as np
from scipy.ndimage import gaussian_filter

from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import Encoding
from app.utils.image_io import to_byte_pixels

COVER_LOW = 16
COVER_HIGH = 239


def synthetic_watermark(side: int, density: float, seed: int) -> BinaryWatermark:
    """
    Случайный водяной знак с заданной долей белых пикселей.

    Число белых k = round(density * side^2), ограниченное отрезком [1, side^2 - 1].
    """
    if side < 2:
        raise ValueError("Watermark side must be at least 2")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")

    size = side * side
    k = int(np.clip(round(density * size), 1, size - 1))
    rng = np.random.default_rng(seed)
    flat = np.zeros(size, dtype=np.uint8)
    flat[rng.choice(size, size=k, replace=False)] = 1
    return BinaryWatermark.from_flat(flat, side)


def synthetic_cover(side: int, seed: int, texture: float = 6.0) -> GrayImage:
    """
    Гладкое текстурированное байтовое изображение в диапазоне [16, 239].

    Args:
        side: Сторона изображения
        seed: Зерно генератора
        texture: Амплитуда мелкой текстуры (в уровнях яркости)

    Returns:
        GrayImage в байтовой кодировке
    """
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:side, 0:side] / max(side - 1, 1)

    base = 0.5 + 0.25 * np.sin(2 * np.pi * (1.5 * x + 0.5 * y)) * np.cos(2 * np.pi * y)
    smooth = gaussian_filter(rng.normal(size=(side, side)), sigma=max(side / 32, 1.0))
    smooth /= max(float(np.abs(smooth).max()), 1e-12)

    values = np.clip(base + 0.2 * smooth, 0.0, 1.0)
    pixels = COVER_LOW + (COVER_HIGH - COVER_LOW) * values
    pixels = pixels + rng.uniform(-texture, texture, size=(side, side))
    pixels = np.clip(to_byte_pixels(pixels), COVER_LOW, COVER_HIGH)
    return GrayImage(pixels=pixels, encoding=Encoding.BYTE)
