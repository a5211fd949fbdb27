"""Растровые представления: полутоновое изображение и бинарный водяной знак."""
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.models.schemas import Encoding


class GrayImage(BaseModel):
    """
    Полутоновое изображение в байтовой (0..255) или вещественной ([0, 1]) кодировке.

    Пиксели хранятся построчно, начало координат в левом верхнем углу.
    Массив пикселей доступен только для чтения.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray
    encoding: Encoding = Encoding.BYTE

    @model_validator(mode="before")
    @classmethod
    def _normalize_pixels(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        encoding = Encoding(data.get("encoding", Encoding.BYTE))
        pixels = np.asarray(data.get("pixels"))

        if pixels.ndim != 2 or pixels.size == 0:
            raise ValueError("GrayImage pixels must be a non-empty 2-D array")
        if not np.all(np.isfinite(pixels)):
            raise ValueError("GrayImage pixels must be finite")

        if encoding is Encoding.BYTE:
            if pixels.dtype.kind == "f" and not np.array_equal(pixels, np.round(pixels)):
                raise ValueError("byte-encoded pixels must be integers")
            if pixels.min() < 0 or pixels.max() > 255:
                raise ValueError("byte-encoded pixels must lie in 0..255")
            pixels = pixels.astype(np.uint8)
        else:
            pixels = pixels.astype(np.float64)
            if pixels.min() < 0.0 or pixels.max() > 1.0:
                raise ValueError("real-encoded pixels must lie in [0, 1]")

        pixels = pixels.copy()
        pixels.setflags(write=False)
        return {**data, "pixels": pixels, "encoding": encoding}

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def is_square(self) -> bool:
        return self.height == self.width

    @property
    def range_max(self) -> float:
        """Максимальное значение пикселя: 255 или 1."""
        return 255.0 if self.encoding is Encoding.BYTE else 1.0

    def as_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.encoding is other.encoding and np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


class BinaryWatermark(BaseModel):
    """
    Бинарный водяной знак m x m: 0 = черный, 1 = белый.

    Инвариант 0 < k < m^2 проверяется там, где он нужен
    (загрузка исходного знака, ГА); извлеченный знак может быть вырожденным.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _normalize_bits(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        bits = np.asarray(data.get("bits"))
        if bits.ndim != 2 or bits.size == 0:
            raise ValueError("watermark bits must be a non-empty 2-D array")
        if bits.shape[0] != bits.shape[1]:
            raise ValueError("watermark must be square")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("watermark bits must be 0 or 1")

        bits = bits.astype(np.uint8).copy()
        bits.setflags(write=False)
        return {**data, "bits": bits}

    @classmethod
    def from_flat(cls, flat: np.ndarray, side: int) -> "BinaryWatermark":
        return cls(bits=np.asarray(flat).reshape(side, side))

    @property
    def side(self) -> int:
        return int(self.bits.shape[0])

    @property
    def size(self) -> int:
        return int(self.bits.size)

    @property
    def flat(self) -> np.ndarray:
        return self.bits.ravel()

    @property
    def white_count(self) -> int:
        return int(self.bits.sum())

    @property
    def black_count(self) -> int:
        return self.size - self.white_count

    @property
    def white_positions(self) -> np.ndarray:
        """Отсортированные плоские индексы белых пикселей (с нуля)."""
        return np.flatnonzero(self.flat)

    @property
    def is_degenerate(self) -> bool:
        return self.white_count == 0 or self.white_count == self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryWatermark):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]
