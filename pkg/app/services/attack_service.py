"""Атаки на изображение с водяным знаком и отчет об устойчивости."""
import io
import math
from typing import Any, List, Optional, Sequence

import numpy as np
import pandas as pd
from PIL import Image
from loguru import logger
from pydantic import ValidationError

from app.config import settings
from app.exceptions import AttackParameterError, ImageFormatError, UndefinedNCError
from app.ga.individual import apply_permutation
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import (
    AttackKind,
    AttackSpec,
    Encoding,
    NoiseScale,
    RobustnessRow,
    WatermarkKey
)
from app.services.codec_service import embed, extract
from app.services.metrics_service import nc, psnr
from app.utils.formatting import format_number
from app.utils.image_io import to_byte_pixels

ROBUSTNESS_COLUMNS = ["attack", "param", "psnr", "nc"]


def make_spec(kind: str, **params: Any) -> AttackSpec:
    """Создание AttackSpec с переводом ошибок валидации в AttackParameterError."""
    try:
        return AttackSpec(kind=kind, **params)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise AttackParameterError(f"Invalid {kind} attack: {messages}") from e


def _jpeg(img: GrayImage, quality: int) -> np.ndarray:
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(buffer, format="JPEG", quality=quality)
    buffer.seek(0)
    with Image.open(buffer) as decoded:
        return np.array(decoded.convert("L"), dtype=np.uint8)


def _gaussian(
    img: GrayImage,
    mean: float,
    variance: float,
    scale: NoiseScale,
    rng: np.random.Generator
) -> np.ndarray:
    """
    Аддитивный гауссов шум с округлением и отсечением в [0, 255].

    В шкале UNIT среднее и дисперсия относятся к яркости в [0, 1],
    в шкале BYTE - к уровням серого 0..255.
    """
    factor = 255.0 if scale is NoiseScale.UNIT else 1.0
    noise = rng.normal(loc=factor * mean, scale=factor * math.sqrt(variance), size=img.pixels.shape)
    return to_byte_pixels(img.as_float() + noise)


def _salt_pepper(img: GrayImage, density: float, rng: np.random.Generator) -> np.ndarray:
    pixels = np.array(img.pixels)
    count = int(math.floor(density * pixels.size))
    positions = rng.choice(pixels.size, size=count, replace=False)
    values = np.where(rng.random(count) < 0.5, 0, 255).astype(np.uint8)
    pixels.reshape(-1)[positions] = values
    return pixels


def attack(img: GrayImage, spec: AttackSpec) -> GrayImage:
    """
    Применение атаки к байтовому изображению.

    Шкала гауссова шума берется из spec.noise_scale, а если она не задана -
    из settings.gaussian_scale.

    Args:
        img: Изображение в байтовой кодировке
        spec: Вид и параметры атаки

    Returns:
        Атакованное изображение (байтовое)
    """
    if img.encoding is not Encoding.BYTE:
        raise ImageFormatError("Attacks operate on byte-encoded images")

    seed = spec.rng_seed if spec.rng_seed is not None else settings.default_seed
    rng = np.random.default_rng(seed)

    if spec.kind is AttackKind.NONE:
        return img
    if spec.kind is AttackKind.JPEG:
        pixels = _jpeg(img, spec.quality)
    elif spec.kind is AttackKind.GAUSSIAN:
        scale = spec.noise_scale or NoiseScale(settings.gaussian_scale)
        pixels = _gaussian(img, spec.mean, spec.variance, scale, rng)
    elif spec.kind is AttackKind.SALT_PEPPER:
        pixels = _salt_pepper(img, spec.density, rng)
    else:
        raise AttackParameterError(f"Unknown attack kind: {spec.kind}")

    logger.debug(f"Applied {spec.label} attack ({spec.param})")
    return GrayImage(pixels=pixels, encoding=Encoding.BYTE)


def robustness_report(
    cover: GrayImage,
    wm: BinaryWatermark,
    key: WatermarkKey,
    specs: Sequence[AttackSpec],
    marked: Optional[GrayImage] = None
) -> List[RobustnessRow]:
    """
    PSNR атакованного изображения и NC извлеченного знака для каждой атаки.

    Args:
        cover: Покрытие
        wm: Исходный (непереставленный) водяной знак
        key: Ключ; перестановка ключа применяется перед встраиванием
        specs: Список атак
        marked: Уже встроенное изображение (если нет - встраивается здесь)

    Returns:
        Строки отчета в порядке specs
    """
    if not specs:
        return []

    if marked is None:
        perm = key.perm_array()
        payload = apply_permutation(wm, perm) if perm is not None else wm
        marked = embed(cover, payload, key)

    rows: List[RobustnessRow] = []
    for spec in specs:
        attacked = attack(marked, spec)
        try:
            correlation = nc(wm, extract(attacked, key))
        except UndefinedNCError:
            logger.warning(f"NC undefined after {spec.label} attack: extracted mark is all black")
            correlation = math.nan
        rows.append(RobustnessRow(
            attack=spec.label,
            param=spec.param,
            psnr=psnr(cover, attacked),
            nc=correlation
        ))
        logger.info(f"{spec.label}: PSNR={rows[-1].psnr:.4f} NC={correlation:.4f}")
    return rows


def robustness_frame(rows: Sequence[RobustnessRow]) -> pd.DataFrame:
    """Таблица attack,param,psnr,nc с отформатированными числами."""
    return pd.DataFrame(
        [
            {
                "attack": row.attack,
                "param": row.param,
                "psnr": format_number(row.psnr),
                "nc": format_number(row.nc)
            }
            for row in rows
        ],
        columns=ROBUSTNESS_COLUMNS
    )
