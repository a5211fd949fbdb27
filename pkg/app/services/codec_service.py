"""Встраивание и слепое извлечение водяного знака в расширенной области Адамара."""
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from app.config import settings
from app.exceptions import DimensionMismatchError
from app.ga.individual import check_permutation
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import EmbedParams, Encoding, WatermarkKey
from app.services.hadamard_service import HadamardMatrix, forward, inverse, matrix_for, select_order
from app.utils.image_io import to_byte_pixels


def default_b(order: int, encoding: Encoding = Encoding.BYTE) -> float:
    """
    Рекомендуемый параметр b.

    Для байтовых изображений t + 0.01 (порядок 4t), для вещественных - малое
    значение из настроек.
    """
    if Encoding(encoding) is Encoding.REAL:
        return settings.real_default_b
    return order / 4 + 0.01


def build_key(
    cover_side: int,
    wm_side: int,
    b: Optional[float] = None,
    order: Optional[int] = None,
    coeff_a: Optional[Tuple[int, int]] = None,
    coeff_b: Optional[Tuple[int, int]] = None,
    perm: Optional[np.ndarray] = None,
    rng_seed: Optional[int] = None,
    encoding: Encoding = Encoding.BYTE
) -> WatermarkKey:
    """
    Сборка ключа по размерам покрытия и знака.

    Args:
        cover_side: Сторона покрытия n
        wm_side: Сторона водяного знака m
        b: Параметр зазора (по умолчанию default_b)
        order: Порядок Адамара (по умолчанию settings.hadamard_order,
            а если он не задан - наибольший доступный 4t <= n // m)
        coeff_a: Позиция первого коэффициента (с единицы)
        coeff_b: Позиция второго коэффициента (с единицы)
        perm: Перестановка с нуля или None
        rng_seed: Зерно ГА, если перестановка найдена ГА
        encoding: Кодировка покрытия (для default_b)

    Returns:
        Проверенный WatermarkKey
    """
    block_side = cover_side // wm_side
    if block_side < 1:
        raise DimensionMismatchError(f"Watermark side {wm_side} exceeds cover side {cover_side}")
    if order is None:
        order = settings.hadamard_order or select_order(block_side)
    if b is None:
        b = default_b(order, encoding)

    perm_list = None
    if perm is not None:
        perm_list = (check_permutation(perm, wm_side * wm_side) + 1).tolist()

    try:
        key = WatermarkKey(
            m=wm_side,
            n=cover_side,
            order=order,
            block_side=block_side,
            b=b,
            coeff_a=coeff_a or settings.coeff_a_pos,
            coeff_b=coeff_b or settings.coeff_b_pos,
            perm=perm_list,
            rng_seed=rng_seed
        )
    except ValueError as e:
        raise DimensionMismatchError(f"Inconsistent key parameters: {e}") from e

    matrix_for(key.order)
    return key


# =============================================================================
# Coefficient update
# =============================================================================

def _update_coefficients(
    coeffs: np.ndarray,
    bits: np.ndarray,
    params: EmbedParams
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Правило обновления пары коэффициентов для стопки блоков (..., 4t, 4t).

    Returns:
        Кортеж (новые коэффициенты, маска измененных блоков)
    """
    coeffs = np.array(coeffs, dtype=np.float64)
    ra, ca = params.index_a
    rb, cb = params.index_b
    b1 = coeffs[..., ra, ca]
    b2 = coeffs[..., rb, cb]
    bits = np.asarray(bits).astype(bool)

    d = np.abs(b1 - b2) / 2.0
    zero = ~bits

    # Бит 0 требует b2 > b1, бит 1 - b1 > b2
    guard = (zero & (b2 <= b1)) | (bits & (b2 >= b1))
    sign = np.where(zero, 1.0, -1.0)

    new_b1 = np.where(guard, b1 - sign * (d + params.b), b1)
    new_b2 = np.where(guard, b2 + sign * (d + params.b), b2)

    if params.strict_margin:
        weak = ~guard & (np.abs(b2 - b1) < 2.0 * params.b)
        middle = (b1 + b2) / 2.0
        new_b1 = np.where(weak, middle - sign * params.b, new_b1)
        new_b2 = np.where(weak, middle + sign * params.b, new_b2)
        guard = guard | weak

    coeffs[..., ra, ca] = new_b1
    coeffs[..., rb, cb] = new_b2
    return coeffs, guard


def embed_block(
    block: np.ndarray,
    bit: int,
    params: EmbedParams,
    H: HadamardMatrix
) -> np.ndarray:
    """
    Встраивание одного бита в блок 4t x 4t.

    Args:
        block: Блок пикселей (вещественный)
        bit: 0 или 1
        params: Параметры встраивания
        H: Матрица Адамара порядка params.order

    Returns:
        Новый блок (без округления); при невыполненном условии - исходный
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    block = np.asarray(block, dtype=np.float64)
    coeffs, changed = _update_coefficients(forward(H, block), np.array(bit), params)
    if not bool(changed):
        return block.copy()
    return inverse(H, coeffs)


def extract_block(block: np.ndarray, params: EmbedParams, H: HadamardMatrix) -> int:
    """Бит блока: 0, если b2 > b1, иначе 1."""
    coeffs = forward(H, block)
    return int(_bits_from_coefficients(coeffs, params))


def _bits_from_coefficients(coeffs: np.ndarray, params: EmbedParams) -> np.ndarray:
    b1 = coeffs[..., params.index_a[0], params.index_a[1]]
    b2 = coeffs[..., params.index_b[0], params.index_b[1]]
    return np.where(b2 > b1, 0, 1).astype(np.uint8)


# =============================================================================
# Whole-image pipeline
# =============================================================================

def _check_geometry(img: GrayImage, key: WatermarkKey) -> None:
    if not img.is_square:
        raise DimensionMismatchError(f"Cover must be square, got {img.width}x{img.height}")
    if img.height != key.n:
        raise DimensionMismatchError(f"Key expects a {key.n}x{key.n} image, got {img.width}x{img.height}")


def _blocks(pixels: np.ndarray, key: WatermarkKey) -> np.ndarray:
    """Стопка (m^2, bs, bs) блоков в построчном порядке (копия)."""
    m, bs = key.m, key.block_side
    region = pixels[:m * bs, :m * bs].astype(np.float64)
    return region.reshape(m, bs, m, bs).transpose(0, 2, 1, 3).reshape(m * m, bs, bs).copy()


def _unblocks(blocks: np.ndarray, key: WatermarkKey) -> np.ndarray:
    m, bs = key.m, key.block_side
    return blocks.reshape(m, m, bs, bs).transpose(0, 2, 1, 3).reshape(m * bs, m * bs)


def embed(
    cover: GrayImage,
    wm: BinaryWatermark,
    key: WatermarkKey,
    strict_margin: Optional[bool] = None
) -> GrayImage:
    """
    Встраивание водяного знака в покрытие.

    Подблок 4t x 4t берется в левом верхнем углу каждого блока floor(n/m);
    пиксели вне подблоков не меняются.

    Args:
        cover: Покрытие n x n
        wm: Водяной знак m x m (уже переставленный, если key.perm задана)
        key: Ключ встраивания
        strict_margin: Режим строгого зазора (по умолчанию из настроек)

    Returns:
        Изображение с водяным знаком в той же кодировке
    """
    _check_geometry(cover, key)
    if wm.side != key.m:
        raise DimensionMismatchError(f"Key expects a {key.m}x{key.m} watermark, got {wm.side}x{wm.side}")

    params = key.params.model_copy(update={
        "strict_margin": settings.strict_margin if strict_margin is None else strict_margin
    })
    H = matrix_for(key.order)
    o = key.order

    blocks = _blocks(cover.pixels, key)
    sub = blocks[:, :o, :o]
    coeffs, changed = _update_coefficients(forward(H, sub), wm.flat, params)
    blocks[:, :o, :o] = np.where(changed[:, None, None], inverse(H, coeffs), sub)

    region = _unblocks(blocks, key)
    if cover.encoding is Encoding.BYTE:
        region = to_byte_pixels(region)
    else:
        region = np.clip(region, 0.0, 1.0)

    pixels = np.array(cover.pixels)
    size = key.m * key.block_side
    pixels[:size, :size] = region

    logger.debug(f"Embedded {wm.size} bits, {int(changed.sum())} blocks updated (b={params.b})")
    return GrayImage(pixels=pixels, encoding=cover.encoding)


def extract(img: GrayImage, key: WatermarkKey) -> BinaryWatermark:
    """
    Слепое извлечение: нужны только изображение и ключ.

    При заданной в ключе перестановке восстанавливается исходная ориентация знака.
    """
    _check_geometry(img, key)
    H = matrix_for(key.order)
    o = key.order

    coeffs = forward(H, _blocks(img.pixels, key)[:, :o, :o])
    bits = _bits_from_coefficients(coeffs, key.params)

    perm = key.perm_array()
    if perm is not None:
        bits = bits[perm]
    return BinaryWatermark.from_flat(bits, key.m)
