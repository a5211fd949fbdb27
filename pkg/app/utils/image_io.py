"""Чтение и запись изображений и водяных знаков (PGM/PBM/PNG)."""
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError
from loguru import logger

from app.exceptions import DimensionMismatchError, ImageFormatError
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import Encoding

PathLike = Union[str, Path]

# Порог бинаризации полутонового водяного знака
WATERMARK_THRESHOLD = 128


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Округление половин от нуля (np.round округляет к четному)."""
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def to_byte_pixels(values: np.ndarray) -> np.ndarray:
    """Округление и обрезка вещественного массива в диапазон 0..255."""
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


def _read_netpbm_header(path: Path) -> Tuple[bytes, int]:
    """
    Чтение магического числа и maxval из заголовка Netpbm.

    Returns:
        Кортеж (magic, maxval); для P1/P4 maxval равен 1
    """
    with open(path, "rb") as f:
        head = f.read(512)

    tokens = []
    for line in head.split(b"\n"):
        line = line.split(b"#", 1)[0]
        tokens.extend(line.split())
        if len(tokens) >= 4:
            break

    magic = tokens[0] if tokens else b""
    if magic in (b"P1", b"P4"):
        return magic, 1
    if len(tokens) < 4:
        raise ImageFormatError(f"Truncated Netpbm header in {path}")
    return magic, int(tokens[3])


def _open_image(path: PathLike) -> Tuple[Path, Image.Image]:
    path = Path(path)
    if not path.exists():
        raise ImageFormatError(f"File not found: {path}")
    try:
        img = Image.open(path)
        img.load()
    except (UnidentifiedImageError, OSError) as e:
        raise ImageFormatError(f"Cannot read image {path}: {e}") from e
    return path, img


def load_gray(path: PathLike) -> GrayImage:
    """
    Загрузка 8-битного полутонового изображения.

    Args:
        path: Путь к файлу P5 PGM (maxval 255) или 8-битному PNG

    Returns:
        GrayImage в байтовой кодировке
    """
    path = Path(path)
    if path.is_file():
        with open(path, "rb") as f:
            signature = f.read(2)
        if signature[:1] == b"P" and signature[1:2].isdigit():
            magic, maxval = _read_netpbm_header(path)
            if magic not in (b"P2", b"P5"):
                raise ImageFormatError(f"Not a grayscale PGM file: {path}")
            if maxval != 255:
                raise ImageFormatError(f"unsupported depth: maxval {maxval} (expected 255)")

    path, img = _open_image(path)
    if img.mode in ("I", "I;16", "I;16B", "I;16L", "I;16N"):
        raise ImageFormatError(f"unsupported depth: {path} is a 16-bit image")
    if img.mode != "L":
        raise ImageFormatError(f"Image {path} is not 8-bit grayscale (mode {img.mode})")

    pixels = np.array(img, dtype=np.uint8)
    logger.debug(f"Loaded {path.name}: {pixels.shape[1]}x{pixels.shape[0]}")
    return GrayImage(pixels=pixels, encoding=Encoding.BYTE)


def save_gray(img: GrayImage, path: PathLike) -> None:
    """Запись байтового изображения в P5 PGM."""
    if img.encoding is not Encoding.BYTE:
        raise ImageFormatError("Only byte-encoded images can be saved; convert the encoding first")

    path = Path(path)
    try:
        Image.fromarray(np.ascontiguousarray(img.pixels)).save(path, format="PPM")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise

    logger.debug(f"Saved {path.name}")


def load_watermark(path: PathLike) -> BinaryWatermark:
    """
    Загрузка бинарного водяного знака.

    PBM читается как есть, полутоновые изображения бинаризуются порогом 128
    (пиксель >= 128 -> белый).

    Args:
        path: Путь к P4 PBM, PGM или полутоновому PNG

    Returns:
        BinaryWatermark
    """
    path, img = _open_image(path)

    if img.mode == "1":
        bits = np.array(img, dtype=bool).astype(np.uint8)
    elif img.mode == "L":
        bits = (np.array(img, dtype=np.uint8) >= WATERMARK_THRESHOLD).astype(np.uint8)
    else:
        raise ImageFormatError(f"Watermark {path} must be bilevel or 8-bit grayscale (mode {img.mode})")

    if bits.shape[0] != bits.shape[1]:
        raise DimensionMismatchError(
            f"watermark must be square, got {bits.shape[1]}x{bits.shape[0]}"
        )

    wm = BinaryWatermark(bits=bits)
    if wm.is_degenerate:
        logger.warning(f"Watermark {path.name} is all black or all white")
    logger.debug(f"Loaded watermark {path.name}: m={wm.side}, k={wm.white_count}")
    return wm


def save_watermark(wm: BinaryWatermark, path: PathLike) -> None:
    """Запись водяного знака в P4 PBM."""
    path = Path(path)
    gray = Image.fromarray((wm.bits * 255).astype(np.uint8))
    gray.convert("1", dither=Image.Dither.NONE).save(path, format="PPM")
    logger.debug(f"Saved watermark {path.name}")


def convert_encoding(img: GrayImage, target: Encoding) -> GrayImage:
    """
    Перевод изображения между байтовой и вещественной кодировками.

    Args:
        img: Исходное изображение
        target: Целевая кодировка

    Returns:
        Новое изображение (или то же, если кодировка совпадает)
    """
    target = Encoding(target)
    if img.encoding is target:
        return img

    if target is Encoding.REAL:
        return GrayImage(pixels=img.pixels.astype(np.float64) / 255.0, encoding=Encoding.REAL)

    return GrayImage(pixels=to_byte_pixels(img.pixels * 255.0), encoding=Encoding.BYTE)
