"""Pytest configuration and fixtures."""
import os
from pathlib import Path

import numpy as np
import pytest

from app.models.images import GrayImage
from app.models.schemas import Encoding
from app.services.hadamard_service import HadamardMatrix, register_hadamard, unregister_hadamard
from app.utils.synthetic import synthetic_cover, synthetic_watermark

# Каталог с каноническими тестовыми изображениями (lena, baboon, boats, peppers)
COVERS_DIR = os.environ.get("HADAMARK_COVERS_DIR")

requires_covers = pytest.mark.skipif(
    not COVERS_DIR or not Path(COVERS_DIR).is_dir(),
    reason="HADAMARK_COVERS_DIR is not set to a directory with canonical cover images"
)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(2012)


@pytest.fixture(scope="session")
def cover_512():
    """Synthetic 512x512 textured cover."""
    return synthetic_cover(512, seed=7)


@pytest.fixture(scope="session")
def cover_64():
    """Synthetic 64x64 textured cover."""
    return synthetic_cover(64, seed=11)


@pytest.fixture
def gray_128():
    """Constant mid-gray 512x512 cover."""
    return GrayImage(pixels=np.full((512, 512), 128, dtype=np.uint8), encoding=Encoding.BYTE)


@pytest.fixture(scope="session")
def dense_wm():
    """64x64 watermark with white density 0.8."""
    return synthetic_watermark(64, 0.80, seed=1)


@pytest.fixture(scope="session")
def sparse_wm():
    """64x64 watermark with white density 0.18."""
    return synthetic_watermark(64, 0.18, seed=2)


@pytest.fixture
def small_wm():
    """8x8 watermark for fast GA tests."""
    return synthetic_watermark(8, 0.3, seed=3)


def paley_12() -> np.ndarray:
    """Нормализованная матрица Адамара порядка 12 (конструкция Пэли, q = 11)."""
    q = 11
    residues = {(x * x) % q for x in range(1, q)}

    def chi(a: int) -> int:
        a %= q
        if a == 0:
            return 0
        return 1 if a in residues else -1

    s = np.zeros((12, 12), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = -1
    s[1:, 1:] = [[chi(j - i) for j in range(q)] for i in range(q)]
    h = np.eye(12, dtype=np.int64) + s
    h[1:] *= -1
    return h


@pytest.fixture
def order_12():
    """Order-12 matrix registered for the duration of a test."""
    H = HadamardMatrix.from_entries(paley_12())
    register_hadamard(H)
    yield H
    unregister_hadamard(12)
