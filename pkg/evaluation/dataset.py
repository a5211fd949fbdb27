"""
Каталог приемочных сценариев Hadamark.

Содержит 10 сценариев:
- Преобразование Адамара (точность, эталонная матрица)
- Кодек (встраивание без атак, монотонность по b, гарантированное декодирование)
- Генетический алгоритм (улучшение NC, полный перебор, ранговая селекция)
- Устойчивость к атакам
- Перестановочный ключ
- Воспроизводимость
"""

from typing import Any, Dict, List

import numpy as np


# Эталонная нормализованная матрица Сильвестра порядка 8
REFERENCE_HADAMARD_8 = np.array([
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, -1, 1, -1, 1, -1, 1, -1],
    [1, 1, -1, -1, 1, 1, -1, -1],
    [1, -1, -1, 1, 1, -1, -1, 1],
    [1, 1, 1, 1, -1, -1, -1, -1],
    [1, -1, 1, -1, -1, 1, -1, 1],
    [1, 1, -1, -1, -1, -1, 1, 1],
    [1, -1, -1, 1, -1, 1, 1, -1],
])

# Синтетические водяные знаки 64x64: плотность белого и зерно
WATERMARKS = {
    "dense": {"side": 64, "density": 0.80, "seed": 1},
    "sparse": {"side": 64, "density": 0.18, "seed": 2},
}

SYNTHETIC_COVER = {"side": 512, "seed": 7}


# =============================================================================
# TRANSFORM
# =============================================================================

TRANSFORM_CASES = [
    {
        "id": "crit_01",
        "name": "transform_exactness",
        "category": "transform",
        "description": "1000 random 8x8 blocks survive forward+inverse within 1e-9; "
                       "H*H^T == 8I and H equals the reference matrix",
        "blocks": 1000,
        "runtime_limit": 1.0
    },
]


# =============================================================================
# CODEC
# =============================================================================

CODEC_CASES = [
    {
        "id": "crit_02",
        "name": "no_attack_fidelity",
        "category": "codec",
        "description": "order 8, b=2.01, dense 64x64 mark: NC == 1 on every cover; "
                       "PSNR band checked on canonical covers",
        "watermark": "dense",
        "b": 2.01,
        "runtime_limit": 2.0
    },
    {
        "id": "crit_03",
        "name": "b_monotonicity",
        "category": "codec",
        "description": "PSNR(1.99) >= PSNR(2.00) >= PSNR(2.01) and NC(2.01) >= NC(1.99)",
        "watermark": "sparse",
        "b_values": [1.99, 2.00, 2.01],
        "runtime_limit": None
    },
    {
        "id": "crit_04",
        "name": "guaranteed_decoding",
        "category": "codec",
        "description": "b=5 on a constant-128 cover decodes both bit values in every block",
        "b": 5.0,
        "runtime_limit": None
    },
]


# =============================================================================
# GENETIC ALGORITHM
# =============================================================================

GA_CASES = [
    {
        "id": "crit_05",
        "name": "ga_improvement",
        "category": "ga",
        "description": "X+InvM, mu=20, 50 generations, 10 runs: improvement in >= 9/10 runs, "
                       "sparse median relative gain >= 10%, dense final NC >= 0.75",
        "watermarks": ["dense", "sparse"],
        "runs": 10,
        "runtime_limit": 30.0
    },
    {
        "id": "crit_06",
        "name": "exhaustive_optimum",
        "category": "ga",
        "description": "3x3 mark with k=2: GA optimum equals the minimum over all 36 white sets",
        "bits": [[1, 0, 0], [0, 1, 0], [0, 0, 0]],
        "runtime_limit": None
    },
    {
        "id": "crit_07",
        "name": "selection_distribution",
        "category": "ga",
        "description": "1e5 draws at mu=20, s=1.5 match the linear ranking probabilities within 3 sigma",
        "draws": 100_000,
        "pop_size": 20,
        "pressure": 1.5,
        "runtime_limit": None
    },
]


# =============================================================================
# ROBUSTNESS / SECURITY / DETERMINISM
# =============================================================================

ROBUSTNESS_CASES = [
    {
        "id": "crit_08",
        "name": "robustness_bands",
        "category": "robustness",
        "description": "b=2.01, dense mark: Gauss NC >= 0.95, S&P NC >= 0.85 with PSNR in [24, 27], "
                       "JPEG 90 NC >= 0.80 and NC(80) <= NC(90)",
        "watermark": "dense",
        "b": 2.01,
        "runtime_limit": None
    },
]

SECURITY_CASES = [
    {
        "id": "crit_09",
        "name": "permutation_key",
        "category": "security",
        "description": "GA-permuted mark: NC == 1 with the key, keyless NC within 0.05 of the GA fitness",
        "watermark": "sparse",
        "runtime_limit": None
    },
]

DETERMINISM_CASES = [
    {
        "id": "crit_10",
        "name": "determinism",
        "category": "determinism",
        "description": "Repeated seeded pipelines produce byte-identical CSV and key files",
        "watermark": "sparse",
        "runtime_limit": None
    },
]


# =============================================================================
# Объединение всех сценариев
# =============================================================================

ALL_TEST_CASES = (
    TRANSFORM_CASES +
    CODEC_CASES +
    GA_CASES +
    ROBUSTNESS_CASES +
    SECURITY_CASES +
    DETERMINISM_CASES
)

CATEGORIES = ("transform", "codec", "ga", "robustness", "security", "determinism")


# =============================================================================
# Утилиты для работы с каталогом
# =============================================================================

def get_test_cases_by_category(category: str) -> List[Dict[str, Any]]:
    """Получить сценарии по категории."""
    return [tc for tc in ALL_TEST_CASES if tc["category"] == category]


def get_test_case_by_id(test_id: str) -> Dict[str, Any]:
    """Получить сценарий по ID."""
    for tc in ALL_TEST_CASES:
        if tc["id"] == test_id:
            return tc
    raise ValueError(f"Test case with id '{test_id}' not found")


def print_dataset_statistics():
    """Вывести статистику каталога."""
    print("=" * 80)
    print("ACCEPTANCE SCENARIOS")
    print("=" * 80)
    print(f"Total scenarios: {len(ALL_TEST_CASES)}")
    print()
    print("By category:")
    for category in CATEGORIES:
        print(f"  {category:12s} {len(get_test_cases_by_category(category))}")
    print()
    for tc in ALL_TEST_CASES:
        print(f"  {tc['id']}  {tc['name']}")
    print("=" * 80)


if __name__ == "__main__":
    print_dataset_statistics()
