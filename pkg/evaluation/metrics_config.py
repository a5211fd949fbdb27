"""
Пороги приемки и результаты проверок.

Содержит:
- AcceptanceThresholds: все численные пороги сценариев
- CriterionResult: результат одного сценария
- Утилиты агрегирования результатов
"""

from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import BaseModel, Field


# =============================================================================
# THRESHOLDS
# =============================================================================

class AcceptanceThresholds(BaseModel):
    """Численные пороги приемочных сценариев."""

    # Преобразование
    transform_tolerance: float = 1e-9

    # Встраивание без атак
    psnr_band: tuple[float, float] = (38.0, 50.0)

    # ГА
    min_improved_runs: int = 9
    min_sparse_median_gain: float = 0.10
    dense_nc_floor: float = 0.75
    selection_sigmas: float = 3.0
    rank_ratio: float = 3.0

    # Атаки
    gaussian_nc: float = 0.95
    salt_pepper_nc: float = 0.85
    salt_pepper_psnr_band: tuple[float, float] = (24.0, 27.0)
    jpeg90_nc: float = 0.80

    # Перестановочный ключ
    keyless_tolerance: float = 0.05


class CriterionResult(BaseModel):
    """Результат одного приемочного сценария."""

    test_id: str
    name: str
    category: str
    passed: bool
    checks: Dict[str, bool] = Field(default_factory=dict)
    measured: Dict[str, Any] = Field(default_factory=dict)
    duration_seconds: float = 0.0
    runtime_limit: Optional[float] = None
    error: Optional[str] = None

    @property
    def within_runtime(self) -> bool:
        return self.runtime_limit is None or self.duration_seconds <= self.runtime_limit


def finalize_result(
    test_case: Dict[str, Any],
    checks: Dict[str, bool],
    measured: Dict[str, Any],
    duration_seconds: float
) -> CriterionResult:
    """
    Сборка результата сценария из отдельных проверок.

    Сценарий пройден, если пройдены все проверки и не превышено время.
    """
    has_checks = bool(checks)
    result = CriterionResult(
        test_id=test_case["id"],
        name=test_case["name"],
        category=test_case["category"],
        passed=False,
        checks=checks,
        measured=measured,
        duration_seconds=duration_seconds,
        runtime_limit=test_case.get("runtime_limit")
    )
    result.checks["runtime"] = result.within_runtime
    result.passed = has_checks and all(result.checks.values())

    failed = [name for name, ok in result.checks.items() if not ok]
    if failed:
        logger.warning(f"{result.test_id} failed checks: {', '.join(failed)}")
    return result


def calculate_aggregate_scores(results: List[CriterionResult]) -> Dict[str, Any]:
    """
    Доля пройденных сценариев по категориям и в целом.

    Args:
        results: Результаты сценариев

    Returns:
        Словарь {"by_category": ..., "overall": ...}
    """
    if not results:
        return {}

    by_category: Dict[str, Dict[str, Any]] = {}
    for result in results:
        stats = by_category.setdefault(result.category, {"total": 0, "passed": 0, "duration_seconds": 0.0})
        stats["total"] += 1
        stats["passed"] += int(result.passed)
        stats["duration_seconds"] += result.duration_seconds

    for stats in by_category.values():
        stats["pass_rate"] = stats["passed"] / stats["total"]

    passed = sum(int(r.passed) for r in results)
    return {
        "by_category": by_category,
        "overall": {
            "total_tests": len(results),
            "passed": passed,
            "failed": len(results) - passed,
            "pass_rate": passed / len(results)
        }
    }


# Пороги по умолчанию
default_thresholds = AcceptanceThresholds()
