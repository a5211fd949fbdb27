"""
Генератор markdown отчета из результатов приемочной проверки.

Читает JSON результаты из evaluation/results/evaluation_results_latest.json
и генерирует markdown отчет с:
- Итоговой сводкой
- Результатами по категориям
- Таблицей сценариев
- Проваленными проверками и измеренными значениями

Запуск:
    python evaluation/generate_report.py
    python evaluation/generate_report.py --input evaluation/results/custom_results.json
"""

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict


# =============================================================================
# CONFIGURATION
# =============================================================================

DEFAULT_INPUT = "evaluation/results/evaluation_results_latest.json"
DEFAULT_OUTPUT = "evaluation/results/evaluation_report.md"


# =============================================================================
# LOAD RESULTS
# =============================================================================

def load_results(results_file: str) -> Dict[str, Any]:
    """
    Загрузка результатов из JSON файла.

    Args:
        results_file: Путь к JSON файлу с результатами

    Returns:
        Dict с результатами проверки
    """
    try:
        with open(results_file, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        print(f"Error: Results file not found: {results_file}")
        print("   Please run evaluation first: python evaluation/evaluate_system.py")
        sys.exit(1)
    except json.JSONDecodeError as e:
        print(f"Error: Invalid JSON in results file: {e}")
        sys.exit(1)


# =============================================================================
# REPORT SECTIONS
# =============================================================================

def generate_header() -> str:
    """Генерация заголовка отчета."""
    return f"""# Hadamark Acceptance Report

**Generated:** {datetime.now().strftime("%Y-%m-%d %H:%M:%S")}

---

"""


def generate_executive_summary(results: Dict[str, Any]) -> str:
    """Итоговая сводка."""
    metadata = results.get("metadata", {})
    overall = results.get("aggregate_stats", {}).get("overall", {})

    total = overall.get("total_tests", 0)
    passed = overall.get("passed", 0)
    status = "PASSED" if total and passed == total else "FAILED"
    covers = ", ".join(metadata.get("covers", [])) or "N/A"
    source = "canonical" if metadata.get("canonical_covers") else "synthetic"

    return f"""## Executive Summary

**Overall Status:** {status}

| Metric | Value |
|--------|-------|
| **Scenarios** | {total} |
| **Passed** | {passed} |
| **Failed** | {overall.get('failed', 0)} |
| **Duration** | {metadata.get('duration_seconds', 0):.1f} seconds |
| **Seed** | {metadata.get('seed', 'N/A')} |
| **Covers** | {covers} ({source}) |
| **Evaluation Date** | {metadata.get('evaluation_date', 'N/A')} |

---

"""


def generate_category_table(results: Dict[str, Any]) -> str:
    """Результаты по категориям."""
    by_category = results.get("aggregate_stats", {}).get("by_category", {})
    if not by_category:
        return ""

    lines = [
        "## Results by Category",
        "",
        "| Category | Passed | Total | Pass Rate | Time (s) |",
        "|----------|--------|-------|-----------|----------|",
    ]
    for category, stats in by_category.items():
        lines.append(
            f"| {category} | {stats['passed']} | {stats['total']} | "
            f"{stats['pass_rate']:.0%} | {stats['duration_seconds']:.2f} |"
        )
    return "\n".join(lines) + "\n\n---\n\n"


def generate_scenarios_table(results: Dict[str, Any]) -> str:
    """Таблица всех сценариев."""
    lines = [
        "## Scenarios",
        "",
        "| ID | Name | Status | Time (s) | Limit (s) |",
        "|----|------|--------|----------|-----------|",
    ]
    for result in results.get("test_results", []):
        limit = result.get("runtime_limit")
        lines.append(
            f"| {result['test_id']} | {result['name']} | "
            f"{'PASS' if result['passed'] else 'FAIL'} | "
            f"{result.get('duration_seconds', 0):.2f} | "
            f"{limit if limit is not None else '-'} |"
        )
    return "\n".join(lines) + "\n\n---\n\n"


def _format_measured(measured: Dict[str, Any]) -> str:
    if not measured:
        return "_no measurements_"
    return "```json\n" + json.dumps(measured, indent=2, ensure_ascii=False, default=str) + "\n```"


def generate_failed_tests_section(results: Dict[str, Any]) -> str:
    """Проваленные сценарии с перечнем проверок и измерениями."""
    failed = [r for r in results.get("test_results", []) if not r["passed"]]
    if not failed:
        return "## Failed Scenarios\n\nNone.\n\n---\n\n"

    parts = ["## Failed Scenarios", ""]
    for result in failed:
        parts.append(f"### {result['test_id']}: {result['name']}")
        parts.append("")
        if result.get("error"):
            parts.append(f"**Error:** `{result['error']}`")
            parts.append("")
        checks = result.get("checks", {})
        for name, ok in checks.items():
            parts.append(f"- [{'x' if ok else ' '}] {name}")
        parts.append("")
        parts.append(_format_measured(result.get("measured", {})))
        parts.append("")
    return "\n".join(parts) + "\n---\n\n"


def generate_footer() -> str:
    """Подвал отчета."""
    return """## Notes

- PSNR bands in the fidelity scenario are checked only on canonical covers (`--covers-dir`).
- Robustness bands depend on the cover and on the JPEG codec; synthetic covers are a substitute.
- Re-running with the same `--seed` reproduces every measurement.
"""


def generate_full_report(results: Dict[str, Any]) -> str:
    """Сборка полного отчета."""
    return (
        generate_header()
        + generate_executive_summary(results)
        + generate_category_table(results)
        + generate_scenarios_table(results)
        + generate_failed_tests_section(results)
        + generate_footer()
    )


def save_report(report: str, output_file: str) -> None:
    """Сохранение отчета в файл."""
    try:
        path = Path(output_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report, encoding="utf-8")
        print(f"Report saved to: {output_file}")
    except OSError as e:
        print(f"Error saving report: {e}")
        sys.exit(1)


# =============================================================================
# CLI
# =============================================================================

def parse_arguments() -> argparse.Namespace:
    """Парсинг аргументов командной строки."""
    parser = argparse.ArgumentParser(
        description="Generate markdown acceptance report from JSON results"
    )
    parser.add_argument(
        "--input",
        type=str,
        default=DEFAULT_INPUT,
        help=f"Input JSON file with evaluation results (default: {DEFAULT_INPUT})"
    )
    parser.add_argument(
        "--output",
        type=str,
        default=DEFAULT_OUTPUT,
        help=f"Output markdown file (default: {DEFAULT_OUTPUT})"
    )
    parser.add_argument(
        "--print",
        action="store_true",
        help="Print report to stdout in addition to saving"
    )
    return parser.parse_args()


def main():
    """Main entry point."""
    args = parse_arguments()

    print("=" * 80)
    print("Hadamark - Acceptance Report Generator")
    print("=" * 80)
    print(f"\nInput:  {args.input}")
    print(f"Output: {args.output}\n")

    results = load_results(args.input)
    report = generate_full_report(results)
    save_report(report, args.output)

    if args.print:
        print("\n" + "=" * 80)
        print(report)


if __name__ == "__main__":
    main()
