"""
Приемочная проверка Hadamark.

Запуск:
    python evaluation/evaluate_system.py

Аргументы:
    --covers-dir: Каталог с каноническими покрытиями 512x512 (по умолчанию HADAMARK_COVERS_DIR)
    --limit: Ограничение количества сценариев (по умолчанию все)
    --category: Фильтр по категории (transform, codec, ga, robustness, security, determinism)
    --output: Путь для сохранения результатов (по умолчанию evaluation/results/)
    --seed: Зерно всех случайных потоков
    --workers: Число процессов для серий запусков ГА
"""

import argparse
import json
import math
import os
import sys
import time
from datetime import datetime
from itertools import combinations
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

# Добавление корневой директории в PYTHONPATH
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.config import settings
from app.ga.engine import evolve
from app.ga.experiment import evolve_runs
from app.ga.individual import Individual
from app.ga.selection import linear_ranking_probabilities, rank_population, select_parent
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import AttackSpec, CrossoverKind, Encoding, MutationKind
from app.services.attack_service import robustness_report
from app.services.codec_service import build_key, embed, extract
from app.services.experiment_service import experiment_service, ga_config_from_settings
from app.services.hadamard_service import forward, inverse, sylvester
from app.services.metrics_service import nc, psnr
from app.utils.image_io import load_gray
from app.utils.synthetic import synthetic_cover, synthetic_watermark
from evaluation.dataset import (
    ALL_TEST_CASES,
    CATEGORIES,
    REFERENCE_HADAMARD_8,
    SYNTHETIC_COVER,
    WATERMARKS,
    get_test_cases_by_category
)
from evaluation.metrics_config import (
    AcceptanceThresholds,
    CriterionResult,
    calculate_aggregate_scores,
    finalize_result
)

Checks = Tuple[Dict[str, bool], Dict[str, Any]]


# =============================================================================
# CONFIGURATION
# =============================================================================

class EvaluationConfig:
    """Конфигурация приемочного запуска."""

    def __init__(
        self,
        output_dir: str = settings.results_dir,
        covers_dir: Optional[str] = None,
        limit: Optional[int] = None,
        category: Optional[str] = None,
        seed: int = settings.default_seed,
        workers: int = settings.max_workers
    ):
        self.output_dir = Path(output_dir)
        self.covers_dir = Path(covers_dir) if covers_dir else None
        self.limit = limit
        self.category = category
        self.seed = seed
        self.workers = workers

        # Создание директории для результатов
        self.output_dir.mkdir(parents=True, exist_ok=True)


# =============================================================================
# INPUTS
# =============================================================================

def load_canonical_covers(covers_dir: Optional[Path]) -> Dict[str, GrayImage]:
    """Канонические покрытия 512x512 (PGM/PNG) из каталога; пустой словарь без каталога."""
    if covers_dir is None or not covers_dir.is_dir():
        return {}
    paths = sorted(p for p in covers_dir.iterdir() if p.suffix.lower() in (".pgm", ".png"))
    return {p.stem: load_gray(p) for p in paths}


def make_watermark(name: str) -> BinaryWatermark:
    params = WATERMARKS[name]
    return synthetic_watermark(params["side"], params["density"], params["seed"])


# =============================================================================
# EVALUATION RUNNER
# =============================================================================

class EvaluationRunner:
    """Класс для запуска приемочных сценариев."""

    def __init__(self, config: EvaluationConfig, thresholds: Optional[AcceptanceThresholds] = None):
        self.config = config
        self.thresholds = thresholds or AcceptanceThresholds()

        self.canonical = load_canonical_covers(config.covers_dir)
        self.synthetic = synthetic_cover(SYNTHETIC_COVER["side"], SYNTHETIC_COVER["seed"])

        self.checkers: Dict[str, Callable[[Dict[str, Any]], Checks]] = {
            "crit_01": self.check_transform,
            "crit_02": self.check_no_attack_fidelity,
            "crit_03": self.check_b_monotonicity,
            "crit_04": self.check_guaranteed_decoding,
            "crit_05": self.check_ga_improvement,
            "crit_06": self.check_exhaustive_optimum,
            "crit_07": self.check_selection_distribution,
            "crit_08": self.check_robustness,
            "crit_09": self.check_permutation_key,
            "crit_10": self.check_determinism,
        }

        # Статистика
        self.stats = {
            "total_tests": 0,
            "start_time": None,
            "end_time": None,
            "duration_seconds": 0
        }

        self.results: List[CriterionResult] = []

    @property
    def covers(self) -> Dict[str, GrayImage]:
        """Канонические покрытия, если заданы; иначе синтетическое."""
        return self.canonical or {"synthetic": self.synthetic}

    def select_test_cases(self) -> List[Dict[str, Any]]:
        """Выбор сценариев на основе фильтров."""
        if self.config.category:
            if self.config.category in CATEGORIES:
                cases = get_test_cases_by_category(self.config.category)
            else:
                logger.warning(f"Unknown category: {self.config.category}, using all scenarios")
                cases = ALL_TEST_CASES
        else:
            cases = ALL_TEST_CASES

        if self.config.limit:
            cases = cases[:self.config.limit]

        logger.info(f"Selected {len(cases)} scenarios for evaluation")
        return cases

    # -------------------------------------------------------------------------
    # Сценарии
    # -------------------------------------------------------------------------

    def check_transform(self, case: Dict[str, Any]) -> Checks:
        rng = np.random.default_rng(self.config.seed)
        H = sylvester(8)
        blocks = rng.uniform(0.0, 255.0, size=(case["blocks"], 8, 8))

        error = float(np.max(np.abs(inverse(H, forward(H, blocks)) - blocks)))
        gram = H.entries @ H.entries.T

        checks = {
            "round_trip": error <= self.thresholds.transform_tolerance,
            "orthogonal": bool(np.array_equal(gram, 8 * np.eye(8, dtype=gram.dtype))),
            "reference_matrix": bool(np.array_equal(H.entries, REFERENCE_HADAMARD_8)),
        }
        return checks, {"max_error": error}

    def check_no_attack_fidelity(self, case: Dict[str, Any]) -> Checks:
        wm = make_watermark(case["watermark"])
        key = build_key(512, wm.side, b=case["b"])
        low, high = self.thresholds.psnr_band

        checks: Dict[str, bool] = {}
        measured: Dict[str, Any] = {"canonical_covers": bool(self.canonical)}
        for name, cover in self.covers.items():
            started = time.perf_counter()
            marked = embed(cover, wm, key)
            value = nc(wm, extract(marked, key))
            elapsed = time.perf_counter() - started
            quality = psnr(cover, marked)

            checks[f"{name}_nc"] = value == 1.0
            checks[f"{name}_runtime"] = elapsed < 2.0
            # Полоса PSNR зависит от файла покрытия
            if self.canonical:
                checks[f"{name}_psnr"] = low <= quality <= high
            measured[name] = {"psnr": quality, "nc": value, "seconds": elapsed}
        return checks, measured

    def check_b_monotonicity(self, case: Dict[str, Any]) -> Checks:
        wm = make_watermark(case["watermark"])
        cover = self.synthetic

        psnrs, ncs = {}, {}
        for b in case["b_values"]:
            key = build_key(512, wm.side, b=b)
            marked = embed(cover, wm, key)
            psnrs[b] = psnr(cover, marked)
            ncs[b] = nc(wm, extract(marked, key))

        checks = {
            "psnr_order": psnrs[1.99] >= psnrs[2.00] >= psnrs[2.01],
            "nc_order": ncs[2.01] >= ncs[1.99],
        }
        return checks, {"psnr": psnrs, "nc": ncs}

    def check_guaranteed_decoding(self, case: Dict[str, Any]) -> Checks:
        cover = GrayImage(pixels=np.full((512, 512), 128, dtype=np.uint8), encoding=Encoding.BYTE)
        key = build_key(512, 64, b=case["b"])

        checks = {}
        for bit in (0, 1):
            wm = BinaryWatermark(bits=np.full((64, 64), bit))
            checks[f"bit_{bit}"] = extract(embed(cover, wm, key), key) == wm
        return checks, {}

    def check_ga_improvement(self, case: Dict[str, Any]) -> Checks:
        cfg = ga_config_from_settings(
            seed=self.config.seed,
            pop_size=20,
            generations=50,
            crossover=CrossoverKind.X,
            mutation=MutationKind.INVM
        )

        checks: Dict[str, bool] = {}
        measured: Dict[str, Any] = {}
        for name in case["watermarks"]:
            wm = make_watermark(name)
            stats = [s for _, s in evolve_runs(wm, cfg, case["runs"], self.config.workers)]
            improved = sum(s.nc_final < s.nc0 for s in stats)
            gains = [(s.nc0 - s.nc_final) / s.nc0 for s in stats if s.nc0 > 0]
            median_gain = float(np.median(gains)) if gains else 0.0

            checks[f"{name}_improved"] = improved >= self.thresholds.min_improved_runs
            if name == "sparse":
                checks["sparse_median_gain"] = median_gain >= self.thresholds.min_sparse_median_gain
            if name == "dense":
                checks["dense_floor"] = all(s.nc_final >= self.thresholds.dense_nc_floor for s in stats)

            measured[name] = {
                "improved_runs": improved,
                "median_gain": median_gain,
                "nc0": [s.nc0 for s in stats],
                "nc_final": [s.nc_final for s in stats],
            }
        return checks, measured

    def check_exhaustive_optimum(self, case: Dict[str, Any]) -> Checks:
        wm = BinaryWatermark(bits=np.array(case["bits"]))
        whites = set(wm.white_positions.tolist())
        k = wm.white_count
        optimum = min(
            len(whites & set(subset)) / k
            for subset in combinations(range(wm.size), k)
        )

        _, stats = evolve(wm, ga_config_from_settings(seed=self.config.seed))
        checks = {
            "optimum_reached": stats.nc_final == optimum,
            "optimum_is_zero": optimum == 0.0,
        }
        return checks, {"optimum": optimum, "ga": stats.nc_final}

    def check_selection_distribution(self, case: Dict[str, Any]) -> Checks:
        mu, s, draws = case["pop_size"], case["pressure"], case["draws"]
        rng = np.random.default_rng(self.config.seed)

        # Популяция с различными NC на знаке 5x5
        wm = synthetic_watermark(5, 0.4, seed=self.config.seed)
        population = [
            Individual.from_perm(wm, rng.permutation(wm.size), birth=i)
            for i in range(mu)
        ]
        ranked = rank_population(population)
        rank_of = {id(ind): rank for rank, ind in enumerate(ranked)}

        counts = np.zeros(mu, dtype=np.int64)
        for _ in range(draws):
            counts[rank_of[id(select_parent(ranked, s, rng))]] += 1

        expected = linear_ranking_probabilities(mu, s)
        sigma = np.sqrt(draws * expected * (1.0 - expected))
        deviation = np.abs(counts - draws * expected) / sigma

        checks = {
            "within_sigmas": bool(np.all(deviation <= self.thresholds.selection_sigmas)),
            "rank_ratio": math.isclose(expected[-1] / expected[0], self.thresholds.rank_ratio, rel_tol=1e-12),
        }
        return checks, {"max_sigma": float(deviation.max()), "counts": counts.tolist()}

    def check_robustness(self, case: Dict[str, Any]) -> Checks:
        wm = make_watermark(case["watermark"])
        key = build_key(512, wm.side, b=case["b"])
        specs = [
            AttackSpec.jpeg(90),
            AttackSpec.jpeg(80),
            AttackSpec.gaussian(0.0, 0.001, rng_seed=self.config.seed),
            AttackSpec.salt_pepper(0.01, rng_seed=self.config.seed),
        ]
        t = self.thresholds
        low, high = t.salt_pepper_psnr_band

        checks: Dict[str, bool] = {}
        measured: Dict[str, Any] = {
            "canonical_covers": bool(self.canonical),
            "gaussian_scale": settings.gaussian_scale
        }
        for name, cover in self.covers.items():
            rows = {row.attack: row for row in robustness_report(cover, wm, key, specs)}
            checks[f"{name}_gauss_nc"] = rows["Gauss"].nc >= t.gaussian_nc
            checks[f"{name}_sp_nc"] = rows["S&P"].nc >= t.salt_pepper_nc
            checks[f"{name}_sp_psnr"] = low <= rows["S&P"].psnr <= high
            checks[f"{name}_jpeg90_nc"] = rows["jpg90"].nc >= t.jpeg90_nc
            checks[f"{name}_jpeg_order"] = rows["jpg80"].nc <= rows["jpg90"].nc
            measured[name] = {label: {"psnr": row.psnr, "nc": row.nc} for label, row in rows.items()}
        return checks, measured

    def check_permutation_key(self, case: Dict[str, Any]) -> Checks:
        watermarks = {case["watermark"]: make_watermark(case["watermark"])}
        cfg = ga_config_from_settings(seed=self.config.seed)
        frame = experiment_service.permuted_embedding({"synthetic": self.synthetic}, watermarks, cfg)
        row = frame.iloc[0]

        with_key = float(row["nc"])
        without_key = float(row["nc_without_key"])
        fitness = float(row["ga_fitness"])
        checks = {
            "with_key": with_key == 1.0,
            "without_key": abs(without_key - fitness) <= self.thresholds.keyless_tolerance,
        }
        return checks, {"nc": with_key, "nc_without_key": without_key, "ga_fitness": fitness}

    def check_determinism(self, case: Dict[str, Any]) -> Checks:
        wm = make_watermark(case["watermark"])
        covers = {"synthetic": self.synthetic}
        cfg = ga_config_from_settings(seed=self.config.seed, generations=10)

        def attack_csv() -> str:
            return experiment_service.attacks(covers, {"wm": wm}, seed=self.config.seed).to_csv(index=False)

        def permuted_csv() -> str:
            return experiment_service.permuted_embedding(covers, {"wm": wm}, cfg).to_csv(index=False)

        def key_json() -> str:
            best, _ = evolve(wm, cfg)
            return build_key(512, wm.side, perm=best.perm, rng_seed=cfg.rng_seed).model_dump_json()

        checks = {
            "attack_csv": attack_csv() == attack_csv(),
            "permuted_csv": permuted_csv() == permuted_csv(),
            "key_file": key_json() == key_json(),
        }
        return checks, {}

    # -------------------------------------------------------------------------
    # Запуск
    # -------------------------------------------------------------------------

    def run_case(self, case: Dict[str, Any]) -> CriterionResult:
        """Выполнение одного сценария с замером времени."""
        started = time.perf_counter()
        try:
            checks, measured = self.checkers[case["id"]](case)
        except Exception as e:
            logger.error(f"{case['id']} raised: {e}")
            return CriterionResult(
                test_id=case["id"],
                name=case["name"],
                category=case["category"],
                passed=False,
                duration_seconds=time.perf_counter() - started,
                runtime_limit=case.get("runtime_limit"),
                error=str(e)
            )
        return finalize_result(case, checks, measured, time.perf_counter() - started)

    def run_evaluation(self) -> Dict[str, Any]:
        """
        Запуск всех выбранных сценариев.

        Returns:
            Словарь с результатами
        """
        logger.info("=" * 80)
        logger.info("Starting Hadamark acceptance evaluation")
        logger.info("=" * 80)

        cases = self.select_test_cases()
        self.stats["total_tests"] = len(cases)

        logger.info("Configuration:")
        logger.info(f"  Covers: {', '.join(self.covers)}")
        logger.info(f"  Seed: {self.config.seed}")
        logger.info(f"  Category filter: {self.config.category or 'all'}")
        logger.info(f"  Limit: {self.config.limit or 'none'}")

        self.stats["start_time"] = datetime.now()

        for i, case in enumerate(cases, 1):
            logger.info(f"[{i}/{len(cases)}] {case['id']}: {case['name']}")
            result = self.run_case(case)
            self.results.append(result)

            status = "PASS" if result.passed else "FAIL"
            logger.info(f"  {status} in {result.duration_seconds:.2f}s")

        self.stats["end_time"] = datetime.now()
        self.stats["duration_seconds"] = (
            self.stats["end_time"] - self.stats["start_time"]
        ).total_seconds()

        results = self.compile_results()
        self.save_results(results)
        self.print_final_statistics(results)
        return results

    def compile_results(self) -> Dict[str, Any]:
        """Структурированные результаты для JSON."""
        start = self.stats["start_time"]
        return {
            "metadata": {
                "evaluation_date": start.isoformat() if start else None,
                "duration_seconds": self.stats["duration_seconds"],
                "total_tests": self.stats["total_tests"],
                "seed": self.config.seed,
                "covers": list(self.covers),
                "canonical_covers": bool(self.canonical)
            },
            "test_results": [result.model_dump() for result in self.results],
            "aggregate_stats": calculate_aggregate_scores(self.results)
        }

    def save_results(self, results: Dict[str, Any]) -> None:
        """Сохранение результатов в JSON файл."""
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_file = self.config.output_dir / f"evaluation_results_{timestamp}.json"

        try:
            with open(output_file, "w", encoding="utf-8") as f:
                json.dump(results, f, indent=2, ensure_ascii=False, default=str)

            logger.success(f"Results saved to: {output_file}")

            # Также сохранить как latest
            latest_file = self.config.output_dir / "evaluation_results_latest.json"
            with open(latest_file, "w", encoding="utf-8") as f:
                json.dump(results, f, indent=2, ensure_ascii=False, default=str)

            logger.info(f"Latest results saved to: {latest_file}")

        except OSError as e:
            logger.error(f"Failed to save results: {e}")

    def print_final_statistics(self, results: Dict[str, Any]) -> None:
        """Вывод итоговой статистики."""
        metadata = results.get("metadata", {})
        overall = results.get("aggregate_stats", {}).get("overall", {})
        by_category = results.get("aggregate_stats", {}).get("by_category", {})

        logger.info("=" * 80)
        logger.info("EVALUATION SUMMARY")
        logger.info("=" * 80)
        logger.info(f"  Duration: {metadata.get('duration_seconds', 0):.1f} seconds")
        logger.info(f"  Passed: {overall.get('passed', 0)}/{overall.get('total_tests', 0)}")

        for category, stats in by_category.items():
            logger.info(
                f"  {category.upper():12s}: "
                f"{stats['passed']}/{stats['total']} | "
                f"{stats['duration_seconds']:.1f}s"
            )

        for result in self.results:
            if not result.passed:
                failed = [name for name, ok in result.checks.items() if not ok]
                logger.warning(f"  {result.test_id} {result.name}: {result.error or ', '.join(failed)}")

        logger.info("=" * 80)


# =============================================================================
# MAIN
# =============================================================================

def parse_arguments() -> argparse.Namespace:
    """Парсинг аргументов командной строки."""
    parser = argparse.ArgumentParser(description="Run the Hadamark acceptance scenarios")

    parser.add_argument(
        "--covers-dir",
        type=str,
        default=os.environ.get("HADAMARK_COVERS_DIR"),
        help="Directory with canonical 512x512 cover images"
    )
    parser.add_argument("--limit", type=int, default=None, help="Limit number of scenarios")
    parser.add_argument(
        "--category",
        type=str,
        choices=list(CATEGORIES) + ["all"],
        default=None,
        help="Filter scenarios by category"
    )
    parser.add_argument("--output", type=str, default=settings.results_dir, help="Output directory for results")
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--workers", type=int, default=settings.max_workers)

    return parser.parse_args()


def main():
    """Main entry point."""
    args = parse_arguments()

    config = EvaluationConfig(
        output_dir=args.output,
        covers_dir=args.covers_dir,
        limit=args.limit,
        category=args.category if args.category != "all" else None,
        seed=args.seed,
        workers=args.workers
    )

    runner = EvaluationRunner(config)
    results = runner.run_evaluation()

    if results["aggregate_stats"].get("overall", {}).get("failed", 0):
        logger.error("Some acceptance scenarios failed")
        sys.exit(1)
    logger.success("All acceptance scenarios passed!")
    sys.exit(0)


if __name__ == "__main__":
    main()
