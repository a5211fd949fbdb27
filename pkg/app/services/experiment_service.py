"""Сервис воспроизведения экспериментов: сетка операторов ГА, зависимость от b, атаки, ГА-знаки."""
import math
from typing import Dict, List, Optional, Sequence

import pandas as pd
from loguru import logger

from app.config import settings
from app.exceptions import UndefinedNCError
from app.ga.engine import evolve, run_rng
from app.ga.experiment import EXPERIMENT_COLUMNS, experiment_frame, run_experiment
from app.ga.individual import apply_permutation
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import AttackSpec, CrossoverKind, GAConfig, MutationKind, WatermarkKey
from app.services.attack_service import ROBUSTNESS_COLUMNS, robustness_frame, robustness_report
from app.services.codec_service import build_key, embed, extract
from app.services.metrics_service import nc, psnr
from app.utils.formatting import format_number

TABLE_IDS = (2, 4, 5, 6)


def default_attack_specs(seed: Optional[int] = None) -> List[AttackSpec]:
    """Атаки по умолчанию: JPEG с качеством из настроек, гауссов шум, соль-перец."""
    seed = settings.default_seed if seed is None else seed
    specs = [AttackSpec.jpeg(q) for q in settings.jpeg_quality_values]
    specs.append(AttackSpec.gaussian(settings.gaussian_mean, settings.gaussian_variance, rng_seed=seed))
    specs.append(AttackSpec.salt_pepper(settings.salt_pepper_density, rng_seed=seed))
    return specs


def ga_config_from_settings(seed: Optional[int] = None, **overrides) -> GAConfig:
    """GAConfig со значениями по умолчанию из настроек."""
    values = {
        "pop_size": settings.ga_pop_size,
        "generations": settings.ga_generations,
        "selection_pressure": settings.ga_selection_pressure,
        "crossover": CrossoverKind(settings.ga_crossover),
        "mutation": MutationKind(settings.ga_mutation),
        "rng_seed": settings.default_seed if seed is None else seed,
        "duplicate_retries": settings.ga_duplicate_retries,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return GAConfig(**values)


def _safe_nc(wm: BinaryWatermark, extracted: BinaryWatermark) -> float:
    try:
        return nc(wm, extracted)
    except UndefinedNCError:
        logger.warning("NC undefined: extracted watermark is all black")
        return math.nan


class ExperimentService:
    """
    Сервис экспериментов.

    Обязанности:
    1. Сетка операторов ГА (таблица 2)
    2. PSNR и NC в зависимости от b (таблица 4)
    3. Устойчивость к атакам (таблица 5)
    4. Встраивание ГА-переставленных знаков (таблица 6)
    """

    def operator_grid(
        self,
        watermarks: Dict[str, BinaryWatermark],
        cfg: GAConfig,
        runs: int,
        crossovers: Sequence[CrossoverKind] = tuple(CrossoverKind),
        mutations: Sequence[MutationKind] = tuple(MutationKind),
        max_workers: int = 1
    ) -> pd.DataFrame:
        """Таблица 2: все пары операторов для каждого водяного знака."""
        frames = []
        for name, wm in watermarks.items():
            logger.info(f"Operator grid for watermark {name} ({len(crossovers)}x{len(mutations)} cells)")
            rows = run_experiment(wm, crossovers, mutations, runs, cfg, max_workers)
            frames.append(experiment_frame(rows, extra={"watermark": name}))
        if not frames:
            return pd.DataFrame(columns=["watermark"] + EXPERIMENT_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    def b_sweep(
        self,
        covers: Dict[str, GrayImage],
        watermarks: Dict[str, BinaryWatermark],
        b_values: Optional[Sequence[float]] = None,
        order: Optional[int] = None
    ) -> pd.DataFrame:
        """Таблица 4: PSNR и NC без атак для каждого b."""
        b_values = list(b_values) if b_values is not None else settings.b_grid_values
        records = []
        for cover_name, cover in covers.items():
            for wm_name, wm in watermarks.items():
                for b in b_values:
                    key = build_key(cover.height, wm.side, b=b, order=order, encoding=cover.encoding)
                    marked = embed(cover, wm, key)
                    records.append({
                        "cover": cover_name,
                        "watermark": wm_name,
                        "b": format_number(b),
                        "psnr": format_number(psnr(cover, marked)),
                        "nc": format_number(_safe_nc(wm, extract(marked, key)))
                    })
                    logger.debug(f"{cover_name}/{wm_name} b={b}: {records[-1]['psnr']} dB")
        return pd.DataFrame(records, columns=["cover", "watermark", "b", "psnr", "nc"])

    def attacks(
        self,
        covers: Dict[str, GrayImage],
        watermarks: Dict[str, BinaryWatermark],
        specs: Optional[Sequence[AttackSpec]] = None,
        b: Optional[float] = None,
        seed: Optional[int] = None
    ) -> pd.DataFrame:
        """Таблица 5: атаки при фиксированном b."""
        specs = list(specs) if specs is not None else default_attack_specs(seed)
        b = settings.embed_b if b is None else b
        frames = []
        for cover_name, cover in covers.items():
            for wm_name, wm in watermarks.items():
                key = build_key(cover.height, wm.side, b=b, encoding=cover.encoding)
                frame = robustness_frame(robustness_report(cover, wm, key, specs))
                frame.insert(0, "watermark", wm_name)
                frame.insert(0, "cover", cover_name)
                frames.append(frame)
        if not frames:
            return pd.DataFrame(columns=["cover", "watermark"] + ROBUSTNESS_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    def permuted_embedding(
        self,
        covers: Dict[str, GrayImage],
        watermarks: Dict[str, BinaryWatermark],
        cfg: GAConfig,
        b: Optional[float] = None
    ) -> pd.DataFrame:
        """
        Таблица 6: ГА-предобработка, встраивание и извлечение с ключом и без.

        Для каждого знака ГА запускается один раз; найденная перестановка
        используется для всех покрытий.
        """
        b = settings.embed_b if b is None else b
        records = []
        for wm_name, wm in watermarks.items():
            best, stats = evolve(wm, cfg, run_rng(cfg.rng_seed))
            permuted = apply_permutation(wm, best.perm)

            for cover_name, cover in covers.items():
                key = build_key(
                    cover.height, wm.side, b=b, perm=best.perm,
                    rng_seed=cfg.rng_seed, encoding=cover.encoding
                )
                marked = embed(cover, permuted, key)
                keyless: WatermarkKey = key.model_copy(update={"perm": None})
                records.append({
                    "cover": cover_name,
                    "watermark": wm_name,
                    "psnr": format_number(psnr(cover, marked)),
                    "nc": format_number(_safe_nc(wm, extract(marked, key))),
                    "nc_without_key": format_number(_safe_nc(wm, extract(marked, keyless))),
                    "ga_fitness": format_number(stats.nc_final)
                })
        return pd.DataFrame(
            records,
            columns=["cover", "watermark", "psnr", "nc", "nc_without_key", "ga_fitness"]
        )


# Глобальный экземпляр
experiment_service = ExperimentService()
