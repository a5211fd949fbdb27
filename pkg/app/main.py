"""
Точка входа командной строки Hadamark.

Запуск:
    python -m app.main <команда> [аргументы]

Команды:
    ga          Поиск перестановки водяного знака генетическим алгоритмом
    embed       Встраивание водяного знака
    extract     Слепое извлечение водяного знака
    attack      Атака на изображение
    metrics     PSNR и NC
    experiment  Воспроизведение таблиц экспериментов (2, 4, 5, 6)
"""
import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from loguru import logger

from app.config import settings
from app.exceptions import WatermarkError
from app.ga.experiment import evolve_runs, summarize_runs
from app.ga.individual import apply_permutation
from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import AttackKind, CrossoverKind, MutationKind, NoiseScale
from app.services.attack_service import attack, make_spec
from app.services.codec_service import build_key, embed, extract
from app.services.experiment_service import TABLE_IDS, experiment_service, ga_config_from_settings
from app.services.key_store import load_key, save_key, save_permutation
from app.services.metrics_service import nc, psnr
from app.utils.formatting import format_number, write_csv
from app.utils.image_io import load_gray, load_watermark, save_gray, save_watermark
from app.utils.synthetic import synthetic_cover, synthetic_watermark


logger.remove()
logger.add(
    sys.stderr,
    level=settings.log_level,
    format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_ga(args: argparse.Namespace) -> int:
    wm = load_watermark(args.watermark)
    cfg = ga_config_from_settings(
        seed=args.seed,
        pop_size=args.pop,
        generations=args.gens,
        selection_pressure=args.pressure,
        crossover=args.crossover,
        mutation=args.mutation
    )

    results = evolve_runs(wm, cfg, args.runs, args.workers)
    for run_index, (_, stats) in enumerate(results):
        print(
            f"run={run_index} nc0={format_number(stats.nc0)} "
            f"nc_final={format_number(stats.nc_final)} found_at={stats.found_at}"
        )
    if args.runs > 1:
        row = summarize_runs(cfg.crossover, cfg.mutation, [stats for _, stats in results])
        print(
            f"nc0={format_number(row.nc0)} av0={format_number(row.av0)} "
            f"nc_final={format_number(row.nc_final)} av_final={format_number(row.av_final)} "
            f"iter={format_number(row.iter)}"
        )

    # Лучший запуск; при равенстве - с меньшим номером
    best, _ = min(results, key=lambda item: item[1].nc_final)
    key = build_key(args.cover_side, wm.side, b=args.b, order=args.order, perm=best.perm, rng_seed=cfg.rng_seed)
    save_key(key, args.out_key)
    if args.perm_out:
        save_permutation(best.perm, wm.side, args.perm_out)

    logger.success(f"Key with best permutation (NC={best.fitness:.4f}) written to {args.out_key}")
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    cover = load_gray(args.cover)
    wm = load_watermark(args.watermark)

    if args.key:
        key = load_key(args.key)
    else:
        key = build_key(cover.height, wm.side, b=args.b, order=args.order, encoding=cover.encoding)

    perm = key.perm_array()
    payload = apply_permutation(wm, perm) if perm is not None else wm
    marked = embed(cover, payload, key, strict_margin=args.strict_margin or None)

    save_gray(marked, args.out)
    if args.key_out:
        save_key(key, args.key_out)

    print(f"psnr={format_number(psnr(cover, marked))}")
    logger.success(f"Watermarked image written to {args.out}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    img = load_gray(args.image)
    key = load_key(args.key)
    extracted = extract(img, key)

    if args.out:
        save_watermark(extracted, args.out)
    if args.watermark:
        print(f"nc={format_number(nc(load_watermark(args.watermark), extracted))}")

    logger.success(f"Extracted {extracted.side}x{extracted.side} watermark")
    return 0


def cmd_attack(args: argparse.Namespace) -> int:
    img = load_gray(args.image)
    params = {
        AttackKind.NONE.value: {},
        AttackKind.JPEG.value: {"quality": args.quality},
        AttackKind.GAUSSIAN.value: {
            "mean": args.mean,
            "variance": args.variance,
            "noise_scale": args.noise_scale,
            "rng_seed": args.seed
        },
        AttackKind.SALT_PEPPER.value: {"density": args.density, "rng_seed": args.seed},
    }[args.kind]
    spec = make_spec(args.kind, **params)

    attacked = attack(img, spec)
    save_gray(attacked, args.out)
    print(f"psnr={format_number(psnr(img, attacked))}")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    parts = []
    if args.cover and args.marked:
        parts.append(f"psnr={format_number(psnr(load_gray(args.cover), load_gray(args.marked)))}")
    if args.watermark and args.extracted:
        parts.append(f"nc={format_number(nc(load_watermark(args.watermark), load_watermark(args.extracted)))}")
    if not parts:
        raise ValueError("metrics needs --cover/--marked and/or --watermark/--extracted")
    print(" ".join(parts))
    return 0


def _load_named(paths: Optional[List[str]], loader) -> Dict[str, object]:
    return {Path(p).stem: loader(p) for p in paths or []}


def _default_covers(seed: int) -> Dict[str, GrayImage]:
    return {"synthetic": synthetic_cover(512, seed)}


def _default_watermarks(seed: int) -> Dict[str, BinaryWatermark]:
    return {
        "dense": synthetic_watermark(64, 0.80, seed),
        "sparse": synthetic_watermark(64, 0.18, seed + 1),
    }


def cmd_experiment(args: argparse.Namespace) -> int:
    covers = _load_named(args.covers, load_gray) or _default_covers(args.seed)
    watermarks = _load_named(args.watermarks, load_watermark) or _default_watermarks(args.seed)
    cfg = ga_config_from_settings(seed=args.seed, pop_size=args.pop, generations=args.gens)

    if args.table == 2:
        frame = experiment_service.operator_grid(watermarks, cfg, args.runs, max_workers=args.workers)
    elif args.table == 4:
        frame = experiment_service.b_sweep(covers, watermarks)
    elif args.table == 5:
        frame = experiment_service.attacks(covers, watermarks, seed=args.seed)
    else:
        frame = experiment_service.permuted_embedding(covers, watermarks, cfg)

    _emit(frame, args.out)
    return 0


def _emit(frame: pd.DataFrame, out: Optional[str]) -> None:
    if out:
        write_csv(frame, out)
    else:
        frame.to_csv(sys.stdout, index=False)


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadamark",
        description=f"{settings.app_name} v{settings.app_version}: GA-pretreated blind Hadamard watermarking"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ga = sub.add_parser("ga", help="Search a watermark permutation with the steady-state GA")
    ga.add_argument("--watermark", required=True, help="Binary watermark (PBM/PGM/PNG)")
    ga.add_argument("--crossover", choices=[k.value for k in CrossoverKind], default=settings.ga_crossover)
    ga.add_argument("--mutation", choices=[k.value for k in MutationKind], default=settings.ga_mutation)
    ga.add_argument("--pop", type=int, default=settings.ga_pop_size)
    ga.add_argument("--gens", type=int, default=settings.ga_generations)
    ga.add_argument("--pressure", type=float, default=settings.ga_selection_pressure)
    ga.add_argument("--runs", type=int, default=1)
    ga.add_argument("--seed", type=int, default=settings.default_seed)
    ga.add_argument("--workers", type=int, default=settings.max_workers)
    ga.add_argument("--cover-side", type=int, default=512, help="Side of the cover the key is built for")
    ga.add_argument("--order", type=int, default=None)
    ga.add_argument("--b", type=float, default=None)
    ga.add_argument("--out-key", required=True)
    ga.add_argument("--perm-out", default=None, help="Optional text export of the permutation")
    ga.set_defaults(handler=cmd_ga)

    emb = sub.add_parser("embed", help="Embed a watermark into a cover image")
    emb.add_argument("--cover", required=True)
    emb.add_argument("--watermark", required=True)
    emb.add_argument("--out", required=True)
    emb.add_argument("--key", default=None, help="Existing key (e.g. produced by 'ga')")
    emb.add_argument("--key-out", default=None)
    emb.add_argument("--b", type=float, default=None)
    emb.add_argument("--order", type=int, default=None)
    emb.add_argument("--strict-margin", action="store_true")
    emb.set_defaults(handler=cmd_embed)

    ext = sub.add_parser("extract", help="Blindly extract a watermark")
    ext.add_argument("--image", required=True)
    ext.add_argument("--key", required=True)
    ext.add_argument("--out", default=None, help="Write the extracted mark as PBM")
    ext.add_argument("--watermark", default=None, help="Original mark to print NC against")
    ext.set_defaults(handler=cmd_extract)

    att = sub.add_parser("attack", help="Attack an image")
    att.add_argument("--image", required=True)
    att.add_argument("--kind", required=True, choices=[k.value for k in AttackKind])
    att.add_argument("--quality", type=int, default=None)
    att.add_argument("--mean", type=float, default=None)
    att.add_argument("--variance", type=float, default=None)
    att.add_argument("--density", type=float, default=None)
    att.add_argument("--noise-scale", choices=[s.value for s in NoiseScale], default=None,
                     help="Scale of --mean/--variance (settings.gaussian_scale if omitted)")
    att.add_argument("--seed", type=int, default=settings.default_seed)
    att.add_argument("--out", required=True)
    att.set_defaults(handler=cmd_attack)

    met = sub.add_parser("metrics", help="PSNR between images and NC between watermarks")
    met.add_argument("--cover", default=None)
    met.add_argument("--marked", default=None)
    met.add_argument("--watermark", default=None)
    met.add_argument("--extracted", default=None)
    met.set_defaults(handler=cmd_metrics)

    exp = sub.add_parser("experiment", help="Reproduce an experiment table as CSV")
    exp.add_argument("--table", type=int, required=True, choices=TABLE_IDS)
    exp.add_argument("--covers", nargs="+", default=None, help="Cover images (synthetic cover if omitted)")
    exp.add_argument("--watermarks", nargs="+", default=None, help="Watermarks (synthetic marks if omitted)")
    exp.add_argument("--seed", type=int, default=settings.default_seed)
    exp.add_argument("--runs", type=int, default=settings.ga_runs)
    exp.add_argument("--pop", type=int, default=settings.ga_pop_size)
    exp.add_argument("--gens", type=int, default=settings.ga_generations)
    exp.add_argument("--workers", type=int, default=settings.max_workers)
    exp.add_argument("--out", default=None, help="CSV path (standard output if omitted)")
    exp.set_defaults(handler=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        return args.handler(args)
    except (WatermarkError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
