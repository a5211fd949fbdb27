from pydantic_settings import BaseSettings
from typing import List, Literal, Optional, Tuple
from functools import lru_cache


class Settings(BaseSettings):
    """Настройки приложения из переменных окружения."""

    # Приложение
    app_name: str = "Hadamark"
    app_version: str = "1.0.0"
    log_level: str = "INFO"

    # Встраивание
    hadamard_order: Optional[int] = None
    embed_b: float = 2.01
    real_default_b: float = 0.01
    coeff_a: str = "3,3"
    coeff_b: str = "3,5"
    strict_margin: bool = False

    # Генетический алгоритм
    ga_pop_size: int = 20
    ga_generations: int = 50
    ga_selection_pressure: float = 1.5
    ga_crossover: str = "X"
    ga_mutation: str = "InvM"
    ga_runs: int = 10
    ga_duplicate_retries: int = 50
    default_seed: int = 2012

    # Атаки
    jpeg_qualities: str = "90,80"
    gaussian_mean: float = 0.0
    gaussian_variance: float = 0.001
    gaussian_scale: Literal["unit", "byte"] = "byte"
    salt_pepper_density: float = 0.01

    # Эксперименты
    b_grid: str = "2.01,2,1.99"
    results_dir: str = "evaluation/results"
    max_workers: int = 1

    class Config:
        env_file = ".env"
        env_prefix = "HADAMARK_"
        case_sensitive = False

    @property
    def coeff_a_pos(self) -> Tuple[int, int]:
        return _parse_position(self.coeff_a)

    @property
    def coeff_b_pos(self) -> Tuple[int, int]:
        return _parse_position(self.coeff_b)

    @property
    def b_grid_values(self) -> List[float]:
        return [float(v) for v in self.b_grid.split(",") if v.strip()]

    @property
    def jpeg_quality_values(self) -> List[int]:
        return [int(v) for v in self.jpeg_qualities.split(",") if v.strip()]


def _parse_position(raw: str) -> Tuple[int, int]:
    row, col = (int(part.strip()) for part in raw.split(","))
    return row, col


@lru_cache()
def get_settings() -> Settings:
    return Settings()


# Глобальный экземпляр
settings = get_settings()
