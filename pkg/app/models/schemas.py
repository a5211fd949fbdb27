"""Pydantic модели параметров, ключей и результатов."""
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator


class Encoding(str, Enum):
    BYTE = "byte"
    REAL = "real"


class CrossoverKind(str, Enum):
    X = "X"
    OX = "OX"
    PMX = "PMX"
    CX = "CX"
    ER = "ER"


class MutationKind(str, Enum):
    INSM = "InsM"
    SWM = "SwM"
    INVM = "InvM"
    SCM = "ScM"


class AttackKind(str, Enum):
    NONE = "none"
    JPEG = "jpeg"
    GAUSSIAN = "gaussian"
    SALT_PEPPER = "salt_pepper"


class NoiseScale(str, Enum):
    """Шкала, в которой заданы среднее и дисперсия гауссова шума."""
    UNIT = "unit"
    BYTE = "byte"


# =============================================================================
# Embedding
# =============================================================================

class EmbedParams(BaseModel):
    """Параметры встраивания одного бита в блок (позиции с единицы)."""
    b: float = Field(..., ge=0.0, description="Margin parameter")
    coeff_a: Tuple[int, int] = (3, 3)
    coeff_b: Tuple[int, int] = (3, 5)
    order: int = Field(8, ge=1, description="Hadamard order 4t")
    strict_margin: bool = False

    @model_validator(mode="after")
    def _check_positions(self) -> "EmbedParams":
        if self.coeff_a == self.coeff_b:
            raise ValueError("coeff_a and coeff_b must differ")
        for pos in (self.coeff_a, self.coeff_b):
            if not all(1 <= p <= self.order for p in pos):
                raise ValueError(f"coefficient {pos} lies outside order {self.order}")
            if pos == (1, 1):
                raise ValueError("the (1,1) coefficient cannot carry a bit")
        same_row = self.coeff_a[0] == self.coeff_b[0]
        same_col = self.coeff_a[1] == self.coeff_b[1]
        if not (same_row or same_col):
            raise ValueError("coefficients must share a row or a column")
        return self

    @property
    def index_a(self) -> Tuple[int, int]:
        return self.coeff_a[0] - 1, self.coeff_a[1] - 1

    @property
    def index_b(self) -> Tuple[int, int]:
        return self.coeff_b[0] - 1, self.coeff_b[1] - 1


class WatermarkKey(BaseModel):
    """
    Все, что нужно для слепого извлечения.

    Порядок полей фиксирован: он же порядок ключей в JSON-файле.
    perm хранится с единицы; None означает тождественную перестановку.
    """
    version: int = 1
    m: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    order: int = Field(..., ge=1)
    block_side: int = Field(..., ge=1)
    b: float = Field(..., ge=0.0)
    coeff_a: Tuple[int, int] = (3, 3)
    coeff_b: Tuple[int, int] = (3, 5)
    perm: Optional[List[int]] = None
    rng_seed: Optional[int] = None

    class Config:
        json_schema_extra = {
            "example": {
                "version": 1,
                "m": 64,
                "n": 512,
                "order": 8,
                "block_side": 8,
                "b": 2.01,
                "coeff_a": [3, 3],
                "coeff_b": [3, 5],
                "perm": None,
                "rng_seed": None
            }
        }

    @model_validator(mode="after")
    def _check_geometry(self) -> "WatermarkKey":
        if self.version != 1:
            raise ValueError(f"unsupported key version {self.version}")
        if self.block_side != self.n // self.m:
            raise ValueError(f"block_side must be n // m = {self.n // self.m}, got {self.block_side}")
        if self.m * self.block_side > self.n:
            raise ValueError("m blocks do not fit into the cover side")
        if self.order > self.block_side:
            raise ValueError(f"order {self.order} exceeds block side {self.block_side}")
        if self.perm is not None:
            expected = self.m * self.m
            if len(self.perm) != expected or sorted(self.perm) != list(range(1, expected + 1)):
                raise ValueError(f"perm must be a bijection on 1..{expected}")
        # Проверка позиций коэффициентов теми же правилами
        EmbedParams(b=self.b, coeff_a=self.coeff_a, coeff_b=self.coeff_b, order=self.order)
        return self

    @property
    def params(self) -> EmbedParams:
        return EmbedParams(b=self.b, coeff_a=self.coeff_a, coeff_b=self.coeff_b, order=self.order)

    @property
    def is_identity(self) -> bool:
        return self.perm is None or self.perm == list(range(1, self.m * self.m + 1))

    def perm_array(self) -> Optional[np.ndarray]:
        """Перестановка с нуля или None для тождественной."""
        if self.is_identity:
            return None
        return np.asarray(self.perm, dtype=np.int64) - 1


# =============================================================================
# Genetic algorithm
# =============================================================================

class GAConfig(BaseModel):
    """Параметры стационарного ГА."""
    pop_size: int = Field(20, ge=4, description="Population size mu")
    generations: int = Field(50, ge=0)
    selection_pressure: float = Field(1.5, ge=1.0, le=2.0, description="Linear ranking factor s")
    crossover: CrossoverKind = CrossoverKind.X
    mutation: MutationKind = MutationKind.INVM
    rng_seed: int = Field(2012, ge=0, lt=2 ** 64)
    duplicate_retries: int = Field(50, ge=0)


class RunStats(BaseModel):
    """Статистика одного запуска ГА."""
    nc0: float
    nc_final: float
    found_at: int = Field(..., ge=0)
    per_generation_best: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_elitism(self) -> "RunStats":
        if self.nc_final > self.nc0:
            raise ValueError("nc_final cannot exceed nc0 under elitism")
        return self


class ExperimentRow(BaseModel):
    """Строка таблицы сравнения операторов."""
    crossover: CrossoverKind
    mutation: MutationKind
    nc0: float
    av0: float
    nc_final: float
    av_final: float
    iter: float


# =============================================================================
# Attacks & metrics
# =============================================================================

class AttackSpec(BaseModel):
    """Описание атаки; параметры задаются только для своего вида."""
    kind: AttackKind
    quality: Optional[int] = None
    mean: Optional[float] = None
    variance: Optional[float] = None
    density: Optional[float] = None
    noise_scale: Optional[NoiseScale] = None
    rng_seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "AttackSpec":
        relevant = {
            AttackKind.NONE: set(),
            AttackKind.JPEG: {"quality"},
            AttackKind.GAUSSIAN: {"mean", "variance"},
            AttackKind.SALT_PEPPER: {"density"},
        }[self.kind]

        for name in ("quality", "mean", "variance", "density"):
            present = getattr(self, name) is not None
            if present and name not in relevant:
                raise ValueError(f"parameter '{name}' is not used by {self.kind.value} attack")
            if not present and name in relevant:
                raise ValueError(f"{self.kind.value} attack requires '{name}'")
        if self.noise_scale is not None and self.kind is not AttackKind.GAUSSIAN:
            raise ValueError(f"parameter 'noise_scale' is not used by {self.kind.value} attack")

        if self.quality is not None and not 1 <= self.quality <= 100:
            raise ValueError("jpeg quality must be in 1..100")
        if self.variance is not None and self.variance < 0:
            raise ValueError("gaussian variance must be non-negative")
        if self.density is not None and not 0.0 <= self.density <= 1.0:
            raise ValueError("salt-and-pepper density must be in [0, 1]")
        return self

    @classmethod
    def none(cls) -> "AttackSpec":
        return cls(kind=AttackKind.NONE)

    @classmethod
    def jpeg(cls, quality: int) -> "AttackSpec":
        return cls(kind=AttackKind.JPEG, quality=quality)

    @classmethod
    def gaussian(
        cls,
        mean: float,
        variance: float,
        rng_seed: Optional[int] = None,
        noise_scale: Optional[NoiseScale] = None
    ) -> "AttackSpec":
        return cls(
            kind=AttackKind.GAUSSIAN,
            mean=mean,
            variance=variance,
            rng_seed=rng_seed,
            noise_scale=noise_scale
        )

    @classmethod
    def salt_pepper(cls, density: float, rng_seed: Optional[int] = None) -> "AttackSpec":
        return cls(kind=AttackKind.SALT_PEPPER, density=density, rng_seed=rng_seed)

    @property
    def label(self) -> str:
        if self.kind is AttackKind.JPEG:
            return f"jpg{self.quality}"
        if self.kind is AttackKind.GAUSSIAN:
            return "Gauss"
        if self.kind is AttackKind.SALT_PEPPER:
            return "S&P"
        return "none"

    @property
    def param(self) -> str:
        if self.kind is AttackKind.JPEG:
            return str(self.quality)
        if self.kind is AttackKind.GAUSSIAN:
            return f"{self.mean}/{self.variance}"
        if self.kind is AttackKind.SALT_PEPPER:
            return str(self.density)
        return ""


class QualityReport(BaseModel):
    """MSE, PSNR и NC для пары покрытие/результат."""
    mse: float = Field(..., ge=0.0)
    psnr: float
    nc: Optional[float] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "QualityReport":
        if (self.mse == 0.0) != math.isinf(self.psnr):
            raise ValueError("mse == 0 must coincide with psnr == +inf")
        return self


class RobustnessRow(BaseModel):
    attack: str
    param: str
    psnr: float
    nc: float
