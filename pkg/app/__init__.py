from app.models.images import BinaryWatermark, GrayImage
from app.models.schemas import (
    AttackSpec,
    CrossoverKind,
    EmbedParams,
    Encoding,
    GAConfig,
    MutationKind,
    RunStats,
    WatermarkKey
)

__all__ = [
    "AttackSpec",
    "BinaryWatermark",
    "CrossoverKind",
    "EmbedParams",
    "Encoding",
    "GAConfig",
    "GrayImage",
    "MutationKind",
    "RunStats",
    "WatermarkKey"
]
