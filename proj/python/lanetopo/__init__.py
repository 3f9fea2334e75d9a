"""Lane topology geometry, metrics and synthetic scenes (C++ core)."""

from ._core import (
    ConfigError,
    IoError,
    SchemaError,
    assemble_lc_queries,
    augment_with_endpoints,
    average_precision,
    bezier_to_polyline,
    denormalize_points,
    discrete_frechet,
    evaluate,
    evaluate_files,
    f_scale,
    generate_scene,
    infer,
    init_mlp,
    normalize_points,
    ols,
    perturb_scene,
    point_pooling,
    resample_polyline,
    successor_gap,
)

__all__ = [
    "ConfigError",
    "IoError",
    "SchemaError",
    "assemble_lc_queries",
    "augment_with_endpoints",
    "average_precision",
    "bezier_to_polyline",
    "denormalize_points",
    "discrete_frechet",
    "evaluate",
    "evaluate_files",
    "f_scale",
    "generate_scene",
    "infer",
    "init_mlp",
    "normalize_points",
    "ols",
    "perturb_scene",
    "point_pooling",
    "resample_polyline",
    "successor_gap",
]
