from ._cartonsynth import (
    ConfigError,
    DataError,
    generate,
    reconstruct_contours,
    segment_surfaces,
    solve_homography,
    validate_instance,
)

__all__ = [
    "ConfigError",
    "DataError",
    "generate",
    "reconstruct_contours",
    "segment_surfaces",
    "solve_homography",
    "validate_instance",
]
