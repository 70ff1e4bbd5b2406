"""Point cloud sharp-edge and boundary classification."""

from ._core import (
    IoError,
    KnnIndex,
    Model,
    ParseError,
    PointCloud,
    TrainResult,
    __version__,
    ca_classify,
    ca_ratios,
    classify,
    confusion,
    extract_features,
    generate,
    load_model,
    parse_feature_mask,
    read_ply,
    read_xyz,
    scores,
    train,
    write_classified_ply,
    write_ply,
)

__all__ = [
    "IoError",
    "KnnIndex",
    "Model",
    "ParseError",
    "PointCloud",
    "TrainResult",
    "__version__",
    "ca_classify",
    "ca_ratios",
    "classify",
    "confusion",
    "extract_features",
    "generate",
    "load_model",
    "parse_feature_mask",
    "read_ply",
    "read_xyz",
    "scores",
    "train",
    "write_classified_ply",
    "write_ply",
]
