"""Python bindings for the seqisp library."""

from ._core import (
    MODULES,
    PARAM_COUNTS,
    TOTAL_PARAMS,
    FormatError,
    InvalidArgument,
    IoError,
    NumericError,
    ParamPredictor,
    PenaltyConfig,
    SequencePolicy,
    Trainer,
    apply_checkpoint,
    generate_pair,
    make_policy,
    module_forward,
    module_vjp,
    oracle_best,
    penalty,
    pipeline_gradient,
    reward,
    run_pipeline,
    temperature,
)

__all__ = [
    "MODULES",
    "PARAM_COUNTS",
    "TOTAL_PARAMS",
    "FormatError",
    "InvalidArgument",
    "IoError",
    "NumericError",
    "ParamPredictor",
    "PenaltyConfig",
    "SequencePolicy",
    "Trainer",
    "apply_checkpoint",
    "generate_pair",
    "make_policy",
    "module_forward",
    "module_vjp",
    "oracle_best",
    "penalty",
    "pipeline_gradient",
    "reward",
    "run_pipeline",
    "temperature",
]
