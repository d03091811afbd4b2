"""Zeroth-order optimization with sharpness-aware, variance-adaptive steps.

Thin wrapper over the compiled core; see ``help(zosa.run)`` and friends.
"""

from ._core import (
    ConfigError,
    DimensionError,
    Error,
    EvaluationError,
    NonFiniteError,
    PeerError,
    classical_estimate,
    cosine_similarity,
    eval_function,
    eval_gradient,
    loss_std,
    one_sided_estimate,
    run,
    run_experiment,
    validate,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "Error",
    "EvaluationError",
    "NonFiniteError",
    "PeerError",
    "classical_estimate",
    "cosine_similarity",
    "eval_function",
    "eval_gradient",
    "loss_std",
    "one_sided_estimate",
    "run",
    "run_experiment",
    "validate",
]
