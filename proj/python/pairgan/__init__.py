"""Pairing-regularized GAN toys on 2-D targets.

Thin wrapper over the C++ core. Arrays are float64 with one point per row;
configs are the same INI-style documents the command line reads, or the
name of a built-in preset.
"""

from ._core import (
    TrainingError,
    fnv1a_hex,
    knn_radii,
    normalize_config,
    pairing_loss,
    prdc,
    preset,
    presets,
    run,
    run_suite,
    sample_derangement,
    sample_target,
    scatter_svg,
    summarize,
    train,
)

__all__ = [
    "TrainingError",
    "fnv1a_hex",
    "knn_radii",
    "normalize_config",
    "pairing_loss",
    "prdc",
    "preset",
    "presets",
    "run",
    "run_suite",
    "sample_derangement",
    "sample_target",
    "scatter_svg",
    "summarize",
    "train",
]
