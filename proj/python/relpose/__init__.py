"""Robust relative pose estimation between keypoint sets."""

import json

from ._core import (
    ConsistencyParams,
    GenSpec,
    IoError,
    KeypointSet,
    MatchResult,
    ParseError,
    RigidTransform,
    ScenarioPair,
    SolverConfig,
    generate,
    load_scenario,
    max_eigenvector,
    random_rotation,
    rotation_error,
    solve,
    translation_error,
    tune,
)
from ._core import evaluate as _evaluate


def evaluate(pairs, gamma=None, config=None):
    """Benchmark report for a list of ScenarioPairs, as a dict."""
    gamma = ConsistencyParams() if gamma is None else gamma
    config = SolverConfig() if config is None else config
    return json.loads(_evaluate(list(pairs), gamma, config))


__all__ = [
    "ConsistencyParams",
    "GenSpec",
    "IoError",
    "KeypointSet",
    "MatchResult",
    "ParseError",
    "RigidTransform",
    "ScenarioPair",
    "SolverConfig",
    "evaluate",
    "generate",
    "load_scenario",
    "max_eigenvector",
    "random_rotation",
    "rotation_error",
    "solve",
    "translation_error",
    "tune",
]
