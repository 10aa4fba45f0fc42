"""Six two-class Gaussian scenarios (5 features, 50 rows per class)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import UnknownScenarioError
from .rng import RngStream


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    class0_mean: float
    class0_sd: float
    class1_mean: float
    class1_sd: float
    n_per_class: int = 50
    p: int = 5

    def __post_init__(self):
        if self.class0_sd <= 0 or self.class1_sd <= 0:
            raise ValueError("standard deviations must be positive")


_BUILTIN = (
    ScenarioSpec("S1", 5, 5, 10, 10),
    ScenarioSpec("S2", 5, 5, 10, 5),
    ScenarioSpec("S3", 5, 5, 10, 4),
    ScenarioSpec("S4", 5, 4, 10, 4),
    ScenarioSpec("S5", 5, 5, 5, 10),
    ScenarioSpec("S6", 3, 3, 1, 3),
)


def builtin_specs() -> list[ScenarioSpec]:
    return list(_BUILTIN)


def get_spec(scenario_id: str) -> ScenarioSpec:
    for s in _BUILTIN:
        if s.id == scenario_id.upper():
            return s
    raise UnknownScenarioError(f"unknown scenario {scenario_id!r}; expected one of S1..S6")


def generate(spec: ScenarioSpec, rng: RngStream) -> Dataset:
    """Class-0 block first, then class 1; every feature i.i.d. normal within a block.

    Normals are filled row-major from one sampler, class-0 block first.
    """
    m = spec.n_per_class
    z = rng.sampler().normal(2 * m * spec.p).reshape(2 * m, spec.p)
    X = np.empty_like(z)
    X[:m] = spec.class0_mean + spec.class0_sd * z[:m]
    X[m:] = spec.class1_mean + spec.class1_sd * z[m:]
    y = np.repeat([0, 1], m)
    return Dataset(X, y, tuple(f"x{j + 1}" for j in range(spec.p)), spec.id)


def filament_layout() -> tuple[Dataset, np.ndarray]:
    """Small 2-D layout where the sphere and the chain disagree.

    A class-0 blob surrounds the query at the origin while a thin class-1
    filament starts just beside it and runs off along the x axis. Returns
    ``(training data, query)``. Among the 5 nearest points 3 are class 0; the
    5-step chain walks the filament and sees only class 1.
    """
    filament = [[1.0 + 0.8 * i, 0.0] for i in range(6)]
    blob = [[0.0, 1.2], [0.0, -1.2], [-1.2, 0.0], [-2.0, -2.0], [-2.5, 0.0], [-2.0, 2.0], [-0.5, 2.5]]
    X = np.array(filament + blob)
    y = np.array([1] * len(filament) + [0] * len(blob))
    return Dataset(X, y, ("x1", "x2"), "filament"), np.zeros(2)
