"""Uniformly sampled signal plus the provenance needed to regenerate it."""

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class Trajectory:
    """Samples ``values[j]`` taken at times ``(burn_in + j) * dt``.

    ``spec`` is the model that produced the series (``SdeSpec`` or
    ``GarchSpec``, or ``None`` for externally loaded data); ``stats`` carries
    integrator bookkeeping such as internal step or clamp counts.
    """

    dt: float
    values: np.ndarray
    burn_in: int = 0
    seed: int | None = None
    spec: Any = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    def __len__(self):
        return self.values.shape[0]

    @property
    def times(self):
        return (self.burn_in + np.arange(len(self))) * self.dt
