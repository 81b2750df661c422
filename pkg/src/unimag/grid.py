"""Uniform time grids and the trapezoid quadratures that live on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

__all__ = ["TimeGrid", "cumulative_integral", "integral"]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform discretization of ``[t0, t1]`` into ``steps`` cells."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("grid endpoints must be finite")
        if not self.t1 > self.t0:
            raise ValueError(f"grid requires t1 > t0, got t0={self.t0}, t1={self.t1}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"grid requires an integer steps >= 1, got {self.steps}")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps + 1)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def refined(self, factor: int) -> "TimeGrid":
        """Same window with ``factor`` times as many cells; node ``j`` maps to ``factor * j``."""
        return TimeGrid(self.t0, self.t1, self.steps * factor)


def cumulative_integral(samples: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Prefix integrals ``F[j] = int_{t0}^{t_j} f`` by the composite trapezoid rule.

    ``samples`` has the node axis first; ``F[0]`` is zero.
    """
    return cumulative_trapezoid(samples, dx=grid.h, axis=0, initial=0)


def integral(samples: np.ndarray, grid: TimeGrid) -> np.ndarray:
    return trapezoid(samples, dx=grid.h, axis=0)
