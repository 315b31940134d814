"""Plain Monte Carlo estimates of expected values."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidCountError
from .params import ParameterSpace, sample_uniform
from .sparse_grid import evaluate_points


@dataclass(frozen=True)
class McEstimate:
    mean: float | np.ndarray
    standard_error: float | np.ndarray
    sample_count: int
    seed: int


class Welford:
    """Single-pass running mean and variance (componentwise for arrays)."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, value) -> None:
        x = np.asarray(value, dtype=float)
        self.count += 1
        d = x - self.mean
        self.mean = self.mean + d / self.count
        self._m2 = self._m2 + d * (x - self.mean)

    @property
    def variance(self):
        return self._m2 / (self.count - 1) if self.count > 1 else 0.0 * self._m2


def mc_expectation(f: Callable, space: ParameterSpace, M: int, seed: int, map_fn: Callable = map,
                   checkpoints=None):
    """Sample mean and standard error of ``f`` over ``M`` uniform draws.

    All draws come from one seeded stream before any evaluation, and values
    are accumulated in draw order, so concurrent ``map_fn`` does not change
    the result. With ``checkpoints`` (sample counts ``<= M``) a list of
    estimates for each prefix of the stream is returned instead.
    """
    if M < 2:
        raise InvalidCountError("Monte Carlo needs at least two samples")
    points = sample_uniform(space, M, seed)
    stops = sorted(set(checkpoints)) if checkpoints is not None else [M]
    if stops[0] < 2 or stops[-1] > M:
        raise InvalidCountError("checkpoints must lie in [2, M]")
    acc = Welford()
    out = []
    for value in evaluate_points(f, points[:stops[-1]], map_fn):
        acc.push(value)
        if acc.count in stops:
            se = np.sqrt(acc.variance / acc.count)
            mean = acc.mean if np.ndim(acc.mean) else float(acc.mean)
            out.append(McEstimate(mean, se if np.ndim(se) else float(se), acc.count, seed))
    return out if checkpoints is not None else out[0]
