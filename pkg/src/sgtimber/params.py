"""Uncertain-parameter hyperrectangles with independent uniform marginals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidConfigurationError, InvalidCountError, OutOfDomainError


@dataclass(frozen=True)
class ParameterSpace:
    """Product of intervals ``[a_n, b_n]`` carrying the uniform density."""

    ranges: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ranges = tuple((float(a), float(b)) for a, b in self.ranges)
        if not ranges:
            raise InvalidConfigurationError("a parameter space needs at least one dimension")
        for a, b in ranges:
            if not a < b:
                raise InvalidConfigurationError(f"empty or inverted range ({a}, {b})")
        object.__setattr__(self, "ranges", ranges)

    @classmethod
    def from_bounds(cls, lower: Sequence[float], upper: Sequence[float]) -> "ParameterSpace":
        return cls(tuple(zip(lower, upper)))

    @property
    def dim(self) -> int:
        return len(self.ranges)

    @property
    def lower(self) -> np.ndarray:
        return np.array([a for a, _ in self.ranges])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b for _, b in self.ranges])

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, points, rtol: float = 1e-12) -> np.ndarray:
        """Boolean mask of the rows of ``points`` lying inside the box."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        slack = rtol * (self.upper - self.lower)
        return np.all((pts >= self.lower - slack) & (pts <= self.upper + slack), axis=1)

    def density(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        value = 1.0 / np.prod(self.upper - self.lower)
        return np.where(self.contains(pts, rtol=0.0), value, 0.0)

    def to_json(self) -> dict:
        return {"ranges": [list(r) for r in self.ranges]}

    @classmethod
    def from_json(cls, data: dict) -> "ParameterSpace":
        return cls(tuple(tuple(r) for r in data["ranges"]))


def sample_uniform(space: ParameterSpace, count: int, seed: int) -> np.ndarray:
    """``count`` independent draws from the uniform law on ``space``, one per row.

    Uses numpy's PCG64 generator, so a given seed reproduces the same
    stream on every platform.
    """
    if count < 1:
        raise InvalidCountError("count must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random((count, space.dim))
    return space.lower + (space.upper - space.lower) * u


def map_affine(reference_point, space: ParameterSpace) -> np.ndarray:
    """Map ``[-1, 1]^N`` onto the box: ``a + (b - a) (x + 1) / 2``."""
    x = np.asarray(reference_point, dtype=float)
    if x.shape[-1] != space.dim:
        raise InvalidConfigurationError(f"expected {space.dim} coordinates, got {x.shape[-1]}")
    if np.any(np.abs(x) > 1.0):
        raise OutOfDomainError("reference coordinates must lie in [-1, 1]")
    a, b = space.lower, space.upper
    out = a + (b - a) * (x + 1.0) / 2.0
    return np.where(x == 1.0, b, out)


def map_to_reference(point, space: ParameterSpace) -> np.ndarray:
    """Inverse of :func:`map_affine`."""
    p = np.asarray(point, dtype=float)
    a, b = space.lower, space.upper
    return 2.0 * (p - a) / (b - a) - 1.0
