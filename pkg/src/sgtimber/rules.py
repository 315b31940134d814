"""Univariate Clenshaw-Curtis rules and level-to-knots maps."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidConfigurationError, InvalidCountError, InvalidLevelError

#: reference nodes closer than this to 0 are snapped to exactly 0
SNAP_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class UnivariateRule:
    """Nodes on ``[a, b]`` and probability weights for the uniform law there."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float
    nested: bool = True

    @property
    def node_count(self) -> int:
        return self.nodes.size


def _reference_cc_nodes(K: int) -> np.ndarray:
    # cos(j pi / n) written as sin(pi (n - 2j) / (2n)): exactly antisymmetric,
    # and for n a power of two the angle fraction is a dyadic rational, so
    # nodes shared between nested levels come out bit-identical.
    n = K - 1
    x = np.sin(np.pi * ((n - 2 * np.arange(K)) / (2.0 * n)))
    x[np.abs(x) < SNAP_TOL] = 0.0
    return x


def _to_interval(x: np.ndarray, a: float, b: float) -> np.ndarray:
    out = a + (b - a) * (x + 1.0) / 2.0
    out[x == 1.0] = b
    out[x == -1.0] = a
    return out


def clenshaw_curtis_nodes(K: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """``cos((j - 1) pi / (K - 1))``, ``j = 1..K``, mapped to ``[a, b]`` (decreasing).

    ``K = 1`` gives the interval midpoint.
    """
    if K < 1:
        raise InvalidCountError("a rule needs at least one node")
    if not a < b:
        raise InvalidConfigurationError("need a < b")
    # the midpoint goes through the same map as the other levels so nesting stays exact
    ref = np.zeros(1) if K == 1 else _reference_cc_nodes(K)
    return _to_interval(ref, a, b)


def clenshaw_curtis_weights(K: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Probability weights (summing to one) of the ``K``-point rule.

    Closed-form cosine sums; the weights do not depend on ``[a, b]`` because
    they absorb the uniform density.
    """
    if K < 1:
        raise InvalidCountError("a rule needs at least one node")
    if K == 1:
        return np.array([1.0])
    n = K - 1
    theta = np.pi * np.arange(K) / n
    w = np.ones(K)
    for k in range(1, n // 2 + 1):
        bk = 1.0 if 2 * k == n else 2.0
        w -= bk / (4 * k * k - 1) * np.cos(2 * k * theta)
    c = np.full(K, 2.0)
    c[0] = c[-1] = 1.0
    # factor 1/2 turns the [-1, 1] Lebesgue weights into probability weights
    w = c * w / n / 2.0
    return 0.5 * (w + w[::-1])


@functools.lru_cache(maxsize=4096)
def _cached_cc(K: int, a: float, b: float) -> UnivariateRule:
    nodes = clenshaw_curtis_nodes(K, a, b)
    weights = clenshaw_curtis_weights(K, a, b)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return UnivariateRule(nodes, weights, a, b, nested=True)


class ClenshawCurtis:
    """Knot family: ``rule(K, a, b)`` returns the ``K``-point rule on ``[a, b]``."""

    name = "clenshaw_curtis"
    nested = True

    def __call__(self, K: int, a: float, b: float) -> UnivariateRule:
        return _cached_cc(int(K), float(a), float(b))

    def __repr__(self):
        return "ClenshawCurtis()"


def level_to_knots_doubling(k: int) -> int:
    """``m(1) = 1`` and ``m(k) = 2^(k-1) + 1`` beyond."""
    if k < 1:
        raise InvalidLevelError("levels start at 1")
    return 1 if k == 1 else 2 ** (k - 1) + 1


def level_to_knots_linear(k: int) -> int:
    if k < 1:
        raise InvalidLevelError("levels start at 1")
    return k


RULES = {"clenshaw_curtis": ClenshawCurtis()}
LEVEL_TO_KNOTS = {"doubling": level_to_knots_doubling, "linear": level_to_knots_linear}
