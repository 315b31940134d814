"""Sparse grids by the combination technique, and surrogates built on them.

A sparse grid is the signed sum ``sum_i c_i f_{m(i)}`` of small tensor
interpolants. :func:`reduce` collapses the union of the tensor grids to its
distinct points and folds the ``c_i``-weighted tensor quadrature weights into
one weight per point.
"""
from __future__ import annotations

import functools
import json
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidConfigurationError, ModelEvaluationError, OutOfDomainError
from .multiindex import MultiIndexSet, combination_coefficients
from .params import ParameterSpace
from .rules import LEVEL_TO_KNOTS, RULES, ClenshawCurtis, UnivariateRule, level_to_knots_doubling


@functools.lru_cache(maxsize=4096)
def _barycentric_weights(nodes: tuple) -> np.ndarray:
    x = np.asarray(nodes)
    if x.size == 1:
        return np.ones(1)
    scale = 0.5 * (x.max() - x.min())
    xs = x / scale
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    lam = 1.0 / np.prod(diff, axis=1)
    return lam / np.max(np.abs(lam))


def lagrange_matrix(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``L[q, j] = l_j(x_q)`` for the Lagrange basis on ``nodes`` (barycentric form)."""
    nodes = np.asarray(nodes, dtype=float)
    x = np.asarray(x, dtype=float)
    if nodes.size == 1:
        return np.ones((x.size, 1))
    lam = _barycentric_weights(tuple(nodes))
    diff = x[:, None] - nodes[None, :]
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = lam / diff
        L = terms / terms.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    if rows.any():
        L[rows] = hit[rows].astype(float)
    return L


@dataclass(frozen=True, eq=False)
class TensorGrid:
    """Cartesian product of one univariate rule per dimension."""

    index: tuple[int, ...]
    rules: tuple[UnivariateRule, ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(r.node_count for r in self.rules)

    @functools.cached_property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[r.nodes for r in self.rules], indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    @functools.cached_property
    def weights(self) -> np.ndarray:
        w = np.ones(1)
        for r in self.rules:
            w = np.multiply.outer(w, r.weights).ravel()
        return w


def _rule_list(rules, space: ParameterSpace):
    if rules is None:
        rules = ClenshawCurtis()
    if callable(rules):
        return [rules] * space.dim
    rules = list(rules)
    if len(rules) != space.dim:
        raise InvalidConfigurationError(f"need one knot family per dimension ({space.dim})")
    return rules


def tensor_grid(space: ParameterSpace, index, rules=None, m: Callable[[int], int] = level_to_knots_doubling) -> TensorGrid:
    families = _rule_list(rules, space)
    per_dim = tuple(families[n](m(k), a, b) for n, (k, (a, b)) in enumerate(zip(index, space.ranges)))
    return TensorGrid(tuple(index), per_dim)


@dataclass(frozen=True, eq=False)
class SparseGrid:
    space: ParameterSpace
    index_set: MultiIndexSet
    terms: tuple[tuple[tuple[int, ...], int, TensorGrid], ...]
    rules: object = None
    m: Callable[[int], int] = level_to_knots_doubling

    @property
    def coefficients(self) -> dict:
        return {idx: c for idx, c, _ in self.terms}


def build_sparse_grid(space: ParameterSpace, index_set: MultiIndexSet, rules=None,
                      m: Callable[[int], int] = level_to_knots_doubling) -> SparseGrid:
    """Combination-technique grid; only terms with ``c_i != 0`` are kept."""
    if not isinstance(index_set, MultiIndexSet):
        index_set = MultiIndexSet(index_set, space.dim)
    if index_set.dim != space.dim:
        raise InvalidConfigurationError("index set and parameter space dimensions differ")
    coeffs = combination_coefficients(index_set)
    terms = tuple((idx, c, tensor_grid(space, idx, rules, m)) for idx, c in sorted(coeffs.items()))
    return SparseGrid(space, index_set, terms, rules, m)


@dataclass(frozen=True, eq=False)
class ReducedSparseGrid:
    """Distinct points of a sparse grid with their combined quadrature weights."""

    points: np.ndarray
    weights: np.ndarray
    back_map: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @functools.cached_property
    def _lookup(self) -> dict:
        return {tuple(p): k for k, p in enumerate(self.points)}

    def index_of(self, point) -> int | None:
        return self._lookup.get(tuple(np.asarray(point, dtype=float) + 0.0))


def reduce(grid: SparseGrid) -> ReducedSparseGrid:
    """Merge coincident points (exact match) and sum their signed weights.

    Points are returned in lexicographic order of their coordinates.
    """
    blocks = [t.points for _, _, t in grid.terms]
    # adding 0.0 turns -0.0 into 0.0 so both hash alike
    allpts = np.concatenate(blocks, axis=0) + 0.0
    unique, inverse = np.unique(allpts, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    weights = np.zeros(unique.shape[0])
    back_map = []
    start = 0
    for (_, c, t), blk in zip(grid.terms, blocks):
        sel = inverse[start:start + blk.shape[0]]
        np.add.at(weights, sel, c * t.weights)
        back_map.append(sel)
        start += blk.shape[0]
    return ReducedSparseGrid(unique, weights, tuple(back_map))


def _as_row(value) -> np.ndarray:
    return np.atleast_1d(np.asarray(value, dtype=float)).ravel()


def evaluate_points(f: Callable, points: np.ndarray, map_fn: Callable = map, index=None) -> list:
    """Apply ``f`` to every row of ``points``; results keep the row order.

    ``map_fn`` may be an executor's ``map`` for concurrent evaluation.
    """
    def call(p):
        try:
            return f(p)
        except ModelEvaluationError:
            raise
        except Exception as exc:
            raise ModelEvaluationError(p, exc, index=index) from exc

    return list(map_fn(call, [np.array(p) for p in points]))


@dataclass(frozen=True, eq=False)
class Surrogate:
    """Sparse-grid interpolant of stored model values.

    ``values`` has one row per reduced-grid point; scalar QoIs are stored
    as a single column and returned as scalars.
    """

    grid: SparseGrid
    reduced: ReducedSparseGrid
    values: np.ndarray
    scalar: bool = True
    new_evaluations: int = 0
    extrapolation: str = "error"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != self.reduced.size:
            raise InvalidConfigurationError("one value row per grid point is required")
        object.__setattr__(self, "values", v)

    @property
    def space(self) -> ParameterSpace:
        return self.grid.space

    @property
    def size(self) -> int:
        return self.reduced.size

    def _out(self, arr):
        return arr[..., 0] if self.scalar else arr

    def quadrature(self):
        return self._out(self.reduced.weights @ self.values)

    def interpolate(self, queries):
        return interpolate(self, queries)

    def __call__(self, queries):
        return interpolate(self, queries)

    def with_values(self, values, scalar=None) -> "Surrogate":
        """Same grid, other stored values (e.g. powers of ``f`` or one component)."""
        return Surrogate(self.grid, self.reduced, values, self.scalar if scalar is None else scalar,
                         0, self.extrapolation)


def evaluate_on_grid(f: Callable, grid: SparseGrid, reduced: ReducedSparseGrid | None = None,
                     recycle_from: Surrogate | None = None, map_fn: Callable = map,
                     cache: dict | None = None) -> Surrogate:
    """Evaluate ``f`` on the grid, reusing values already known.

    Values are taken from ``recycle_from`` (matched by exact point identity)
    and from ``cache`` (a ``tuple(point) -> value`` dict that is updated in
    place). ``Surrogate.new_evaluations`` counts the calls to ``f``.
    """
    reduced = reduce(grid) if reduced is None else reduced
    known: dict = {}
    if recycle_from is not None:
        for p, v in zip(recycle_from.reduced.points, recycle_from.values):
            known[tuple(p)] = v if not recycle_from.scalar else v[0]
    if cache is not None:
        known.update(cache)
    keys = [tuple(p) for p in reduced.points]
    missing = [k for k in keys if k not in known]
    results = evaluate_points(f, np.array(missing).reshape(-1, grid.space.dim), map_fn)
    for k, v in zip(missing, results):
        known[k] = v
        if cache is not None:
            cache[k] = v
    raw = [known[k] for k in keys]
    rows = [_as_row(v) for v in raw]
    if len({r.size for r in rows}) != 1:
        raise InvalidConfigurationError("vector-valued QoIs must share one length")
    scalar = all(np.ndim(v) == 0 for v in raw)
    return Surrogate(grid, reduced, np.vstack(rows), scalar, len(missing))


def _check_queries(surrogate: Surrogate, q: np.ndarray):
    inside = surrogate.space.contains(q)
    if not inside.all():
        msg = f"{int((~inside).sum())} query point(s) lie outside the parameter box"
        if surrogate.extrapolation == "error":
            raise OutOfDomainError(msg)
        if surrogate.extrapolation == "warn":
            warnings.warn(msg, RuntimeWarning, stacklevel=3)


def interpolate(surrogate: Surrogate, queries, chunk: int = 4096):
    """Evaluate ``sum_i c_i f_{m(i)}`` at each query point (rows of ``queries``)."""
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    if q.shape[1] != surrogate.space.dim:
        raise InvalidConfigurationError(f"queries must have {surrogate.space.dim} columns")
    _check_queries(surrogate, q)
    P = surrogate.values.shape[1]
    out = np.zeros((q.shape[0], P))
    for s in range(0, q.shape[0], chunk):
        qs = q[s:s + chunk]
        acc = np.zeros((qs.shape[0], P))
        for (idx, c, tg), bmap in zip(surrogate.grid.terms, surrogate.reduced.back_map):
            F = surrogate.values[bmap].reshape(tg.shape + (P,))
            T = np.einsum("qa,a...->q...", lagrange_matrix(tg.rules[0].nodes, qs[:, 0]), F)
            for n in range(1, len(tg.rules)):
                L = lagrange_matrix(tg.rules[n].nodes, qs[:, n])
                T = np.einsum("qa,qa...->q...", L, T)
            acc += c * T
        out[s:s + chunk] = acc
    res = surrogate._out(out)
    if np.ndim(queries) == 1:
        return res[0]
    return res


def quadrature(surrogate: Surrogate):
    """``sum_q alpha_q f(q)``, componentwise for vector QoIs."""
    return surrogate.quadrature()


# ---------------------------------------------------------------------------
# JSON layout
# ---------------------------------------------------------------------------

SURROGATE_FORMAT = "sgtimber-surrogate/1"


def _rule_name(rule) -> str:
    for name, cand in RULES.items():
        if type(rule) is type(cand):
            return name
    raise InvalidConfigurationError(f"knot family {rule!r} has no registered name; cannot serialise")


def _m_name(m) -> str:
    for name, cand in LEVEL_TO_KNOTS.items():
        if m is cand:
            return name
    raise InvalidConfigurationError(f"level-to-knots map {m!r} has no registered name; cannot serialise")


def surrogate_to_json(surrogate: Surrogate) -> dict:
    """Plain-JSON description: space, rule names, index set, points and values."""
    grid = surrogate.grid
    rules = _rule_list(grid.rules, grid.space)
    return {
        "format": SURROGATE_FORMAT,
        "space": grid.space.to_json(),
        "rules": [_rule_name(r) for r in rules],
        "level_to_knots": _m_name(grid.m),
        "index_set": grid.index_set.as_list(),
        "scalar": bool(surrogate.scalar),
        "points": surrogate.reduced.points.tolist(),
        "values": surrogate.values.tolist(),
    }


def surrogate_from_json(data: dict) -> Surrogate:
    if data.get("format") != SURROGATE_FORMAT:
        raise InvalidConfigurationError(f"unknown surrogate format {data.get('format')!r}")
    space = ParameterSpace.from_json(data["space"])
    rules = [RULES[name] for name in data["rules"]]
    m = LEVEL_TO_KNOTS[data["level_to_knots"]]
    grid = build_sparse_grid(space, MultiIndexSet(data["index_set"], space.dim), rules, m)
    red = reduce(grid)
    pts = np.asarray(data["points"], dtype=float)
    if pts.shape != red.points.shape or not np.array_equal(pts, red.points):
        raise InvalidConfigurationError("stored points do not match the rebuilt grid")
    return Surrogate(grid, red, np.asarray(data["values"], dtype=float), bool(data["scalar"]))


def save_surrogate(surrogate: Surrogate, path) -> None:
    with open(path, "w") as fh:
        json.dump(surrogate_to_json(surrogate), fh)


def load_surrogate(path) -> Surrogate:
    with open(path) as fh:
        return surrogate_from_json(json.load(fh))
