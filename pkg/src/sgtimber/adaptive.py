"""A-posteriori adaptive sparse grids driven by an expected-value profit.

Each candidate index ``j`` in the reduced margin is explored by evaluating
the model on its tensor grid. Its contribution to the expected value is the
tensor difference

    delta_j = sum_{s in {0,1}^N, j - s >= 1} (-1)^|s| Q_{m(j - s)}[f],

which equals ``Q_{I + j}[f] - Q_I[f]`` for any downward-closed ``I``
admitting ``j``. The profit of ``j`` is ``|delta_j|`` over the number of new
model evaluations its exploration required; the most profitable candidate
is accepted and the margin refreshed. Contributions at rounding level are
given zero profit, so functions already captured by the current grid stop
the run instead of driving it with noise.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import BudgetTooSmallError, InvalidConfigurationError
from .multiindex import MultiIndexSet, is_downward_closed, reduced_margin
from .params import ParameterSpace
from .rules import level_to_knots_doubling
from .sparse_grid import Surrogate, build_sparse_grid, evaluate_on_grid, evaluate_points, tensor_grid

#: contributions within this many ulps of the tensor means involved count as zero
ROUNDING_FACTOR = 64


@dataclass(frozen=True)
class AdaptiveStep:
    step: int
    index: tuple[int, ...]
    profit: float
    evaluations: int
    mean: float


@dataclass
class AdaptiveState:
    accepted: MultiIndexSet
    candidates: MultiIndexSet
    profits: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)
    surrogate: Surrogate | None = None
    evaluations_used: int = 0
    history: list = field(default_factory=list)
    stop_reason: str = ""
    mean: object = None

    @property
    def explored(self) -> MultiIndexSet:
        return MultiIndexSet(self.profits, self.accepted.dim)

    def write_history_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "index", "profit", "evaluations", "mean"])
            for h in self.history:
                w.writerow([h.step, "-".join(map(str, h.index)), repr(h.profit), h.evaluations, repr(h.mean)])


def _first(value) -> float:
    return float(np.atleast_1d(value)[0])


def adapt(f: Callable, space: ParameterSpace, rules=None, m: Callable[[int], int] = level_to_knots_doubling,
          budget: int = 100, profit_tolerance: float = 0.0, include_explored: bool = True,
          map_fn: Callable = map, cache: dict | None = None) -> tuple[Surrogate, AdaptiveState]:
    """Grow an index set from ``(1, ..., 1)`` until the budget or tolerance stops it.

    Parameters
    ----------
    budget : int
        Maximum number of distinct model evaluations. A candidate whose
        exploration would exceed it ends the run.
    profit_tolerance : float
        The run stops once no candidate has a profit above this value.
    include_explored : bool
        Build the returned surrogate on accepted plus explored indices
        (their values are already paid for); otherwise on accepted only.
    cache : dict, optional
        ``tuple(point) -> value`` store shared with other runs. Cached points
        are not passed to ``f`` again but still count against the budget, so
        a run's cost does not depend on what earlier runs evaluated.

    Returns
    -------
    (Surrogate, AdaptiveState)
    """
    if budget < 1:
        raise InvalidConfigurationError("budget must be at least 1")
    if profit_tolerance < 0:
        raise InvalidConfigurationError("profit tolerance must be nonnegative")
    N = space.dim
    cache = {} if cache is None else cache
    shifts = [s for s in itertools.product((0, 1), repeat=N)]
    tensor_means: dict = {}
    seen: set = set()
    used = 0

    def tensor_mean(idx):
        if idx not in tensor_means:
            tg = tensor_grid(space, idx, rules, m)
            vals = np.array([np.atleast_1d(np.asarray(cache[tuple(p)], dtype=float)) for p in tg.points])
            tensor_means[idx] = tg.weights @ vals
        return tensor_means[idx]

    def delta(idx):
        """Tensor-difference contribution and the rounding level of its first component."""
        total, scale = 0.0, 0.0
        for s in shifts:
            lower = tuple(a - b for a, b in zip(idx, s))
            if min(lower) >= 1:
                sign = -1.0 if sum(s) % 2 else 1.0
                q = tensor_mean(lower)
                total = total + sign * q
                scale = max(scale, abs(_first(q)))
        return total, ROUNDING_FACTOR * np.finfo(float).eps * scale

    def explore(idx):
        """Evaluate the tensor grid of ``idx``; ``None`` if over budget."""
        nonlocal used
        pts = tensor_grid(space, idx, rules, m).points + 0.0
        new = [tuple(p) for p in pts if tuple(p) not in seen]
        if used + len(new) > budget:
            return None
        todo = [k for k in new if k not in cache]
        values = evaluate_points(f, np.array(todo).reshape(-1, N), map_fn, index=idx)
        for k, v in zip(todo, values):
            cache[k] = v
        seen.update(new)
        used += len(new)
        return len(new)

    root = (1,) * N
    if explore(root) is None:
        raise BudgetTooSmallError(f"budget {budget} does not cover the root grid")
    accepted = MultiIndexSet([root], N)
    state = AdaptiveState(accepted, reduced_margin(accepted))
    state.mean = delta(root)[0]
    step = 0
    while True:
        margin = reduced_margin(state.accepted)
        state.candidates = margin
        over = False
        for cand in margin:
            if cand in state.profits:
                continue
            cost = explore(cand)
            if cost is None:
                over = True
                break
            d, noise = delta(cand)
            state.deltas[cand] = d
            change = abs(_first(d))
            state.profits[cand] = change / max(cost, 1) if change > noise else 0.0
        state.evaluations_used = used
        if over:
            state.stop_reason = "budget"
            break
        # ties go to the lexicographically smallest index
        best = min(margin, key=lambda i: (-state.profits[i], i))
        if state.profits[best] <= profit_tolerance:
            state.stop_reason = "tolerance"
            break
        step += 1
        state.accepted = state.accepted.union([best])
        assert is_downward_closed(state.accepted)
        state.mean = state.mean + state.deltas[best]
        state.history.append(AdaptiveStep(step, best, state.profits[best], used, _first(state.mean)))
    state.candidates = reduced_margin(state.accepted)

    final = state.accepted.union(state.profits) if include_explored else state.accepted
    grid = build_sparse_grid(space, final, rules, m)
    surrogate = evaluate_on_grid(f, grid, cache=cache)
    state.surrogate = surrogate
    return surrogate, state
