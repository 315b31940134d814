"""Multi-index sets for the combination technique."""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator

from .exceptions import InvalidSetError

MultiIndex = tuple[int, ...]


class MultiIndexSet:
    """Finite, duplicate-free set of multi-indices kept in lexicographic order."""

    __slots__ = ("_items", "_lookup", "dim")

    def __init__(self, indices: Iterable[Iterable[int]], dim: int | None = None):
        items = sorted({tuple(int(v) for v in i) for i in indices})
        dims = {len(i) for i in items}
        if dim is None:
            if len(dims) != 1:
                raise InvalidSetError("cannot infer the dimension of an empty or ragged set")
            dim = dims.pop()
        elif dims - {dim}:
            raise InvalidSetError(f"all indices must have length {dim}")
        if any(v < 1 for i in items for v in i):
            raise InvalidSetError("multi-index entries start at 1")
        self._items = tuple(items)
        self._lookup = frozenset(items)
        self.dim = dim

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, idx) -> bool:
        return tuple(idx) in self._lookup

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiIndexSet):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        return f"MultiIndexSet({list(self._items)})"

    def union(self, other: Iterable[Iterable[int]]) -> "MultiIndexSet":
        return MultiIndexSet(itertools.chain(self._items, other), self.dim)

    def as_list(self) -> list[list[int]]:
        return [list(i) for i in self._items]


def _backward_neighbors(idx: MultiIndex) -> Iterator[MultiIndex]:
    for k, v in enumerate(idx):
        if v > 1:
            yield idx[:k] + (v - 1,) + idx[k + 1:]


def _forward_neighbors(idx: MultiIndex) -> Iterator[MultiIndex]:
    for k, v in enumerate(idx):
        yield idx[:k] + (v + 1,) + idx[k + 1:]


def smolyak_set(N: int, w: int) -> MultiIndexSet:
    """All ``i >= 1`` with ``sum(i_n - 1) <= w``."""
    if N < 1 or w < 0:
        raise InvalidSetError("need N >= 1 and w >= 0")

    def rec(n, budget):
        if n == 0:
            yield ()
            return
        for v in range(budget + 1):
            for rest in rec(n - 1, budget - v):
                yield (v + 1,) + rest

    return MultiIndexSet(rec(N, w), N)


def is_downward_closed(indices: Iterable[Iterable[int]]) -> bool:
    members = {tuple(i) for i in indices}
    return all(nb in members for idx in members for nb in _backward_neighbors(idx))


def combination_coefficients(indices: MultiIndexSet) -> dict[MultiIndex, int]:
    """Nonzero ``c_i = sum_{j in {0,1}^N, i + j in I} (-1)^|j|``."""
    if not isinstance(indices, MultiIndexSet):
        indices = MultiIndexSet(indices)
    if not is_downward_closed(indices):
        raise InvalidSetError("combination coefficients need a downward-closed set")
    shifts = list(itertools.product((0, 1), repeat=indices.dim))
    coeffs = {}
    for idx in indices:
        c = 0
        for j in shifts:
            if tuple(a + b for a, b in zip(idx, j)) in indices:
                c += -1 if sum(j) % 2 else 1
        if c:
            coeffs[idx] = c
    return coeffs


def reduced_margin(indices: MultiIndexSet) -> MultiIndexSet:
    """Indices outside the set whose backward neighbours are all inside it."""
    if len(indices) == 0:
        raise InvalidSetError("the reduced margin of an empty set is undefined")
    if not is_downward_closed(indices):
        raise InvalidSetError("reduced margin needs a downward-closed set")
    out = set()
    for idx in indices:
        for cand in _forward_neighbors(idx):
            if cand not in indices and all(nb in indices for nb in _backward_neighbors(cand)):
                out.add(cand)
    return MultiIndexSet(out, indices.dim)
