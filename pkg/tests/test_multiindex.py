import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sgtimber.checks import telescoping_coefficients
from sgtimber.exceptions import InvalidSetError
from sgtimber.multiindex import (
    MultiIndexSet,
    combination_coefficients,
    is_downward_closed,
    reduced_margin,
    smolyak_set,
)


def brute_smolyak(N, w):
    return {i for i in itertools.product(range(1, w + 2), repeat=N) if sum(i) - N <= w}


def test_smolyak_examples():
    assert set(smolyak_set(2, 0)) == {(1, 1)}
    assert set(smolyak_set(2, 1)) == {(1, 1), (1, 2), (2, 1)}
    assert set(smolyak_set(3, 1)) == {(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2)}


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("w", [0, 1, 2, 3, 4, 5])
def test_smolyak_matches_enumeration_and_is_closed(N, w):
    s = smolyak_set(N, w)
    assert set(s) == brute_smolyak(N, w)
    assert list(s) == sorted(s)
    assert is_downward_closed(s)


def test_downward_closed_examples():
    assert is_downward_closed([(1, 1)])
    assert not is_downward_closed([(1, 1), (2, 2)])


def test_coefficient_examples():
    assert combination_coefficients(MultiIndexSet([(1, 1)])) == {(1, 1): 1}
    assert combination_coefficients(smolyak_set(2, 1)) == {(1, 1): -1, (1, 2): 1, (2, 1): 1}
    c = combination_coefficients(MultiIndexSet([(1,), (2,), (3,)]))
    assert c.get((1,), 0) == 0 and c.get((2,), 0) == 0 and c[(3,)] == 1


def test_coefficients_reject_open_sets():
    with pytest.raises(InvalidSetError):
        combination_coefficients(MultiIndexSet([(1, 1), (2, 2)]))


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("w", [0, 1, 2, 3, 4])
def test_coefficients_match_telescoping_oracle(N, w):
    s = smolyak_set(N, w)
    c = combination_coefficients(s)
    assert sum(c.values()) == 1
    assert all(v != 0 and isinstance(v, int) for v in c.values())
    assert c == telescoping_coefficients(s)


def test_reduced_margin_examples():
    assert set(reduced_margin(MultiIndexSet([(1, 1)]))) == {(2, 1), (1, 2)}
    assert set(reduced_margin(smolyak_set(2, 1))) == {(2, 2), (3, 1), (1, 3)}
    assert set(reduced_margin(MultiIndexSet([(1,), (2,)]))) == {(3,)}
    with pytest.raises(InvalidSetError):
        reduced_margin(MultiIndexSet([], dim=2))


@st.composite
def closed_sets(draw):
    """Random downward-closed sets grown by repeatedly adding margin elements."""
    N = draw(st.integers(1, 3))
    s = MultiIndexSet([(1,) * N])
    for _ in range(draw(st.integers(0, 12))):
        margin = list(reduced_margin(s))
        s = s.union([margin[draw(st.integers(0, len(margin) - 1))]])
    return s


@settings(max_examples=80, deadline=None)
@given(closed_sets())
def test_random_closed_sets(s):
    assert is_downward_closed(s)
    c = combination_coefficients(s)
    assert sum(c.values()) == 1
    assert c == telescoping_coefficients(s)
    for j in reduced_margin(s):
        assert j not in s
        assert is_downward_closed(s.union([j]))
