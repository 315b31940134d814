import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgtimber.exceptions import InvalidConfigurationError, InvalidCountError, OutOfDomainError
from sgtimber.params import ParameterSpace, map_affine, map_to_reference, sample_uniform


def test_rejects_empty_or_inverted_ranges():
    with pytest.raises(InvalidConfigurationError):
        ParameterSpace(())
    with pytest.raises(InvalidConfigurationError):
        ParameterSpace(((1.0, 1.0),))
    with pytest.raises(InvalidConfigurationError):
        ParameterSpace(((2.0, 1.0),))


def test_density_is_product_of_uniforms():
    sp = ParameterSpace(((0.0, 2.0), (1.0, 1.5)))
    assert sp.density([1.0, 1.2]) == pytest.approx(1.0)
    assert sp.density([3.0, 1.2]) == 0.0
    # midpoint rule on a fine lattice integrates the density to one
    xs = np.linspace(0, 2, 401)[:-1] + 0.0025
    ys = np.linspace(1, 1.5, 101)[:-1] + 0.0025
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    dens = sp.density(np.column_stack([X.ravel(), Y.ravel()]))
    assert dens.sum() * 0.005 * 0.005 == pytest.approx(1.0, rel=1e-12)


def test_sample_support_and_determinism():
    sp = ParameterSpace(((0.0, 1.0),))
    a = sample_uniform(sp, 1000, 3)
    assert a.shape == (1000, 1)
    assert a.min() >= 0.0 and a.max() <= 1.0
    assert np.array_equal(a, sample_uniform(sp, 1000, 3))
    assert not np.array_equal(a, sample_uniform(sp, 1000, 4))


def test_sample_mean_law_of_large_numbers():
    sp = ParameterSpace(((0.5, 1.5),))
    assert abs(sample_uniform(sp, 10 ** 5, 11).mean() - 1.0) < 0.01


def test_sample_count_must_be_positive():
    with pytest.raises(InvalidCountError):
        sample_uniform(ParameterSpace(((0.0, 1.0),)), 0, 0)


def test_map_affine_endpoints_and_midpoint():
    sp = ParameterSpace(((0.5, 1.5), (0.3, 1.0), (-2.0, 7.0)))
    assert np.array_equal(map_affine([-1, -1, -1], sp), sp.lower)
    assert np.array_equal(map_affine([1, 1, 1], sp), sp.upper)
    assert np.allclose(map_affine([0, 0, 0], sp), [1.0, 0.65, 2.5], rtol=0, atol=1e-15)


def test_map_affine_rejects_outside_reference():
    sp = ParameterSpace(((0.0, 1.0),))
    with pytest.raises(OutOfDomainError):
        map_affine([1.0000001], sp)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3))
def test_map_affine_roundtrip(x):
    sp = ParameterSpace(((0.5, 1.5), (0.03, 0.1), (-0.5, 0.5)))
    back = map_to_reference(map_affine(x, sp), sp)
    assert np.allclose(back, x, rtol=1e-14, atol=1e-14)


def test_contains_and_json_roundtrip():
    sp = ParameterSpace(((0.0, 1.0), (2.0, 3.0)))
    assert sp.contains([[0.5, 2.5], [1.5, 2.5]]).tolist() == [True, False]
    again = ParameterSpace.from_json(json.loads(json.dumps(sp.to_json())))
    assert again == sp
