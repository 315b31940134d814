import math

import numpy as np
import pytest
from scipy import stats

from sgtimber.exceptions import DegenerateError
from sgtimber.multiindex import smolyak_set
from sgtimber.params import ParameterSpace, sample_uniform
from sgtimber.postprocess import (
    kde_pdf,
    ks_distance,
    moments,
    silverman_bandwidth,
    sobol_indices,
    to_legendre,
    write_pdf_csv,
)
from sgtimber.sparse_grid import build_sparse_grid, evaluate_on_grid


def surrogate(f, ranges, w):
    space = ParameterSpace(ranges)
    return evaluate_on_grid(f, build_sparse_grid(space, smolyak_set(space.dim, w)))


def test_moments_constant_is_degenerate():
    m = moments(surrogate(lambda p: 2.0, ((0.0, 1.0),), 2))
    assert m.mean == pytest.approx(2.0) and m.variance == 0.0
    assert m.degenerate and math.isnan(m.kurtosis) and math.isnan(m.skewness)


def test_moments_of_uniform():
    s = surrogate(lambda p: p[0], ((0.0, 1.0), (0.0, 1.0)), 2)
    m = moments(s)
    assert m.mean == pytest.approx(0.5, abs=1e-10)
    assert m.variance == pytest.approx(1 / 12, abs=1e-10)
    assert m.skewness == pytest.approx(0.0, abs=1e-10)
    assert m.kurtosis == pytest.approx(1.8, abs=1e-10)
    assert m.mean == s.quadrature()


def test_moments_warn_on_coarse_grid():
    # a single-point grid cannot see the variance at all; a wildly oscillating f can make it negative
    s = surrogate(lambda p: math.cos(40 * p[0]) * math.cos(40 * p[1]), ((0.0, 1.0), (0.0, 1.0)), 2)
    m = moments(s)
    assert m.variance >= 0 or m.warnings


def test_legendre_examples():
    const = to_legendre(surrogate(lambda p: 3.0, ((-1.0, 1.0), (-1.0, 1.0)), 2))
    nonzero = {k: v for k, v in const.terms.items() if abs(v) > 1e-13}
    assert list(nonzero) == [(0, 0)] and nonzero[(0, 0)] == pytest.approx(3.0)
    lin = to_legendre(surrogate(lambda p: p[0], ((-1.0, 1.0),) * 3, 2))
    for k, v in lin.terms.items():
        assert v == pytest.approx(1 / math.sqrt(3) if k == (1, 0, 0) else 0.0, abs=1e-12)
    prod = to_legendre(surrogate(lambda p: p[0] * p[1], ((-1.0, 1.0),) * 2, 2))
    assert prod.variance == pytest.approx(1 / 9, abs=1e-10)


def test_legendre_matches_surrogate():
    ranges = ((0.5, 1.5), (0.25, 0.75), (0.1, 0.2))
    for w in range(4):
        s = surrogate(lambda p: math.exp(-((0.6 - p[1]) ** 2) / (2 * p[2] ** 2)) / p[0], ranges, w)
        e = to_legendre(s)
        q = sample_uniform(s.space, 100, w)
        assert np.allclose(e.evaluate(q), s(q), rtol=1e-8, atol=1e-12)
        m = moments(s)
        assert e.mean == pytest.approx(m.mean, abs=1e-10)
        if m.variance > 0:
            # Parseval holds against the exact variance of the interpolant, not the aliased quadrature one
            fine = surrogate(lambda p: s(p) ** 2, ranges, w + 3).quadrature() - e.mean ** 2
            assert e.variance == pytest.approx(fine, rel=1e-8)


def test_sobol_examples():
    r = ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
    one = sobol_indices(to_legendre(surrogate(lambda p: p[0], r, 2)))
    assert np.allclose(one.principal, [1, 0, 0], atol=1e-12) and np.allclose(one.total, [1, 0, 0], atol=1e-12)
    add = sobol_indices(to_legendre(surrogate(lambda p: p[0] + p[1], r, 2)))
    assert np.allclose(add.principal, [0.5, 0.5, 0.0], atol=1e-10)


def test_sobol_ishigami_against_analytic():
    a, b = 7.0, 0.1
    r = ((-math.pi, math.pi),) * 3
    s = surrogate(lambda p: math.sin(p[0]) + a * math.sin(p[1]) ** 2 + b * p[2] ** 4 * math.sin(p[0]), r, 9)
    idx = sobol_indices(to_legendre(s))
    D = a ** 2 / 8 + b * math.pi ** 4 / 5 + b ** 2 * math.pi ** 8 / 18 + 0.5
    D1 = b * math.pi ** 4 / 5 + b ** 2 * math.pi ** 8 / 50 + 0.5
    D2 = a ** 2 / 8
    D13 = b ** 2 * math.pi ** 8 * (1 / 18 - 1 / 50)
    assert np.allclose(idx.principal, [D1 / D, D2 / D, 0.0], atol=1e-4)
    assert np.allclose(idx.total, [(D1 + D13) / D, D2 / D, D13 / D], atol=1e-4)


def test_sobol_invariants_and_scaling():
    r = ((0.0, 1.0), (0.0, 2.0))
    f = lambda p: math.exp(p[0] * p[1]) + p[1]  # noqa: E731
    i1 = sobol_indices(to_legendre(surrogate(f, r, 4)))
    i2 = sobol_indices(to_legendre(surrogate(lambda p: 3.5 * f(p), r, 4)))
    assert np.allclose(i1.principal, i2.principal, atol=1e-12)
    assert np.allclose(i1.total, i2.total, atol=1e-12)
    assert np.all(i1.principal <= i1.total + 1e-8) and i1.principal.sum() <= 1 + 1e-8


def test_sobol_rejects_zero_variance():
    with pytest.raises(DegenerateError):
        sobol_indices(to_legendre(surrogate(lambda p: 1.0, ((0.0, 1.0),), 2)))


def test_kde_normal_density_at_zero():
    x = np.random.default_rng(0).standard_normal(10 ** 5)
    assert kde_pdf(x, [0.0])[0] == pytest.approx(1 / math.sqrt(2 * math.pi), abs=0.02)


def test_kde_positive_support_and_normalisation():
    u = np.random.default_rng(1).uniform(2.0, 3.0, 5000)
    xs = np.linspace(0.01, 6.0, 3000)
    d = kde_pdf(u, xs, "positive")
    assert np.all(d >= 0) and np.all(d[xs < 1.5] < 1e-6)
    assert np.trapezoid(d, xs) == pytest.approx(1.0, abs=0.02)
    g = np.random.default_rng(2).normal(1.0, 0.3, 2000)
    xs = np.linspace(-2, 4, 3000)
    assert np.trapezoid(kde_pdf(g, xs), xs) == pytest.approx(1.0, abs=0.02)


def test_kde_rejects_identical_samples():
    with pytest.raises(DegenerateError):
        kde_pdf([1.0, 1.0, 1.0], [1.0])


def test_silverman_rule():
    x = np.random.default_rng(3).normal(size=400)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    assert silverman_bandwidth(x) == pytest.approx(0.9 * min(x.std(ddof=1), iqr / 1.34) * 400 ** -0.2)


def test_ks_matches_scipy():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=300), rng.normal(0.2, 1.1, size=170)
    assert ks_distance(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)


def test_pdf_csv(tmp_path):
    write_pdf_csv(tmp_path / "p.csv", [0.0, 0.5], [0.1, 0.2])
    assert (tmp_path / "p.csv").read_text().splitlines() == ["x,density", "0.0,0.1", "0.5,0.2"]
