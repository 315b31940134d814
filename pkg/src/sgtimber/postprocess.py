"""Moments, Legendre re-expansion, Sobol indices and density estimates."""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from .exceptions import DegenerateError, InvalidConfigurationError
from .params import ParameterSpace
from .sparse_grid import Surrogate, lagrange_matrix

ROUNDOFF = 1e3 * np.finfo(float).eps


@dataclass(frozen=True)
class MomentSet:
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    degenerate: bool = False
    warnings: tuple[str, ...] = ()


def _scalar_values(surrogate: Surrogate, component: int | None) -> np.ndarray:
    if surrogate.scalar:
        return surrogate.values[:, 0]
    if component is None:
        raise InvalidConfigurationError("vector-valued surrogate: pass the component to analyse")
    return surrogate.values[:, component]


def moments(surrogate: Surrogate, component: int | None = None) -> MomentSet:
    """Mean, variance, skewness and (non-excess) kurtosis by sparse quadrature.

    Powers of the stored values are integrated on the same grid; no new
    model evaluations are made. Central powers ``(f - mean)^k`` are used,
    which equals the raw-moment formulas because the weights sum to one but
    avoids cancellation.
    """
    f = _scalar_values(surrogate, component)
    w = surrogate.reduced.weights
    mean = float(w @ f)
    d = f - mean
    var = float(w @ d ** 2)
    mu3 = float(w @ d ** 3)
    mu4 = float(w @ d ** 4)
    scale = float(w @ f ** 2) if np.any(f) else 1.0
    notes = []
    if var < -1e-8 * abs(scale):
        msg = f"negative variance {var:.3e}: grid too coarse for f^2"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if var <= 1e-12 * abs(scale):
        if var > -1e-12 * abs(scale):
            var = 0.0
        return MomentSet(mean, var, float("nan"), float("nan"), True, tuple(notes))
    return MomentSet(mean, var, mu3 / var ** 1.5, mu4 / var ** 2, False, tuple(notes))


# ---------------------------------------------------------------------------
# Legendre expansion
# ---------------------------------------------------------------------------

def orthonormal_legendre(degree: int, x, a: float, b: float) -> np.ndarray:
    """``sqrt(2k+1) P_k`` on ``[a, b]``, ``k = 0..degree``; rows follow ``x``."""
    t = 2.0 * (np.asarray(x, dtype=float) - a) / (b - a) - 1.0
    V = legendre.legvander(t, degree)
    return V * np.sqrt(2 * np.arange(degree + 1) + 1.0)


@dataclass(frozen=True)
class LegendreExpansion:
    """Coefficients on tensorised orthonormal Legendre polynomials over the box."""

    space: ParameterSpace
    terms: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self.terms.get((0,) * self.space.dim, 0.0))

    @property
    def variance(self) -> float:
        zero = (0,) * self.space.dim
        return float(sum(c * c for k, c in self.terms.items() if k != zero))

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        degs = np.array(list(self.terms.keys()))
        coefs = np.array(list(self.terms.values()))
        out = np.ones((pts.shape[0], degs.shape[0]))
        for n, (a, b) in enumerate(self.space.ranges):
            V = orthonormal_legendre(int(degs[:, n].max()), pts[:, n], a, b)
            out *= V[:, degs[:, n]]
        return out @ coefs


def _projection_matrix(nodes: np.ndarray, a: float, b: float) -> np.ndarray:
    """``C[k, j] = E[l_j(p) phi_k(p)]`` for the Lagrange basis on ``nodes``."""
    K = nodes.size
    g, gw = legendre.leggauss(K)
    x = a + (b - a) * (g + 1.0) / 2.0
    L = lagrange_matrix(nodes, x)
    Phi = orthonormal_legendre(K - 1, x, a, b)
    return (Phi * (gw / 2.0)[:, None]).T @ L


def to_legendre(surrogate: Surrogate, component: int | None = None) -> LegendreExpansion:
    """Re-expand every tensor interpolant exactly and sum with the ``c_i``.

    A tensor term with ``m`` nodes in dimension ``n`` is a polynomial of
    degree ``m - 1`` there; Gauss-Legendre with ``m`` points integrates its
    products with ``phi_k``, ``k < m``, exactly.
    """
    f = _scalar_values(surrogate, component)
    space = surrogate.space
    terms: dict = {}
    for (idx, c, tg), bmap in zip(surrogate.grid.terms, surrogate.reduced.back_map):
        coef = f[bmap].reshape(tg.shape)
        for n, rule in enumerate(tg.rules):
            C = _projection_matrix(rule.nodes, *space.ranges[n])
            coef = np.moveaxis(np.tensordot(coef, C, axes=([n], [1])), -1, n)
        for k in np.ndindex(coef.shape):
            terms[k] = terms.get(k, 0.0) + c * coef[k]
    return LegendreExpansion(space, dict(sorted(terms.items())))


@dataclass(frozen=True)
class SobolIndices:
    principal: np.ndarray
    total: np.ndarray


def sobol_indices(expansion: LegendreExpansion) -> SobolIndices:
    """Principal and total indices from squared Legendre coefficients."""
    N = expansion.space.dim
    degs = np.array([k for k in expansion.terms if any(k)])
    if degs.size == 0:
        raise DegenerateError("expansion has zero variance")
    sq = np.array([expansion.terms[tuple(k)] ** 2 for k in degs])
    var = sq.sum()
    # variance at round-off level relative to the mean is treated as zero
    if var <= (ROUNDOFF * expansion.mean) ** 2 or var == 0.0:
        raise DegenerateError("expansion has zero variance")
    active = degs > 0
    single = active.sum(axis=1) == 1
    principal = np.array([sq[single & active[:, n]].sum() for n in range(N)]) / var
    total = np.array([sq[active[:, n]].sum() for n in range(N)]) / var
    return SobolIndices(principal, total)


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

def silverman_bandwidth(samples: np.ndarray) -> float:
    """``0.9 min(sd, IQR / 1.34) n^(-1/5)``; falls back to ``sd`` when the IQR vanishes."""
    x = np.asarray(samples, dtype=float)
    sd = np.std(x, ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = sd
    return 0.9 * spread * x.size ** (-0.2)


def _gaussian_kde(samples: np.ndarray, at: np.ndarray, h: float, chunk: int = 256) -> np.ndarray:
    out = np.empty(at.size)
    norm = 1.0 / (samples.size * h * np.sqrt(2.0 * np.pi))
    for s in range(0, at.size, chunk):
        z = (at[s:s + chunk, None] - samples[None, :]) / h
        out[s:s + chunk] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return out


def kde_pdf(samples, eval_points, support: str = "unbounded", bandwidth: float | None = None) -> np.ndarray:
    """Gaussian kernel density estimate with Silverman's bandwidth.

    ``support="positive"`` estimates the density of ``log(samples)`` and maps
    it back with the ``1/x`` Jacobian, so no mass leaks below zero.
    """
    x = np.asarray(samples, dtype=float).ravel()
    at = np.asarray(eval_points, dtype=float).ravel()
    if np.unique(x).size < 2:
        raise DegenerateError("need at least two distinct samples")
    if support == "unbounded":
        h = silverman_bandwidth(x) if bandwidth is None else bandwidth
        return _gaussian_kde(x, at, h)
    if support == "positive":
        if np.any(x <= 0):
            raise InvalidConfigurationError("positive support needs strictly positive samples")
        lx = np.log(x)
        h = silverman_bandwidth(lx) if bandwidth is None else bandwidth
        out = np.zeros(at.size)
        pos = at > 0
        out[pos] = _gaussian_kde(lx, np.log(at[pos]), h) / at[pos]
        return out
    raise InvalidConfigurationError(f"unknown support {support!r}")


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def write_pdf_csv(path, eval_points, density) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "density"])
        for x, d in zip(eval_points, density):
            w.writerow([repr(float(x)), repr(float(d))])
