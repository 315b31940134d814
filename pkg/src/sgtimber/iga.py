"""Isogeometric collocation for 2D heterogeneous isotropic elasticity.

The beam ``D = [0, L] x [0, H]`` is discretised with tensor-product
B-splines on open, uniform knot vectors. The strong form of

    div(C : sym grad u) = 0,   C = diag(E, E, E/2)  (Voigt),

is collocated at Greville points, with sliding supports (``u_x = 0`` on
the left edge, ``u_y = 0`` on the bottom edge, zero tangential traction on
both) and a traction ``t`` on the right edge; the top edge is traction free.

Everything is carried in SI units: lengths in m, moduli in Pa, edge loads
in N/m (force per unit length of edge, unit thickness). Helpers
``MPA`` and ``KN_PER_M`` convert the usual engineering units.
"""
from __future__ import annotations

import csv
import functools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg

from .exceptions import (
    DegenerateError,
    InvalidConfigurationError,
    InvalidIndexError,
    OutOfDomainError,
    SolverFailureError,
    UnsupportedDegreeError,
)

MPA = 1.0e6
KN_PER_M = 1.0e3

#: reciprocal condition estimates below this abort the solve
MIN_RCOND = 1.0e-14


# ---------------------------------------------------------------------------
# B-spline machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OpenKnotVector:
    """Open knot vector: end knots repeated ``degree + 1`` times."""

    degree: int
    knots: np.ndarray
    basis_count: int

    def __post_init__(self):
        t = np.asarray(self.knots, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)
        if t.size != self.basis_count + self.degree + 1:
            raise InvalidConfigurationError("knot count must equal basis_count + degree + 1")
        if np.any(np.diff(t) < 0):
            raise InvalidConfigurationError("knots must be nondecreasing")

    @property
    def a(self) -> float:
        return float(self.knots[0])

    @property
    def b(self) -> float:
        return float(self.knots[-1])


def open_uniform_knot_vector(degree: int, basis_count: int, a: float = 0.0, b: float = 1.0) -> OpenKnotVector:
    """Open knot vector with ``basis_count - degree`` equal spans on ``[a, b]``."""
    if degree < 0 or basis_count < degree + 1:
        raise InvalidConfigurationError(
            f"need basis_count >= degree + 1, got degree={degree}, basis_count={basis_count}"
        )
    if not a < b:
        raise InvalidConfigurationError("need a < b")
    spans = basis_count - degree
    interior = np.linspace(a, b, spans + 1)[1:-1]
    knots = np.concatenate([np.full(degree + 1, float(a)), interior, np.full(degree + 1, float(b))])
    return OpenKnotVector(degree, knots, basis_count)


def _safe_ratio(num, den):
    den = np.asarray(den, dtype=float)
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def _basis_values(t: np.ndarray, p: int, x: np.ndarray) -> np.ndarray:
    """All degree-``p`` basis functions at ``x`` by Cox-de Boor (0/0 = 0)."""
    if p == 0:
        xx = x[:, None]
        vals = ((t[:-1] <= xx) & (xx < t[1:])).astype(float)
        # right end: the last non-empty span is closed
        last = np.nonzero(t[:-1] < t[1:])[0][-1]
        vals[x == t[-1], last] = 1.0
        return vals
    lower = _basis_values(t, p - 1, x)
    n = t.size - p - 1
    xx = x[:, None]
    left = _safe_ratio(xx - t[:n], t[p:p + n] - t[:n])
    right = _safe_ratio(t[p + 1:p + 1 + n] - xx, t[p + 1:p + 1 + n] - t[1:1 + n])
    return left * lower[:, :n] + right * lower[:, 1:n + 1]


def _basis_derivatives(t: np.ndarray, p: int, x: np.ndarray, order: int) -> np.ndarray:
    if order == 0:
        return _basis_values(t, p, x)
    lower = _basis_derivatives(t, p - 1, x, order - 1)
    n = t.size - p - 1
    c1 = _safe_ratio(p, t[p:p + n] - t[:n])
    c2 = _safe_ratio(p, t[p + 1:p + 1 + n] - t[1:1 + n])
    return c1 * lower[:, :n] - c2 * lower[:, 1:n + 1]


def basis_matrix(kv: OpenKnotVector, x, derivative_order: int = 0) -> np.ndarray:
    """Matrix ``B[k, i] = d^order N_i(x_k)`` of shape ``(len(x), basis_count)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if derivative_order < 0 or derivative_order > kv.degree:
        raise InvalidConfigurationError("derivative order must lie in [0, degree]")
    tol = 1e-12 * (kv.b - kv.a)
    if np.any(x < kv.a - tol) or np.any(x > kv.b + tol):
        raise OutOfDomainError(f"evaluation point outside [{kv.a}, {kv.b}]")
    x = np.clip(x, kv.a, kv.b)
    return _basis_derivatives(kv.knots, kv.degree, x, derivative_order)


def bspline_eval(kv: OpenKnotVector, i: int, x: float, derivative_order: int = 0) -> float:
    """Value (or derivative) of the ``i``-th basis function (0-based) at ``x``."""
    if not 0 <= i < kv.basis_count:
        raise InvalidIndexError(f"basis index {i} out of range [0, {kv.basis_count})")
    return float(basis_matrix(kv, [x], derivative_order)[0, i])


def greville_abscissae(kv: OpenKnotVector) -> np.ndarray:
    """Abscissae ``(x_{i+2} + ... + x_{i+r}) / (r - 1)``, ``i = 1..n-1`` (1-based knots).

    This is the averaging window used in the original collocation setup:
    ``r - 1`` knots starting two past the basis index. It returns
    ``basis_count - 1`` points, both domain ends included. The solver itself
    collocates at :func:`collocation_points`.
    """
    r = kv.degree
    if r < 2:
        raise UnsupportedDegreeError("Greville abscissae need degree >= 2")
    t = kv.knots
    return np.array([t[i + 1:i + r].mean() for i in range(1, kv.basis_count)])


def collocation_points(kv: OpenKnotVector) -> np.ndarray:
    """Classical Greville points ``(x_{i+1} + ... + x_{i+r}) / r``, one per basis function."""
    r = kv.degree
    t = kv.knots
    pts = np.array([t[i + 1:i + r + 1].mean() for i in range(kv.basis_count)])
    pts[0], pts[-1] = kv.a, kv.b
    return pts


def gauss_points(kv: OpenKnotVector, per_span: int | None = None):
    """Tensorised Gauss-Legendre nodes/weights covering every non-empty knot span."""
    n = kv.degree + 1 if per_span is None else per_span
    gx, gw = np.polynomial.legendre.leggauss(n)
    breaks = np.unique(kv.knots)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx
    weights = 0.5 * (hi - lo) * gw
    return nodes.ravel(), weights.ravel()


# ---------------------------------------------------------------------------
# Geometry, material and load
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BeamGeometry:
    length: float = 1.0
    height: float = 1.0

    def __post_init__(self):
        if not (self.length > 0 and self.height > 0):
            raise InvalidConfigurationError("beam length and height must be positive")


@dataclass(frozen=True)
class TractionProblem:
    """Traction test of the beam.

    The kinematic edges are fixed to ``left`` (u_x = 0) and ``bottom``
    (u_y = 0); the load acts on ``right`` and ``top`` is traction free.
    """

    geometry: BeamGeometry = field(default_factory=BeamGeometry)
    load: tuple[float, float] = (1.0e3 * KN_PER_M, 0.0)
    kinematic_edges: tuple[str, ...] = ("left", "bottom")
    traction_edges: tuple[str, ...] = ("right", "top")

    def __post_init__(self):
        edges = set(self.kinematic_edges) | set(self.traction_edges)
        if edges != {"left", "right", "bottom", "top"} or set(self.kinematic_edges) & set(self.traction_edges):
            raise InvalidConfigurationError("kinematic and traction edges must partition the boundary")
        if set(self.kinematic_edges) != {"left", "bottom"}:
            raise InvalidConfigurationError("only sliding supports on the left and bottom edges are supported")


def alpha_one_knot(x, y, p, gamma: float = 0.4):
    """Stiffness ratio of a beam with a single knot at ``x = p[1]`` of width ``p[2]``."""
    x = np.asarray(x, dtype=float)
    return p[0] - gamma * np.exp(-((x - p[1]) ** 2) / (2.0 * p[2] ** 2)) + 0.0 * np.asarray(y, dtype=float)


def alpha_two_knot(x, y, p, gamma1: float = 0.4, gamma2: float = 0.4, anchor=(1.0, 0.5)):
    """Stiffness ratio with one knot at ``anchor`` and a second one offset by ``(p[5], p[6])``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xb, yb = anchor
    k1 = np.exp(-((x - xb) ** 2) / (2.0 * p[1] ** 2)) * np.exp(-((y - yb) ** 2) / (2.0 * p[3] ** 2))
    k2 = np.exp(-((x - xb - p[5]) ** 2) / (2.0 * p[2] ** 2)) * np.exp(-((y - yb - p[6]) ** 2) / (2.0 * p[4] ** 2))
    return p[0] - gamma1 * k1 - gamma2 * k2


class MaterialField:
    """Young modulus ``E(x, y, p) = E0 * alpha(x, y, p)``.

    Subclasses override :meth:`alpha` and, when cheap, :meth:`alpha_grad`.
    The default gradient uses central differences.
    """

    E0: float = 1.0e4 * MPA

    def alpha(self, x, y, p):
        raise NotImplementedError

    def alpha_grad(self, x, y, p):
        h = 1e-6
        ax = (self.alpha(x + h, y, p) - self.alpha(x - h, y, p)) / (2 * h)
        ay = (self.alpha(x, y + h, p) - self.alpha(x, y - h, p)) / (2 * h)
        return ax, ay

    def modulus(self, x, y, p):
        return self.E0 * self.alpha(x, y, p)

    def min_alpha(self, geometry: BeamGeometry, p, samples: int = 201) -> float:
        xs = np.linspace(0.0, geometry.length, samples)
        ys = np.linspace(0.0, geometry.height, samples)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return float(np.min(self.alpha(X, Y, p)))


@dataclass(frozen=True)
class FunctionMaterial(MaterialField):
    """Material from an arbitrary ``alpha(x, y, p)`` callable."""

    alpha_fn: Callable = None
    E0: float = 1.0e4 * MPA
    grad_fn: Callable | None = None

    def alpha(self, x, y, p):
        return np.asarray(self.alpha_fn(x, y, p), dtype=float) + 0.0 * np.asarray(x, dtype=float)

    def alpha_grad(self, x, y, p):
        if self.grad_fn is not None:
            return self.grad_fn(x, y, p)
        return super().alpha_grad(x, y, p)


@dataclass(frozen=True)
class OneKnotMaterial(MaterialField):
    E0: float = 1.0e4 * MPA
    gamma: float = 0.4

    def alpha(self, x, y, p):
        return alpha_one_knot(x, y, p, self.gamma)

    def alpha_grad(self, x, y, p):
        x = np.asarray(x, dtype=float)
        g = np.exp(-((x - p[1]) ** 2) / (2.0 * p[2] ** 2))
        return self.gamma * g * (x - p[1]) / p[2] ** 2, np.zeros_like(x + np.asarray(y, dtype=float))


@dataclass(frozen=True)
class TwoKnotMaterial(MaterialField):
    E0: float = 1.0e4 * MPA
    gamma1: float = 0.4
    gamma2: float = 0.4
    anchor: tuple[float, float] = (1.0, 0.5)

    def alpha(self, x, y, p):
        return alpha_two_knot(x, y, p, self.gamma1, self.gamma2, self.anchor)

    def alpha_grad(self, x, y, p):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xb, yb = self.anchor
        dx1, dy1 = x - xb, y - yb
        dx2, dy2 = x - xb - p[5], y - yb - p[6]
        k1 = self.gamma1 * np.exp(-dx1 ** 2 / (2 * p[1] ** 2) - dy1 ** 2 / (2 * p[3] ** 2))
        k2 = self.gamma2 * np.exp(-dx2 ** 2 / (2 * p[2] ** 2) - dy2 ** 2 / (2 * p[4] ** 2))
        ax = k1 * dx1 / p[1] ** 2 + k2 * dx2 / p[2] ** 2
        ay = k1 * dy1 / p[3] ** 2 + k2 * dy2 / p[4] ** 2
        return ax, ay


# ---------------------------------------------------------------------------
# Displacement field
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DisplacementField:
    """Control coefficients of ``u_x`` and ``u_y`` on a tensor B-spline basis."""

    ux: np.ndarray
    uy: np.ndarray
    kv_x: OpenKnotVector
    kv_y: OpenKnotVector

    def __post_init__(self):
        shape = (self.kv_x.basis_count, self.kv_y.basis_count)
        if np.shape(self.ux) != shape or np.shape(self.uy) != shape:
            raise InvalidConfigurationError(f"coefficient arrays must have shape {shape}")

    def on_lattice(self, xs, ys):
        """``(u_x, u_y)`` on the tensor lattice ``xs x ys`` (arrays indexed [x, y])."""
        bx = basis_matrix(self.kv_x, xs)
        by = basis_matrix(self.kv_y, ys)
        return bx @ self.ux @ by.T, bx @ self.uy @ by.T


def evaluate_displacement(field: DisplacementField, x, y):
    """Displacement at paired points ``(x[k], y[k])`` (scalars allowed)."""
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    bx = basis_matrix(field.kv_x, x)
    by = basis_matrix(field.kv_y, y)
    ux = np.einsum("ki,ij,kj->k", bx, field.ux, by)
    uy = np.einsum("ki,ij,kj->k", bx, field.uy, by)
    if scalar:
        return float(ux[0]), float(uy[0])
    return ux, uy


def qoi_corner(field: DisplacementField, geometry: BeamGeometry) -> float:
    """Horizontal displacement at the bottom-right corner ``(L, 0)``."""
    return evaluate_displacement(field, geometry.length, 0.0)[0]


def l2_norm_ux(field: DisplacementField) -> float:
    gx, wx = gauss_points(field.kv_x)
    gy, wy = gauss_points(field.kv_y)
    vals = basis_matrix(field.kv_x, gx) @ field.ux @ basis_matrix(field.kv_y, gy).T
    return float(np.sqrt(np.einsum("i,j,ij->", wx, wy, vals ** 2)))


def l2_relative_field_error(field: DisplacementField, reference: DisplacementField) -> float:
    """Relative L2(D) error of ``u_x`` against ``reference`` (same discretisation)."""
    if field.ux.shape != reference.ux.shape or not np.array_equal(field.kv_x.knots, reference.kv_x.knots) \
            or not np.array_equal(field.kv_y.knots, reference.kv_y.knots):
        raise InvalidConfigurationError("fields must share the same spline spaces")
    ref = l2_norm_ux(reference)
    if ref == 0.0:
        raise DegenerateError("reference field has zero L2 norm")
    diff = DisplacementField(field.ux - reference.ux, field.uy - reference.uy, field.kv_x, field.kv_y)
    return l2_norm_ux(diff) / ref


def write_field_csv(field: DisplacementField, path, xs, ys) -> None:
    """Write ``x, y, u_x, u_y`` on the lattice ``xs x ys``."""
    ux, uy = field.on_lattice(xs, ys)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "u_x", "u_y"])
        for a, xv in enumerate(xs):
            for b, yv in enumerate(ys):
                w.writerow([repr(float(xv)), repr(float(yv)), repr(float(ux[a, b])), repr(float(uy[a, b]))])


# ---------------------------------------------------------------------------
# Collocation solver
# ---------------------------------------------------------------------------

class CollocationSolver:
    """Strong-form collocation of the traction problem on a fixed spline space.

    Basis values at the collocation points do not depend on the material,
    so they are tabulated once; :meth:`solve` only scales and stacks them.

    Row layout (``n x m`` collocation points, point ``(a, b)`` numbered
    ``a * m + b``): the left edge carries ``u_x = 0`` and ``sigma_xy = 0``,
    the bottom edge ``sigma_xy = 0`` and ``u_y = 0``, with ``(0, 0)`` taking
    ``u_x = 0, u_y = 0``. These are the ``2n + 2m - 2`` kinematic-edge rows.
    The right edge carries ``sigma_xx = t_x, sigma_xy = t_y``, the top edge
    ``sigma_xy = 0, sigma_yy = 0`` and the corner ``(L, H)`` takes
    ``sigma_xx = t_x, sigma_yy = 0``; the interior carries both equilibrium
    equations. Those ``2 (n - 1)(m - 1)`` rows complete the square system.
    """

    def __init__(self, problem: TractionProblem, degrees=(4, 4), basis_counts=(32, 32)):
        r, q = degrees
        n, m = basis_counts
        if r < 2 or q < 2:
            raise UnsupportedDegreeError("strong-form collocation needs degree >= 2")
        self.problem = problem
        g = problem.geometry
        self.kv_x = open_uniform_knot_vector(r, n, 0.0, g.length)
        self.kv_y = open_uniform_knot_vector(q, m, 0.0, g.height)
        self.n, self.m = n, m
        xs = collocation_points(self.kv_x)
        ys = collocation_points(self.kv_y)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        self.px, self.py = X.ravel(), Y.ravel()

        bx = [basis_matrix(self.kv_x, xs, d) for d in range(3)]
        by = [basis_matrix(self.kv_y, ys, d) for d in range(3)]
        self._K = {(i, j): sparse.csr_matrix(np.kron(bx[i], by[j]))
                   for i, j in [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]}

        a = np.arange(n * m) // m
        b = np.arange(n * m) % m
        self._groups = {
            "origin": np.nonzero((a == 0) & (b == 0))[0],
            "left": np.nonzero((a == 0) & (b > 0))[0],
            "bottom": np.nonzero((b == 0) & (a > 0))[0],
            "right": np.nonzero((a == n - 1) & (b > 0) & (b < m - 1))[0],
            "top_right": np.nonzero((a == n - 1) & (b == m - 1))[0],
            "top": np.nonzero((b == m - 1) & (a > 0) & (a < n - 1))[0],
            "interior": np.nonzero((a > 0) & (a < n - 1) & (b > 0) & (b < m - 1))[0],
        }

    @property
    def size(self) -> int:
        return 2 * self.n * self.m

    def _rows(self, kind, P, al, ax, ay):
        """(block for u_x, block for u_y) of one equation type at points ``P``."""
        def K(i, j, coef=None):
            block = self._K[i, j][P]
            return block if coef is None else sparse.diags(coef[P]) @ block

        zero = sparse.csr_matrix((P.size, self.n * self.m))
        half_al, half_ax, half_ay = 0.5 * al, 0.5 * ax, 0.5 * ay
        if kind == "ux":
            return K(0, 0), zero
        if kind == "uy":
            return zero, K(0, 0)
        if kind == "sxx":
            return K(1, 0, al), zero
        if kind == "syy":
            return zero, K(0, 1, al)
        if kind == "sxy":
            return K(0, 1, half_al), K(1, 0, half_al)
        if kind == "eq_x":
            return (K(1, 0, ax) + K(2, 0, al) + K(0, 1, half_ay) + K(0, 2, half_al),
                    K(1, 0, half_ay) + K(1, 1, half_al))
        if kind == "eq_y":
            return (K(0, 1, half_ax) + K(1, 1, half_al),
                    K(1, 0, half_ax) + K(2, 0, half_al) + K(0, 1, ay) + K(0, 2, al))
        raise ValueError(kind)

    def assemble(self, material: MaterialField, p):
        """Return ``(A, rhs)`` of the collocation system, scaled by ``1 / E0``."""
        p = np.asarray(p, dtype=float)
        al = np.asarray(material.alpha(self.px, self.py, p), dtype=float)
        ax, ay = (np.asarray(v, dtype=float) for v in material.alpha_grad(self.px, self.py, p))
        nm = self.n * self.m
        tx, ty = (c / material.E0 for c in self.problem.load)
        order = np.empty(2 * nm, dtype=int)
        blocks = []
        rhs = np.zeros(2 * nm)
        layout = {
            "origin": ("ux", "uy", 0.0, 0.0),
            "left": ("ux", "sxy", 0.0, 0.0),
            "bottom": ("sxy", "uy", 0.0, 0.0),
            "right": ("sxx", "sxy", tx, ty),
            "top_right": ("sxx", "syy", tx, 0.0),
            "top": ("sxy", "syy", 0.0, 0.0),
            "interior": ("eq_x", "eq_y", 0.0, 0.0),
        }
        start = 0
        for group, (first, second, r1, r2) in layout.items():
            P = self._groups[group]
            if P.size == 0:
                continue
            for kind, rows, value in ((first, P, r1), (second, nm + P, r2)):
                blocks.append(sparse.hstack(self._rows(kind, P, al, ax, ay)))
                order[start:start + P.size] = rows
                rhs[rows] = value
                start += P.size
        A = sparse.vstack(blocks, format="csr")
        # row k of the stacked matrix belongs to equation order[k]
        A = A[np.argsort(order)]
        return A.tocsc(), rhs

    def solve(self, material: MaterialField, p, require_positive: bool = False) -> DisplacementField:
        """Solve for one parameter point.

        The modulus is not required to stay positive unless
        ``require_positive`` is set; in that case a non-positive ``alpha`` at
        any collocation point raises :class:`InvalidConfigurationError`.
        """
        if require_positive:
            low = float(np.min(material.alpha(self.px, self.py, np.asarray(p, dtype=float))))
            if low <= 0.0:
                raise InvalidConfigurationError(f"non-positive modulus ratio {low:.4g} at p={list(p)}")
        A, rhs = self.assemble(material, p)
        size = A.shape[0]
        if not np.all(np.isfinite(A.data)):
            raise SolverFailureError("non-finite entries in the collocation matrix", size=size)
        try:
            lu = splinalg.splu(A, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SolverFailureError(f"singular collocation matrix: {exc}", rcond=0.0, size=size) from exc
        inv = splinalg.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans="T"),
                                      dtype=float)
        rcond = 1.0 / (splinalg.norm(A, 1) * splinalg.onenormest(inv))
        if not rcond >= MIN_RCOND:
            raise SolverFailureError(
                f"ill-conditioned collocation matrix: rcond={rcond:.3e} (size {size}) at p={list(p)}",
                rcond=rcond, size=size,
            )
        sol = lu.solve(rhs)
        nm = self.n * self.m
        return DisplacementField(sol[:nm].reshape(self.n, self.m).copy(),
                                 sol[nm:].reshape(self.n, self.m).copy(), self.kv_x, self.kv_y)

    def condition_estimate(self, material: MaterialField, p) -> float:
        A, _ = self.assemble(material, p)
        lu = splinalg.splu(A, permc_spec="COLAMD")
        inv = splinalg.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans="T"),
                                      dtype=float)
        return float(splinalg.norm(A, 1) * splinalg.onenormest(inv))


@functools.lru_cache(maxsize=8)
def get_solver(problem: TractionProblem, degrees=(4, 4), basis_counts=(32, 32)) -> CollocationSolver:
    return CollocationSolver(problem, tuple(degrees), tuple(basis_counts))


def solve_traction_problem(problem: TractionProblem, material: MaterialField, p: Sequence[float],
                           degrees=(4, 4), basis_counts=(32, 32), require_positive: bool = False) -> DisplacementField:
    """Solve the collocation system for one parameter point."""
    solver = get_solver(problem, tuple(degrees), tuple(basis_counts))
    return solver.solve(material, p, require_positive=require_positive)
