import csv

import numpy as np
import pytest
from scipy.integrate import quad

from sgtimber.exceptions import (
    DegenerateError,
    InvalidConfigurationError,
    InvalidIndexError,
    OutOfDomainError,
    SolverFailureError,
    UnsupportedDegreeError,
)
from sgtimber.iga import (
    KN_PER_M,
    MPA,
    BeamGeometry,
    DisplacementField,
    FunctionMaterial,
    OneKnotMaterial,
    TractionProblem,
    TwoKnotMaterial,
    alpha_one_knot,
    alpha_two_knot,
    basis_matrix,
    bspline_eval,
    evaluate_displacement,
    get_solver,
    greville_abscissae,
    l2_relative_field_error,
    open_uniform_knot_vector,
    qoi_corner,
    solve_traction_problem,
    write_field_csv,
)

E0 = 1.0e4 * MPA
T = 1.0e3 * KN_PER_M
UNIT = FunctionMaterial(lambda x, y, p: 1.0, E0, lambda x, y, p: (0.0 * x, 0.0 * x))


def cox_de_boor(t, i, p, x):
    """Scalar recursion with 0/0 = 0; the right end closes the last nonempty span."""
    if p == 0:
        if t[i] <= x < t[i + 1]:
            return 1.0
        last = max(k for k in range(len(t) - 1) if t[k] < t[k + 1])
        return 1.0 if (x == t[-1] and i == last) else 0.0
    left = 0.0 if t[i + p] == t[i] else (x - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, x)
    right = 0.0 if t[i + p + 1] == t[i + 1] else \
        (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, x)
    return left + right


def test_knot_vector_examples():
    assert open_uniform_knot_vector(1, 3).knots.tolist() == [0, 0, 0.5, 1, 1]
    assert open_uniform_knot_vector(2, 3).knots.tolist() == [0, 0, 0, 1, 1, 1]
    kv = open_uniform_knot_vector(4, 32)
    assert kv.knots.size == 37
    assert np.allclose(np.diff(np.unique(kv.knots)), 1 / 28)
    with pytest.raises(InvalidConfigurationError):
        open_uniform_knot_vector(4, 4)


def test_basis_examples():
    kv0 = open_uniform_knot_vector(0, 4)
    assert bspline_eval(kv0, 1, 0.3) == 1.0 and bspline_eval(kv0, 1, 0.5) == 0.0
    kv1 = open_uniform_knot_vector(1, 3)
    assert bspline_eval(kv1, 1, 0.25) == pytest.approx(0.5)
    kv = open_uniform_knot_vector(4, 32)
    x = np.random.default_rng(0).uniform(0, 1, 100)
    assert np.allclose(basis_matrix(kv, x).sum(axis=1), 1.0, atol=1e-14)
    assert bspline_eval(kv, 31, 1.0) == pytest.approx(1.0)
    with pytest.raises(InvalidIndexError):
        bspline_eval(kv, 32, 0.5)
    with pytest.raises(OutOfDomainError):
        basis_matrix(kv, [1.5])


@pytest.mark.parametrize("degree,count", [(2, 5), (3, 7), (4, 9)])
def test_basis_against_scalar_recursion_and_differences(degree, count):
    kv = open_uniform_knot_vector(degree, count, 0.0, 2.0)
    xs = np.concatenate([np.linspace(0, 2, 23), [2.0]])
    B = basis_matrix(kv, xs)
    oracle = np.array([[cox_de_boor(kv.knots, i, degree, x) for i in range(count)] for x in xs])
    assert np.allclose(B, oracle, atol=1e-14)
    h = 1e-5
    inner = np.linspace(0.013, 1.987, 17)
    for order in (1, 2):
        D = basis_matrix(kv, inner, order)
        lower = basis_matrix(kv, inner, order - 1)
        fd = (basis_matrix(kv, inner + h, order - 1) - basis_matrix(kv, inner - h, order - 1)) / (2 * h)
        assert np.allclose(D, fd, atol=1e-5 * max(1.0, np.abs(lower).max() * 100))


def test_greville():
    assert greville_abscissae(open_uniform_knot_vector(2, 3)).tolist() == [0.0, 1.0]
    g = greville_abscissae(open_uniform_knot_vector(4, 32))
    assert g.size == 31 and np.all(np.diff(g) >= 0) and g.min() >= 0 and g.max() <= 1
    with pytest.raises(UnsupportedDegreeError):
        greville_abscissae(open_uniform_knot_vector(1, 5))


def test_alpha_fields():
    p = [1.2, 0.4, 0.15]
    assert alpha_one_knot(0.4, 0.3, p) == pytest.approx(1.2 - 0.4)
    assert alpha_one_knot(0.9, 0.3, p, gamma=0.0) == 1.2
    q = [1.0, 0.6, 0.8, 0.05, 0.07, 6.0, 0.2]
    assert alpha_two_knot(1.0, 0.5, q) == pytest.approx(1.0 - 0.4 - 0.4 * np.exp(-36 / (2 * 0.64)) * np.exp(-0.04 / (2 * 0.0049)))
    assert alpha_two_knot(3.0, 0.1, q, 0.0, 0.0) == 1.0
    assert alpha_two_knot(1e3, 0.5, q) == pytest.approx(1.0)


@pytest.mark.parametrize("material", [OneKnotMaterial(), TwoKnotMaterial()])
def test_analytic_gradients(material):
    p = [1.0, 0.5, 0.15] if isinstance(material, OneKnotMaterial) else [1.0, 0.6, 0.5, 0.06, 0.08, 3.0, 0.1]
    x, y = np.linspace(0.05, 0.95, 7), np.linspace(0.1, 0.9, 7)
    ax, ay = material.alpha_grad(x, y, p)
    fx, fy = super(type(material), material).alpha_grad(x, y, p)
    assert np.allclose(ax, fx, atol=1e-6) and np.allclose(ay, fy, atol=1e-6)


def test_problem_validation():
    with pytest.raises(InvalidConfigurationError):
        BeamGeometry(0.0, 1.0)
    with pytest.raises(InvalidConfigurationError):
        TractionProblem(kinematic_edges=("left",), traction_edges=("right", "top"))


def test_uniaxial_analytic_solution():
    for L in (1.0, 10.0):
        pr = TractionProblem(BeamGeometry(L, 1.0), (T, 0.0))
        sol = solve_traction_problem(pr, UNIT, [])
        exact = T * L / E0
        assert qoi_corner(sol, pr.geometry) == pytest.approx(exact, rel=1e-9)
        ux, uy = sol.on_lattice(np.linspace(0, L, 20), np.linspace(0, 1, 20))
        assert np.allclose(ux, T * np.linspace(0, L, 20)[:, None] / E0, rtol=0, atol=1e-9 * exact)
        assert np.abs(uy).max() <= 1e-8 * np.abs(ux).max()


def test_zero_load_and_linearity():
    pr0 = TractionProblem(load=(0.0, 0.0))
    sol = solve_traction_problem(pr0, OneKnotMaterial(), [1.0, 0.5, 0.15])
    assert np.abs(sol.ux).max() <= 1e-12 and np.abs(sol.uy).max() <= 1e-12
    p = [0.8, 0.3, 0.12]
    one = qoi_corner(solve_traction_problem(TractionProblem(load=(T, 0.0)), OneKnotMaterial(), p), BeamGeometry())
    two = qoi_corner(solve_traction_problem(TractionProblem(load=(2 * T, 0.0)), OneKnotMaterial(), p), BeamGeometry())
    assert two == pytest.approx(2 * one, rel=1e-12)


@pytest.mark.parametrize("p", [[0.5, 0.25, 0.1], [1.5, 0.75, 0.2], [1.0, 0.5, 0.15]])
def test_one_knot_matches_bar_integral_and_has_no_vertical_displacement(p):
    pr = TractionProblem()
    sol = solve_traction_problem(pr, OneKnotMaterial(), p)
    exact = T * quad(lambda x: 1.0 / (E0 * alpha_one_knot(x, 0.0, p)), 0, 1, epsabs=0, epsrel=1e-12, limit=200)[0]
    assert qoi_corner(sol, pr.geometry) == pytest.approx(exact, rel=1e-3)
    ux, uy = sol.on_lattice(np.linspace(0, 1, 50), np.linspace(0, 1, 50))
    assert np.abs(uy).max() <= 1e-8 * np.abs(ux).max()


def test_one_knot_refinement_reduces_bar_error():
    p = [0.5, 0.5, 0.1]
    exact = T * quad(lambda x: 1.0 / (E0 * alpha_one_knot(x, 0.0, p)), 0, 1, epsabs=0, epsrel=1e-12, limit=200)[0]
    errs = [abs(qoi_corner(solve_traction_problem(TractionProblem(), OneKnotMaterial(), p, basis_counts=(n, 8)),
                           BeamGeometry()) / exact - 1) for n in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]


def test_spatial_self_convergence():
    mat = FunctionMaterial(lambda x, y, p: 1.0 + 0.1 * np.sin(np.pi * x), E0)
    pr = TractionProblem()
    q = [qoi_corner(solve_traction_problem(pr, mat, [], basis_counts=(n, n)), pr.geometry) for n in (16, 24, 32, 48)]
    d = np.abs(np.diff(q))
    assert d[0] > d[1] > d[2]


def test_stiffer_beam_moves_less():
    pr = TractionProblem()
    vals = [qoi_corner(solve_traction_problem(pr, OneKnotMaterial(), [p1, 0.5, 0.15]), pr.geometry)
            for p1 in np.linspace(0.5, 1.5, 20)]
    assert np.all(np.diff(vals) < 0)


def test_two_knot_solves_including_negative_modulus_regions():
    pr = TractionProblem(BeamGeometry(10.0, 1.0))
    mat = TwoKnotMaterial()
    p = [0.5, 1.0, 1.0, 0.1, 0.1, 1.0, 0.0]
    assert mat.min_alpha(pr.geometry, p) < 0
    u = qoi_corner(solve_traction_problem(pr, mat, p), pr.geometry)
    assert np.isfinite(u)
    with pytest.raises(InvalidConfigurationError):
        solve_traction_problem(pr, mat, p, require_positive=True)


def test_singular_system_is_reported():
    zero = FunctionMaterial(lambda x, y, p: 0.0, E0, lambda x, y, p: (0.0 * x, 0.0 * x))
    with pytest.raises(SolverFailureError) as info:
        solve_traction_problem(TractionProblem(), zero, [], basis_counts=(8, 8))
    assert info.value.size == 2 * 64


def test_square_system_size():
    solver = get_solver(TractionProblem(), (4, 4), (32, 32))
    A, rhs = solver.assemble(OneKnotMaterial(), [1.0, 0.5, 0.15])
    assert A.shape == (2 * 32 * 32, 2 * 32 * 32) and rhs.shape == (2 * 32 * 32,)


def test_field_evaluation_and_errors(tmp_path):
    kx, ky = open_uniform_knot_vector(4, 8), open_uniform_knot_vector(4, 6)
    zero = DisplacementField(np.zeros((8, 6)), np.zeros((8, 6)), kx, ky)
    assert evaluate_displacement(zero, 0.3, 0.7) == (0.0, 0.0)
    const = DisplacementField(np.full((8, 6), 2.5), np.zeros((8, 6)), kx, ky)
    ux, uy = evaluate_displacement(const, np.array([0.1, 0.9]), np.array([0.5, 0.2]))
    assert np.allclose(ux, 2.5) and np.allclose(uy, 0.0)
    with pytest.raises(OutOfDomainError):
        evaluate_displacement(const, 1.2, 0.5)
    with pytest.raises(InvalidConfigurationError):
        DisplacementField(np.zeros((7, 6)), np.zeros((8, 6)), kx, ky)
    rnd = DisplacementField(np.random.default_rng(0).normal(size=(8, 6)), np.zeros((8, 6)), kx, ky)
    assert l2_relative_field_error(rnd, rnd) == 0.0
    twice = DisplacementField(2 * rnd.ux, rnd.uy, kx, ky)
    assert l2_relative_field_error(twice, rnd) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DegenerateError):
        l2_relative_field_error(rnd, zero)
    write_field_csv(const, tmp_path / "f.csv", [0.0, 1.0], [0.0, 0.5, 1.0])
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows[0] == ["x", "y", "u_x", "u_y"] and len(rows) == 7
    assert float(rows[1][2]) == pytest.approx(2.5)
