"""Multilayer Dirichlet solver: reproduction, moments, symbols, densities."""

import numpy as np
import pytest

from surfspline.dirichlet import (
    assemble_boundary_system,
    compute_Nj,
    principal_symbol_matrix,
    solve_dirichlet,
)
from surfspline.errors import ResidualToleranceError
from surfspline.targets import named_target
from tests.conftest import interior_points


def _solve(grid, name):
    from surfspline.kernel import SplineParams

    params = SplineParams(m=2, d=2)
    f = named_target(name, 2)
    return params, f, solve_dirichlet(params, grid, f)


def test_reproduces_low_degree_polynomial(grid256, rng):
    # degree <= m-1 data is matched exactly by the polynomial part alone
    params, f, sol = _solve(grid256, "poly1")
    pts = interior_points(grid256.curve, 100, rng)
    err = sol.evaluate(pts) - f(pts)
    assert np.max(np.abs(err)) < 1e-8
    # and the layer densities themselves are numerically zero
    assert np.max(np.abs(sol.densities)) < 1e-7


@pytest.mark.parametrize("name", ["harmonic3", "biharm", "cubicmix"])
def test_reproduces_polyharmonic_functions(grid256, rng, name):
    params, f, sol = _solve(grid256, name)
    pts = interior_points(grid256.curve, 100, rng)
    fv = f(pts)
    err = np.max(np.abs(sol.evaluate(pts) - fv)) / np.max(np.abs(fv))
    assert err < 1e-6


def test_frozen_interior_value(grid256):
    # Re((x+iy)^3) at (0.3, 0.2): 0.027 - 3*0.3*0.04 = -0.009
    _, _, sol = _solve(grid256, "harmonic3")
    assert sol.evaluate(np.array([[0.3, 0.2]]))[0] == pytest.approx(-0.009, abs=1e-9)


def test_homogeneous_data_gives_zero(grid256, params2, rng):
    sol = solve_dirichlet(params2, grid256, np.zeros((2, grid256.n)))
    pts = interior_points(grid256.curve, 50, rng)
    assert np.max(np.abs(sol.evaluate(pts))) < 1e-8
    assert np.max(np.abs(sol.densities)) < 1e-8
    assert np.max(np.abs(sol.poly_coeffs)) < 1e-8


def test_solution_moment_conditions(grid256):
    # the bordered rows enforce sum_j <g_j, op_j q> ds = 0 over the tail basis
    params, f, sol = _solve(grid256, "expx")
    from surfspline.polyspace import side_condition_matrix

    P = side_condition_matrix(sol.basis, grid256, params.m)  # (m, n, N)
    moments = np.einsum("n,jnk,jn->k", grid256.weights, P, sol.densities)
    scale = np.max(np.abs(sol.densities)) + 1e-30
    assert np.max(np.abs(moments)) / scale < 1e-10


def test_boundary_trace_matches_data(grid256):
    params, f, sol = _solve(grid256, "gauss")
    vals, est = sol.boundary_trace(0, "inside")
    np.testing.assert_allclose(
        vals, f.trace(0, grid256.points), atol=5e-7
    )


def test_solver_residual_and_condition_reported(grid256):
    _, _, sol = _solve(grid256, "wave")
    assert sol.residual < 1e-10
    assert 0 < sol.rcond < 1
    with pytest.raises(ResidualToleranceError):
        solve_dirichlet(
            sol.params, grid256, named_target("wave", 2), residual_tol=0.0
        )


def test_solver_validates_data_shape(grid256, params2):
    with pytest.raises(ValueError):
        solve_dirichlet(params2, grid256, np.zeros((3, grid256.n)))
    with pytest.raises(ValueError):
        solve_dirichlet(params2, grid256, np.zeros((2, grid256.n - 2)))


def test_system_shape(grid256, params2):
    system = assemble_boundary_system(params2, grid256)
    n_total = system.n_poly + params2.m * grid256.n
    assert system.matrix.shape == (n_total, n_total)
    assert system.n_poly == 3  # degree-1 tail in two variables
    # top-left block is the zero border
    assert np.all(system.matrix[: system.n_poly, : system.n_poly] == 0.0)


# ---------------------------------------------------------------------------
# principal symbols
# ---------------------------------------------------------------------------


def test_symbol_matrix_m2_entries():
    sigma = principal_symbol_matrix(2)
    np.testing.assert_allclose(sigma, [[0.25, 0.0], [0.0, 1.0]], atol=1e-15)
    assert np.linalg.det(sigma) == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("m", range(1, 7))
def test_symbol_matrix_nonsingular(m):
    sigma = principal_symbol_matrix(m)
    assert sigma.shape == (m, m)
    assert abs(np.linalg.det(sigma)) > 1e-12
    # checkerboard sparsity: odd k + j entries vanish
    for k in range(m):
        for j in range(m):
            if (k + j) % 2:
                assert sigma[k, j] == 0.0


# ---------------------------------------------------------------------------
# multilayer densities
# ---------------------------------------------------------------------------


def test_multilayer_densities_annihilate_tail_polynomials(disk):
    # for f in the polynomial tail the representation needs no sources at all
    from surfspline.geometry import BoundaryGrid
    from surfspline.kernel import SplineParams

    grid = BoundaryGrid.build(disk, 128)
    params = SplineParams(m=2, d=2)
    rows, sol = compute_Nj(params, grid, named_target("poly1", 2))
    assert np.max(np.abs(rows)) < 1e-5


def test_multilayer_densities_linear(disk):
    from surfspline.geometry import BoundaryGrid
    from surfspline.kernel import SplineParams
    from surfspline.targets import target_from_expression

    grid = BoundaryGrid.build(disk, 128)
    params = SplineParams(m=2, d=2)
    ra, _ = compute_Nj(params, grid, named_target("expx", 2))
    rb, _ = compute_Nj(params, grid, named_target("gauss", 2))
    combo = target_from_expression("exp(x) + 3*exp(-(x**2 + y**2))", m=2)
    rc, _ = compute_Nj(params, grid, combo)
    scale = np.max(np.abs(rc))
    assert np.max(np.abs(rc - (ra + 3 * rb))) / scale < 1e-4
