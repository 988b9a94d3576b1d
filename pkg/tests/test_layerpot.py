"""Quadrature weights, layer potentials, Nystrom matrices, boundary traces."""

import numpy as np
import pytest
import scipy.integrate

from surfspline.errors import NearBoundaryAccuracyWarning
from surfspline.geometry import BoundaryGrid
from surfspline.kernel import SplineParams, boundary_kernel
from surfspline.layerpot import (
    jump_check,
    kress_log_weights,
    layer_potential,
    nystrom_matrix,
    one_sided_trace,
    trig_upsample,
)

# ---------------------------------------------------------------------------
# log-splitting quadrature and trigonometric interpolation
# ---------------------------------------------------------------------------


def test_log_weights_annihilate_constants():
    # integral of log(4 sin^2((t-s)/2)) over a period vanishes
    R = kress_log_weights(64)
    assert abs(R.sum()) < 1e-12


def test_log_weights_cosine_oracle():
    # classical Fourier integral: for f(s) = cos(q s),
    # integral f(s) log(4 sin^2((t-s)/2)) ds = -(2 pi / q) cos(q t)
    n = 64
    R = kress_log_weights(n)
    s = 2 * np.pi * np.arange(n) / n
    for q in (1, 2, 5):
        approx = np.array(
            [np.sum(R[np.abs(i - np.arange(n))] * np.cos(q * s)) for i in range(n)]
        )
        np.testing.assert_allclose(approx, -(2 * np.pi / q) * np.cos(q * s), atol=1e-12)


def test_log_weights_reject_odd_n():
    with pytest.raises(ValueError):
        kress_log_weights(33)


def test_trig_upsample_band_limited_exact():
    n, n_new = 32, 80
    t = 2 * np.pi * np.arange(n) / n
    tf = 2 * np.pi * np.arange(n_new) / n_new
    f = 1.0 + np.cos(3 * t) - 2 * np.sin(5 * t)
    up = trig_upsample(f, n_new)
    np.testing.assert_allclose(up, 1.0 + np.cos(3 * tf) - 2 * np.sin(5 * tf), atol=1e-12)


def test_trig_upsample_rejects_downsampling():
    with pytest.raises(ValueError):
        trig_upsample(np.zeros(16), 8)


# ---------------------------------------------------------------------------
# off-boundary evaluation
# ---------------------------------------------------------------------------


def test_single_layer_unit_density_at_center(params2, grid256):
    # all boundary points sit at distance 1 from the origin, where the radial
    # profile r^2 log r vanishes
    val = layer_potential(params2, 0, grid256, np.ones(grid256.n), (0.0, 0.0))
    assert abs(val) < 1e-13


def test_layer_potential_vs_adaptive_quadrature(params2, grid256):
    # smooth integrand at an interior point: adaptive quadrature is an
    # independent oracle for the nodal trapezoid value
    x = np.array([0.3, 0.1])
    for j in (0, 1):
        def integrand(t, j=j):
            alpha = np.array([np.cos(t), np.sin(t)])
            return (
                boundary_kernel(params2, j, x[None], alpha, alpha)[0]
                * (np.cos(3 * t) + 0.5)
            )

        oracle = 0.0
        for a, b in ((0, np.pi), (np.pi, 2 * np.pi)):
            part, err = scipy.integrate.quad(integrand, a, b, epsabs=1e-13, limit=200)
            oracle += part
        t = grid256.t
        val = layer_potential(params2, j, grid256, np.cos(3 * t) + 0.5, x)
        assert val == pytest.approx(oracle, abs=1e-10)


def test_layer_potential_zero_density(params2, grid256, rng):
    pts = rng.uniform(-0.5, 0.5, size=(5, 2))
    np.testing.assert_array_equal(
        layer_potential(params2, 2, grid256, np.zeros(grid256.n), pts), np.zeros(5)
    )


def test_layer_potential_near_boundary_warning(params2, disk):
    grid = BoundaryGrid.build(disk, 32)
    with pytest.warns(NearBoundaryAccuracyWarning):
        layer_potential(
            params2, 0, grid, np.ones(32), (1.0 - 1e-6, 0.0), max_nodes=64
        )


def test_layer_potential_discrete_bilaplacian_vanishes(params2, grid256):
    # potentials are polyharmonic away from the charged boundary
    density = np.cos(2 * grid256.t)
    x = np.array([0.4, 0.2])
    s = 5e-3
    stencil = [(1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0), (0, 0, -4.0)]
    pts, coef = [], []
    for dx, dy, c in stencil:
        for dx2, dy2, c2 in stencil:
            pts.append(x + s * np.array([dx + dx2, dy + dy2]))
            coef.append(c * c2)
    vals = layer_potential(params2, 1, grid256, density, np.asarray(pts))
    bilap = float(np.dot(coef, vals)) / s**4
    assert abs(bilap) < 1e-3


# ---------------------------------------------------------------------------
# Nystrom matrices
# ---------------------------------------------------------------------------


def test_nystrom_circulant_on_circle(params2, disk):
    # rotation invariance makes every boundary operator a convolution there
    grid = BoundaryGrid.build(disk, 64)
    for k, j in ((0, 0), (1, 1), (0, 2)):
        M = nystrom_matrix(params2, k, j, grid)
        for i in (1, 17, 40):
            np.testing.assert_allclose(M[i], np.roll(M[0], i), atol=1e-12)


def test_nystrom_weighted_transpose_symmetry(params2, ell21):
    # kernel symmetry K_kj(x, a) = K_jk(a, x) at the matrix level:
    # w_i M_kj[i, l] equals w_l M_jk[l, i]
    grid = BoundaryGrid.build(ell21, 64)
    w = grid.weights
    for k, j in ((0, 1), (0, 2), (1, 1)):
        A = w[:, None] * nystrom_matrix(params2, k, j, grid)
        B = w[:, None] * nystrom_matrix(params2, j, k, grid)
        np.testing.assert_allclose(A, B.T, atol=1e-12)


def test_nystrom_self_convergence(params2, ell21):
    # spectral accuracy: coarse-grid values nearly coincide with fine-grid
    # values at shared nodes for a smooth density
    g_of = lambda t: np.cos(2 * t) + 0.3 * np.sin(t)
    coarse = BoundaryGrid.build(ell21, 128)
    fine = BoundaryGrid.build(ell21, 256)
    uc = nystrom_matrix(params2, 0, 0, coarse) @ g_of(coarse.t)
    uf = nystrom_matrix(params2, 0, 0, fine) @ g_of(fine.t)
    assert np.max(np.abs(uc - uf[::2])) < 1e-9


# ---------------------------------------------------------------------------
# one-sided traces and jumps
# ---------------------------------------------------------------------------


def test_one_sided_trace_continuity_low_orders(params2, disk):
    # op_k V_0 for k <= 2m - 2 is continuous across the boundary
    grid = BoundaryGrid.build(disk, 64)
    dens = np.cos(grid.t)[None, :]
    for k in (0, 1):
        inner, _ = one_sided_trace(params2, dens, grid, k, "inside", slots=(0,))
        outer, _ = one_sided_trace(params2, dens, grid, k, "outside", slots=(0,))
        assert np.max(np.abs(inner - outer)) < 2e-5, f"k={k}"


def test_one_sided_trace_matches_nystrom(params2, disk):
    # the extrapolated boundary limit of a continuous trace must agree with
    # the direct singular-quadrature value
    grid = BoundaryGrid.build(disk, 64)
    g = np.cos(grid.t) + 0.2
    direct = nystrom_matrix(params2, 0, 0, grid) @ g
    lim, est = one_sided_trace(params2, g[None, :], grid, 0, "inside", slots=(0,))
    assert np.max(np.abs(lim - direct)) < 1e-6
    assert np.all(est >= 0)


def test_one_sided_trace_validates_inputs(params2, grid256):
    with pytest.raises(ValueError):
        one_sided_trace(params2, np.zeros((1, grid256.n)), grid256, 0, "above")
    with pytest.raises(ValueError):
        one_sided_trace(params2, np.zeros((2, 10)), grid256, 0, "inside")
    with pytest.raises(ValueError):
        one_sided_trace(
            params2, np.zeros((1, grid256.n)), grid256, 0, "inside", slots=(7,)
        )


def test_jump_relation_single_slot(params2, disk):
    # top-order trace of V_0 jumps by (-1)^(0+1) g = -g across the boundary
    grid = BoundaryGrid.build(disk, 128)
    assert jump_check(params2, 0, np.cos(grid.t), grid) < 5e-3
