"""Target functions: exact traces, m-Laplacians, and the FD fallback oracle."""

import numpy as np
import pytest
import sympy as sp

from surfspline.targets import (
    TARGET_LIBRARY,
    named_target,
    target_from_callable,
    target_from_expression,
)


def test_library_contents():
    for name in ("poly1", "harmonic3", "biharm", "quartic", "expx", "wave"):
        assert name in TARGET_LIBRARY
    with pytest.raises(KeyError):
        named_target("nosuch", 2)


def test_values_and_simple_traces(grid256):
    f = named_target("poly1", 2)
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [-0.5, 2.0]])
    np.testing.assert_allclose(f(pts), [1.0, 2.0, -2.0], atol=1e-14)
    # gradient of 1 + 2x - y is (2, -1); normal trace on the circle
    t = grid256.t
    np.testing.assert_allclose(
        f.trace(1, grid256.points, grid256.normals),
        2 * np.cos(t) - np.sin(t),
        atol=1e-13,
    )


def test_quartic_m_laplacian_constant(rng):
    f = named_target("quartic", 2)
    pts = rng.uniform(-1, 1, size=(20, 2))
    # Lap^2 (x^4 + y^4) = 24 + 24 = 48 everywhere
    np.testing.assert_allclose(f.m_laplacian(pts), 48.0, atol=1e-12)


def test_low_degree_targets_are_polyharmonic(rng):
    pts = rng.uniform(-1, 1, size=(15, 2))
    for name in ("poly1", "harmonic3", "biharm", "cubicmix"):
        f = named_target(name, 2)
        np.testing.assert_allclose(f.m_laplacian(pts), 0.0, atol=1e-12)


def test_wave_m_laplacian(rng):
    # Lap sin(2x + y) = -5 sin(2x + y), so Lap^2 = 25 sin(2x + y)
    f = named_target("wave", 2)
    pts = rng.uniform(-1, 1, size=(15, 2))
    np.testing.assert_allclose(
        f.m_laplacian(pts), 25.0 * np.sin(2 * pts[:, 0] + pts[:, 1]), rtol=1e-12
    )


def test_boundary_data_shape(grid256):
    f = named_target("gauss", 2)
    data = f.boundary_data(grid256)
    assert data.shape == (2, grid256.n)
    np.testing.assert_allclose(data[0], np.exp(-1.0), atol=1e-14)
    # radial Gaussian: normal derivative on the unit circle is -2 e^{-1}
    np.testing.assert_allclose(data[1], -2 * np.exp(-1.0), atol=1e-13)


def test_odd_trace_requires_normals(grid256):
    f = named_target("expx", 2)
    with pytest.raises(ValueError):
        f.trace(1, grid256.points)


def test_expression_accepts_sympy_objects():
    x, y = sp.symbols("x y")
    f = target_from_expression(sp.sin(x) * y, m=2, name="siny")
    pts = np.array([[0.3, 0.7]])
    assert f(pts)[0] == pytest.approx(np.sin(0.3) * 0.7, rel=1e-14)


def test_finite_difference_oracle_matches_exact_traces(grid256):
    # wrap exp(x) cos(y) as a plain callable and compare all traces k <= 3
    # against the symbolic target; the FD stencil should agree to ~1e-6
    exact = named_target("expcos", 2)
    fd = target_from_callable(
        lambda p: np.exp(p[..., 0]) * np.cos(p[..., 1]), m=2, name="fd"
    )
    pts = grid256.points[::8]
    nrm = grid256.normals[::8]
    for k in range(4):
        a = exact.trace(k, pts, nrm)
        b = fd.trace(k, pts, nrm)
        scale = np.max(np.abs(a)) + 1.0
        assert np.max(np.abs(a - b)) / scale < 1e-6, f"trace {k}"


def test_finite_difference_oracle_m_laplacian(rng):
    exact = named_target("gauss", 2)
    fd = target_from_callable(lambda p: np.exp(-np.sum(p**2, axis=-1)), m=2)
    pts = rng.uniform(-0.6, 0.6, size=(10, 2))
    a, b = exact.m_laplacian(pts), fd.m_laplacian(pts)
    assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-4


def test_trace_linearity(grid256, rng):
    fa = named_target("harmonic3", 2)
    fb = named_target("gauss", 2)
    combo = target_from_expression(
        "x**3 - 3*x*y**2 + 2*exp(-(x**2 + y**2))", m=2, name="combo"
    )
    for k in range(4):
        a = fa.trace(k, grid256.points, grid256.normals)
        b = fb.trace(k, grid256.points, grid256.normals)
        c = combo.trace(k, grid256.points, grid256.normals)
        np.testing.assert_allclose(c, a + 2 * b, rtol=1e-10, atol=1e-12)
