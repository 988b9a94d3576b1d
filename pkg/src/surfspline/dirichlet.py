"""Multilayer solver for the polyharmonic Dirichlet problem.

The boundary value problem solved here: find u with the m-fold Laplacian
vanishing in the domain and with prescribed traces ``op_k u = h_k`` on the
boundary for k = 0 .. m-1 (values, normal derivative, Laplace trace, ...).
The solution is represented as a polynomial of degree m-1 plus m layer
potentials of increasing kernel order,

    u = p + sum_j V_j g_j,      j = 0 .. m-1,

and the densities g_j together with the polynomial coefficients solve a
square system: collocation of the boundary operators on a periodic node
set, bordered by discrete moment conditions on the densities (the moment
conditions remove the polynomial ambiguity and make the bordered matrix
invertible).

All operator blocks op_k V_j in the system have order k + j <= 2m - 2, so
every block is assembled with the spectrally accurate singular quadrature
from :mod:`surfspline.layerpot`.  The bordered matrix inherits the
first-kind character of the smoothing blocks: its condition number grows
like n^(2m-1), which at practical sizes still leaves ample accuracy for
direct LU solution with a step of iterative refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from .errors import ResidualToleranceError, SingularSystemError
from .geometry import BoundaryGrid, DomainCurve
from .kernel import SplineParams
from .layerpot import layer_potential, nystrom_matrix, one_sided_trace
from .polyspace import PolyBasis, side_condition_matrix
from .targets import TargetFunction

__all__ = [
    "BoundarySystem",
    "DirichletSolution",
    "assemble_boundary_system",
    "solve_dirichlet",
    "compute_Nj",
    "principal_symbol_matrix",
]


def principal_symbol_matrix(m: int) -> np.ndarray:
    """Leading symbol of the m x m boundary operator block matrix, at unit
    cotangent frequency.

    Entry (k, j) is the order-(k + j - 2m + 1) leading coefficient of the
    operator op_k V_j; the matrix is checkerboard (zero when k + j is odd)
    with central-binomial entries on the even sites.  Its invertibility is
    what makes the layer representation solvable, so a singular value here
    would be fatal; the ``check-symbols`` CLI subcommand prints these
    matrices and their determinants for a range of orders.
    """
    if m < 1:
        raise ValueError("m must be positive")

    def central(i: int) -> float:
        from math import comb

        return float(comb(2 * i, i))

    sigma = np.zeros((m, m))
    for k in range(m):
        for j in range(m):
            if (k + j) % 2:
                continue
            idx = m - (k + j) // 2 - 1
            base = 2.0 ** (1 + k + j - 2 * m)
            if k % 2 == 0:
                sigma[k, j] = base * central(idx)
            else:
                sigma[k, j] = base * (4 * central(idx) - central(idx + 1))
    return sigma


@dataclass(frozen=True)
class BoundarySystem:
    """Assembled bordered collocation system for one grid size."""

    params: SplineParams
    grid: BoundaryGrid
    basis: PolyBasis
    matrix: np.ndarray  # (N + m n) square, unknowns (poly coeffs, densities)

    @property
    def n_poly(self) -> int:
        return self.basis.dimension

    def split(self, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split a solution vector into (poly coeffs, density rows)."""
        N = self.n_poly
        return vec[:N], vec[N:].reshape(self.params.m, self.grid.n)


def assemble_boundary_system(
    params: SplineParams, grid: BoundaryGrid, basis: PolyBasis | None = None
) -> BoundarySystem:
    """Build the bordered matrix [[0, (W P)^T], [P, L]].

    L stacks the m x m operator blocks op_k V_j; P holds op_k of the
    polynomial basis at the nodes; W P carries the quadrature weights so the
    top rows impose the discrete moment conditions sum_j <g_j, op_j q> = 0
    for every basis polynomial q.
    """
    m, n = params.m, grid.n
    if basis is None:
        basis = PolyBasis.for_spline_order(params.m)
    N = basis.dimension
    P_blocks = side_condition_matrix(basis, grid, m)  # (m, n, N)
    P = P_blocks.reshape(m * n, N)
    L = np.empty((m * n, m * n))
    for k in range(m):
        for j in range(m):
            L[k * n : (k + 1) * n, j * n : (j + 1) * n] = nystrom_matrix(
                params, k, j, grid
            )
    WP = P * np.tile(grid.weights, m)[:, None]
    A = np.zeros((N + m * n, N + m * n))
    A[:N, N:] = WP.T
    A[N:, :N] = P
    A[N:, N:] = L
    return BoundarySystem(params=params, grid=grid, basis=basis, matrix=A)


@dataclass
class DirichletSolution:
    """Layer-potential solution of the polyharmonic Dirichlet problem."""

    params: SplineParams
    grid: BoundaryGrid
    basis: PolyBasis
    poly_coeffs: np.ndarray  # (N,)
    densities: np.ndarray  # (m, n)
    residual: float
    rcond: float

    @property
    def curve(self) -> DomainCurve:
        return self.grid.curve

    @cached_property
    def polynomial(self):
        return self.basis.combine(self.poly_coeffs)

    def poly_eval(self, points) -> np.ndarray:
        return self.basis.eval(np.atleast_2d(points)) @ self.poly_coeffs

    def evaluate(self, points, **kwargs) -> np.ndarray:
        """u = p + sum_j V_j g_j at interior (or exterior) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = self.poly_eval(pts)
        for j in range(self.params.m):
            out = out + layer_potential(
                self.params, j, self.grid, self.densities[j], pts, **kwargs
            )
        if np.asarray(points).ndim == 1:
            return float(out[0])
        return out

    def boundary_trace(self, k: int, side: str = "inside", **kwargs):
        """One-sided nodal trace of op_k u, including the polynomial part."""
        vals, est = one_sided_trace(
            self.params, self.densities, self.grid, k, side, **kwargs
        )
        from .polyspace import boundary_op_values

        vals = vals + boundary_op_values(
            k, self.polynomial, self.grid.points, self.grid.normals
        )
        return vals, est


def solve_dirichlet(
    params: SplineParams,
    grid: BoundaryGrid,
    data,
    *,
    basis: PolyBasis | None = None,
    refine_steps: int = 1,
    residual_tol: float = 1e-8,
    estimate_condition: bool = True,
) -> DirichletSolution:
    """Solve the Dirichlet problem with nodal data rows op_k f, k < m.

    ``data`` may be an (m, n) array of boundary values or a
    :class:`~surfspline.targets.TargetFunction`, in which case the rows are
    its traces on the grid.  The bordered system is LU-factored; the
    solution is polished with ``refine_steps`` rounds of iterative
    refinement and rejected if the relative residual stays above
    ``residual_tol``.
    """
    if isinstance(data, TargetFunction):
        data = data.boundary_data(grid)
    data = np.asarray(data, dtype=float)
    m, n = params.m, grid.n
    if data.shape != (m, n):
        raise ValueError(f"boundary data must have shape {(m, n)}, got {data.shape}")
    system = assemble_boundary_system(params, grid, basis)
    A = system.matrix
    N = system.n_poly
    rhs = np.concatenate([np.zeros(N), data.ravel()])
    try:
        lu, piv = lu_factor(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise SingularSystemError(str(exc)) from exc
    if not np.all(np.isfinite(lu)):
        raise SingularSystemError("boundary system factorization produced non-finite values")
    z = lu_solve((lu, piv), rhs)
    for _ in range(refine_steps):
        r = rhs - A @ z
        z = z + lu_solve((lu, piv), r)
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    residual = float(np.max(np.abs(rhs - A @ z))) / scale
    if residual > residual_tol:
        raise ResidualToleranceError(
            f"boundary system residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    rcond = np.nan
    if estimate_condition:
        gecon = get_lapack_funcs("gecon", (A,))
        anorm = float(np.linalg.norm(A, 1))
        rcond, info = gecon(lu, anorm, norm="1")
        if info != 0 or not rcond > 0:
            raise SingularSystemError(
                f"condition estimate failed (info={info}, rcond={rcond})"
            )
    coeffs, dens = system.split(z)
    return DirichletSolution(
        params=params,
        grid=system.grid,
        basis=system.basis,
        poly_coeffs=coeffs,
        densities=dens,
        residual=residual,
        rcond=float(rcond),
    )


def compute_Nj(
    params: SplineParams,
    grid: BoundaryGrid,
    f: TargetFunction,
    *,
    trace_kwargs: dict | None = None,
    **solve_kwargs,
) -> tuple[np.ndarray, DirichletSolution]:
    """Boundary source densities of the multilayer representation of ``f``.

    Solves the Dirichlet problem with data ``op_k f`` for ``k < m``, giving a
    boundary potential u that matches the low-order traces of ``f``.  The
    density that pairs with the order-j trace of the kernel in the volume
    representation is then

        N_j f = g_j + (-1)^(j+1) * (op_{2m-1-j} f - op_{2m-1-j} u|_inside),

    where g_j is the solved layer density and the inner trace of u is taken
    by one-sided extrapolation.  Returns the (m, n) density array together
    with the underlying Dirichlet solution (whose polynomial part completes
    the representation).
    """
    m = params.m
    sol = solve_dirichlet(params, grid, f.boundary_data(grid), **solve_kwargs)
    rows = np.empty((m, grid.n))
    tk = trace_kwargs or {}
    for j in range(m):
        k = 2 * m - 1 - j
        lam_f = f.trace(k, grid.points, grid.normals)
        lam_u, _ = sol.boundary_trace(k, "inside", **tk)
        sign = -1.0 if j % 2 == 0 else 1.0
        rows[j] = sol.densities[j] + sign * (lam_f - lam_u)
    return rows, sol
