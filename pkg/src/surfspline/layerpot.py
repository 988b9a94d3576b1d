"""Layer potentials, their boundary restrictions, and one-sided traces.

The j-th layer potential of a density g on the boundary curve is

    V_j g (x) = integral over the boundary of g(a) * K_j(x, a) dsigma(a),

with ``K_j`` the order-j boundary-operator derivative of the surface-spline
kernel (see :mod:`surfspline.kernel`).  Three numerical tasks live here:

* Nystrom matrices of the boundary-restricted operators op_k V_j for the
  weakly singular range k + j <= 2m - 2, assembled with the classical
  spectral log-splitting quadrature for periodic kernels: the kernel is
  written as ``smooth1 + smooth2 * log(4 sin^2((t-s)/2))`` and the log factor
  is integrated with its exact trigonometric weights.

* Off-boundary evaluation of the potentials with automatic trigonometric
  upsampling of the density, which keeps the periodic-trapezoid error under
  control at targets a few grid spacings from the boundary.

* One-sided boundary traces of op_k applied to a combination of potentials,
  computed by evaluating along a geometric offset ladder and extrapolating
  to the boundary (the potentials are smooth up to the boundary from either
  side, so polynomial extrapolation in the offset converges fast).

The jump relation across the boundary, in the normalization used throughout
this package (kernel normalized against the m-fold Laplacian, outward
normal), is

    lim inside - lim outside of op_(2m-1-j) V_j g = (-1)^(j+1) g,

with all lower-order traces continuous.  ``jump_check`` measures the nodal
deviation from this relation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DomainValidityError,
    ExtrapolationDivergenceError,
    NearBoundaryAccuracyWarning,
)
from .geometry import BoundaryGrid, signed_distance
from .kernel import SplineParams, _pair_eval, _pair_eval_split, _pair_diag, boundary_kernel

__all__ = [
    "kress_log_weights",
    "trig_upsample",
    "nystrom_matrix",
    "layer_potential",
    "one_sided_trace",
    "jump_check",
]


@lru_cache(maxsize=32)
def kress_log_weights(n: int) -> np.ndarray:
    """Quadrature weights R_q for the periodic log factor.

    For even n, ``sum_l R_{|i-l|} f(s_l)`` approximates the integral over
    [0, 2pi] of ``f(s) log(4 sin^2((t_i - s)/2))`` with spectral accuracy for
    smooth periodic f.  Returned indexed by the lag q = 0 .. n-1.
    """
    if n % 2 or n < 4:
        raise ValueError("log-quadrature needs even n >= 4")
    q = np.arange(n)
    ks = np.arange(1, n // 2)
    # R_q = -(4 pi / n) sum_k cos(2 pi k q / n)/k - (2 pi / n^2) (-1)^q
    cos_table = np.cos(2 * np.pi * np.outer(q, ks) / n)
    R = -(4 * np.pi / n) * cos_table @ (1.0 / ks) - (2 * np.pi / n**2) * (-1.0) ** q
    return R


def trig_upsample(values: np.ndarray, n_new: int) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto a finer grid."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if n_new == n:
        return values.copy()
    if n_new < n:
        raise ValueError("only upsampling is supported")
    spec = np.fft.rfft(values, axis=-1)
    if n % 2 == 0 and spec.shape[-1] > 1:
        spec = spec.copy()
        spec[..., -1] *= 0.5  # split the Nyquist mode symmetrically
        pad_width = n_new // 2 + 1 - spec.shape[-1]
    else:
        pad_width = n_new // 2 + 1 - spec.shape[-1]
    pad_shape = spec.shape[:-1] + (pad_width,)
    spec = np.concatenate([spec, np.zeros(pad_shape, dtype=complex)], axis=-1)
    return np.fft.irfft(spec, n=n_new, axis=-1) * (n_new / n)


def nystrom_matrix(params: SplineParams, k: int, j: int, grid: BoundaryGrid) -> np.ndarray:
    """Dense Nystrom matrix of the boundary operator op_k V_j on the grid.

    Valid in the weakly singular range ``k + j <= 2m - 2``; the kernel's log
    part is integrated with the exact periodic log weights and the remaining
    smooth part with the plain trapezoid rule, so the matrix applied to
    smooth densities converges spectrally in the grid size.
    """
    if k + j > 2 * params.m - 2:
        raise DomainValidityError(
            f"nystrom assembly limited to k+j <= 2m-2, got ({k},{j})"
        )
    n = grid.n
    t = grid.t
    pts = grid.points
    nrm = grid.normals
    x = pts[:, None, :]
    nx = nrm[:, None, :]
    a = pts[None, :, :]
    na = nrm[None, :, :]
    eye = np.eye(n, dtype=bool)
    # evaluate on the full grid but fix the diagonal afterwards
    xs = np.where(eye[..., None], x + 1.0, x)  # shift diagonal args off r = 0
    reg, logc, r = _pair_eval_split(params, k, j, xs, nx, a, na)
    dt = t[:, None] - t[None, :]
    sin2 = 4.0 * np.sin(0.5 * dt) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        smooth_log = 0.5 * np.log(r**2 / sin2)
        A_smooth = reg + logc * smooth_log
    B = 0.5 * logc
    reg0, logc0 = _pair_diag(params, k, j)
    A_diag = reg0 + logc0 * np.log(grid.speed)
    B_diag = np.full(n, 0.5 * logc0)
    np.fill_diagonal(A_smooth, A_diag)
    np.fill_diagonal(B, B_diag)
    R = kress_log_weights(n)
    lag = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    M = (2 * np.pi / n) * A_smooth + R[lag] * B
    M *= grid.speed[None, :]
    return M


# ---------------------------------------------------------------------------
# off-boundary evaluation
# ---------------------------------------------------------------------------


def _needed_factor(n: int, dist_param: np.ndarray, min_resolve: float, max_nodes: int):
    """Power-of-two upsampling factors so that n_f * dist >= min_resolve."""
    with np.errstate(divide="ignore"):
        need = min_resolve / (n * np.maximum(dist_param, 1e-300))
    factors = 2.0 ** np.ceil(np.log2(np.maximum(need, 1.0)))
    factors = np.minimum(factors, max(1, max_nodes // n))
    return factors.astype(int)


def _potential_sum(params, joblist, grid, x_pts, n_x=None, chunk: int = 2048):
    """Sum over (k, j, density) jobs of the operated potentials at x_pts."""
    npts = x_pts.shape[0]
    out = np.zeros(npts)
    for lo in range(0, npts, chunk):
        hi = min(npts, lo + chunk)
        xs = x_pts[lo:hi, None, :]
        nxs = None if n_x is None else n_x[lo:hi, None, :]
        al = grid.points[None, :, :]
        nl = grid.normals[None, :, :]
        acc = np.zeros(hi - lo)
        for k, j, dens in joblist:
            if k == 0:
                ker = boundary_kernel(params, j, xs, al, nl)
            else:
                ker = _pair_eval(params, k, j, xs, nxs, al, nl)
            acc += ker @ (grid.weights * dens)
        out[lo:hi] = acc
    return out


def layer_potential(
    params: SplineParams,
    j: int,
    grid: BoundaryGrid,
    density: np.ndarray,
    points,
    *,
    min_resolve: float = 34.0,
    max_nodes: int = 16384,
) -> np.ndarray:
    """Evaluate V_j density at off-boundary points.

    The density is trigonometrically upsampled per point group until the
    quadrature resolves the distance to the boundary; points closer than the
    finest resolvable distance trigger :class:`NearBoundaryAccuracyWarning`.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    scalar_in = np.asarray(points).ndim == 1
    rho = np.atleast_1d(signed_distance(grid.curve, pts))
    speed_max = float(np.max(grid.speed))
    dist_param = np.abs(rho) / speed_max
    factors = _needed_factor(grid.n, dist_param, min_resolve, max_nodes)
    if np.any(grid.n * factors * dist_param < 0.5 * min_resolve):
        warnings.warn(
            "layer potential evaluated closer to the boundary than the "
            "quadrature resolves; values there may be inaccurate",
            NearBoundaryAccuracyWarning,
        )
    out = np.empty(pts.shape[0])
    for f in np.unique(factors):
        sel = factors == f
        sub = BoundaryGrid.build(grid.curve, grid.n * int(f)) if f > 1 else grid
        dens = trig_upsample(density, sub.n) if f > 1 else density
        out[sel] = _potential_sum(params, [(0, j, dens)], sub, pts[sel])
    if scalar_in:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# one-sided traces and jumps
# ---------------------------------------------------------------------------


def one_sided_trace(
    params: SplineParams,
    densities: np.ndarray,
    grid: BoundaryGrid,
    k: int,
    side: str,
    *,
    slots: tuple[int, ...] | None = None,
    delta0: float | None = None,
    ratio: float = 2.0,
    rungs: int = 5,
    upsample: int = 32,
    max_nodes: int = 16384,
    divergence_tol: float = 0.05,
) -> tuple[np.ndarray, np.ndarray]:
    """Boundary limit of op_k applied to sum_s V_slots[s] densities[s].

    By default row s of ``densities`` charges the potential of order s (the
    multilayer arrangement uses orders ``0 .. m-1``); pass explicit ``slots``
    for other combinations.  Evaluates along the normal-offset ladder
    ``delta0 / ratio**r`` on the requested side and extrapolates
    polynomially to offset zero.  Returns the extrapolated nodal values and
    an error estimate (the magnitude of the last extrapolation correction).
    Raises when the ladder fails to stabilize relative to the trace
    magnitude.
    """
    if side not in ("inside", "outside"):
        raise ValueError("side must be 'inside' or 'outside'")
    densities = np.atleast_2d(np.asarray(densities, dtype=float))
    if slots is None:
        slots = tuple(range(densities.shape[0]))
    if densities.shape != (len(slots), grid.n):
        raise ValueError("densities must have shape (len(slots), n)")
    if any(not 0 <= j <= 2 * params.m - 1 for j in slots):
        raise ValueError("potential orders must lie in 0 .. 2m-1")
    spacing = 2 * np.pi * float(np.max(grid.speed)) / grid.n
    if delta0 is None:
        delta0 = 5.0 * spacing
    sgn = -1.0 if side == "inside" else 1.0
    n_f = min(grid.n * upsample, max_nodes)
    n_f = max(grid.n, (n_f // 2) * 2)
    fine = BoundaryGrid.build(grid.curve, n_f) if n_f != grid.n else grid
    jobs = [
        (k, j, trig_upsample(densities[s], n_f))
        for s, j in enumerate(slots)
    ]
    deltas = np.array([delta0 / ratio**r for r in range(rungs)])
    vals = np.empty((rungs, grid.n))
    for r, d in enumerate(deltas):
        x_r = grid.points + sgn * d * grid.normals
        vals[r] = _potential_sum(params, jobs, fine, x_r, n_x=grid.normals)
    # Neville extrapolation to delta -> 0, tracking the last correction
    table = vals.copy()
    prev0 = vals[0].copy()
    est = np.zeros(grid.n)
    for lvl in range(1, rungs):
        for i in range(rungs - lvl):
            num = deltas[i] * table[i + 1] - deltas[i + lvl] * table[i]
            table[i] = num / (deltas[i] - deltas[i + lvl])
        est = np.abs(table[0] - prev0)
        prev0 = table[0].copy()
    scale = max(float(np.max(np.abs(table[0]))), 1e-30)
    if float(np.max(est)) > divergence_tol * max(scale, 1.0):
        raise ExtrapolationDivergenceError(
            f"offset ladder did not stabilize: est {float(np.max(est)):.3e} vs scale {scale:.3e}"
        )
    return table[0], est


def jump_check(
    params: SplineParams,
    j: int,
    density: np.ndarray,
    grid: BoundaryGrid,
    **ladder_kwargs,
) -> float:
    """Relative nodal deviation from the jump relation of op_(2m-1-j) V_j.

    Computes inside and outside extrapolated traces of the top-order operator
    for a single charged slot j and returns
    ``max |(inside - outside) - (-1)^(j+1) g| / max |g|``.
    """
    density = np.asarray(density, dtype=float)
    if density.shape != (grid.n,):
        raise ValueError("density must be a nodal vector")
    k = 2 * params.m - 1 - j
    dens = density[None, :]
    inner, _ = one_sided_trace(params, dens, grid, k, "inside", slots=(j,), **ladder_kwargs)
    outer, _ = one_sided_trace(params, dens, grid, k, "outside", slots=(j,), **ladder_kwargs)
    expected = (-1.0) ** (j + 1) * density
    return float(np.max(np.abs((inner - outer) - expected)) / np.max(np.abs(density)))
