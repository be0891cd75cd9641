"""One-parameter conditional families and boundary-scaling diagnostics.

For measurement vectors xi_t = (alpha0 + t alpha1)/sqrt(1+t^2) the trusted
conditional states sigma_t approach a boundary contact as t -> 0. The
certifying pattern is a first-order off-diagonal |b_t| ~ t together with a
lower-right population d_t = O(t^2); the fits here estimate both exponents
and the (u, delta) defect curve of the normalized Bloch vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DensityMatrix,
    Tolerances,
    abs2,
    conditional_state,
    dagger,
    fro_norm,
    hermitian_eigh,
    support_kernel_projectors,
)

__all__ = [
    "ConditionalFamily",
    "ScalingReport",
    "DefectCurve",
    "default_t_grid",
    "sigma_family",
    "compressed_slice",
    "scaling_fit",
    "defect_curve",
    "recommended_cap_constant",
]

#: entries below this magnitude count as identically zero in log-log fits
D_FLOOR = 1e-14


@dataclass(frozen=True)
class ConditionalFamily:
    """Unnormalized 2x2 trusted slices over a t-grid with their Bloch profiles.

    m is the trace, bloch the (Rx, Ry, Rz) vector, b the off-diagonal entry,
    d the lower-right entry, u = |R_perp|/m and delta = (m - Rz)/m = 2d/m.
    """

    t_grid: np.ndarray
    sigmas: np.ndarray
    m: np.ndarray
    bloch: np.ndarray
    b: np.ndarray
    d: np.ndarray
    u: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        ball = self.u**2 + (1.0 - self.delta) ** 2
        if np.any(ball > 1.0 + 1e-9):
            raise ValueError("normalized Bloch vector leaves the unit ball")


@dataclass(frozen=True)
class ScalingReport:
    """Log-log exponents and the certificate constants of one family.

    slope_d is None when every d_t sits below the numeric floor, in which
    case the quadratic bound holds vacuously. passes requires slope_b within
    5% of 1 and slope_d >= 1.95 (or the below-floor flag).
    """

    slope_b: float
    slope_d: float | None
    d_below_floor: bool
    l_hat: float
    c_hat: float
    passes: bool
    window: tuple[float, float]
    n_points: int


@dataclass(frozen=True)
class DefectCurve:
    """Rows (t, u, delta) plus the fitted constant of delta <= C u^2."""

    points: np.ndarray
    c_bound: float | None
    degenerate: bool


def default_t_grid(tmin: float = 1e-4, tmax: float = 1e-2, n: int = 20) -> np.ndarray:
    """Logarithmic grid well below curvature corrections, above t^2 noise."""
    if not 0 < tmin < tmax:
        raise ValueError("need 0 < tmin < tmax")
    if n < 2:
        raise ValueError("need at least two grid points")
    return np.logspace(math.log10(tmin), math.log10(tmax), n)


def _profiles(t_grid: np.ndarray, sigmas: np.ndarray) -> ConditionalFamily:
    m = sigmas[:, 0, 0].real + sigmas[:, 1, 1].real
    if np.any(m <= 0):
        raise ValueError("conditional state with nonpositive trace")
    b = sigmas[:, 0, 1]
    d = sigmas[:, 1, 1].real
    bloch = np.stack(
        [2.0 * b.real, -2.0 * b.imag, sigmas[:, 0, 0].real - d], axis=1
    )
    u = np.hypot(bloch[:, 0], bloch[:, 1]) / m
    delta = (m - bloch[:, 2]) / m
    return ConditionalFamily(
        t_grid=t_grid, sigmas=sigmas, m=m, bloch=bloch, b=b, d=d, u=u, delta=delta
    )


def _xi(alpha0: np.ndarray, alpha1: np.ndarray, t: float) -> np.ndarray:
    return (alpha0 + t * alpha1) / math.sqrt(1.0 + t * t)


def sigma_family(
    rho: DensityMatrix,
    alpha0: np.ndarray,
    alpha1: np.ndarray,
    t_grid: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> ConditionalFamily:
    """Conditional states at xi_t for a qubit trusted side.

    Trusted dimensions above two need a compression pair; use
    compressed_slice for those.
    """
    if rho.dim_trusted != 2:
        raise ValueError("sigma_family needs a qubit trusted side; use compressed_slice")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValueError("t grid must be a nonempty 1-d array")
    if np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t grid must be strictly positive and ascending")
    alpha0 = np.asarray(alpha0, dtype=np.complex128).reshape(-1)
    alpha1 = np.asarray(alpha1, dtype=np.complex128).reshape(-1)
    sigmas = np.stack(
        [conditional_state(rho, _xi(alpha0, alpha1, t), tol) for t in t_grid]
    )
    return _profiles(t_grid, sigmas)


def compressed_slice(
    rho: DensityMatrix,
    alpha0: np.ndarray,
    alpha1: np.ndarray,
    phi: np.ndarray,
    beta: np.ndarray,
    t_grid: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> ConditionalFamily:
    """Two-dimensional compression of sigma_t onto the ordered basis (phi, beta).

    phi must lie in the support of the contact block A and beta in its
    kernel, so the compressed entries scale as a + O(t), t v + O(t^2) and
    t^2 d + O(t^3); the lower-right entry has no first-order term.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    alpha0 = np.asarray(alpha0, dtype=np.complex128).reshape(-1)
    alpha1 = np.asarray(alpha1, dtype=np.complex128).reshape(-1)
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    beta = np.asarray(beta, dtype=np.complex128).reshape(-1)
    if abs(np.vdot(phi, beta)) > tol.eps_zero:
        raise ValueError("phi and beta must be orthogonal")
    dx, dy = rho.dims
    r = rho.mat.reshape(dx, dy, dx, dy)
    a_block = np.einsum("a,abcd,c->bd", alpha0.conj(), r, alpha0)
    a_block = 0.5 * (a_block + dagger(a_block))
    p_supp, _, _ = support_kernel_projectors(a_block, tol)
    check = math.sqrt(tol.eps_zero)
    if fro_norm(a_block @ beta) > check * float(a_block.trace().real):
        raise ValueError("beta is not in the kernel of the contact block")
    if fro_norm(phi - p_supp @ phi) > check:
        raise ValueError("phi is not in the support of the contact block")
    frame = np.column_stack([phi, beta])
    sigmas = []
    for t in t_grid:
        sigma = conditional_state(rho, _xi(alpha0, alpha1, t), tol)
        sigmas.append(dagger(frame) @ sigma @ frame)
    return _profiles(t_grid, np.stack(sigmas))


def _ols_slope(logx: np.ndarray, logy: np.ndarray) -> float:
    x = logx - logx.mean()
    return float(np.dot(x, logy - logy.mean()) / np.dot(x, x))


def scaling_fit(
    fam: ConditionalFamily,
    fit_window: tuple[float, float] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> ScalingReport:
    """Least-squares exponents of |b_t| and d_t against t inside a window."""
    if fit_window is None:
        fit_window = (float(fam.t_grid[0]), float(fam.t_grid[-1]))
    lo, hi = fit_window
    mask = (fam.t_grid >= lo) & (fam.t_grid <= hi)
    if mask.sum() < 4:
        raise ValueError("fit window must contain at least four grid points")
    t = fam.t_grid[mask]
    babs = np.abs(fam.b[mask])
    d = fam.d[mask]

    bmask = babs > D_FLOOR
    slope_b = _ols_slope(np.log(t[bmask]), np.log(babs[bmask])) if bmask.sum() >= 2 else float("nan")
    l_hat = float((babs / t).min())

    d_below_floor = bool(np.all(d < D_FLOOR))
    slope_d = None if d_below_floor else _ols_slope(np.log(t[d > D_FLOOR]), np.log(d[d > D_FLOOR]))
    c_hat = float((d / t**2).max())

    passes = (
        math.isfinite(slope_b)
        and abs(slope_b - 1.0) <= 0.05
        and (d_below_floor or slope_d >= 1.95)
    )
    return ScalingReport(
        slope_b=slope_b,
        slope_d=slope_d,
        d_below_floor=d_below_floor,
        l_hat=l_hat,
        c_hat=c_hat,
        passes=passes,
        window=(lo, hi),
        n_points=int(mask.sum()),
    )


def defect_curve(fam: ConditionalFamily, tol: Tolerances = DEFAULT_TOL) -> DefectCurve:
    """(u, delta) pairs of the normalized steered Bloch vectors.

    Fits the smallest constant with delta <= C u^2 over the grid. A family
    with no tangential motion (u identically zero) is reported degenerate.
    """
    if np.any(fam.m <= tol.eps_zero):
        raise ValueError("vanishing conditional trace on the grid")
    points = np.stack([fam.t_grid, fam.u, fam.delta], axis=1)
    live = fam.u > D_FLOOR
    if not live.any():
        return DefectCurve(points=points, c_bound=None, degenerate=True)
    c_bound = float((fam.delta[live] / fam.u[live] ** 2).max())
    return DefectCurve(points=points, c_bound=c_bound, degenerate=False)


def recommended_cap_constant(report: ScalingReport, margin: float = 1.25) -> float:
    """Cap constant K strictly above 4 c_hat / l_hat, as the obstruction needs."""
    if report.l_hat <= 0:
        raise ValueError("cap constant needs a positive first-order coefficient")
    return margin * 4.0 * report.c_hat / report.l_hat
