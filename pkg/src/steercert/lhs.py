"""Discretized local-hidden-state feasibility via linear programming.

The hidden states are pure qubit states on a deterministic sphere grid,
the response functions are dilated into deterministic binary strategies,
and membership of a finite projective assemblage in the resulting polytope
is decided by the L1 simplex. Feasibility certifies an LHS model for the
chosen settings. Infeasibility on a finite grid is a diagnostic, never a
steering proof; the analytic criteria live in certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, DensityMatrix, Tolerances, abs2, conditional_state
from .lp import l1_feasibility

__all__ = [
    "Assemblage",
    "HiddenGrid",
    "LhsLpProblem",
    "LhsLpSolution",
    "MAX_SETTINGS",
    "MAX_LP_COLUMNS",
    "LP_TOL",
    "direction_to_ket",
    "assemblage_from_state",
    "build_grid",
    "refine_grid",
    "assemble_lp",
    "lhs_lp",
    "cap_mass",
]

MAX_SETTINGS = 12
MAX_LP_COLUMNS = 200_000
LP_TOL = 1e-7

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class Assemblage:
    """Binary projective assemblage: settings as kets, members sigma_{a|x}.

    members has shape (n_settings, 2, 2, 2); the two outcome members of a
    setting always sum to the same reduced state.
    """

    settings: np.ndarray
    members: np.ndarray

    @property
    def n_settings(self) -> int:
        return self.settings.shape[0]

    def reduced_state(self) -> np.ndarray:
        return self.members[0, 0] + self.members[0, 1]


@dataclass(frozen=True)
class HiddenGrid:
    """Deterministic pure-state grid: unit Bloch vectors, optional contact atom."""

    points: np.ndarray
    includes_contact_atom: bool = False
    contact_index: int | None = None


@dataclass(frozen=True)
class LhsLpProblem:
    a_mat: np.ndarray
    b_vec: np.ndarray
    n_settings: int
    n_strategies: int
    n_grid: int


@dataclass(frozen=True)
class LhsLpSolution:
    feasible: bool
    residual: float
    weights: np.ndarray
    iterations: int


def direction_to_ket(direction: np.ndarray) -> np.ndarray:
    """Spinor of a unit Bloch vector: (cos(t/2), e^{i p} sin(t/2))."""
    x, y, z = (float(c) for c in direction)
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array(
        [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)],
        dtype=np.complex128,
    )


def _setting_ket(setting) -> np.ndarray:
    arr = np.asarray(setting)
    if arr.shape == (3,) and np.isrealobj(arr):
        return direction_to_ket(arr / np.linalg.norm(arr))
    ket = arr.astype(np.complex128).reshape(-1)
    if ket.shape != (2,):
        raise ValueError("setting must be a Bloch 3-vector or a qubit ket")
    norm = math.sqrt(float(abs2(ket).sum()))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("setting ket must be normalized")
    return ket


def assemblage_from_state(
    rho: DensityMatrix, directions, tol: Tolerances = DEFAULT_TOL
) -> Assemblage:
    """Assemblage from binary rank-one projective measurements on the untrusted qubit.

    Each direction gives the projector pair (|xi><xi|, I - |xi><xi|); entries
    can be qubit kets or real Bloch 3-vectors.
    """
    if rho.dims != (2, 2):
        raise ValueError("the LHS lab works on the two-qubit cut")
    kets = [_setting_ket(d) for d in directions]
    if not 1 <= len(kets) <= MAX_SETTINGS:
        raise ValueError(f"need between 1 and {MAX_SETTINGS} settings, got {len(kets)}")
    members = np.empty((len(kets), 2, 2, 2), dtype=np.complex128)
    for x, ket in enumerate(kets):
        sigma0 = conditional_state(rho, ket, tol)
        perp = np.array([-np.conj(ket[1]), np.conj(ket[0])], dtype=np.complex128)
        members[x, 0] = sigma0
        members[x, 1] = conditional_state(rho, perp, tol)
    return Assemblage(settings=np.stack(kets), members=members)


def build_grid(
    n_points: int, include_contact: bool = False, contact_dir=(0.0, 0.0, 1.0)
) -> HiddenGrid:
    """Fibonacci-sphere grid, optionally with the exact contact point appended."""
    if n_points < 6:
        raise ValueError("need at least 6 grid points")
    i = np.arange(n_points)
    z = 1.0 - 2.0 * (i + 0.5) / n_points
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * _GOLDEN_ANGLE
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    if include_contact:
        contact = np.asarray(contact_dir, dtype=float)
        contact = contact / np.linalg.norm(contact)
        pts = np.vstack([pts, contact])
        return HiddenGrid(points=pts, includes_contact_atom=True, contact_index=len(pts) - 1)
    return HiddenGrid(points=pts, includes_contact_atom=False, contact_index=None)


def refine_grid(grid: HiddenGrid) -> HiddenGrid:
    """Double the point count by adding an offset Fibonacci layer.

    The original points are kept, so LP residuals cannot increase under
    refinement with the strategy set unchanged.
    """
    base = grid.points if grid.contact_index is None else np.delete(grid.points, grid.contact_index, axis=0)
    n = base.shape[0]
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = (i + 0.5) * _GOLDEN_ANGLE
    extra = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    extra /= np.linalg.norm(extra, axis=1)[:, None]
    pts = np.vstack([base, extra])
    if grid.contact_index is not None:
        contact = grid.points[grid.contact_index]
        pts = np.vstack([pts, contact])
        return HiddenGrid(points=pts, includes_contact_atom=True, contact_index=len(pts) - 1)
    return HiddenGrid(points=pts, includes_contact_atom=False, contact_index=None)


def _state_components(sigma: np.ndarray) -> np.ndarray:
    """Real 4-vector (s00, s11, Re s01, Im s01) of a 2x2 Hermitian matrix."""
    return np.array(
        [sigma[0, 0].real, sigma[1, 1].real, sigma[0, 1].real, sigma[0, 1].imag]
    )


def assemble_lp(asm: Assemblage, grid: HiddenGrid) -> LhsLpProblem:
    """Equality system sum_{lambda,j} D_lambda(a|x) w_{lambda,j} tau_j = sigma_{a|x}.

    Strategies enumerate all binary response functions; strategy lambda
    answers bit (lambda >> x) & 1 on setting x. Rows are ordered by
    (setting, outcome, component) with four real components per member.
    """
    n = asm.n_settings
    n_strategies = 2**n
    n_grid = grid.points.shape[0]
    if n_strategies * n_grid > MAX_LP_COLUMNS:
        raise ValueError(
            f"2^{n} strategies x {n_grid} grid points exceeds {MAX_LP_COLUMNS} columns; "
            "reduce the setting count or the grid size"
        )
    lam = np.arange(n_strategies)
    d_mat = np.empty((2 * n, n_strategies))
    for x in range(n):
        answers = (lam >> x) & 1
        d_mat[2 * x] = answers == 0
        d_mat[2 * x + 1] = answers == 1
    # tau components: ((1+z)/2, (1-z)/2, x/2, -y/2)
    px, py, pz = grid.points.T
    t_mat = np.stack([(1 + pz) / 2, (1 - pz) / 2, px / 2, -py / 2])
    a_mat = (d_mat[:, None, :, None] * t_mat[None, :, None, :]).reshape(
        8 * n, n_strategies * n_grid
    )
    b_vec = np.concatenate(
        [_state_components(asm.members[x, a]) for x in range(n) for a in (0, 1)]
    )
    return LhsLpProblem(
        a_mat=a_mat, b_vec=b_vec, n_settings=n, n_strategies=n_strategies, n_grid=n_grid
    )


def lhs_lp(asm: Assemblage, grid: HiddenGrid, lp_tol: float = LP_TOL) -> LhsLpSolution:
    """Membership of the assemblage in the grid-discretized LHS polytope.

    The optimum of the L1 program is the residual; at or below lp_tol the
    assemblage is certified to admit an LHS model for these settings. This
    is an inner approximation: a positive residual at a finite grid is
    reported as-is and proves nothing by itself.
    """
    problem = assemble_lp(asm, grid)
    result = l1_feasibility(problem.a_mat, problem.b_vec)
    weights = result.x.reshape(problem.n_strategies, problem.n_grid)
    return LhsLpSolution(
        feasible=result.residual <= lp_tol,
        residual=result.residual,
        weights=weights,
        iterations=result.iterations,
    )


def cap_mass(
    sol: LhsLpSolution,
    grid: HiddenGrid,
    t: float,
    cap_constant: float,
    contact_dir=(0.0, 0.0, 1.0),
) -> float:
    """Hidden-measure weight inside the punctured cap 1 - r.n <= K^2 t^2 / 2.

    The exact contact atom is excluded: it carries no transverse component,
    so it cannot contribute the first-order displacement the cap must fund.
    """
    if t <= 0 or cap_constant <= 0:
        raise ValueError("t and the cap constant must be positive")
    contact = np.asarray(contact_dir, dtype=float)
    contact /= np.linalg.norm(contact)
    height = 1.0 - grid.points @ contact
    mask = height <= cap_constant**2 * t**2 / 2.0
    mask &= height > 1e-15
    return float(sol.weights.sum(axis=0)[mask].sum())
