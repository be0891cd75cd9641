"""Generators for the product-null state families and their known coherences.

Every generator returns a trace-one PSD two-qubit state. Before any
placement or filtering, all of them annihilate |01> and carry their
entanglement in the single <00|rho|11> entry, which each parametrization
exposes in closed form.
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
    dagger,
    hermitian_eigh,
    unitary_completion,
)

__all__ = [
    "HBlockParams",
    "CholeskyParams",
    "SpectralParams",
    "PlacementParams",
    "from_h_block",
    "cholesky_branch",
    "spectral_branch",
    "x_family",
    "bell_mix",
    "two_product_one_entangled",
    "place_and_filter",
    "placement_unitaries",
    "werner",
]

# support of the standard form: |00>, |10>, |11> in the flat 4-basis
_SUPPORT_IDX = (0, 2, 3)

_SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


@dataclass(frozen=True)
class HBlockParams:
    """Entries of the 3x3 support block H; diagonal real, h01/h02/h12 complex."""

    h00: float
    h11: float
    h22: float
    h01: complex = 0.0
    h02: complex = 0.0
    h12: complex = 0.0

    def __post_init__(self):
        for name in ("h00", "h11", "h22"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.h00 + self.h11 + self.h22 <= 0:
            raise ValueError("H must have positive trace")

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.h00, self.h01, self.h02],
                [np.conj(self.h01), self.h11, self.h12],
                [np.conj(self.h02), np.conj(self.h12), self.h22],
            ],
            dtype=np.complex128,
        )


@dataclass(frozen=True)
class CholeskyParams:
    """Lower-triangular factor entries; a, b, c positive keeps rank three."""

    a: float
    b: float
    c: float
    x: complex = 0.0
    y: complex = 0.0
    z: complex = 0.0

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("a, b, c must be strictly positive")

    def h_entries(self) -> HBlockParams:
        a, b, c, x, y, z = self.a, self.b, self.c, self.x, self.y, self.z
        return HBlockParams(
            h00=a * a,
            h11=float(abs2(x)) + b * b,
            h22=float(abs2(z)) + float(abs2(y)) + c * c,
            h01=a * np.conj(x),
            h02=a * np.conj(z),
            h12=x * np.conj(z) + b * np.conj(y),
        )


@dataclass(frozen=True)
class SpectralParams:
    """Spectral weights plus Euler angles of the support-space eigenframe."""

    nu1: float
    nu2: float
    nu3: float
    theta12: float = 0.0
    theta13: float = 0.0
    theta23: float = 0.0
    phi12: float = 0.0
    phi13: float = 0.0
    phi23: float = 0.0

    def __post_init__(self):
        if min(self.nu1, self.nu2, self.nu3) <= 0:
            raise ValueError("spectral weights must be strictly positive")
        if abs(self.nu1 + self.nu2 + self.nu3 - 1.0) > 1e-12:
            raise ValueError("spectral weights must sum to 1")
        for name in ("theta12", "theta13", "theta23"):
            if not 0.0 <= getattr(self, name) <= math.pi / 2:
                raise ValueError(f"{name} must lie in [0, pi/2]")
        for name in ("phi12", "phi13", "phi23"):
            if not 0.0 <= getattr(self, name) < 2 * math.pi:
                raise ValueError(f"{name} must lie in [0, 2*pi)")


@dataclass(frozen=True)
class PlacementParams:
    """Bloch angles of the local vectors the product-null kernel is moved to."""

    thetaA: float = 0.0
    phiA: float = 0.0
    thetaB: float = 0.0
    phiB: float = 0.0

    def __post_init__(self):
        for name in ("thetaA", "thetaB"):
            if not 0.0 <= getattr(self, name) <= math.pi:
                raise ValueError(f"{name} must lie in [0, pi]")
        for name in ("phiA", "phiB"):
            if not 0.0 <= getattr(self, name) < 2 * math.pi:
                raise ValueError(f"{name} must lie in [0, 2*pi)")

    def alpha(self) -> np.ndarray:
        return np.array(
            [math.cos(self.thetaA / 2), np.exp(1j * self.phiA) * math.sin(self.thetaA / 2)],
            dtype=np.complex128,
        )

    def beta(self) -> np.ndarray:
        return np.array(
            [math.cos(self.thetaB / 2), np.exp(1j * self.phiB) * math.sin(self.thetaB / 2)],
            dtype=np.complex128,
        )


def from_h_block(p: HBlockParams, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Embed a PSD 3x3 block on span{|00>,|10>,|11>}; the |01> row stays zero."""
    h = p.matrix()
    trace = float(h.trace().real)
    spec = hermitian_eigh(h)
    if spec.eigenvalues[-1] < -tol.eps_psd * trace:
        raise ValueError(f"H block is indefinite (min eigenvalue {spec.eigenvalues[-1]})")
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[np.ix_(_SUPPORT_IDX, _SUPPORT_IDX)] = h / trace
    return DensityMatrix(rho, (2, 2))


def cholesky_branch(p: CholeskyParams) -> tuple[DensityMatrix, complex]:
    """Rank-three branch from a triangular factor; returns (rho, <00|rho|11>).

    The kernel is exactly span{|01>} and the reported coherence is
    a * conj(z) / N with N the trace of the unnormalized block.
    """
    hp = p.h_entries()
    n = hp.h00 + hp.h11 + hp.h22
    rho = from_h_block(hp)
    return rho, complex(p.a * np.conj(p.z) / n)


def _plane_rotation(i: int, j: int, theta: float, phi: float) -> np.ndarray:
    r = np.eye(3, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    r[i, i] = c
    r[j, j] = c
    r[i, j] = np.exp(1j * phi) * s
    r[j, i] = -np.exp(-1j * phi) * s
    return r


def spectral_branch(p: SpectralParams) -> tuple[DensityMatrix, complex]:
    """Rank-three branch from spectral data; returns (rho, support coherence).

    The eigenframe is V = R23 R13 R12 acting on the ordered support basis
    (|00>, |10>, |11>); column phases are fixed so the first row of V is
    real nonnegative, which leaves the state untouched.
    """
    v = (
        _plane_rotation(1, 2, p.theta23, p.phi23)
        @ _plane_rotation(0, 2, p.theta13, p.phi13)
        @ _plane_rotation(0, 1, p.theta12, p.phi12)
    )
    for k in range(3):
        if abs(v[0, k]) > 1e-15:
            v[:, k] *= np.conj(v[0, k]) / abs(v[0, k])
    nu = np.array([p.nu1, p.nu2, p.nu3])
    h = (v * nu) @ dagger(v)
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[np.ix_(_SUPPORT_IDX, _SUPPORT_IDX)] = h
    coherence = complex(np.sum(nu * v[0, :] * np.conj(v[2, :])))
    return DensityMatrix(rho, (2, 2)), coherence


def x_family(a: float, b: float, c: float, z: complex) -> DensityMatrix:
    """X-shaped section: the triangular branch with x = y = 0."""
    if min(a, b, c) <= 0:
        raise ValueError("a, b, c must be strictly positive")
    n = a * a + b * b + c * c + float(abs2(z))
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = a * a / n
    rho[0, 3] = a * np.conj(z) / n
    rho[3, 0] = a * z / n
    rho[2, 2] = b * b / n
    rho[3, 3] = (float(abs2(z)) + c * c) / n
    return DensityMatrix(rho, (2, 2))


def bell_mix(p: float, q: float, r: float) -> DensityMatrix:
    """Mix of the two Phi Bell states with the product state |10><10|.

    <00|rho|11> = (p - q)/2, so p = q is the separable boundary of the branch.
    """
    if min(p, q, r) <= 0:
        raise ValueError("weights must be strictly positive")
    if abs(p + q + r - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = rho[3, 3] = (p + q) / 2
    rho[0, 3] = rho[3, 0] = (p - q) / 2
    rho[2, 2] = r
    return DensityMatrix(rho, (2, 2))


def two_product_one_entangled(
    p: float, q: float, r: float, theta: float, phi: float = 0.0
) -> DensityMatrix:
    """Mix of |00>, |10> and one entangled pure state cos(theta)|00> + e^{i phi} sin(theta)|11>.

    Inside 0 < theta < pi/2 the coherence r e^{-i phi} cos(theta) sin(theta)
    never vanishes.
    """
    if min(p, q, r) <= 0:
        raise ValueError("weights must be strictly positive")
    if abs(p + q + r - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")
    if not 0.0 < theta < math.pi / 2:
        raise ValueError("theta must lie strictly inside (0, pi/2)")
    psi = np.zeros(4, dtype=np.complex128)
    psi[0] = math.cos(theta)
    psi[3] = np.exp(1j * phi) * math.sin(theta)
    rho = r * np.outer(psi, psi.conj())
    rho[0, 0] += p
    rho[2, 2] += q
    return DensityMatrix(rho, (2, 2))


def placement_unitaries(p: PlacementParams) -> tuple[np.ndarray, np.ndarray]:
    """Local unitaries with U_A|0> = alpha and U_B|1> = beta."""
    u_a = unitary_completion(p.alpha())
    u_b = unitary_completion(p.beta()) @ _SWAP2
    return u_a, u_b


def place_and_filter(
    rho0: DensityMatrix,
    placement: PlacementParams | tuple[np.ndarray, np.ndarray] | None = None,
    g: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> DensityMatrix:
    """Conjugate by local unitaries, then an invertible trusted-side filter.

    Returns (U_A (x) G U_B) rho0 (.)^+ renormalized to unit trace. A kernel
    vector alpha (x) beta of the input moves to U_A alpha (x) ((G U_B)^+)^-1 beta,
    and the NPT verdict is unchanged because G is invertible.
    """
    if rho0.dims != (2, 2):
        raise ValueError("place_and_filter expects a two-qubit state")
    if placement is None:
        u_a = np.eye(2, dtype=np.complex128)
        u_b = np.eye(2, dtype=np.complex128)
    elif isinstance(placement, PlacementParams):
        u_a, u_b = placement_unitaries(placement)
    else:
        u_a = np.asarray(placement[0], dtype=np.complex128)
        u_b = np.asarray(placement[1], dtype=np.complex128)
        for u in (u_a, u_b):
            if np.abs(dagger(u) @ u - np.eye(2)).max() > 1e-9:
                raise ValueError("placement matrices must be unitary")
    m_b = u_b if g is None else np.asarray(g, dtype=np.complex128) @ u_b
    if abs(np.linalg.det(m_b)) <= tol.eps_zero:
        raise ValueError("trusted-side filter is singular")
    big = np.kron(u_a, m_b)
    out = big @ rho0.mat @ dagger(big)
    return DensityMatrix(out / out.trace().real, (2, 2))


def werner(v: float) -> DensityMatrix:
    """Singlet-weight-v Werner state: v |Psi-><Psi-| + (1 - v) I/4.

    Full rank and NPT for 1/3 < v < 1; admits a projective-measurement
    hidden-state model up to v = 1/2.
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError("v must lie in [0, 1]")
    psi = np.zeros(4, dtype=np.complex128)
    psi[1] = 1 / math.sqrt(2)
    psi[2] = -1 / math.sqrt(2)
    rho = v * np.outer(psi, psi.conj()) + (1 - v) * np.eye(4) / 4
    return DensityMatrix(rho, (2, 2))
