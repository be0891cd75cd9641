"""Entanglement and steering verdicts from boundary data.

Partial-transpose tests, the boundary witness, tangential coherence, the
two-qubit product-null pipeline, the general support-kernel criterion and
the pure-contact separable decomposition all live here. Steerability is
reported as a tri-state: the boundary mechanism is sufficient, so its
absence is "undetermined", never "no steering".
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
    fro_norm,
    hermitian_eigh,
    partial_transpose,
    support_kernel_projectors,
)
from .nullspace import ProductNullDatum, find_boundary_contact, normal_form

__all__ = [
    "Verdict",
    "BlockDecomposition",
    "SupportKernelResult",
    "PureContactDecomposition",
    "ppt_check",
    "boundary_minor",
    "w_bd",
    "tangential_coherence",
    "pauli_coherence",
    "product_null_verdict",
    "support_kernel_criterion",
    "pure_contact_decomposition",
]

YES = "yes"
NO = "no"
UNDETERMINED = "undetermined"

MECH_PRODUCT_NULL = "product-null"
MECH_SUPPORT_KERNEL = "support-kernel"
MECH_NONE = "none"


@dataclass(frozen=True)
class Verdict:
    """Certification outcome for one state."""

    npt: bool
    min_pt_eigenvalue: float
    steerable_a_to_b: str
    steerable_b_to_a: str
    mechanism: str
    coherence: complex
    contact: ProductNullDatum | None = None


@dataclass(frozen=True)
class BlockDecomposition:
    """2x2 untrusted block of rho at an orthonormal pair (alpha0, alpha1).

    a, b, d are trusted-side operators; p_supp/p_ker project onto the
    support and kernel of a; coupling = p_supp b p_ker, and (phi, beta)
    is its leading singular pair with v = <phi| b |beta>.
    """

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    alpha0: np.ndarray
    alpha1: np.ndarray
    p_supp: np.ndarray
    p_ker: np.ndarray
    rank_a: int
    coupling: np.ndarray
    phi: np.ndarray | None
    beta: np.ndarray | None
    v: complex


@dataclass(frozen=True)
class SupportKernelResult:
    fires: bool
    block: BlockDecomposition
    npt_minor: float


@dataclass(frozen=True)
class PureContactDecomposition:
    """Two-term product decomposition of a decoupled pure-contact block."""

    a: float
    kappa: complex
    phi: np.ndarray
    eta: np.ndarray
    schur_term: np.ndarray


def ppt_check(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float]:
    """(is_ppt, min eigenvalue of the trusted-side partial transpose)."""
    min_eig = float(hermitian_eigh(partial_transpose(rho, "Y")).eigenvalues[-1])
    return min_eig >= -tol.eps_psd, min_eig


def boundary_minor(rho_std: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> float:
    """Determinant of the partial-transpose block on span{|01>, |10>}.

    Requires standard-basis input (|01> row and column vanish); negative
    exactly when the coherence entry is nonzero.
    """
    if rho_std.dims != (2, 2):
        raise ValueError("boundary_minor expects a two-qubit state")
    col = fro_norm(rho_std.mat[:, 1])
    if col > math.sqrt(tol.eps_zero):
        raise ValueError(f"input is not product-null in the standard basis (|01> column norm {col})")
    pt = partial_transpose(rho_std, "Y")
    det = pt[1, 1] * pt[2, 2] - pt[1, 2] * pt[2, 1]
    return float(det.real)


def w_bd(rho: DensityMatrix) -> float:
    """Boundary witness |rho_{00,11}|^2 - rho_{01,01} rho_{10,10}.

    Positive values certify a negative partial transpose; at an ideal
    tangency the population term vanishes and only the coherence survives.
    """
    if rho.dims != (2, 2):
        raise ValueError("w_bd expects a two-qubit state")
    m = rho.mat
    return float(abs2(m[0, 3]) - (m[1, 1] * m[2, 2]).real)


def tangential_coherence(rho: DensityMatrix) -> complex:
    """The <00|rho|11> entry in the current basis."""
    if rho.dims != (2, 2):
        raise ValueError("tangential_coherence expects a two-qubit state")
    return complex(rho.mat[0, 3])


def pauli_coherence(xx: float, yy: float, xy: float, yx: float) -> complex:
    """Same coherence from Pauli correlators: ((xx - yy) - i (xy + yx)) / 4."""
    for name, val in (("xx", xx), ("yy", yy), ("xy", xy), ("yx", yx)):
        if abs(val) > 1.0 + 1e-12:
            raise ValueError(f"correlator {name}={val} is outside [-1, 1]")
    return complex((xx - yy) / 4.0, -(xy + yx) / 4.0)


def product_null_verdict(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Full two-qubit pipeline: contact search, normal form, coherence test.

    With a contact, both steering directions follow from the same coherence
    entry; without one the state may still be steerable through other means,
    so the flags stay undetermined unless the support-kernel route fires.
    """
    if rho.dims != (2, 2):
        raise ValueError("product_null_verdict expects a two-qubit state")
    is_ppt, min_eig = ppt_check(rho, tol)
    npt = not is_ppt
    contact = find_boundary_contact(rho, tol)
    if contact is not None:
        rho_std, _, _ = normal_form(rho, contact, tol)
        coherence = tangential_coherence(rho_std)
        steer = YES if abs(coherence) > tol.eps_zero else NO
        return Verdict(
            npt=npt,
            min_pt_eigenvalue=min_eig,
            steerable_a_to_b=steer,
            steerable_b_to_a=steer,
            mechanism=MECH_PRODUCT_NULL,
            coherence=coherence,
            contact=contact,
        )
    # no kernel contact; a rank-deficient conditional block could still fire
    basis = np.eye(2, dtype=np.complex128)
    for a0, a1 in ((basis[:, 0], basis[:, 1]), (basis[:, 1], basis[:, 0])):
        result = support_kernel_criterion(rho, a0, a1, tol)
        if result.fires:
            return Verdict(
                npt=npt,
                min_pt_eigenvalue=min_eig,
                steerable_a_to_b=YES,
                steerable_b_to_a=UNDETERMINED,
                mechanism=MECH_SUPPORT_KERNEL,
                coherence=result.block.v,
                contact=None,
            )
    return Verdict(
        npt=npt,
        min_pt_eigenvalue=min_eig,
        steerable_a_to_b=UNDETERMINED,
        steerable_b_to_a=UNDETERMINED,
        mechanism=MECH_NONE,
        coherence=0j,
        contact=None,
    )


def _untrusted_block(rho: DensityMatrix, a0: np.ndarray, a1: np.ndarray, op: str) -> np.ndarray:
    dx, dy = rho.dims
    r = rho.mat.reshape(dx, dy, dx, dy)
    left = a0 if op[0] == "0" else a1
    right = a0 if op[1] == "0" else a1
    return np.einsum("a,abcd,c->bd", left.conj(), r, right)


def support_kernel_criterion(
    rho: DensityMatrix,
    alpha0: np.ndarray,
    alpha1: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> SupportKernelResult:
    """Support-kernel coherence test on the block selected by (alpha0, alpha1).

    Fires when A is nonzero, rank deficient, and P_supp B P_ker is nonzero
    beyond eps_zero * tr(rho) in spectral norm. Firing certifies both a
    negative partial-transpose minor -|v|^2 and steering from the untrusted
    to the trusted side; (phi, beta) is chosen as the leading singular pair
    of the coupling, which maximizes |v|.
    """
    dx, dy = rho.dims
    alpha0 = np.asarray(alpha0, dtype=np.complex128).reshape(-1)
    alpha1 = np.asarray(alpha1, dtype=np.complex128).reshape(-1)
    if alpha0.shape != (dx,) or alpha1.shape != (dx,):
        raise ValueError("alpha vectors must live on the untrusted side")
    for name, vec in (("alpha0", alpha0), ("alpha1", alpha1)):
        if abs(math.sqrt(float(abs2(vec).sum())) - 1.0) > tol.eps_zero:
            raise ValueError(f"{name} is not a unit vector")
    if abs(np.vdot(alpha0, alpha1)) > tol.eps_zero:
        raise ValueError("alpha0 and alpha1 must be orthogonal")

    a = _untrusted_block(rho, alpha0, alpha1, "00")
    a = 0.5 * (a + dagger(a))
    b = _untrusted_block(rho, alpha0, alpha1, "01")
    d = _untrusted_block(rho, alpha0, alpha1, "11")
    d = 0.5 * (d + dagger(d))

    trace_rho = float(rho.mat.trace().real)
    if float(a.trace().real) <= tol.eps_zero * trace_rho:
        block = BlockDecomposition(
            a=a, b=b, d=d, alpha0=alpha0, alpha1=alpha1,
            p_supp=np.zeros((dy, dy), dtype=np.complex128),
            p_ker=np.eye(dy, dtype=np.complex128),
            rank_a=0, coupling=np.zeros((dy, dy), dtype=np.complex128),
            phi=None, beta=None, v=0j,
        )
        return SupportKernelResult(fires=False, block=block, npt_minor=0.0)

    p_supp, p_ker, rank_a = support_kernel_projectors(a, tol)
    coupling = p_supp @ b @ p_ker
    phi = beta = None
    v = 0j
    fires = False
    if rank_a < dy:
        u_svd, s_svd, vh_svd = np.linalg.svd(coupling)
        if s_svd[0] > tol.eps_zero * trace_rho:
            phi = np.ascontiguousarray(u_svd[:, 0])
            beta = np.ascontiguousarray(vh_svd[0, :].conj())
            v = complex(np.vdot(phi, b @ beta))
            fires = True
    block = BlockDecomposition(
        a=a, b=b, d=d, alpha0=alpha0, alpha1=alpha1,
        p_supp=p_supp, p_ker=p_ker, rank_a=rank_a, coupling=coupling,
        phi=phi, beta=beta, v=v,
    )
    return SupportKernelResult(fires=fires, block=block, npt_minor=-float(abs2(v)) if fires else 0.0)


def pure_contact_decomposition(
    block: BlockDecomposition, tol: Tolerances = DEFAULT_TOL
) -> PureContactDecomposition | str:
    """Separable two-term decomposition of a pure-contact block, or "coupled".

    Needs rank-one A = a |phi><phi|. With zero support-kernel coupling,
    B = kappa |phi><phi| and the Schur complement D - (|kappa|^2/a)|phi><phi|
    is PSD, giving block = |eta><eta| (x) |phi><phi| + |alpha1><alpha1| (x) Schur
    with eta = sqrt(a)|alpha0> + (conj(kappa)/sqrt(a))|alpha1>.
    """
    if block.rank_a != 1:
        raise ValueError(f"pure-contact decomposition needs rank-one A, got rank {block.rank_a}")
    a_val = float(block.a.trace().real)
    scale = a_val + float(block.d.trace().real)
    spectral = np.linalg.svd(block.coupling, compute_uv=False)
    if spectral.size and spectral[0] > tol.eps_zero * scale:
        return "coupled"
    spec = hermitian_eigh(block.a)
    phi = np.ascontiguousarray(spec.eigenvectors[:, 0])
    kappa = complex(np.vdot(phi, block.b @ phi))
    schur = block.d - (abs2(kappa) / a_val) * np.outer(phi, phi.conj())
    schur = 0.5 * (schur + dagger(schur))
    min_eig = float(hermitian_eigh(schur).eigenvalues[-1])
    if min_eig < -tol.eps_psd * max(scale, 1e-300):
        raise ValueError(f"Schur complement is not PSD (min eigenvalue {min_eig})")
    eta = math.sqrt(a_val) * block.alpha0 + (np.conj(kappa) / math.sqrt(a_val)) * block.alpha1
    return PureContactDecomposition(a=a_val, kappa=kappa, phi=phi, eta=eta, schur_term=schur)


def reconstruct_block(block: BlockDecomposition) -> np.ndarray:
    """The block as a 2dY x 2dY matrix in the (alpha0, alpha1) frame."""
    return np.block([[block.a, block.b], [dagger(block.b), block.d]])


def reconstruct_decomposition(
    dec: PureContactDecomposition, block: BlockDecomposition
) -> np.ndarray:
    """Assemble the two product terms in the same (alpha0, alpha1) frame."""
    e_eta = np.array([math.sqrt(dec.a), np.conj(dec.kappa) / math.sqrt(dec.a)], dtype=np.complex128)
    e1 = np.array([0.0, 1.0], dtype=np.complex128)
    phi_proj = np.outer(dec.phi, dec.phi.conj())
    return np.kron(np.outer(e_eta, e_eta.conj()), phi_proj) + np.kron(
        np.outer(e1, e1.conj()), dec.schur_term
    )
