"""Boundary contacts: product vectors in kernels and their normal forms.

A product vector alpha (x) beta annihilated by rho pins a trusted
conditional state to the boundary of its state space. This module finds
such vectors, rotates them into the standard position |01>, and builds
the trusted-side filter that exposes the standard coherence entry.
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
    unitary_completion,
)

__all__ = [
    "ProductNullDatum",
    "FilteredClassWitness",
    "kernel_basis",
    "product_vector_in_span",
    "find_boundary_contact",
    "normal_form",
    "recognize_filtered_class",
]

_SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


@dataclass(frozen=True)
class ProductNullDatum:
    """Unit local vectors with rho(alpha (x) beta) = 0 up to the stored residual."""

    alpha: np.ndarray
    beta: np.ndarray
    residual: float


@dataclass(frozen=True)
class FilteredClassWitness:
    """Filter data certifying membership in the filtered standard class.

    eta is the trusted-side image of beta under the off-diagonal untrusted
    block; g is the invertible filter with g^+|1> = beta, g^+|0> = eta; omega
    is the filtered state and coherence its <00|.|11> entry, a positive real.
    """

    eta: np.ndarray
    g: np.ndarray
    omega: DensityMatrix
    coherence: complex


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    idx = int(np.argmax(abs2(v)))
    pivot = v[idx]
    if abs(pivot) == 0.0:
        return v
    return v * (np.conj(pivot) / abs(pivot))


def kernel_basis(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical kernel (eigenvalues <= eps_zero * trace)."""
    spec = hermitian_eigh(rho.mat)
    cut = tol.eps_zero * float(rho.mat.trace().real)
    return [
        np.ascontiguousarray(spec.eigenvectors[:, k])
        for k in range(len(spec.eigenvalues))
        if spec.eigenvalues[k] <= cut
    ]


def _coefficient_matrix(psi: np.ndarray) -> np.ndarray:
    """2x2 coefficient matrix A with psi = sum A[a,b] |a>|b>."""
    return np.asarray(psi, dtype=np.complex128).reshape(2, 2)


def _factor_product(psi: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray] | None:
    """Split a (near-)rank-one coefficient matrix into unit alpha, beta."""
    a = _coefficient_matrix(psi)
    row = int(np.argmax(abs2(a).sum(axis=1)))
    beta = a[row].copy()
    bnorm = math.sqrt(float(abs2(beta).sum()))
    if bnorm == 0.0:
        return None
    beta /= bnorm
    alpha = a @ beta.conj()
    anorm = math.sqrt(float(abs2(alpha).sum()))
    if anorm == 0.0:
        return None
    alpha /= anorm
    alpha = _canonical_phase(alpha)
    beta = _canonical_phase(beta)
    # verify the factorization reproduces psi up to scale
    scale = np.vdot(np.kron(alpha, beta), psi)
    err = fro_norm(np.asarray(psi) - scale * np.kron(alpha, beta))
    if err > 1e-7 * (fro_norm(psi) + 1.0):
        return None
    return alpha, beta


def product_vector_in_span(
    psi1: np.ndarray, psi2: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> tuple[complex, complex, np.ndarray, np.ndarray] | None:
    """Product vector x psi1 + y psi2 in a two-dimensional two-qubit subspace.

    det(x A1 + y A2) is a homogeneous quadratic in (x, y); a root always
    exists over C. Solved in the chart z = y/x, with a vanishing leading
    coefficient meaning psi2 itself is product (root at infinity). Among the
    roots the one with smaller |y/x| wins, ties broken by lexicographic
    (Re, Im) order, so the output is reproducible.
    """
    psi1 = np.asarray(psi1, dtype=np.complex128).reshape(-1)
    psi2 = np.asarray(psi2, dtype=np.complex128).reshape(-1)
    if psi1.shape != (4,) or psi2.shape != (4,):
        raise ValueError("pencil inputs must be two-qubit vectors")
    n1, n2 = fro_norm(psi1), fro_norm(psi2)
    if n1 <= tol.eps_zero or n2 <= tol.eps_zero:
        raise ValueError("pencil inputs must be nonzero")
    gram = abs(np.vdot(psi1, psi2)) / (n1 * n2)
    if gram > 1.0 - 1e-12:
        raise ValueError("pencil inputs are linearly dependent")
    a1 = _coefficient_matrix(psi1 / n1)
    a2 = _coefficient_matrix(psi2 / n2)
    # det(x A1 + y A2) = p2 x^2 + p1 x y + p0 y^2
    p2 = a1[0, 0] * a1[1, 1] - a1[0, 1] * a1[1, 0]
    p0 = a2[0, 0] * a2[1, 1] - a2[0, 1] * a2[1, 0]
    p1 = (
        a1[0, 0] * a2[1, 1]
        + a2[0, 0] * a1[1, 1]
        - a1[0, 1] * a2[1, 0]
        - a2[0, 1] * a1[1, 0]
    )
    eps = 1e-13
    if abs(p0) <= eps:
        if abs(p1) <= eps:
            # q = p2 x^2: either identically zero (return psi1 by convention)
            # or the double root sits at infinity, i.e. psi2 itself
            roots = [0j] if abs(p2) <= eps else []
            if not roots:
                x, y = 0.0 + 0j, 1.0 + 0j
                factors = _factor_product(psi2 / n2, tol)
                if factors is None:
                    return None
                return x, y, factors[0], factors[1]
        else:
            roots = [-p2 / p1]
    else:
        disc = np.sqrt(p1 * p1 - 4.0 * p0 * p2 + 0j)
        roots = [(-p1 + disc) / (2.0 * p0), (-p1 - disc) / (2.0 * p0)]
    if not roots:
        roots = [0j]
    roots.sort(key=lambda z: (abs(z), z.real, z.imag))
    z = roots[0]
    x, y = 1.0 + 0j, z
    psi = x * (psi1 / n1) + y * (psi2 / n2)
    factors = _factor_product(psi, tol)
    if factors is None:
        return None
    return x, y, factors[0], factors[1]


def find_boundary_contact(
    rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL
) -> ProductNullDatum | None:
    """Product vector in Ker(rho) for a two-qubit state, if one exists.

    A one-dimensional kernel is tested directly; a two-dimensional kernel
    always contains a product vector, found through the determinant pencil.
    Larger kernels are searched pairwise in a fixed order.
    """
    if rho.dims != (2, 2):
        raise ValueError("boundary contacts are searched on two-qubit states only")
    kernel = kernel_basis(rho, tol)
    if not kernel:
        return None

    def _datum(alpha: np.ndarray, beta: np.ndarray) -> ProductNullDatum | None:
        residual = fro_norm(rho.mat @ np.kron(alpha, beta))
        if residual > tol.eps_zero * float(rho.mat.trace().real):
            return None
        return ProductNullDatum(alpha, beta, residual)

    if len(kernel) == 1:
        a = _coefficient_matrix(kernel[0])
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det) > tol.eps_zero:
            return None
        factors = _factor_product(kernel[0], tol)
        if factors is None:
            return None
        return _datum(*factors)

    pairs = [(i, j) for i in range(len(kernel)) for j in range(i + 1, len(kernel))]
    for i, j in pairs:
        found = product_vector_in_span(kernel[i], kernel[j], tol)
        if found is None:
            continue
        datum = _datum(found[2], found[3])
        if datum is not None:
            return datum
    return None


def normal_form(
    rho: DensityMatrix, datum: ProductNullDatum, tol: Tolerances = DEFAULT_TOL
) -> tuple[DensityMatrix, np.ndarray, np.ndarray]:
    """Rotate the contact into standard position: returns (rho_std, U_A, U_B).

    rho_std = (U_A (x) U_B)^+ rho (U_A (x) U_B) with U_A|0> = alpha and
    U_B|1> = beta, so rho_std |01> = 0 within tolerance.
    """
    if datum.residual > tol.eps_zero * float(rho.mat.trace().real):
        raise ValueError(f"contact residual {datum.residual} is too large")
    u_a = unitary_completion(datum.alpha, tol)
    u_b = unitary_completion(datum.beta, tol) @ _SWAP2
    big = np.kron(u_a, u_b)
    rho_std = dagger(big) @ rho.mat @ big
    return DensityMatrix(rho_std, (2, 2)), u_a, u_b


def recognize_filtered_class(
    rho: DensityMatrix, datum: ProductNullDatum, tol: Tolerances = DEFAULT_TOL
) -> FilteredClassWitness | None:
    """Filtered-standard-class test at a given contact.

    Computes eta = M beta for the untrusted off-diagonal block
    M = (<alpha| (x) I) rho (|alpha_perp> (x) I). When eta is nonzero it is
    orthogonal to beta, [eta, beta] define an invertible filter g, and the
    filtered state omega has omega|01> = 0 with a real positive coherence
    ||eta||^2 / tr[(I (x) g) rho (I (x) g^+)]. A vanishing eta means this
    boundary route fails; that is not a separability claim.
    """
    if rho.dims != (2, 2):
        raise ValueError("the filtered standard class is a two-qubit notion")
    u_a = unitary_completion(datum.alpha, tol)
    alpha_perp = np.ascontiguousarray(u_a[:, 1])
    r = rho.mat.reshape(2, 2, 2, 2)
    m = np.einsum("a,abcd,c->bd", datum.alpha.conj(), r, alpha_perp)
    eta = m @ datum.beta
    if math.sqrt(float(abs2(eta).sum())) <= tol.eps_zero:
        return None
    g = dagger(np.column_stack([eta, datum.beta]))
    big = np.kron(dagger(u_a), g)
    raw = big @ rho.mat @ dagger(big)
    norm = float(raw.trace().real)
    omega = DensityMatrix(raw / norm, (2, 2))
    coherence = complex(float(abs2(eta).sum()) / norm)
    return FilteredClassWitness(eta=eta, g=g, omega=omega, coherence=coherence)
