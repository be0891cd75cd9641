"""Dense complex linear algebra for small bipartite density matrices.

All matrices are numpy complex128 arrays in row-major order. Bipartite
states live on a declared dX x dY cut: X is the untrusted (measuring)
side, Y the trusted (steered) side, and the flat basis index is
``x * dY + y`` so the trusted index runs fastest.

The Hermitian eigensolver is a cyclic complex Jacobi sweep rather than a
LAPACK call so that identical inputs give bit-identical spectra on every
platform; dimensions here never exceed 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "DensityMatrix",
    "HermitianSpectrum",
    "abs2",
    "dagger",
    "fro_norm",
    "hermitian_eigh",
    "partial_transpose",
    "conditional_state",
    "unitary_completion",
    "psd_cholesky3",
    "support_kernel_projectors",
]


def abs2(z):
    """|z|^2 without the square root, elementwise."""
    z = np.asarray(z)
    return z.real**2 + z.imag**2


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def fro_norm(m: np.ndarray) -> float:
    """Frobenius norm."""
    return math.sqrt(float(abs2(np.asarray(m)).sum()))


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared across the library.

    eps_zero: scalars and eigenvalues below eps_zero * trace count as zero.
    eps_psd:  admissible negative-eigenvalue magnitude for PSD acceptance.
    eps_eq:   Frobenius threshold for matrix-equality checks.
    """

    eps_zero: float = 1e-9
    eps_psd: float = 1e-10
    eps_eq: float = 1e-10

    def __post_init__(self):
        for name in ("eps_zero", "eps_psd", "eps_eq"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-3:
                raise ValueError(f"{name} must lie in (0, 1e-3), got {value}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one PSD matrix on a declared (untrusted, trusted) tensor cut."""

    mat: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        mat = np.ascontiguousarray(self.mat, dtype=np.complex128)
        dims = (int(self.dims[0]), int(self.dims[1]))
        if dims[0] < 1 or dims[1] < 1:
            raise ValueError(f"bad cut dimensions {dims}")
        n = dims[0] * dims[1]
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match cut {dims}")
        if not np.isfinite(mat.view(np.float64)).all():
            raise ValueError("matrix has non-finite entries")
        scale = fro_norm(mat) + 1.0
        if fro_norm(mat - dagger(mat)) > 1e-8 * scale:
            raise ValueError("matrix is not Hermitian")
        if abs(float(mat.trace().real) - 1.0) > 1e-6:
            raise ValueError(f"trace {mat.trace().real} is not 1")
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim_untrusted(self) -> int:
        return self.dims[0]

    @property
    def dim_trusted(self) -> int:
        return self.dims[1]


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues sorted descending with matching orthonormal column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """2x2 unitary R with R^+ [[app, apq], [conj(apq), aqq]] R diagonal."""
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2.0 * r, app - aqq)
    c = math.cos(theta)
    s = math.sin(theta)
    # D = diag(phase, 1) strips the phase, G is the real Jacobi rotation.
    return np.array([[phase * c, -phase * s], [s, c]], dtype=np.complex128)


def hermitian_eigh(mat: np.ndarray, *, max_sweeps: int = 100) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Deterministic for identical input. Reconstruction satisfies
    ||M - V diag(w) V^+||_F <= 1e-10 ||M||_F for the sizes used here.
    """
    a = np.array(mat, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("hermitian_eigh needs a square matrix")
    v = np.eye(n, dtype=np.complex128)
    scale = fro_norm(a)
    if scale == 0.0 or n == 1:
        return HermitianSpectrum(np.real(np.diag(a)).copy(), v)

    for _ in range(max_sweeps):
        # sum off-diagonal weight directly; total-minus-diagonal cancels badly
        od = abs2(a)
        od[np.diag_indices(n)] = 0.0
        off = math.sqrt(float(od.sum()))
        if off <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-18 * scale:
                    continue
                rot = _jacobi_rotation(a[p, p].real, a[q, q].real, a[p, q])
                cols = a[:, [p, q]] @ rot
                a[:, p] = cols[:, 0]
                a[:, q] = cols[:, 1]
                rows = dagger(rot) @ a[[p, q], :]
                a[p, :] = rows[0]
                a[q, :] = rows[1]
                # restore exact Hermitian structure of the rotated pair
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcols = v[:, [p, q]] @ rot
                v[:, p] = vcols[:, 0]
                v[:, q] = vcols[:, 1]
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")

    vals = np.real(np.diag(a)).copy()
    order = np.argsort(-vals, kind="stable")
    return HermitianSpectrum(vals[order], v[:, order])


def min_eigenvalue(mat: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(hermitian_eigh(mat).eigenvalues[-1])


def partial_transpose(rho: DensityMatrix, side: str = "Y") -> np.ndarray:
    """Partial transpose on the chosen factor ("Y" = trusted, "X" = untrusted).

    Transposing the trusted side realizes the usual Gamma_B map for a
    2x2 cut: out[(x,y),(x',y')] = rho[(x,y'),(x',y)].
    """
    dx, dy = rho.dims
    r = rho.mat.reshape(dx, dy, dx, dy)
    if side == "Y":
        rt = r.transpose(0, 3, 2, 1)
    elif side == "X":
        rt = r.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"side must be 'X' or 'Y', got {side!r}")
    return np.ascontiguousarray(rt.reshape(dx * dy, dx * dy))


def conditional_state(
    rho: DensityMatrix, xi: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Unnormalized trusted-side state <xi| rho |xi> for a unit vector xi on X.

    PSD within eps_psd and trace in [0, 1] for any valid state.
    """
    dx, dy = rho.dims
    xi = np.asarray(xi, dtype=np.complex128).reshape(-1)
    if xi.shape != (dx,):
        raise ValueError(f"xi has length {xi.shape[0]}, untrusted side has dim {dx}")
    norm = math.sqrt(float(abs2(xi).sum()))
    if abs(norm - 1.0) > tol.eps_zero:
        raise ValueError(f"xi is not a unit vector (norm {norm})")
    r = rho.mat.reshape(dx, dy, dx, dy)
    sigma = np.einsum("a,abcd,c->bd", xi.conj(), r, xi)
    return 0.5 * (sigma + dagger(sigma))


def unitary_completion(v: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Deterministic unitary U with U e_0 = v, built from one Householder reflector.

    The reflector is applied to the phase-stripped vector so the pivot stays
    real nonnegative; identical inputs give byte-identical output.
    """
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    n = v.shape[0]
    norm = math.sqrt(float(abs2(v).sum()))
    if norm <= tol.eps_zero:
        raise ValueError("cannot complete the zero vector")
    if abs(norm - 1.0) > tol.eps_zero:
        raise ValueError(f"v is not a unit vector (norm {norm})")
    v = v / norm
    c = v[0] / abs(v[0]) if abs(v[0]) > 0.0 else 1.0 + 0.0j
    x = np.conj(c) * v  # x[0] real >= 0
    w = x.copy()
    w[0] -= 1.0
    wnorm2 = float(abs2(w).sum())
    if wnorm2 <= 1e-30:
        u = np.eye(n, dtype=np.complex128)
    else:
        u = np.eye(n, dtype=np.complex128) - (2.0 / wnorm2) * np.outer(w, w.conj())
    return c * u


def psd_cholesky3(
    h: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Lower-triangular L with H = L L^+ for a 3x3 Hermitian PSD matrix.

    Rank-deficient input is allowed: a pivot that vanishes within tolerance
    produces a zero diagonal entry and a zero column below it.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {h.shape}")
    if fro_norm(h - dagger(h)) > 1e-10 * (fro_norm(h) + 1.0):
        raise ValueError("matrix is not Hermitian")
    trace = float(h.trace().real)
    scale = max(trace, 0.0) + 1e-300
    el = np.zeros((3, 3), dtype=np.complex128)
    for j in range(3):
        d = h[j, j].real - float(abs2(el[j, :j]).sum())
        if d < -tol.eps_psd * scale:
            raise ValueError(f"matrix is indefinite (pivot {d} at {j})")
        d = max(d, 0.0)
        el[j, j] = math.sqrt(d)
        for i in range(j + 1, 3):
            s = h[i, j] - np.dot(el[i, :j], el[j, :j].conj())
            if el[j, j].real > tol.eps_zero * math.sqrt(scale):
                el[i, j] = s / el[j, j].real
            else:
                el[i, j] = 0.0
    residual = fro_norm(el @ dagger(el) - h)
    if residual > tol.eps_eq * scale:
        raise ValueError(f"matrix is indefinite (residual {residual})")
    return el


def support_kernel_projectors(
    a: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray, int]:
    """Support and kernel projectors of a Hermitian PSD matrix, plus its rank.

    Eigenvalues above eps_zero * trace count as support. Raises on A = 0,
    where the support is empty and a boundary contact is meaningless.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    trace = float(a.trace().real)
    spec = hermitian_eigh(a)
    if spec.eigenvalues[-1] < -tol.eps_psd * max(trace, 1e-300):
        raise ValueError(f"matrix is not PSD (min eigenvalue {spec.eigenvalues[-1]})")
    if trace <= tol.eps_zero:
        raise ValueError("matrix is zero; no support to project onto")
    mask = spec.eigenvalues > tol.eps_zero * trace
    rank = int(mask.sum())
    vs = spec.eigenvectors[:, mask]
    p_supp = vs @ dagger(vs)
    p_supp = 0.5 * (p_supp + dagger(p_supp))
    p_ker = np.eye(n, dtype=np.complex128) - p_supp
    return p_supp, p_ker, rank
