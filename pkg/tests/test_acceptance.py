"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`. Every expected value is
either computed by an independent oracle inside this file or substituted
from the closed forms the generators expose; nothing is tuned after the
fact. Criterion 9 rebuilds the artifacts of criteria 1-8 twice with the
same seeds and compares bytes.
"""

import hashlib
import json
import math
import time

import numpy as np
import pytest

from conftest import make_rng, random_psd, random_pure, sample_cholesky
from steercert.certify import (
    YES,
    boundary_minor,
    ppt_check,
    product_null_verdict,
    pure_contact_decomposition,
    reconstruct_block,
    reconstruct_decomposition,
    support_kernel_criterion,
    tangential_coherence,
    w_bd,
)
from steercert.families import CholeskyParams, bell_mix, cholesky_branch, werner
from steercert.io import canonical_json
from steercert.lhs import assemblage_from_state, build_grid, cap_mass, lhs_lp
from steercert.linalg import (
    DensityMatrix,
    conditional_state,
    hermitian_eigh,
    partial_transpose,
)
from steercert.nullspace import find_boundary_contact
from steercert.scaling import default_t_grid, recommended_cap_constant, scaling_fit, sigma_family

E0 = np.array([1, 0], dtype=complex)
E1 = np.array([0, 1], dtype=complex)
TETRA = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3)


def closed_form_sigma(params: CholeskyParams, t: float) -> np.ndarray:
    hp = params.h_entries()
    tr_h = hp.h00 + hp.h11 + hp.h22
    denom = tr_h * (1 + t * t)
    return np.array(
        [
            [(hp.h00 + 2 * t * np.real(hp.h01) + t * t * hp.h11) / denom,
             (t * hp.h02 + t * t * hp.h12) / denom],
            [(np.conj(t * hp.h02 + t * t * hp.h12)) / denom, t * t * hp.h22 / denom],
        ],
        dtype=complex,
    )


def t_kets(ts):
    return [np.array([1, t], dtype=complex) / math.sqrt(1 + t * t) for t in ts]


def _passed(n: int, detail: str) -> None:
    print(f"PASS criterion {n}: {detail}", flush=True)


# ---------------------------------------------------------------- criterion 1

def run_criterion_1():
    rng = make_rng(1001)
    grid = default_t_grid(1e-4, 1e-2, 20)
    digest = hashlib.sha256()
    worst = 0.0
    for _ in range(200):
        params = sample_cholesky(rng)
        rho, _ = cholesky_branch(params)
        fam = sigma_family(rho, E0, E1, grid)
        for k, t in enumerate(grid):
            err = np.abs(fam.sigmas[k] - closed_form_sigma(params, t)).max()
            worst = max(worst, float(err))
        digest.update(fam.sigmas.tobytes())
    return worst, digest.hexdigest()


def test_criterion_1_closed_form_sigma():
    start = time.monotonic()
    worst, _ = run_criterion_1()
    elapsed = time.monotonic() - start
    assert worst <= 1e-12, worst
    assert elapsed < 5.0, elapsed
    _passed(1, f"200 states x 20 t-values match the closed form, max err {worst:.2e} ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 2

def run_criterion_2():
    grid = default_t_grid(1e-4, 1e-2, 20)
    rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
    report = scaling_fit(sigma_family(rho, E0, E1, grid))
    sibling, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 1, 0))
    sibling_report = scaling_fit(sigma_family(sibling, E0, E1, grid))
    return report, sibling_report


def test_criterion_2_scaling_exponents():
    start = time.monotonic()
    report, sibling_report = run_criterion_2()
    elapsed = time.monotonic() - start
    assert abs(report.slope_b - 1.0) <= 1e-3, report.slope_b
    assert abs(report.slope_d - 2.0) <= 1e-3, report.slope_d
    assert report.passes
    assert not sibling_report.passes
    assert elapsed < 1.0, elapsed
    _passed(2, f"slope_b {report.slope_b:.6f}, slope_d {report.slope_d:.6f}; "
               f"h02=0 sibling passes={sibling_report.passes} ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 3

def run_criterion_3():
    rng = make_rng(1003)
    rows = []
    for i in range(1000):
        params = sample_cholesky(rng, zero_z=i % 5 == 0)
        rho, _ = cholesky_branch(params)
        verdict = product_null_verdict(rho)
        z_live = abs(params.z) > 1e-9
        npt = verdict.min_pt_eigenvalue < -1e-10
        tps = verdict.steerable_a_to_b == YES and verdict.steerable_b_to_a == YES
        rows.append((i, z_live, npt, tps))
    return rows


def test_criterion_3_branch_equivalence():
    start = time.monotonic()
    rows = run_criterion_3()
    elapsed = time.monotonic() - start
    exceptions = [r for r in rows if not (r[1] == r[2] == r[3])]
    assert exceptions == [], exceptions[:5]
    both = sum(1 for r in rows if r[1])
    assert elapsed < 10.0, elapsed
    _passed(3, f"1000 samples, zero exceptions ({both} entangled, {1000 - both} separable) ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 4

def run_criterion_4():
    rho = bell_mix(0.5, 0.3, 0.2)
    return tangential_coherence(rho), w_bd(rho), boundary_minor(rho)


def test_criterion_4_bell_mixture_numbers():
    start = time.monotonic()
    c_tan, witness, minor = run_criterion_4()
    elapsed = time.monotonic() - start
    # expected values are the float images of the closed forms at p, q, r
    assert c_tan == (0.5 - 0.3) / 2 == 0.1
    assert witness == 0.1 * 0.1
    assert minor == -(0.1 * 0.1)
    assert abs(witness - 0.01) < 1e-17 and abs(minor + 0.01) < 1e-17
    assert elapsed < 0.1, elapsed
    _passed(4, f"C_tan={c_tan}, W_bd={witness}, minor={minor} ({elapsed*1000:.1f}ms)")


# ---------------------------------------------------------------- criterion 5

def run_criterion_5():
    rng = make_rng(1005)
    rows = []
    for i in range(500):
        if i % 4 == 0:
            # separable rank-two: mixture of two product pure states
            psi1 = np.kron(random_pure(rng, 2), random_pure(rng, 2))
            psi2 = np.kron(random_pure(rng, 2), random_pure(rng, 2))
        else:
            psi1, psi2 = random_pure(rng, 4), random_pure(rng, 4)
        w = rng.uniform(0.05, 0.95)
        mat = w * np.outer(psi1, psi1.conj()) + (1 - w) * np.outer(psi2, psi2.conj())
        rho = DensityMatrix(mat, (2, 2))
        verdict = product_null_verdict(rho)
        contact_found = verdict.contact is not None
        tps = verdict.steerable_a_to_b == YES and verdict.steerable_b_to_a == YES
        # independent NPT oracle: LAPACK eigensolve of the reference transpose
        ref_pt = rho.mat.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        oracle_npt = bool(np.linalg.eigvalsh(ref_pt)[0] < -1e-10)
        rows.append((i, verdict.npt, contact_found, tps, oracle_npt))
    return rows


def test_criterion_5_rank_two_theorem():
    start = time.monotonic()
    rows = run_criterion_5()
    elapsed = time.monotonic() - start
    for i, npt, contact_found, tps, oracle_npt in rows:
        assert npt == oracle_npt, (i, npt, oracle_npt)
        if oracle_npt:
            assert contact_found and tps, (i, npt, contact_found, tps)
        else:
            assert not npt, i
    n_npt = sum(1 for r in rows if r[1])
    assert n_npt > 0 and n_npt < 500  # both branches exercised
    assert elapsed < 20.0, elapsed
    _passed(5, f"500 rank-two states: {n_npt} NPT all TPS, {500 - n_npt} PPT none flagged ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 6

def _coupled_block_state(rng, dy: int, coupled: bool) -> DensityMatrix:
    phi = random_pure(rng, dy)
    a_val = rng.uniform(0.3, 1.0)
    kappa = (rng.normal() + 1j * rng.normal()) * 0.3
    s = random_psd(rng, dy)
    s = 0.4 * s / s.trace().real
    pp = np.outer(phi, phi.conj())
    a = a_val * pp
    b = kappa * pp
    d = s + (abs(kappa) ** 2 / a_val) * pp
    mat = np.zeros((2 * dy, 2 * dy), dtype=complex)
    mat[:dy, :dy] = a
    mat[:dy, dy:] = b
    mat[dy:, :dy] = b.conj().T
    mat[dy:, dy:] = d
    if coupled:
        beta = random_pure(rng, dy)
        beta = beta - phi * np.vdot(phi, beta)
        beta = beta / np.linalg.norm(beta)
        chi = np.zeros(2 * dy, dtype=complex)
        chi[:dy] = phi
        chi[dy:] = rng.uniform(0.3, 0.8) * beta
        mat = mat + rng.uniform(0.2, 0.6) * np.outer(chi, chi.conj())
    return DensityMatrix(mat / mat.trace().real, (2, dy))


def _embedded_standard(rng, dy: int, entangled: bool) -> DensityMatrix:
    params = sample_cholesky(rng, zero_z=not entangled)
    rho, _ = cholesky_branch(params)
    big = np.zeros((2 * dy, 2 * dy), dtype=complex)
    idx = [0, 1, dy, dy + 1]
    big[np.ix_(idx, idx)] = rho.mat
    return DensityMatrix(big, (2, dy))


def run_criterion_6():
    rng = make_rng(1006)
    rows = []
    for dy in (3, 4):
        for i in range(50):
            coupled = i % 2 == 0
            if i % 5 == 4:
                rho = _embedded_standard(rng, dy, entangled=coupled)
            else:
                rho = _coupled_block_state(rng, dy, coupled)
            result = support_kernel_criterion(rho, E0, E1)
            min_eig = float(hermitian_eigh(partial_transpose(rho)).eigenvalues[-1])
            rows.append((dy, i, result.fires, min_eig))
    return rows


def test_criterion_6_support_kernel_criterion():
    start = time.monotonic()
    rows = run_criterion_6()
    elapsed = time.monotonic() - start
    for dy, i, fires, min_eig in rows:
        assert fires == (min_eig < -1e-10), (dy, i, fires, min_eig)
    fired = sum(1 for r in rows if r[2])
    assert fired == 50  # half of each suite is coupled by construction
    assert elapsed < 10.0, elapsed
    _passed(6, f"2x3 and 2x4 suites (100 cases): fires <=> NPT, {fired} fired ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 7

def run_criterion_7():
    rng = make_rng(1007)
    worst_rec = 0.0
    worst_schur = 0.0
    for i in range(100):
        dy = (2, 3, 4)[i % 3]
        rho = _coupled_block_state(rng, dy, coupled=False)
        result = support_kernel_criterion(rho, E0, E1)
        dec = pure_contact_decomposition(result.block)
        assert not isinstance(dec, str), i
        rec_err = float(np.abs(reconstruct_decomposition(dec, result.block) - reconstruct_block(result.block)).max())
        schur_min = float(hermitian_eigh(dec.schur_term).eigenvalues[-1])
        worst_rec = max(worst_rec, rec_err)
        worst_schur = min(worst_schur, schur_min)
    return worst_rec, worst_schur


def test_criterion_7_pure_contact_decomposition():
    start = time.monotonic()
    worst_rec, worst_schur = run_criterion_7()
    elapsed = time.monotonic() - start
    assert worst_rec <= 1e-10, worst_rec
    assert worst_schur >= -1e-10, worst_schur
    assert elapsed < 5.0, elapsed
    _passed(7, f"100 decoupled pure-contact blocks reconstruct (max err {worst_rec:.2e}), "
               f"Schur PSD (min eig {worst_schur:.2e}) ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 8

def run_criterion_8():
    results = {}
    grid200 = build_grid(200)
    for tag, params in (("h12", CholeskyParams(1, 1, 1, 0, 1, 0)),
                        ("diag", CholeskyParams(1, 1, 1))):
        rho, _ = cholesky_branch(params)
        sol = lhs_lp(assemblage_from_state(rho, TETRA), grid200)
        results[f"separable_{tag}"] = {"residual": sol.residual, "feasible": sol.feasible}

    grid500 = build_grid(500)
    sol_w = lhs_lp(assemblage_from_state(werner(0.45), build_grid(6).points), grid500)
    results["werner"] = {"residual": sol_w.residual, "feasible": sol_w.feasible}

    ts = [0.2, 0.1, 0.05, 0.02]
    rho_s, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
    asm = assemblage_from_state(rho_s, t_kets(ts))
    report = scaling_fit(sigma_family(rho_s, E0, E1, default_t_grid()))
    k_const = recommended_cap_constant(report)
    trend_lines = ["grid_size,t,residual,cap_mass"]
    steer_residuals = {}
    for size in (200, 350, 500):
        grid = build_grid(size)
        sol = lhs_lp(asm, grid)
        steer_residuals[size] = sol.residual
        for t in ts:
            trend_lines.append(
                f"{size},{t!r},{sol.residual!r},{cap_mass(sol, grid, t, k_const)!r}"
            )
    results["steerable"] = {"residuals": steer_residuals, "cap_constant": k_const}
    return results, "\n".join(trend_lines) + "\n"


def test_criterion_8_lhs_lab(tmp_path):
    start = time.monotonic()
    results, trend_csv = run_criterion_8()
    elapsed = time.monotonic() - start
    assert results["separable_h12"]["feasible"] and results["separable_h12"]["residual"] <= 1e-7
    assert results["separable_diag"]["feasible"] and results["separable_diag"]["residual"] <= 1e-7
    assert results["werner"]["feasible"] and results["werner"]["residual"] <= 1e-7
    assert results["steerable"]["residuals"][500] > 1e-4
    out = tmp_path / "cap_trend.csv"
    out.write_text(trend_csv, encoding="utf-8")
    assert out.exists() and len(trend_csv.strip().split("\n")) == 13
    assert elapsed < 300.0, elapsed
    _passed(8, f"separable+werner feasible (residuals <= {max(results['separable_h12']['residual'], results['werner']['residual']):.1e}); "
               f"steerable residual {results['steerable']['residuals'][500]:.2e} > 1e-4; trend table emitted ({elapsed:.1f}s)")


# ---------------------------------------------------------------- criterion 9

def _artifact_bundle() -> dict[str, bytes]:
    worst1, digest1 = run_criterion_1()
    report, sibling = run_criterion_2()
    bundle = {
        "c1.json": canonical_json({"max_err": worst1, "sigma_digest": digest1}).encode(),
        "c2.json": canonical_json(
            {"slope_b": report.slope_b, "slope_d": report.slope_d,
             "l_hat": report.l_hat, "c_hat": report.c_hat,
             "sibling_passes": sibling.passes}
        ).encode(),
        "c3.csv": ("\n".join(f"{i},{z},{n},{t}" for i, z, n, t in run_criterion_3()) + "\n").encode(),
        "c4.json": canonical_json(
            dict(zip(("c_tan", "w_bd", "minor"), [repr(v) for v in run_criterion_4()]))
        ).encode(),
        "c5.csv": ("\n".join(",".join(map(str, row)) for row in run_criterion_5()) + "\n").encode(),
        "c6.csv": ("\n".join(f"{d},{i},{f},{e!r}" for d, i, f, e in run_criterion_6()) + "\n").encode(),
        "c7.json": canonical_json(dict(zip(("rec", "schur"), run_criterion_7()))).encode(),
    }
    results8, trend_csv = run_criterion_8()
    bundle["c8_trend.csv"] = trend_csv.encode()
    bundle["c8.json"] = canonical_json(results8).encode()
    return bundle


def test_criterion_9_determinism():
    start = time.monotonic()
    first = _artifact_bundle()
    second = _artifact_bundle()
    elapsed = time.monotonic() - start
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"artifact {name} differs between runs"
    _passed(9, f"criteria 1-8 artifacts byte-identical across reruns ({elapsed:.1f}s)")
