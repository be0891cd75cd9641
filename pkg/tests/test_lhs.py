import math

import numpy as np
import pytest

from conftest import make_rng
from steercert.families import CholeskyParams, cholesky_branch, werner
from steercert.lhs import (
    assemblage_from_state,
    assemble_lp,
    build_grid,
    cap_mass,
    direction_to_ket,
    lhs_lp,
    refine_grid,
)
from steercert.linalg import DensityMatrix, hermitian_eigh
from steercert.scaling import sigma_family

E0 = np.array([1, 0], dtype=complex)
E1 = np.array([0, 1], dtype=complex)

TETRA = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3)


def t_kets(ts):
    return [np.array([1, t], dtype=complex) / math.sqrt(1 + t * t) for t in ts]


class TestAssemblage:
    def test_single_setting_contact_member(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
        asm = assemblage_from_state(rho, [E0])
        sigma0 = asm.members[0, 0]
        expected = np.zeros((2, 2), dtype=complex)
        expected[0, 0] = 1 / 3.25
        np.testing.assert_allclose(sigma0, expected, atol=1e-14)

    def test_members_match_sigma_family(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0.1, 0.2, 0.5))
        ts = [0.1, 0.05, 0.01]
        asm = assemblage_from_state(rho, t_kets(ts))
        fam = sigma_family(rho, E0, E1, np.array(ts[::-1]))
        for i, t in enumerate(ts):
            np.testing.assert_allclose(asm.members[i, 0], fam.sigmas[len(ts) - 1 - i], atol=1e-14)

    def test_completeness_and_no_signalling(self):
        rng = make_rng(90)
        rho = werner(0.45)
        asm = assemblage_from_state(rho, build_grid(8).points)
        reduced = asm.reduced_state()
        for x in range(asm.n_settings):
            total = asm.members[x, 0] + asm.members[x, 1]
            np.testing.assert_allclose(total, reduced, atol=1e-13)
            assert abs(np.trace(total).real - 1.0) < 1e-12
            for a in (0, 1):
                assert hermitian_eigh(asm.members[x, a]).eigenvalues[-1] >= -1e-10

    def test_bloch_direction_input(self):
        rho = werner(0.45)
        asm = assemblage_from_state(rho, [np.array([0.0, 0.0, 1.0])])
        np.testing.assert_allclose(asm.settings[0], E0, atol=1e-12)

    def test_setting_count_cap(self):
        rho = werner(0.45)
        with pytest.raises(ValueError):
            assemblage_from_state(rho, build_grid(13).points)


class TestHiddenGrid:
    def test_contact_atom_exact(self):
        grid = build_grid(6, include_contact=True)
        assert grid.points.shape == (7, 3)
        np.testing.assert_array_equal(grid.points[-1], [0.0, 0.0, 1.0])
        assert grid.contact_index == 6

    def test_unit_norm_and_determinism(self):
        g1 = build_grid(200)
        g2 = build_grid(200)
        assert np.array_equal(g1.points, g2.points)
        np.testing.assert_allclose(np.linalg.norm(g1.points, axis=1), 1.0, atol=1e-12)

    def test_max_nearest_neighbor_gap(self):
        grid = build_grid(500)
        dots = grid.points @ grid.points.T
        np.fill_diagonal(dots, -1.0)
        gap = np.degrees(np.arccos(np.clip(dots.max(axis=1), -1, 1)))
        assert gap.max() < 12.0

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            build_grid(5)

    def test_refinement_is_nested(self):
        g = build_grid(30, include_contact=True)
        r = refine_grid(g)
        assert r.points.shape[0] == 61
        np.testing.assert_array_equal(r.points[:30], g.points[:30])
        np.testing.assert_array_equal(r.points[-1], [0, 0, 1])


class TestLhsLp:
    def test_product_state_feasible_many_settings(self):
        tau_a = np.diag([0.6, 0.4]).astype(complex)
        tau_b = np.diag([0.7, 0.3]).astype(complex)
        rho = DensityMatrix(np.kron(tau_a, tau_b), (2, 2))
        for n_settings in (2, 4, 6):
            asm = assemblage_from_state(rho, build_grid(6).points[:n_settings])
            sol = lhs_lp(asm, build_grid(200))
            assert sol.feasible, sol.residual

    def test_pure_marginal_product_state_needs_contact_atom(self):
        # a pure trusted marginal parks every steered state on the sphere;
        # only the exact atom can carry that weight
        mat = np.zeros((4, 4), dtype=complex)
        mat[0, 0] = 0.6
        mat[2, 2] = 0.4
        rho = DensityMatrix(mat, (2, 2))
        asm = assemblage_from_state(rho, build_grid(6).points[:4])
        plain = lhs_lp(asm, build_grid(200))
        assert not plain.feasible
        with_atom = lhs_lp(asm, build_grid(200, include_contact=True))
        assert with_atom.feasible, with_atom.residual

    def test_separable_standard_family_feasible(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 1, 0))
        sol = lhs_lp(assemblage_from_state(rho, TETRA), build_grid(200))
        assert sol.feasible and sol.residual <= 1e-7

    def test_werner_six_settings_feasible(self):
        sol = lhs_lp(assemblage_from_state(werner(0.45), build_grid(6).points), build_grid(300))
        assert sol.feasible

    def test_steering_family_infeasible_at_small_t(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
        asm = assemblage_from_state(rho, t_kets([0.2, 0.1, 0.05, 0.02]))
        sol = lhs_lp(asm, build_grid(300))
        assert not sol.feasible
        assert sol.residual > 1e-4

    def test_weights_reconstruct_reduced_state(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 1, 0))
        grid = build_grid(150)
        asm = assemblage_from_state(rho, TETRA)
        sol = lhs_lp(asm, grid)
        mass = sol.weights.sum(axis=0)
        tau = np.zeros((2, 2), dtype=complex)
        for j, r in enumerate(grid.points):
            tau += mass[j] * 0.5 * np.array(
                [[1 + r[2], r[0] - 1j * r[1]], [r[0] + 1j * r[1], 1 - r[2]]]
            )
        assert np.abs(tau - asm.reduced_state()).max() <= sol.residual + 1e-10
        assert np.all(sol.weights >= 0)
        assert sol.weights.sum() <= 1 + sol.residual + 1e-12

    def test_monotone_in_settings(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
        grid = build_grid(120)
        ts = [0.3, 0.1, 0.04, 0.015]
        residuals = []
        for k in (1, 2, 3, 4):
            sol = lhs_lp(assemblage_from_state(rho, t_kets(ts[:k])), grid)
            residuals.append(sol.residual)
        assert all(r2 >= r1 - 1e-12 for r1, r2 in zip(residuals, residuals[1:]))

    def test_monotone_under_grid_refinement(self):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
        asm = assemblage_from_state(rho, t_kets([0.15, 0.05]))
        grid = build_grid(40)
        r_coarse = lhs_lp(asm, grid).residual
        r_fine = lhs_lp(asm, refine_grid(grid)).residual
        assert r_fine <= r_coarse + 1e-12

    def test_column_budget_enforced(self):
        rho = werner(0.45)
        asm = assemblage_from_state(rho, build_grid(12).points)
        with pytest.raises(ValueError):
            assemble_lp(asm, build_grid(100))


class TestCapMass:
    def _solution(self, include_contact):
        rho, _ = cholesky_branch(CholeskyParams(1, 1, 1, 0, 0, 0.5))
        asm = assemblage_from_state(rho, t_kets([0.2, 0.1, 0.05]))
        grid = build_grid(200, include_contact=include_contact)
        return asm, grid, lhs_lp(asm, grid)

    def test_atom_only_support_gives_zero(self):
        grid = build_grid(50, include_contact=True)
        weights = np.zeros((4, grid.points.shape[0]))
        weights[0, grid.contact_index] = 1.0
        from steercert.lhs import LhsLpSolution

        sol = LhsLpSolution(feasible=True, residual=0.0, weights=weights, iterations=0)
        assert cap_mass(sol, grid, t=0.1, cap_constant=10.0) == 0.0

    def test_empty_cap_is_zero(self):
        asm, grid, sol = self._solution(False)
        # cap height ~ K^2 t^2 / 2 smaller than the most polar grid point
        assert cap_mass(sol, grid, t=1e-9, cap_constant=1.0) == 0.0

    def test_cap_mass_trend_recorded(self):
        asm, grid, sol = self._solution(True)
        masses = [cap_mass(sol, grid, t, 12.0) for t in (0.2, 0.1, 0.05)]
        assert all(m >= 0 for m in masses)
        assert masses[0] <= 1.0 + sol.residual

    def test_parameter_guards(self):
        asm, grid, sol = self._solution(False)
        with pytest.raises(ValueError):
            cap_mass(sol, grid, t=0.0, cap_constant=1.0)
        with pytest.raises(ValueError):
            cap_mass(sol, grid, t=0.1, cap_constant=-1.0)


class TestDirectionToKet:
    def test_poles(self):
        np.testing.assert_allclose(direction_to_ket(np.array([0, 0, 1.0])), E0, atol=1e-15)
        np.testing.assert_allclose(direction_to_ket(np.array([0, 0, -1.0])), E1, atol=1e-12)

    def test_projector_matches_bloch_form(self):
        rng = make_rng(91)
        for _ in range(20):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            ket = direction_to_ket(n)
            proj = np.outer(ket, ket.conj())
            pauli = np.array(
                [[n[2], n[0] - 1j * n[1]], [n[0] + 1j * n[1], -n[2]]], dtype=complex
            )
            np.testing.assert_allclose(proj, (np.eye(2) + pauli) / 2, atol=1e-12)
