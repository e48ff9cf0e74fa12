"""Generalized eigensolver correctness, diagnostics, and failure modes."""

import numpy as np
import pytest

from softfem import (
    DiffusionField,
    Method,
    MethodConfig,
    NotPositiveDefiniteError,
    ParameterTriple,
    Spectrum,
    SymmetricSystem,
    analytic_spectrum_gsfembq,
    b_orthonormality_error,
    build_system,
    rayleigh_residuals,
    solve_gevp,
    trace_consistency,
    uniform_mesh_1d,
)


def plain_system(a, b):
    cfg = MethodConfig(Method.FEM, 1)
    return SymmetricSystem(np.array(a, dtype=float), np.array(b, dtype=float),
                           cfg, None, "hand-built")


class TestSmallSystems:
    def test_diagonal(self):
        spec = solve_gevp(plain_system(np.diag([1.0, 2.0]), np.eye(2)))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 2.0], atol=1e-14)

    def test_known_two_by_two(self):
        spec = solve_gevp(plain_system([[2, -1], [-1, 2]], np.eye(2)))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-13)

    def test_eigenvalues_ascending(self):
        rng = np.random.default_rng(7)
        q = np.linalg.qr(rng.normal(size=(12, 12)))[0]
        a = q @ np.diag(rng.uniform(-3, 5, 12)) @ q.T
        spec = solve_gevp(plain_system(0.5 * (a + a.T), np.eye(12)))
        assert np.all(np.diff(spec.eigenvalues) >= 0)

    def test_sign_canonicalization(self):
        spec = solve_gevp(plain_system(np.diag([1.0, 2.0, 3.0]), np.eye(3)))
        for j in range(3):
            col = spec.eigenvectors[:, j]
            assert col[np.argmax(np.abs(col))] > 0


class TestAgainstClosedForm:
    def test_fem_linear_four_elements(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 4)
        spec = solve_gevp(build_system(mesh, MethodConfig(Method.FEM, 1)))
        expected = analytic_spectrum_gsfembq(4, ParameterTriple(0, 0, 1))
        np.testing.assert_allclose(spec.eigenvalues, expected, rtol=1e-10)

    def test_eigenvector_matches_sine_vector(self):
        from softfem import analytic_eigenvector
        mesh = uniform_mesh_1d(0.0, 1.0, 8)
        spec = solve_gevp(build_system(mesh, MethodConfig(Method.FEM, 1)))
        for j in (1, 3, 7):
            got = spec.eigenvectors[:, j - 1]
            want = analytic_eigenvector(j, 8)
            got = got / np.linalg.norm(got)
            if np.dot(got, want) < 0:
                got = -got
            np.testing.assert_allclose(got, want, atol=1e-10)


class TestDiagnostics:
    def test_exact_pairs_have_zero_residual(self):
        sys1 = plain_system(np.diag([1.0, 4.0]), np.eye(2))
        spec = Spectrum(np.array([1.0, 4.0]), np.eye(2), 0.0, 0.0)
        assert rayleigh_residuals(sys1, spec) < 1e-15

    def test_perturbed_eigenvalue_raises_residual(self):
        sys1 = plain_system(np.diag([1.0, 4.0]), np.eye(2))
        spec = Spectrum(np.array([1.0 + 1e-3, 4.0]), np.eye(2), 0.0, 0.0)
        assert rayleigh_residuals(sys1, spec) >= 1e-4

    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_solved_systems_self_check(self, n):
        mesh = uniform_mesh_1d(0.0, 1.0, n)
        cfg = MethodConfig(Method.GSFEM, 2, eta_k=1 / 24, eta_m=1 / 2880)
        sys1 = build_system(mesh, cfg)
        spec = solve_gevp(sys1)
        assert spec.max_residual <= 1e-8
        assert spec.b_orthonormality_error <= 1e-8
        assert trace_consistency(sys1, spec) <= 1e-8
        assert b_orthonormality_error(sys1, spec) == spec.b_orthonormality_error

    def test_eigenvalue_count_matches_dofs(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 17)
        spec = solve_gevp(build_system(mesh, MethodConfig(Method.FEM, 3)))
        assert len(spec) == 17 * 3 - 1


class TestDeterminism:
    def test_bitwise_identical_reruns(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 60)
        cfg = MethodConfig(Method.SOFTFEMBQ, 2, eta_k=1 / 24, alpha=0.8)
        s1 = solve_gevp(build_system(mesh, cfg))
        s2 = solve_gevp(build_system(mesh, cfg))
        assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
        assert np.array_equal(s1.eigenvectors, s2.eigenvectors)


class TestFailures:
    def test_indefinite_mass_reports_parameters(self):
        # a large negative mass softness destroys positive definiteness
        mesh = uniform_mesh_1d(0.0, 1.0, 10)
        cfg = MethodConfig(Method.GSFEM, 1, eta_k=0.0, eta_m=-1.0)
        sys1 = build_system(mesh, cfg)
        with pytest.raises(NotPositiveDefiniteError, match="gsfem"):
            solve_gevp(sys1)

    def test_spectrum_is_immutable(self):
        spec = solve_gevp(plain_system(np.eye(2), np.eye(2)))
        with pytest.raises(ValueError):
            spec.eigenvalues[0] = 5.0
