"""Assembled matrices against closed forms, symbolic oracles, and the
Kronecker cross-check in 2D."""

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from softfem import (
    ConfigError,
    DiffusionField,
    Family,
    Mesh1D,
    Method,
    MethodConfig,
    assemble_mass,
    assemble_penalty,
    assemble_stiffness,
    build_system,
    build_system_2d,
    dump_matrix,
    half_bandwidth,
    kronecker_forms,
    load_matrix,
    reference_element,
    solve_gevp,
    uniform_mesh_1d,
    uniform_mesh_2d,
)


def tridiag(n, lo, d, up):
    return (np.diag(np.full(n, float(d)))
            + np.diag(np.full(n - 1, float(lo)), -1)
            + np.diag(np.full(n - 1, float(up)), 1))


def linear_penalty_pattern(n):
    """Pentadiagonal rows (1, -4, 6, -4, 1) with 5 in the corners."""
    s = (np.diag(np.full(n, 6.0)) + np.diag(np.full(n - 1, -4.0), -1)
         + np.diag(np.full(n - 1, -4.0), 1) + np.diag(np.full(n - 2, 1.0), -2)
         + np.diag(np.full(n - 2, 1.0), 2))
    s[0, 0] = s[-1, -1] = 5.0
    return s


def symbolic_element_matrices(p):
    """Exact element stiffness/mass on [-1, 1] for the Lobatto nodal basis,
    integrated symbolically (independent of the quadrature code)."""
    x = sympy.Symbol("x")
    nodes = [sympy.nsimplify(v, rational=False) for v in reference_element(p).nodes]
    basis = []
    for i in range(p + 1):
        li = sympy.Integer(1)
        for j in range(p + 1):
            if j != i:
                li *= (x - nodes[j]) / (nodes[i] - nodes[j])
        basis.append(sympy.expand(li))
    k = sympy.zeros(p + 1, p + 1)
    m = sympy.zeros(p + 1, p + 1)
    for i in range(p + 1):
        for j in range(p + 1):
            k[i, j] = sympy.integrate(sympy.diff(basis[i], x) * sympy.diff(basis[j], x),
                                      (x, -1, 1))
            m[i, j] = sympy.integrate(basis[i] * basis[j], (x, -1, 1))
    return (np.array(k.tolist(), dtype=float), np.array(m.tolist(), dtype=float))


class TestStiffness:
    def test_linear_uniform_closed_form(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 4)
        K = assemble_stiffness(mesh, 1)
        np.testing.assert_allclose(K, 4.0 * tridiag(3, -1, 2, -1), atol=1e-12)

    def test_smallest_case_single_dof(self):
        K = assemble_stiffness(uniform_mesh_1d(0.0, 1.0, 2), 1)
        np.testing.assert_allclose(K, [[4.0]], atol=1e-13)

    def test_quadratic_against_symbolic_integration(self):
        # N=2 on (0, 1): assemble the 3x3 interior block from the exact
        # element matrices mapped by the affine jacobian h/2
        mesh = uniform_mesh_1d(0.0, 1.0, 2)
        k_ref, _ = symbolic_element_matrices(2)
        h = 0.5
        full = np.zeros((5, 5))
        for e in range(2):
            full[2 * e:2 * e + 3, 2 * e:2 * e + 3] += (2.0 / h) * k_ref
        expected = full[1:4, 1:4]
        np.testing.assert_allclose(assemble_stiffness(mesh, 2), expected, atol=1e-12)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_row_sums_vanish_before_elimination(self, p):
        # constants lie in the kernel of the full stiffness operator
        mesh = uniform_mesh_1d(0.0, 1.0, 5)
        K = assemble_stiffness(mesh, p, eliminate_dirichlet=False)
        np.testing.assert_allclose(K.sum(axis=1), 0.0, atol=1e-12)

    def test_variable_kappa_weighting(self):
        # linear elements: K_ii = (int kappa over left + right elements)/h^2
        mesh = uniform_mesh_1d(0.0, 1.0, 4)
        kappa = DiffusionField.exp_quadratic()
        K = assemble_stiffness(mesh, 1, kappa, quad_increment=6)
        from scipy.integrate import quad
        for i in range(3):
            x0, x2 = 0.25 * i, 0.25 * (i + 2)
            exact = quad(lambda x: np.exp(x - x * x), x0, x2)[0] / 0.25**2
            assert abs(K[i, i] - exact) < 1e-10


class TestMass:
    def test_linear_consistent_closed_form(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 4)
        M = assemble_mass(mesh, 1, Family.GAUSS_LEGENDRE)
        np.testing.assert_allclose(M, 0.25 * tridiag(3, 1 / 6, 2 / 3, 1 / 6), atol=1e-15)

    def test_linear_lumped_is_scaled_identity(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 4)
        M = assemble_mass(mesh, 1, Family.GAUSS_LOBATTO)
        np.testing.assert_allclose(M, 0.25 * np.eye(3), atol=1e-15)

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_lobatto_mass_is_diagonal(self, p):
        mesh = uniform_mesh_1d(0.0, 1.0, 3)
        M = assemble_mass(mesh, p, Family.GAUSS_LOBATTO)
        off = M - np.diag(np.diag(M))
        assert np.max(np.abs(off)) < 1e-14

    def test_quadratic_bubble_lumped_weight(self):
        # bubble dof carries lobatto weight 4/3 times jacobian h/2 = 2h/3;
        # the shared vertex collects weight 1/3 from each side
        mesh = uniform_mesh_1d(0.0, 1.0, 2)
        M = assemble_mass(mesh, 2, Family.GAUSS_LOBATTO)
        h = 0.5
        np.testing.assert_allclose(np.diag(M), [2 * h / 3, h / 3, 2 * h / 3], rtol=1e-14)

    def test_quadratic_consistent_against_symbolic_integration(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 2)
        _, m_ref = symbolic_element_matrices(2)
        h = 0.5
        full = np.zeros((5, 5))
        for e in range(2):
            full[2 * e:2 * e + 3, 2 * e:2 * e + 3] += (h / 2.0) * m_ref
        np.testing.assert_allclose(assemble_mass(mesh, 2), full[1:4, 1:4], atol=1e-14)


class TestPenalty:
    def test_linear_uniform_closed_form(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 5)
        S = assemble_penalty(mesh, 1, weight_power=1)
        np.testing.assert_allclose(S, 5.0 * linear_penalty_pattern(4), atol=1e-11)

    def test_cubic_weight_rescales_by_h_squared(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 5)
        S1 = assemble_penalty(mesh, 1, weight_power=1)
        S3 = assemble_penalty(mesh, 1, weight_power=3)
        np.testing.assert_allclose(S3, S1 / 25.0, rtol=1e-12)

    @pytest.mark.parametrize("p,power", [(1, 1), (2, 1), (3, 1), (2, 3)])
    def test_positive_semidefinite(self, p, power):
        mesh = uniform_mesh_1d(0.0, 1.0, 6)
        S = assemble_penalty(mesh, p, weight_power=power)
        w = np.linalg.eigvalsh(S)
        assert w[0] > -1e-10 * np.linalg.norm(S)

    def test_smooth_quadratic_in_kernel(self):
        # u = x(1-x) is C1 and piecewise quadratic: zero jumps, so S u = 0
        mesh = uniform_mesh_1d(0.0, 1.0, 3)
        S = assemble_penalty(mesh, 2, weight_power=1)
        nodes = np.array([1 / 6, 1 / 3, 1 / 2, 2 / 3, 5 / 6])  # interior dof positions
        u = nodes * (1 - nodes)
        np.testing.assert_allclose(S @ u, 0.0, atol=1e-12)

    def test_against_direct_jump_summation(self):
        # independent oracle: sum kappa_F h_F [jump_i][jump_j] with jumps
        # evaluated by finite differences of the global nodal interpolant
        mesh = Mesh1D(np.array([0.0, 0.3, 0.55, 1.0]))
        p = 2
        S = assemble_penalty(mesh, p, weight_power=1)
        n = mesh.n_dof(p)
        eps = 1e-7

        def global_eval(coeffs, x):
            # piecewise evaluation of the nodal expansion
            from softfem import eval_basis
            elem = reference_element(p)
            x = np.atleast_1d(x)
            out = np.zeros_like(x)
            for tau in range(mesh.n_elements):
                x0, x1 = mesh.element(tau)
                inside = (x >= x0 - 1e-14) & (x <= x1 + 1e-14)
                if not inside.any():
                    continue
                xi = 2 * (x[inside] - x0) / (x1 - x0) - 1
                local = np.zeros(p + 1)
                from softfem import dof_map
                for a, g in enumerate(dof_map(mesh, p).element_dofs[tau]):
                    if g >= 0:
                        local[a] = coeffs[g]
                out[inside] = local @ eval_basis(elem, xi)
            return out

        expected = np.zeros((n, n))
        from softfem import interfaces
        faces = interfaces(mesh, DiffusionField.constant(), p)
        basis_jumps = np.zeros((n, len(faces)))
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            for f, face in enumerate(faces):
                xf = face.position
                left = (global_eval(e, xf - 2 * eps) - global_eval(e, xf - 4 * eps))[0] / (2 * eps)
                right = (global_eval(e, xf + 4 * eps) - global_eval(e, xf + 2 * eps))[0] / (2 * eps)
                basis_jumps[i, f] = left - right
        for f, face in enumerate(faces):
            expected += face.h_f * np.outer(basis_jumps[:, f], basis_jumps[:, f])
        np.testing.assert_allclose(S, expected, rtol=1e-4, atol=1e-4)

    def test_invalid_weight_power(self):
        with pytest.raises(ValueError):
            assemble_penalty(uniform_mesh_1d(0, 1, 4), 1, weight_power=2)


class TestMatrixStructure:
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_half_bandwidth_within_penalty_coupling(self, p):
        mesh = uniform_mesh_1d(0.0, 1.0, 6)
        assert half_bandwidth(assemble_stiffness(mesh, p)) <= p
        assert half_bandwidth(assemble_penalty(mesh, p)) <= 2 * p + 1

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_exact_symmetry(self, p):
        mesh = Mesh1D(np.array([0.0, 0.15, 0.4, 0.8, 1.0]))
        kappa = DiffusionField.exp_quadratic()
        for mat in (assemble_stiffness(mesh, p, kappa),
                    assemble_mass(mesh, p),
                    assemble_penalty(mesh, p, kappa, 1),
                    assemble_penalty(mesh, p, kappa, 3)):
            assert np.array_equal(mat, mat.T)

    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("n", [4, 20, 200])
    def test_softened_stiffness_remains_positive_definite(self, p, n):
        # coercivity at the standard softness value eta_k = 1/(2(p+1)(p+2))
        mesh = uniform_mesh_1d(0.0, 1.0, n)
        eta_k = 1.0 / (2 * (p + 1) * (p + 2))
        A = assemble_stiffness(mesh, p) - eta_k * assemble_penalty(mesh, p)
        scipy.linalg.cholesky(A)  # raises if not positive definite


class TestMethodConfig:
    def test_fem_requires_neutral_parameters(self):
        with pytest.raises(ConfigError):
            MethodConfig(Method.FEM, 1, eta_k=0.1)

    def test_softfem_requires_zero_mass_penalty(self):
        with pytest.raises(ConfigError):
            MethodConfig(Method.SOFTFEM, 1, eta_k=0.1, eta_m=0.1)

    def test_gsfem_requires_unit_alpha(self):
        with pytest.raises(ConfigError):
            MethodConfig(Method.GSFEM, 1, eta_k=0.1, eta_m=0.01, alpha=0.5)

    def test_softfembq_requires_zero_mass_penalty(self):
        with pytest.raises(ConfigError):
            MethodConfig(Method.SOFTFEMBQ, 1, eta_k=0.1, eta_m=0.1, alpha=0.5)

    def test_degree_range(self):
        with pytest.raises(ConfigError):
            MethodConfig(Method.FEM, 5)

    def test_method_parsing(self):
        assert Method.from_name("GSFEMBQ") is Method.GSFEMBQ
        with pytest.raises(ValueError):
            Method.from_name("spectral")


class TestBuildSystem:
    def test_fem_composition(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 6)
        sys1 = build_system(mesh, MethodConfig(Method.FEM, 1))
        np.testing.assert_array_equal(sys1.a, assemble_stiffness(mesh, 1))
        np.testing.assert_array_equal(sys1.b, assemble_mass(mesh, 1))

    def test_gsfembq_composition(self):
        mesh = uniform_mesh_1d(0.0, 1.0, 6)
        cfg = MethodConfig(Method.GSFEMBQ, 1, eta_k=0.05, eta_m=0.001, alpha=0.7)
        sys1 = build_system(mesh, cfg)
        K = assemble_stiffness(mesh, 1)
        S = assemble_penalty(mesh, 1, weight_power=1)
        MG = assemble_mass(mesh, 1, Family.GAUSS_LEGENDRE)
        ML = assemble_mass(mesh, 1, Family.GAUSS_LOBATTO)
        Sg = assemble_penalty(mesh, 1, weight_power=3)
        np.testing.assert_allclose(sys1.a, K - 0.05 * S, atol=1e-13)
        np.testing.assert_allclose(sys1.b, 0.7 * MG + 0.3 * ML + 0.001 * Sg, atol=1e-15)

    def test_fully_lumped_blend_stays_positive_definite(self):
        # alpha=0 with negative mass softness: B = M_L - (1/90) S_g
        mesh = uniform_mesh_1d(0.0, 1.0, 200)
        cfg = MethodConfig(Method.GSFEMBQ, 1, eta_k=-1 / 12, eta_m=-1 / 90, alpha=0.0)
        sys1 = build_system(mesh, cfg)
        scipy.linalg.cholesky(sys1.b)

    def test_system_matrices_are_immutable(self):
        sys1 = build_system(uniform_mesh_1d(0, 1, 4), MethodConfig(Method.FEM, 1))
        with pytest.raises(ValueError):
            sys1.a[0, 0] = 0.0


class TestAssembly2D:
    @pytest.mark.parametrize("p", [1, 2])
    def test_direct_equals_kronecker(self, p):
        mesh2 = uniform_mesh_2d(0.0, 1.0, 8)
        cfg = MethodConfig(Method.GSFEMBQ, p, eta_k=1 / 24, eta_m=1 / 2880, alpha=0.8)
        direct = build_system_2d(mesh2, cfg, kronecker=False)
        kron = build_system_2d(mesh2, cfg, kronecker=True)
        scale_a = np.max(np.abs(kron.a))
        scale_b = np.max(np.abs(kron.b))
        assert np.max(np.abs(direct.a - kron.a)) < 1e-12 * scale_a
        assert np.max(np.abs(direct.b - kron.b)) < 1e-12 * scale_b

    def test_all_operator_blocks_match(self):
        mesh2 = uniform_mesh_2d(0.0, 1.0, 5)
        from softfem.assembly import _assemble_2d_direct
        ops_d = _assemble_2d_direct(mesh2, 2, DiffusionField.constant())
        ops_k = kronecker_forms(mesh2, 2)
        for key in ("K", "MG", "ML", "S", "Sg"):
            scale = max(np.max(np.abs(ops_k[key])), 1e-300)
            assert np.max(np.abs(ops_d[key] - ops_k[key])) < 1e-12 * scale, key

    def test_first_eigenvalue_bounds_continuum_from_above(self):
        mesh2 = uniform_mesh_2d(0.0, 1.0, 4)
        spec = solve_gevp(build_system_2d(mesh2, MethodConfig(Method.FEM, 1)))
        assert spec.eigenvalues[0] > 2 * np.pi**2

    def test_dof_count(self):
        mesh2 = uniform_mesh_2d(0.0, 1.0, 40)
        sys2 = build_system_2d(mesh2, MethodConfig(Method.FEM, 2))
        assert sys2.n == 6241

    def test_nonconstant_kappa_requires_direct_route(self):
        mesh2 = uniform_mesh_2d(0.0, 1.0, 4)
        cfg = MethodConfig(Method.FEM, 1, kappa=DiffusionField.exp_quadratic())
        with pytest.raises(ConfigError):
            build_system_2d(mesh2, cfg, kronecker=True)

    def test_callable_kappa_direct_assembly(self):
        # multiplicative constant behaves linearly in the stiffness
        mesh2 = uniform_mesh_2d(0.0, 1.0, 3)
        from softfem.assembly import _assemble_2d_direct
        ops1 = _assemble_2d_direct(mesh2, 1, DiffusionField.constant())
        ops3 = _assemble_2d_direct(mesh2, 1, lambda x, y: 3.0 + 0.0 * x * y)
        np.testing.assert_allclose(ops3["K"], 3.0 * ops1["K"], rtol=1e-13)
        np.testing.assert_allclose(ops3["MG"], ops1["MG"], rtol=0, atol=0)


class TestMatrixDump:
    def test_roundtrip(self, tmp_path):
        mesh = uniform_mesh_1d(0.0, 1.0, 5)
        S = assemble_penalty(mesh, 2)
        path = tmp_path / "penalty.txt"
        dump_matrix(S, path)
        header = path.read_text().splitlines()[0]
        assert header == f"order {S.shape[0]} symmetric"
        np.testing.assert_array_equal(load_matrix(path), S)


@settings(deadline=None, max_examples=25, derandomize=True)
@given(
    cuts=st.lists(st.floats(min_value=0.05, max_value=0.95), min_size=1, max_size=6,
                  unique=True),
    p=st.integers(min_value=1, max_value=3),
)
def test_random_meshes_keep_structural_invariants(cuts, p):
    """On arbitrary partitions: symmetry, penalty PSD, stiffness kernel."""
    boundaries = np.array(sorted({0.0, 1.0, *cuts}))
    if np.min(np.diff(boundaries)) < 1e-3:
        boundaries = np.linspace(0.0, 1.0, len(boundaries))
    mesh = Mesh1D(boundaries)
    K = assemble_stiffness(mesh, p, eliminate_dirichlet=False)
    S = assemble_penalty(mesh, p)
    assert np.array_equal(K, K.T) and np.array_equal(S, S.T)
    np.testing.assert_allclose(K.sum(axis=1), 0.0, atol=1e-10)
    w = np.linalg.eigvalsh(S)
    assert w.size == 0 or w[0] > -1e-10 * max(np.linalg.norm(S), 1.0)
