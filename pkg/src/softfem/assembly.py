"""Global matrix assembly and method systems.

Builds the stiffness matrix K, the consistent (Gauss-Legendre) and lumped
(Gauss-Lobatto) mass matrices M_G and M_L, and the gradient-jump penalty
matrices S (interface weight kappa_F * h_F) and S_g (weight kappa_F *
h_F^3). These compose into the generalized eigensystem of each method:

    method      A = K - eta_K S    B
    ---------   ---------------    -------------------------------
    fem         eta_K = 0          M_G
    softfem                        M_G
    gsfem                          M_G + eta_M S_g
    softfembq                      alpha M_G + (1-alpha) M_L
    gsfembq                        alpha M_G + (1-alpha) M_L + eta_M S_g

1D systems are assembled directly. 2D tensor-product systems have a direct
element/edge assembly route and, for constant diffusion, an equivalent
Kronecker fast path used both for speed and as an independent cross-check.

All matrices are dense, symmetric by construction, with Dirichlet boundary
dofs eliminated; in 1D the half-bandwidth is at most 2p+1 (the penalty
couples next-nearest elements).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .elements import eval_basis, eval_basis_deriv, reference_element
from .mesh import (
    BOUNDARY,
    DiffusionField,
    Mesh1D,
    TensorMesh2D,
    dof_map,
    interfaces,
)
from .quadrature import Family, gauss_legendre, gauss_lobatto


class Method(str, Enum):
    """Spectral approximation method."""

    FEM = "fem"
    SOFTFEM = "softfem"
    GSFEM = "gsfem"
    SOFTFEMBQ = "softfembq"
    GSFEMBQ = "gsfembq"

    @staticmethod
    def from_name(name: str) -> "Method":
        try:
            return Method(name.lower())
        except ValueError:
            raise ValueError(f"unknown method {name!r}; expected one of "
                             f"{[m.value for m in Method]}") from None


class ConfigError(ValueError):
    """Invalid method or experiment configuration."""


@dataclass(frozen=True)
class MethodConfig:
    """Method selection with its softness and blending parameters.

    eta_k softens the stiffness side, eta_m the mass side, alpha blends the
    Gauss-Legendre and Gauss-Lobatto mass matrices. Methods that do not use
    a parameter require its neutral value (0 for the etas, 1 for alpha).
    """

    method: Method
    degree: int
    eta_k: float = 0.0
    eta_m: float = 0.0
    alpha: float = 1.0
    kappa: DiffusionField = field(default_factory=DiffusionField.constant)
    quad_increment: int = 0

    def __post_init__(self):
        if not 1 <= self.degree <= 4:
            raise ConfigError(f"unsupported degree {self.degree}")
        if self.quad_increment < 0:
            raise ConfigError("quad_increment must be >= 0")
        m = self.method
        if m is Method.FEM and not (self.eta_k == self.eta_m == 0 and self.alpha == 1):
            raise ConfigError("fem requires eta_k = eta_m = 0 and alpha = 1")
        if m is Method.SOFTFEM and not (self.eta_m == 0 and self.alpha == 1):
            raise ConfigError("softfem requires eta_m = 0 and alpha = 1")
        if m is Method.GSFEM and self.alpha != 1:
            raise ConfigError("gsfem requires alpha = 1")
        if m is Method.SOFTFEMBQ and self.eta_m != 0:
            raise ConfigError("softfembq requires eta_m = 0")

    def label(self) -> str:
        return (f"{self.method.value}(p={self.degree}, eta_k={self.eta_k}, "
                f"eta_m={self.eta_m}, alpha={self.alpha}, kappa={self.kappa.kind})")


@dataclass(frozen=True)
class SymmetricSystem:
    """Generalized eigensystem A x = lambda B x with symmetric A, B.

    B is positive definite for every supported parameter range; violations
    surface as a solver-time error.
    """

    a: np.ndarray
    b: np.ndarray
    config: MethodConfig
    mesh: object
    description: str = ""

    def __post_init__(self):
        for m in (self.a, self.b):
            m.setflags(write=False)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def half_bandwidth(matrix: np.ndarray) -> int:
    """Largest |i - j| with a nonzero entry."""
    rows, cols = np.nonzero(matrix)
    return int(np.max(np.abs(rows - cols))) if rows.size else 0


def _symmetrize(local: np.ndarray) -> np.ndarray:
    return 0.5 * (local + local.T)


def _dof_rows(mesh: Mesh1D, p: int, eliminate: bool):
    if eliminate:
        dm = dof_map(mesh, p)
        return dm.element_dofs, dm.n_dof
    n = mesh.n_elements
    rows = tuple(tuple(tau * p + a for a in range(p + 1)) for tau in range(n))
    return rows, n * p + 1


def _accumulate(global_mat, rows, local):
    for a, ga in enumerate(rows):
        if ga == BOUNDARY:
            continue
        for b, gb in enumerate(rows):
            if gb == BOUNDARY:
                continue
            global_mat[ga, gb] += local[a, b]


def assemble_stiffness(mesh: Mesh1D, p: int, kappa: DiffusionField | None = None,
                       *, eliminate_dirichlet: bool = True,
                       quad_increment: int = 0) -> np.ndarray:
    """Stiffness matrix K with entries int kappa phi_j' phi_i' dx.

    Element integrals use the (p+1+quad_increment)-point Gauss-Legendre
    rule, exact for constant kappa; quad_increment is available for
    variable-coefficient convergence studies.
    """
    kappa = kappa or DiffusionField.constant()
    elem = reference_element(p)
    xg, wg = (r := gauss_legendre(p + 1 + quad_increment)).points, r.weights
    dV = eval_basis_deriv(elem, xg)
    rows, n = _dof_rows(mesh, p, eliminate_dirichlet)
    K = np.zeros((n, n))
    for tau in range(mesh.n_elements):
        x0, x1 = mesh.element(tau)
        h = x1 - x0
        kq = kappa(x0 + (xg + 1.0) * h / 2.0)
        local = _symmetrize((2.0 / h) * (dV * (wg * kq)) @ dV.T)
        _accumulate(K, rows[tau], local)
    return K


def assemble_mass(mesh: Mesh1D, p: int, family: Family = Family.GAUSS_LEGENDRE,
                  *, eliminate_dirichlet: bool = True) -> np.ndarray:
    """Mass matrix by the (p+1)-point rule of the requested family.

    Gauss-Legendre yields the consistent mass M_G; Gauss-Lobatto yields the
    lumped, diagonal mass M_L (the quadrature points coincide with the
    nodal points).
    """
    elem = reference_element(p)
    if family is Family.GAUSS_LOBATTO:
        rule = gauss_lobatto(p + 1)
    else:
        rule = gauss_legendre(p + 1)
    V = eval_basis(elem, rule.points)
    ref_local = _symmetrize((V * rule.weights) @ V.T)
    rows, n = _dof_rows(mesh, p, eliminate_dirichlet)
    M = np.zeros((n, n))
    for tau in range(mesh.n_elements):
        x0, x1 = mesh.element(tau)
        _accumulate(M, rows[tau], ref_local * ((x1 - x0) / 2.0))
    return M


def _interface_jump_vectors(mesh: Mesh1D, p: int, eliminate: bool):
    """Per-interface jump of basis derivatives: (dof indices, coefficients).

    The jump at an interior vertex is the one-sided derivative from the
    left element minus the one from the right; the shared vertex dof
    collects both contributions.
    """
    elem = reference_element(p)
    d_at_right = eval_basis_deriv(elem, np.array([1.0]))[:, 0]
    d_at_left = eval_basis_deriv(elem, np.array([-1.0]))[:, 0]
    rows, _ = _dof_rows(mesh, p, eliminate)
    sizes = mesh.sizes
    out = []
    for i in range(1, mesh.n_elements):
        entries: dict[int, float] = {}
        for a in range(p + 1):
            g = rows[i - 1][a]
            if g != BOUNDARY:
                entries[g] = entries.get(g, 0.0) + (2.0 / sizes[i - 1]) * d_at_right[a]
        for a in range(p + 1):
            g = rows[i][a]
            if g != BOUNDARY:
                entries[g] = entries.get(g, 0.0) - (2.0 / sizes[i]) * d_at_left[a]
        idx = np.fromiter(entries.keys(), dtype=int)
        coeff = np.fromiter(entries.values(), dtype=float)
        out.append((idx, coeff))
    return out


def assemble_penalty(mesh: Mesh1D, p: int, kappa: DiffusionField | None = None,
                     weight_power: int = 1, *,
                     eliminate_dirichlet: bool = True) -> np.ndarray:
    """Gradient-jump penalty matrix.

    Entry (i, j) sums kappa_F h_F^weight_power [[phi_j']] [[phi_i']] over
    interior interfaces; weight_power 1 gives the stiffness-side penalty S,
    weight_power 3 the mass-side penalty S_g. Boundary points carry no
    penalty, which is why the first and last diagonal entries of the
    classic linear-element S are 5 rather than 6.
    """
    if weight_power not in (1, 3):
        raise ValueError(f"weight_power must be 1 or 3, got {weight_power}")
    kappa = kappa or DiffusionField.constant()
    faces = interfaces(mesh, kappa, p)
    jumps = _interface_jump_vectors(mesh, p, eliminate_dirichlet)
    _, n = _dof_rows(mesh, p, eliminate_dirichlet)
    S = np.zeros((n, n))
    for face, (idx, coeff) in zip(faces, jumps):
        weight = face.kappa_f * face.h_f ** weight_power
        S[np.ix_(idx, idx)] += weight * np.outer(coeff, coeff)
    return S


def _blended_mass(mg: np.ndarray, ml: np.ndarray, config: MethodConfig) -> np.ndarray:
    alpha = config.alpha
    if alpha == 1.0:
        return mg.copy()
    return alpha * mg + (1.0 - alpha) * ml


def build_system(mesh: Mesh1D, config: MethodConfig) -> SymmetricSystem:
    """Assemble the 1D generalized eigensystem of the configured method."""
    p, kappa = config.degree, config.kappa
    K = assemble_stiffness(mesh, p, kappa, quad_increment=config.quad_increment)
    A = K if config.eta_k == 0 else K - config.eta_k * assemble_penalty(mesh, p, kappa, 1)
    MG = assemble_mass(mesh, p, Family.GAUSS_LEGENDRE)
    if config.method in (Method.SOFTFEMBQ, Method.GSFEMBQ):
        ML = assemble_mass(mesh, p, Family.GAUSS_LOBATTO)
        B = _blended_mass(MG, ML, config)
    else:
        B = MG
    if config.eta_m != 0:
        B = B + config.eta_m * assemble_penalty(mesh, p, kappa, 3)
    desc = f"1d mesh, {mesh.n_elements} elements on ({mesh.a}, {mesh.b})"
    return SymmetricSystem(np.ascontiguousarray(A), np.ascontiguousarray(B),
                           config, mesh, desc)


# ---------------------------------------------------------------------------
# 2D tensor-product assembly
# ---------------------------------------------------------------------------


def _constant_kappa_value(kappa) -> float | None:
    if kappa is None:
        return 1.0
    if isinstance(kappa, DiffusionField):
        return kappa.value if kappa.is_constant else None
    return None


def _kron2(ax: np.ndarray, ay: np.ndarray) -> np.ndarray:
    # x-fastest global numbering g = gy * nx + gx pairs the y factor first
    return np.kron(ay, ax)


def kronecker_forms(mesh2: TensorMesh2D, p: int, kappa_value: float = 1.0) -> dict:
    """2D operators for constant diffusion as Kronecker sums/products.

    Returns the stiffness, both masses, and both penalties:
        K2  = K (x) M_G + M_G (x) K
        M2  = M_G (x) M_G,  ML2 = M_L (x) M_L
        S2  = S (x) M_G + M_G (x) S      (same for S_g with its weight)
    under the side-length h_F convention.
    """
    kap = DiffusionField.constant(kappa_value)
    parts = {}
    for axis, mesh in (("x", mesh2.x), ("y", mesh2.y)):
        parts[axis] = {
            "K": assemble_stiffness(mesh, p, kap),
            "MG": assemble_mass(mesh, p, Family.GAUSS_LEGENDRE),
            "ML": assemble_mass(mesh, p, Family.GAUSS_LOBATTO),
            "S": assemble_penalty(mesh, p, kap, 1),
            "Sg": assemble_penalty(mesh, p, kap, 3),
        }
    px, py = parts["x"], parts["y"]
    return {
        "K": _kron2(px["K"], py["MG"]) + _kron2(px["MG"], py["K"]),
        "MG": _kron2(px["MG"], py["MG"]),
        "ML": _kron2(px["ML"], py["ML"]),
        "S": _kron2(px["S"], py["MG"]) + _kron2(px["MG"], py["S"]),
        "Sg": _kron2(px["Sg"], py["MG"]) + _kron2(px["MG"], py["Sg"]),
    }


def _assemble_2d_direct(mesh2: TensorMesh2D, p: int, kappa,
                        edge_scale: str = "side") -> dict:
    """Element-by-element and edge-by-edge 2D assembly.

    kappa may be a constant DiffusionField or a callable f(x, y); the
    penalty lower bound kappa_F samples tensor Gauss points plus corners of
    the two adjacent elements.
    """
    if edge_scale not in ("side", "diameter"):
        raise ValueError(f"edge_scale must be 'side' or 'diameter', got {edge_scale!r}")
    const = _constant_kappa_value(kappa)
    if const is None and not callable(kappa):
        raise ValueError("2d assembly needs a constant field or a callable kappa(x, y)")

    elem = reference_element(p)
    nb = p + 1
    gl = gauss_legendre(nb)
    lob = gauss_lobatto(nb)
    xg, wg = gl.points, gl.weights
    V = eval_basis(elem, xg)
    dV = eval_basis_deriv(elem, xg)
    d_at_right = eval_basis_deriv(elem, np.array([1.0]))[:, 0]
    d_at_left = eval_basis_deriv(elem, np.array([-1.0]))[:, 0]

    mx, my = mesh2.x, mesh2.y
    dmx, dmy = dof_map(mx, p), dof_map(my, p)
    nxd, nyd = dmx.n_dof, dmy.n_dof
    ndof = nxd * nyd
    K = np.zeros((ndof, ndof))
    MG = np.zeros((ndof, ndof))
    ML = np.zeros((ndof, ndof))
    S = np.zeros((ndof, ndof))
    Sg = np.zeros((ndof, ndof))

    def kappa_at(xq, yq):
        if const is not None:
            return np.full((xq.size, yq.size), const)
        return np.asarray(kappa(xq[:, None], yq[None, :]), dtype=float)

    def global_ids(ex, ey):
        ids = np.empty(nb * nb, dtype=int)
        for b in range(nb):
            gy = dmy.element_dofs[ey][b]
            for a in range(nb):
                gx = dmx.element_dofs[ex][a]
                ids[b * nb + a] = BOUNDARY if (gx == BOUNDARY or gy == BOUNDARY) \
                    else gy * nxd + gx
        return ids

    # per-element kappa minima for penalty weights
    kmin = np.empty((mx.n_elements, my.n_elements))
    for ex in range(mx.n_elements):
        x0, x1 = mx.element(ex)
        xq = x0 + (xg + 1.0) * (x1 - x0) / 2.0
        xs = np.concatenate((xq, [x0, x1]))
        for ey in range(my.n_elements):
            y0, y1 = my.element(ey)
            yq = y0 + (xg + 1.0) * (y1 - y0) / 2.0
            ys = np.concatenate((yq, [y0, y1]))
            kmin[ex, ey] = const if const is not None else np.min(kappa_at(xs, ys))

    for ex in range(mx.n_elements):
        x0, x1 = mx.element(ex)
        hx = x1 - x0
        xq = x0 + (xg + 1.0) * hx / 2.0
        for ey in range(my.n_elements):
            y0, y1 = my.element(ey)
            hy = y1 - y0
            yq = y0 + (xg + 1.0) * hy / 2.0
            kqr = kappa_at(xq, yq) * np.outer(wg, wg)
            # local index is y-major: l = b*(p+1) + a with a in x, b in y
            myr = np.einsum("qr,br,dr->qbd", kqr, V, V)
            kx = np.einsum("aq,cq,qbd->badc", dV, dV, myr).reshape(nb * nb, nb * nb)
            mxr = np.einsum("qr,br,dr->qbd", kqr, dV, dV)
            ky = np.einsum("aq,cq,qbd->badc", V, V, mxr).reshape(nb * nb, nb * nb)
            k_local = _symmetrize((hy / hx) * kx + (hx / hy) * ky)
            wqr = np.outer(wg, wg)
            m_y = np.einsum("qr,br,dr->qbd", wqr, V, V)
            m_local = _symmetrize(
                (hx * hy / 4.0)
                * np.einsum("aq,cq,qbd->badc", V, V, m_y).reshape(nb * nb, nb * nb)
            )
            ml_diag = (hx * hy / 4.0) * np.outer(lob.weights, lob.weights).reshape(-1)
            ids = global_ids(ex, ey)
            keep = ids != BOUNDARY
            sel = ids[keep]
            K[np.ix_(sel, sel)] += k_local[np.ix_(keep, keep)]
            MG[np.ix_(sel, sel)] += m_local[np.ix_(keep, keep)]
            ML[sel, sel] += ml_diag[keep]

    # local 1d mass along an edge of length h (Gauss-Legendre, exact)
    edge_mass_ref = _symmetrize((V * wg) @ V.T)

    def edge_contribution(target, weight, jump_idx, jump_coeff, line_dofs,
                          line_mass, compose):
        # rows/cols ordered (line dof)-major, jump dof fastest
        block = weight * np.einsum("a,c,bd->badc", jump_coeff, jump_coeff, line_mass)
        nj, nl = jump_idx.size, len(line_dofs)
        block = block.reshape(nl * nj, nl * nj)
        gids = np.empty(nl * nj, dtype=int)
        for b, gline in enumerate(line_dofs):
            for a, gj in enumerate(jump_idx):
                gids[b * nj + a] = BOUNDARY if (gj == BOUNDARY or gline == BOUNDARY) \
                    else compose(gj, gline)
        keep = gids != BOUNDARY
        sel = gids[keep]
        target[np.ix_(sel, sel)] += block[np.ix_(keep, keep)]

    # vertical interior edges: jump in x, line integral in y
    def compose_x(gx, gy):
        return gy * nxd + gx

    jumps_x = _interface_jump_vectors(mx, p, True)
    sx = mx.sizes
    for i in range(1, mx.n_elements):
        jump_idx, jump_coeff = jumps_x[i - 1]
        for ey in range(my.n_elements):
            y0, y1 = my.element(ey)
            hy = y1 - y0
            kf = min(kmin[i - 1, ey], kmin[i, ey])
            if edge_scale == "side":
                hf = min(sx[i - 1], sx[i])
            else:
                hf = min(np.hypot(sx[i - 1], hy), np.hypot(sx[i], hy))
            line_mass = edge_mass_ref * (hy / 2.0)
            line_dofs = dmy.element_dofs[ey]
            edge_contribution(S, kf * hf, jump_idx, jump_coeff, line_dofs,
                              line_mass, compose_x)
            edge_contribution(Sg, kf * hf**3, jump_idx, jump_coeff, line_dofs,
                              line_mass, compose_x)

    # horizontal interior edges: jump in y, line integral in x
    def compose_y(gy, gx):
        return gy * nxd + gx

    jumps_y = _interface_jump_vectors(my, p, True)
    sy = my.sizes
    for j in range(1, my.n_elements):
        jump_idx, jump_coeff = jumps_y[j - 1]
        for ex in range(mx.n_elements):
            x0, x1 = mx.element(ex)
            hx = x1 - x0
            kf = min(kmin[ex, j - 1], kmin[ex, j])
            if edge_scale == "side":
                hf = min(sy[j - 1], sy[j])
            else:
                hf = min(np.hypot(hx, sy[j - 1]), np.hypot(hx, sy[j]))
            line_mass = edge_mass_ref * (hx / 2.0)
            line_dofs = dmx.element_dofs[ex]
            edge_contribution(S, kf * hf, jump_idx, jump_coeff, line_dofs,
                              line_mass, compose_y)
            edge_contribution(Sg, kf * hf**3, jump_idx, jump_coeff, line_dofs,
                              line_mass, compose_y)

    return {"K": K, "MG": MG, "ML": ML, "S": S, "Sg": Sg}


def build_system_2d(mesh2: TensorMesh2D, config: MethodConfig, *,
                    kronecker: str | bool = "auto",
                    edge_scale: str = "side") -> SymmetricSystem:
    """Assemble the 2D generalized eigensystem on a tensor-product mesh.

    kronecker selects the assembly route: True forces the Kronecker fast
    path (constant diffusion only), False forces direct assembly, "auto"
    picks Kronecker when the diffusion field is constant.
    """
    const = _constant_kappa_value(config.kappa)
    if kronecker == "auto":
        kronecker = const is not None and edge_scale == "side"
    if kronecker:
        if const is None:
            raise ConfigError("Kronecker fast path requires constant diffusion")
        ops = kronecker_forms(mesh2, config.degree, const)
    else:
        ops = _assemble_2d_direct(mesh2, config.degree, config.kappa, edge_scale)

    A = ops["K"] if config.eta_k == 0 else ops["K"] - config.eta_k * ops["S"]
    if config.method in (Method.SOFTFEMBQ, Method.GSFEMBQ):
        B = _blended_mass(ops["MG"], ops["ML"], config)
    else:
        B = ops["MG"].copy()
    if config.eta_m != 0:
        B = B + config.eta_m * ops["Sg"]
    desc = (f"2d tensor mesh, {mesh2.x.n_elements}x{mesh2.y.n_elements} elements, "
            f"{'kronecker' if kronecker else 'direct'} assembly")
    return SymmetricSystem(np.ascontiguousarray(A), np.ascontiguousarray(B),
                           config, mesh2, desc)


# ---------------------------------------------------------------------------
# plain-text matrix dump (golden-test interchange format)
# ---------------------------------------------------------------------------


def dump_matrix(matrix: np.ndarray, path) -> None:
    """Write the upper triangle in 'row col value' coordinate format."""
    n = matrix.shape[0]
    with open(path, "w", encoding="ascii") as f:
        f.write(f"order {n} symmetric\n")
        for i in range(n):
            for j in range(i, n):
                v = float(matrix[i, j])
                if v != 0.0:
                    f.write(f"{i} {j} {v!r}\n")


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by dump_matrix."""
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().split()
        if len(header) != 3 or header[0] != "order" or header[2] != "symmetric":
            raise ValueError(f"bad matrix header in {path}")
        n = int(header[1])
        out = np.zeros((n, n))
        for line in f:
            i, j, v = line.split()
            out[int(i), int(j)] = float(v)
            out[int(j), int(i)] = float(v)
    return out
