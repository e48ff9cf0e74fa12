"""1D partitions, tensor-product 2D meshes, diffusion fields, and dof maps.

Interfaces between elements carry the pair (h_F, kappa_F): the smaller of
the two adjacent element sizes and the lower bound of the diffusion
coefficient over the two adjacent elements. Domain boundary points are not
interfaces.

Degrees of freedom are numbered left to right over the interior nodes;
boundary nodes are eliminated (homogeneous Dirichlet) and marked with the
BOUNDARY sentinel in element dof lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import gauss_legendre

BOUNDARY = -1


@dataclass(frozen=True)
class Mesh1D:
    """Partition of an interval into elements.

    boundaries holds x_0 < x_1 < ... < x_N; element tau spans
    (boundaries[tau], boundaries[tau+1]).
    """

    boundaries: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("mesh needs at least two boundary points")
        if np.any(np.diff(b) <= 0):
            raise ValueError("element boundaries must be strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "boundaries", b)

    @property
    def n_elements(self) -> int:
        return self.boundaries.size - 1

    @property
    def a(self) -> float:
        return float(self.boundaries[0])

    @property
    def b(self) -> float:
        return float(self.boundaries[-1])

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def element(self, tau: int) -> tuple[float, float]:
        return float(self.boundaries[tau]), float(self.boundaries[tau + 1])

    def n_dof(self, p: int) -> int:
        """Interior dof count for degree p: N*p - 1."""
        return self.n_elements * p - 1


def uniform_mesh_1d(a: float, b: float, n_elements: int) -> Mesh1D:
    """Uniform partition of (a, b) into n_elements equal elements.

    Raises:
        ValueError: if n_elements < 2 (no interior dof for linears) or a >= b.
    """
    if a >= b:
        raise ValueError(f"domain endpoints must satisfy a < b, got ({a}, {b})")
    if n_elements < 2:
        raise ValueError(f"too few elements: {n_elements} (need at least 2)")
    return Mesh1D(np.linspace(a, b, n_elements + 1))


@dataclass(frozen=True)
class DiffusionField:
    """Positive diffusion coefficient selected from a small closed set.

    Kinds:
        "constant":      kappa(x) = value
        "exp_quadratic": kappa(x) = exp(x - x^2), the variable-coefficient
                         benchmark field (range [1, e^(1/4)] on (0, 1))
    """

    kind: str = "constant"
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "exp_quadratic"):
            raise ValueError(f"unknown diffusion field kind: {self.kind!r}")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("diffusion coefficient must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.value)
        return np.exp(x - x * x)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @staticmethod
    def constant(value: float = 1.0) -> "DiffusionField":
        return DiffusionField("constant", value)

    @staticmethod
    def exp_quadratic() -> "DiffusionField":
        return DiffusionField("exp_quadratic")


@dataclass(frozen=True)
class Interface:
    """Interior mesh interface with its penalty weights.

    position: the shared vertex (1D).
    h_f: min of the two adjacent element sizes.
    kappa_f: lower bound of kappa over the two adjacent elements.
    """

    position: float
    h_f: float
    kappa_f: float


def element_kappa_minima(mesh: Mesh1D, kappa: DiffusionField, p: int = 1) -> np.ndarray:
    """Per-element minimum of kappa, sampled at the endpoints plus the
    (p+1)-point Gauss-Legendre points.

    Exact for constant and per-element monotone fields (which covers both
    built-in kinds on meshes that do not straddle the exp_quadratic peak
    inside an element); a documented approximation otherwise.
    """
    if kappa.is_constant:
        return np.full(mesh.n_elements, kappa.value)
    xg = gauss_legendre(p + 1).points
    out = np.empty(mesh.n_elements)
    for tau in range(mesh.n_elements):
        x0, x1 = mesh.element(tau)
        samples = np.concatenate(([x0, x1], x0 + (xg + 1.0) * (x1 - x0) / 2.0))
        out[tau] = np.min(kappa(samples))
    return out


def interfaces(mesh: Mesh1D, kappa: DiffusionField, p: int = 1) -> list[Interface]:
    """Interior interfaces with (h_F, kappa_F); count is N - 1."""
    sizes = mesh.sizes
    kmin = element_kappa_minima(mesh, kappa, p)
    out = []
    for i in range(1, mesh.n_elements):
        out.append(
            Interface(
                position=float(mesh.boundaries[i]),
                h_f=float(min(sizes[i - 1], sizes[i])),
                kappa_f=float(min(kmin[i - 1], kmin[i])),
            )
        )
    return out


@dataclass(frozen=True)
class DofMap:
    """Global numbering of the interior nodal dofs of a 1D mesh.

    element_dofs[tau][a] is the global index of local node a of element
    tau, or BOUNDARY for eliminated boundary nodes. Adjacent elements
    share their endpoint node index.
    """

    degree: int
    element_dofs: tuple
    n_dof: int


def dof_map(mesh: Mesh1D, p: int) -> DofMap:
    """Contiguous left-to-right interior numbering for degree p."""
    if not 1 <= p <= 4:
        raise ValueError(f"unsupported degree {p}")
    n = mesh.n_elements
    total = n * p
    rows = []
    for tau in range(n):
        row = []
        for a in range(p + 1):
            g = tau * p + a
            row.append(g - 1 if 0 < g < total else BOUNDARY)
        rows.append(tuple(row))
    return DofMap(degree=p, element_dofs=tuple(rows), n_dof=total - 1)


@dataclass(frozen=True)
class TensorMesh2D:
    """Tensor product of two 1D partitions."""

    x: Mesh1D
    y: Mesh1D

    @property
    def n_elements(self) -> int:
        return self.x.n_elements * self.y.n_elements

    def n_dof(self, p: int) -> int:
        """Interior dof count: (Nx*p - 1) * (Ny*p - 1)."""
        return self.x.n_dof(p) * self.y.n_dof(p)

    @property
    def n_interior_edges(self) -> int:
        """Nx*(Ny-1) horizontal plus Ny*(Nx-1) vertical interior edges."""
        nx, ny = self.x.n_elements, self.y.n_elements
        return nx * (ny - 1) + ny * (nx - 1)


def uniform_mesh_2d(a: float, b: float, nx: int, ny: int | None = None) -> TensorMesh2D:
    """Uniform nx-by-ny tensor mesh on the square (a, b)^2."""
    if ny is None:
        ny = nx
    return TensorMesh2D(uniform_mesh_1d(a, b, nx), uniform_mesh_1d(a, b, ny))
