"""Lagrange reference elements on Gauss-Lobatto nodal points.

Degree-p elements carry p+1 nodes at the (p+1)-point Gauss-Lobatto
abscissae. With this layout the mass matrix integrated by the matching
Lobatto rule is diagonal (exact mass lumping), and the endpoint nodes
give C0 continuity by dof sharing across elements.

Basis evaluation uses the barycentric Lagrange formula, which is stable
and needs no stored polynomial coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import gauss_lobatto

MAX_DEGREE = 4


@dataclass(frozen=True)
class ReferenceElement:
    """Degree-p Lagrange element on [-1, 1] with Gauss-Lobatto nodes."""

    degree: int
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_basis(self) -> int:
        return self.degree + 1


def reference_element(p: int) -> ReferenceElement:
    """Build the degree-p reference element.

    Args:
        p: polynomial degree, 1 <= p <= 4 (quartic is needed for the
           fine-mesh reference spectra).

    Raises:
        ValueError: for degrees outside the supported range.
    """
    if not 1 <= p <= MAX_DEGREE:
        raise ValueError(f"unsupported degree {p}; supported range is [1, {MAX_DEGREE}]")
    return ReferenceElement(p, gauss_lobatto(p + 1).points)


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = np.subtract.outer(nodes, nodes)
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def eval_basis(elem: ReferenceElement, xi) -> np.ndarray:
    """Tabulate the Lagrange basis: entry (i, k) = L_i(xi_k).

    Uses the second barycentric formula; evaluation exactly at a node
    returns the Kronecker column.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    nodes = elem.nodes
    w = _barycentric_weights(nodes)
    out = np.empty((elem.n_basis, xi.size))
    for k, t in enumerate(xi):
        diff = t - nodes
        hit = np.abs(diff) < 1e-14
        if hit.any():
            col = np.zeros(elem.n_basis)
            col[np.argmax(hit)] = 1.0
        else:
            c = w / diff
            col = c / np.sum(c)
        out[:, k] = col
    return out


def differentiation_matrix(elem: ReferenceElement) -> np.ndarray:
    """Nodal differentiation matrix D with D[k, j] = L_j'(node_k)."""
    nodes = elem.nodes
    w = _barycentric_weights(nodes)
    d = np.subtract.outer(nodes, nodes)
    np.fill_diagonal(d, 1.0)
    D = (w[None, :] / w[:, None]) / d
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -np.sum(D, axis=1))
    return D


def eval_basis_deriv(elem: ReferenceElement, xi) -> np.ndarray:
    """Tabulate basis derivatives: entry (i, k) = L_i'(xi_k).

    L_i' has degree p-1, so it is recovered exactly by interpolating its
    nodal values (columns of the differentiation matrix).
    """
    return differentiation_matrix(elem).T @ eval_basis(elem, xi)
