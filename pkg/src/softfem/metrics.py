"""Error and stiffness metrics for solved spectra.

Eigenvalue errors are signed relative deviations against exact or
reference values. Eigenfunction errors compare the nodal expansion of a
discrete eigenvector (L2-normalized against the consistent mass, sign
aligned with the exact eigenfunction) in the L2 norm and the
eigenvalue-normalized H1 seminorm. Stiffness is measured by the condition
number sigma = lambda_max / lambda_min of the discrete spectrum, and
methods are compared through reduction ratios against a baseline.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .assembly import assemble_mass
from .elements import eval_basis, eval_basis_deriv, reference_element
from .eigensolve import Spectrum
from .mesh import BOUNDARY, Mesh1D, dof_map
from .oracle import ExactEigenpair
from .quadrature import Family, gauss_legendre

MULTIPLICITY_GAP = 1e-8


@dataclass(frozen=True)
class StiffnessReport:
    """Extreme eigenvalues and the condition number of one spectrum."""

    lambda_min: float
    lambda_max: float
    sigma: float


@dataclass(frozen=True)
class ErrorReport:
    """Per-index errors of one method run, aligned with ascending order."""

    label: str
    eigenvalue_errors: np.ndarray
    l2_errors: list
    h1_errors: list


def eigenvalue_errors(computed: np.ndarray, exact: np.ndarray) -> np.ndarray:
    """Signed relative errors (computed - exact)/exact, truncated to the
    shorter of the two lists."""
    computed = np.asarray(computed, dtype=float)
    exact = np.asarray(exact, dtype=float)
    n = min(computed.size, exact.size)
    computed, exact = computed[:n], exact[:n]
    if np.any(exact == 0):
        raise ZeroDivisionError("exact eigenvalue of zero in relative error")
    return (computed - exact) / exact


def condition_number(spectrum: Spectrum) -> StiffnessReport:
    """sigma = lambda_max / lambda_min; requires a positive spectrum."""
    if len(spectrum) == 0:
        raise ValueError("empty spectrum")
    lo = float(spectrum.eigenvalues[0])
    hi = float(spectrum.eigenvalues[-1])
    if lo <= 0:
        raise ValueError(f"indefinite system: smallest eigenvalue {lo} <= 0")
    return StiffnessReport(lambda_min=lo, lambda_max=hi, sigma=hi / lo)


def reduction_ratios(base: StiffnessReport, other: StiffnessReport) -> tuple[float, float]:
    """(rho, varrho): rho = sigma_base/sigma_other, varrho = 100(1 - 1/rho)."""
    rho = base.sigma / other.sigma
    return rho, 100.0 * (1.0 - 1.0 / rho)


def fit_order(h_values, errors) -> float:
    """Least-squares slope of log(error) against log(h).

    Non-positive entries (rounding floor) are dropped with a warning; at
    least three usable points are required.
    """
    h_values = np.asarray(h_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if h_values.size != errors.size:
        raise ValueError("h and error lists must have equal length")
    keep = errors > 0
    if not np.all(keep):
        warnings.warn("dropping non-positive errors from order fit", stacklevel=2)
    h_values, errors = h_values[keep], errors[keep]
    if h_values.size < 3:
        raise ValueError("order fit needs at least 3 positive data points")
    x = np.log(h_values)
    y = np.log(errors)
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


# ---------------------------------------------------------------------------
# eigenfunction errors
# ---------------------------------------------------------------------------


def _element_tables(p: int):
    elem = reference_element(p)
    rule = gauss_legendre(p + 3)
    return (rule.points, rule.weights, eval_basis(elem, rule.points),
            eval_basis_deriv(elem, rule.points))


def _local_coefficients(coeffs: np.ndarray, rows) -> np.ndarray:
    out = np.zeros(len(rows))
    for a, g in enumerate(rows):
        if g != BOUNDARY:
            out[a] = coeffs[g]
    return out


def nodal_function_errors(coeffs: np.ndarray, mesh: Mesh1D, p: int,
                          u, du) -> tuple[float, float]:
    """L2 and raw H1-seminorm errors of a nodal interior-dof expansion
    against a scalar function u with derivative du.

    Integration uses the (p+3)-point Gauss-Legendre rule per element.
    """
    xg, wg, V, dV = _element_tables(p)
    dm = dof_map(mesh, p)
    acc_l2 = 0.0
    acc_h1 = 0.0
    for tau in range(mesh.n_elements):
        x0, x1 = mesh.element(tau)
        h = x1 - x0
        xq = x0 + (xg + 1.0) * h / 2.0
        local = _local_coefficients(coeffs, dm.element_dofs[tau])
        uh = local @ V
        duh = (2.0 / h) * (local @ dV)
        acc_l2 += (h / 2.0) * np.sum(wg * (np.asarray(u(xq)) - uh) ** 2)
        acc_h1 += (h / 2.0) * np.sum(wg * (np.asarray(du(xq)) - duh) ** 2)
    return float(np.sqrt(acc_l2)), float(np.sqrt(acc_h1))


def _overlap(coeffs: np.ndarray, mesh: Mesh1D, p: int, u) -> float:
    """Quadrature of u_h * u, used for sign alignment."""
    xg, wg, V, _ = _element_tables(p)
    dm = dof_map(mesh, p)
    acc = 0.0
    for tau in range(mesh.n_elements):
        x0, x1 = mesh.element(tau)
        h = x1 - x0
        xq = x0 + (xg + 1.0) * h / 2.0
        local = _local_coefficients(coeffs, dm.element_dofs[tau])
        acc += (h / 2.0) * np.sum(wg * (local @ V) * np.asarray(u(xq)))
    return acc


def eigenfunction_errors(spectrum: Spectrum, exact: list[ExactEigenpair],
                         mesh: Mesh1D, p: int) -> tuple[list, list]:
    """Per-index L2 errors and eigenvalue-normalized H1 seminorm errors.

    Each discrete eigenvector is expanded in the nodal basis, normalized
    to unit L2 norm with the consistent mass, and sign-aligned with its
    exact counterpart. Indices whose discrete eigenvalue is not simple
    (relative gap below 1e-8) get a None marker instead of a number.
    """
    count = min(len(spectrum), len(exact))
    values = spectrum.eigenvalues
    skip = np.zeros(count, dtype=bool)
    for j in range(count):
        scale = max(abs(values[j]), 1e-300)
        if j > 0 and abs(values[j] - values[j - 1]) / scale < MULTIPLICITY_GAP:
            skip[j] = skip[j - 1] = True
        if j + 1 < len(spectrum) and abs(values[j + 1] - values[j]) / scale < MULTIPLICITY_GAP:
            skip[j] = True
    mass = assemble_mass(mesh, p, Family.GAUSS_LEGENDRE)
    l2_out: list = []
    h1_out: list = []
    for j in range(count):
        if skip[j]:
            l2_out.append(None)
            h1_out.append(None)
            continue
        pair = exact[j]
        coeffs = np.array(spectrum.eigenvectors[:, j])
        coeffs /= np.sqrt(coeffs @ mass @ coeffs)
        if _overlap(coeffs, mesh, p, pair.eigenfunction) < 0:
            coeffs = -coeffs
        l2, h1_raw = nodal_function_errors(coeffs, mesh, p, pair.eigenfunction,
                                           pair.eigenfunction_grad)
        l2_out.append(l2)
        h1_out.append(h1_raw / pair.value)
    return l2_out, h1_out
