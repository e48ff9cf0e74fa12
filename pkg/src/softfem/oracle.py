"""Closed-form reference quantities for the 1D/2D Dirichlet eigenproblems.

Provides the exact continuum spectra, the closed-form discrete eigenpairs
of the linear-element methods on uniform meshes, stiffness-reduction
formulas with their exact rational limits, small-mesh-size expansion
coefficients of the relative eigenvalue error, and the one-parameter
family of superconvergence-optimal parameters.

The expansion coefficients are extracted by exact rational power-series
arithmetic (the error is an even analytic function of t = j*pi*h built
from cosines), so vanishing coefficients are exact zeros rather than
numerically small numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .assembly import Method

_SERIES_TERMS = 8  # powers of t^2 carried by the series arithmetic


@dataclass(frozen=True)
class ExactEigenpair:
    """Continuum eigenpair with an L2-normalized eigenfunction."""

    index: object
    value: float
    eigenfunction: Callable
    eigenfunction_grad: Callable | None = None


@dataclass(frozen=True)
class ParameterTriple:
    """Softness and blending parameters (eta_k, eta_m, alpha).

    Negative values are legal; entries may be exact fractions when the
    caller needs exact series arithmetic.
    """

    eta_k: object = 0
    eta_m: object = 0
    alpha: object = 1


def exact_spectrum_1d(count: int) -> list[ExactEigenpair]:
    """First `count` eigenpairs of -u'' = lambda u on (0, 1), u(0)=u(1)=0.

    lambda_j = (j pi)^2 with eigenfunction sqrt(2) sin(j pi x).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    for j in range(1, count + 1):
        freq = j * math.pi
        out.append(
            ExactEigenpair(
                index=j,
                value=freq * freq,
                eigenfunction=(lambda x, f=freq: math.sqrt(2.0) * np.sin(f * np.asarray(x))),
                eigenfunction_grad=(lambda x, f=freq: math.sqrt(2.0) * f * np.cos(f * np.asarray(x))),
            )
        )
    return out


def exact_spectrum_2d(count: int) -> list[ExactEigenpair]:
    """First `count` eigenpairs of the Dirichlet Laplacian on (0, 1)^2.

    lambda_ij = (i^2 + j^2) pi^2, sorted ascending with multiplicity; the
    enumeration bound grows until the truncated list is provably complete.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    bound = math.isqrt(count) + 3
    while True:
        values = sorted(
            (i * i + j * j, i, j)
            for i in range(1, bound + 1)
            for j in range(1, bound + 1)
        )
        # everything not enumerated is >= (bound+1)^2 + 1
        if len(values) >= count and values[count - 1][0] <= (bound + 1) ** 2 + 1:
            break
        bound += 4
    out = []
    for s, i, j in values[:count]:
        fi, fj = i * math.pi, j * math.pi
        out.append(
            ExactEigenpair(
                index=(i, j),
                value=s * math.pi**2,
                eigenfunction=(lambda x, y, a=fi, b=fj:
                               2.0 * np.sin(a * np.asarray(x)) * np.sin(b * np.asarray(y))),
            )
        )
    return out


# ---------------------------------------------------------------------------
# closed-form discrete eigenpairs (linear elements, uniform mesh)
# ---------------------------------------------------------------------------


def analytic_eigenvalue_gsfembq(j: int, n_elements: int,
                                params: ParameterTriple) -> float:
    """j-th discrete eigenvalue of the linear-element method family.

    On a uniform N-element mesh of (0, 1), with t = j*pi/N:

        lambda_j = (12 N^2) (1 - 2 eta_k + 2 eta_k cos t) sin^2(t/2)
                   / (3 + 18 eta_m - alpha + (alpha - 24 eta_m) cos t
                      + 6 eta_m cos 2t)

    Specializations: alpha=1 gives gsfem; eta_m=0 gives softfembq;
    alpha=1, eta_m=0 gives softfem; all parameters neutral gives fem.
    """
    if not 1 <= j <= n_elements - 1:
        raise ValueError(f"eigenvalue index {j} out of range [1, {n_elements - 1}]")
    return float(analytic_spectrum_gsfembq(n_elements, params)[j - 1])


def analytic_spectrum_gsfembq(n_elements: int, params: ParameterTriple) -> np.ndarray:
    """All N-1 closed-form eigenvalues, ascending in the index j."""
    eta_k, eta_m, alpha = (float(params.eta_k), float(params.eta_m),
                           float(params.alpha))
    n = n_elements
    t = np.arange(1, n) * (math.pi / n)
    num = (1.0 - 2.0 * eta_k + 2.0 * eta_k * np.cos(t)) * np.sin(t / 2.0) ** 2
    den = (3.0 + 18.0 * eta_m - alpha + (alpha - 24.0 * eta_m) * np.cos(t)
           + 6.0 * eta_m * np.cos(2.0 * t))
    return 12.0 * n * n * num / den


def analytic_eigenvector(j: int, n_elements: int) -> np.ndarray:
    """Discrete sine eigenvector sin(k t_j), unit Euclidean norm.

    The eigenvectors are shared by every method of the family on uniform
    linear elements, independent of the parameters.
    """
    if not 1 <= j <= n_elements - 1:
        raise ValueError(f"eigenvector index {j} out of range [1, {n_elements - 1}]")
    k = np.arange(1, n_elements)
    v = np.sin(k * j * math.pi / n_elements)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# stiffness-reduction formulas
# ---------------------------------------------------------------------------

_RATIO_LIMITS = {
    Method.GSFEM: Fraction(17, 10),
    Method.SOFTFEMBQ: Fraction(7, 4),
    Method.GSFEMBQ: Fraction(257, 160),
}


def stiffness_ratio_formula(method: Method, h: float) -> tuple[float, Fraction]:
    """Closed-form stiffness reduction ratio rho(h) and its h->0 limit.

    The formulas hold for the superconvergence-optimal parameters of each
    method (linear elements, uniform mesh). rho(h) is the condition number
    of plain fem divided by the condition number of the method.
    """
    if not 0.0 < h < 1.0:
        raise ValueError(f"mesh size must satisfy 0 < h < 1, got {h}")
    c = math.cos(math.pi * h)
    c2 = math.cos(2.0 * math.pi * h)
    if method is Method.GSFEM:
        rho = ((5 + c) / (5 - c)) * ((2 + c) / (2 - c)) \
            * ((123 - 56 * c + c2) / (123 + 56 * c + c2))
    elif method is Method.SOFTFEMBQ:
        rho = ((9 + c) / (9 - c)) * ((2 + c) / (2 - c)) \
            * ((11 - 4 * c) / (11 + 4 * c))
    elif method is Method.GSFEMBQ:
        rho = ((2 + c) / (2 - c)) * ((95 + 31 * c) / (95 - 31 * c)) \
            * ((1179 - 688 * c + 23 * c2) / (1179 + 688 * c + 23 * c2))
    else:
        raise ValueError(f"no closed-form ratio for method {method!r}")
    return rho, _RATIO_LIMITS[method]


def stiffness_ratio_limit_family(alpha) -> Fraction:
    """h->0 reduction-ratio limit (37 - 20 alpha) / (20 - 10 alpha) along
    the optimal-parameter family; decreasing in alpha, maximal at alpha=0.
    """
    a = Fraction(alpha)
    return (37 - 20 * a) / (20 - 10 * a)


def optimal_params(alpha) -> ParameterTriple:
    """Superconvergence-optimal parameters for a given blending weight.

    eta_k = (2 alpha - 1)/12 and eta_m = (5 alpha - 4)/360 cancel the two
    leading error terms; alpha=1 gives the gsfem optimum, alpha=4/5 the
    softfembq optimum, alpha=0 the fully lumped variant.
    """
    a = Fraction(alpha)
    return ParameterTriple(eta_k=(2 * a - 1) / 12, eta_m=(5 * a - 4) / 360, alpha=a)


# superconvergence bound (constant, power of t) per optimally tuned method
SUPERCONVERGENCE_BOUNDS = {
    Method.GSFEM: (Fraction(1, 3024), 6),
    Method.SOFTFEMBQ: (Fraction(1, 1440), 6),
    Method.GSFEMBQ: (Fraction(1, 30240), 8),
}

# largest eta_m keeping the linear-element gsfem eigenvalues increasing in j
GSFEM_ETA_M_MONOTONE_LIMIT = Fraction(5, 144)


# ---------------------------------------------------------------------------
# exact power-series arithmetic in u = t^2
# ---------------------------------------------------------------------------


def _series_cos(a: int) -> list[Fraction]:
    """cos(a t) as a series in u = t^2."""
    out = []
    for m in range(_SERIES_TERMS):
        out.append(Fraction((-1) ** m * a ** (2 * m), math.factorial(2 * m)))
    return out


def _series_const(c: Fraction) -> list[Fraction]:
    return [c] + [Fraction(0)] * (_SERIES_TERMS - 1)


def _series_add(s1, s2):
    return [a + b for a, b in zip(s1, s2)]


def _series_scale(s, c: Fraction):
    return [c * a for a in s]


def _series_mul(s1, s2):
    out = [Fraction(0)] * _SERIES_TERMS
    for i, a in enumerate(s1):
        if a == 0:
            continue
        for j_, b in enumerate(s2):
            if i + j_ >= _SERIES_TERMS:
                break
            out[i + j_] += a * b
    return out


def _series_inv(s):
    if s[0] == 0:
        raise ZeroDivisionError("series has no reciprocal (zero constant term)")
    out = [Fraction(0)] * _SERIES_TERMS
    out[0] = 1 / s[0]
    for k in range(1, _SERIES_TERMS):
        out[k] = -sum(s[i] * out[k - i] for i in range(1, k + 1)) / s[0]
    return out


def _relative_error_series(params: ParameterTriple) -> list[Fraction]:
    """Series of lambda(t)/lambda_exact(t) - 1 in powers of u = t^2."""
    eta_k = Fraction(params.eta_k)
    eta_m = Fraction(params.eta_m)
    alpha = Fraction(params.alpha)
    cos1 = _series_cos(1)
    cos2 = _series_cos(2)
    one_minus_cos = _series_scale(cos1, Fraction(-1))
    one_minus_cos[0] += 1
    stiff = _series_add(_series_const(1 - 2 * eta_k), _series_scale(cos1, 2 * eta_k))
    # 12 (stiff) (1 - cos t)/2 / t^2 -> shift the u-series down one power
    numer = _series_scale(_series_mul(stiff, one_minus_cos), Fraction(6))
    numer = numer[1:] + [Fraction(0)]
    denom = _series_add(
        _series_add(_series_const(3 + 18 * eta_m - alpha),
                    _series_scale(cos1, alpha - 24 * eta_m)),
        _series_scale(cos2, 6 * eta_m),
    )
    ratio = _series_mul(numer, _series_inv(denom))
    ratio[0] -= 1
    return ratio


def taylor_leading_coefficients(params: ParameterTriple,
                                orders=(2, 4, 6, 8)) -> dict[int, Fraction]:
    """Exact coefficients of t^k in the relative eigenvalue error at t->0.

    Returns a mapping order -> Fraction for the requested even orders; a
    zero is an exact rational zero, so superconvergence conditions can be
    asserted without tolerance.
    """
    series = _relative_error_series(params)
    out = {}
    for k in orders:
        if k % 2 != 0 or k <= 0 or k // 2 >= _SERIES_TERMS:
            raise ValueError(f"unsupported expansion order {k}")
        out[k] = series[k // 2]
    return out


def spectrum_is_monotone(params: ParameterTriple, n_elements: int) -> bool:
    """Whether the closed-form eigenvalues increase with the index j."""
    values = analytic_spectrum_gsfembq(n_elements, params)
    return bool(np.all(np.diff(values) > 0))
