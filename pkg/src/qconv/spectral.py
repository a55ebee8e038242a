"""Spectra, condition numbers, deconvolution, and odd inverse-polynomial degree search.

The polynomial side stands in for QSVT: instead of phase factors we fit an
odd Chebyshev approximant to a scaled ``1/x`` and apply it through an exact
eigendecomposition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev
from scipy.fft import dct

from qconv.errors import CapacityError, DataError, NotInvertibleError, PromiseViolationError
from qconv.shift_algebra import (
    as_vector,
    circular_convolve,
    convolution_matrix,
    num_qubits,
    reversal_matrix,
    symmetrized_operator,
)

SINGULAR_RTOL = 1e-12
GRID_POINTS = 10_000
MAX_DEGREE = 100_000


class Route(str, enum.Enum):
    HERMITIAN = "hermitian"
    NORMAL_EQUATIONS = "normal"


def hermiticity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def _kappa(values: np.ndarray) -> float:
    top, bottom = float(np.max(values)), float(np.min(values))
    if bottom < SINGULAR_RTOL * top:
        return math.inf
    return top / bottom


@dataclass(frozen=True)
class SpectrumReport:
    singular_values: np.ndarray
    eigenvalues: np.ndarray | None
    kappa: float
    hermiticity_defect: float

    @property
    def singular(self) -> bool:
        return math.isinf(self.kappa)


def spectrum(b, n: int) -> SpectrumReport:
    """Singular values of the circulant and, for real kernels, eigenvalues of its symmetrized form."""
    b = as_vector(b, n)
    h = symmetrized_operator(b, n)
    sv = np.linalg.svd(convolution_matrix(b, n), compute_uv=False)
    eig = None
    if np.all(b.imag == 0):
        eig = np.sort(np.linalg.eigvalsh(h))[::-1]
        if np.max(np.abs(np.sort(np.abs(eig)) - np.sort(sv))) > 1e-10:
            raise DataError("eigenvalue magnitudes of H disagree with singular values of C")
    return SpectrumReport(np.sort(sv)[::-1], eig, _kappa(sv), hermiticity_defect(h))


def deconvolve_exact(b, c, pseudo_inverse: bool = False, threshold: float = SINGULAR_RTOL) -> np.ndarray:
    """Solve ``C(b) a = c`` as ``a = J H(b)^{-1} c``.

    With ``pseudo_inverse`` the singular directions of ``H`` below
    ``threshold * sigma_max`` are projected out instead of raising.
    """
    c = as_vector(c)
    n = num_qubits(c.size)
    b = as_vector(b, n)
    h = symmetrized_operator(b, n)
    u, s, vh = np.linalg.svd(h)
    kappa = _kappa(s)
    if math.isinf(kappa) or s.min() < threshold * s.max():
        if not pseudo_inverse:
            raise NotInvertibleError(f"kernel is singular (sigma_min/sigma_max = {s.min() / s.max():.3e})")
        inv_s = np.where(s >= threshold * s.max(), 1.0 / np.where(s > 0, s, 1.0), 0.0)
        return reversal_matrix(n) @ (vh.conj().T @ (inv_s * (u.conj().T @ c)))
    a = reversal_matrix(n) @ np.linalg.solve(h, c)
    residual = np.max(np.abs(circular_convolve(a, b) - c))
    if residual > 1e-8 * kappa * max(1.0, float(np.max(np.abs(c)))):
        raise DataError(f"deconvolution residual {residual:.3e} exceeds tolerance")
    return a


# --- inverse polynomials ----------------------------------------------------


@dataclass(frozen=True)
class InversePolynomial:
    """Odd ``p(x) = x q(x^2)`` approximating ``(1/k)/x`` on ``[1/k, 1]`` with ``k = kappa_eff``.

    ``coefficients`` are Chebyshev coefficients of ``q`` in the variable
    ``t`` that maps ``x^2 in [1/k^2, 1]`` onto ``[-1, 1]``.
    """

    degree: int
    coefficients: np.ndarray
    kappa: float
    kappa_eff: float
    eps: float
    achieved_sup_error: float
    route: Route

    @property
    def lower(self) -> float:
        return 1.0 / self.kappa_eff

    def __call__(self, xs) -> np.ndarray:
        return _evaluate(self.coefficients, self.kappa_eff, np.asarray(xs, dtype=float))


def _to_t(y: np.ndarray, kappa_eff: float) -> np.ndarray:
    lo2 = kappa_eff**-2
    if kappa_eff == 1.0:
        return np.zeros_like(y)
    return (2 * y - 1 - lo2) / (1 - lo2)


def _evaluate(coeffs: np.ndarray, kappa_eff: float, xs: np.ndarray) -> np.ndarray:
    return xs * chebyshev.chebval(_to_t(xs * xs, kappa_eff), coeffs)


def _fit(kappa_eff: float, half_degree: int) -> np.ndarray:
    """Discrete least-squares Chebyshev fit of ``q(y) = 1/(k y)`` on ``[1/k^2, 1]``.

    Sampling at ``2 (D + 1)`` Chebyshev-Gauss nodes makes the normal
    equations diagonal, so the fit reduces to a truncated DCT.
    """
    m = 2 * (half_degree + 1)
    lo2 = kappa_eff**-2
    t = np.cos(np.pi * (np.arange(m) + 0.5) / m)
    y = 0.5 * (1 - lo2) * t + 0.5 * (1 + lo2)
    coeffs = dct(1.0 / (kappa_eff * y), type=2) / m
    coeffs[0] /= 2
    return coeffs[: half_degree + 1]


def _grid(kappa_eff: float) -> np.ndarray:
    lo = 1.0 / kappa_eff
    i = np.arange(GRID_POINTS)
    return 0.5 * (1 - lo) * np.cos(np.pi * i / (GRID_POINTS - 1)) + 0.5 * (1 + lo)


def _sup_error(coeffs: np.ndarray, kappa_eff: float, grid: np.ndarray) -> float:
    return float(np.max(np.abs(_evaluate(coeffs, kappa_eff, grid) - 1.0 / (kappa_eff * grid))))


def inverse_poly_degree(kappa: float, eps: float, route: Route | str = Route.HERMITIAN) -> InversePolynomial:
    """Smallest odd degree whose fit meets ``sup |p - (1/k)/x| <= eps/k`` on the promised interval.

    The normal-equations route works on squared singular values, so its
    interval is ``[1/kappa^2, 1]``. Degrees are found by doubling the half
    degree until the tolerance holds, then bisecting.
    """
    route = Route(route)
    if not kappa >= 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    kappa_eff = float(kappa if route is Route.HERMITIAN else kappa * kappa)
    grid = _grid(kappa_eff)
    tol = eps / kappa_eff

    def attempt(d_half: int):
        coeffs = _fit(kappa_eff, d_half)
        return coeffs, _sup_error(coeffs, kappa_eff, grid)

    def done(d_half, coeffs, err):
        return InversePolynomial(2 * d_half + 1, coeffs, float(kappa), kappa_eff, eps, err, route)

    coeffs, err = attempt(0)
    if err <= tol:
        return done(0, coeffs, err)
    lo, hi = 0, 1
    while True:
        if 2 * hi + 1 > MAX_DEGREE:
            raise CapacityError(f"degree search exceeded {MAX_DEGREE}")
        coeffs, err = attempt(hi)
        if err <= tol:
            break
        lo, hi = hi, 2 * hi
    best = (hi, coeffs, err)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        coeffs, err = attempt(mid)
        if err <= tol:
            hi, best = mid, (mid, coeffs, err)
        else:
            lo = mid
    return done(*best)


def identity_polynomial() -> InversePolynomial:
    """``p(x) = x`` with no excluded interval around zero."""
    return InversePolynomial(1, np.array([1.0]), 1.0, math.inf, 0.5, 0.0, Route.HERMITIAN)


def apply_matrix_polynomial(
    b, n: int, poly: InversePolynomial, c, project_below: bool = False
) -> tuple[np.ndarray, float]:
    """Evaluate ``p(H / |H|_2) c`` by functional calculus on the eigendecomposition.

    Returns the vector and the scale ``|H|_2`` used. Eigenvalues with
    magnitude below ``1 / kappa_eff`` violate the inversion promise; with
    ``project_below`` their eigenspaces are dropped instead.
    """
    b = as_vector(b, n)
    if np.any(b.imag != 0):
        raise ValueError("functional calculus on H requires a real kernel")
    c = as_vector(c, n)
    lam, vecs = np.linalg.eigh(symmetrized_operator(b, n).real)
    scale = float(np.max(np.abs(lam)))
    lam = lam / scale
    inside = np.abs(lam) < poly.lower * (1 - 1e-9)
    if np.any(inside) and not project_below:
        raise PromiseViolationError(
            f"eigenvalue {lam[inside][0]:.3e} lies inside (-{poly.lower:.3e}, {poly.lower:.3e})"
        )
    values = np.where(inside, 0.0, poly(lam))
    return vecs @ (values * (vecs.T @ c)), scale


def deconvolve_polynomial(b, c, eps: float, route: Route | str = Route.HERMITIAN) -> tuple[np.ndarray, InversePolynomial]:
    """Approximate ``C(b)^{-1} c`` with an inverse polynomial of the chosen route.

    Hermitian: ``a = J (kappa / |H|) p(H/|H|) c``. Normal equations:
    ``a = (kappa^2 / |C|^2) p(C^dag C / |C|^2) C^dag c``.
    """
    route = Route(route)
    c = as_vector(c)
    n = num_qubits(c.size)
    b = as_vector(b, n)
    report = spectrum(b, n)
    if report.singular:
        raise NotInvertibleError("kernel is singular; no inverse polynomial exists")
    poly = inverse_poly_degree(report.kappa, eps, route)
    if route is Route.HERMITIAN:
        y, scale = apply_matrix_polynomial(b, n, poly, c)
        return reversal_matrix(n) @ (poly.kappa_eff / scale * y), poly
    cm = convolution_matrix(b, n)
    gram = cm.conj().T @ cm
    lam, vecs = np.linalg.eigh(gram)
    scale = float(np.max(lam))
    rhs = cm.conj().T @ c
    y = vecs @ (poly(lam / scale) * (vecs.conj().T @ rhs))
    return poly.kappa_eff / scale * y, poly


def fit_loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
