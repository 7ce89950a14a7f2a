"""Dense complex linear-algebra and integration kernels.

All matrices in this package are tiny (at most 36x36), so these kernels
favour accuracy and reproducibility over speed: the matrix exponential is
a scaled Taylor series squared back up, and the ODE driver is a classical
fixed-step RK4 whose output is bit-for-bit identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationError, NumericsError, ValidationError

HERMITIAN_TOL = 1e-10

# Relative eigenvalue-gap threshold below which partial-fraction denominators
# lose 8+ digits; callers must switch to the expm propagator underneath this.
DEGENERACY_RTOL = 1e-8

_MAX_SERIES_TERMS = 64


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(m, name="matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    return a


def eig_hermitian(m) -> SpectralDecomp:
    """Eigendecomposition of a Hermitian matrix.

    Raises ValidationError if the input is not Hermitian within
    HERMITIAN_TOL relative to its largest entry.
    """
    a = _as_square(m)
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    defect = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if defect > HERMITIAN_TOL * scale:
        raise ValidationError(
            f"matrix is not Hermitian (defect {defect:.3e} > "
            f"{HERMITIAN_TOL * scale:.3e})"
        )
    eigval, eigvec = np.linalg.eigh(a)
    return SpectralDecomp(eigval, eigvec)


def relative_gap(eigenvalues) -> float:
    """Smallest pairwise eigenvalue gap over the largest magnitude."""
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    if e.size < 2:
        return np.inf
    scale = max(float(np.max(np.abs(e))), np.finfo(float).tiny)
    return float(np.min(np.diff(e))) / scale


def is_degenerate(eigenvalues, rtol: float = DEGENERACY_RTOL) -> bool:
    return relative_gap(eigenvalues) < rtol


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring of the Taylor series.

    The series is summed until the last term is below 1e-16 relative to
    the partial sum, then the result is squared back up.
    """
    a = _as_square(m)
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 1)) if a.size else 0.0
    squarings = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm))) + 1
    scaled = a / (2.0**squarings)

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, _MAX_SERIES_TERMS + 1):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) <= 1e-16 * np.linalg.norm(result, 1):
            break
    else:
        raise NumericsError("matrix exponential series did not converge")

    for _ in range(squarings):
        result = result @ result
    return result


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_end: float,
    dt: float,
    invariant: Callable[[float, np.ndarray], float] | None = None,
    invariant_tol: float = 1.0,
    estimate_error: bool = False,
):
    """Propagate dy/dt = rhs(t, y) with classical fixed-step RK4.

    The step is shrunk uniformly so an integer number of steps lands
    exactly on t_end. An optional invariant callback returning a drift
    measure is checked after every step; drift above invariant_tol raises
    IntegrationError carrying the failure time. With estimate_error=True
    the run is repeated at half the step and (result, richardson_estimate)
    is returned.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValidationError(f"t_end must be non-negative, got {t_end}")
    y0 = np.asarray(y0, dtype=complex)
    if t_end == 0:
        return (y0.copy(), 0.0) if estimate_error else y0.copy()

    n_steps = max(1, int(np.ceil(t_end / dt - 1e-12)))
    y = _rk4_run(rhs, y0, t_end, n_steps, invariant, invariant_tol)
    if not estimate_error:
        return y
    y_half = _rk4_run(rhs, y0, t_end, 2 * n_steps, None, invariant_tol)
    estimate = (16.0 / 15.0) * float(np.max(np.abs(y - y_half)))
    return y, estimate


def _rk4_run(rhs, y0, t_end, n_steps, invariant, invariant_tol):
    h = t_end / n_steps
    y = y0.copy()
    for i in range(n_steps):
        t = i * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if invariant is not None:
            t_next = (i + 1) * h
            drift = invariant(t_next, y)
            if drift > invariant_tol:
                raise IntegrationError(t_next, drift)
    return y
