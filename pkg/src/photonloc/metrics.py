"""Scalar diagnostics: photon correlations, concurrence, sector probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .coherent import TwoPhotonState
from .errors import UndefinedCorrelationError, ValidationError

_G2_DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class ProbabilityReport:
    """Two-photon sector probabilities; p20 + p02 is the localised weight."""

    p20: float
    p11: float
    p02: float

    @property
    def p_localised(self) -> float:
        return self.p20 + self.p02


def _as_density(state) -> np.ndarray:
    """Accept a TwoPhotonState, a 3- or 6-vector, or a 6x6 density matrix."""
    if isinstance(state, TwoPhotonState):
        state = state.vector
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 2 and arr.shape == (fock.DIM, fock.DIM):
        return arr
    if arr.ndim == 1 and arr.size in (3, fock.DIM):
        vec = np.zeros(fock.DIM, dtype=complex)
        if arr.size == 3:
            vec[3:] = arr
        else:
            vec = arr
        return np.outer(vec, vec.conj())
    raise ValidationError(
        "expected a TwoPhotonState, a 3- or 6-component vector, or a 6x6 matrix"
    )


def g2_zero(state, cavity: int) -> float:
    """Zero-delay second-order correlation <a^dag2 a^2> / <a^dag a>^2.

    Raises UndefinedCorrelationError instead of dividing by a vanishing
    mean photon number, so sweep pipelines fail loudly.
    """
    rho = _as_density(state)
    a = fock.annihilate(cavity)
    ad = a.conj().T
    pair = ad @ ad @ a @ a
    numerator = float(np.real(np.trace(rho @ pair)))
    mean = float(np.real(np.trace(rho @ fock.number_op(cavity))))
    if mean * mean < _G2_DENOMINATOR_FLOOR:
        raise UndefinedCorrelationError(
            f"mean photon number {mean:.3e} too small for g2 in cavity {cavity}"
        )
    return numerator / (mean * mean)


def concurrence(theta: float) -> float:
    """Entanglement of cos(theta)|20> + e^{i phi}|02> superpositions.

    C(theta) = sqrt(3) |sin(theta) cos(theta)|, independent of the phase;
    maximal value sqrt(3)/2 at theta = pi/4.
    """
    return math.sqrt(3.0) * abs(math.sin(theta) * math.cos(theta))


def probabilities(state) -> ProbabilityReport:
    """Populations of |20>, |11>, |02>."""
    rho = _as_density(state)
    diag = np.real(np.diag(rho))
    return ProbabilityReport(float(diag[3]), float(diag[4]), float(diag[5]))
