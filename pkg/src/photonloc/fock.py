"""Two-cavity Fock space truncated at two total photons.

The basis is ordered |00>, |10>, |01>, |20>, |11>, |02>.  Truncation at
total photon number two is exact for everything in this package: the
Hamiltonian conserves photon number and dissipation only lowers it, so
dynamics started in the two-photon sector never leaves the space.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

#: Basis kets as (n1, n2) occupation pairs, in fixed order.
OCCUPATIONS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
LABELS = ("00", "10", "01", "20", "11", "02")
DIM = 6

#: Total photon number of each basis ket.
SECTORS = tuple(n1 + n2 for n1, n2 in OCCUPATIONS)

#: Zero-based positions of the two-photon kets |20>, |11>, |02>.
TWO_PHOTON_INDICES = (3, 4, 5)

_INDEX = {label: i for i, label in enumerate(LABELS)}


def basis_index(label: str) -> int:
    """Zero-based position of a ket given as an occupation label like '20'."""
    try:
        return _INDEX[label]
    except KeyError:
        raise ValidationError(f"unknown basis label {label!r}; expected one of {LABELS}")


@dataclass(frozen=True)
class SystemParams:
    """Two coupled cavities: frequencies, Kerr strengths, deformation, coupling.

    omega1, omega2  bare mode frequencies (hbar = 1)
    chi1, chi2      Kerr strengths of each cavity
    k               deformation parameter of the intensity-dependent coupling
    J               inter-cavity coupling strength

    The nonlinear coupling algebra closes when chi_m = omega_m * k; that tie
    is flagged by ``is_deformed_consistent`` but not forced, so Kerr-only
    parameter sets (chi independent of k) stay expressible.
    """

    omega1: float
    omega2: float
    chi1: float = 0.0
    chi2: float = 0.0
    k: float = 0.0
    J: float = 0.0

    def __post_init__(self):
        if self.k < 0:
            raise ValidationError(f"deformation k must be >= 0, got {self.k}")

    @property
    def delta(self) -> float:
        """Cavity detuning omega1 - omega2."""
        return self.omega1 - self.omega2

    def is_deformed_consistent(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.omega1 * self.k), abs(self.omega2 * self.k))
        return (
            abs(self.chi1 - self.omega1 * self.k) <= tol * scale
            and abs(self.chi2 - self.omega2 * self.k) <= tol * scale
        )

    @classmethod
    def deformed(cls, omega1: float, k: float, J: float, delta: float = 0.0):
        """Parameters with the chi_m = omega_m*k consistency tie applied."""
        omega2 = omega1 - delta
        return cls(omega1, omega2, omega1 * k, omega2 * k, k, J)

    @classmethod
    def kerr(cls, omega1: float, chi1: float, chi2: float, J: float, delta: float = 0.0):
        """Kerr cavities with a linear (k = 0) coupling."""
        return cls(omega1, omega1 - delta, chi1, chi2, 0.0, J)

    @classmethod
    def linear(cls, omega1: float, J: float, delta: float = 0.0):
        return cls(omega1, omega1 - delta, 0.0, 0.0, 0.0, J)

    def with_delta(self, delta: float) -> "SystemParams":
        """Same parameters with omega2 moved to omega1 - delta.

        The deformed tie, when present, is re-applied to chi2.
        """
        omega2 = self.omega1 - delta
        chi2 = omega2 * self.k if self.is_deformed_consistent() else self.chi2
        return replace(self, omega2=omega2, chi2=chi2)


def _check_cavity(cavity: int):
    if cavity not in (1, 2):
        raise ValidationError(f"cavity index must be 1 or 2, got {cavity}")


def annihilate(cavity: int) -> np.ndarray:
    """Truncated annihilation operator a_m with matrix elements sqrt(n)."""
    _check_cavity(cavity)
    a = np.zeros((DIM, DIM), dtype=complex)
    for col, occ in enumerate(OCCUPATIONS):
        n = occ[cavity - 1]
        if n == 0:
            continue
        target = (occ[0] - 1, occ[1]) if cavity == 1 else (occ[0], occ[1] - 1)
        a[OCCUPATIONS.index(target), col] = np.sqrt(n)
    return a


def create(cavity: int) -> np.ndarray:
    return annihilate(cavity).conj().T


def number_op(cavity: int) -> np.ndarray:
    _check_cavity(cavity)
    return np.diag([float(occ[cavity - 1]) for occ in OCCUPATIONS]).astype(complex)


def deformed_annihilate(cavity: int, k: float) -> np.ndarray:
    """Deformed ladder operator K = sqrt(1 + k a^dag a) a.

    Acts on number states as K|n> = sqrt(n) sqrt(1 + k(n-1)) |n-1>.
    """
    _check_cavity(cavity)
    if k < 0:
        raise ValidationError(f"deformation k must be >= 0, got {k}")
    a = annihilate(cavity)
    occupations = np.array([occ[cavity - 1] for occ in OCCUPATIONS], dtype=float)
    return np.diag(np.sqrt(1.0 + k * occupations)) @ a


def deformed_create(cavity: int, k: float) -> np.ndarray:
    return deformed_annihilate(cavity, k).conj().T


def total_number() -> np.ndarray:
    """Conserved total photon number diag(0, 1, 1, 2, 2, 2)."""
    return np.diag([float(s) for s in SECTORS]).astype(complex)


def hamiltonian(p: SystemParams) -> np.ndarray:
    """Full 6x6 Hamiltonian of the coupled nonlinear cavities.

    H = omega1 n1 + omega2 n2 + chi1 a1^dag2 a1^2 + chi2 a2^dag2 a2^2
        + J (K1 K2^dag + K1^dag K2)

    Block diagonal in total photon number. Operator products are ordered
    with the lowering factor applied first so intermediate states never
    leave the truncated space.
    """
    a1, a2 = annihilate(1), annihilate(2)
    a1d, a2d = a1.conj().T, a2.conj().T
    k1, k2 = deformed_annihilate(1, p.k), deformed_annihilate(2, p.k)
    k1d, k2d = k1.conj().T, k2.conj().T

    h = p.omega1 * number_op(1) + p.omega2 * number_op(2)
    h += p.chi1 * (a1d @ a1d @ a1 @ a1) + p.chi2 * (a2d @ a2d @ a2 @ a2)
    # K1 K2^dag == K2^dag K1 (different cavities commute); right factor acts first
    h += p.J * (k2d @ k1 + k1d @ k2)
    return h


def two_photon_block(p: SystemParams) -> np.ndarray:
    """Real symmetric 3x3 block of H on the |20>, |11>, |02> sector."""
    block = hamiltonian(p)[3:, 3:]
    return block.real.copy()
