"""Closed-system evolution in the two-photon sector.

Two equivalent propagators are provided for the 3x3 two-photon block:

* ``evolve_closed`` evaluates the spectral closed form.  With eigenvalues
  lambda_i of -iH restricted to the sector, the propagator is
  L1(t) M^2 - L2(t) M + L3(t) I with M = -iH and L1..L3 the
  partial-fraction sums over exp(lambda_i t).  This is the route behind
  the printed amplitude expressions and the interference decomposition.
* ``evolve_expm`` applies the scaled-Taylor matrix exponential and is the
  independent oracle; it also covers (near-)degenerate spectra where the
  partial fractions lose precision.

Time maxima of observables ("max over t") are computed with a fixed
uniform grid over twenty effective Rabi periods followed by golden-section
refinement around the grid argmax, so sweeps are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock, numerics
from .errors import DegeneracyError, ValidationError

#: Fixed scan grid for time maximisation.
TIME_GRID_POINTS = 4001
#: Scan window in units of pi / J_eff.
TIME_WINDOW_FACTOR = 20.0

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class TwoPhotonState:
    """Amplitudes over |20>, |11>, |02>."""

    c20: complex
    c11: complex
    c02: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c20, self.c11, self.c02], dtype=complex)

    @classmethod
    def from_vector(cls, vec) -> "TwoPhotonState":
        v = np.asarray(vec, dtype=complex).reshape(3)
        return cls(complex(v[0]), complex(v[1]), complex(v[2]))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def populations(self):
        """(p20, p11, p02)."""
        return tuple(float(abs(c) ** 2) for c in (self.c20, self.c11, self.c02))

    def overlap(self, other: "TwoPhotonState") -> complex:
        return complex(np.vdot(self.vector, other.vector))

    def normalized(self) -> "TwoPhotonState":
        n = self.norm()
        if n == 0:
            raise ValidationError("cannot normalise the zero state")
        return TwoPhotonState.from_vector(self.vector / n)


@dataclass(frozen=True)
class InitialAngles:
    """Bloch-like angles of the localised superposition.

    Encodes cos(theta)|20> + e^{i phi} sin(theta)|02>, which has no |11>
    component: a purely localised initial condition.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValidationError(
                f"theta must lie in [0, pi/2], got {self.theta}"
            )
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))

    def to_state(self) -> TwoPhotonState:
        phase = complex(math.cos(self.phi), math.sin(self.phi))
        return TwoPhotonState(math.cos(self.theta), 0.0, phase * math.sin(self.theta))


def plus_state() -> TwoPhotonState:
    """(|20> + |02>)/sqrt(2), symmetric under photon exchange."""
    r = 1.0 / math.sqrt(2.0)
    return TwoPhotonState(r, 0.0, r)


def minus_state() -> TwoPhotonState:
    """(|20> - |02>)/sqrt(2), antisymmetric under photon exchange."""
    r = 1.0 / math.sqrt(2.0)
    return TwoPhotonState(r, 0.0, -r)


@dataclass(frozen=True)
class CoefficientSet:
    """Matrix entries of -iH on the two-photon block.

    a = -i<20|H|20>, b = -i J sqrt(2(1+k)), c = -i<11|H|11>,
    d = -i<02|H|02>.  Under the chi = omega*k tie these reduce to
    a = -2i omega1 (1+k), c = -i(omega1+omega2), d = -2i omega2 (1+k).
    """

    a: complex
    b: complex
    c: complex
    d: complex


@dataclass(frozen=True)
class LCoefficients:
    """Partial-fraction propagator weights and sector eigenvalues of -iH."""

    l1: complex
    l2: complex
    l3: complex
    lambdas: tuple

    def __iter__(self):
        return iter((self.l1, self.l2, self.l3))


def effective_coupling(p: fock.SystemParams) -> float:
    """Two-photon Rabi coupling J sqrt(2(1+k))."""
    return p.J * math.sqrt(2.0 * (1.0 + p.k))


def coefficient_set(p: fock.SystemParams) -> CoefficientSet:
    block = fock.two_photon_block(p)
    return CoefficientSet(
        a=-1j * block[0, 0], b=-1j * block[0, 1], c=-1j * block[1, 1], d=-1j * block[2, 2]
    )


def _sector_energies(p: fock.SystemParams) -> np.ndarray:
    return numerics.eig_hermitian(fock.two_photon_block(p)).eigenvalues


def _require_simple_spectrum(energies):
    gap = numerics.relative_gap(energies)
    if gap < numerics.DEGENERACY_RTOL:
        raise DegeneracyError(gap, numerics.DEGENERACY_RTOL)


def _l_values(energies, t):
    """L1, L2, L3 for scalar or array t from the three sector energies."""
    lam = -1j * np.asarray(energies, dtype=complex)
    l1 = l2 = l3 = 0.0
    for i in range(3):
        j, m = (i + 1) % 3, (i + 2) % 3
        denom = (lam[i] - lam[j]) * (lam[i] - lam[m])
        ex = np.exp(lam[i] * np.asarray(t))
        l1 = l1 + ex / denom
        l2 = l2 + ex * (lam[j] + lam[m]) / denom
        l3 = l3 + ex * (lam[j] * lam[m]) / denom
    return l1, l2, l3


def l_coefficients(p: fock.SystemParams, t: float) -> LCoefficients:
    """Propagator weights at time t; L1(0)=L2(0)=0 and L3(0)=1.

    Raises DegeneracyError when eigenvalue gaps fall below the numerics
    threshold; use evolve_expm in that case.
    """
    energies = _sector_energies(p)
    _require_simple_spectrum(energies)
    l1, l2, l3 = _l_values(energies, float(t))
    return LCoefficients(
        complex(l1), complex(l2), complex(l3), tuple(-1j * energies)
    )


def closed_propagator(p: fock.SystemParams, t: float) -> np.ndarray:
    """exp(-i H_2ph t) assembled from the partial-fraction closed form."""
    block = fock.two_photon_block(p)
    energies = _sector_energies(p)
    _require_simple_spectrum(energies)
    l1, l2, l3 = _l_values(energies, float(t))
    m = -1j * block
    return l1 * (m @ m) - l2 * m + l3 * np.eye(3)


def _check_normalized(s0: TwoPhotonState):
    if abs(s0.norm() - 1.0) > _NORM_TOL:
        raise ValidationError(
            f"initial state must be normalised (norm {s0.norm():.12f})"
        )


def _check_deformed(p: fock.SystemParams):
    if not p.is_deformed_consistent(tol=1e-9):
        raise ValidationError(
            "closed-form evolution requires the chi_m = omega_m*k tie; "
            "use evolve_expm for independent Kerr strengths"
        )


def evolve_closed(p: fock.SystemParams, s0: TwoPhotonState, t: float) -> TwoPhotonState:
    """Evolve a two-photon state with the spectral closed form.

    Requires the deformed-consistency tie chi_m = omega_m*k and a
    non-degenerate sector spectrum.
    """
    _check_normalized(s0)
    _check_deformed(p)
    return TwoPhotonState.from_vector(closed_propagator(p, t) @ s0.vector)


def evolve_expm(p: fock.SystemParams, s0: TwoPhotonState, t: float) -> TwoPhotonState:
    """Evolve with expm(-i H_2ph t); valid for any spectrum and Kerr terms."""
    _check_normalized(s0)
    u = numerics.expm(-1j * float(t) * fock.two_photon_block(p))
    return TwoPhotonState.from_vector(u @ s0.vector)


def amplitude_evaluator(p: fock.SystemParams, s0: TwoPhotonState):
    """Callable mapping an array of times to evolved amplitudes (n, 3).

    The sector spectrum is decomposed once so repeated evaluations (time
    grids, refinement steps) stay cheap.  Uses the vectorised closed form
    for simple spectra and per-time matrix exponentials near degeneracies.
    """
    block = fock.two_photon_block(p)
    energies = numerics.eig_hermitian(block).eigenvalues
    vec = s0.vector
    if numerics.is_degenerate(energies):
        def evaluate_expm(times):
            times = np.asarray(times, dtype=float)
            out = np.empty((times.size, 3), dtype=complex)
            for i, t in enumerate(times.ravel()):
                out[i] = numerics.expm(-1j * t * block) @ vec
            return out

        return evaluate_expm

    m = -1j * block
    u1 = m @ vec
    u2 = m @ u1

    def evaluate(times):
        l1, l2, l3 = _l_values(energies, np.asarray(times, dtype=float))
        return (
            np.multiply.outer(l1, u2)
            - np.multiply.outer(l2, u1)
            + np.multiply.outer(l3, vec)
        )

    return evaluate


def amplitude_trajectory(p: fock.SystemParams, s0: TwoPhotonState, times) -> np.ndarray:
    """Amplitudes (len(times), 3) of the evolved state at each time."""
    return amplitude_evaluator(p, s0)(times)


def transition_amplitudes(p: fock.SystemParams, t: float):
    """Amplitudes for |20> -> |11> and |02> -> |11> at time t.

    These two interfere with the relative phase of the initial
    superposition; they have equal magnitude at resonance.
    """
    cs = coefficient_set(p)
    lc = l_coefficients(p, t)
    amp_20 = lc.l1 * (cs.a * cs.b + cs.b * cs.c) - lc.l2 * cs.b
    amp_02 = lc.l1 * (cs.b * cs.d + cs.b * cs.c) - lc.l2 * cs.b
    return complex(amp_20), complex(amp_02)


def delocalisation_probability(p: fock.SystemParams, angles: InitialAngles, t):
    """P11(t) = |<11|psi(t)>|^2 for the localised initial state.

    Accepts a scalar time or an array of times.
    """
    s0 = angles.to_state()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    p11 = np.abs(amplitude_trajectory(p, s0, t_arr)[:, 1]) ** 2
    return float(p11[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else p11


def average_energy(p: fock.SystemParams, label: str) -> float:
    """<H> in a two-photon basis ket ('20', '11' or '02').

    Under the deformed tie: 2 omega1 (1+k), omega1+omega2, 2 omega2 (1+k).
    """
    if label not in ("20", "11", "02"):
        raise ValidationError(f"label must be '20', '11' or '02', got {label!r}")
    block = fock.two_photon_block(p)
    return float(block[("20", "11", "02").index(label), ("20", "11", "02").index(label)])


def resonance_detuning(initial: str, p: fock.SystemParams, mode: str) -> float:
    """Detuning that makes <H> equal in the initial ket and |11>.

    For the deformed coupling the condition is delta = -2 k omega1 when
    starting from |20> and delta = +2 k omega2 from |02>; for Kerr-only
    cavities it is delta = -2 chi1 and delta = +2 chi2 respectively.
    The returned detuning is expressed through the occupied cavity's
    parameters; the caller retunes the other cavity.
    """
    if initial == "11":
        raise ValidationError("|11> is the target state, not a localised initial state")
    if initial not in ("20", "02"):
        raise ValidationError(f"initial must be '20' or '02', got {initial!r}")
    if mode == "deformed":
        return -2.0 * p.k * p.omega1 if initial == "20" else 2.0 * p.k * p.omega2
    if mode == "kerr_only":
        return -2.0 * p.chi1 if initial == "20" else 2.0 * p.chi2
    raise ValidationError(f"mode must be 'deformed' or 'kerr_only', got {mode!r}")


def default_time_window(p: fock.SystemParams) -> float:
    j_eff = effective_coupling(p)
    if j_eff == 0.0:
        raise ValidationError("time window undefined for uncoupled cavities (J = 0)")
    return TIME_WINDOW_FACTOR * math.pi / j_eff


def scan_maximum(f, t_end: float, n_grid: int = TIME_GRID_POINTS):
    """Maximise f over [0, t_end]: uniform grid then golden-section refine.

    f must accept an array of times and return an array of values.
    Returns (t_at_max, max_value); deterministic for fixed inputs.
    """
    ts = np.linspace(0.0, t_end, n_grid)
    vals = np.asarray(f(ts), dtype=float)
    i = int(np.argmax(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, n_grid - 1)]
    t_best, v_best = _golden_max(lambda t: float(f(np.array([t]))[0]), lo, hi)
    if vals[i] >= v_best:
        return float(ts[i]), float(vals[i])
    return float(t_best), float(v_best)


def _golden_max(f, lo, hi, tol=1e-12):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > tol * max(1.0, abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
    t = 0.5 * (a + b)
    return t, f(t)


def max_delocalisation(
    p: fock.SystemParams,
    s0: TwoPhotonState,
    t_end: float | None = None,
    n_grid: int = TIME_GRID_POINTS,
):
    """(t_at_max, max P11) over the scan window for the given initial state."""
    if effective_coupling(p) == 0.0:
        # uncoupled cavities: populations are constant in time
        return 0.0, float(abs(s0.c11) ** 2)
    if t_end is None:
        t_end = default_time_window(p)
    evaluate = amplitude_evaluator(p, s0)
    return scan_maximum(lambda ts: np.abs(evaluate(ts)[:, 1]) ** 2, t_end, n_grid)
