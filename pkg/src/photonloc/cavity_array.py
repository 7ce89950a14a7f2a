"""Two-photon dynamics in a linear chain of identical coupled cavities.

The chain Hamiltonian is quadratic, so the single-particle Green
propagator G_jl(t) = sum_k exp(-i Omega_k t) S(j,k) S(l,k) carries the
full dynamics; no two-photon basis is ever built.  S is the sine
transform of the open chain and Omega_k = omega + 2J cos(pi k / (N+1))
its normal-mode frequencies.  For an initial amplitude vector c over
"both photons in cavity q" states, the coincidence matrix is

    P_mn(t) = 2 | sum_q c_q G_mq(t) G_nq(t) |^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ArrayConfig:
    """Linear chain of n identical cavities with nearest-neighbour coupling J."""

    n: int
    omega: float
    J: float

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"need at least two cavities, got {self.n}")


@dataclass(frozen=True)
class ArrayInitialState:
    """cos(theta)|2>_r |0>_s + e^{i phi} sin(theta)|0>_r |2>_s.

    Cavity indices r and s are one-based.
    """

    r: int
    s: int
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValidationError("cavity indices are one-based")
        if self.r == self.s:
            raise ValidationError("r and s must be different cavities")


def mode_frequencies(cfg: ArrayConfig) -> np.ndarray:
    """Normal-mode frequencies Omega_k, k = 1..n."""
    k = np.arange(1, cfg.n + 1)
    return cfg.omega + 2.0 * cfg.J * np.cos(np.pi * k / (cfg.n + 1))


def sine_transform(n: int) -> np.ndarray:
    """Orthogonal sine-transform matrix S(j,k) of the open chain."""
    j = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(j, j) * np.pi / (n + 1))


def green(cfg: ArrayConfig, t: float) -> np.ndarray:
    """Unitary single-particle propagator G(t); G(0) is the identity."""
    if t < 0:
        raise ValidationError(f"time must be non-negative, got {t}")
    s = sine_transform(cfg.n)
    phases = np.exp(-1j * mode_frequencies(cfg) * float(t))
    return (s * phases) @ s


def pair_amplitudes(init: ArrayInitialState, n: int) -> np.ndarray:
    """Amplitude vector over doubly-occupied cavities for the two-site state."""
    if init.r > n or init.s > n:
        raise ValidationError(f"cavity indices must be <= {n}")
    c = np.zeros(n, dtype=complex)
    c[init.r - 1] = math.cos(init.theta)
    c[init.s - 1] = complex(math.cos(init.phi), math.sin(init.phi)) * math.sin(init.theta)
    return c


def trapped_state(n: int) -> np.ndarray:
    """Alternating-sign superposition of doubly-occupied cavities.

    Destructive interference between transition paths keeps this state
    localised under the chain dynamics.
    """
    if n < 2:
        raise ValidationError(f"need at least two cavities, got {n}")
    signs = np.array([(-1.0) ** i for i in range(n)])
    return signs / math.sqrt(n)


def joint_probability_from_amplitudes(cfg: ArrayConfig, amplitudes, t: float) -> np.ndarray:
    """Coincidence matrix P_mn(t) for an amplitude vector over pair states."""
    c = np.asarray(amplitudes, dtype=complex)
    if c.shape != (cfg.n,):
        raise ValidationError(f"amplitude vector must have length {cfg.n}")
    g = green(cfg, t)
    pair = (g * c) @ g.T
    return 2.0 * np.abs(pair) ** 2


def joint_probability(cfg: ArrayConfig, init: ArrayInitialState, t: float) -> np.ndarray:
    """Coincidence matrix for the two-site localised initial state.

    Symmetric and non-negative; its entries sum to 2 (one ordered pair
    of photons).
    """
    return joint_probability_from_amplitudes(cfg, pair_amplitudes(init, cfg.n), t)


def delocalisation_degree(p_matrix) -> float:
    """S = 1 - (1/2) sum_n P_nn: probability the photons sit in different cavities."""
    p = np.asarray(p_matrix, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValidationError(f"coincidence matrix must be square, got {p.shape}")
    return 1.0 - 0.5 * float(np.trace(p))


def mean_photon_numbers(cfg: ArrayConfig, amplitudes, t: float) -> np.ndarray:
    """<n_m>(t) from the propagated first moments: 2 sum_q |c_q|^2 |G_mq|^2."""
    c = np.asarray(amplitudes, dtype=complex)
    g = green(cfg, t)
    return 2.0 * (np.abs(g) ** 2) @ (np.abs(c) ** 2)


def delocalisation_trajectory(cfg: ArrayConfig, amplitudes, times) -> np.ndarray:
    """S(t) sampled at the given times."""
    return np.array(
        [
            delocalisation_degree(joint_probability_from_amplitudes(cfg, amplitudes, t))
            for t in np.asarray(times, dtype=float)
        ]
    )
