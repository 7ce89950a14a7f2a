"""Dissipative and dephasing dynamics of the coupled cavities.

The generator acting on vectorised (row-major) 6x6 density matrices is

    L[rho] = -i[H, rho]
             + sum_ij (gamma_ij/2) (2 a_j rho a_i^dag - a_i^dag a_j rho
                                    - rho a_i^dag a_j)
             + (gamma_d/2) (D[n1] + D[n2]) rho,

with D[o]rho = 2 o rho o^dag - o^dag o rho - rho o^dag o.  gamma_11 and
gamma_22 are the cavity decay rates, gamma_12 = gamma_21 the cross-damping
rates from interference of the two decay channels, and gamma_d the
dephasing rate.  Propagation is fixed-step RK4 on the vectorised equation;
matrix-exponential propagation of the same superoperator serves as the
accuracy oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock, numerics
from .coherent import InitialAngles
from .errors import (
    DegenerateSteadyStateError,
    NumericsError,
    UnsupportedRegimeError,
    ValidationError,
)

TRACE_TOL = 1e-9
HERM_TOL = 1e-10
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class DecayRates:
    """Cavity decay, cross-damping, and dephasing rates.

    Complete positivity of the damping matrix [[g11, g12], [g21, g22]]
    requires g12 = g21 and g12^2 <= g11*g22; both are enforced here
    (an asymmetric pair would break Hermiticity of the evolution).
    """

    gamma11: float = 0.0
    gamma22: float = 0.0
    gamma12: float = 0.0
    gamma21: float = 0.0
    gamma_d: float = 0.0

    def __post_init__(self):
        for name in ("gamma11", "gamma22", "gamma_d"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)}")
        scale = max(1.0, abs(self.gamma12), abs(self.gamma21))
        if abs(self.gamma12 - self.gamma21) > 1e-12 * scale:
            raise ValidationError(
                "cross-damping rates must be equal (gamma12 = gamma21) to "
                "preserve Hermiticity of the master equation"
            )
        bound = self.gamma11 * self.gamma22
        if abs(self.gamma12 * self.gamma21) > bound + 1e-12 * max(1.0, bound):
            raise ValidationError(
                "|gamma12*gamma21| exceeds gamma11*gamma22; damping matrix "
                "is not completely positive"
            )

    @classmethod
    def maximal_interference(cls, gamma11: float, gamma22: float | None = None,
                             gamma_d: float = 0.0) -> "DecayRates":
        """Rates with the cross-damping tie gamma12 = gamma21 = sqrt(g11 g22)."""
        if gamma22 is None:
            gamma22 = gamma11
        cross = math.sqrt(gamma11 * gamma22)
        return cls(gamma11, gamma22, cross, cross, gamma_d)

    @property
    def gamma_max(self) -> float:
        return max(self.gamma11, self.gamma22)


def vectorize(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(fock.DIM * fock.DIM)

def unvectorize(vec) -> np.ndarray:
    return np.asarray(vec, dtype=complex).reshape(fock.DIM, fock.DIM)


def build_liouvillian(p: fock.SystemParams, rates: DecayRates) -> np.ndarray:
    """36x36 generator acting on row-major vectorised density matrices.

    Trace preservation (the identity is a left null vector) is verified at
    build time to 1e-12.
    """
    eye = np.eye(fock.DIM, dtype=complex)
    h = fock.hamiltonian(p)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))

    a = {1: fock.annihilate(1), 2: fock.annihilate(2)}
    gammas = {
        (1, 1): rates.gamma11,
        (2, 2): rates.gamma22,
        (1, 2): rates.gamma12,
        (2, 1): rates.gamma21,
    }
    for (i, j), g in gammas.items():
        if g == 0.0:
            continue
        ai_dag = a[i].conj().T
        nij = ai_dag @ a[j]
        lv += (g / 2.0) * (
            2.0 * np.kron(a[j], ai_dag.T)
            - np.kron(nij, eye)
            - np.kron(eye, nij.T)
        )
    if rates.gamma_d > 0.0:
        for m in (1, 2):
            n = fock.number_op(m)
            lv += (rates.gamma_d / 2.0) * (
                2.0 * np.kron(n, n.T) - np.kron(n @ n, eye) - np.kron(eye, (n @ n).T)
            )

    defect = float(np.max(np.abs(vectorize(eye) @ lv)))
    if defect > 1e-12 * max(1.0, float(np.max(np.abs(lv)))):
        raise NumericsError(f"Liouvillian is not trace preserving (defect {defect:.3e})")
    return lv


def validate_density(rho, trace_tol=TRACE_TOL, herm_tol=HERM_TOL,
                     positivity_tol=POSITIVITY_TOL):
    """Check Hermiticity, unit trace, and positivity of a density matrix."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (fock.DIM, fock.DIM):
        raise ValidationError(f"density matrix must be 6x6, got {r.shape}")
    herm = float(np.max(np.abs(r - r.conj().T)))
    if herm > herm_tol:
        raise ValidationError(f"density matrix not Hermitian (defect {herm:.3e})")
    tr = complex(np.trace(r))
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"density matrix trace {tr:.12g} != 1")
    lowest = float(np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min())
    if lowest < -positivity_tol:
        raise ValidationError(f"density matrix has eigenvalue {lowest:.3e} < 0")


def _density_drift(vec) -> float:
    """Max of trace/Hermiticity/positivity drifts, each relative to its tolerance."""
    rho = unvectorize(vec)
    d_trace = abs(complex(np.trace(rho)) - 1.0) / TRACE_TOL
    d_herm = float(np.max(np.abs(rho - rho.conj().T))) / HERM_TOL
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    d_pos = max(0.0, -lowest) / POSITIVITY_TOL
    return max(d_trace, d_herm, d_pos)


def propagate_density(liouvillian, rho0, t_end: float, dt: float,
                      check: bool = True) -> np.ndarray:
    """Propagate rho0 to t_end with fixed-step RK4 on the vectorised equation.

    Trace, Hermiticity and positivity are checked after every step when
    check is set; drift raises IntegrationError with the failure time.
    """
    validate_density(rho0)
    lv = np.asarray(liouvillian, dtype=complex)
    rhs = lambda t, y: lv @ y
    invariant = (lambda t, y: _density_drift(y)) if check else None
    vec = numerics.integrate_ode(rhs, vectorize(rho0), t_end, dt, invariant=invariant)
    return unvectorize(vec)


def density_trajectory(liouvillian, rho0, times, dt: float,
                       check: bool = True) -> np.ndarray:
    """Density matrices at the given sample times (ascending, from 0)."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValidationError("sample times must be ascending and non-negative")
    validate_density(rho0)
    lv = np.asarray(liouvillian, dtype=complex)
    rhs = lambda t, y: lv @ y
    invariant = (lambda t, y: _density_drift(y)) if check else None

    out = np.empty((times.size, fock.DIM, fock.DIM), dtype=complex)
    vec = vectorize(rho0)
    t_prev = 0.0
    for idx, t in enumerate(times):
        gap = t - t_prev
        if gap > 0:
            vec = numerics.integrate_ode(rhs, vec, gap, dt, invariant=invariant)
        out[idx] = unvectorize(vec)
        t_prev = t
    return out


def default_figure_dt(p: fock.SystemParams, rates: DecayRates) -> float:
    """Integration step resolving the fastest of J, gamma, gamma_d by 1e2.

    Cavity decay feeds lower photon-number sectors, and the transient
    eigenvalue dip of the RK4 local error must stay inside the positivity
    tolerance; the coupling scale is resolved four times finer there.
    """
    j_resolution = 2.5e-3 if rates.gamma_max > 0 else 1e-2
    candidates = []
    if p.J != 0:
        candidates.append(j_resolution / abs(p.J))
    if rates.gamma_max > 0:
        candidates.append(1e-2 / rates.gamma_max)
    if rates.gamma_d > 0:
        candidates.append(1e-2 / rates.gamma_d)
    if not candidates:
        candidates = [1e-2 / max(abs(p.omega1), abs(p.omega2), 1.0)]
    return min(candidates)


@dataclass(frozen=True)
class MomentVector:
    """First-order moments <a1^dag a1>, <a1^dag a2>, <a1 a2^dag>, <a2^dag a2>."""

    n1: float
    x12: complex
    x21: complex
    n2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.n1, self.x12, self.x21, self.n2], dtype=complex)


def moments_from_density(rho) -> MomentVector:
    r = np.asarray(rho, dtype=complex)
    a1, a2 = fock.annihilate(1), fock.annihilate(2)
    # lowering factor first keeps products exact on the truncated space
    x12_op = a1.conj().T @ a2
    x21_op = a2.conj().T @ a1
    return MomentVector(
        n1=float(np.real(np.trace(r @ fock.number_op(1)))),
        x12=complex(np.trace(r @ x12_op)),
        x21=complex(np.trace(r @ x21_op)),
        n2=float(np.real(np.trace(r @ fock.number_op(2)))),
    )


def moment_flow_closed(J: float, gamma, m0: MomentVector, t):
    """Closed-form moment flow for resonant linear cavities with the
    symmetric-rate tie gamma11 = gamma22 = gamma12 = gamma21 = gamma.

    The eigenvalues of the moment matrix are 2iJ - gamma, -2iJ - gamma,
    0 and -2*gamma, and the solution mixes the initial moments through

        <n1>_t = (X1 n1 + X2 x12 + X3 x21 + X4 n2) / 4

    with X1..X4 the signed sums of the four exponentials.  Accepts scalar
    or array t; pass a DecayRates to have the symmetry tie checked.
    """
    if isinstance(gamma, DecayRates):
        r = gamma
        same = (r.gamma11 == r.gamma22 == r.gamma12 == r.gamma21)
        if not same:
            raise UnsupportedRegimeError(
                "closed-form moment flow needs gamma11 = gamma22 = gamma12 "
                "= gamma21; use propagate_density for asymmetric rates"
            )
        gamma = r.gamma11
    gamma = float(gamma)
    t = np.asarray(t, dtype=float)

    e1 = np.exp((2j * J - gamma) * t)
    e2 = np.exp((-2j * J - gamma) * t)
    e3 = np.ones_like(e1)
    e4 = np.exp(-2.0 * gamma * t)
    x1 = e1 + e2 + e3 + e4
    x2 = -e1 + e2 - e3 + e4
    x3 = e1 - e2 - e3 + e4
    x4 = -e1 - e2 + e3 + e4

    n1_0, x12_0, x21_0, n2_0 = m0.as_array()
    n1 = (x1 * n1_0 + x2 * x12_0 + x3 * x21_0 + x4 * n2_0) / 4.0
    x12 = (x2 * n1_0 + x1 * x12_0 + x4 * x21_0 + x3 * n2_0) / 4.0
    x21 = (x3 * n1_0 + x4 * x12_0 + x1 * x21_0 + x2 * n2_0) / 4.0
    n2 = (x4 * n1_0 + x3 * x12_0 + x2 * x21_0 + x1 * n2_0) / 4.0
    if t.ndim == 0:
        return MomentVector(float(n1.real), complex(x12), complex(x21), float(n2.real))
    return MomentVector(n1.real, x12, x21, n2.real)


def coherence_state(angles: InitialAngles, epsilon: float) -> np.ndarray:
    """Initial density matrix interpolating between coherent and mixed.

    rho = epsilon |psi><psi| + (1 - epsilon) M with M the same-weight
    incoherent mixture of |20> and |02>; epsilon is the degree of
    coherence retained in the preparation.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    psi = np.zeros(fock.DIM, dtype=complex)
    state = angles.to_state()
    psi[3], psi[4], psi[5] = state.c20, state.c11, state.c02
    rho = epsilon * np.outer(psi, psi.conj())
    rho[3, 3] += (1.0 - epsilon) * math.cos(angles.theta) ** 2
    rho[5, 5] += (1.0 - epsilon) * math.sin(angles.theta) ** 2
    return rho


def pure_density(state_vector) -> np.ndarray:
    """|psi><psi| for a 6-component (or two-photon 3-component) vector."""
    v = np.asarray(state_vector, dtype=complex).ravel()
    if v.size == 3:
        full = np.zeros(fock.DIM, dtype=complex)
        full[3:] = v
        v = full
    if v.size != fock.DIM:
        raise ValidationError(f"state vector must have 3 or 6 components, got {v.size}")
    return np.outer(v, v.conj())


def steady_state(liouvillian, sector: int | None = None,
                 null_rtol: float = 1e-10) -> np.ndarray:
    """Trace-one null state of the generator.

    The full kernel is generically degenerate when several photon-number
    sectors host their own equilibrium (dephasing conserves photon
    number), so ``sector`` restricts the search to density matrices
    supported on one total-photon-number sector.  A kernel of dimension
    other than one raises; no arbitrary choice is made.
    """
    lv = np.asarray(liouvillian, dtype=complex)
    if sector is None:
        cols = np.arange(lv.shape[1])
    else:
        idx = [i for i, s in enumerate(fock.SECTORS) if s == sector]
        if not idx:
            raise ValidationError(f"no basis states with total photon number {sector}")
        cols = np.array([i * fock.DIM + j for i in idx for j in idx])

    sub = lv[:, cols]
    _, svals, vh = np.linalg.svd(sub)
    tol = null_rtol * max(1.0, float(svals[0]) if svals.size else 1.0)
    kernel = vh[svals < tol].conj() if svals.size else vh.conj()
    n_null = kernel.shape[0] + max(0, sub.shape[1] - svals.size)
    if n_null == 0:
        raise NumericsError("generator has no steady state in the requested sector")
    if n_null > 1:
        raise DegenerateSteadyStateError(n_null)

    vec = np.zeros(lv.shape[1], dtype=complex)
    vec[cols] = kernel[0]
    rho = unvectorize(vec)
    herm = 0.5 * (rho + rho.conj().T)
    anti = 0.5 * (rho - rho.conj().T) / 1j
    rho = herm if np.linalg.norm(herm) >= np.linalg.norm(anti) else anti
    tr = float(np.real(np.trace(rho)))
    if abs(tr) < 1e-10:
        raise NumericsError("kernel element is traceless; not a physical state")
    rho = rho / tr

    residual = float(np.max(np.abs(lv @ vectorize(rho))))
    if residual > 1e-10 * max(1.0, float(np.max(np.abs(lv)))):
        raise NumericsError(f"steady-state residual {residual:.3e} too large")
    lowest = float(np.linalg.eigvalsh(rho).min())
    if lowest < -POSITIVITY_TOL:
        raise NumericsError(f"steady-state candidate not positive ({lowest:.3e})")
    return rho
