"""Figure presets, parameter sweeps, and dataset export.

Every preset bakes in its parameter values (omega1 is pinned to 1 and
omega2 derived from the detuning; populations at k = 0 depend only on the
detuning and the coupling, which a regression test asserts).  Outputs are
deterministic: fixed time grids, fixed integration steps, no randomness
and no wall-clock values, so identical requests export byte-identical
files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, cavity_array, coherent, fock, metrics, open_system
from .errors import ValidationError

SCHEMA_VERSION = 1

FIGURE_IDS = (
    "fig1", "fig2", "fig3", "fig7", "fig8", "fig9a", "fig9b",
    "fig10", "fig11", "fig12",
)

OMEGA_REF = 1.0

# Detuning sweeps: step 0.005 over [-2, 2].
DELTA_GRID = np.linspace(-2.0, 2.0, 801)

# Open-system time axis: covers six time constants of the slowest decay.
OPEN_TIME_SPAN = 1200.0
OPEN_TIME_SAMPLES = 2400

EPSILON_SAMPLES = 21

# Cavity-array presets.
ARRAY_N = 29
ARRAY_R = 15
ARRAY_S = 16
ARRAY_J = 0.1
ARRAY_SNAPSHOT_TIME = 83.57
ARRAY_TIME_SPAN = 150.0
ARRAY_TIME_SAMPLES = 1501


@dataclass(frozen=True)
class FigureDataset:
    """A named numeric table plus the provenance needed to recompute it."""

    figure: str
    columns: tuple
    rows: np.ndarray
    provenance: dict

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise ValidationError(f"dataset has no column {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable over a range, everything else held fixed."""

    variable: str
    start: float
    stop: float
    count: int
    params: fock.SystemParams
    rates: open_system.DecayRates = field(default_factory=open_system.DecayRates)
    angles: coherent.InitialAngles = field(
        default_factory=lambda: coherent.InitialAngles(math.pi / 4, math.pi)
    )
    epsilon: float = 1.0

    def __post_init__(self):
        if self.variable not in ("delta", "epsilon", "time", "k", "gamma_d"):
            raise ValidationError(f"unknown sweep variable {self.variable!r}")
        if self.count < 2:
            raise ValidationError(f"sweep needs at least 2 points, got {self.count}")
        if not self.start < self.stop:
            raise ValidationError(
                f"sweep range must satisfy start < stop, got [{self.start}, {self.stop}]"
            )
        if self.variable == "epsilon" and (self.start < 0 or self.stop > 1):
            raise ValidationError("epsilon sweep must stay within [0, 1]")
        if self.variable in ("k", "gamma_d", "time") and self.start < 0:
            raise ValidationError(f"{self.variable} sweep must start at >= 0")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def _params_provenance(p: fock.SystemParams) -> dict:
    return {
        "omega1": p.omega1, "omega2": p.omega2, "chi1": p.chi1,
        "chi2": p.chi2, "k": p.k, "J": p.J,
    }


def _rates_provenance(r: open_system.DecayRates) -> dict:
    return {
        "gamma11": r.gamma11, "gamma22": r.gamma22, "gamma12": r.gamma12,
        "gamma21": r.gamma21, "gamma_d": r.gamma_d,
    }


def _provenance(figure: str, **extra) -> dict:
    prov = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "figure": figure,
        "scan_grid_points": coherent.TIME_GRID_POINTS,
        "scan_window_factor": coherent.TIME_WINDOW_FACTOR,
    }
    prov.update(extra)
    return prov


def _open_times() -> np.ndarray:
    return np.linspace(0.0, OPEN_TIME_SPAN, OPEN_TIME_SAMPLES)


def _rho55_trajectory(p, rates, rho0, times, dt) -> np.ndarray:
    lv = open_system.build_liouvillian(p, rates)
    rhos = open_system.density_trajectory(lv, rho0, times, dt)
    return np.real(rhos[:, 4, 4])


def _max_rho55_mixture(p, angles, epsilon, t_end=None):
    """Peak |11> population of the coherence-interpolated initial state.

    The state is a weighted mixture of three pure branches that evolve
    unitarily, so the population is the same weighted sum of closed-form
    branch populations.
    """
    branches = [
        (epsilon, coherent.amplitude_evaluator(p, angles.to_state())),
        ((1.0 - epsilon) * math.cos(angles.theta) ** 2,
         coherent.amplitude_evaluator(p, coherent.TwoPhotonState(1, 0, 0))),
        ((1.0 - epsilon) * math.sin(angles.theta) ** 2,
         coherent.amplitude_evaluator(p, coherent.TwoPhotonState(0, 0, 1))),
    ]
    if t_end is None:
        t_end = coherent.default_time_window(p)

    def f(ts):
        total = np.zeros_like(np.asarray(ts, dtype=float))
        for weight, evaluate in branches:
            if weight != 0.0:
                total = total + weight * np.abs(evaluate(ts)[:, 1]) ** 2
        return total

    _, value = coherent.scan_maximum(f, t_end)
    return value


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def _fig1() -> FigureDataset:
    """Peak delocalisation vs detuning for the +/- superpositions, J=0.3."""
    j = 0.3
    rows = np.empty((DELTA_GRID.size, 3))
    for i, delta in enumerate(DELTA_GRID):
        p = fock.SystemParams.linear(OMEGA_REF, j, delta)
        _, plus = coherent.max_delocalisation(p, coherent.plus_state())
        _, minus = coherent.max_delocalisation(p, coherent.minus_state())
        rows[i] = (delta, plus, minus)
    prov = _provenance(
        "fig1", J=j, k=0.0, omega1=OMEGA_REF,
        delta_grid=[float(DELTA_GRID[0]), float(DELTA_GRID[-1]), int(DELTA_GRID.size)],
        states=["plus", "minus"],
    )
    return FigureDataset("fig1", ("delta", "max_p11_plus", "max_p11_minus"), rows, prov)


def _max_p11_vs_delta(state, couplings, figure) -> FigureDataset:
    rows = np.empty((DELTA_GRID.size, 1 + len(couplings)))
    rows[:, 0] = DELTA_GRID
    for c, j in enumerate(couplings):
        for i, delta in enumerate(DELTA_GRID):
            p = fock.SystemParams.linear(OMEGA_REF, j, delta)
            _, peak = coherent.max_delocalisation(p, state)
            rows[i, 1 + c] = peak
    columns = ("delta",) + tuple(f"max_p11_J{j:g}" for j in couplings)
    prov = _provenance(
        figure, couplings=list(couplings), k=0.0, omega1=OMEGA_REF,
        delta_grid=[float(DELTA_GRID[0]), float(DELTA_GRID[-1]), int(DELTA_GRID.size)],
    )
    return FigureDataset(figure, columns, rows, prov)


def _fig2() -> FigureDataset:
    """Peak delocalisation vs detuning for the antisymmetric state.

    Complete delocalisation sits at |delta| = 2J for each coupling.
    """
    return _max_p11_vs_delta(coherent.minus_state(), (0.1, 0.4, 0.7), "fig2")


def _fig3() -> FigureDataset:
    """Peak delocalisation vs detuning for the product state |20>."""
    return _max_p11_vs_delta(coherent.TwoPhotonState(1, 0, 0), (0.1, 0.4, 0.7), "fig3")


def _fig7() -> FigureDataset:
    """Localisation decay under full cross-damping, linear vs deformed."""
    j, gamma = 0.05, 0.005
    rates = open_system.DecayRates(gamma, gamma, gamma, gamma, 0.0)
    times = _open_times()
    rho0 = open_system.pure_density(coherent.plus_state().vector)
    rows = np.empty((times.size, 3))
    rows[:, 0] = times
    for c, k in enumerate((0.0, 0.1)):
        p = fock.SystemParams.deformed(OMEGA_REF, k, j, delta=0.0)
        dt = open_system.default_figure_dt(p, rates)
        lv = open_system.build_liouvillian(p, rates)
        rhos = open_system.density_trajectory(lv, rho0, times, dt)
        rows[:, 1 + c] = np.real(rhos[:, 3, 3] + rhos[:, 5, 5])
    prov = _provenance(
        "fig7", J=j, gamma=gamma, cross_damping="equal", delta=0.0,
        k_values=[0.0, 0.1], omega1=OMEGA_REF, initial="plus",
        time_grid=[0.0, OPEN_TIME_SPAN, OPEN_TIME_SAMPLES],
        dt=open_system.default_figure_dt(
            fock.SystemParams.deformed(OMEGA_REF, 0.0, j), rates
        ),
    )
    return FigureDataset("fig7", ("t", "p_loc_k0", "p_loc_k0.1"), rows, prov)


def _dephasing_preset(figure, k_values=None, delta_values=None) -> FigureDataset:
    """rho55(t) for both +/- initial states across dephasing variants."""
    j = 0.05
    times = _open_times()
    variants = []
    if figure == "fig8":
        for gd in (0.0, 0.005, 0.05):
            variants.append((f"gd{gd:g}", 0.0, 0.0, gd))
    elif figure == "fig9a":
        for k in k_values:
            variants.append((f"k{k:g}", k, 0.0, 0.05))
    else:
        for delta in delta_values:
            variants.append((f"delta{delta:g}", 0.0, delta, 0.05))

    columns = ["t"]
    rows = np.empty((times.size, 1 + 2 * len(variants)))
    rows[:, 0] = times
    col = 1
    for state_name, state in (("minus", coherent.minus_state()),
                              ("plus", coherent.plus_state())):
        rho0 = open_system.pure_density(state.vector)
        for tag, k, delta, gd in variants:
            p = fock.SystemParams.deformed(OMEGA_REF, k, j, delta=delta)
            rates = open_system.DecayRates(gamma_d=gd)
            dt = _dephasing_dt(p, gd)
            rows[:, col] = _rho55_trajectory(p, rates, rho0, times, dt)
            columns.append(f"rho55_{state_name}_{tag}")
            col += 1
    prov = _provenance(
        figure, J=j, omega1=OMEGA_REF,
        variants=[list(v) for v in variants],
        time_grid=[0.0, OPEN_TIME_SPAN, OPEN_TIME_SAMPLES],
        states=["minus", "plus"],
    )
    return FigureDataset(figure, tuple(columns), rows, prov)


def _dephasing_dt(p, gamma_d) -> float:
    rates = open_system.DecayRates(gamma_d=gamma_d)
    return open_system.default_figure_dt(p, rates)


def _fig8() -> FigureDataset:
    """Delocalisation under dephasing rates 0, 0.005, 0.05 (saturates at 1/3)."""
    return _dephasing_preset("fig8")


def _fig9a() -> FigureDataset:
    """Dephasing with growing nonlinearity: equilibration slows down."""
    return _dephasing_preset("fig9a", k_values=(0.0, 0.1, 0.3))


def _fig9b() -> FigureDataset:
    """Dephasing with growing detuning: equilibration slows down."""
    return _dephasing_preset("fig9b", delta_values=(0.0, 0.3, -0.5))


def _fig10() -> FigureDataset:
    """Peak delocalisation vs degree of initial coherence, both phases."""
    p = fock.SystemParams.linear(OMEGA_REF, 0.05, delta=0.0)
    epsilons = np.linspace(0.0, 1.0, EPSILON_SAMPLES)
    rows = np.empty((epsilons.size, 3))
    for i, eps in enumerate(epsilons):
        pi_val = _max_rho55_mixture(p, coherent.InitialAngles(math.pi / 4, math.pi), eps)
        zero_val = _max_rho55_mixture(p, coherent.InitialAngles(math.pi / 4, 0.0), eps)
        rows[i] = (eps, pi_val, zero_val)
    prov = _provenance(
        "fig10", J=0.05, k=0.0, delta=0.0, omega1=OMEGA_REF, theta=math.pi / 4,
        epsilon_grid=[0.0, 1.0, EPSILON_SAMPLES],
    )
    return FigureDataset(
        "fig10", ("epsilon", "max_rho55_phi_pi", "max_rho55_phi_0"), rows, prov
    )


def _array_config() -> cavity_array.ArrayConfig:
    return cavity_array.ArrayConfig(ARRAY_N, OMEGA_REF, ARRAY_J)


def _fig11() -> FigureDataset:
    """Coincidence matrices at the snapshot time, flattened to (m, n, P) rows."""
    cfg = _array_config()
    panels = (
        ("p_theta0", cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, 0.0, 0.0)),
        ("p_plus", cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, math.pi / 4, 0.0)),
        ("p_minus", cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, math.pi / 4, math.pi)),
    )
    matrices = [
        cavity_array.joint_probability(cfg, init, ARRAY_SNAPSHOT_TIME)
        for _, init in panels
    ]
    rows = np.empty((cfg.n * cfg.n, 2 + len(panels)))
    idx = 0
    for m in range(1, cfg.n + 1):
        for n in range(1, cfg.n + 1):
            rows[idx, 0] = m
            rows[idx, 1] = n
            for c, mat in enumerate(matrices):
                rows[idx, 2 + c] = mat[m - 1, n - 1]
            idx += 1
    prov = _provenance(
        "fig11", N=ARRAY_N, r=ARRAY_R, s=ARRAY_S, J=ARRAY_J, omega=OMEGA_REF,
        t=ARRAY_SNAPSHOT_TIME,
        panels=[[name, init.theta, init.phi] for name, init in panels],
    )
    return FigureDataset(
        "fig11", ("m", "n") + tuple(name for name, _ in panels), rows, prov
    )


def _fig12() -> FigureDataset:
    """Delocalisation degree S(t) for localised, +/- and trapped states."""
    cfg = _array_config()
    times = np.linspace(0.0, ARRAY_TIME_SPAN, ARRAY_TIME_SAMPLES)
    amp_sets = (
        ("s_theta0", cavity_array.pair_amplitudes(
            cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, 0.0, 0.0), cfg.n)),
        ("s_plus", cavity_array.pair_amplitudes(
            cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, math.pi / 4, 0.0), cfg.n)),
        ("s_minus", cavity_array.pair_amplitudes(
            cavity_array.ArrayInitialState(ARRAY_R, ARRAY_S, math.pi / 4, math.pi), cfg.n)),
        ("s_trapped", cavity_array.trapped_state(cfg.n)),
    )
    rows = np.empty((times.size, 1 + len(amp_sets)))
    rows[:, 0] = times
    for i, t in enumerate(times):
        g = cavity_array.green(cfg, t)
        for c, (_, amps) in enumerate(amp_sets):
            pair = (g * amps) @ g.T
            p = 2.0 * np.abs(pair) ** 2
            rows[i, 1 + c] = 1.0 - 0.5 * float(np.trace(p))
    prov = _provenance(
        "fig12", N=ARRAY_N, r=ARRAY_R, s=ARRAY_S, J=ARRAY_J, omega=OMEGA_REF,
        time_grid=[0.0, ARRAY_TIME_SPAN, ARRAY_TIME_SAMPLES],
        states=[name for name, _ in amp_sets],
    )
    return FigureDataset(
        "fig12", ("t",) + tuple(name for name, _ in amp_sets), rows, prov
    )


_FIGURE_BUILDERS = {
    "fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig7": _fig7, "fig8": _fig8,
    "fig9a": _fig9a, "fig9b": _fig9b, "fig10": _fig10, "fig11": _fig11,
    "fig12": _fig12,
}


def run_figure(figure_id: str) -> FigureDataset:
    """Compute a preset dataset; all parameters are baked into the preset."""
    try:
        builder = _FIGURE_BUILDERS[figure_id]
    except KeyError:
        raise ValidationError(
            f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}"
        )
    return builder()


# ---------------------------------------------------------------------------
# sweeps and trajectories
# ---------------------------------------------------------------------------

def closed_population_trajectory(p, state, times) -> np.ndarray:
    """Rows (t, p20, p11, p02) under unitary evolution."""
    amps = coherent.amplitude_trajectory(p, state, times)
    pops = np.abs(amps) ** 2
    return np.column_stack([np.asarray(times, dtype=float), pops])


def master_population_trajectory(p, rates, rho0, times, dt=None) -> np.ndarray:
    """Rows (t, rho44, rho55, rho66, p_localised) from the master equation."""
    if dt is None:
        dt = open_system.default_figure_dt(p, rates)
    lv = open_system.build_liouvillian(p, rates)
    rhos = open_system.density_trajectory(lv, rho0, times, dt)
    diag = np.real(rhos[:, (3, 4, 5), (3, 4, 5)])
    return np.column_stack(
        [np.asarray(times, dtype=float), diag, diag[:, 0] + diag[:, 2]]
    )


def _equilibration_metrics(times, rho55, target=1.0 / 3.0):
    """First crossing of the halfway point toward the steady value."""
    halfway = 0.5 * (rho55[0] + target)
    crossed = rho55 >= halfway if rho55[0] < target else rho55 <= halfway
    if not np.any(crossed):
        return float("nan"), float(rho55[-1])
    return float(times[int(np.argmax(crossed))]), float(rho55[-1])


def run_sweep(spec: SweepSpec) -> FigureDataset:
    """Evaluate the sweep; one row per point, deterministic ordering."""
    grid = spec.grid()
    figure = f"sweep-{spec.variable}"
    prov = _provenance(
        figure,
        variable=spec.variable,
        range=[spec.start, spec.stop, spec.count],
        params=_params_provenance(spec.params),
        rates=_rates_provenance(spec.rates),
        theta=spec.angles.theta,
        phi=spec.angles.phi,
        epsilon=spec.epsilon,
    )

    if spec.variable == "delta":
        state = spec.angles.to_state()
        rows = np.empty((grid.size, 2))
        for i, delta in enumerate(grid):
            _, peak = coherent.max_delocalisation(spec.params.with_delta(delta), state)
            rows[i] = (delta, peak)
        return FigureDataset(figure, ("delta", "max_p11"), rows, prov)

    if spec.variable == "epsilon":
        rows = np.empty((grid.size, 2))
        for i, eps in enumerate(grid):
            rows[i] = (eps, _max_rho55_mixture(spec.params, spec.angles, eps))
        return FigureDataset(figure, ("epsilon", "max_rho55"), rows, prov)

    if spec.variable == "time":
        open_run = (
            spec.rates.gamma_max > 0 or spec.rates.gamma12 != 0
            or spec.rates.gamma_d > 0 or spec.epsilon < 1.0
        )
        if open_run:
            rho0 = open_system.coherence_state(spec.angles, spec.epsilon)
            rows = master_population_trajectory(spec.params, spec.rates, rho0, grid)
            columns = ("t", "rho44", "rho55", "rho66", "p_localised")
        else:
            rows = closed_population_trajectory(spec.params, spec.angles.to_state(), grid)
            columns = ("t", "p20", "p11", "p02")
        return FigureDataset(figure, columns, rows, prov)

    # equilibration sweeps under dephasing ("k" and "gamma_d")
    times = _open_times()
    rho0 = open_system.coherence_state(spec.angles, spec.epsilon)
    rows = np.empty((grid.size, 3))
    for i, value in enumerate(grid):
        if spec.variable == "k":
            p = fock.SystemParams.deformed(
                spec.params.omega1, value, spec.params.J, spec.params.delta
            )
            rates = spec.rates
        else:
            p = spec.params
            rates = open_system.DecayRates(
                spec.rates.gamma11, spec.rates.gamma22, spec.rates.gamma12,
                spec.rates.gamma21, value,
            )
        dt = open_system.default_figure_dt(p, rates)
        rho55 = _rho55_trajectory(p, rates, rho0, times, dt)
        t_half, final = _equilibration_metrics(times, rho55)
        rows[i] = (value, t_half, final)
    return FigureDataset(
        figure, (spec.variable, "t_half_rho55", "rho55_end"), rows, prov
    )


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def dumps_csv(ds: FigureDataset) -> str:
    lines = [",".join(ds.columns)]
    for row in np.atleast_2d(ds.rows):
        if ds.rows.size:
            lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def dumps_json(ds: FigureDataset) -> str:
    payload = {
        "figure": ds.figure,
        "provenance": ds.provenance,
        "columns": list(ds.columns),
        "rows": [[float(_fmt(v)) for v in row] for row in np.atleast_2d(ds.rows)]
        if ds.rows.size
        else [],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def export(ds: FigureDataset, format: str, path) -> None:
    """Write the dataset as CSV (12 significant digits) or JSON."""
    if format == "csv":
        text = dumps_csv(ds)
    elif format == "json":
        text = dumps_json(ds)
    else:
        raise ValidationError(f"unknown export format {format!r}; use csv or json")
    with open(path, "w", newline="\n") as handle:
        handle.write(text)


def load_json(path) -> FigureDataset:
    """Read back a JSON export."""
    with open(path) as handle:
        payload = json.load(handle)
    rows = np.asarray(payload["rows"], dtype=float)
    if rows.size == 0:
        rows = rows.reshape(0, len(payload["columns"]))
    return FigureDataset(
        payload["figure"], tuple(payload["columns"]), rows, payload["provenance"]
    )
