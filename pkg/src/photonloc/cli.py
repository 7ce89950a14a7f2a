"""Command-line interface.

Verbs: figure, sweep, evolve, master, array.  Every verb writes a
delimited dataset (CSV or JSON) to --out or stdout and can additionally
render a quick-look image next to it with --plot.  Physics parameters are
taken from flags, falling back to a JSON config file (--config) and then
to built-in defaults; flags always win.

Exit codes: 0 success, 2 validation error, 3 numerical-invariant failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import cavity_array, coherent, experiments, fock, open_system
from .errors import NumericsError, PhotonlocError, ValidationError

OMEGA_REF = experiments.OMEGA_REF

_DEFAULTS = {
    "J": 0.05,
    "k": 0.0,
    "delta": 0.0,
    "gamma11": 0.0,
    "gamma22": 0.0,
    "cross_damping": "off",
    "gamma_d": 0.0,
    "theta": math.pi / 4,
    "phi": math.pi,
    "epsilon": 1.0,
    "N": experiments.ARRAY_N,
    "r": experiments.ARRAY_R,
    "s": experiments.ARRAY_S,
    "t_end": None,
    "dt": None,
    "chi1": None,
    "chi2": None,
}


def _add_output_options(parser):
    parser.add_argument("--out", help="output file path (default: stdout)")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    parser.add_argument(
        "--plot",
        nargs="?",
        const="auto",
        metavar="PATH",
        help="also render an image ('auto' derives the path from --out)",
    )
    parser.add_argument("--config", help="JSON file with default parameter values")


def _add_physics_options(parser, names):
    flags = {
        "J": ("--J", float, "inter-cavity coupling"),
        "k": ("--k", float, "deformation parameter (chi defaults to omega*k)"),
        "delta": ("--delta", float, "detuning omega1 - omega2 (omega1 is 1)"),
        "chi1": ("--chi1", float, "Kerr strength of cavity 1 (overrides the k tie)"),
        "chi2": ("--chi2", float, "Kerr strength of cavity 2 (overrides the k tie)"),
        "gamma11": ("--gamma11", float, "decay rate of cavity 1"),
        "gamma22": ("--gamma22", float, "decay rate of cavity 2"),
        "cross_damping": (
            "--cross-damping",
            str,
            "cross-damping: 'off', 'max' (sqrt(g11*g22)) or a number",
        ),
        "gamma_d": ("--gamma-d", float, "dephasing rate"),
        "theta": ("--theta", float, "superposition angle theta (radians)"),
        "phi": ("--phi", float, "relative phase phi (radians)"),
        "epsilon": ("--epsilon", float, "degree of initial coherence in [0, 1]"),
        "N": ("--N", int, "number of cavities in the array"),
        "r": ("--r", int, "first occupied cavity (one-based)"),
        "s": ("--s", int, "second occupied cavity (one-based)"),
        "t_end": ("--t-end", float, "final time"),
        "dt": ("--dt", float, "time step (sampling or integration, per verb)"),
    }
    for name in names:
        flag, kind, help_text = flags[name]
        parser.add_argument(flag, dest=name, type=kind, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonloc",
        description="Two-photon localisation dynamics in coupled nonlinear cavities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", help="compute a preset dataset")
    p_fig.add_argument("id", choices=experiments.FIGURE_IDS, help="figure preset id")
    _add_output_options(p_fig)

    p_sweep = sub.add_parser("sweep", help="sweep one variable over a range")
    p_sweep.add_argument(
        "--variable",
        required=True,
        choices=("delta", "epsilon", "time", "k", "gamma-d"),
    )
    p_sweep.add_argument("--start", type=float, required=True)
    p_sweep.add_argument("--stop", type=float, required=True)
    p_sweep.add_argument("--count", type=int, required=True)
    _add_physics_options(
        p_sweep,
        ("J", "k", "delta", "chi1", "chi2", "gamma11", "gamma22",
         "cross_damping", "gamma_d", "theta", "phi", "epsilon"),
    )
    _add_output_options(p_sweep)

    p_evolve = sub.add_parser("evolve", help="closed-system population trajectory")
    _add_physics_options(
        p_evolve, ("J", "k", "delta", "chi1", "chi2", "theta", "phi", "t_end", "dt")
    )
    _add_output_options(p_evolve)

    p_master = sub.add_parser("master", help="master-equation trajectory")
    _add_physics_options(
        p_master,
        ("J", "k", "delta", "chi1", "chi2", "gamma11", "gamma22", "cross_damping",
         "gamma_d", "theta", "phi", "epsilon", "t_end", "dt"),
    )
    _add_output_options(p_master)

    p_array = sub.add_parser("array", help="cavity-array delocalisation dynamics")
    _add_physics_options(p_array, ("N", "r", "s", "theta", "phi", "J", "t_end", "dt"))
    p_array.add_argument(
        "--at",
        type=float,
        default=None,
        help="emit the coincidence matrix at this time instead of S(t)",
    )
    _add_output_options(p_array)

    return parser


class _Settings:
    """Flag values with config-file and built-in fallbacks."""

    def __init__(self, args):
        self.args = args
        self.config = {}
        if getattr(args, "config", None):
            with open(args.config) as handle:
                self.config = json.load(handle)
            if not isinstance(self.config, dict):
                raise ValidationError("config file must contain a JSON object")

    def get(self, name):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.config:
            return self.config[name]
        return _DEFAULTS[name]


def _build_params(s: _Settings) -> fock.SystemParams:
    k = float(s.get("k"))
    delta = float(s.get("delta"))
    omega1 = OMEGA_REF
    omega2 = omega1 - delta
    chi1 = s.get("chi1")
    chi2 = s.get("chi2")
    chi1 = omega1 * k if chi1 is None else float(chi1)
    chi2 = omega2 * k if chi2 is None else float(chi2)
    return fock.SystemParams(omega1, omega2, chi1, chi2, k, float(s.get("J")))


def _build_rates(s: _Settings) -> open_system.DecayRates:
    g11 = float(s.get("gamma11"))
    g22 = float(s.get("gamma22"))
    mode = str(s.get("cross_damping"))
    if mode == "off":
        cross = 0.0
    elif mode == "max":
        cross = math.sqrt(g11 * g22)
    else:
        try:
            cross = float(mode)
        except ValueError:
            raise ValidationError(
                f"--cross-damping must be 'off', 'max' or a number, got {mode!r}"
            )
    return open_system.DecayRates(g11, g22, cross, cross, float(s.get("gamma_d")))


def _build_angles(s: _Settings) -> coherent.InitialAngles:
    return coherent.InitialAngles(float(s.get("theta")), float(s.get("phi")))


def _emit(ds, args):
    if args.out:
        experiments.export(ds, args.format, args.out)
        print(f"wrote {args.out}")
    else:
        text = (
            experiments.dumps_csv(ds)
            if args.format == "csv"
            else experiments.dumps_json(ds)
        )
        sys.stdout.write(text)
    if args.plot:
        plot_path = args.plot
        if plot_path == "auto":
            if not args.out:
                raise ValidationError("--plot auto needs --out to derive the path")
            stem = args.out.rsplit(".", 1)[0]
            plot_path = stem + ".png"
        from . import plotting

        plotting.render(ds, plot_path)
        print(f"wrote {plot_path}")


def _cmd_figure(args):
    _emit(experiments.run_figure(args.id), args)


def _cmd_sweep(args):
    s = _Settings(args)
    spec = experiments.SweepSpec(
        variable=args.variable.replace("-", "_"),
        start=args.start,
        stop=args.stop,
        count=args.count,
        params=_build_params(s),
        rates=_build_rates(s),
        angles=_build_angles(s),
        epsilon=float(s.get("epsilon")),
    )
    _emit(experiments.run_sweep(spec), args)


def _cmd_evolve(args):
    s = _Settings(args)
    params = _build_params(s)
    angles = _build_angles(s)
    t_end = s.get("t_end")
    t_end = coherent.default_time_window(params) if t_end is None else float(t_end)
    dt = s.get("dt")
    dt = t_end / 1000.0 if dt is None else float(dt)
    if dt <= 0 or t_end <= 0:
        raise ValidationError("t-end and dt must be positive")
    times = np.linspace(0.0, t_end, int(round(t_end / dt)) + 1)
    rows = experiments.closed_population_trajectory(params, angles.to_state(), times)
    ds = experiments.FigureDataset(
        "evolve",
        ("t", "p20", "p11", "p02"),
        rows,
        experiments._provenance(
            "evolve",
            params=experiments._params_provenance(params),
            theta=angles.theta, phi=angles.phi,
            time_grid=[0.0, t_end, int(times.size)],
        ),
    )
    _emit(ds, args)


def _cmd_master(args):
    s = _Settings(args)
    params = _build_params(s)
    rates = _build_rates(s)
    angles = _build_angles(s)
    epsilon = float(s.get("epsilon"))
    t_end = s.get("t_end")
    t_end = experiments.OPEN_TIME_SPAN if t_end is None else float(t_end)
    dt = s.get("dt")
    dt = open_system.default_figure_dt(params, rates) if dt is None else float(dt)
    if dt <= 0 or t_end <= 0:
        raise ValidationError("t-end and dt must be positive")
    times = np.linspace(0.0, t_end, 1201)
    rho0 = open_system.coherence_state(angles, epsilon)
    rows = experiments.master_population_trajectory(params, rates, rho0, times, dt)
    ds = experiments.FigureDataset(
        "master",
        ("t", "rho44", "rho55", "rho66", "p_localised"),
        rows,
        experiments._provenance(
            "master",
            params=experiments._params_provenance(params),
            rates=experiments._rates_provenance(rates),
            theta=angles.theta, phi=angles.phi, epsilon=epsilon,
            dt=dt, time_grid=[0.0, t_end, int(times.size)],
        ),
    )
    _emit(ds, args)


def _cmd_array(args):
    s = _Settings(args)
    cfg = cavity_array.ArrayConfig(int(s.get("N")), OMEGA_REF, float(s.get("J")))
    init = cavity_array.ArrayInitialState(
        int(s.get("r")), int(s.get("s")), float(s.get("theta")), float(s.get("phi"))
    )
    amps = cavity_array.pair_amplitudes(init, cfg.n)
    prov_common = dict(
        N=cfg.n, r=init.r, s=init.s, J=cfg.J, omega=cfg.omega,
        theta=init.theta, phi=init.phi,
    )
    if args.at is not None:
        p = cavity_array.joint_probability_from_amplitudes(cfg, amps, args.at)
        rows = np.empty((cfg.n * cfg.n, 3))
        idx = 0
        for m in range(1, cfg.n + 1):
            for n in range(1, cfg.n + 1):
                rows[idx] = (m, n, p[m - 1, n - 1])
                idx += 1
        ds = experiments.FigureDataset(
            "array-snapshot", ("m", "n", "p"), rows,
            experiments._provenance("array-snapshot", t=args.at, **prov_common),
        )
    else:
        t_end = s.get("t_end")
        t_end = experiments.ARRAY_TIME_SPAN if t_end is None else float(t_end)
        dt = s.get("dt")
        dt = t_end / 1000.0 if dt is None else float(dt)
        if dt <= 0 or t_end <= 0:
            raise ValidationError("t-end and dt must be positive")
        times = np.linspace(0.0, t_end, int(round(t_end / dt)) + 1)
        svals = cavity_array.delocalisation_trajectory(cfg, amps, times)
        rows = np.column_stack([times, svals])
        ds = experiments.FigureDataset(
            "array", ("t", "s"), rows,
            experiments._provenance(
                "array", time_grid=[0.0, t_end, int(times.size)], **prov_common
            ),
        )
    _emit(ds, args)


_COMMANDS = {
    "figure": _cmd_figure,
    "sweep": _cmd_sweep,
    "evolve": _cmd_evolve,
    "master": _cmd_master,
    "array": _cmd_array,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PhotonlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
