"""Command-line front end: presets, config files, simulation driving.

Subcommands: simulate, dispersion, compare, preset-list.  Configuration
files are YAML; the full schema with defaults is documented in README.md.
Exit codes: 0 success, 2 configuration error, 3 solver failure.
Set LUBRISIM_LOG={quiet|info|debug} to control chattiness.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np
import yaml

from .core import (
    ALL_TOGGLES,
    TERM_GROUPS,
    BoundaryKind,
    Grid,
    ModelVariant,
    Params,
    PositivityError,
    State,
)
from .stability import dispersion_scan, write_dispersion_csv
from .timestepper import SimulationResult, StepConfig, run_simulation

log = logging.getLogger("lubrisim")

DEFAULT_LENGTH = 15.0 * math.pi
INITIAL_KINDS = ("flat_with_surfactant_drop", "corrugated_uniform_surfactant", "custom")


class ConfigError(ValueError):
    """Configuration file or CLI argument problem (exit code 2)."""


@dataclass(frozen=True)
class InitialCondition:
    kind: str = "flat_with_surfactant_drop"
    drop_center: float | None = None     # defaults to L/2
    drop_width: float = 2.0
    drop_excess: float = 1.0
    corrugation_amplitude: float = 0.1
    corrugation_wavenumber: float = 0.5
    eta: tuple | None = None             # custom profiles
    gamma: tuple | None = None

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(f"initial.kind must be one of {INITIAL_KINDS}, "
                              f"got {self.kind!r}")
        if self.kind == "custom" and (self.eta is None or self.gamma is None):
            raise ConfigError("initial.kind 'custom' requires eta and gamma arrays")
        if self.eta is not None:
            object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        if self.gamma is not None:
            object.__setattr__(self, "gamma", tuple(float(v) for v in self.gamma))


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: Grid
    initial: InitialCondition
    params: Params
    variant: ModelVariant
    step: StepConfig
    snapshot_times: tuple

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))


@dataclass(frozen=True)
class ComparisonRow:
    peclet: float
    time: float
    linf_eta: float
    l2_eta: float
    linf_gamma: float
    l2_gamma: float


@dataclass
class ComparisonReport:
    variant_a: str
    variant_b: str
    rows: list


def build_initial_state(scenario: Scenario) -> State:
    """Realise the initial condition on the scenario grid."""
    grid = scenario.grid
    x = grid.x
    init = scenario.initial
    if init.kind == "flat_with_surfactant_drop":
        eta = np.ones(grid.n_nodes)
        center = grid.length / 2.0 if init.drop_center is None else init.drop_center
        w = init.drop_width
        if w <= 0:
            raise ConfigError("initial.width must be positive")
        r = np.abs(x - center)
        bump = np.where(r <= w, 0.5 * (1.0 + np.cos(np.pi * np.minimum(r, w) / w)), 0.0)
        gamma = 1.0 + init.drop_excess * bump
    elif init.kind == "corrugated_uniform_surfactant":
        k = init.corrugation_wavenumber
        eta = 1.0 + init.corrugation_amplitude * np.cos(k * x)
        gamma = np.ones(grid.n_nodes)
    else:
        eta = np.asarray(init.eta, dtype=float)
        gamma = np.asarray(init.gamma, dtype=float)
        if eta.shape != (grid.n_nodes,) or gamma.shape != (grid.n_nodes,):
            raise ConfigError("custom initial arrays must match grid.n_nodes")
    if np.any(eta <= 0):
        raise ConfigError("initial film thickness must be positive everywhere")
    if np.any(gamma < 0):
        raise ConfigError("initial surfactant concentration must be >= 0")
    return State(eta, gamma, 0.0)


def default_scenario(name: str = "fig2") -> Scenario:
    return Scenario(
        name=name,
        grid=Grid(97, DEFAULT_LENGTH, BoundaryKind.NO_FLUX_SYMMETRIC),
        initial=InitialCondition(),
        params=Params(),
        variant=ModelVariant.FULL_CM,
        step=StepConfig(dt=100.0),
        snapshot_times=(1.0, 10.0, 100.0, 1000.0),
    )


def _corrugated_scenario(name: str, snapshot_times) -> Scenario:
    # One full cosine wave over L = 4*pi, i.e. k = 0.5: slow enough to
    # outlive the clean-film levelling by orders of magnitude, and k*L is a
    # multiple of pi so the profile reflects evenly at the walls.
    length = 4.0 * math.pi
    return Scenario(
        name=name,
        grid=Grid(97, length, BoundaryKind.NO_FLUX_SYMMETRIC),
        initial=InitialCondition(kind="corrugated_uniform_surfactant",
                                 corrugation_amplitude=0.1,
                                 corrugation_wavenumber=0.5),
        params=Params(),
        variant=ModelVariant.FULL_CM,
        step=StepConfig(dt=1.0),
        snapshot_times=snapshot_times,
    )


_PRESETS = {
    "fig2": lambda: default_scenario("fig2"),
    "fig3": lambda: _corrugated_scenario("fig3", (0.0, 15.0, 30.0, 45.0)),
    "fig4": lambda: _corrugated_scenario("fig4", (0.0, 100.0, 200.0, 300.0)),
}


def preset(name: str) -> Scenario:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(_PRESETS))}"
        ) from None


def preset_names() -> list:
    return sorted(_PRESETS)


# --- config file handling ---------------------------------------------------

def _reject_unknown(section: dict, allowed, where: str) -> None:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _as_float(section: dict, key: str, default: float, where: str) -> float:
    value = section.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}") from None


def scenario_from_dict(data: dict, source: str = "config") -> Scenario:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    _reject_unknown(data, ("name", "grid", "initial", "params", "variant",
                           "step", "snapshot_times"), source)
    base = default_scenario(str(data.get("name", "custom")))

    gsec = data.get("grid", {}) or {}
    _reject_unknown(gsec, ("n_nodes", "length", "boundary"), f"{source}.grid")
    try:
        boundary = BoundaryKind(gsec.get("boundary", base.grid.boundary.value))
    except ValueError:
        raise ConfigError(f"{source}.grid.boundary must be one of "
                          f"{[b.value for b in BoundaryKind]}") from None
    try:
        grid = Grid(int(gsec.get("n_nodes", base.grid.n_nodes)),
                    _as_float(gsec, "length", base.grid.length, f"{source}.grid"),
                    boundary)
    except ValueError as exc:
        raise ConfigError(f"{source}.grid: {exc}") from None

    isec = data.get("initial", {}) or {}
    _reject_unknown(isec, ("kind", "center", "width", "excess", "amplitude",
                           "wavenumber", "eta", "gamma"), f"{source}.initial")
    initial = InitialCondition(
        kind=isec.get("kind", "flat_with_surfactant_drop"),
        drop_center=(None if isec.get("center") is None
                     else float(isec["center"])),
        drop_width=_as_float(isec, "width", 2.0, f"{source}.initial"),
        drop_excess=_as_float(isec, "excess", 1.0, f"{source}.initial"),
        corrugation_amplitude=_as_float(isec, "amplitude", 0.1, f"{source}.initial"),
        corrugation_wavenumber=_as_float(isec, "wavenumber", 0.5, f"{source}.initial"),
        eta=isec.get("eta"),
        gamma=isec.get("gamma"),
    )

    psec = data.get("params", {}) or {}
    _reject_unknown(psec, ("reynolds", "bond", "hamaker", "inv_peclet",
                           "tension_slope", "incline", "toggles"), f"{source}.params")
    toggles = psec.get("toggles")
    if toggles is not None:
        toggles = frozenset(str(t) for t in toggles)
        bad = toggles - set(TERM_GROUPS)
        if bad:
            raise ConfigError(f"{source}.params.toggles: unknown group(s) "
                              f"{', '.join(sorted(bad))}")
    try:
        params = Params(
            reynolds=_as_float(psec, "reynolds", base.params.reynolds, f"{source}.params"),
            bond=_as_float(psec, "bond", base.params.bond, f"{source}.params"),
            hamaker=_as_float(psec, "hamaker", base.params.hamaker, f"{source}.params"),
            inv_peclet=_as_float(psec, "inv_peclet", base.params.inv_peclet, f"{source}.params"),
            tension_slope=_as_float(psec, "tension_slope", base.params.tension_slope, f"{source}.params"),
            incline=_as_float(psec, "incline", base.params.incline, f"{source}.params"),
            toggles=ALL_TOGGLES if toggles is None else toggles,
        )
    except ValueError as exc:
        raise ConfigError(f"{source}.params: {exc}") from None

    try:
        variant = ModelVariant(data.get("variant", base.variant.value))
    except ValueError:
        raise ConfigError(f"{source}.variant must be one of "
                          f"{[v.value for v in ModelVariant]}") from None

    ssec = data.get("step", {}) or {}
    _reject_unknown(ssec, ("dt", "newton_iters", "newton_tol", "fd_epsilon",
                           "jacobian"), f"{source}.step")
    try:
        step = StepConfig(
            dt=_as_float(ssec, "dt", base.step.dt, f"{source}.step"),
            newton_iters=int(ssec.get("newton_iters", base.step.newton_iters)),
            newton_tol=_as_float(ssec, "newton_tol", base.step.newton_tol, f"{source}.step"),
            jacobian=ssec.get("jacobian", "finite_difference"),
            fd_epsilon=_as_float(ssec, "fd_epsilon", base.step.fd_epsilon, f"{source}.step"),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}.step: {exc}") from None

    snaps = data.get("snapshot_times", list(base.snapshot_times))
    try:
        snaps = tuple(float(t) for t in snaps)
    except (TypeError, ValueError):
        raise ConfigError(f"{source}.snapshot_times must be a list of numbers") from None

    try:
        return Scenario(base.name if "name" not in data else str(data["name"]),
                        grid, initial, params, variant, step, snaps)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def scenario_to_dict(s: Scenario) -> dict:
    initial = {"kind": s.initial.kind}
    if s.initial.kind == "flat_with_surfactant_drop":
        if s.initial.drop_center is not None:
            initial["center"] = s.initial.drop_center
        initial["width"] = s.initial.drop_width
        initial["excess"] = s.initial.drop_excess
    elif s.initial.kind == "corrugated_uniform_surfactant":
        initial["amplitude"] = s.initial.corrugation_amplitude
        initial["wavenumber"] = s.initial.corrugation_wavenumber
    else:
        initial["eta"] = list(s.initial.eta)
        initial["gamma"] = list(s.initial.gamma)
    return {
        "name": s.name,
        "grid": {
            "n_nodes": s.grid.n_nodes,
            "length": s.grid.length,
            "boundary": s.grid.boundary.value,
        },
        "initial": initial,
        "params": {
            "reynolds": s.params.reynolds,
            "bond": s.params.bond,
            "hamaker": s.params.hamaker,
            "inv_peclet": s.params.inv_peclet,
            "tension_slope": s.params.tension_slope,
            "incline": s.params.incline,
            "toggles": sorted(s.params.toggles),
        },
        "variant": s.variant.value,
        "step": {
            "dt": s.step.dt,
            "newton_iters": s.step.newton_iters,
            "newton_tol": s.step.newton_tol,
            "fd_epsilon": s.step.fd_epsilon,
        },
        "snapshot_times": list(s.snapshot_times),
    }


def load_config(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"cannot parse config {path}{where}: {exc}") from None
    return scenario_from_dict(data, source=str(path))


def save_config(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)


# --- output helpers ----------------------------------------------------------

def _fmt_time(value: float) -> str:
    return f"{value:g}"


def _write_profile_csv(path, x, eta, gamma) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,eta,gamma\n")
        for xi, e, g in zip(x, eta, gamma):
            fh.write(f"{xi:.17g},{e:.17g},{g:.17g}\n")


def _write_run_report(path, scenario: Scenario, result: SimulationResult) -> None:
    s = result.summary
    lines = [
        f"scenario: {scenario.name}",
        f"variant: {scenario.variant.value}",
        f"steps: {s.steps}",
        f"final_time: {s.final_time:.17g}",
        f"max_film_mass_drift: {s.max_film_mass_drift:.6e}",
        f"max_surfactant_mass_drift: {s.max_surfactant_mass_drift:.6e}",
        f"wall_time_s: {s.wall_time:.3f}",
    ]
    for snap in result.snapshots[1:]:
        lines.append(
            f"t={_fmt_time(snap.time)}: newton_iters={snap.report.newton_iters_used} "
            f"residual_before={snap.report.residual_norm_before:.3e} "
            f"residual_after={snap.report.residual_norm_after:.3e}"
        )
    if s.failure:
        lines.append(f"FAILED: {s.failure}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# --- commands ----------------------------------------------------------------

def cmd_simulate(scenario: Scenario, out_dir, t_end: float | None = None) -> int:
    os.makedirs(out_dir, exist_ok=True)
    try:
        s0 = build_initial_state(scenario)
    except (ConfigError, ValueError) as exc:
        log.error("bad initial condition: %s", exc)
        return 2
    snaps = scenario.snapshot_times
    end = t_end if t_end is not None else (max(snaps) if snaps else 0.0)
    snaps = tuple(st for st in snaps if st <= end)
    log.info("simulate %s: variant=%s N=%d t_end=%g",
             scenario.name, scenario.variant.value, scenario.grid.n_nodes, end)
    result = run_simulation(s0, end, snaps, scenario.step, scenario.variant,
                            scenario.params, scenario.grid)
    for snap in result.snapshots:
        path = os.path.join(out_dir, f"t{_fmt_time(snap.time)}.csv")
        _write_profile_csv(path, scenario.grid.x, snap.state.eta, snap.state.gamma)
    _write_run_report(os.path.join(out_dir, "report.txt"), scenario, result)
    if result.summary.failure:
        log.error("solver failure: %s", result.summary.failure)
        return 3
    log.info("done: %d steps, film drift %.2e, surfactant drift %.2e, %.2fs",
             result.summary.steps, result.summary.max_film_mass_drift,
             result.summary.max_surfactant_mass_drift, result.summary.wall_time)
    return 0


def cmd_dispersion(delta_s: float, k_max: float, n_points: int, out_path) -> int:
    try:
        results = dispersion_scan(0.0, k_max, n_points, delta_s)
    except ValueError as exc:
        log.error("dispersion: %s", exc)
        return 2
    write_dispersion_csv(results, out_path)
    log.info("dispersion curve with %d points written to %s", n_points, out_path)
    return 0


def cmd_compare(scenario: Scenario, variants, peclet_list, t_compare: float,
                out_dir) -> ComparisonReport | int:
    """Run two variants at each Peclet number and difference the profiles.

    Returns the ComparisonReport on success (the CLI wrapper turns it into
    an exit code) or an integer error code on failure.
    """
    if len(variants) != 2:
        log.error("compare needs exactly two variants, got %d", len(variants))
        return 2
    if not peclet_list or any(p <= 0 for p in peclet_list):
        log.error("compare needs positive Peclet numbers")
        return 2
    os.makedirs(out_dir, exist_ok=True)
    try:
        s0 = build_initial_state(scenario)
    except (ConfigError, ValueError) as exc:
        log.error("bad initial condition: %s", exc)
        return 2
    report = ComparisonReport(variants[0].value, variants[1].value, [])
    dx = scenario.grid.dx
    for pe in peclet_list:
        params = dataclasses.replace(scenario.params, inv_peclet=1.0 / pe)
        finals = []
        for variant in variants:
            result = run_simulation(s0, t_compare, (t_compare,) if t_compare > 0 else (),
                                    scenario.step, variant, params, scenario.grid)
            if result.summary.failure:
                log.error("solver failure at P=%g (%s): %s", pe, variant.value,
                          result.summary.failure)
                return 3
            finals.append(result.snapshots[-1].state)
        d_eta = finals[0].eta - finals[1].eta
        d_gamma = finals[0].gamma - finals[1].gamma
        report.rows.append(ComparisonRow(
            peclet=pe,
            time=t_compare,
            linf_eta=float(np.max(np.abs(d_eta))),
            l2_eta=float(np.sqrt(dx * np.sum(d_eta**2))),
            linf_gamma=float(np.max(np.abs(d_gamma))),
            l2_gamma=float(np.sqrt(dx * np.sum(d_gamma**2))),
        ))
        with open(os.path.join(out_dir, f"diff_P{pe:g}.csv"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write("x,d_eta,d_gamma\n")
            for xi, de, dg in zip(scenario.grid.x, d_eta, d_gamma):
                fh.write(f"{xi:.17g},{de:.17g},{dg:.17g}\n")
    with open(os.path.join(out_dir, "compare_summary.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("peclet,time,linf_eta,l2_eta,linf_gamma,l2_gamma\n")
        for row in report.rows:
            fh.write(f"{row.peclet:.17g},{row.time:.17g},{row.linf_eta:.17g},"
                     f"{row.l2_eta:.17g},{row.linf_gamma:.17g},{row.l2_gamma:.17g}\n")
    log.info("comparison (%s vs %s) written to %s", variants[0].value,
             variants[1].value, out_dir)
    return report


# --- argument parsing ---------------------------------------------------------

def _configure_logging() -> None:
    level_name = os.environ.get("LUBRISIM_LOG", "info").lower()
    levels = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(format="%(levelname)s %(message)s")
    log.setLevel(levels.get(level_name, logging.INFO))


def _scenario_from_args(args) -> Scenario:
    if getattr(args, "config", None):
        scenario = load_config(args.config)
    elif getattr(args, "preset", None):
        scenario = preset(args.preset)
    else:
        scenario = default_scenario()
    if getattr(args, "variant", None):
        scenario = dataclasses.replace(scenario,
                                       variant=ModelVariant(args.variant))
    if getattr(args, "nodes", None):
        scenario = dataclasses.replace(
            scenario, grid=dataclasses.replace(scenario.grid, n_nodes=args.nodes))
    if getattr(args, "dt", None):
        scenario = dataclasses.replace(
            scenario, step=dataclasses.replace(scenario.step, dt=args.dt))
    if getattr(args, "delta_s", None) is not None:
        scenario = dataclasses.replace(
            scenario,
            params=dataclasses.replace(scenario.params, inv_peclet=args.delta_s))
    return scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lubrisim",
        description="Contaminated thin-film lubrication solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p):
        p.add_argument("--config", help="YAML scenario file")
        p.add_argument("--preset", help="built-in scenario name")
        p.add_argument("--variant", choices=[v.value for v in ModelVariant])
        p.add_argument("--nodes", type=int, help="override grid.n_nodes")
        p.add_argument("--dt", type=float, help="override time step")
        p.add_argument("--delta-s", dest="delta_s", type=float,
                       help="override inverse Peclet number")

    p_sim = sub.add_parser("simulate", help="run one scenario, write snapshots")
    add_scenario_flags(p_sim)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--t-end", dest="t_end", type=float,
                       help="override end time (default: last snapshot)")

    p_disp = sub.add_parser("dispersion", help="export the dispersion curve")
    p_disp.add_argument("--out", required=True, help="output CSV path")
    p_disp.add_argument("--delta-s", dest="delta_s", type=float, default=1e-4)
    p_disp.add_argument("--k-max", dest="k_max", type=float, default=2.0)
    p_disp.add_argument("--n-points", dest="n_points", type=int, default=201)

    p_cmp = sub.add_parser("compare", help="difference two variants over Peclet numbers")
    add_scenario_flags(p_cmp)
    p_cmp.add_argument("--out", required=True, help="output directory")
    p_cmp.add_argument("--variants", default="full,dewit",
                       help="comma-separated pair, e.g. full,dewit")
    p_cmp.add_argument("--peclet", default="3,30,300",
                       help="comma-separated Peclet numbers")
    p_cmp.add_argument("--t-compare", dest="t_compare", type=float, default=10.0)

    sub.add_parser("preset-list", help="list built-in scenario presets")
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset-list":
            for name in preset_names():
                print(name)
            return 0
        if args.command == "dispersion":
            return cmd_dispersion(args.delta_s, args.k_max, args.n_points, args.out)
        scenario = _scenario_from_args(args)
        if args.command == "simulate":
            return cmd_simulate(scenario, args.out, t_end=args.t_end)
        # compare
        try:
            variants = tuple(ModelVariant(v.strip())
                             for v in args.variants.split(","))
            peclets = tuple(float(p) for p in args.peclet.split(","))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        outcome = cmd_compare(scenario, variants, peclets, args.t_compare, args.out)
        return outcome if isinstance(outcome, int) else 0
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except (PositivityError, np.linalg.LinAlgError) as exc:
        log.error("solver failure: %s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
