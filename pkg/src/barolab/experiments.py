"""Experiment orchestration and all file output.

Every run writes plain CSV (17 significant digits, the lossless round-trip
precision for doubles) plus a ``summary.json``.  Given the same configuration
the CSV bodies are byte-identical across runs: there is no randomness anywhere
in the pipeline and wall-clock timing lives only in the JSON summary.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from pathlib import Path

import numpy as np

from . import analysis
from .config import build_grid, build_initial, study_epsilons, study_modes, study_resolutions
from .errors import ConfigError, DomainError, IntegrationError
from .euler import State, momentum_field, reg_source, run, rusanov_run, step
from .sturm_liouville import SLSystem
from .grid import Grid
from .hunter_saxton import GhsState, ghs_run, ghs_step

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTEGRATION = 2
EXIT_BLOWUP = 3

DIAGNOSTICS_HEADER = "t,dt,mass,momentum,energy,sup_Wx"


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def write_snapshot(path, grid, rho, u, m, reg_flux=None):
    cols = [grid.x, rho, u, m]
    header = "x,rho,u,m"
    if reg_flux is not None:
        cols.append(reg_flux)
        header += ",R"
    write_csv(path, header, zip(*cols))


def read_snapshot(path, grid):
    """Re-ingest a snapshot CSV as an initial condition on ``grid``."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.size != grid.n:
        raise ConfigError([f"snapshot {path} has {data.size} rows, grid has {grid.n}"])
    return np.ascontiguousarray(data["rho"]), np.ascontiguousarray(data["u"])


def resolve_output_dir(config, override=None):
    directory = Path(override) if override else Path(config.output_directory)
    root = os.environ.get("BAROLAB_OUTPUT_ROOT")
    if root and not directory.is_absolute():
        directory = Path(root) / directory
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def run_experiment(config, output_dir=None):
    """Execute one experiment; returns ``(exit_code, summary dict)``.

    Artifacts land in the resolved output directory; the summary is also
    written there as ``summary.json``.
    """
    outdir = resolve_output_dir(config, output_dir)
    started = time.perf_counter()
    runner = {
        "rbe_run": _run_rbe,
        "ghs_run": _run_ghs,
        "dispersion_study": _run_dispersion,
        "steady_profile": _run_steady_profile,
        "epsilon_sweep": _run_epsilon_sweep,
        "convergence_study": _run_convergence,
    }[config.kind]
    try:
        code, summary = runner(config, outdir)
    except IntegrationError as exc:
        code = EXIT_INTEGRATION
        summary = {"kind": config.kind, "error": str(exc), "failure_time": exc.t}
    except DomainError as exc:
        # a statically-invalid setup that slipped past parsing (e.g. initial
        # data incompatible with the grid or law)
        code = EXIT_CONFIG
        summary = {"kind": config.kind, "error": str(exc)}
    summary["wall_clock_s"] = time.perf_counter() - started
    summary.setdefault("kind", config.kind)
    with open(outdir / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return code, summary


def _drift(series, column):
    first, last = series[0][column], series[-1][column]
    return abs(last - first) / max(abs(first), 1e-12)


def _write_time_series(outdir, result, grid, snapshot_writer):
    write_csv(outdir / "diagnostics.csv", DIAGNOSTICS_HEADER, result.series)
    index_rows = []
    for idx, (t, state) in enumerate(result.snapshots):
        name = f"snapshot_{idx:06d}.csv"
        snapshot_writer(outdir / name, state)
        index_rows.append((idx, t))
    with open(outdir / "snapshots_index.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write("index,t,filename\n")
        for idx, t in index_rows:
            f.write(f"{idx},{_fmt(t)},snapshot_{idx:06d}.csv\n")


def _run_rbe(config, outdir):
    grid = build_grid(config)
    rho0, u0 = build_initial(config, grid)
    reg, eos = config.regularizer, config.eos
    result = run(State(0.0, rho0, u0, grid), config.solver, reg, eos)

    def writer(path, state):
        sl = SLSystem(grid, state.rho, reg)
        flux = sl.smooth(reg_source(state, reg, eos))
        write_snapshot(path, grid, state.rho, state.u, momentum_field(state, reg), flux)

    _write_time_series(outdir, result, grid, writer)
    summary = {
        "kind": "rbe_run",
        "steps": result.steps,
        "final_time": result.final.t,
        "energy_drift": _drift(result.series, 4),
        "mass_drift": _drift(result.series, 2),
        "momentum_drift": _drift(result.series, 3),
        "blowup": result.blowup,
        "blowup_time": result.blowup_time,
    }
    code = EXIT_BLOWUP if (result.blowup and config["solver"]["on_blowup"] == "fail") else EXIT_OK
    return code, summary


def _run_ghs(config, outdir):
    grid = build_grid(config)
    rho0, u0 = build_initial(config, grid)
    reg, eos = config.regularizer, config.eos
    result = ghs_run(GhsState(0.0, rho0, u0, grid), config.solver, reg, eos)

    def writer(path, state):
        write_snapshot(path, grid, state.rho, state.u, state.rho * state.u)

    _write_time_series(outdir, result, grid, writer)
    summary = {
        "kind": "ghs_run",
        "steps": result.steps,
        "final_time": result.final.t,
        "energy_drift": _drift(result.series, 4),
        "mass_drift": _drift(result.series, 2),
        "blowup": result.blowup,
        "blowup_time": result.blowup_time,
    }
    code = EXIT_BLOWUP if (result.blowup and config["solver"]["on_blowup"] == "fail") else EXIT_OK
    return code, summary


def _run_dispersion(config, outdir):
    eos, reg = config.eos, config.regularizer
    c_theory = analysis.phase_speed(eos)
    amplitude = config["study"]["amplitude"]
    rows, worst = [], 0.0
    for k in study_modes(config):
        c = analysis.measured_phase_speed(eos, reg, k, amplitude)
        rel = abs(c - c_theory) / c_theory
        worst = max(worst, rel)
        rows.append((k, c_theory, c, rel))
    write_csv(outdir / "dispersion.csv", "k,c_theory,c_measured,rel_err", rows)
    return EXIT_OK, {"kind": "dispersion_study", "max_rel_err": worst,
                     "modes": study_modes(config)}


def _run_steady_profile(config, outdir):
    eos, reg = config.eos, config.regularizer
    st = config["study"]
    fluxes = analysis.SteadyFluxes.uniform(
        st["mass_flux"], st["momentum_flux"], st["energy_flux"])
    summary = {"kind": "steady_profile"}
    try:
        x, rho, x0, rho_s = analysis.cusp_profile(
            fluxes, eos, reg, st["rho_start"], n=st["points"], x_max=st["x_max"])
        fit = analysis.fit_singularity_exponent(x, rho, x0, rho_ref=rho_s)
        with open(outdir / "fit.json", "w", encoding="utf-8") as f:
            json.dump(fit.to_report(), f, indent=2, sort_keys=True)
            f.write("\n")
        summary.update(
            alpha=fit.alpha, sonic_density=rho_s, cusp_position=x0,
            predicted_amplitude=analysis.cusp_amplitude_prediction(fluxes, eos, reg, rho_s),
        )
    except DomainError:
        res = analysis.integrate_steady_profile(
            fluxes, eos, reg, st["rho_start"], -1, x_max=st["x_max"])
        x, rho = res.x, res.rho
        summary.update(alpha=None, stop=res.stop)
    write_csv(outdir / "profile.csv", "x,rho", zip(x, rho))
    return EXIT_OK, summary


def _run_epsilon_sweep(config, outdir):
    eos = config.eos
    grid = build_grid(config)
    rho0, u0 = build_initial(config, grid)
    initial = State(0.0, rho0, u0, grid)
    t_end = config["solver"]["t_end"]
    reference = rusanov_run(initial, t_end, eos)
    rows = []
    for eps in study_epsilons(config):
        reg = dataclasses.replace(config.regularizer, epsilon=eps)
        res = run(initial, config.solver, reg, eos)
        dist = grid.integrate(np.abs(res.final.rho - reference.rho)
                              + np.abs(res.final.u - reference.u))
        rows.append((eps, dist))
    write_csv(outdir / "epsilon_sweep.csv", "epsilon,l1_distance", rows)
    dists = [d for _, d in rows]
    return EXIT_OK, {"kind": "epsilon_sweep", "epsilons": [e for e, _ in rows],
                     "l1_distances": dists,
                     "monotone_decreasing": all(a > b for a, b in zip(dists, dists[1:]))}


def _fixed_dt_advance(initial, t_end, steps, reg, eos, stepper):
    state, dt = initial, t_end / steps
    for _ in range(steps):
        state = stepper(state, dt, reg, eos)
    return state


def _run_convergence(config, outdir):
    eos, reg = config.eos, config.regularizer
    st = config["study"]
    resolutions = study_resolutions(config)
    t_end = config["solver"]["t_end"]
    is_ghs = st["solver"] == "ghs"
    stepper = ghs_step if is_ghs else step

    def make_state(grid):
        rho0, u0 = build_initial(config, grid)
        return GhsState(0.0, rho0, u0, grid) if is_ghs else State(0.0, rho0, u0, grid)

    errs = []
    if st["variant"] == "spatial":
        runner = ghs_run if is_ghs else run
        ref_n = 4 * max(resolutions)
        finals = {}
        for n in (*resolutions, ref_n):
            grid = Grid.periodic(config["grid"]["length"], n)
            finals[n] = runner(make_state(grid), config.solver, reg, eos).final
        for n in resolutions:
            stride = ref_n // n
            errs.append(float(np.max(np.abs(finals[n].rho - finals[ref_n].rho[::stride]))))
    else:
        grid = Grid.periodic(config["grid"]["length"], config["grid"]["n"])
        initial = make_state(grid)
        ref = _fixed_dt_advance(initial, t_end, 8 * max(resolutions), reg, eos, stepper)
        for steps in resolutions:
            final = _fixed_dt_advance(initial, t_end, steps, reg, eos, stepper)
            errs.append(float(np.max(np.abs(final.rho - ref.rho))))
    orders = [float(np.log(errs[i] / errs[i + 1])
                    / np.log(resolutions[i + 1] / resolutions[i]))
              for i in range(len(errs) - 1)]
    write_csv(outdir / "convergence.csv", "resolution,error",
              zip(resolutions, errs))
    return EXIT_OK, {"kind": "convergence_study", "variant": st["variant"],
                     "solver": st["solver"], "resolutions": resolutions,
                     "errors": errs, "observed_orders": orders}
