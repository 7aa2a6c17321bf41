"""Plain-text experiment configuration: parsing, validation, object building.

The format is INI-style ``key = value`` under section headers, chosen because
it is language-agnostic, diffable and needs no schema dependency.  Unknown
sections or keys are rejected (typo safety) and validation reports *all*
problems at once.  The full grammar is documented in the README.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

import numpy as np

from .eos import EquationOfState
from .errors import ConfigError
from .euler import SolverConfig
from .grid import Grid
from .regularizer import Regularizer

EXPERIMENT_KINDS = (
    "rbe_run", "ghs_run", "dispersion_study", "steady_profile",
    "epsilon_sweep", "convergence_study",
)
INITIAL_KINDS = ("constant", "sine", "sine_bump", "gaussian_bump", "tanh_front", "file")

# section -> key -> (converter, default); defaults of None mean "not set"
_SCHEMA = {
    "experiment": {"kind": (str, None)},
    "eos": {
        "kind": (str, "isentropic"),
        "gamma": (float, 2.0),
        "rho_bar": (float, 1.0),
        "p_bar": (float, 1.0),
        "g": (float, 1.0),
    },
    "regularizer": {
        "kind": (str, "cubic"),
        "epsilon": (float, 0.1),
        "a": (float, 1.0),
        "p": (float, 3.0),
    },
    "grid": {
        "topology": (str, "periodic"),
        "n": (int, 512),
        "length": (float, 1.0),
        "x_min": (float, -10.0),
        "x_max": (float, 10.0),
        "rho_left": (float, None),
        "rho_right": (float, None),
        "u_left": (float, 0.0),
        "u_right": (float, 0.0),
    },
    "initial": {
        "kind": (str, "sine"),
        "amplitude": (float, 0.05),
        "u_amplitude": (float, None),   # defaults to amplitude
        "mode": (int, 1),
        "width": (float, 0.1),
        "bump_amplitude": (float, 0.03),
        "mean_velocity": (float, 0.0),
        "rho_value": (float, None),     # constant preset; defaults to rho_bar
        "u_value": (float, 0.0),
        "path": (str, None),            # file preset
    },
    "solver": {
        "cfl": (float, 0.5),
        "t_end": (float, 1.0),
        "blowup_factor": (float, 1e3),
        "blowup_threshold": (float, None),
        "snapshot_every": (int, 0),
        "on_blowup": (str, "report"),
    },
    "output": {"directory": (str, "out")},
    "study": {
        "modes": (str, "1,2,4,8"),
        "amplitude": (float, 1e-6),
        "epsilons": (str, "0.1,0.01,0.001"),
        "mass_flux": (float, 1.0),
        "momentum_flux": (float, 1.25),
        "energy_flux": (float, 0.5),
        "rho_start": (float, 1.3),
        "x_max": (float, 10.0),
        "points": (int, 4097),
        "variant": (str, "spatial"),
        "solver": (str, "rbe"),
        "resolutions": (str, "64,128,256"),
    },
}


@dataclass
class ExperimentConfig:
    """Validated experiment description with the built core objects."""

    kind: str
    eos: EquationOfState
    regularizer: Regularizer
    values: dict = field(default_factory=dict)  # per-section raw (typed) values

    def __getitem__(self, section):
        return self.values[section]

    @property
    def solver(self):
        s = self.values["solver"]
        return SolverConfig(
            t_end=s["t_end"], cfl=s["cfl"], blowup_factor=s["blowup_factor"],
            blowup_threshold=s["blowup_threshold"], snapshot_every=s["snapshot_every"],
        )

    @property
    def output_directory(self):
        return self.values["output"]["directory"]


def _float_list(text):
    return [float(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip()]


def _int_list(text):
    return [int(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip()]


def parse_config(text):
    """Parse configuration text into an :class:`ExperimentConfig`.

    Raises :class:`ConfigError` carrying the complete list of violations.
    """
    problems = []
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from exc

    values = {section: {key: default for key, (_, default) in keys.items()}
              for section, keys in _SCHEMA.items()}
    for section in parser.sections():
        if section not in _SCHEMA:
            problems.append(f"unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                problems.append(f"unknown key '{key}' in section [{section}]")
                continue
            conv, _ = _SCHEMA[section][key]
            try:
                values[section][key] = conv(raw)
            except ValueError:
                problems.append(f"[{section}] {key}: cannot parse {raw!r} as {conv.__name__}")

    problems += _validate(values)
    if problems:
        raise ConfigError(problems)

    eos = _build_eos(values["eos"])
    reg = _build_regularizer(values["regularizer"], eos)
    return ExperimentConfig(values["experiment"]["kind"], eos, reg, values)


def _validate(v):
    problems = []
    kind = v["experiment"]["kind"]
    if kind is None:
        problems.append("[experiment] kind is required")
    elif kind not in EXPERIMENT_KINDS:
        problems.append(f"[experiment] kind must be one of {', '.join(EXPERIMENT_KINDS)}")

    e = v["eos"]
    if e["kind"] not in ("isentropic", "isothermal", "shallow_water"):
        problems.append("[eos] kind must be isentropic, isothermal or shallow_water")
    if e["kind"] == "isentropic":
        if not e["gamma"] > 0.0:
            problems.append("[eos] gamma must be > 0")
        elif e["gamma"] == 1.0:
            problems.append("[eos] gamma must be != 1 (use kind = isothermal)")
    if e["kind"] == "shallow_water" and not e["g"] > 0.0:
        problems.append("[eos] g must be > 0")
    if not e["rho_bar"] > 0.0:
        problems.append("[eos] rho_bar must be > 0")
    if not e["p_bar"] > 0.0:
        problems.append("[eos] p_bar must be > 0")

    r = v["regularizer"]
    if r["kind"] not in ("cubic", "inverse", "power"):
        problems.append("[regularizer] kind must be cubic, inverse or power")
    if not r["epsilon"] >= 0.0:
        problems.append("[regularizer] epsilon must be >= 0")
    if r["kind"] == "inverse" and not r["a"] > 0.0:
        problems.append("[regularizer] a must be > 0")
    if r["kind"] == "power" and r["p"] == 0.0:
        problems.append("[regularizer] p must be != 0")

    g = v["grid"]
    if g["topology"] not in ("periodic", "line"):
        problems.append("[grid] topology must be periodic or line")
    if g["n"] < 8:
        problems.append("[grid] n must be >= 8")
    if g["topology"] == "periodic" and not g["length"] > 0.0:
        problems.append("[grid] length must be > 0")
    if g["topology"] == "line" and not g["x_max"] > g["x_min"]:
        problems.append("[grid] x_max must be > x_min")

    if kind == "ghs_run" and g["topology"] != "periodic":
        problems.append("[grid] topology must be periodic for ghs_run")

    i = v["initial"]
    if i["kind"] not in INITIAL_KINDS:
        problems.append(f"[initial] kind must be one of {', '.join(INITIAL_KINDS)}")
    if i["kind"] == "file" and not i["path"]:
        problems.append("[initial] path is required for kind = file")
    if i["kind"] in ("gaussian_bump", "tanh_front") and not i["width"] > 0.0:
        problems.append("[initial] width must be > 0")
    if i["mode"] < 1:
        problems.append("[initial] mode must be >= 1")
    if i["rho_value"] is not None and not i["rho_value"] > 0.0:
        problems.append("[initial] rho_value must be > 0")

    s = v["solver"]
    if not 0.0 < s["cfl"] <= 1.0:
        problems.append("[solver] cfl must lie in (0, 1]")
    if not s["t_end"] > 0.0:
        problems.append("[solver] t_end must be > 0")
    if not s["blowup_factor"] > 0.0:
        problems.append("[solver] blowup_factor must be > 0")
    if s["blowup_threshold"] is not None and not s["blowup_threshold"] > 0.0:
        problems.append("[solver] blowup_threshold must be > 0 when given")
    if s["snapshot_every"] < 0:
        problems.append("[solver] snapshot_every must be >= 0")
    if s["on_blowup"] not in ("report", "fail"):
        problems.append("[solver] on_blowup must be report or fail")

    st = v["study"]
    for key, lister in (("modes", _int_list), ("epsilons", _float_list),
                        ("resolutions", _int_list)):
        try:
            lister(st[key])
        except ValueError:
            problems.append(f"[study] {key}: cannot parse {st[key]!r} as a comma list")
    if st["variant"] not in ("spatial", "temporal"):
        problems.append("[study] variant must be spatial or temporal")
    if st["solver"] not in ("rbe", "ghs"):
        problems.append("[study] solver must be rbe or ghs")
    if not st["amplitude"] > 0.0:
        problems.append("[study] amplitude must be > 0")

    for sec, key in (("eos", "gamma"), ("eos", "rho_bar"), ("eos", "p_bar"),
                     ("regularizer", "epsilon"), ("solver", "t_end"), ("solver", "cfl")):
        val = v[sec][key]
        if val is not None and not math.isfinite(val):
            problems.append(f"[{sec}] {key} must be finite")
    return problems


def _build_eos(e):
    if e["kind"] == "isentropic":
        return EquationOfState.isentropic(e["gamma"], e["rho_bar"], e["p_bar"])
    if e["kind"] == "isothermal":
        return EquationOfState.isothermal(e["rho_bar"], e["p_bar"])
    return EquationOfState.shallow_water(e["g"], e["rho_bar"])


def _build_regularizer(r, eos):
    if r["kind"] == "cubic":
        return Regularizer.cubic(r["epsilon"])
    if r["kind"] == "inverse":
        return Regularizer.inverse(r["epsilon"], r["a"], eos.rho_bar)
    return Regularizer.power(r["epsilon"], r["p"])


def build_grid(config):
    g = config["grid"]
    if g["topology"] == "periodic":
        return Grid.periodic(g["length"], g["n"])
    rho_bar = config.eos.rho_bar
    rho_far = (g["rho_left"] if g["rho_left"] is not None else rho_bar,
               g["rho_right"] if g["rho_right"] is not None else rho_bar)
    return Grid.line(g["x_min"], g["x_max"], g["n"], rho_far, (g["u_left"], g["u_right"]))


def build_initial(config, grid):
    """Initial ``(rho, u)`` fields for the configured preset."""
    i = config["initial"]
    eos = config.eos
    x, length = grid.x, grid.length
    rho_bar = eos.rho_bar
    a = i["amplitude"]
    ua = i["u_amplitude"] if i["u_amplitude"] is not None else a
    u_mean = i["mean_velocity"]
    kind = i["kind"]
    if kind == "constant":
        rho0 = np.full(grid.n, i["rho_value"] if i["rho_value"] is not None else rho_bar)
        return rho0, np.full(grid.n, i["u_value"])
    if kind == "file":
        from .experiments import read_snapshot
        return read_snapshot(i["path"], grid)
    k = 2.0 * np.pi * i["mode"] / length
    center = grid.x_min + 0.5 * length
    if kind == "sine":
        return rho_bar + a * np.sin(k * x), u_mean + ua * np.cos(k * x)
    if kind == "sine_bump":
        rho0 = (rho_bar + a * np.sin(k * x)
                + i["bump_amplitude"] * np.exp(-(((x - center) / i["width"]) ** 2)))
        return rho0, u_mean + ua * np.cos(k * x)
    if kind == "gaussian_bump":
        rho0 = rho_bar + a * np.exp(-(((x - center) / i["width"]) ** 2))
        return rho0, np.full(grid.n, u_mean)
    # tanh_front: one steep compressive front; on periodic grids a matching
    # release front keeps the data continuous across the wrap
    w = i["width"]
    if grid.is_periodic:
        u0 = u_mean - a * (np.tanh((x - length / 3.0) / w)
                           - np.tanh((x - 2.0 * length / 3.0) / w) - 1.0)
    else:
        u0 = u_mean - a * np.tanh((x - center) / w)
    return np.full(grid.n, rho_bar), u0


def study_modes(config):
    return _int_list(config["study"]["modes"])


def study_epsilons(config):
    return _float_list(config["study"]["epsilons"])


def study_resolutions(config):
    return _int_list(config["study"]["resolutions"])
