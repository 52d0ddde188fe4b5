"""Command-line front end.

    trapion ions-table                  spontaneous-emission table for every ion
    trapion budget                      9Be+ carrier budget for given Raman beams
    trapion gate-simulate               calibrate and run the two-ion phase gate
    trapion pulse                       apply carrier/sideband pulses to a state
    trapion sweep                       scan one parameter, emit an objective

Frequencies on the command line and in config files are ordinary
frequencies in Hz (``nu = omega / 2 pi``); couplings ``g`` likewise.  A
config file (``--config``) is INI-style with ``[run]``, ``[beams]``,
``[gate]``, ``[pulse]`` (or ``[pulse.1]``, ``[pulse.2]``, ... for a
sequence) and ``[sweep]`` sections whose keys match the long option names
with ``-`` replaced by ``_``.  Command-line flags override the file.

Exit codes: 0 success, 2 configuration error, 3 numerical/physics error.
Errors are reported on stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import cmath
import configparser
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import budget, dynamics, geomgate, ramancoupling as rc
from .errors import ConfigError, TrapIonError
from .iondb import find_ion, load_ion_db
from .report import render, to_csv
from .statespace import FockSpinState

log = logging.getLogger("trapion")

TWO_PI = 2 * math.pi
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("ions-table", "budget", "gate-simulate", "pulse", "sweep")
FORMATS = ("json", "csv", "table")
POL_RENORM_TOL = 1e-6

SWEEP_PARAMS = ("delta_hz", "kappa_deg", "g_b_hz", "g_r_hz", "gate_amplitude_hz")
SWEEP_OBJECTIVES = (
    "p_se_carrier_be",
    "clock_objective",
    "stark_exact",
    "stark_approx",
    "carrier_rabi",
    "force_ratio",
    "gate_phase",
)

# option name -> (section, type, default)
OPTIONS = {
    "ion": ("beams", str, "9Be+"),
    "g_b_hz": ("beams", float, 3e8),
    "g_r_hz": ("beams", float, 3e8),
    "delta_hz": ("beams", float, None),
    "pol_b": ("beams", str, "0,1,0"),
    "pol_r": ("beams", str, "0.7071067811865476,0,0.7071067811865476"),
    "phase_deg": ("beams", float, 0.0),
    "kappa_deg": ("gate", float, 90.0),
    "eta": ("beams", float, None),
    "rabi_ref_hz": ("run", float, 1e6),
    "gate_detuning_hz": ("gate", float, 20e3),
    "omega_z_hz": ("gate", float, 3.6e6),
    "n_max": ("gate", int, None),
    "loops": ("gate", int, 1),
    "method": ("gate", str, "numeric"),
    "target_phase_deg": ("gate", float, 90.0),
    "trajectory": ("gate", str, None),
    "samples": ("gate", int, 256),
    "kind": ("pulse", str, "carrier"),
    "rabi_hz": ("pulse", float, 100e3),
    "duration_s": ("pulse", float, None),
    "area": ("pulse", float, 1.0),
    "initial": ("pulse", str, "down,0=1"),
    "exact_dw": ("pulse", bool, False),
    "param": ("sweep", str, "delta_hz"),
    "start": ("sweep", float, None),
    "stop": ("sweep", float, None),
    "num": ("sweep", int, 11),
    "objective": ("sweep", str, "p_se_carrier_be"),
}
PULSE_KEYS = ("kind", "rabi_hz", "eta", "phase_deg", "duration_s", "area", "n_max", "initial", "exact_dw")


@dataclass
class RunConfig:
    command: str
    ion_db_path: Optional[str] = None
    output_format: str = "json"
    output_path: Optional[str] = None
    values: dict = field(default_factory=dict)
    pulses: list = field(default_factory=list)

    def get(self, key):
        if key in self.values and self.values[key] is not None:
            return self.values[key]
        return OPTIONS[key][2]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--ion-db", dest="ion_db", help="ion database CSV (default: $TRAPION_ION_DB or shipped table)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS, help="output format (default json)")
    common.add_argument("--config", help="INI-style configuration file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="trapion", description="Trapped-ion Raman coupling budgets and gate simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def beam_flags(p):
        p.add_argument("--ion", help="ion name from the database (default 9Be+)")
        p.add_argument("--g-b-hz", type=float, help="blue-beam coupling g_b / 2pi")
        p.add_argument("--g-r-hz", type=float, help="red-beam coupling g_r / 2pi")
        p.add_argument("--delta-hz", type=float, help="Raman detuning from 2P1/2 (default (sqrt2-1) nu_F)")
        p.add_argument("--pol-b", help="blue polarization 'e-,e0,e+' (complex allowed)")
        p.add_argument("--pol-r", help="red polarization 'e-,e0,e+'")
        p.add_argument("--phase-deg", type=float, help="phase difference phi_b - phi_r")
        p.add_argument("--kappa-deg", type=float, help="red/blue linear polarization angle")

    def gate_flags(p):
        p.add_argument("--gate-detuning-hz", type=float, help="force detuning delta / 2pi from the stretch mode")
        p.add_argument("--omega-z-hz", type=float, help="axial COM frequency nu_z")
        p.add_argument("--n-max", type=int, help="Fock truncation")
        p.add_argument("--loops", type=int, help="number of phase-space loops")
        p.add_argument("--method", choices=geomgate.METHODS)
        p.add_argument("--target-phase-deg", type=float)
        p.add_argument("--trajectory", help="write phase-space trajectory CSV here")
        p.add_argument("--samples", type=int, help="trajectory samples per loop")

    p = sub.add_parser("ions-table", parents=[common], help="spontaneous-emission table")
    p.add_argument("--rabi-ref-hz", type=float, help="reference |Omega_00|/2pi for absolute rates")

    p = sub.add_parser("budget", parents=[common], help="9Be+ carrier budget")
    beam_flags(p)
    p.add_argument("--eta", type=float, help="also report the sideband emission probability")

    p = sub.add_parser("gate-simulate", parents=[common], help="two-ion geometric phase gate")
    beam_flags(p)
    gate_flags(p)

    p = sub.add_parser("pulse", parents=[common], help="apply resonant pulses")
    p.add_argument("--kind", choices=dynamics.RESONANT_KINDS)
    p.add_argument("--rabi-hz", type=float, help="carrier Rabi rate Omega / 2pi")
    p.add_argument("--eta", type=float, help="Lamb-Dicke parameter")
    p.add_argument("--phase-deg", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--duration-s", type=float)
    g.add_argument("--area", type=float, help="pulse area in units of pi pulses on the lowest pair")
    p.add_argument("--n-max", type=int)
    p.add_argument("--initial", help="initial amplitudes, e.g. 'down,0=0.6;up,0=0.8j'")
    p.add_argument("--exact-dw", action="store_true", default=None, help="use exact Debye-Waller rates")

    p = sub.add_parser("sweep", parents=[common], help="scan one scalar")
    beam_flags(p)
    gate_flags(p)
    p.add_argument("--param", choices=SWEEP_PARAMS)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--objective", choices=SWEEP_OBJECTIVES)
    return parser


def _convert(key, raw, typ, where):
    if raw is None:
        return None
    if typ is bool:
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{where}: '{key}' expects a boolean, got {raw!r}")
    try:
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: '{key}' has invalid value {raw!r}") from exc


def load_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    cfg = RunConfig(command=args.command)
    if args.config:
        _apply_config_file(cfg, Path(args.config))
    for key, value in vars(args).items():
        if value is None or key in ("command", "config", "verbose"):
            continue
        if key == "ion_db":
            cfg.ion_db_path = value
        elif key == "out":
            cfg.output_path = value
        elif key == "format":
            cfg.output_format = value
        else:
            cfg.values[key] = value
    if cfg.command == "pulse":
        base = {k: cfg.values.get(k) for k in PULSE_KEYS if cfg.values.get(k) is not None}
        if not cfg.pulses:
            cfg.pulses = [base]
        elif base:
            # flags given on the command line apply to every segment
            cfg.pulses = [{**p, **base} for p in cfg.pulses]
    _validate(cfg)
    return cfg


def _apply_config_file(cfg: RunConfig, path: Path) -> None:
    parser = configparser.ConfigParser()
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc.message if hasattr(exc, 'message') else exc}") from exc
    for section in parser.sections():
        items = dict(parser.items(section))
        where = f"{path}[{section}]"
        if section == "run":
            cfg.ion_db_path = items.pop("ion_db", cfg.ion_db_path)
            cfg.output_format = items.pop("format", cfg.output_format)
            if cfg.output_format == "text-table":
                cfg.output_format = "table"
            cfg.output_path = items.pop("out", cfg.output_path)
        if section == "pulse" or section.startswith("pulse."):
            seg = {}
            for key, raw in items.items():
                if key not in PULSE_KEYS:
                    raise ConfigError(f"{where}: unknown key '{key}'")
                seg[key] = _convert(key, raw, OPTIONS[key][1], where)
            cfg.pulses.append((section, seg))
            continue
        for key, raw in items.items():
            if key not in OPTIONS:
                raise ConfigError(f"{where}: unknown key '{key}'")
            cfg.values[key] = _convert(key, raw, OPTIONS[key][1], where)
    cfg.pulses = [seg for _, seg in sorted(cfg.pulses, key=lambda p: _pulse_order(p[0]))]
    if cfg.output_format not in FORMATS:
        raise ConfigError(f"{path}[run]: format must be one of {FORMATS}, got {cfg.output_format!r}")


def _pulse_order(section: str):
    if section == "pulse":
        return 0
    tail = section.split(".", 1)[1]
    try:
        return int(tail)
    except ValueError as exc:
        raise ConfigError(f"pulse section '{section}' must be numbered, e.g. [pulse.1]") from exc


POSITIVE = ("g_b_hz", "g_r_hz", "gate_detuning_hz", "omega_z_hz", "rabi_ref_hz", "rabi_hz", "samples", "num", "loops")


def _validate(cfg: RunConfig) -> None:
    for key in POSITIVE:
        v = cfg.values.get(key)
        if v is not None and not v > 0:
            raise ConfigError(f"'{key}' must be positive, got {v!r}")
    for key in ("eta",):
        v = cfg.values.get(key)
        if v is not None and not 0 < v < 1:
            raise ConfigError(f"'eta' must lie in (0, 1), got {v!r}")
    n_max = cfg.values.get("n_max")
    if n_max is not None and n_max < 1:
        raise ConfigError(f"'n_max' must be >= 1, got {n_max!r}")
    if cfg.command == "sweep":
        if cfg.get("param") not in SWEEP_PARAMS:
            raise ConfigError(f"sweep param must be one of {SWEEP_PARAMS}")
        if cfg.get("objective") not in SWEEP_OBJECTIVES:
            raise ConfigError(f"sweep objective must be one of {SWEEP_OBJECTIVES}")
        if cfg.get("start") is None or cfg.get("stop") is None:
            raise ConfigError("sweep needs --start and --stop")


# --- parsing helpers ---------------------------------------------------------


def parse_polarization(text: str, name: str = "polarization") -> rc.Polarization:
    """Parse ``'e-,e0,e+'``; near-normalized input is renormalized with a
    warning, anything off by more than 1e-6 is rejected."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{name}: expected three components 'e-,e0,e+', got {text!r}")
    try:
        comps = [complex(p.replace(" ", "")) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r}") from exc
    norm2 = sum(abs(c) ** 2 for c in comps)
    if abs(norm2 - 1.0) > POL_RENORM_TOL:
        raise ConfigError(f"{name}: components not normalized (sum |e|^2 = {norm2:.9g})")
    if abs(norm2 - 1.0) > rc.POL_TOL:
        log.warning("%s renormalized (sum |e|^2 = %.12g)", name, norm2)
    return rc.Polarization.normalized(*comps)


def parse_initial_state(text: str, n_max: int) -> FockSpinState:
    spins = {"down": 0, "d": 0, "up": 1, "u": 1}
    comps = {}
    for item in filter(None, (s.strip() for s in str(text).split(";"))):
        try:
            key, amp = item.split("=")
            spin, n = key.split(",")
            comps[(spins[spin.strip().lower()], int(n))] = complex(amp.strip().replace(" ", ""))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"initial state: cannot parse {item!r} (expected e.g. 'down,0=0.6')") from exc
    if not comps:
        raise ConfigError("initial state is empty")
    for (_, n) in comps:
        if not 0 <= n <= n_max:
            raise ConfigError(f"initial state: level {n} outside 0..{n_max}")
    norm2 = sum(abs(c) ** 2 for c in comps.values())
    if abs(norm2 - 1.0) > POL_RENORM_TOL:
        raise ConfigError(f"initial state not normalized (sum |c|^2 = {norm2:.9g})")
    return FockSpinState.from_components(comps, 2, n_max, normalize=True)


def _ions(cfg: RunConfig):
    return load_ion_db(cfg.ion_db_path)


def _beams(cfg: RunConfig, ion: rc.IonSpecies) -> rc.RamanBeamPair:
    delta_hz = cfg.get("delta_hz")
    delta = TWO_PI * delta_hz if delta_hz is not None else rc.DELTA_OPT_FRACTION * ion.omega_F
    return rc.RamanBeamPair(
        g_b=TWO_PI * cfg.get("g_b_hz"),
        g_r=TWO_PI * cfg.get("g_r_hz"),
        pol_b=parse_polarization(cfg.get("pol_b"), "pol_b"),
        pol_r=parse_polarization(cfg.get("pol_r"), "pol_r"),
        detuning_Delta=delta,
        phase_diff=math.radians(cfg.get("phase_deg")),
        kappa=math.radians(cfg.get("kappa_deg")),
    )


def _gate_beams(cfg: RunConfig, ion: rc.IonSpecies) -> rc.RamanBeamPair:
    beams = _beams(cfg, ion)
    kappa = beams.kappa
    return rc.RamanBeamPair(
        beams.g_b, beams.g_r, rc.Polarization.linear_perpendicular(0.0),
        rc.Polarization.linear_perpendicular(kappa), beams.detuning_Delta, beams.phase_diff, kappa,
    )


# --- commands ----------------------------------------------------------------


def cmd_ions_table(cfg: RunConfig):
    rows_out = budget.generate_table1(_ions(cfg), TWO_PI * cfg.get("rabi_ref_hz"))
    columns = [
        "ion", "nuclear_spin_I", "gamma_2pi_hz", "nu_F_hz", "nu_0_hz", "optimal_delta_hz",
        "carrier_rabi_rad_s", "stark_shift_rad_s", "se_rate_per_s", "p_se_pi", "stark_over_rabi",
    ]
    rows, records = [], []
    for r in rows_out:
        ion = r.ion
        row = [
            ion.name, str(ion.nuclear_spin_I), ion.gamma / TWO_PI, ion.omega_F / TWO_PI, ion.omega_0 / TWO_PI,
            r.optimal_Delta / TWO_PI, r.carrier_rabi, r.stark_shift, r.se_rate, r.p_se_pi, r.stark_over_rabi,
        ]
        rows.append(row)
        records.append(dict(zip(columns, row)))
    payload = {"command": "ions-table", "optimal_delta_source": "derived", "rows": records}
    return payload, columns, rows, {}


def cmd_budget(cfg: RunConfig):
    ion = find_ion(_ions(cfg), cfg.get("ion"))
    beams = _beams(cfg, ion)
    rabi = rc.carrier_rabi_be(beams, ion)
    rate = rc.se_rate_be(beams, ion, 0.5, 0.5)
    quantities = {
        "carrier_rabi_re_rad_s": rabi.real,
        "carrier_rabi_im_rad_s": rabi.imag,
        "carrier_rabi_abs_rad_s": abs(rabi),
        "stark_shift_rad_s": rc.stark_shift_be(beams, ion),
        "stark_shift_approx_rad_s": rc.stark_shift_be_approx(beams, ion),
        "se_rate_per_s": rate,
        "p_se_pi": rc.p_se_carrier_pi_be(beams, ion),
        "stark_over_rabi": abs(rc.stark_shift_be(beams, ion) / abs(rabi)) if abs(rabi) > 0 else float("inf"),
    }
    eta = cfg.get("eta")
    if eta is not None:
        quantities["p_se_sideband"] = quantities["p_se_pi"] / eta
    payload = {
        "command": "budget",
        "ion": ion.name,
        "delta_hz": beams.detuning_Delta / TWO_PI,
        "g_b_hz": beams.g_b / TWO_PI,
        "g_r_hz": beams.g_r / TWO_PI,
        "quantities": quantities,
    }
    return payload, ["quantity", "value"], [[k, v] for k, v in quantities.items()], {}


def cmd_gate_simulate(cfg: RunConfig):
    ion = find_ion(_ions(cfg), cfg.get("ion"))
    beams = _gate_beams(cfg, ion)
    om_down = rc.displacement_rabi_be(beams, "down", ion)
    om_up = rc.displacement_rabi_be(beams, "up", ion)
    if abs(om_up) == 0:
        raise TrapIonError("up-state force vanishes; force ratio undefined")
    ratio = om_down / om_up
    if abs(ratio - 1) < 1e-12:
        raise TrapIonError("equal forces on both spin states; the stretch mode is never driven")
    try:
        schedule = geomgate.GateSchedule(
            delta=TWO_PI * cfg.get("gate_detuning_hz"),
            omega_z=TWO_PI * cfg.get("omega_z_hz"),
            kappa=beams.kappa,
            loop_count=cfg.get("loops"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    n_max = cfg.get("n_max") or 40
    method = cfg.get("method")
    target = math.radians(cfg.get("target_phase_deg"))
    amplitude = geomgate.calibrate_amplitude(schedule, target, n_max, method)
    forces = geomgate.forces_for_amplitude(amplitude, ratio)
    extra = {}
    sink, traj = (None, None)
    if cfg.get("trajectory"):
        sink, traj = geomgate.trajectory_recorder(n_max)
    report = geomgate.simulate_gate(schedule, forces, n_max, method, sink, cfg.get("samples"))
    gate = geomgate.assemble_pi_phase_gate(report)
    if traj is not None:
        extra[cfg.get("trajectory")] = to_csv(("t_seconds", "basis_label", "re_alpha", "im_alpha"), traj)
    payload = {
        "command": "gate-simulate",
        "ion": ion.name,
        "delta_raman_hz": beams.detuning_Delta / TWO_PI,
        "kappa_deg": math.degrees(beams.kappa),
        "force_ratio_re": ratio.real,
        "force_ratio_im": ratio.imag,
        "gate_detuning_hz": schedule.delta / TWO_PI,
        "stretch_freq_hz": schedule.stretch_freq / TWO_PI,
        "duration_s": schedule.duration,
        "n_max": n_max,
        "method": method,
        "calibrated_amplitude_rad_s": amplitude,
        "loop_radius": amplitude / schedule.delta,
        "basis": list(geomgate.BASIS_LABELS),
        "phases": [float(p) for p in report.phases],
        "motional_return_fidelity": [float(f) for f in report.motional_return_fidelity],
        "excitation": [float(e) for e in report.excitation],
        "entangling_phase": float(report.entangling_phase),
        "pi_gate_phases": [float(cmath.phase(z)) for z in np.diag(gate.unitary)],
        "pi_gate_max_deviation": gate.max_phase_deviation,
    }
    columns = ["basis", "phase_rad", "motional_return_fidelity", "excitation"]
    rows = [
        [lab, float(p), float(f), float(e)]
        for lab, p, f, e in zip(geomgate.BASIS_LABELS, report.phases, report.motional_return_fidelity, report.excitation)
    ]
    return payload, columns, rows, extra


def _segment(entry: dict) -> dynamics.PulseSegment:
    kind = entry.get("kind", OPTIONS["kind"][2])
    if kind not in dynamics.RESONANT_KINDS:
        raise ConfigError(f"pulse kind must be one of {dynamics.RESONANT_KINDS}, got {kind!r}")
    rabi = TWO_PI * entry.get("rabi_hz", OPTIONS["rabi_hz"][2])
    eta = entry.get("eta") or 0.0
    if kind != "carrier" and not 0 < eta < 1:
        raise ConfigError(f"{kind} pulse needs 0 < eta < 1, got {eta!r}")
    duration = entry.get("duration_s")
    if duration is None:
        duration = entry.get("area", 1.0) * dynamics.pi_time(kind, rabi, eta)
    if duration < 0:
        raise ConfigError(f"pulse duration must be non-negative, got {duration!r}")
    return dynamics.PulseSegment(kind, rabi, duration, math.radians(entry.get("phase_deg") or 0.0), eta)


def cmd_pulse(cfg: RunConfig):
    n_max = cfg.get("n_max") or 10
    state = parse_initial_state(cfg.get("initial"), n_max)
    segments = [_segment(entry) for entry in cfg.pulses]
    exact = bool(cfg.get("exact_dw"))
    for entry, seg in zip(cfg.pulses, segments):
        state = dynamics.apply_resonant_pulse(state, seg, exact_dw=bool(entry.get("exact_dw", exact)))
    columns = ["spin", "n", "re", "im", "population"]
    rows = [
        [spin, n, float(c.real), float(c.imag), float(abs(c) ** 2)]
        for (spin, n), c in zip(state.labels(), state.amplitudes)
    ]
    payload = {
        "command": "pulse",
        "n_max": n_max,
        "segments": [
            {"kind": s.kind, "rabi_rad_s": abs(s.rabi), "eta": s.eta, "phase_rad": s.phase, "duration_s": s.duration}
            for s in segments
        ],
        "amplitudes": [dict(zip(columns, r)) for r in rows],
    }
    return payload, columns, rows, {}


def _sweep_objective(cfg: RunConfig, ion, name: str, param: str, value: float) -> float:
    local = RunConfig(cfg.command, cfg.ion_db_path, values=dict(cfg.values))
    if param != "gate_amplitude_hz":
        local.values[param] = value
    if name == "gate_phase":
        schedule = geomgate.GateSchedule(
            TWO_PI * local.get("gate_detuning_hz"), TWO_PI * local.get("omega_z_hz"),
            loop_count=local.get("loops"),
        )
        amp = TWO_PI * value if param == "gate_amplitude_hz" else 0.0
        rep = geomgate.simulate_gate(schedule, geomgate.forces_for_amplitude(amp), local.get("n_max") or 40, "analytic")
        return float(rep.phases[1])
    if name == "force_ratio":
        beams = _gate_beams(local, ion)
        return abs(rc.displacement_rabi_be(beams, "down", ion) / rc.displacement_rabi_be(beams, "up", ion))
    if name == "clock_objective":
        beams = _beams(local, ion)
        ortho = rc.orthogonal_linear_beams(ion, beams.g_b, beams.detuning_Delta)
        return rc.clock_se_rate(ortho, ion) / abs(rc.clock_rabi(ortho, ion))
    beams = _beams(local, ion)
    if name == "p_se_carrier_be":
        return rc.p_se_carrier_pi_be(beams, ion)
    if name == "stark_exact":
        return rc.stark_shift_be(beams, ion)
    if name == "stark_approx":
        return rc.stark_shift_be_approx(beams, ion)
    if name == "carrier_rabi":
        return abs(rc.carrier_rabi_be(beams, ion))
    raise ConfigError(f"unknown objective {name!r}")


def cmd_sweep(cfg: RunConfig):
    ion = find_ion(_ions(cfg), cfg.get("ion"))
    param, objective = cfg.get("param"), cfg.get("objective")
    values = np.linspace(cfg.get("start"), cfg.get("stop"), cfg.get("num"))
    rows = [[float(v), _sweep_objective(cfg, ion, objective, param, float(v))] for v in values]
    payload = {
        "command": "sweep",
        "ion": ion.name,
        "param": param,
        "objective": objective,
        "points": [{param: v, objective: y} for v, y in rows],
    }
    return payload, [param, objective], rows, {}


HANDLERS = {
    "ions-table": cmd_ions_table,
    "budget": cmd_budget,
    "gate-simulate": cmd_gate_simulate,
    "pulse": cmd_pulse,
    "sweep": cmd_sweep,
}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    payload, columns, rows, extra = HANDLERS[cfg.command](cfg)
    text = render(cfg.output_format, payload, columns, rows)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    for path, content in extra.items():
        Path(path).write_text(content, encoding="utf-8")
    return EXIT_OK


def _error_record(exc: BaseException, code: int) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sort_keys=True)


def main(argv=None) -> int:
    try:
        return run(load_config(argv))
    except (ConfigError, OSError) as exc:
        return _fail(exc, EXIT_CONFIG)
    except (TrapIonError, ValueError, ArithmeticError) as exc:
        return _fail(exc, EXIT_NUMERIC)


def _fail(exc: BaseException, code: int) -> int:
    sys.stderr.write(_error_record(exc, code) + "\n")
    return code

if __name__ == "__main__":
    sys.exit(main())
