"""Configuration ingestion, scenario execution, sweeps, and report emission.

Configs are JSON documents in SI units; internally every run is normalized
to pulse-FWHM units (times divided by the FWHM, rates multiplied by it) and
the normalization is recorded in the summary.  Time series go to plain
ASCII CSV with a fixed column order and 17-significant-digit floats; every
output file carries the tool version and a SHA-256 hash of the canonical
config, so identical configs produce byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, RamanMemError
from .model import (
    MemoryParams,
    ScenarioConfig,
    SPEED_OF_LIGHT,
    backward_schedule,
    build_mode_grid,
    derive_params,
    forward_schedule,
    make_gaussian_pulse,
)
from .dynamics import Trajectory, integrate
from .analytics import (
    CrosstalkSpec,
    capacity,
    crosstalk_approx,
    crosstalk_exact,
    crosstalk_report,
)
from .ensemble import compare_models, integrate_full, oracle_step, \
    uniform_ensemble

OUTDIR_ENV = "RAMANMEM_OUTDIR"


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

@dataclass
class PhysicalConfig:
    coupling_g: float = 1.0        # rad/s
    atom_number: float = 4096.0
    rabi: float = 0.0              # rad/s
    detuning: float = 1.0          # rad/s
    gamma_p: float = 0.0           # rad/s
    gamma_s: float = 0.0           # rad/s
    kappa: float = 1.0             # rad/s
    length: float = 1.0            # m
    omega_c: float = SPEED_OF_LIGHT  # rad/s


@dataclass
class ScheduleSpec:
    slope: float = 1.0             # dn_c/dt (1/s), storage side
    flip_time: float = 0.0         # s
    mode: str = "backward"         # "backward" | "forward"
    base_index: float = 1.0


@dataclass
class PulseSpec:
    shape: str = "gaussian"
    fwhm: float = 1.0              # s (intensity FWHM)
    center: float = -3.0           # s


@dataclass
class ScenarioSpec:
    start: float = -6.0            # s
    end: float = 6.0               # s
    phase_compensation: bool = True


@dataclass
class NumericSpec:
    dt: float = 5e-4               # s
    guard: float = 5.0             # s
    max_modes: int = 512


@dataclass
class OutputSpec:
    directory: str = ""
    prefix: str = "run"


@dataclass
class RunConfig:
    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    numeric: NumericSpec = field(default_factory=NumericSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 0


@dataclass
class SweepSpec:
    parameter: str                 # dotted config path, e.g. "physical.kappa"
    values: list
    base: RunConfig = field(default_factory=RunConfig)
    workers: int = 1

    def __post_init__(self):
        if not self.values:
            raise ConfigError("sweep needs at least one point")
        probe = self.base
        for part in self.parameter.split("."):
            if not dataclasses.is_dataclass(probe) or part not in {
                    f.name for f in dataclasses.fields(probe)}:
                raise ConfigError(f"unknown sweep parameter {self.parameter!r}")
            probe = getattr(probe, part)


def _from_dict(cls, data, path="config"):
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(names)
    if unknown:
        raise ConfigError(f"unknown keys in {path}: {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        f = names[key]
        if dataclasses.is_dataclass(f.type) or (
                isinstance(f.type, str) and f.type in _NESTED):
            kwargs[key] = _from_dict(_NESTED[f.type] if isinstance(f.type, str)
                                     else f.type, value, f"{path}.{key}")
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


_NESTED = {c.__name__: c for c in (PhysicalConfig, ScheduleSpec, PulseSpec,
                                   ScenarioSpec, NumericSpec, OutputSpec,
                                   RunConfig)}


def config_from_dict(data) -> RunConfig:
    cfg = _from_dict(RunConfig, data)
    _validate_config(cfg)
    return cfg


def config_to_dict(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)


def _validate_config(cfg: RunConfig):
    if cfg.pulse.shape != "gaussian":
        raise ConfigError(f"unsupported pulse shape {cfg.pulse.shape!r}")
    if cfg.schedule.mode not in ("backward", "forward"):
        raise ConfigError(f"unsupported retrieval mode {cfg.schedule.mode!r}")
    if not (cfg.scenario.start < cfg.schedule.flip_time < cfg.scenario.end):
        raise ConfigError("need start < flip_time < end")
    for name in ("fwhm",):
        if getattr(cfg.pulse, name) <= 0:
            raise ConfigError(f"pulse.{name} must be positive")
    if cfg.numeric.dt <= 0:
        raise ConfigError("numeric.dt must be positive")
    if cfg.schedule.slope <= 0:
        raise ConfigError("schedule.slope must be positive")


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(config_to_dict(cfg), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def apply_override(cfg: RunConfig, dotted: str, raw: str) -> RunConfig:
    """Set one dotted-path field from its string representation."""
    parts = dotted.split(".")
    data = config_to_dict(cfg)
    node = data
    for part in parts[:-1]:
        if part not in node:
            raise ConfigError(f"unknown config path {dotted!r}")
        node = node[part]
    leaf = parts[-1]
    if leaf not in node:
        raise ConfigError(f"unknown config path {dotted!r}")
    current = node[leaf]
    if isinstance(current, bool):
        node[leaf] = raw.lower() in ("1", "true", "yes", "on")
    elif isinstance(current, int) and not isinstance(current, bool):
        node[leaf] = int(raw)
    elif isinstance(current, float):
        node[leaf] = float(raw)
    else:
        node[leaf] = raw
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# unit normalization and assembly
# ---------------------------------------------------------------------------

def _internal_setup(cfg: RunConfig):
    """Normalize the SI config to pulse-FWHM units and build run objects."""
    u = cfg.pulse.fwhm  # time unit (s)
    phys = cfg.physical
    params = MemoryParams.create(
        coupling_g=phys.coupling_g * u,
        atom_number=phys.atom_number,
        rabi=phys.rabi * u,
        detuning=phys.detuning * u,
        gamma_p=phys.gamma_p * u,
        gamma_s=phys.gamma_s * u,
        kappa=phys.kappa * u,
        length=phys.length,
        omega_c=phys.omega_c,
    )
    slope = cfg.schedule.slope * u
    t0 = cfg.scenario.start / u
    ts = cfg.schedule.flip_time / u
    t1 = cfg.scenario.end / u
    k_per_index = phys.omega_c / SPEED_OF_LIGHT
    builder = backward_schedule if cfg.schedule.mode == "backward" \
        else forward_schedule
    schedule = builder(t0, ts, t1, slope, k_per_index,
                       n_start=cfg.schedule.base_index)
    derived = derive_params(params, slope)
    modes = build_mode_grid(schedule, derived, (t0, t1),
                            guard=cfg.numeric.guard / u,
                            max_modes=cfg.numeric.max_modes)
    dt = cfg.numeric.dt / u
    center = cfg.pulse.center / u
    grid = center + np.arange(-math.ceil(6.5 / dt),
                              math.ceil(6.5 / dt) + 1) * dt
    pulse = make_gaussian_pulse(1.0, center, grid)
    scenario = ScenarioConfig(t0, ts, t1, cfg.schedule.mode,
                              cfg.scenario.phase_compensation)
    return params, derived, schedule, modes, pulse, scenario, dt, u


# ---------------------------------------------------------------------------
# file emission
# ---------------------------------------------------------------------------

def _fmt(x):
    return f"{x:.17g}"


def write_trajectory_csv(path, traj: Trajectory, digest: str):
    lines = [f"# ramanmem {__version__}", f"# config_sha256={digest}",
             "t,e_in_re,e_in_im,e_cav_re,e_cav_im,e_out_re,e_out_im,spin_norm"]
    for i in range(traj.t.size):
        lines.append(",".join([
            _fmt(traj.t[i]),
            _fmt(traj.e_in[i].real), _fmt(traj.e_in[i].imag),
            _fmt(traj.e_cav[i].real), _fmt(traj.e_cav[i].imag),
            _fmt(traj.e_out[i].real), _fmt(traj.e_out[i].imag),
            _fmt(traj.spin_norm[i]),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_json(path, payload: dict):
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n",
        newline="\n")


def _outdir(cfg_dir, flag_dir):
    out = flag_dir or cfg_dir or os.environ.get(OUTDIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def run_scenario(cfg: RunConfig, outdir=None, write_files=True):
    """Integrate one configured scenario; returns the summary dict."""
    params, derived, schedule, modes, pulse, scenario, dt, u = \
        _internal_setup(cfg)
    traj = integrate(params, derived, schedule, modes, pulse, scenario, dt)
    ledger = traj.energy_ledger()
    e_in = ledger["input_energy"]
    eta = ledger["retrieved_energy"] / e_in
    reflected = ledger["reflected_energy"] / e_in
    residual = abs(derived.Gamma / params.kappa - 1.0)
    summary = {
        "version": __version__,
        "config_sha256": config_hash(cfg),
        "eta_retrieved": eta,
        "reflected_fraction": reflected,
        "Gamma": derived.Gamma / u,
        "kappa": params.kappa / u,
        "gamma_prime": derived.gamma_prime / u,
        "cooperativity": derived.cooperativity,
        "delta": derived.delta * u,
        "beta": derived.beta / u,
        "dn_used": schedule.index_excursion(scenario.t_start,
                                            scenario.t_switch),
        "impedance_residual": residual,
        "modes": modes.count,
        "time_unit_s": u,
        "energy_ledger": {k: v for k, v in ledger.items()},
    }
    if write_files:
        digest = summary["config_sha256"]
        out = _outdir(cfg.output.directory, outdir)
        write_trajectory_csv(out / f"{cfg.output.prefix}_trajectory.csv",
                             traj, digest)
        write_json(out / f"{cfg.output.prefix}_summary.json", summary)
    return summary, traj


def run_sweep(spec: SweepSpec, outdir=None, write_files=True):
    """Run one scenario per sweep value; failed points are marked, not fatal."""

    def one(idx_value):
        idx, value = idx_value
        try:
            cfg = apply_override(spec.base, spec.parameter, repr(float(value)))
            summary, _ = run_scenario(cfg, write_files=False)
            return (idx, value, summary, "ok")
        except Exception as exc:  # noqa: BLE001 - per-row isolation
            return (idx, value, None, f"failed: {type(exc).__name__}")

    items = list(enumerate(spec.values))
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(item) for item in items]
    rows.sort(key=lambda r: r[0])
    header = f"{spec.parameter},eta,reflected_fraction,impedance_residual,status"
    lines = [f"# ramanmem {__version__}",
             f"# sweep config_sha256={config_hash(spec.base)}", header]
    table = []
    for idx, value, summary, status in rows:
        if summary is None:
            lines.append(f"{_fmt(value)},nan,nan,nan,{status}")
        else:
            lines.append(",".join([
                _fmt(value), _fmt(summary["eta_retrieved"]),
                _fmt(summary["reflected_fraction"]),
                _fmt(summary["impedance_residual"]), status]))
        table.append((value, summary, status))
    if write_files:
        out = _outdir(spec.base.output.directory, outdir)
        Path(out / f"{spec.base.output.prefix}_sweep.csv").write_text(
            "\n".join(lines) + "\n", newline="\n")
    return table


def run_analysis(kind: str, options: dict, outdir=None, write_files=True,
                 prefix="analysis"):
    """Closed-form analysis reports (capacity or crosstalk) as JSON."""
    if kind == "capacity":
        allowed = {"T", "delta", "wavelength", "length", "dn_total",
                   "cooperativity"}
        unknown = set(options) - allowed
        if unknown:
            raise ConfigError(f"unknown capacity keys: {sorted(unknown)}")
        try:
            report = capacity(**options)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        payload = {
            "version": __version__,
            "kind": "capacity",
            "dn_min_per_pulse": report.dn_min_per_pulse,
            "pulses_storable": report.pulses_storable,
            "delay_bandwidth_estimate": report.delay_bandwidth_estimate,
            "note": report.note,
        }
    elif kind == "crosstalk":
        allowed = {"m", "delta_omega", "omega", "length", "wavelength",
                   "index_n", "n_channels"}
        unknown = set(options) - allowed
        if unknown:
            raise ConfigError(f"unknown crosstalk keys: {sorted(unknown)}")
        options = dict(options)
        n_channels = int(options.pop("n_channels", 100))
        try:
            spec = CrosstalkSpec(**options)
            approx = crosstalk_approx(spec)
            exact = crosstalk_exact(spec)
            report = crosstalk_report(spec, n_channels=n_channels)
        except (TypeError, RamanMemError) as exc:
            raise ConfigError(str(exc)) from exc
        payload = {
            "version": __version__,
            "kind": "crosstalk",
            "m": spec.m,
            "p_m_approx": approx,
            "p_m_exact": exact,
            "sum_over_modes": report["sum_over_modes"],
            "uniform_bound_total": report["uniform_bound_total"],
            "snr_uniform_bound": report["snr_uniform_bound"],
            "n_channels": n_channels,
        }
    else:
        raise ConfigError(f"unknown analysis kind {kind!r}")
    if write_files:
        out = _outdir("", outdir)
        write_json(out / f"{prefix}_{kind}.json", payload)
    return payload


def run_validate(cfg: RunConfig, n_atoms=512, outdir=None, write_files=True):
    """Cross-check the collective run against the full-atom model."""
    params, derived, schedule, modes, pulse, scenario, dt, u = \
        _internal_setup(cfg)
    collective = integrate(params, derived, schedule, modes, pulse, scenario,
                           dt)
    ens = uniform_ensemble(n_atoms, params.length)
    dt_full, stride = oracle_step(params, dt)
    full, _ = integrate_full(params, ens, schedule, pulse, scenario, dt_full,
                             modes=modes, record_stride=stride)
    comp = compare_models(full, collective)
    payload = {
        "version": __version__,
        "config_sha256": config_hash(cfg),
        "n_atoms": n_atoms,
        "dt_full": dt_full * u,
        "l2_e_out": comp.l2_e_out,
        "l2_spin_profile": comp.l2_spin_profile,
        "efficiency_diff": comp.efficiency_diff,
        "note": comp.note,
    }
    if write_files:
        digest = config_hash(cfg)
        out = _outdir(cfg.output.directory, outdir)
        write_json(out / f"{cfg.output.prefix}_validate.json", payload)
        write_trajectory_csv(out / f"{cfg.output.prefix}_full_trajectory.csv",
                             full, digest)
        lines = [f"# ramanmem {__version__}", f"# config_sha256={digest}",
                 "t_q,q,residual_abs"]
        for tq, q, r in zip(modes.t_q, modes.q, comp.per_mode_residual):
            lines.append(f"{_fmt(tq)},{_fmt(q)},{_fmt(r)}")
        Path(out / f"{cfg.output.prefix}_mode_residuals.csv").write_text(
            "\n".join(lines) + "\n", newline="\n")
    return payload


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_config(path, overrides):
    if path is None:
        cfg = RunConfig()
    else:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = config_from_dict(data)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, _, raw = item.partition("=")
        cfg = apply_override(cfg, key, raw)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ramanmem",
        description="Cavity Raman memory with refractive-index control")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one storage/retrieval scenario")
    p_sim.add_argument("--config", help="JSON config file")
    p_sim.add_argument("--set", action="append", dest="overrides",
                       metavar="KEY=VALUE", help="dotted-path override")
    p_sim.add_argument("--out", help="output directory")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", help="base JSON config file")
    p_sweep.add_argument("--set", action="append", dest="overrides")
    p_sweep.add_argument("--parameter", required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated numeric values")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", help="output directory")

    p_an = sub.add_parser("analyze", help="closed-form capacity/crosstalk report")
    p_an.add_argument("--kind", choices=("capacity", "crosstalk"),
                      required=True)
    p_an.add_argument("--config", required=True, help="JSON options file")
    p_an.add_argument("--out", help="output directory")

    p_val = sub.add_parser("validate",
                           help="compare collective and full-atom models")
    p_val.add_argument("--config", help="JSON config file")
    p_val.add_argument("--set", action="append", dest="overrides")
    p_val.add_argument("--atoms", type=int, default=512)
    p_val.add_argument("--out", help="output directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = _load_config(args.config, args.overrides)
            summary, _ = run_scenario(cfg, outdir=args.out)
            print(json.dumps({"eta_retrieved": summary["eta_retrieved"],
                              "reflected_fraction":
                                  summary["reflected_fraction"]}))
        elif args.command == "sweep":
            cfg = _load_config(args.config, args.overrides)
            try:
                values = [float(v) for v in args.values.split(",") if v]
            except ValueError as exc:
                raise ConfigError(f"bad sweep values: {exc}") from exc
            spec = SweepSpec(args.parameter, values, cfg, args.workers)
            table = run_sweep(spec, outdir=args.out)
            ok = sum(1 for _, _, status in table if status == "ok")
            print(f"swept {len(table)} points, {ok} ok")
        elif args.command == "analyze":
            try:
                options = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(str(exc)) from exc
            kind = args.kind
            payload = run_analysis(kind, options, outdir=args.out)
            print(json.dumps(payload, sort_keys=True))
        elif args.command == "validate":
            cfg = _load_config(args.config, args.overrides)
            payload = run_validate(cfg, n_atoms=args.atoms, outdir=args.out)
            print(json.dumps(payload, sort_keys=True))
    except ConfigError as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}),
              file=sys.stderr)
        return 2
    except RamanMemError as exc:
        print(json.dumps({"error": "numeric", "detail": str(exc)}),
              file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
