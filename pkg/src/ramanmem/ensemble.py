"""Discrete-atom three-level simulator used as an independent oracle.

Integrates the unreduced optical-coherence / spin-coherence / cavity
equations for every atom,

    dP_j/dt = -(gamma_P + i Delta) P_j + i Omega(t) S_j e^{i k_c z_j}
              + i g E e^{i k z_j}
    dS_j/dt = -(gamma_S + i Delta_S) S_j + i Omega(t)^* P_j e^{-i k_c z_j}
    dE/dt   = -(kappa + i delta_cav) E + i g sum_j P_j e^{-i k z_j}
              + sqrt(2 kappa) E_in,

and validates the adiabatic elimination behind the collective model.  Two
compensations make the comparison meaningful:

* the two-photon detuning is set to Delta_S = +|Omega|^2/Delta, which nulls
  the control-induced light shift of the spin coherence (the spin level is
  pushed by -|Omega|^2/Delta for positive detuning);
* the cavity is tuned to the loaded resonance, delta_cav = g^2 N / Delta,
  cancelling the dispersive pull of the far-detuned ensemble that the
  collective equations silently absorb into "cavity resonant with the
  field".

Internally the stiff spatial phases are absorbed into rotated variables
(S~_j = S_j e^{i (k_c - k) z_j}, P~_j = P_j e^{-i k z_j}) so the ramp enters
as a per-atom detuning with piecewise-constant rate; no per-atom phase
factors are evaluated inside the integration loop.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    GridMismatchError,
    ScheduleError,
    StepSizeError,
    WeakFieldError,
)
from .dynamics import Trajectory
from .model import (
    IndexSchedule,
    MemoryParams,
    ModeGrid,
    Pulse,
    ScenarioConfig,
    SpinWaveState,
)
from .numerics import relative_l2, sinc

#: weak-field monitor threshold on max_j(|P_j|^2 + |S_j|^2)
WEAK_FIELD_LIMIT = 0.1

#: dt must not exceed this margin over the one-photon detuning period
DETUNING_MARGIN = 0.05


@dataclass(frozen=True)
class AtomEnsemble:
    """Fixed atom positions along the medium."""

    positions: np.ndarray   # sorted, within [0, L] (m)
    length: float
    placement: str          # "uniform-lattice" | "seeded-random"
    seed: int | None = None

    def __post_init__(self):
        z = np.asarray(self.positions)
        if np.any(np.diff(z) < 0.0):
            raise ValueError("positions must be sorted")
        if z.min() < 0.0 or z.max() > self.length:
            raise ValueError("positions must lie within [0, L]")

    @property
    def count(self):
        return int(self.positions.size)


def uniform_ensemble(n_atoms: int, length: float) -> AtomEnsemble:
    """Midpoint lattice z_j = (j + 1/2) L / N."""
    z = (np.arange(n_atoms) + 0.5) * length / n_atoms
    return AtomEnsemble(z, float(length), "uniform-lattice")


def random_ensemble(n_atoms: int, length: float, seed: int) -> AtomEnsemble:
    """Uniformly random positions from a recorded seed."""
    rng = np.random.default_rng(seed)
    z = np.sort(rng.uniform(0.0, length, size=n_atoms))
    return AtomEnsemble(z, float(length), "seeded-random", seed)


@dataclass(frozen=True)
class FullState:
    """Per-atom coherences and the cavity amplitude at the end of a run."""

    p: np.ndarray
    s: np.ndarray
    e_cav: complex
    weak_field_max: float   # max over the run of max_j(|P_j|^2 + |S_j|^2)


def diffraction(ensemble: AtomEnsemble, q):
    """Diffraction function phi(q) = (1/N) sum_j exp(i q z_j)."""
    q = np.asarray(q, dtype=float)
    out = np.exp(1j * np.multiply.outer(q, ensemble.positions)).mean(axis=-1)
    return complex(out) if out.ndim == 0 else out


def dirichlet_diffraction(n_atoms: int, length: float, q):
    """Closed form of phi(q) for the midpoint lattice.

    phi = e^{i q L/2} sin(q L/2) / (N sin(q L / 2N)); the removable
    singularities at q L = 2 pi k N take the L'Hopital value.
    """
    q = np.asarray(q, dtype=float)
    x = q * length / (2.0 * n_atoms)
    den = n_atoms * np.sin(x)
    degenerate = np.abs(np.sin(x)) < 1e-12
    ratio = np.where(degenerate,
                     np.cos(n_atoms * x) / np.where(degenerate, np.cos(x), 1.0),
                     np.sin(n_atoms * x) / np.where(degenerate, 1.0, den))
    out = np.exp(0.5j * q * length) * ratio
    return complex(out) if out.ndim == 0 else out


def continuum_diffraction(length: float, q):
    """Large-N limit e^{i q L/2} sinc(q L/2)."""
    q = np.asarray(q, dtype=float)
    out = np.exp(0.5j * q * length) * sinc(q * length / 2.0)
    return complex(out) if out.ndim == 0 else out


def shift_compensations(params: MemoryParams):
    """(Delta_S, delta_cav) nulling the light shift and the cavity pull."""
    delta_s = params.rabi ** 2 / params.detuning
    delta_cav = params.coupling_g ** 2 * params.atom_number / params.detuning
    return delta_s, delta_cav


# ---------------------------------------------------------------------------
# integration kernel (rotated frame)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _rk4_full(p0, s0, e0, zc, n_steps, dt, t_start, seg_t0, seg_kdot,
              seg_theta0, seg_thetadot, gamma_p, delta_1ph, gamma_s, delta_s,
              omega, g, kappa, delta_cav, e_in_half, record_stride):
    n_at = zc.size
    sq2k = np.sqrt(2.0 * kappa)
    n_rec = n_steps // record_stride + 1
    e_cav = np.zeros(n_rec, dtype=np.complex128)
    s_norm = np.zeros(n_rec, dtype=np.float64)
    kp = np.zeros((4, n_at), dtype=np.complex128)
    ks = np.zeros((4, n_at), dtype=np.complex128)
    pw = np.zeros(n_at, dtype=np.complex128)
    sw = np.zeros(n_at, dtype=np.complex128)
    ke = np.zeros(4, dtype=np.complex128)
    p = p0.copy()
    s = s0.copy()
    e = e0
    e_cav[0] = e
    acc = 0.0
    for j in range(n_at):
        acc += s[j].real ** 2 + s[j].imag ** 2
    s_norm[0] = acc
    weak_max = 0.0
    cp = gamma_p + 1j * delta_1ph
    ccav = kappa + 1j * delta_cav
    for n in range(n_steps):
        t = t_start + n * dt
        for st in range(4):
            if st == 0:
                ts = t
                ein = e_in_half[2 * n]
                for j in range(n_at):
                    pw[j] = p[j]
                    sw[j] = s[j]
                ew = e
            elif st == 1:
                ts = t + 0.5 * dt
                ein = e_in_half[2 * n + 1]
                for j in range(n_at):
                    pw[j] = p[j] + 0.5 * dt * kp[0, j]
                    sw[j] = s[j] + 0.5 * dt * ks[0, j]
                ew = e + 0.5 * dt * ke[0]
            elif st == 2:
                ts = t + 0.5 * dt
                ein = e_in_half[2 * n + 1]
                for j in range(n_at):
                    pw[j] = p[j] + 0.5 * dt * kp[1, j]
                    sw[j] = s[j] + 0.5 * dt * ks[1, j]
                ew = e + 0.5 * dt * ke[1]
            else:
                ts = t + dt
                ein = e_in_half[2 * n + 2]
                for j in range(n_at):
                    pw[j] = p[j] + dt * kp[2, j]
                    sw[j] = s[j] + dt * ks[2, j]
                ew = e + dt * ke[2]
            si = 0
            for sm in range(seg_t0.size - 1, -1, -1):
                if ts >= seg_t0[sm] - 1e-15:
                    si = sm
                    break
            kdot = seg_kdot[si]
            theta = seg_theta0[si] + seg_thetadot[si] * (ts - seg_t0[si])
            om = omega * np.exp(1j * theta)
            omc = np.conj(om)
            sum_p = 0.0 + 0.0j
            for j in range(n_at):
                kp[st, j] = -cp * pw[j] + 1j * om * sw[j] + 1j * g * ew
                ks[st, j] = -(gamma_s + 1j * (delta_s - kdot * zc[j])) * sw[j] \
                    + 1j * omc * pw[j]
                sum_p += pw[j]
            ke[st] = -ccav * ew + 1j * g * sum_p + sq2k * ein
        wmax = 0.0
        for j in range(n_at):
            p[j] = p[j] + dt / 6.0 * (kp[0, j] + 2.0 * kp[1, j]
                                      + 2.0 * kp[2, j] + kp[3, j])
            s[j] = s[j] + dt / 6.0 * (ks[0, j] + 2.0 * ks[1, j]
                                      + 2.0 * ks[2, j] + ks[3, j])
            w = p[j].real ** 2 + p[j].imag ** 2 + s[j].real ** 2 \
                + s[j].imag ** 2
            if w > wmax:
                wmax = w
        if wmax > weak_max:
            weak_max = wmax
        e = e + dt / 6.0 * (ke[0] + 2.0 * ke[1] + 2.0 * ke[2] + ke[3])
        if (n + 1) % record_stride == 0:
            i_rec = (n + 1) // record_stride
            e_cav[i_rec] = e
            acc = 0.0
            for j in range(n_at):
                acc += s[j].real ** 2 + s[j].imag ** 2
            s_norm[i_rec] = acc
    return e_cav, s_norm, p, s, e, weak_max


def _theta_segments(schedule: IndexSchedule, compensation: bool, length):
    """Per-segment control-phase law pinning the phase at z = L/2:
    theta(t) = -(k_c(t) - reference_k) * L/2."""
    t0 = np.array([s.t_start for s in schedule.segments])
    kdot = np.array([schedule.k_per_index * s.slope for s in schedule.segments])
    if not compensation:
        return t0, kdot, np.zeros(len(t0)), np.zeros(len(t0))
    half_l = 0.5 * length
    theta0 = np.array([
        -(schedule.k_per_index * s.n_start - schedule.reference_k) * half_l
        for s in schedule.segments])
    return t0, kdot, theta0, -kdot * half_l


def project_modes(ensemble: AtomEnsemble, s_rot: np.ndarray,
                  schedule: IndexSchedule, t: float,
                  modes: ModeGrid) -> SpinWaveState:
    """Collective amplitudes S_q = (1/sqrt N) sum_j S_j e^{-i q z_j}.

    ``s_rot`` is in the rotated frame; the projection phase for offset q is
    then the instantaneous mismatch mu_q(t), so the result compares
    one-to-one with the collective-model amplitudes.
    """
    kc = schedule.k_c(t)
    mu = modes.q[:, None] + kc - schedule.reference_k
    phases = np.exp(-1j * mu * ensemble.positions[None, :])
    amps = phases @ s_rot / math.sqrt(ensemble.count)
    return SpinWaveState(modes, amps, t)


def oracle_step(params: MemoryParams, record_dt: float,
                margin: float = DETUNING_MARGIN):
    """(dt, record_stride) so that dt resolves the detuning and the recorded
    samples land exactly on multiples of record_dt."""
    stride = max(1, math.ceil(record_dt * abs(params.detuning) / margin))
    return record_dt / stride, stride


def integrate_full(params: MemoryParams, ensemble: AtomEnsemble,
                   schedule: IndexSchedule, pulse: Pulse,
                   scenario: ScenarioConfig, dt: float,
                   modes: ModeGrid | None = None, record_stride: int = 1):
    """Integrate the full three-level model through storage and retrieval.

    The coupling g is rescaled so g*sqrt(N_atoms) matches the modeled
    g*sqrt(N); dt must resolve the one-photon detuning (<= 0.05/|Delta|).
    Samples are recorded every ``record_stride`` steps (use
    :func:`oracle_step` to land them on a collective run's grid).  Returns
    (Trajectory, FullState); the trajectory's spin_norm column is the
    per-atom total sum_j |S_j|^2, the Parseval equivalent of the collective
    sum over modes.
    """
    if dt > DETUNING_MARGIN / abs(params.detuning) * (1.0 + 1e-12):
        raise StepSizeError(
            f"dt={dt} does not resolve the detuning; need "
            f"<= {DETUNING_MARGIN / abs(params.detuning)}")
    if schedule.t_start > scenario.t_start + 1e-9 or \
            schedule.t_end < scenario.t_end - 1e-9:
        raise ScheduleError("schedule does not span the scenario window")
    g_eff = params.g_root_n / math.sqrt(ensemble.count)
    delta_s, delta_cav = shift_compensations(params)
    seg_t0, seg_kdot, theta0, thetadot = _theta_segments(
        schedule, scenario.phase_compensation, params.length)

    def window(t0, t1, p, s, e, inject):
        n = (t1 - t0) / dt
        n_int = int(round(n))
        if n_int < 1 or abs(n - n_int) > 1e-6:
            raise StepSizeError("window is not an integer number of steps")
        if n_int % record_stride != 0:
            raise StepSizeError("record_stride must divide the window steps")
        th = t0 + np.arange(2 * n_int + 1) * (dt / 2.0)
        if inject:
            e_half = pulse.amplitude(th).astype(np.complex128)
            e_half = np.where(th <= scenario.t_switch + 1e-15, e_half, 0.0)
        else:
            e_half = np.zeros(2 * n_int + 1, dtype=np.complex128)
        out = _rk4_full(
            p, s, e, np.ascontiguousarray(ensemble.positions), n_int,
            float(dt), float(t0), seg_t0, seg_kdot, theta0, thetadot,
            float(params.gamma_p), float(params.detuning),
            float(params.gamma_s), float(delta_s), float(params.rabi),
            float(g_eff), float(params.kappa), float(delta_cav), e_half,
            record_stride)
        return out, n_int

    p = np.zeros(ensemble.count, dtype=np.complex128)
    s = np.zeros(ensemble.count, dtype=np.complex128)
    (ecav_a, norm_a, p, s, e_end, wmax_a), n_a = window(
        scenario.t_start, scenario.t_switch, p, s, 0.0 + 0.0j, True)
    spin_mid = project_modes(ensemble, s, schedule, scenario.t_switch, modes) \
        if modes is not None else None
    (ecav_b, norm_b, p, s, e_end, wmax_b), n_b = window(
        scenario.t_switch, scenario.t_end, p, s, e_end, False)
    weak_max = max(wmax_a, wmax_b)
    if weak_max > WEAK_FIELD_LIMIT:
        raise WeakFieldError(
            f"atomic excitation {weak_max:.3g} exceeds the weak-field regime")

    dt_rec = dt * record_stride
    t_a = scenario.t_start + np.arange(n_a // record_stride + 1) * dt_rec
    t_b = scenario.t_switch + np.arange(n_b // record_stride + 1) * dt_rec
    t = np.concatenate([t_a, t_b[1:]])
    e_cav = np.concatenate([ecav_a, ecav_b[1:]])
    spin_norm = np.concatenate([norm_a, norm_b[1:]])
    e_in = np.where(t <= scenario.t_switch, pulse.amplitude(t), 0.0)
    e_out = np.sqrt(2.0 * params.kappa) * e_cav - e_in
    if modes is not None:
        spin_final = project_modes(ensemble, s, schedule, scenario.t_end, modes)
    else:
        empty = ModeGrid(np.zeros(0), np.zeros(0), 1.0, 0.0)
        spin_final = SpinWaveState(empty, np.zeros(0, dtype=complex),
                                   scenario.t_end)
    meta = {
        "model": "full-atom",
        "n_atoms": ensemble.count,
        "dt": dt,
        "record_stride": record_stride,
        "kappa": params.kappa,
        "delta_s": delta_s,
        "delta_cav": delta_cav,
        "weak_field_max": weak_max,
    }
    traj = Trajectory(t, e_in, e_cav, e_out, spin_norm,
                      spin_mid if spin_mid is not None else spin_final,
                      spin_final, scenario, meta)
    state = FullState(p, s, complex(e_end), weak_max)
    return traj, state


# ---------------------------------------------------------------------------
# model comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelComparison:
    l2_e_out: float
    l2_spin_profile: float
    efficiency_diff: float
    per_mode_residual: np.ndarray
    note: str


def compare_models(full: Trajectory, collective: Trajectory) -> ModelComparison:
    """Relative L2 metrics between a full-atom and a collective trajectory.

    Grids must be commensurate: the finer trajectory is subsampled onto the
    coarser one (no resampling/interpolation is attempted).
    """
    a, b = full, collective
    if a.t.size < b.t.size:
        a, b = b, a  # a is finer
    stride = (a.t.size - 1) / (b.t.size - 1)
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise GridMismatchError("time grids are not commensurate; "
                                "rerun with nested sampling")
    stride = int(round(stride))
    ta = a.t[::stride]
    if not np.allclose(ta, b.t, rtol=0.0, atol=1e-9 * max(1.0, abs(b.t[-1]))):
        raise GridMismatchError("time grids do not overlap sample-for-sample")
    l2_out = relative_l2(a.e_out[::stride], b.e_out, t=b.t)
    sa = np.abs(full.spin_at_switch.amplitudes)
    sb = np.abs(collective.spin_at_switch.amplitudes)
    if sa.shape != sb.shape:
        raise GridMismatchError("spin-wave mode grids differ")
    residual = sa - sb
    l2_spin = relative_l2(sa, sb)
    eff_a = full.retrieved_record().energy() / full.input_record().energy()
    eff_b = collective.retrieved_record().energy() \
        / collective.input_record().energy()
    note = ""
    n_atoms = full.meta.get("n_atoms")
    if n_atoms is not None and sb.size > 0 and n_atoms < 4 * sb.size:
        note = (f"ensemble of {n_atoms} atoms is small for "
                f"{sb.size} modes; the lattice diffraction function deviates "
                f"from the continuum sinc")
    return ModelComparison(l2_out, l2_spin, float(eff_a - eff_b), residual,
                           note)
