"""Time integration of the collective spin-wave / cavity-mode equations.

State: one complex amplitude per spin-wave mode plus the cavity field,

    dS_q/dt = -gamma' S_q + i c_q(t) E
    dE/dt   = -kappa E + sqrt(2 kappa) E_in(t) + i sum_q conj(c_q(t)) S_q
    E_out   = sqrt(2 kappa) E - E_in

with the mode coupling computed from the instantaneous phase mismatch,

    c_q(t) = g' sqrt(N) * phase_q(t) * sinc(mu_q(t) L / 2).

With control phase compensation on (the sawtooth modulation that pins the
control phase at the medium center z = L/2), phase_q is the constant
exp(-i q L / 2); off, it is exp(-i mu_q(t) L / 2).  This one code path
covers storage as well as backward and forward retrieval: the schedule
alone decides when each mode is re-matched.

Integration is classical fixed-step RK4 on the complex state vector, so a
run is bitwise reproducible for identical inputs.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    EfficiencyUndefinedError,
    ModeTruncationError,
    ScheduleError,
    StepSizeError,
)
from .model import (
    DerivedParams,
    IndexSchedule,
    MemoryParams,
    ModeGrid,
    Pulse,
    ScenarioConfig,
    SpinWaveState,
)
from .numerics import record_energy, sinc_scalar

#: integration step must not exceed min(delta, fwhm, 1/kappa, 1/Gamma) / DT_MARGIN
DT_MARGIN = 50.0


@dataclass(frozen=True)
class FieldRecord:
    """A complex field amplitude sampled on a uniform time grid."""

    t: np.ndarray
    values: np.ndarray

    def energy(self):
        return record_energy(self.t, self.values)


@dataclass(frozen=True)
class Trajectory:
    """Full time series of one storage/retrieval scenario plus bookkeeping."""

    t: np.ndarray
    e_in: np.ndarray
    e_cav: np.ndarray
    e_out: np.ndarray
    spin_norm: np.ndarray          # sum_q |S_q|^2 at each sample
    spin_at_switch: SpinWaveState
    spin_final: SpinWaveState
    scenario: ScenarioConfig
    meta: dict

    def input_record(self):
        sel = self.t <= self.scenario.t_switch
        return FieldRecord(self.t[sel], self.e_in[sel])

    def reflected_record(self):
        sel = self.t <= self.scenario.t_switch
        return FieldRecord(self.t[sel], self.e_out[sel])

    def retrieved_record(self):
        sel = self.t >= self.scenario.t_switch
        return FieldRecord(self.t[sel], self.e_out[sel])

    def energy_ledger(self):
        """Energy bookkeeping over the scenario (absolute, input-normalized
        quantities are up to the caller)."""
        e_in = self.input_record().energy()
        refl = self.reflected_record().energy()
        ret = self.retrieved_record().energy()
        cav = float(np.abs(self.e_cav[-1]) ** 2)
        spin = float(self.spin_final.norm())
        return {
            "input_energy": e_in,
            "reflected_energy": refl,
            "retrieved_energy": ret,
            "cavity_residual": cav,
            "spin_residual": spin,
            "decayed": e_in - refl - ret - cav - spin,
        }


def efficiency(input_record: FieldRecord, output_record: FieldRecord) -> float:
    """Energy ratio of an output record to the input record."""
    e_in = input_record.energy()
    if e_in <= 0.0:
        raise EfficiencyUndefinedError("input record carries no energy")
    return output_record.energy() / e_in


# ---------------------------------------------------------------------------
# RK4 kernel
# ---------------------------------------------------------------------------

@njit(cache=True)
def _rk4_window(s0, e0, t_start, dt, n_steps, q, seg_t0, seg_kc0, seg_kdot,
                ref_k, half_l, mode_phase, comp_on, g_prime_rn, gamma_prime,
                kappa, e_in_half):
    """Integrate one window; returns cavity samples, spin norms, final spins."""
    m = q.size
    n_seg = seg_t0.size
    sq2k = np.sqrt(2.0 * kappa)
    s = s0.copy()
    e = e0
    e_cav = np.zeros(n_steps + 1, dtype=np.complex128)
    spin_norm = np.zeros(n_steps + 1, dtype=np.float64)
    c = np.zeros(m, dtype=np.complex128)
    ks = np.zeros((4, m), dtype=np.complex128)
    ke = np.zeros(4, dtype=np.complex128)
    sw = np.zeros(m, dtype=np.complex128)
    e_cav[0] = e
    acc = 0.0
    for j in range(m):
        acc += s[j].real * s[j].real + s[j].imag * s[j].imag
    spin_norm[0] = acc

    for n in range(n_steps):
        t = t_start + n * dt
        for st in range(4):
            if st == 0:
                ts = t
                ein = e_in_half[2 * n]
                for j in range(m):
                    sw[j] = s[j]
                ew = e
            elif st == 1:
                ts = t + 0.5 * dt
                ein = e_in_half[2 * n + 1]
                for j in range(m):
                    sw[j] = s[j] + 0.5 * dt * ks[0, j]
                ew = e + 0.5 * dt * ke[0]
            elif st == 2:
                ts = t + 0.5 * dt
                ein = e_in_half[2 * n + 1]
                for j in range(m):
                    sw[j] = s[j] + 0.5 * dt * ks[1, j]
                ew = e + 0.5 * dt * ke[1]
            else:
                ts = t + dt
                ein = e_in_half[2 * n + 2]
                for j in range(m):
                    sw[j] = s[j] + dt * ks[2, j]
                ew = e + dt * ke[2]
            si = 0
            for sm in range(n_seg - 1, -1, -1):
                if ts >= seg_t0[sm] - 1e-15:
                    si = sm
                    break
            kc = seg_kc0[si] + seg_kdot[si] * (ts - seg_t0[si])
            fb = 0.0 + 0.0j
            for j in range(m):
                mh = (q[j] + kc - ref_k) * half_l
                amp = sinc_scalar(mh)
                if comp_on:
                    ph = mode_phase[j]
                else:
                    ph = np.exp(-1j * mh)
                cj = g_prime_rn * ph * amp
                c[j] = cj
                ks[st, j] = -gamma_prime * sw[j] + 1j * cj * ew
                fb += np.conj(cj) * sw[j]
            ke[st] = -kappa * ew + sq2k * ein + 1j * fb
        for j in range(m):
            s[j] = s[j] + dt / 6.0 * (ks[0, j] + 2.0 * ks[1, j]
                                      + 2.0 * ks[2, j] + ks[3, j])
        e = e + dt / 6.0 * (ke[0] + 2.0 * ke[1] + 2.0 * ke[2] + ke[3])
        e_cav[n + 1] = e
        acc = 0.0
        for j in range(m):
            acc += s[j].real * s[j].real + s[j].imag * s[j].imag
        spin_norm[n + 1] = acc
    return e_cav, spin_norm, s


def _schedule_arrays(schedule: IndexSchedule):
    t0 = np.array([s.t_start for s in schedule.segments])
    kc0 = np.array([schedule.k_per_index * s.n_start for s in schedule.segments])
    kdot = np.array([schedule.k_per_index * s.slope for s in schedule.segments])
    return t0, kc0, kdot


def _steps(t0, t1, dt):
    n = (t1 - t0) / dt
    n_round = int(round(n))
    if n_round < 1 or abs(n - n_round) > 1e-6:
        raise StepSizeError(
            f"window [{t0}, {t1}] is not an integer number of steps of dt={dt}")
    return n_round


def _check_dt(dt, derived: DerivedParams, params: MemoryParams, pulse: Pulse):
    scales = [derived.delta, pulse.fwhm, 1.0 / params.kappa]
    if derived.Gamma > 0.0:
        scales.append(1.0 / derived.Gamma)
    dt_max = min(scales) / DT_MARGIN
    if dt > dt_max * (1.0 + 1e-12):
        raise StepSizeError(f"dt={dt} too coarse; need dt <= {dt_max}")


def _mode_phases(modes: ModeGrid, length):
    # compensated coupling phase exp(-i q L / 2) == exp(i beta (t_q - anchor))
    return np.exp(-0.5j * modes.q * length)


def _validate(params, derived, schedule, modes, pulse, scenario, dt):
    _check_dt(dt, derived, params, pulse)
    if modes.t_q.min() > scenario.t_start + 1e-9 or \
            modes.t_q.max() < scenario.t_end - 1e-9:
        raise ModeTruncationError(
            "mode grid does not cover the scenario window", required=None)
    span_ok = schedule.t_start <= scenario.t_start + 1e-9 and \
        schedule.t_end >= scenario.t_end - 1e-9
    if not span_ok:
        raise ScheduleError("schedule does not span the scenario window")
    if len(schedule.segments) >= 2:
        s0, s1 = schedule.segments[0], schedule.segments[1]
        if scenario.retrieval_mode == "backward":
            if abs(s1.slope + s0.slope) > 1e-9 * abs(s0.slope):
                raise ScheduleError("backward retrieval needs the slope sign "
                                    "flipped at the switch")
        else:
            if abs(s1.slope - s0.slope) > 1e-9 * abs(s0.slope) or not s1.reset:
                raise ScheduleError("forward retrieval needs the storage ramp "
                                    "repeated (reset sawtooth)")


def _window_run(params, derived, schedule, modes, pulse, scenario, dt,
                t0, t1, s_init, e_init, inject):
    n = _steps(t0, t1, dt)
    th = t0 + np.arange(2 * n + 1) * (dt / 2.0)
    if inject:
        e_half = pulse.amplitude(th).astype(np.complex128)
        # the input is defined on the storage window only
        e_half = np.where(th <= scenario.t_switch + 1e-15, e_half, 0.0)
    else:
        e_half = np.zeros(2 * n + 1, dtype=np.complex128)
    seg_t0, seg_kc0, seg_kdot = _schedule_arrays(schedule)
    phases = _mode_phases(modes, params.length)
    e_cav, spin_norm, s_end = _rk4_window(
        np.ascontiguousarray(s_init, dtype=np.complex128), complex(e_init),
        float(t0), float(dt), n, np.ascontiguousarray(modes.q, dtype=float),
        seg_t0, seg_kc0, seg_kdot, float(schedule.reference_k),
        0.5 * params.length, phases, bool(scenario.phase_compensation),
        complex(derived.g_prime * np.sqrt(params.atom_number)),
        float(derived.gamma_prime), float(params.kappa), e_half)
    t = t0 + np.arange(n + 1) * dt
    return t, e_half[::2], e_cav, spin_norm, s_end


def integrate(params: MemoryParams, derived: DerivedParams,
              schedule: IndexSchedule, modes: ModeGrid, pulse: Pulse,
              scenario: ScenarioConfig, dt: float) -> Trajectory:
    """Run storage followed by retrieval and collect the full trajectory.

    The two windows are integrated separately and stitched at the switch, so
    a forward-mode sawtooth reset never lands inside an RK4 step.
    """
    _validate(params, derived, schedule, modes, pulse, scenario, dt)
    t_a, ein_a, ecav_a, norm_a, s_mid = _window_run(
        params, derived, schedule, modes, pulse, scenario, dt,
        scenario.t_start, scenario.t_switch, np.zeros(modes.count), 0.0, True)
    spin_at_switch = SpinWaveState(modes, s_mid.copy(), scenario.t_switch)
    t_b, ein_b, ecav_b, norm_b, s_end = _window_run(
        params, derived, schedule, modes, pulse, scenario, dt,
        scenario.t_switch, scenario.t_end, s_mid, ecav_a[-1], False)
    t = np.concatenate([t_a, t_b[1:]])
    e_in = np.concatenate([ein_a, ein_b[1:]])
    e_cav = np.concatenate([ecav_a, ecav_b[1:]])
    spin_norm = np.concatenate([norm_a, norm_b[1:]])
    e_out = np.sqrt(2.0 * params.kappa) * e_cav - e_in
    spin_final = SpinWaveState(modes, s_end, scenario.t_end)
    meta = {
        "kappa": params.kappa,
        "Gamma": derived.Gamma,
        "delta": derived.delta,
        "gamma_prime": derived.gamma_prime,
        "dt": dt,
        "retrieval_mode": scenario.retrieval_mode,
        "phase_compensation": scenario.phase_compensation,
        "modes": modes.count,
    }
    return Trajectory(t, e_in, e_cav, e_out, spin_norm, spin_at_switch,
                      spin_final, scenario, meta)


def run_storage(params, derived, schedule, modes, pulse, scenario, dt):
    """Integrate the storage window only.

    Returns the spin-wave state at the switch time and the reflected-field
    record over the storage window.
    """
    _validate(params, derived, schedule, modes, pulse, scenario, dt)
    t, e_in, e_cav, _, s_mid = _window_run(
        params, derived, schedule, modes, pulse, scenario, dt,
        scenario.t_start, scenario.t_switch, np.zeros(modes.count), 0.0, True)
    e_out = np.sqrt(2.0 * params.kappa) * e_cav - e_in
    state = SpinWaveState(modes, s_mid, scenario.t_switch)
    return state, FieldRecord(t, e_out)


def run_retrieval(state: SpinWaveState, mode: str, params, derived, schedule,
                  modes, pulse, scenario, dt):
    """Replay a stored spin-wave state; the input field is zero throughout."""
    if mode != scenario.retrieval_mode:
        raise ScheduleError("retrieval mode does not match the scenario")
    _validate(params, derived, schedule, modes, pulse, scenario, dt)
    t, _, e_cav, _, _ = _window_run(
        params, derived, schedule, modes, pulse, scenario, dt,
        scenario.t_switch, scenario.t_end, state.amplitudes, 0.0, False)
    e_out = np.sqrt(2.0 * params.kappa) * e_cav
    return FieldRecord(t, e_out)


def fig2_scenario(delta_over_taup, big_gamma=10.0, dt=1.0 / 2000.0) -> Trajectory:
    """Gaussian storage/retrieval run at one mode-spacing-to-pulse-width ratio.

    Matched (kappa = Gamma) backward-retrieval scenario in pulse-FWHM units;
    the standard ratios 2, 1 and 1/2 show the transition from a broadened,
    weak output to a near-perfect time-reversed replica.
    """
    from .scenarios import standard_bundle

    b = standard_bundle(delta_over_taup=delta_over_taup, big_gamma=big_gamma,
                        dt=dt)
    return integrate(b.params, b.derived, b.schedule, b.modes, b.pulse,
                     b.scenario, b.dt)
