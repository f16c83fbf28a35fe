"""Ready-made dimensionless scenario setups.

Everything here works in pulse-FWHM units: the Gaussian input has intensity
FWHM 1, rates are per FWHM.  The synthetic geometry uses L = 1 and
omega_c/c = 1 rad/m per unit index, so the storage ramp rate dn_c/dt = 2*beta
realizes the requested mode spacing delta = pi/beta, and adjacent spin waves
differ by exactly 2*pi/L in wave number.
"""

import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .model import (
    DerivedParams,
    IndexSchedule,
    MemoryParams,
    ModeGrid,
    Pulse,
    ScenarioConfig,
    SPEED_OF_LIGHT,
    backward_schedule,
    build_mode_grid,
    derive_params,
    forward_schedule,
    make_gaussian_pulse,
)

#: default one-photon detuning margin of the synthetic parameter sets
RAMAN_MARGIN = 50.0


@dataclass(frozen=True)
class ScenarioBundle:
    """Everything one integration run needs."""

    params: MemoryParams
    derived: DerivedParams
    schedule: IndexSchedule
    modes: ModeGrid
    pulse: Pulse
    scenario: ScenarioConfig
    dt: float

    def with_pulse(self, pulse: Pulse):
        return dc_replace(self, pulse=pulse)


def synthetic_params(g_prime_rn, kappa, gamma_prime, raman_margin=RAMAN_MARGIN):
    """MemoryParams (in FWHM units) realizing the requested effective rates.

    Omega = g*sqrt(N) = raman_margin * g'sqrt(N) and Delta = raman_margin *
    Omega keep the set comfortably in the Raman limit; gamma_P is chosen so
    the optical dephasing alone produces the requested gamma' (gamma_S = 0),
    which keeps both cooperativity expressions equal.
    """
    n_atoms = 4096.0
    x = raman_margin * g_prime_rn if g_prime_rn > 0 else raman_margin
    delta_1ph = raman_margin * x
    ratio = x / delta_1ph  # = 1/raman_margin
    gamma_p = gamma_prime / (ratio * ratio) if gamma_prime > 0 else 0.0
    return MemoryParams.create(
        coupling_g=x / math.sqrt(n_atoms) if g_prime_rn > 0 else 1e-6,
        atom_number=n_atoms,
        rabi=x if g_prime_rn > 0 else 0.0,
        detuning=delta_1ph,
        gamma_p=gamma_p,
        gamma_s=0.0,
        kappa=kappa,
        length=1.0,
        omega_c=SPEED_OF_LIGHT,  # so omega_c / c = 1 rad/m per unit index
    )


def standard_bundle(delta_over_taup=0.5, big_gamma=10.0, kappa_over_gamma=1.0,
                    gamma_prime=0.0, half_window=6.0, guard=5.0,
                    dt=1.0 / 2000.0, retrieval_mode="backward",
                    phase_compensation=True, pulse_center=None,
                    time_offset=0.0, max_modes=512) -> ScenarioBundle:
    """Matched-memory scenario in pulse-FWHM units.

    Storage on [-T, 0], retrieval on [0, T] (T = half_window), both shifted
    by ``time_offset``; the pulse sits at -T/2 unless overridden.
    """
    delta = float(delta_over_taup)
    beta = math.pi / delta
    kappa = kappa_over_gamma * big_gamma
    g_prime_rn = math.sqrt(2.0 * big_gamma / delta)
    params = synthetic_params(g_prime_rn, kappa, gamma_prime)
    slope = 2.0 * beta / (params.length * (params.omega_c / SPEED_OF_LIGHT))
    t0 = -half_window + time_offset
    ts = 0.0 + time_offset
    t1 = half_window + time_offset
    if retrieval_mode == "backward":
        schedule = backward_schedule(t0, ts, t1, slope,
                                     params.omega_c / SPEED_OF_LIGHT)
    else:
        schedule = forward_schedule(t0, ts, t1, slope,
                                    params.omega_c / SPEED_OF_LIGHT)
    derived = derive_params(params, slope)
    modes = build_mode_grid(schedule, derived, (t0, t1), guard=guard,
                            max_modes=max_modes)
    center = (-half_window / 2.0 + time_offset) if pulse_center is None \
        else pulse_center
    grid = center + np.arange(-6.5 / dt, 6.5 / dt + 1) * dt
    pulse = make_gaussian_pulse(1.0, center, grid)
    scenario = ScenarioConfig(t0, ts, t1, retrieval_mode, phase_compensation)
    return ScenarioBundle(params, derived, schedule, modes, pulse, scenario,
                          float(dt))


def oracle_bundle(big_gamma=10.0, delta_over_taup=0.5, half_window=4.0,
                  guard=5.0, dt=1.0 / 2000.0) -> ScenarioBundle:
    """Smaller matched scenario used for collective-vs-full-model checks.

    The full model resolves the one-photon detuning explicitly, so a shorter
    window keeps its step count manageable.
    """
    return standard_bundle(delta_over_taup=delta_over_taup,
                           big_gamma=big_gamma, half_window=half_window,
                           guard=guard, dt=dt)
