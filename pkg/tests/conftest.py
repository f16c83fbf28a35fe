import time

import numpy as np
import pytest

import ramanmem as rm


@pytest.fixture(scope="session")
def fig2_runs():
    """Matched backward runs at the three standard mode spacings, with wall
    times (dt = fwhm/2000, Gamma = kappa = 10/fwhm)."""
    runs = {}
    for d in (2.0, 1.0, 0.5):
        t0 = time.perf_counter()
        traj = rm.fig2_scenario(d)
        runs[d] = (traj, time.perf_counter() - t0)
    return runs


@pytest.fixture(scope="session")
def matched_run(fig2_runs):
    return fig2_runs[0.5][0]


def _run_bundle(b):
    return rm.integrate(b.params, b.derived, b.schedule, b.modes, b.pulse,
                        b.scenario, b.dt)


@pytest.fixture(scope="session")
def kappa_sweep():
    """17 log-spaced kappa/Gamma points over [1/4, 4] at Gamma = 10/fwhm."""
    big_gamma = 10.0
    ratios = np.logspace(np.log10(0.25), np.log10(4.0), 17)
    etas = []
    for r in ratios:
        b = rm.standard_bundle(delta_over_taup=0.5, big_gamma=big_gamma,
                               kappa_over_gamma=float(r), dt=1.0 / 2000.0)
        traj = _run_bundle(b)
        etas.append(traj.retrieved_record().energy()
                    / traj.input_record().energy())
    return big_gamma, ratios * big_gamma, np.array(etas)


@pytest.fixture(scope="session")
def imprint_quarter():
    """Storage-only run at delta = fwhm/4 plus its bundle."""
    b = rm.standard_bundle(delta_over_taup=0.25, big_gamma=10.0,
                           dt=1.0 / 2000.0)
    state, reflected = rm.run_storage(b.params, b.derived, b.schedule,
                                      b.modes, b.pulse, b.scenario, b.dt)
    return b, state, reflected


@pytest.fixture(scope="session")
def oracle_pair():
    """Collective vs 512-atom full-model trajectories on one matched setup."""
    b = rm.oracle_bundle()
    collective = _run_bundle(b)
    ens = rm.uniform_ensemble(512, b.params.length)
    dt_full, stride = rm.oracle_step(b.params, b.dt)
    full, state = rm.integrate_full(b.params, ens, b.schedule, b.pulse,
                                    b.scenario, dt_full, modes=b.modes,
                                    record_stride=stride)
    comparison = rm.compare_models(full, collective)
    return b, collective, full, comparison, state


@pytest.fixture(scope="session")
def cheap_oracle_setup():
    """Small, fast full-model configuration for error-path and scaling tests.

    Gamma = kappa = 2/fwhm, delta = fwhm, window [-3, 3]; the synthetic
    detuning stays low so the stiff integration is quick even at 8 atoms.
    """
    b = rm.standard_bundle(delta_over_taup=1.0, big_gamma=2.0,
                           half_window=3.0, guard=4.0, dt=1.0 / 2000.0)
    dt_full, stride = rm.oracle_step(b.params, b.dt)
    return b, dt_full, stride
