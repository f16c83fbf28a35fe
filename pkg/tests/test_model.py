import math

import numpy as np
import pytest

import ramanmem as rm
from ramanmem.model import SPEED_OF_LIGHT


def make_params(**over):
    base = dict(coupling_g=1.0, atom_number=1e6, rabi=10.0, detuning=500.0,
                gamma_p=0.1, gamma_s=0.01, kappa=5.0, length=1.0,
                omega_c=SPEED_OF_LIGHT)
    base.update(over)
    return rm.MemoryParams.create(**base)


# ---------------------------------------------------------------------------
# MemoryParams / DerivedParams
# ---------------------------------------------------------------------------

class TestParams:
    def test_positive_rates_enforced(self):
        with pytest.raises(ValueError):
            make_params(kappa=0.0)
        with pytest.raises(ValueError):
            make_params(coupling_g=-1.0)
        with pytest.raises(ValueError):
            make_params(gamma_s=-0.1)

    def test_wavelength_consistency(self):
        p = make_params()
        assert p.wavelength == pytest.approx(
            2 * math.pi * SPEED_OF_LIGHT / p.omega_c, rel=1e-12)
        with pytest.raises(ValueError):
            rm.MemoryParams(1.0, 1e6, 10.0, 500.0, 0.1, 0.01, 5.0, 1.0,
                            SPEED_OF_LIGHT, 1.23)

    def test_raman_flag(self):
        assert make_params(detuning=1e6).is_raman_limit()
        assert not make_params(rabi=400.0, detuning=500.0).is_raman_limit()
        # configurable margin
        p = make_params(rabi=40.0, detuning=500.0, coupling_g=1e-6)
        assert p.is_raman_limit(raman_factor=10)
        assert not p.is_raman_limit(raman_factor=20)

    def test_zero_rabi_allowed(self):
        assert make_params(rabi=0.0).rabi == 0.0


class TestDerive:
    def test_rabi_off_kills_coupling(self):
        d = rm.derive_params(make_params(rabi=0.0), slope=1.0)
        assert d.g_prime == 0.0
        assert d.Gamma == 0.0
        assert d.gamma_prime == make_params().gamma_s

    def test_hand_computed_gamma(self):
        # g sqrt(N) = 1e6, Omega/Delta = 0.1, beta = 5e5:
        # Gamma = (1e6)^2 * 0.01 * pi / (2 * 5e5) = 1e4 * pi
        p = make_params(coupling_g=1.0, atom_number=1e12, rabi=1.0,
                        detuning=10.0, gamma_p=0.0, gamma_s=0.0)
        slope = 2 * 5e5 / (p.length * p.omega_c / SPEED_OF_LIGHT)
        d = rm.derive_params(p, slope)
        assert d.beta == pytest.approx(5e5, rel=1e-12)
        assert d.Gamma == pytest.approx(1e4 * math.pi, rel=1e-12)
        assert d.Gamma == pytest.approx(3.1416e4, rel=1e-4)

    def test_matched_condition_exact(self):
        # choose kappa so that C gamma' delta / 2 = 1, then Gamma == kappa
        p = make_params(gamma_s=0.0)
        d0 = rm.derive_params(p, slope=1.0)
        p = make_params(gamma_s=0.0, kappa=d0.Gamma)
        d = rm.derive_params(p, slope=1.0)
        assert d.cooperativity * d.gamma_prime * d.delta / 2 == pytest.approx(
            1.0, rel=1e-12)
        assert d.Gamma == pytest.approx(p.kappa, rel=1e-12)

    def test_gamma_two_routes_agree(self):
        p = make_params()
        d = rm.derive_params(p, slope=3.7)
        route_a = (p.coupling_g ** 2 * p.atom_number * p.rabi ** 2
                   / p.detuning ** 2) * math.pi / (2 * d.beta)
        route_b = d.cooperativity * d.gamma_prime * d.delta / 2 * p.kappa
        assert d.Gamma == pytest.approx(route_a, rel=1e-12)
        assert d.Gamma == pytest.approx(route_b, rel=1e-12)

    def test_delta_beta_product(self):
        d = rm.derive_params(make_params(), slope=2.34)
        assert d.delta * d.beta == pytest.approx(math.pi, rel=1e-15)

    def test_zero_detuning_rejected(self):
        with pytest.raises(rm.RamanLimitError):
            rm.derive_params(make_params(detuning=0.0), slope=1.0)

    def test_bad_slope_rejected(self):
        with pytest.raises(rm.ScheduleError):
            rm.derive_params(make_params(), slope=0.0)
        with pytest.raises(rm.ScheduleError):
            rm.derive_params(make_params(), slope=-1.0)

    def test_scale_consistency(self):
        lam = 3.7
        p = make_params()
        d = rm.derive_params(p, slope=1.0)
        # scale g*sqrt(N) through g alone, N untouched
        p2 = make_params(coupling_g=p.coupling_g * lam,
                         rabi=p.rabi * lam, detuning=p.detuning * lam,
                         gamma_p=p.gamma_p * lam, gamma_s=p.gamma_s * lam,
                         kappa=p.kappa * lam)
        d2 = rm.derive_params(p2, slope=lam * 1.0)
        assert d2.Gamma == pytest.approx(lam * d.Gamma, rel=1e-12)
        assert d2.gamma_prime == pytest.approx(lam * d.gamma_prime, rel=1e-12)
        assert d2.beta == pytest.approx(lam * d.beta, rel=1e-12)
        assert d2.cooperativity == pytest.approx(d.cooperativity, rel=1e-12)
        assert d2.beta * d2.delta == pytest.approx(d.beta * d.delta, rel=1e-12)


# ---------------------------------------------------------------------------
# schedules and mismatch
# ---------------------------------------------------------------------------

class TestSchedule:
    def test_backward_mirror_roots(self):
        # storage-resonant modes (t_q < 0) carry positive offsets q = 2 pi m
        sched = rm.backward_schedule(-6.0, 0.0, 6.0, slope=4 * math.pi,
                                     k_per_index=1.0)
        for q in (2 * math.pi, 6 * math.pi, 20 * math.pi):
            roots = rm.resonance_times(sched, q)
            assert len(roots) == 2
            assert roots[0] < 0 < roots[1]
            assert roots[1] == pytest.approx(-roots[0], abs=1e-12)

    def test_root_mismatch_roundtrip(self):
        sched = rm.backward_schedule(-6.0, 0.0, 6.0, slope=4 * math.pi,
                                     k_per_index=1.0)
        for q in np.linspace(-60.0, 10.0, 23):
            for t in rm.resonance_times(sched, q):
                assert abs(rm.mismatch(sched, q, t)) <= \
                    1e-9 * abs(sched.reference_k)

    def test_defined_root_is_found(self):
        sched = rm.linear_schedule(-5.0, 5.0, slope=2.0, k_per_index=1.0)
        t_star = 1.25
        q = sched.reference_k - sched.k_c(t_star)
        roots = rm.resonance_times(sched, q)
        assert any(abs(r - t_star) < 1e-12 for r in roots)

    def test_constant_index_no_roots(self):
        flat = rm.IndexSchedule(
            (rm.RampSegment(-1.0, 1.0, 1.5, 0.0),), 1.0, 7.0)
        assert rm.resonance_times(flat, 0.5) == []
        assert rm.mismatch(flat, 0.5, -0.3) == rm.mismatch(flat, 0.5, 0.9)

    def test_mismatch_continuous_piecewise_linear(self):
        sched = rm.backward_schedule(-2.0, 0.0, 2.0, slope=3.0,
                                     k_per_index=2.0)
        q = 1.7
        t = np.linspace(-2.0, 2.0, 801)
        mu = rm.mismatch(sched, q, t)
        # continuous across the switch
        i0 = np.argmin(np.abs(t))
        assert abs(mu[i0 + 1] - mu[i0 - 1]) < 10 * abs(mu[1] - mu[0])
        # linear on each side
        for seg in (t < 0, t > 0):
            slopes = np.diff(mu[seg]) / np.diff(t[seg])
            assert np.allclose(slopes, slopes[0], rtol=1e-9)

    def test_forward_schedule_repeats_values(self):
        sched = rm.forward_schedule(-2.0, 0.0, 2.0, slope=3.0, k_per_index=1.0)
        assert sched.n_c(-1.5) == pytest.approx(sched.n_c(0.5), rel=1e-12)
        assert sched.segments[1].reset

    def test_discontinuity_rejected_without_reset(self):
        with pytest.raises(rm.ScheduleError):
            rm.IndexSchedule((rm.RampSegment(-1.0, 0.0, 1.0, 1.0),
                              rm.RampSegment(0.0, 1.0, 5.0, 1.0)), 1.0, 1.0)

    def test_gap_rejected(self):
        with pytest.raises(rm.ScheduleError):
            rm.IndexSchedule((rm.RampSegment(-1.0, 0.0, 1.0, 1.0),
                              rm.RampSegment(0.5, 1.0, 2.0, 1.0)), 1.0, 1.0)

    def test_out_of_span_rejected(self):
        sched = rm.linear_schedule(-1.0, 1.0, slope=1.0, k_per_index=1.0)
        with pytest.raises(rm.ScheduleRangeError):
            rm.mismatch(sched, 0.0, 2.0)
        with pytest.raises(rm.ScheduleRangeError):
            sched.n_c(-1.5)

    def test_index_excursion(self):
        sched = rm.backward_schedule(-6.0, 0.0, 6.0, slope=0.5,
                                     k_per_index=1.0)
        assert sched.index_excursion(-6.0, 0.0) == pytest.approx(3.0)
        assert sched.index_excursion(-6.0, 6.0) == pytest.approx(6.0)


# ---------------------------------------------------------------------------
# mode grid
# ---------------------------------------------------------------------------

def _grid_setup(delta, slope_scale=1.0):
    beta = math.pi / delta
    slope = 2 * beta * slope_scale
    p = make_params(gamma_s=0.0)
    sched = rm.backward_schedule(-6.0, 0.0, 6.0, slope=slope / slope_scale,
                                 k_per_index=slope_scale)
    d = rm.derive_params(p, slope / slope_scale)
    return p, sched, d


class TestModeGrid:
    def test_window_ten_spacings(self):
        p, sched, d = _grid_setup(0.5)
        grid = rm.build_mode_grid(sched, d, (0.0, 10 * d.delta), guard=0.0)
        assert abs(grid.count - 11) <= 1

    def test_halving_delta_doubles_count(self):
        p1, s1, d1 = _grid_setup(0.5)
        g1 = rm.build_mode_grid(s1, d1, (-6.0, 6.0), guard=0.0)
        p2, s2, d2 = _grid_setup(0.25)
        g2 = rm.build_mode_grid(s2, d2, (-6.0, 6.0), guard=0.0)
        assert abs(g2.count - 2 * g1.count) <= 1

    def test_fig2_like_count_is_45(self):
        # independent enumeration: t_q = j * delta covering [-11, 11]
        delta = 0.5
        expected = len([j for j in range(-100, 101)
                        if -11.0 - 1e-9 <= j * delta <= 11.0 + 1e-9])
        assert expected == 45
        p, sched, d = _grid_setup(delta)
        grid = rm.build_mode_grid(sched, d, (-6.0, 6.0), guard=5.0)
        assert grid.count == 45

    def test_spacing_invariants(self):
        p, sched, d = _grid_setup(0.5)
        grid = rm.build_mode_grid(sched, d, (-6.0, 6.0), guard=5.0)
        dq = np.diff(grid.t_q)
        assert np.allclose(dq, d.delta, rtol=1e-12)
        assert np.allclose(np.abs(np.diff(grid.q)),
                           2 * math.pi / p.length, rtol=1e-12)
        assert grid.t_q.min() <= -11.0 + 1e-9
        assert grid.t_q.max() >= 11.0 - 1e-9

    def test_max_modes_truncation_error(self):
        p, sched, d = _grid_setup(0.5)
        with pytest.raises(rm.ModeTruncationError) as err:
            rm.build_mode_grid(sched, d, (-6.0, 6.0), guard=5.0, max_modes=10)
        assert err.value.required == 45

    def test_resonance_times_match_grid(self):
        # modes labeled inside the storage window really are matched there
        # (and mirrored on retrieval); labels past the ramp turnaround are
        # extrapolated guard modes with no physical root
        p, sched, d = _grid_setup(0.5)
        grid = rm.build_mode_grid(sched, d, (-6.0, 6.0), guard=0.0)
        for tq, q in zip(grid.t_q, grid.q):
            roots = rm.resonance_times(sched, q)
            if tq <= 0.0:
                assert any(abs(r - tq) < 1e-9 for r in roots)
                assert any(abs(r + tq) < 1e-9 for r in roots)
            else:
                assert roots == []


# ---------------------------------------------------------------------------
# pulses
# ---------------------------------------------------------------------------

class TestPulse:
    def grid(self, dt=1e-3, half=8.0, center=0.0):
        n = int(half / dt)
        return center + np.arange(-n, n + 1) * dt

    def test_unit_energy(self):
        for fwhm in (0.3, 1.0, 2.5):
            p = rm.make_gaussian_pulse(fwhm, 0.0, self.grid(half=8 * fwhm))
            assert p.energy() == pytest.approx(1.0, abs=1e-10)

    def test_intensity_fwhm(self):
        p = rm.make_gaussian_pulse(1.0, 0.0, self.grid())
        peak = abs(p.amplitude(0.0)) ** 2
        for t in (-0.5, 0.5):
            assert abs(p.amplitude(t)) ** 2 == pytest.approx(peak / 2,
                                                             rel=0.01)

    def test_even_envelope_autocorrelation(self):
        p = rm.make_gaussian_pulse(1.0, 0.3, self.grid(center=0.3))
        t = np.linspace(0.3 - 3, 0.3 + 3, 301)
        env = np.abs(p.amplitude(t))
        assert np.allclose(env, env[::-1], rtol=1e-12, atol=1e-12)
        e = p.envelope.real
        ac = np.correlate(e, e, mode="full")
        assert np.argmax(ac) == e.size - 1

    def test_short_grid_rejected(self):
        with pytest.raises(rm.PulseBoundaryError):
            rm.make_gaussian_pulse(1.0, 0.0, self.grid(half=3.0))

    def test_off_center_grid_rejected(self):
        with pytest.raises(rm.PulseBoundaryError):
            rm.make_gaussian_pulse(1.0, -4.0, self.grid(half=8.0))

    def test_clipping_below_threshold(self):
        p = rm.make_gaussian_pulse(1.0, 0.0, self.grid())
        assert p.envelope[0] == 0.0
        assert abs(p.amplitude(7.9)) == 0.0
        assert abs(p.amplitude(0.1)) > 0.0

    def test_energy_stable_under_refinement(self):
        p1 = rm.make_gaussian_pulse(1.0, 0.0, self.grid(dt=1e-3))
        p2 = rm.make_gaussian_pulse(1.0, 0.0, self.grid(dt=5e-4))
        assert abs(p1.energy() - p2.energy()) < 1e-6

    def test_gaussian_bandwidth(self):
        p = rm.make_gaussian_pulse(2.0, 0.0, self.grid(half=16.0))
        assert p.bandwidth_fwhm() == pytest.approx(4 * math.log(2) / 2.0,
                                                   rel=1e-12)

    def test_custom_pulse_normalized(self):
        t = self.grid()
        env = np.exp(-t ** 2) * (1 + 0.5j)
        p = rm.custom_pulse(t, env)
        assert p.energy() == pytest.approx(1.0, abs=1e-10)
        assert p.kind == "custom"

    def test_custom_pulse_boundary_check(self):
        t = np.linspace(-1, 1, 101)
        with pytest.raises(rm.PulseBoundaryError):
            rm.custom_pulse(t, np.ones_like(t))

    def test_scaled_keeps_shape(self):
        p = rm.make_gaussian_pulse(1.0, 0.0, self.grid())
        c = 0.3 - 0.4j
        q = p.scaled(c)
        assert q.amplitude(0.2) == pytest.approx(c * p.amplitude(0.2),
                                                 rel=1e-12)


class TestScenarioConfig:
    def test_window_ordering(self):
        with pytest.raises(ValueError):
            rm.ScenarioConfig(0.0, -1.0, 6.0)
        with pytest.raises(ValueError):
            rm.ScenarioConfig(-6.0, 0.0, 6.0, retrieval_mode="sideways")

    def test_contiguous_windows(self):
        sc = rm.ScenarioConfig(-6.0, 0.0, 6.0)
        assert sc.t_switch == 0.0
        assert sc.phase_compensation
