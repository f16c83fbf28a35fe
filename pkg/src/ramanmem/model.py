"""Physical parameters, index schedules, pulses, and the spin-wave mode grid.

Conventions used throughout the package:

* ``kappa`` is the cavity *half* decay rate (field energy decays at 2*kappa);
  the output field is ``E_out = sqrt(2 kappa) E - E_in``.
* The control wave number is ``k_c(t) = (omega_c / c) * n_c(t)`` and the
  quantum-field wave number ``k`` is held fixed, so the phase mismatch of a
  spin wave with offset q is ``mu_q(t) = q + k_c(t) - k``.
* On a linear ramp of rate ``dn_c/dt`` the chirp rate is
  ``beta = (omega_c/c) (L/2) dn_c/dt`` and mode resonances are spaced by
  ``delta = pi / beta`` in time (2*pi/L in wave number).

All quantities are plain floats in any self-consistent unit system; the
bundled scenario builders use time in units of the pulse FWHM.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ModeTruncationError,
    PulseBoundaryError,
    RamanLimitError,
    ScheduleError,
    ScheduleRangeError,
)

SPEED_OF_LIGHT = 299792458.0  # m/s

#: Envelope values below this fraction of the peak are clipped to zero.
PULSE_CLIP = 1e-8

#: Default one-photon detuning margin for the Raman-limit check.
RAMAN_FACTOR = 10.0


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MemoryParams:
    """Raw physical parameters of the cavity-assisted Raman memory."""

    coupling_g: float     # vacuum coupling rate (rad/s)
    atom_number: float    # number of atoms N >> 1
    rabi: float           # control Rabi frequency Omega (rad/s), constant
    detuning: float       # one-photon detuning Delta = omega_3 - omega (rad/s)
    gamma_p: float        # optical dephasing rate (rad/s)
    gamma_s: float        # spin dephasing rate (rad/s)
    kappa: float          # cavity half-decay rate (rad/s)
    length: float         # medium length L (m)
    omega_c: float        # control carrier frequency (rad/s)
    wavelength: float     # control wavelength 2 pi c / omega_c (m)

    def __post_init__(self):
        for name in ("coupling_g", "atom_number", "kappa", "length", "omega_c",
                     "wavelength"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rabi < 0.0:
            raise ValueError("rabi must be >= 0 (phase belongs to the schedule)")
        if self.gamma_p < 0.0 or self.gamma_s < 0.0:
            raise ValueError("dephasing rates must be >= 0")
        expected = 2.0 * math.pi * SPEED_OF_LIGHT / self.omega_c
        if abs(self.wavelength / expected - 1.0) > 1e-6:
            raise ValueError("wavelength inconsistent with omega_c")

    @classmethod
    def create(cls, coupling_g, atom_number, rabi, detuning, gamma_p, gamma_s,
               kappa, length, omega_c):
        """Construct with the wavelength filled in from omega_c."""
        return cls(coupling_g, atom_number, rabi, detuning, gamma_p, gamma_s,
                   kappa, length, omega_c,
                   2.0 * math.pi * SPEED_OF_LIGHT / omega_c)

    @property
    def g_root_n(self):
        """Collectively enhanced coupling g*sqrt(N) (rad/s)."""
        return self.coupling_g * math.sqrt(self.atom_number)

    def is_raman_limit(self, raman_factor=RAMAN_FACTOR):
        """True when |Delta| dominates Omega, g*sqrt(N) and gamma_P."""
        scale = max(self.rabi, self.g_root_n, self.gamma_p)
        return abs(self.detuning) >= raman_factor * scale


@dataclass(frozen=True)
class DerivedParams:
    """Effective rates of the adiabatically eliminated three-level model."""

    gamma_prime: float    # effective spin decay gamma_S + gamma_P |Omega|^2/Delta^2
    g_prime: float        # effective coupling g Omega / Delta (rad/s)
    beta: float           # chirp rate (rad/s)
    delta: float          # mode spacing time pi/beta (s)
    Gamma: float          # collective rate |g'|^2 N delta / 2 (rad/s)
    cooperativity: float  # |g'|^2 N / (kappa gamma'); inf when gamma'=0


def derive_params(params: MemoryParams, slope: float) -> DerivedParams:
    """Effective parameters for a linear index ramp of rate ``slope`` (1/s).

    Raises RamanLimitError for zero detuning and ScheduleError for a
    non-positive ramp rate.
    """
    if params.detuning == 0.0:
        raise RamanLimitError("one-photon detuning must be nonzero")
    if slope <= 0.0:
        raise ScheduleError("index ramp rate must be positive")
    ratio = params.rabi / params.detuning
    gamma_prime = params.gamma_s + params.gamma_p * ratio * ratio
    g_prime = params.coupling_g * ratio
    beta = (params.omega_c / SPEED_OF_LIGHT) * (params.length / 2.0) * slope
    delta = math.pi / beta
    g2n = g_prime * g_prime * params.atom_number
    big_gamma = g2n * delta / 2.0
    if g2n == 0.0:
        coop = 0.0
    elif gamma_prime == 0.0:
        coop = math.inf
    else:
        coop = g2n / (params.kappa * gamma_prime)
    return DerivedParams(gamma_prime, g_prime, beta, delta, big_gamma, coop)


# ---------------------------------------------------------------------------
# refractive-index schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RampSegment:
    t_start: float
    t_end: float
    n_start: float   # n_c at t_start
    slope: float     # dn_c/dt over the segment (1/s)
    reset: bool = False  # sawtooth jump allowed at the join before this segment

    def n_end(self):
        return self.n_start + self.slope * (self.t_end - self.t_start)


@dataclass(frozen=True)
class IndexSchedule:
    """Piecewise-linear trajectory of the control refractive index n_c(t)."""

    segments: tuple
    k_per_index: float   # omega_c / c  (rad/m per unit of n_c)
    reference_k: float   # fixed quantum-field wave number k (rad/m)

    def __post_init__(self):
        if not self.segments:
            raise ScheduleError("schedule needs at least one segment")
        span = self.segments[-1].t_end - self.segments[0].t_start
        tol = 1e-12 * max(abs(span), 1.0)
        prev = None
        for seg in self.segments:
            if seg.t_end <= seg.t_start:
                raise ScheduleError("segment must have positive duration")
            if prev is not None:
                if abs(seg.t_start - prev.t_end) > tol:
                    raise ScheduleError("segments must be contiguous in time")
                if not seg.reset and abs(seg.n_start - prev.n_end()) > 1e-9 * max(
                        abs(prev.n_end()), 1.0):
                    raise ScheduleError("n_c discontinuous across an unmarked join")
            prev = seg

    @property
    def t_start(self):
        return self.segments[0].t_start

    @property
    def t_end(self):
        return self.segments[-1].t_end

    def _segment_index(self, t):
        t = np.asarray(t, dtype=float)
        span = self.t_end - self.t_start
        tol = 1e-9 * max(span, 1.0)
        if np.any(t < self.t_start - tol) or np.any(t > self.t_end + tol):
            raise ScheduleRangeError(
                f"t outside schedule span [{self.t_start}, {self.t_end}]")
        starts = np.array([s.t_start for s in self.segments])
        idx = np.searchsorted(starts, t, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def n_c(self, t):
        """Refractive index at time t (scalar or array)."""
        idx = self._segment_index(t)
        t = np.asarray(t, dtype=float)
        n0 = np.array([s.n_start for s in self.segments])[idx]
        sl = np.array([s.slope for s in self.segments])[idx]
        t0 = np.array([s.t_start for s in self.segments])[idx]
        out = n0 + sl * (t - t0)
        return float(out) if out.ndim == 0 else out

    def k_c(self, t):
        """Control-field wave number k_c(t) = (omega_c/c) n_c(t)."""
        out = self.k_per_index * np.asarray(self.n_c(t))
        return float(out) if out.ndim == 0 else out

    def anchor_time(self):
        """Root of mu_0 on the first segment's line (extrapolated if needed).

        This is the instant the q = 0 spin wave is phase matched; the mode
        grid is pinned to integer multiples of delta around it.
        """
        seg = self.segments[0]
        kdot = self.k_per_index * seg.slope
        if kdot == 0.0:
            raise ScheduleError("zero ramp rate has no phase-matching anchor")
        kc0 = self.k_per_index * seg.n_start
        return seg.t_start + (self.reference_k - kc0) / kdot

    def index_excursion(self, t0, t1):
        """Total |dn_c| consumed between t0 and t1."""
        total = 0.0
        for seg in self.segments:
            lo = max(t0, seg.t_start)
            hi = min(t1, seg.t_end)
            if hi > lo:
                total += abs(seg.slope) * (hi - lo)
        return total


def mismatch(schedule: IndexSchedule, q, t):
    """Phase mismatch mu_q(t) = q + k_c(t) - k (rad/m)."""
    out = np.asarray(q, dtype=float) + np.asarray(schedule.k_c(t)) \
        - schedule.reference_k
    return float(out) if out.ndim == 0 else out


def resonance_times(schedule: IndexSchedule, q):
    """Times within the schedule span where mu_q(t) = 0, in ascending order."""
    roots = []
    span = schedule.t_end - schedule.t_start
    tol = 1e-12 * max(span, 1.0)
    for seg in schedule.segments:
        kdot = schedule.k_per_index * seg.slope
        if kdot == 0.0:
            continue
        kc0 = schedule.k_per_index * seg.n_start
        t_root = seg.t_start + (schedule.reference_k - q - kc0) / kdot
        if seg.t_start - tol <= t_root <= seg.t_end + tol:
            if not roots or abs(t_root - roots[-1]) > tol:
                roots.append(float(t_root))
    return roots


def linear_schedule(t_start, t_end, slope, k_per_index, n_start=1.0,
                    reference_time=None):
    """Single linear ramp; the reference wave number k is pinned so that the
    q = 0 mode is resonant at ``reference_time`` (default: t_start)."""
    seg = RampSegment(t_start, t_end, n_start, slope)
    sched = IndexSchedule((seg,), k_per_index, 0.0)
    t_ref = t_start if reference_time is None else reference_time
    return replace(sched, reference_k=sched.k_c(t_ref))


def backward_schedule(t_start, t_switch, t_end, slope, k_per_index, n_start=1.0):
    """Triangular schedule: ramp up over storage, sign flipped at t_switch.

    Every wave vector written at time t is re-matched at the mirror time
    2*t_switch - t during retrieval.
    """
    if not (t_start < t_switch < t_end):
        raise ScheduleError("need t_start < t_switch < t_end")
    up = RampSegment(t_start, t_switch, n_start, slope)
    down = RampSegment(t_switch, t_end, up.n_end(), -slope)
    sched = IndexSchedule((up, down), k_per_index, 0.0)
    return replace(sched, reference_k=sched.k_c(t_switch))


def forward_schedule(t_start, t_switch, t_end, slope, k_per_index, n_start=1.0):
    """Sawtooth schedule: the storage ramp is replayed with the same sign.

    n_c jumps back to its storage starting value at t_switch (marked as a
    reset), so the stored wave vectors are re-scanned in the original order.
    """
    if not (t_start < t_switch < t_end):
        raise ScheduleError("need t_start < t_switch < t_end")
    up = RampSegment(t_start, t_switch, n_start, slope)
    again = RampSegment(t_switch, t_end, n_start, slope, reset=True)
    sched = IndexSchedule((up, again), k_per_index, 0.0)
    return replace(sched, reference_k=sched.k_c(t_switch - 1e-15 * max(
        abs(t_switch - t_start), 1.0)))


# ---------------------------------------------------------------------------
# pulses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pulse:
    """Complex envelope of the input wave packet on a uniform time grid.

    ``envelope`` has units 1/sqrt(time); unit energy sum(|e|^2) dt = 1 is the
    single-photon normalization produced by the factories.
    """

    grid: np.ndarray
    envelope: np.ndarray
    kind: str            # "gaussian" or "custom"
    fwhm: float          # intensity FWHM (s)
    center: float
    scale: complex = 1.0 + 0.0j   # linear prefactor (for linearity tests)

    @property
    def dt(self):
        return float(self.grid[1] - self.grid[0])

    def energy(self):
        """Discrete energy sum(|envelope|^2) * dt."""
        return float(np.sum(np.abs(self.envelope) ** 2) * self.dt)

    def amplitude(self, t):
        """Envelope at arbitrary times: closed form for Gaussian pulses
        (with the 1e-8 peak clip), linear interpolation otherwise."""
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            a = _gaussian_amp(self.fwhm)
            x = t - self.center
            out = a * np.exp(-2.0 * math.log(2.0) * (x / self.fwhm) ** 2)
            out = np.where(out < PULSE_CLIP * a, 0.0, out) * self.scale
        else:
            re = np.interp(t, self.grid, self.envelope.real, left=0.0, right=0.0)
            im = np.interp(t, self.grid, self.envelope.imag, left=0.0, right=0.0)
            out = re + 1j * im
        return complex(out) if out.ndim == 0 else out

    def scaled(self, c):
        """Same pulse with the envelope multiplied by a complex constant."""
        return replace(self, envelope=self.envelope * c, scale=self.scale * c)

    def bandwidth_fwhm(self):
        """Intensity FWHM of the spectrum (rad/s).

        4 ln2 / fwhm for a Gaussian (transform limit); FFT estimate otherwise.
        """
        if self.kind == "gaussian":
            return 4.0 * math.log(2.0) / self.fwhm
        spec = np.abs(np.fft.fft(self.envelope)) ** 2
        freq = 2.0 * math.pi * np.fft.fftfreq(self.grid.size, d=self.dt)
        order = np.argsort(freq)
        spec, freq = spec[order], freq[order]
        half = spec.max() / 2.0
        above = freq[spec >= half]
        return float(above[-1] - above[0])


def _gaussian_amp(fwhm):
    # unit-energy amplitude: integral of a^2 exp(-4 ln2 t^2/fwhm^2) dt = 1
    return (4.0 * math.log(2.0) / (math.pi * fwhm * fwhm)) ** 0.25


def make_gaussian_pulse(fwhm, center, grid) -> Pulse:
    """Unit-energy Gaussian with the given *intensity* FWHM.

    The grid must extend at least 6 FWHM on each side of the center so the
    envelope is negligible (< 1e-8 of peak) at the boundaries; values below
    the clip threshold are set to exactly zero.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 8:
        raise PulseBoundaryError("grid must be a 1-d array with several samples")
    d = np.diff(grid)
    if np.any(np.abs(d - d[0]) > 1e-9 * abs(d[0])):
        raise PulseBoundaryError("grid must be uniform")
    if grid[0] > center - 6.0 * fwhm or grid[-1] < center + 6.0 * fwhm:
        raise PulseBoundaryError(
            "grid must span at least 6 FWHM on each side of the pulse center")
    a = _gaussian_amp(fwhm)
    env = a * np.exp(-2.0 * math.log(2.0) * ((grid - center) / fwhm) ** 2)
    env = np.where(env < PULSE_CLIP * a, 0.0, env).astype(complex)
    return Pulse(grid, env, "gaussian", float(fwhm), float(center))


def custom_pulse(grid, envelope, normalize=True) -> Pulse:
    """Wrap an arbitrary complex envelope; unit energy unless normalize=False."""
    grid = np.asarray(grid, dtype=float)
    envelope = np.asarray(envelope, dtype=complex)
    if grid.shape != envelope.shape:
        raise PulseBoundaryError("grid and envelope must have equal shapes")
    dt = float(grid[1] - grid[0])
    energy = float(np.sum(np.abs(envelope) ** 2) * dt)
    if energy == 0.0:
        raise PulseBoundaryError("envelope carries no energy")
    if normalize:
        envelope = envelope / math.sqrt(energy)
    intensity = np.abs(envelope) ** 2
    peak = intensity.max()
    if intensity[0] > 1e-16 * peak or intensity[-1] > 1e-16 * peak:
        raise PulseBoundaryError("envelope not negligible at the grid boundaries")
    above = grid[intensity >= peak / 2.0]
    fwhm = float(above[-1] - above[0]) if above.size > 1 else dt
    center = float(np.sum(grid * intensity) / np.sum(intensity))
    return Pulse(grid, envelope, "custom", fwhm, center)


# ---------------------------------------------------------------------------
# spin-wave mode grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeGrid:
    """Truncated grid of spin-wave modes indexed by their resonance times."""

    t_q: np.ndarray     # resonance times, spaced by delta (s)
    q: np.ndarray       # wave-vector offsets, multiples of 2 pi / L (rad/m)
    delta: float        # spacing of t_q (s)
    anchor: float       # time at which q = 0 is resonant

    @property
    def count(self):
        return int(self.t_q.size)


def build_mode_grid(schedule: IndexSchedule, derived: DerivedParams, window,
                    guard=0.0, max_modes=512) -> ModeGrid:
    """Mode grid covering ``window`` plus ``guard`` on both sides.

    Resonance times sit at integer multiples of delta relative to the
    schedule's zero-mismatch anchor; both endpoints are included.  Labels
    are assigned along the first segment's (extrapolated) ramp, so on a
    triangular schedule the modes dated past the turnaround are guard modes
    whose wave vectors are never actually scanned.
    """
    if guard < 0.0:
        raise ValueError("guard must be >= 0")
    w0, w1 = float(window[0]), float(window[1])
    if w1 <= w0:
        raise ValueError("window must have positive length")
    anchor = schedule.anchor_time()
    delta = derived.delta
    j_lo = math.ceil((w0 - guard - anchor) / delta - 1e-9)
    j_hi = math.floor((w1 + guard - anchor) / delta + 1e-9)
    count = j_hi - j_lo + 1
    if count < 1:
        raise ModeTruncationError("window shorter than one mode spacing",
                                  required=1)
    if count > max_modes:
        raise ModeTruncationError(
            f"mode grid needs {count} modes but max_modes={max_modes}",
            required=count)
    j = np.arange(j_lo, j_hi + 1)
    t_q = anchor + j * delta
    kdot = schedule.k_per_index * schedule.segments[0].slope
    q = -kdot * j * delta
    return ModeGrid(t_q, q, float(delta), float(anchor))


# ---------------------------------------------------------------------------
# scenario description and spin-wave state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    """Storage window [t_start, t_switch], retrieval window [t_switch, t_end]."""

    t_start: float
    t_switch: float
    t_end: float
    retrieval_mode: str = "backward"   # "backward" | "forward"
    phase_compensation: bool = True    # sawtooth control-phase compensation

    def __post_init__(self):
        if not (self.t_start < self.t_switch < self.t_end):
            raise ValueError("need t_start < t_switch < t_end")
        if self.retrieval_mode not in ("backward", "forward"):
            raise ValueError("retrieval_mode must be 'backward' or 'forward'")


@dataclass(frozen=True)
class SpinWaveState:
    """Complex spin-wave amplitudes S_q over a mode grid at one instant."""

    modes: ModeGrid
    amplitudes: np.ndarray
    time: float

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))
