"""Software stand-in for the hardware channel emulator.

Implements a time-variant multipath model: per-tap sinusoidally oscillating
delay, constant amplitude, and a Doppler phase ramp, plus seeded circular
Gaussian noise and sample-accurate superposition of independently arriving
signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dsp import KERNEL_HALF, delayed_samples
from .modem import IQBuffer

SPEED_OF_LIGHT_M_S = 2.998e8

# Guard against runaway realizations; overridable per call.
MAX_REALIZATION_SAMPLES = 50_000_000


@dataclass(frozen=True)
class ChannelTap:
    """One propagation path: delay law, amplitude, Doppler, initial phase.

    The delay oscillates sinusoidally around ``mean_delay``; amplitude is
    constant in time (fading is carried purely by phase rotation and tap
    superposition).
    """

    mean_delay: float = 0.0
    delay_osc_amplitude: float = 0.0
    delay_osc_rate: float = 0.0
    gain: float = 1.0
    doppler_hz: float = 0.0
    initial_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.mean_delay < 0:
            raise ValueError("mean_delay must be >= 0")
        if abs(self.delay_osc_amplitude) > self.mean_delay:
            raise ValueError("delay oscillation may not exceed the mean delay")
        if self.gain < 0:
            raise ValueError("gain must be >= 0")


@dataclass(frozen=True)
class ChannelProfile:
    """Declarative per-link tap set plus noise level and seed.

    ``noise_snr_db`` is referenced to the post-channel signal power;
    ``math.inf`` (or None) means noiseless.
    """

    taps: tuple[ChannelTap, ...]
    noise_snr_db: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        taps = tuple(self.taps)
        if not 1 <= len(taps) <= 8:
            raise ValueError("profile needs between 1 and 8 taps")
        delays = [t.mean_delay for t in taps]
        if delays != sorted(delays):
            raise ValueError("taps must be sorted by mean_delay ascending")
        object.__setattr__(self, "taps", taps)

    @property
    def noiseless(self) -> bool:
        return self.noise_snr_db is None or math.isinf(self.noise_snr_db)

    @property
    def max_delay(self) -> float:
        return max(t.mean_delay + abs(t.delay_osc_amplitude) for t in self.taps)


@dataclass(frozen=True)
class LinkKinematics:
    """Relative motion of a link: speed, arrival angle, carrier frequency."""

    relative_speed: float
    arrival_angle: float
    carrier_freq: float = 2.1e9

    def __post_init__(self) -> None:
        if self.relative_speed < 0:
            raise ValueError("relative_speed must be >= 0")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be positive")


def doppler_shift(kin: LinkKinematics) -> float:
    """Doppler shift nu/c * f_c * cos(alpha) in Hz (sign follows cos)."""
    return kin.relative_speed / SPEED_OF_LIGHT_M_S * kin.carrier_freq * math.cos(kin.arrival_angle)


@dataclass(frozen=True)
class ChannelRealization:
    """Sampled tap trajectories for one profile over a fixed time span.

    ``tap_delays`` (seconds) and ``tap_phases`` (radians) have shape
    (n_taps, n_samples); gains are per-tap constants.
    """

    profile: ChannelProfile
    sample_rate: float
    tap_delays: np.ndarray
    tap_phases: np.ndarray
    tap_gains: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.tap_delays.shape[1])

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


def realize_channel(
    profile: ChannelProfile,
    duration: float,
    sample_rate: float,
    max_samples: int = MAX_REALIZATION_SAMPLES,
) -> ChannelRealization:
    """Evaluate the tap trajectories of ``profile`` on a sample grid.

    delay_i(t) = mean + amplitude * sin(2 pi rate t), phase_i(t) = phase0 +
    2 pi doppler t, amplitude constant.  Deterministic; the profile seed only
    drives the additive noise applied later.
    """
    if duration <= 0 or sample_rate <= 0:
        raise ValueError("duration and sample_rate must be positive")
    n = int(math.ceil(duration * sample_rate))
    if n > max_samples:
        raise ValueError(f"realization of {n} samples exceeds the {max_samples}-sample cap")

    t = np.arange(n, dtype=np.float64) / sample_rate
    taps = profile.taps
    delays = np.empty((len(taps), n), dtype=np.float64)
    phases = np.empty((len(taps), n), dtype=np.float64)
    gains = np.empty(len(taps), dtype=np.float64)
    for i, tap in enumerate(taps):
        if tap.delay_osc_amplitude != 0.0:
            delays[i] = tap.mean_delay + tap.delay_osc_amplitude * np.sin(
                2.0 * np.pi * tap.delay_osc_rate * t
            )
        else:
            delays[i] = tap.mean_delay
        if tap.doppler_hz != 0.0:
            phases[i] = tap.initial_phase + 2.0 * np.pi * tap.doppler_hz * t
        else:
            phases[i] = tap.initial_phase
        gains[i] = tap.gain
    return ChannelRealization(profile, float(sample_rate), delays, phases, gains)


def realize_for(
    profile: ChannelProfile, signal: IQBuffer, slack_samples: int = 0
) -> ChannelRealization:
    """Realization long enough to apply ``profile`` to ``signal``."""
    extra = int(math.ceil(profile.max_delay * signal.sample_rate)) + KERNEL_HALF + slack_samples
    duration = (len(signal) + extra) / signal.sample_rate
    return realize_channel(profile, duration, signal.sample_rate)


def _tap_output(x: np.ndarray, delay_samples: np.ndarray, out_len: int) -> np.ndarray:
    """x(t - tau(t)) for one tap, bit-exact when the delay is integral."""
    if delay_samples.size and np.all(delay_samples == delay_samples[0]):
        d = float(delay_samples[0])
        if d == int(d):
            shift = int(d)
            out = np.zeros(out_len, dtype=np.complex128)
            stop = min(out_len, shift + x.size)
            if stop > shift:
                out[shift:stop] = x[: stop - shift]
            return out
    n = np.arange(out_len, dtype=np.float64)
    return delayed_samples(x, n - delay_samples[:out_len])


def apply_channel(signal: IQBuffer, real: ChannelRealization) -> IQBuffer:
    """Convolve ``signal`` with the realized time-variant taps, add noise.

    y[n] = sum_i gain_i * exp(j phase_i[n]) * x(t_n - tau_i[n]) + noise,
    fractional delays via windowed band-limited interpolation.  The output is
    extended past the input so delayed energy is not truncated.
    """
    if signal.sample_rate != real.sample_rate:
        raise ValueError(
            f"sample-rate mismatch: signal {signal.sample_rate} vs realization {real.sample_rate}"
        )
    x = signal.samples
    max_delay_samp = float(np.max(real.tap_delays)) * real.sample_rate
    out_len = len(signal) + int(math.ceil(max_delay_samp))
    if max_delay_samp > 0:
        out_len += KERNEL_HALF
    if out_len > real.n_samples:
        raise ValueError(
            f"realization covers {real.n_samples} samples, output needs {out_len};"
            " realize over a longer duration"
        )

    y = np.zeros(out_len, dtype=np.complex128)
    for i in range(real.tap_gains.size):
        delay_samples = real.tap_delays[i] * real.sample_rate
        xi = _tap_output(x, delay_samples, out_len)
        phases = real.tap_phases[i, :out_len]
        if np.any(phases != 0.0):
            xi = xi * np.exp(1j * phases)
        gain = real.tap_gains[i]
        if gain != 1.0:
            xi = xi * gain
        y += xi

    profile = real.profile
    if not profile.noiseless:
        power = float(np.mean(np.abs(y) ** 2))
        if power > 0.0:
            noise_power = power * 10.0 ** (-profile.noise_snr_db / 10.0)
            rng = np.random.default_rng(profile.seed)
            scale = math.sqrt(noise_power / 2.0)
            y = y + scale * (rng.standard_normal(out_len) + 1j * rng.standard_normal(out_len))
    return IQBuffer(y, signal.sample_rate, signal.carrier_freq)


def add_awgn(signal: IQBuffer, snr_db: float, seed: int) -> IQBuffer:
    """Circular Gaussian noise at ``snr_db`` below the measured signal power."""
    if math.isinf(snr_db) and snr_db > 0:
        return signal
    power = signal.power()
    if power <= 0.0:
        raise ValueError("SNR undefined for a zero-power signal")
    noise_power = power * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    scale = math.sqrt(noise_power / 2.0)
    noise = scale * (rng.standard_normal(len(signal)) + 1j * rng.standard_normal(len(signal)))
    return IQBuffer(signal.samples + noise, signal.sample_rate, signal.carrier_freq)


def superpose(components: list[tuple[IQBuffer, float]]) -> IQBuffer:
    """Sample-wise sum of buffers, each shifted to its start offset.

    Offsets are in seconds (rounded to the nearest sample) and must be
    non-negative; the output covers the union of all components.
    """
    if not components:
        raise ValueError("superpose needs at least one component")
    rate = components[0][0].sample_rate
    for buf, _ in components:
        if buf.sample_rate != rate:
            raise ValueError("all components must share one sample rate")
    starts = []
    for _, offset in components:
        if offset < 0:
            raise ValueError("start offsets must be >= 0")
        starts.append(int(round(offset * rate)))
    out_len = max(start + len(buf) for (buf, _), start in zip(components, starts))
    out = np.zeros(out_len, dtype=np.complex128)
    for (buf, _), start in zip(components, starts):
        out[start : start + len(buf)] += buf.samples
    return IQBuffer(out, rate, components[0][0].carrier_freq)
