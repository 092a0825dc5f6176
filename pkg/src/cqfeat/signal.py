"""Signal containers, windows, synthetic generators, and shift/warp operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Signal",
    "TimeFrequencyMatrix",
    "hann_window",
    "dft",
    "idft",
    "synth_tone",
    "synth_harmonic_stack",
    "time_shift",
    "time_warp",
    "downsample2",
    "design_lowpass",
    "apply_fir_zero_phase",
]


@dataclass(frozen=True)
class Signal:
    """A mono sample sequence with its sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not isinstance(self.sample_rate, (int, np.integer)) or self.sample_rate <= 0:
            raise ValueError("sample_rate must be a positive integer")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples.setflags(write=False)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class TimeFrequencyMatrix:
    """A bins-by-frames magnitude matrix with per-bin center frequencies.

    ``values[k, m]`` is the response of bin ``k`` at frame ``m``; frames are
    ``hop_length`` samples apart.  Values are non-negative magnitudes unless
    ``log_domain`` or ``normalized`` is set, in which case sign freedom is
    expected and only finiteness is enforced.
    """

    values: np.ndarray
    bin_frequencies: np.ndarray
    hop_length: int
    sample_rate: int
    representation_tag: str
    log_domain: bool = False
    normalized: bool = False

    _TAGS = ("CQT", "CWT", "MFSC", "STFT")

    def __post_init__(self):
        values = np.asarray(self.values)
        freqs = np.asarray(self.bin_frequencies, dtype=np.float64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bin_frequencies", freqs)
        if self.representation_tag not in self._TAGS:
            raise ValueError(f"unknown representation tag {self.representation_tag!r}")
        if values.ndim != 2:
            raise ValueError("values must be a 2-D array")
        if freqs.ndim != 1 or freqs.size != values.shape[0]:
            raise ValueError("bin_frequencies length must equal the row count")
        if self.hop_length < 1:
            raise ValueError("hop_length must be >= 1")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if freqs.size > 1 and not np.all(np.diff(freqs) > 0):
            raise ValueError("bin_frequencies must be strictly ascending")
        if freqs.size and freqs[-1] >= self.sample_rate / 2:
            raise ValueError("bin_frequencies must stay below Nyquist")
        if values.size and not np.all(np.isfinite(values)):
            raise ValueError("matrix values must be finite")
        if not (self.log_domain or self.normalized):
            if values.size and np.any(values < 0):
                raise ValueError("magnitude values must be non-negative")
        values.setflags(write=False)
        freqs.setflags(write=False)

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def hann_window(length: int) -> np.ndarray:
    """Symmetric Hann window; ``[1.0]`` for the degenerate single-point case."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    if length == 1:
        return np.ones(1)
    n = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / (length - 1)))


def dft(v: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT of a complex vector."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size < 1:
        raise ValueError("dft input must be non-empty")
    if not np.all(np.isfinite(v)):
        raise ValueError("dft input must be finite")
    return np.fft.fft(v)


def idft(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft` (includes the 1/N factor)."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size < 1:
        raise ValueError("idft input must be non-empty")
    if not np.all(np.isfinite(v)):
        raise ValueError("idft input must be finite")
    return np.fft.ifft(v)


def synth_tone(freq: float, duration: float, sample_rate: int, amplitude: float = 1.0) -> Signal:
    """Pure sine tone; length is ``duration * sample_rate`` rounded to samples."""
    if not 0.0 < freq < sample_rate / 2:
        raise ValueError("tone frequency must lie strictly between 0 and Nyquist")
    n = int(np.floor(duration * sample_rate + 0.5))
    t = np.arange(n)
    return Signal(amplitude * np.sin(2.0 * np.pi * freq * t / sample_rate), sample_rate)


def synth_harmonic_stack(f0: float, n_harmonics: int, duration: float, sample_rate: int) -> Signal:
    """Equal-amplitude sum of ``f0`` and its first ``n_harmonics`` harmonics.

    Components sit at ``f0, 2*f0, ..., (n_harmonics + 1)*f0`` and the summed
    waveform is peak-normalized to 0.9.
    """
    if n_harmonics < 0:
        raise ValueError("n_harmonics must be >= 0")
    highest = f0 * (n_harmonics + 1)
    if not 0.0 < f0 or not highest < sample_rate / 2:
        raise ValueError("highest harmonic must lie strictly below Nyquist")
    n = int(np.floor(duration * sample_rate + 0.5))
    t = np.arange(n)
    x = np.zeros(n)
    for h in range(1, n_harmonics + 2):
        x += np.sin(2.0 * np.pi * h * f0 * t / sample_rate)
    peak = np.max(np.abs(x)) if n else 0.0
    if peak > 0:
        x *= 0.9 / peak
    return Signal(x, sample_rate)


def time_shift(s: Signal, shift: int) -> Signal:
    """Shift samples right by ``shift`` (left if negative), zero-filling vacated slots."""
    n = len(s)
    if abs(shift) >= n:
        raise ValueError("|shift| must be smaller than the signal length")
    out = np.zeros(n)
    if shift > 0:
        out[shift:] = s.samples[:-shift]
    elif shift < 0:
        out[:shift] = s.samples[-shift:]
    else:
        out[:] = s.samples
    return Signal(out, s.sample_rate)


def time_warp(s: Signal, epsilon: float) -> Signal:
    """Time-warp ``x(t) -> x((1 - epsilon) * t)`` by linear interpolation.

    The output is longer by roughly ``1/(1 - epsilon)``, truncated so no
    sample position ever reads past the end of the input.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    n = len(s)
    if epsilon == 0.0:
        return Signal(s.samples.copy(), s.sample_rate)
    rate = 1.0 - epsilon
    out_len = min(int(np.floor(n / rate)), int(np.floor((n - 1) / rate)) + 1)
    positions = rate * np.arange(out_len)
    out = np.interp(positions, np.arange(n), s.samples)
    return Signal(out, s.sample_rate)


def design_lowpass(num_taps: int, cutoff_hz: float, sample_rate: float) -> np.ndarray:
    """Blackman-windowed-sinc low-pass FIR, normalized to unity DC gain."""
    if num_taps < 3 or num_taps % 2 == 0:
        raise ValueError("num_taps must be an odd integer >= 3")
    if not 0.0 < cutoff_hz < sample_rate / 2:
        raise ValueError("cutoff must lie strictly between 0 and Nyquist")
    m = np.arange(num_taps) - (num_taps - 1) / 2
    fc = cutoff_hz / sample_rate
    taps = 2.0 * fc * np.sinc(2.0 * fc * m) * np.blackman(num_taps)
    return taps / taps.sum()


def apply_fir_zero_phase(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Filter with a symmetric FIR, reflect-padded so the output is zero-phase."""
    half = (len(taps) - 1) // 2
    padded = np.pad(x, half, mode="reflect") if x.size > 1 else np.pad(x, half, mode="edge")
    return np.convolve(padded, taps, mode="valid")


def downsample2(s: Signal) -> Signal:
    """Halve the sample rate: anti-alias low-pass at ``fs/4``, keep every second sample."""
    n = len(s)
    if n < 2:
        raise ValueError("signal must have at least 2 samples")
    if s.sample_rate % 2 != 0:
        raise ValueError("sample_rate must be even to halve exactly")
    taps = design_lowpass(127, s.sample_rate / 4, s.sample_rate)
    filtered = apply_fir_zero_phase(s.samples, taps)
    return Signal(filtered[::2], s.sample_rate // 2)
