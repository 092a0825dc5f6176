"""STFT and mel-filterbank spectral coefficients (MFSC)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import Signal, TimeFrequencyMatrix, hann_window

__all__ = [
    "MelParams",
    "hz_to_mel",
    "mel_to_hz",
    "stft",
    "stft_matrix",
    "mel_filterbank",
    "mel_center_frequencies",
    "mfsc",
]


def hz_to_mel(f):
    """Decadic mel scale, ``2595 * log10(1 + f / 700)``."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelParams:
    """Framing and filterbank parameters; ``f_high`` defaults to Nyquist."""

    sample_rate: int = 16000
    win_length: int = 320
    hop_length: int = 64
    n_fft: int = 512
    n_filters: int = 24
    f_low: float = 0.0
    f_high: float | None = None
    log_floor: float = 1e-10
    apply_log: bool = True

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.f_high is None:
            object.__setattr__(self, "f_high", self.sample_rate / 2)
        if not 1 <= self.hop_length:
            raise ValueError("hop_length must be >= 1")
        if not 1 <= self.win_length <= self.n_fft:
            raise ValueError("win_length must satisfy 1 <= win_length <= n_fft")
        if not 0.0 <= self.f_low < self.f_high <= self.sample_rate / 2:
            raise ValueError("need 0 <= f_low < f_high <= Nyquist")
        if self.n_filters < 1:
            raise ValueError("n_filters must be >= 1")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


def stft(s: Signal, p: MelParams) -> np.ndarray:
    """One-sided STFT with Hann-windowed frames zero-padded to ``n_fft``.

    Returns a complex ``(n_fft // 2 + 1, n_frames)`` array with
    ``n_frames = 1 + (n - win_length) // hop_length``.
    """
    if s.sample_rate != p.sample_rate:
        raise ValueError("signal and parameter sample rates disagree")
    n = len(s)
    if n < p.win_length:
        raise ValueError("signal shorter than one analysis window")
    n_frames = 1 + (n - p.win_length) // p.hop_length
    window = hann_window(p.win_length)
    strides = (s.samples.strides[0] * p.hop_length, s.samples.strides[0])
    frames = np.lib.stride_tricks.as_strided(
        s.samples, shape=(n_frames, p.win_length), strides=strides
    )
    return np.fft.rfft(frames * window, n=p.n_fft, axis=1).T


def stft_matrix(s: Signal, p: MelParams) -> TimeFrequencyMatrix:
    """STFT magnitudes as a TimeFrequencyMatrix (Nyquist row dropped)."""
    spec = np.abs(stft(s, p))[: p.n_fft // 2]
    freqs = np.arange(p.n_fft // 2) * p.sample_rate / p.n_fft
    return TimeFrequencyMatrix(
        values=spec,
        bin_frequencies=freqs,
        hop_length=p.hop_length,
        sample_rate=p.sample_rate,
        representation_tag="STFT",
    )


def _mel_edges(p: MelParams) -> np.ndarray:
    """``n_filters + 2`` mel-equidistant edge frequencies in Hz."""
    mels = np.linspace(hz_to_mel(p.f_low), hz_to_mel(p.f_high), p.n_filters + 2)
    return mel_to_hz(mels)


def mel_center_frequencies(p: MelParams) -> np.ndarray:
    return _mel_edges(p)[1:-1]


def mel_filterbank(p: MelParams) -> np.ndarray:
    """Triangular filters on the one-sided FFT grid, each peak-normalized to 1."""
    edges = _mel_edges(p)
    bin_width = p.sample_rate / p.n_fft
    if np.any(edges[2:] - edges[:-2] < bin_width):
        raise ValueError("a filter is narrower than one FFT bin; reduce n_filters")
    grid = np.arange(p.n_fft // 2 + 1) * bin_width
    bank = np.zeros((p.n_filters, grid.size))
    for i in range(p.n_filters):
        left, center, right = edges[i], edges[i + 1], edges[i + 2]
        rising = (grid - left) / (center - left)
        falling = (right - grid) / (right - center)
        tri = np.maximum(0.0, np.minimum(rising, falling))
        peak = tri.max()
        if peak <= 0.0:
            raise ValueError("a filter has no support on the FFT grid")
        bank[i] = tri / peak
    return bank


def mfsc(s: Signal, p: MelParams) -> TimeFrequencyMatrix:
    """Mel-frequency spectral coefficients: filterbank energies of ``|STFT|**2``.

    In the log domain (default) values are ``ln(energy + log_floor)``.
    """
    power = np.abs(stft(s, p)) ** 2
    values = mel_filterbank(p) @ power
    if p.apply_log:
        values = np.log(values + p.log_floor)
    return TimeFrequencyMatrix(
        values=values,
        bin_frequencies=mel_center_frequencies(p),
        hop_length=p.hop_length,
        sample_rate=p.sample_rate,
        representation_tag="MFSC",
        log_domain=p.apply_log,
    )
