"""Continuous wavelet transform with complex Morlet bases at dyadic scales.

The raw transform correlates the signal with dilated copies of a complex
Morlet wavelet at every sample position, which is highly redundant; the
framed reduction sums coefficient magnitudes over sliding windows to produce
a frames-by-bins matrix comparable with the other front-ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .signal import Signal, TimeFrequencyMatrix

__all__ = ["CwtParams", "default_scales", "morlet_wavelet", "cwt_raw", "cwt_framed"]


def default_scales(voices: int = 3, k_min: int = 3, k_max: int = 26) -> np.ndarray:
    """Dyadic scale ladder ``2**(k/voices)`` for ``k`` in ``[k_min, k_max]``."""
    return 2.0 ** (np.arange(k_min, k_max + 1) / voices)


@dataclass(frozen=True)
class CwtParams:
    """Morlet CWT parameters; defaults give 24 bins spanning 8 octaves."""

    sample_rate: int = 16000
    scales: tuple = tuple(default_scales())
    morlet_bandwidth: float = 1.0
    morlet_center_freq: float = 1.0
    frame_length: int = 320
    hop_length: int = 64

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=np.float64)
        object.__setattr__(self, "scales", tuple(scales))
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if scales.size < 1:
            raise ValueError("at least one scale is required")
        if np.any(scales <= 1.0):
            raise ValueError("scales must all be > 1")
        if np.any(np.diff(scales) <= 0):
            raise ValueError("scales must be strictly ascending")
        if self.morlet_bandwidth <= 0 or self.morlet_center_freq <= 0:
            raise ValueError("Morlet bandwidth and center frequency must be positive")
        if not self.frame_length > self.hop_length >= 1:
            raise ValueError("frame_length must exceed hop_length, hop_length >= 1")
        top = self.morlet_center_freq * self.sample_rate / scales[0]
        if top > self.sample_rate / 2:
            raise ValueError("smallest scale maps above Nyquist")

    @property
    def n_scales(self) -> int:
        return len(self.scales)

    def scale_frequencies(self) -> np.ndarray:
        """Center frequency per scale, in scale order (descending in Hz).

        A scale landing exactly on Nyquist is clipped to 0.999 of it so the
        bin stays representable alongside the others.
        """
        freqs = self.morlet_center_freq * self.sample_rate / np.asarray(self.scales)
        nyquist = self.sample_rate / 2
        return np.minimum(freqs, 0.999 * nyquist)


def morlet_wavelet(scale: float, p: CwtParams) -> np.ndarray:
    """Sampled complex Morlet at ``scale``, truncated at four envelope sigmas."""
    if scale < 1.0:
        raise ValueError("scale must be >= 1")
    bw = p.morlet_bandwidth
    half = int(math.floor(4.0 * scale * math.sqrt(bw)))
    t = np.arange(-half, half + 1) / scale
    envelope = np.exp(-t * t / bw)
    carrier = np.exp(2j * np.pi * p.morlet_center_freq * t)
    return envelope * carrier / (math.sqrt(math.pi * bw) * math.sqrt(scale))


def cwt_raw(s: Signal, p: CwtParams) -> np.ndarray:
    """Redundant CWT: one complex coefficient per scale and sample position.

    Row ``j`` is the same-length correlation of the signal with the wavelet
    at ``p.scales[j]``, i.e. convolution with its conjugated time reverse.
    """
    if s.sample_rate != p.sample_rate:
        raise ValueError("signal and parameter sample rates disagree")
    longest = len(morlet_wavelet(p.scales[-1], p))
    if len(s) <= longest:
        raise ValueError("signal must be longer than the widest wavelet support")
    out = np.empty((p.n_scales, len(s)), dtype=np.complex128)
    for j, scale in enumerate(p.scales):
        w = morlet_wavelet(scale, p)
        out[j] = fftconvolve(s.samples, np.conj(w[::-1]), mode="same")
    return out


def cwt_framed(s: Signal, p: CwtParams) -> TimeFrequencyMatrix:
    """Frame-summed CWT magnitudes, rows reordered to ascending frequency.

    Coefficient magnitudes are summed over ``frame_length`` windows advancing
    by ``hop_length``; frame count is ``1 + (n - frame_length) // hop_length``.
    """
    mags = np.abs(cwt_raw(s, p))
    n = mags.shape[1]
    n_frames = 1 + (n - p.frame_length) // p.hop_length
    csum = np.concatenate([np.zeros((p.n_scales, 1)), np.cumsum(mags, axis=1)], axis=1)
    starts = np.arange(n_frames) * p.hop_length
    values = csum[:, starts + p.frame_length] - csum[:, starts]
    freqs = p.scale_frequencies()
    order = np.argsort(freqs)
    return TimeFrequencyMatrix(
        values=values[order],
        bin_frequencies=freqs[order],
        hop_length=p.hop_length,
        sample_rate=p.sample_rate,
        representation_tag="CWT",
    )
