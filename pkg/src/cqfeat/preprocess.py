"""Utterance conditioning: resampling to 16 kHz, energy VAD, and CMVN."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .signal import Signal, TimeFrequencyMatrix, apply_fir_zero_phase, design_lowpass

__all__ = [
    "VadParams",
    "UnsupportedRateError",
    "EmptySignalError",
    "resample_to_16k",
    "energy_vad",
    "cmvn",
]

TARGET_RATE = 16000
_SUPPORTED_RATES = (16000, 32000, 48000)


class UnsupportedRateError(ValueError):
    """The source sample rate has no integer ratio to 16 kHz."""


class EmptySignalError(ValueError):
    """Every frame fell below the activity threshold."""


@dataclass(frozen=True)
class VadParams:
    """Energy detector settings: 25 ms frames, 10 ms hop, -40 dB threshold."""

    frame_length: int = 400
    hop_length: int = 160
    threshold_db: float = -40.0

    def __post_init__(self):
        if not 1 <= self.hop_length <= self.frame_length:
            raise ValueError("need frame_length >= hop_length >= 1")
        if self.threshold_db >= 0:
            raise ValueError("threshold_db must be negative (relative to max frame RMS)")


def resample_to_16k(s: Signal) -> Signal:
    """Decimate an integer-ratio source (16/32/48 kHz) to 16 kHz."""
    if s.sample_rate == TARGET_RATE:
        return s
    if s.sample_rate not in _SUPPORTED_RATES:
        raise UnsupportedRateError(
            f"sample rate {s.sample_rate} is not an integer multiple of {TARGET_RATE}"
        )
    factor = s.sample_rate // TARGET_RATE
    taps = design_lowpass(127, TARGET_RATE / 2, s.sample_rate)
    filtered = apply_fir_zero_phase(s.samples, taps)
    return Signal(filtered[::factor], TARGET_RATE)


def energy_vad(s: Signal, p: VadParams = VadParams()) -> Signal:
    """Keep samples covered by frames whose RMS clears the relative threshold.

    Frames start every ``hop_length`` samples (the tail is covered by shorter
    frames); surviving frames' sample ranges are merged, so the output is a
    subsequence of the input with ordering preserved.
    """
    n = len(s)
    if n < p.frame_length:
        raise ValueError("signal shorter than one VAD frame")
    x = s.samples
    starts = np.arange(0, n, p.hop_length)
    ends = np.minimum(starts + p.frame_length, n)
    sq = np.concatenate([[0.0], np.cumsum(x * x)])
    rms = np.sqrt((sq[ends] - sq[starts]) / (ends - starts))
    threshold = rms.max() * 10.0 ** (p.threshold_db / 20.0)
    surviving = rms >= threshold
    if not np.any(surviving):
        raise EmptySignalError("no frame reached the activity threshold")
    keep = np.zeros(n, dtype=bool)
    for st, en in zip(starts[surviving], ends[surviving]):
        keep[st:en] = True
    return Signal(x[keep], s.sample_rate)


def cmvn(m: TimeFrequencyMatrix) -> TimeFrequencyMatrix:
    """Standardize each row to zero mean and unit variance across frames.

    Rows with standard deviation below 1e-12 are mean-shifted only.  The
    result carries ``normalized=True`` since values may be negative.
    """
    if m.n_frames < 2:
        raise ValueError("CMVN needs at least two frames")
    values = np.asarray(m.values, dtype=np.float64)
    mean = values.mean(axis=1, keepdims=True)
    std = values.std(axis=1, keepdims=True)
    scale = np.where(std < 1e-12, 1.0, std)
    return replace(m, values=(values - mean) / scale, normalized=True)
