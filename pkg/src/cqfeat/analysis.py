"""Analytical instruments: class separability, invariance spans, synthetic
harmonic-spacing and deformation experiments, and classification metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cqt import CqtParams, atom_length, bin_frequencies, cqt, cqt_atom
from .cwt import CwtParams, cwt_framed, morlet_wavelet
from .mel import MelParams, mel_center_frequencies, mel_filterbank, mfsc, stft_matrix
from .signal import (
    Signal,
    TimeFrequencyMatrix,
    hann_window,
    synth_harmonic_stack,
    synth_tone,
    time_warp,
)

__all__ = [
    "LabeledFeatureSet",
    "ContingencyMatrix",
    "InvarianceProfile",
    "SpacingRow",
    "DeformationRow",
    "f_ratio",
    "temporal_span_profile",
    "harmonic_spacing_experiment",
    "deformation_experiment",
    "uar",
    "accuracy",
]


@dataclass(frozen=True)
class LabeledFeatureSet:
    """Feature matrices paired with class labels, sharing one bin layout."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("feature set is empty")
        first = entries[0][0]
        for matrix, label in entries:
            if not isinstance(label, str) or not label:
                raise ValueError("labels must be non-empty strings")
            if matrix.n_bins != first.n_bins or not np.allclose(
                matrix.bin_frequencies, first.bin_frequencies
            ):
                raise ValueError("all matrices must share the same bins")

    @property
    def n_bins(self) -> int:
        return self.entries[0][0].n_bins

    @property
    def bin_frequencies(self) -> np.ndarray:
        return self.entries[0][0].bin_frequencies

    def labels(self) -> set:
        return {label for _, label in self.entries}

    def pooled_frames(self, label: str, per_utterance_mean: bool = False) -> np.ndarray:
        """All frames of one class as a (n_bins, n_frames) array."""
        blocks = [
            m.values.mean(axis=1, keepdims=True) if per_utterance_mean else m.values
            for m, lab in self.entries
            if lab == label
        ]
        if not blocks:
            raise ValueError(f"label {label!r} not present")
        return np.concatenate(blocks, axis=1)


def f_ratio(
    fs: LabeledFeatureSet,
    target: str,
    reference: str,
    per_utterance_mean: bool = False,
) -> np.ndarray:
    """Per-bin two-class separability: squared mean gap over summed variances.

    Frames are pooled across utterances per class.  Bins whose summed
    variance falls below 1e-12 return 0.
    """
    a = fs.pooled_frames(target, per_utterance_mean)
    b = fs.pooled_frames(reference, per_utterance_mean)
    if a.shape[1] < 2 or b.shape[1] < 2:
        raise ValueError("each class needs at least two frames")
    gap = a.mean(axis=1) - b.mean(axis=1)
    denom = a.var(axis=1) + b.var(axis=1)
    out = np.zeros(fs.n_bins)
    ok = denom >= 1e-12
    out[ok] = gap[ok] ** 2 / denom[ok]
    return out


@dataclass(frozen=True)
class ContingencyMatrix:
    """K x K counts; rows are true classes, columns predicted classes."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("counts must be a square matrix")
        if counts.shape[0] < 2:
            raise ValueError("need at least two classes")
        if np.any(counts < 0) or not np.all(counts == np.floor(counts)):
            raise ValueError("counts must be non-negative integers")
        object.__setattr__(self, "counts", counts.astype(np.int64))
        self.counts.setflags(write=False)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]


def uar(c: ContingencyMatrix) -> float:
    """Unweighted average recall: mean over classes of diagonal over row sum."""
    row_sums = c.counts.sum(axis=1)
    if np.any(row_sums == 0):
        raise ValueError("every true class needs at least one sample")
    return float(np.mean(np.diag(c.counts) / row_sums))


def accuracy(c: ContingencyMatrix) -> float:
    """Fraction of correctly classified samples: trace over total."""
    total = c.counts.sum()
    if total == 0:
        raise ValueError("contingency matrix is empty")
    return float(np.trace(c.counts) / total)


@dataclass(frozen=True)
class InvarianceProfile:
    """Per-bin center frequency and temporal span of a front-end's filters."""

    frequencies: np.ndarray
    spans: np.ndarray
    representation_tag: str
    measure: str

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=np.float64)
        spans = np.asarray(self.spans, dtype=np.float64)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "spans", spans)
        if freqs.shape != spans.shape:
            raise ValueError("frequencies and spans must align")
        if not np.all(np.isfinite(spans)) or np.any(spans <= 0):
            raise ValueError("spans must be positive and finite")


def _central_energy_samples(filt: np.ndarray, fraction: float = 0.99) -> int:
    """Length in samples of the central interval holding ``fraction`` of energy."""
    energy = np.abs(filt) ** 2
    total = energy.sum()
    c = np.cumsum(energy)
    tail = (1.0 - fraction) / 2.0
    lo = int(np.searchsorted(c, tail * total))
    hi = int(np.searchsorted(c, (1.0 - tail) * total))
    return hi - lo + 1


def temporal_span_profile(kind: str, params, measure: str = "support") -> InvarianceProfile:
    """Temporal span of each bin's time-domain filter for one front-end.

    ``measure="support"`` reports the filter's full duration (the mel window
    caps the mel filters, and the CWT framing window floors the wavelets);
    ``measure="energy99"`` reports the central 99%-energy duration instead.
    """
    if measure not in ("support", "energy99"):
        raise ValueError("measure must be 'support' or 'energy99'")
    if kind == "CQT":
        if not isinstance(params, CqtParams):
            raise ValueError("CQT profile needs CqtParams")
        freqs = bin_frequencies(params)
        spans = []
        for k in range(params.n_bins):
            if measure == "support":
                spans.append(atom_length(k, params) / params.sample_rate)
            else:
                spans.append(
                    _central_energy_samples(cqt_atom(k, params)) / params.sample_rate
                )
    elif kind == "CWT":
        if not isinstance(params, CwtParams):
            raise ValueError("CWT profile needs CwtParams")
        freqs = params.scale_frequencies()
        order = np.argsort(freqs)
        freqs = freqs[order]
        floor = params.frame_length / params.sample_rate
        spans = []
        for j in order:
            w = morlet_wavelet(params.scales[j], params)
            samples = len(w) if measure == "support" else _central_energy_samples(w)
            spans.append(max(samples / params.sample_rate, floor))
    elif kind == "MFSC":
        if not isinstance(params, MelParams):
            raise ValueError("MFSC profile needs MelParams")
        freqs = mel_center_frequencies(params)
        bank = mel_filterbank(params)
        window = hann_window(params.win_length)
        spans = []
        for row in bank:
            impulse = np.fft.fftshift(np.fft.irfft(row, params.n_fft))
            center = params.n_fft // 2
            seg = impulse[center - params.win_length // 2:][: params.win_length]
            windowed = seg * window
            if measure == "support":
                spans.append(params.win_length / params.sample_rate)
            else:
                spans.append(_central_energy_samples(windowed) / params.sample_rate)
    else:
        raise ValueError(f"unknown representation kind {kind!r}")
    return InvarianceProfile(np.asarray(freqs), np.asarray(spans), kind, measure)


@dataclass(frozen=True)
class SpacingRow:
    f0: float
    bin_f0: int
    bin_2f0: int

    @property
    def spacing(self) -> int:
        return self.bin_2f0 - self.bin_f0


@dataclass(frozen=True)
class DeformationRow:
    tone: float
    bin_original: int
    bin_warped: int

    @property
    def displacement(self) -> int:
        return self.bin_warped - self.bin_original


def _band_argmax(
    freqs: np.ndarray,
    spectrum: np.ndarray,
    center: float,
    lo: float | None = None,
    hi: float | None = None,
) -> int:
    """Index of the largest value among bins attributed to one component.

    The attribution band defaults to half an octave around ``center``; the
    caller may tighten either edge (e.g. to the geometric midpoint toward a
    neighboring harmonic) so adjacent components cannot steal the peak.
    """
    lo = max(center / math.sqrt(2.0), lo or 0.0)
    hi = min(center * math.sqrt(2.0), hi or math.inf)
    mask = (freqs >= lo) & (freqs < hi)
    if not np.any(mask):
        raise ValueError(f"no bins attributable to the {center} Hz component")
    idx = np.flatnonzero(mask)
    return int(idx[np.argmax(spectrum[idx])])


def _segment_mean(matrix: TimeFrequencyMatrix, center_offset: int,
                  t_start: float, t_stop: float) -> np.ndarray:
    times = (np.arange(matrix.n_frames) * matrix.hop_length + center_offset) / matrix.sample_rate
    mask = (times >= t_start) & (times <= t_stop)
    if not np.any(mask):
        raise ValueError("no frames inside the requested segment")
    return matrix.values[:, mask].mean(axis=1)


def harmonic_spacing_experiment(
    f0_list=(100.0, 250.0, 500.0, 700.0),
    cqt_params: CqtParams | None = None,
    mel_params: MelParams | None = None,
    n_harmonics: int = 6,
    segment_duration: float = 0.5,
) -> dict:
    """Bin spacing between each fundamental and its first harmonic.

    Concatenates one harmonic stack per fundamental, runs CQT, MFSC, and
    STFT on the whole signal, and reports argmax bins for ``f0`` and
    ``2 * f0`` within each stack's time segment.
    """
    cqt_params = cqt_params or CqtParams()
    mel_params = mel_params or MelParams()
    fs = cqt_params.sample_rate
    if mel_params.sample_rate != fs:
        raise ValueError("parameter sample rates disagree")
    pieces = [
        synth_harmonic_stack(f0, n_harmonics, segment_duration, fs).samples
        for f0 in f0_list
    ]
    signal = Signal(np.concatenate(pieces), fs)
    matrices = {
        "CQT": (cqt(signal, cqt_params, mode="direct"), 0),
        "MFSC": (mfsc(signal, mel_params), mel_params.win_length // 2),
        "STFT": (stft_matrix(signal, mel_params), mel_params.win_length // 2),
    }
    margin = 0.1 * segment_duration
    results = {}
    for name, (matrix, offset) in matrices.items():
        rows = []
        for i, f0 in enumerate(f0_list):
            t0, t1 = i * segment_duration + margin, (i + 1) * segment_duration - margin
            spectrum = _segment_mean(matrix, offset, t0, t1)
            rows.append(
                SpacingRow(
                    f0=float(f0),
                    bin_f0=_band_argmax(
                        matrix.bin_frequencies, spectrum, f0,
                        hi=math.sqrt(f0 * 2.0 * f0),
                    ),
                    bin_2f0=_band_argmax(
                        matrix.bin_frequencies, spectrum, 2.0 * f0,
                        lo=math.sqrt(2.0 * f0 * f0),
                        hi=math.sqrt(2.0 * f0 * 3.0 * f0),
                    ),
                )
            )
        results[name] = rows
    return results


def deformation_experiment(
    epsilon: float,
    cqt_params: CqtParams | None = None,
    mel_params: MelParams | None = None,
    tones=(250.0, 1000.0, 4500.0),
    duration: float = 0.5,
) -> dict:
    """Argmax-bin displacement per tone under the warp ``x(t) -> x((1-eps)t)``.

    Runs STFT and CQT on a composite of the given tones and on its warped
    counterpart, and reports the bin shift of each tone's spectral peak.
    """
    if not 0.0 <= epsilon < 0.1:
        raise ValueError("epsilon must lie in [0, 0.1)")
    cqt_params = cqt_params or CqtParams()
    mel_params = mel_params or MelParams()
    fs = cqt_params.sample_rate
    if mel_params.sample_rate != fs:
        raise ValueError("parameter sample rates disagree")
    mix = sum(synth_tone(f, duration, fs, amplitude=1.0 / len(tones)).samples for f in tones)
    original = Signal(mix, fs)
    warped = time_warp(original, epsilon)
    results = {}
    for name in ("STFT", "CQT"):
        if name == "CQT":
            pair = [cqt(sig, cqt_params, mode="direct") for sig in (original, warped)]
            offset = 0
        else:
            pair = [stft_matrix(sig, mel_params) for sig in (original, warped)]
            offset = mel_params.win_length // 2
        rows = []
        for tone in tones:
            spectra = [
                _segment_mean(m, offset, 0.05, len(sig.samples) / fs - 0.05)
                for m, sig in zip(pair, (original, warped))
            ]
            rows.append(
                DeformationRow(
                    tone=float(tone),
                    bin_original=_band_argmax(pair[0].bin_frequencies, spectra[0], tone),
                    bin_warped=_band_argmax(pair[1].bin_frequencies, spectra[1], tone),
                )
            )
        results[name] = rows
    return results
