"""Constant-Q transform with a direct path and a sparse-kernel octave-recursive path.

The transform correlates the input with log-spaced complex atoms whose length
shrinks with center frequency, keeping the ratio of center frequency to
bandwidth constant.  The fast path evaluates the top octave with one sparse
frequency-domain kernel and reuses it on successively half-rate copies of the
signal for every lower octave.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .signal import Signal, TimeFrequencyMatrix, downsample2, hann_window

__all__ = [
    "CqtParams",
    "CqtKernel",
    "FastPathFallbackWarning",
    "q_factor",
    "bin_frequencies",
    "atom_length",
    "cqt_atom",
    "build_kernel",
    "cqt",
]


class FastPathFallbackWarning(UserWarning):
    """Raised when the octave-recursive path cannot honor the requested hop."""


def q_factor(bins_per_octave: int) -> float:
    """Constant Q factor for a bank with ``bins_per_octave`` bins per doubling."""
    if bins_per_octave < 1:
        raise ValueError("bins_per_octave must be >= 1")
    return 1.0 / (2.0 ** (1.0 / bins_per_octave) - 1.0)


@dataclass(frozen=True)
class CqtParams:
    """Parameters of the constant-Q bank.

    ``f_min`` is the center frequency of the lowest bin; bin ``k`` (0-based)
    sits at ``f_min * 2**(k / bins_per_octave)``.
    """

    sample_rate: int = 16000
    f_min: float = 32.70
    bins_per_octave: int = 3
    n_bins: int = 24
    hop_length: int = 64
    sparsity_threshold: float = 0.0054

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.f_min <= 0:
            raise ValueError("f_min must be positive")
        if self.bins_per_octave < 1:
            raise ValueError("bins_per_octave must be >= 1")
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if self.hop_length < 1:
            raise ValueError("hop_length must be >= 1")
        if not 0.0 <= self.sparsity_threshold < 1.0:
            raise ValueError("sparsity_threshold must lie in [0, 1)")
        top = self.f_min * 2.0 ** ((self.n_bins - 1) / self.bins_per_octave)
        if top >= self.sample_rate / 2:
            raise ValueError("highest bin must lie below Nyquist")

    @property
    def q(self) -> float:
        return q_factor(self.bins_per_octave)

    @property
    def n_octaves(self) -> int:
        return math.ceil(self.n_bins / self.bins_per_octave)


def bin_frequencies(p: CqtParams) -> np.ndarray:
    """Geometric bin center frequencies in Hz, lowest first."""
    k = np.arange(p.n_bins)
    return p.f_min * 2.0 ** (k / p.bins_per_octave)


def atom_length(k: int, p: CqtParams) -> int:
    """Atom length ``N_k = Q * fs / f_k`` rounded half-up to whole samples."""
    if not 0 <= k < p.n_bins:
        raise ValueError("bin index out of range")
    f_k = p.f_min * 2.0 ** (k / p.bins_per_octave)
    return int(math.floor(p.q * p.sample_rate / f_k + 0.5))


def cqt_atom(k: int, p: CqtParams) -> np.ndarray:
    """Hann-windowed complex atom for bin ``k``, scaled by ``1/N_k``."""
    if not 0 <= k < p.n_bins:
        raise ValueError("bin index out of range")
    n_k = atom_length(k, p)
    f_k = p.f_min * 2.0 ** (k / p.bins_per_octave)
    n = np.arange(n_k)
    phase = np.exp(-2j * np.pi * n * f_k / p.sample_rate)
    return hann_window(n_k) * phase / n_k


@dataclass(frozen=True)
class CqtKernel:
    """Sparse frequency-domain atoms for the top octave of a constant-Q bank.

    Row ``r`` holds the DFT (length ``fft_length``, atom centered in the
    frame) of the atom for global bin ``bin_offset + r``, pruned of
    coefficients below ``sparsity_threshold`` times that row's peak magnitude.
    """

    bin_offset: int
    fft_length: int
    atom_lengths: tuple
    q: float
    sparsity_threshold: float
    indices: tuple
    values: tuple

    def __post_init__(self):
        lengths = self.atom_lengths
        if any(b >= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("atom lengths must strictly decrease across the octave")
        if self.fft_length & (self.fft_length - 1):
            raise ValueError("fft_length must be a power of two")
        for idx, val in zip(self.indices, self.values):
            if len(idx) != len(val):
                raise ValueError("index/value rows must align")

    @property
    def n_rows(self) -> int:
        return len(self.indices)

    def stored_count(self) -> int:
        return sum(len(v) for v in self.values)

    def dense_count(self) -> int:
        return self.n_rows * self.fft_length

    def dense_row(self, r: int) -> np.ndarray:
        out = np.zeros(self.fft_length, dtype=np.complex128)
        out[np.asarray(self.indices[r], dtype=np.intp)] = self.values[r]
        return out


def build_kernel(p: CqtParams) -> CqtKernel:
    """Build the sparse spectral kernel for the top octave of ``p``."""
    start = max(0, p.n_bins - p.bins_per_octave)
    lengths = [atom_length(k, p) for k in range(start, p.n_bins)]
    fft_length = 1
    while fft_length < max(lengths):
        fft_length *= 2
    indices, values = [], []
    for k in range(start, p.n_bins):
        atom = cqt_atom(k, p)
        padded = np.zeros(fft_length, dtype=np.complex128)
        offset = fft_length // 2 - len(atom) // 2
        padded[offset:offset + len(atom)] = atom
        spectrum = np.fft.fft(padded)
        keep = np.flatnonzero(np.abs(spectrum) >= p.sparsity_threshold * np.abs(spectrum).max())
        indices.append(keep)
        values.append(spectrum[keep])
    return CqtKernel(
        bin_offset=start,
        fft_length=fft_length,
        atom_lengths=tuple(lengths),
        q=p.q,
        sparsity_threshold=p.sparsity_threshold,
        indices=tuple(indices),
        values=tuple(values),
    )


def _frame_count(n_samples: int, hop: int) -> int:
    return 1 + n_samples // hop


def _gather_frames(x: np.ndarray, centers: np.ndarray, width: int) -> np.ndarray:
    """Extract ``width``-sample windows centered on ``centers``, zero-padded at edges.

    The window for center ``c`` covers samples ``[c - width//2, c - width//2 + width)``.
    """
    half = width // 2
    padded = np.concatenate([np.zeros(half), x, np.zeros(width)])
    idx = centers[:, None] + np.arange(width)[None, :]
    return padded[idx]


def _cqt_direct(x: np.ndarray, p: CqtParams, n_frames: int) -> np.ndarray:
    centers = np.arange(n_frames) * p.hop_length
    out = np.empty((p.n_bins, n_frames))
    for k in range(p.n_bins):
        atom = cqt_atom(k, p)
        frames = _gather_frames(x, centers, len(atom))
        out[k] = np.abs(frames @ np.conj(atom))
    return out


def _octave_stage(octave: int) -> int:
    """Decimation stage used to evaluate one octave.

    Each octave is analyzed one stage above its minimal rate so the widest
    atom mainlobe (Q as low as 1 at B = 1 keeps bins wide) stays clear of the
    stage Nyquist that the decimation filter cuts at.
    """
    return max(0, octave - 1)


def _stage_kernel(p: CqtParams, octave: int):
    """Sparse spectral kernel for one octave at its decimated analysis rate.

    Rows are the full-rate atoms of that octave's bins sampled at the stage
    stride (phase-aligned with the direct window placement), so the stage
    inner product evaluates the same correlation sum as the direct path on
    the decimated grid.
    """
    stride = 1 << _octave_stage(octave)
    lo = max(0, p.n_bins - (octave + 1) * p.bins_per_octave)
    hi = p.n_bins - octave * p.bins_per_octave
    rows = []
    supports = []
    for k in range(lo, hi):
        atom = cqt_atom(k, p)
        n = len(atom)
        j0 = (n // 2) % stride
        sub = stride * atom[j0::stride]
        rows.append((k, sub, (n // 2 - j0) // stride))
        supports.append(len(sub))
    fft_length = 1
    while fft_length < max(supports):
        fft_length *= 2
    sparse = []
    for k, sub, lead in rows:
        padded = np.zeros(fft_length, dtype=np.complex128)
        offset = fft_length // 2 - lead
        padded[offset:offset + len(sub)] = sub
        spectrum = np.fft.fft(padded)
        keep = np.flatnonzero(np.abs(spectrum) >= p.sparsity_threshold * np.abs(spectrum).max())
        sparse.append((k, keep, spectrum[keep]))
    return fft_length, sparse


def _cqt_fast(x: np.ndarray, p: CqtParams, n_frames: int) -> np.ndarray:
    out = np.zeros((p.n_bins, n_frames))
    max_stage = _octave_stage(p.n_octaves - 1)
    align = 1 << max_stage
    # Zero margin so frames near the signal boundary see zeros through the
    # whole decimation chain, matching the direct path's zero padding.
    margin = atom_length(0, p) // 2 + 64 * align
    margin += -margin % align
    x = np.concatenate([np.zeros(margin), x, np.zeros(margin)])
    stage = Signal(x, p.sample_rate)
    stage_idx = 0
    for octave in range(p.n_octaves):
        s = _octave_stage(octave)
        while stage_idx < s:
            stage = downsample2(stage)
            stage_idx += 1
        fft_length, sparse = _stage_kernel(p, octave)
        centers = (np.arange(n_frames) * p.hop_length + margin) >> stage_idx
        frames = _gather_frames(stage.samples, centers, fft_length)
        spectra = np.fft.fft(frames, axis=1)
        for k, idx, vals in sparse:
            coeff = spectra[:, idx] @ np.conj(vals)
            out[k] = np.abs(coeff) / fft_length
    return out


def cqt(s: Signal, p: CqtParams, mode: str = "fast") -> TimeFrequencyMatrix:
    """Constant-Q magnitude transform of ``s`` with frames every ``hop_length`` samples.

    ``mode="direct"`` evaluates the windowed inner products literally at every
    hop position.  ``mode="fast"`` applies the top-octave spectral kernel and
    recurses via :func:`downsample2`; it requires the hop to be divisible by
    ``2**(n_octaves - 1)`` and otherwise falls back to the direct path with a
    :class:`FastPathFallbackWarning`.
    """
    if mode not in ("direct", "fast"):
        raise ValueError("mode must be 'direct' or 'fast'")
    if s.sample_rate != p.sample_rate:
        raise ValueError("signal and parameter sample rates disagree")
    x = s.samples
    n_frames = _frame_count(len(s), p.hop_length)
    if mode == "fast":
        stride = 1 << (p.n_octaves - 1)
        if p.hop_length % stride != 0:
            warnings.warn(
                f"hop_length {p.hop_length} is not divisible by {stride}; "
                "falling back to direct evaluation",
                FastPathFallbackWarning,
                stacklevel=2,
            )
            mode = "direct"
    values = _cqt_direct(x, p, n_frames) if mode == "direct" else _cqt_fast(x, p, n_frames)
    return TimeFrequencyMatrix(
        values=values,
        bin_frequencies=bin_frequencies(p),
        hop_length=p.hop_length,
        sample_rate=p.sample_rate,
        representation_tag="CQT",
    )
