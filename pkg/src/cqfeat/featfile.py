"""Serialization of feature matrices: the CQFB binary format and CSV.

CQFB layout (all multi-byte fields little-endian), version 1:

    bytes 0-3    magic "CQFB"
    bytes 4-5    version (uint16)
    byte  6      representation tag (1=CQT, 2=CWT, 3=MFSC, 4=STFT)
    byte  7      flags (bit 0: CMVN applied, bit 1: log domain)
    bytes 8-11   n_bins (uint32)
    bytes 12-15  n_frames (uint32)
    bytes 16-19  sample_rate in Hz (uint32)
    bytes 20-23  hop_length in samples (uint32)
    then n_bins float64 bin center frequencies in Hz
    then n_bins * n_frames float32 values, row-major (bins outer)

The frequency block makes a round trip lossless; the header alone cannot
reconstruct non-default bin layouts.
"""

from __future__ import annotations

import struct

import numpy as np

from .signal import TimeFrequencyMatrix

__all__ = [
    "FeatureFileError",
    "write_feature",
    "read_feature",
    "feature_bytes",
    "write_matrix_csv",
    "write_experiment_csv",
]

MAGIC = b"CQFB"
VERSION = 1
_HEADER = struct.Struct("<4sHBBIIII")
_TAG_TO_CODE = {"CQT": 1, "CWT": 2, "MFSC": 3, "STFT": 4}
_CODE_TO_TAG = {v: k for k, v in _TAG_TO_CODE.items()}
FLAG_CMVN = 1
FLAG_LOG = 2


class FeatureFileError(ValueError):
    """The file does not parse as a CQFB feature file."""


def feature_bytes(m: TimeFrequencyMatrix) -> bytes:
    """Serialize a matrix to CQFB bytes."""
    flags = (FLAG_CMVN if m.normalized else 0) | (FLAG_LOG if m.log_domain else 0)
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        _TAG_TO_CODE[m.representation_tag],
        flags,
        m.n_bins,
        m.n_frames,
        m.sample_rate,
        m.hop_length,
    )
    freqs = np.asarray(m.bin_frequencies, dtype="<f8").tobytes()
    values = np.asarray(m.values, dtype="<f4").tobytes()
    return header + freqs + values


def write_feature(path, m: TimeFrequencyMatrix) -> None:
    with open(path, "wb") as fh:
        fh.write(feature_bytes(m))


def read_feature(path) -> TimeFrequencyMatrix:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise FeatureFileError(f"{path}: truncated header")
    magic, version, tag_code, flags, n_bins, n_frames, sample_rate, hop = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    if tag_code not in _CODE_TO_TAG:
        raise FeatureFileError(f"{path}: unknown representation code {tag_code}")
    offset = _HEADER.size
    freq_bytes = 8 * n_bins
    value_bytes = 4 * n_bins * n_frames
    if len(data) != offset + freq_bytes + value_bytes:
        raise FeatureFileError(f"{path}: payload length does not match header")
    freqs = np.frombuffer(data, dtype="<f8", count=n_bins, offset=offset)
    values = np.frombuffer(
        data, dtype="<f4", count=n_bins * n_frames, offset=offset + freq_bytes
    ).reshape(n_bins, n_frames)
    return TimeFrequencyMatrix(
        values=values,
        bin_frequencies=freqs,
        hop_length=int(hop),
        sample_rate=int(sample_rate),
        representation_tag=_CODE_TO_TAG[tag_code],
        log_domain=bool(flags & FLAG_LOG),
        normalized=bool(flags & FLAG_CMVN),
    )


def _fmt(x) -> str:
    return format(float(x), ".9g")


def write_matrix_csv(path, m: TimeFrequencyMatrix) -> None:
    """Extraction CSV: one header row, first column the bin frequency in Hz."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_frequency_hz," + ",".join(f"frame_{i}" for i in range(m.n_frames)) + "\n")
        values = np.asarray(m.values, dtype=np.float32)
        for freq, row in zip(m.bin_frequencies, values):
            fh.write(_fmt(freq) + "," + ",".join(_fmt(v) for v in row) + "\n")


def write_experiment_csv(path, experiment: str, params: dict, header: list, rows: list) -> None:
    """Experiment CSV: a ``# experiment=...`` comment line, a header row, data rows."""
    meta = " ".join(f"{k}={v}" for k, v in params.items())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# experiment={experiment}" + (f" {meta}" if meta else "") + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
