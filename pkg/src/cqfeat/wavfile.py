"""Minimal RIFF/WAVE reader and writer for PCM and IEEE-float payloads."""

from __future__ import annotations

import struct

import numpy as np

from .signal import Signal

__all__ = ["WavFormatError", "read_wav", "write_wav"]

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    """The file is not a WAV this toolkit can decode."""


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        yield cid, body
        pos += 8 + size + (size & 1)


def read_wav(path) -> Signal:
    """Decode a mono-mixed Signal from an 8/16/24-bit PCM or 32-bit float WAV."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")
    fmt = None
    payload = None
    for cid, body in _iter_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _FMT_EXTENSIBLE:
                if len(body) < 40:
                    raise WavFormatError(f"{path}: truncated extensible fmt chunk")
                sub = struct.unpack_from("<H", body, 24)[0]
                fmt = (sub,) + fmt[1:]
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None or payload is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")
    audio_format, n_channels, sample_rate, _, block_align, bits = fmt
    if n_channels < 1 or block_align == 0:
        raise WavFormatError(f"{path}: invalid channel layout")
    if audio_format == _FMT_PCM and bits == 8:
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        samples = (raw - 128.0) / 128.0
    elif audio_format == _FMT_PCM and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == _FMT_PCM and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8)
        raw = raw[: len(raw) - len(raw) % 3].reshape(-1, 3).astype(np.int64)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals -= (vals & 0x800000) << 1
        samples = vals.astype(np.float64) / float(1 << 23)
    elif audio_format == _FMT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(
            f"{path}: unsupported format (code {audio_format}, {bits}-bit); "
            "expected 8/16/24-bit PCM or 32-bit float"
        )
    frames = samples.size // n_channels
    samples = samples[: frames * n_channels].reshape(frames, n_channels)
    return Signal(samples.mean(axis=1), int(sample_rate))


def write_wav(path, s: Signal, bits: int = 16) -> None:
    """Write a mono WAV (16-bit PCM or 32-bit float)."""
    if bits == 16:
        fmt_code, sampwidth = _FMT_PCM, 2
        scaled = np.clip(np.round(s.samples * 32768.0), -32768, 32767)
        payload = scaled.astype("<i2").tobytes()
    elif bits == 32:
        fmt_code, sampwidth = _FMT_IEEE_FLOAT, 4
        payload = s.samples.astype("<f4").tobytes()
    else:
        raise ValueError("write_wav supports 16-bit PCM or 32-bit float")
    byte_rate = s.sample_rate * sampwidth
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, fmt_code, 1, s.sample_rate, byte_rate, sampwidth, 8 * sampwidth
    )
    header += b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as fh:
        fh.write(header + payload)
