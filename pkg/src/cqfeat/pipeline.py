"""File-to-feature extraction pipeline shared by the CLI and tests."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .config import ConfigError, RunConfig
from .cqt import cqt
from .cwt import cwt_framed
from .mel import mfsc
from .preprocess import cmvn, energy_vad, resample_to_16k
from .signal import Signal, TimeFrequencyMatrix
from .wavfile import read_wav

__all__ = ["extract_signal", "extract_file"]


def extract_signal(s: Signal, cfg: RunConfig) -> TimeFrequencyMatrix:
    """Run resample -> VAD -> front-end -> CMVN on an in-memory signal.

    Output values are float32 so serialized and in-memory features agree.
    """
    s = resample_to_16k(s)
    if cfg.get("vad"):
        s = energy_vad(s, cfg.vad_params())
    rep = cfg.representation
    if rep == "cqt":
        mode = str(cfg.get("cqt.mode")).lower()
        if mode not in ("fast", "direct"):
            raise ConfigError(f"unknown cqt.mode {mode!r}")
        matrix = cqt(s, cfg.cqt_params(s.sample_rate), mode=mode)
    elif rep == "cwt":
        matrix = cwt_framed(s, cfg.cwt_params(s.sample_rate))
    else:
        matrix = mfsc(s, cfg.mel_params(s.sample_rate))
    if cfg.get("cmvn"):
        matrix = cmvn(matrix)
    return replace(matrix, values=np.asarray(matrix.values, dtype=np.float32))


def extract_file(path, cfg: RunConfig) -> TimeFrequencyMatrix:
    return extract_signal(read_wav(path), cfg)
