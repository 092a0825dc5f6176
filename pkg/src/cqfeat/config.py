"""Plain-text run configuration: ``key = value`` lines with typed defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cqt import CqtParams
from .cwt import CwtParams, default_scales
from .mel import MelParams
from .preprocess import TARGET_RATE, VadParams

__all__ = ["ConfigError", "RunConfig"]


class ConfigError(ValueError):
    """A config file entry is unknown or malformed."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_SCHEMA = {
    "rep": str,
    "vad": _parse_bool,
    "cmvn": _parse_bool,
    "epsilon": float,
    "vad.frame_length": int,
    "vad.hop_length": int,
    "vad.threshold_db": float,
    "cqt.f_min": float,
    "cqt.bins_per_octave": int,
    "cqt.n_bins": int,
    "cqt.hop_length": int,
    "cqt.sparsity_threshold": float,
    "cqt.mode": str,
    "cwt.frame_length": int,
    "cwt.hop_length": int,
    "cwt.morlet_bandwidth": float,
    "cwt.morlet_center_freq": float,
    "cwt.voices": int,
    "cwt.k_min": int,
    "cwt.k_max": int,
    "mel.win_length": int,
    "mel.hop_length": int,
    "mel.n_fft": int,
    "mel.n_filters": int,
    "mel.f_low": float,
    "mel.f_high": float,
    "mel.log_floor": float,
    "mel.apply_log": _parse_bool,
}

_DEFAULTS = {
    "rep": "cqt",
    "vad": True,
    "cmvn": True,
    "epsilon": 0.02,
    "vad.frame_length": 400,
    "vad.hop_length": 160,
    "vad.threshold_db": -40.0,
    "cqt.f_min": 32.70,
    "cqt.bins_per_octave": 3,
    "cqt.n_bins": 24,
    "cqt.hop_length": 64,
    "cqt.sparsity_threshold": 0.0054,
    "cqt.mode": "fast",
    "cwt.frame_length": 320,
    "cwt.hop_length": 64,
    "cwt.morlet_bandwidth": 1.0,
    "cwt.morlet_center_freq": 1.0,
    "cwt.voices": 3,
    "cwt.k_min": 3,
    "cwt.k_max": 26,
    "mel.win_length": 320,
    "mel.hop_length": 64,
    "mel.n_fft": 512,
    "mel.n_filters": 24,
    "mel.f_low": 0.0,
    "mel.f_high": TARGET_RATE / 2,
    "mel.log_floor": 1e-10,
    "mel.apply_log": True,
}


@dataclass
class RunConfig:
    """Feature-extraction settings; unset keys fall back to the defaults."""

    entries: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        entries = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, raw = stripped.partition("=")
                entries[key.strip()] = raw.strip()
        cfg = cls()
        for key, raw in entries.items():
            cfg.set(key, raw)
        return cfg

    def set(self, key: str, raw) -> None:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        converter = _SCHEMA[key]
        try:
            self.entries[key] = converter(raw) if isinstance(raw, str) else raw
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc

    def get(self, key: str):
        if key in self.entries:
            return self.entries[key]
        return _DEFAULTS[key]

    @property
    def representation(self) -> str:
        rep = str(self.get("rep")).lower()
        if rep not in ("cqt", "cwt", "mfsc"):
            raise ConfigError(f"unknown representation {rep!r}")
        return rep

    def vad_params(self) -> VadParams:
        return VadParams(
            frame_length=self.get("vad.frame_length"),
            hop_length=self.get("vad.hop_length"),
            threshold_db=self.get("vad.threshold_db"),
        )

    def cqt_params(self, sample_rate: int = TARGET_RATE) -> CqtParams:
        return CqtParams(
            sample_rate=sample_rate,
            f_min=self.get("cqt.f_min"),
            bins_per_octave=self.get("cqt.bins_per_octave"),
            n_bins=self.get("cqt.n_bins"),
            hop_length=self.get("cqt.hop_length"),
            sparsity_threshold=self.get("cqt.sparsity_threshold"),
        )

    def cwt_params(self, sample_rate: int = TARGET_RATE) -> CwtParams:
        scales = default_scales(
            voices=self.get("cwt.voices"),
            k_min=self.get("cwt.k_min"),
            k_max=self.get("cwt.k_max"),
        )
        return CwtParams(
            sample_rate=sample_rate,
            scales=tuple(scales),
            morlet_bandwidth=self.get("cwt.morlet_bandwidth"),
            morlet_center_freq=self.get("cwt.morlet_center_freq"),
            frame_length=self.get("cwt.frame_length"),
            hop_length=self.get("cwt.hop_length"),
        )

    def mel_params(self, sample_rate: int = TARGET_RATE) -> MelParams:
        return MelParams(
            sample_rate=sample_rate,
            win_length=self.get("mel.win_length"),
            hop_length=self.get("mel.hop_length"),
            n_fft=self.get("mel.n_fft"),
            n_filters=self.get("mel.n_filters"),
            f_low=self.get("mel.f_low"),
            f_high=self.get("mel.f_high"),
            log_floor=self.get("mel.log_floor"),
            apply_log=self.get("mel.apply_log"),
        )
