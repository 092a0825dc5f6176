import numpy as np
import pytest

from cqfeat.mel import (
    MelParams,
    hz_to_mel,
    mel_center_frequencies,
    mel_filterbank,
    mel_to_hz,
    mfsc,
    stft,
    stft_matrix,
)
from cqfeat.signal import Signal, hann_window, synth_tone, time_shift

FS = 16000


class TestParams:
    def test_window_must_fit_fft(self):
        with pytest.raises(ValueError):
            MelParams(win_length=600, n_fft=512)

    def test_band_edges_validated(self):
        with pytest.raises(ValueError):
            MelParams(f_low=4000.0, f_high=1000.0)
        with pytest.raises(ValueError):
            MelParams(f_high=9000.0)


class TestMelScale:
    def test_round_trip(self):
        f = np.array([0.0, 100.0, 700.0, 4000.0, 8000.0])
        assert np.allclose(mel_to_hz(hz_to_mel(f)), f)

    def test_decadic_anchor(self):
        # mel(700) = 2595 * log10(2)
        assert hz_to_mel(700.0) == pytest.approx(2595.0 * np.log10(2.0))


class TestStft:
    def test_zero_signal(self):
        out = stft(Signal(np.zeros(FS), FS), MelParams())
        assert out.shape == (257, 246)
        assert not np.any(out)

    def test_tone_at_linear_bin(self):
        # 1000 Hz / (16000 / 512) = bin 32
        out = stft(synth_tone(1000.0, 1.0, FS, 0.8), MelParams())
        assert np.all(np.argmax(np.abs(out), axis=0) == 32)

    def test_parseval_per_frame(self):
        p = MelParams()
        rng = np.random.default_rng(1)
        s = Signal(0.3 * rng.standard_normal(FS), FS)
        out = stft(s, p)
        window = hann_window(p.win_length)
        for m in (0, 17, 245):
            frame = s.samples[m * p.hop_length:m * p.hop_length + p.win_length] * window
            spectrum = out[:, m]
            two_sided = np.concatenate([spectrum, np.conj(spectrum[-2:0:-1])])
            freq_energy = np.sum(np.abs(two_sided) ** 2) / p.n_fft
            time_energy = np.sum(frame**2)
            assert freq_energy == pytest.approx(time_energy, rel=1e-6)

    def test_short_signal_rejected(self):
        with pytest.raises(ValueError):
            stft(Signal(np.zeros(100), FS), MelParams())

    def test_matrix_drops_nyquist_row(self):
        m = stft_matrix(synth_tone(1000.0, 0.25, FS, 0.5), MelParams())
        assert m.n_bins == 256
        assert m.bin_frequencies[-1] < FS / 2
        assert m.bin_frequencies[1] == pytest.approx(31.25)


class TestMelFilterbank:
    def test_shape_and_normalization(self):
        bank = mel_filterbank(MelParams())
        assert bank.shape == (24, 257)
        assert np.all(bank >= 0.0)
        assert np.allclose(bank.max(axis=1), 1.0)

    def test_single_peak_per_filter(self):
        bank = mel_filterbank(MelParams())
        for row in bank:
            peak = np.argmax(row)
            inside = row[row > 0]
            assert np.all(np.diff(row[: peak + 1])[row[:peak] > 0] >= 0)
            assert inside.size > 0

    def test_centers_ascend_and_spacing_grows(self):
        centers = mel_center_frequencies(MelParams())
        assert np.all(np.diff(centers) > 0)
        assert centers[-1] - centers[-2] > centers[1] - centers[0]

    def test_too_many_filters_rejected(self):
        with pytest.raises(ValueError):
            mel_filterbank(MelParams(n_filters=120))


class TestMfsc:
    def test_zero_signal_hits_log_floor(self):
        p = MelParams()
        m = mfsc(Signal(np.zeros(FS), FS), p)
        assert np.allclose(m.values, np.log(p.log_floor))
        assert m.log_domain

    def test_shape_for_one_second(self):
        m = mfsc(synth_tone(440.0, 1.0, FS, 0.5), MelParams())
        assert m.values.shape == (24, 246)

    def test_tone_at_filter_center_dominates_row(self):
        p = MelParams(apply_log=False)
        centers = mel_center_frequencies(p)
        for i in (2, 8, 15, 20):
            m = mfsc(synth_tone(float(centers[i]), 1.0, FS, 0.7), p)
            assert np.argmax(m.values.mean(axis=1)) == i

    def test_frame_local_shift_invariance(self):
        p = MelParams(apply_log=False)
        centers = mel_center_frequencies(p)
        s = synth_tone(250.0, 1.0, FS, 0.8)
        base = mfsc(s, p).values[:, 5:240]
        moved = mfsc(time_shift(s, 16), p).values[:, 5:240]
        responding = np.abs(np.log2(centers / 250.0)) <= 0.5
        rel = np.abs(moved[responding] - base[responding]) / base[responding]
        assert np.max(rel) < 0.05
        assert np.max(np.abs(moved - base)) < 0.05 * base.max()

    def test_amplitude_scales_quadratically(self):
        p = MelParams(apply_log=False)
        s = synth_tone(420.0, 0.5, FS, 0.4)
        one = mfsc(s, p).values
        two = mfsc(Signal(2.0 * s.samples, FS), p).values
        assert np.allclose(two, 4.0 * one, rtol=1e-12)

    def test_log_domain_flag_allows_negative_values(self):
        m = mfsc(synth_tone(440.0, 0.5, FS, 0.01), MelParams())
        assert np.any(m.values < 0)
