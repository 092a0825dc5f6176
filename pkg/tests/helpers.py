"""Shared independent oracles for the test suite."""

import numpy as np


def naive_dft(v):
    """O(N^2) DFT straight from the definition; the FFT oracle."""
    v = np.asarray(v, dtype=np.complex128)
    n = v.size
    k = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return basis @ v


def spectral_peak_hz(x, sample_rate, n_fft=None):
    """Frequency of the largest one-sided DFT magnitude (DC excluded)."""
    x = np.asarray(x, dtype=np.float64)
    n_fft = n_fft or x.size
    mags = np.abs(np.fft.rfft(x, n=n_fft))
    mags[0] = 0.0
    return np.argmax(mags) * sample_rate / n_fft


def peak_amplitude(x, sample_rate):
    """Amplitude of the dominant sinusoid, from the one-sided DFT peak."""
    x = np.asarray(x, dtype=np.float64)
    mags = np.abs(np.fft.rfft(x))
    mags[0] = 0.0
    return 2.0 * mags.max() / x.size


def energy(x):
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(x * x))
