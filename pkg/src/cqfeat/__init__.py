"""Time-frequency feature extraction toolkit.

Three front-ends over a shared signal model: a constant-Q transform with a
sparse-kernel octave-recursive fast path, a framed complex-Morlet continuous
wavelet transform, and mel-frequency spectral coefficients; plus utterance
preprocessing (resampling, energy VAD, CMVN), class-separability and
invariance analyses, and a CLI for extraction, experiments, and benchmarks.
"""

from .analysis import (
    ContingencyMatrix,
    InvarianceProfile,
    LabeledFeatureSet,
    accuracy,
    deformation_experiment,
    f_ratio,
    harmonic_spacing_experiment,
    temporal_span_profile,
    uar,
)
from .config import RunConfig
from .cqt import CqtKernel, CqtParams, FastPathFallbackWarning, bin_frequencies, build_kernel, cqt, cqt_atom, q_factor
from .cwt import CwtParams, cwt_framed, cwt_raw, morlet_wavelet
from .featfile import read_feature, write_feature, write_matrix_csv
from .mel import MelParams, mel_filterbank, mfsc, stft, stft_matrix
from .pipeline import extract_file, extract_signal
from .preprocess import EmptySignalError, UnsupportedRateError, VadParams, cmvn, energy_vad, resample_to_16k
from .signal import (
    Signal,
    TimeFrequencyMatrix,
    dft,
    downsample2,
    hann_window,
    idft,
    synth_harmonic_stack,
    synth_tone,
    time_shift,
    time_warp,
)
from .wavfile import read_wav, write_wav

__version__ = "0.1.0"
