"""MFCC feature extraction: magnitude spectrum, mel binning, log transform,
cosine transform.

The cosine transform follows the half-sample-offset form
c(i) = sum_b L(b) * cos(i * (b - 0.5) * pi / N_f) for i = 1..D, with the
pure-energy i = 0 term excluded. N_f is configurable (``dct_norm_len``)
and defaults to the filter count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal
from .config import PipelineConfig
from .errors import (AllSilent, BadCoefficientCount, BadFftSize,
                     DimensionMismatch, TooManyBins)
from .preprocess import apply_hamming, block_frames, preemphasize, remove_dc, remove_silence

# Floor applied before the log so silent mel bins stay finite.
MEL_LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MelSpectrum:
    """Mel filterbank outputs and their logs (last axis = mel bin)."""

    values: np.ndarray
    log_values: np.ndarray


@dataclass(frozen=True)
class FeatureSequence:
    """T x D matrix of cepstral feature vectors for one signal."""

    vectors: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", vectors)
        if vectors.ndim != 2:
            raise ValueError("FeatureSequence requires a 2-D array")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("FeatureSequence entries must be finite")

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def magnitude_spectrum(frame, fft_size: int) -> np.ndarray:
    """Magnitudes of the first fft_size/2 + 1 DFT bins of a zero-padded frame.

    Operates on the last axis; a frame matrix yields one spectrum per row.
    """
    if fft_size <= 0 or fft_size & (fft_size - 1) != 0:
        raise BadFftSize(f"fft_size {fft_size} is not a power of two")
    x = np.asarray(frame, dtype=np.float64)
    if x.shape[-1] > fft_size:
        raise BadFftSize(
            f"frame of {x.shape[-1]} samples exceeds fft_size {fft_size}")
    return np.abs(np.fft.rfft(x, n=fft_size, axis=-1))


def hz_to_mel(hz):
    """Perceptual mel value of a frequency in Hz."""
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    """Inverse of hz_to_mel."""
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, fft_size: int, mel_bins: int) -> np.ndarray:
    """Triangular filters with peaks equally spaced on the mel scale.

    Returns a (mel_bins, fft_size // 2 + 1) weight matrix over 0..Nyquist.
    Each filter rises from the previous peak to its own and falls to the
    next, evaluated at the FFT bin frequencies.

    Raises TooManyBins when a filter would have no strictly positive
    weight (spectral resolution too coarse for the requested bin count).
    """
    if mel_bins < 2:
        raise ValueError("mel_bins must be at least 2")
    if fft_size < 2 * mel_bins:
        raise TooManyBins(
            f"fft_size {fft_size} cannot resolve {mel_bins} mel filters")
    n_bins = fft_size // 2 + 1
    peaks_mel = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2.0),
                            mel_bins + 2)
    peaks_hz = mel_to_hz(peaks_mel)
    bin_freqs = np.arange(n_bins) * (sample_rate / fft_size)

    bank = np.zeros((mel_bins, n_bins))
    for b in range(mel_bins):
        left, center, right = peaks_hz[b], peaks_hz[b + 1], peaks_hz[b + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        bank[b] = np.maximum(0.0, np.minimum(rising, falling))
        if not np.any(bank[b] > 0.0):
            raise TooManyBins(f"mel filter {b} collapsed to zero width")
    return bank


def filter_peak_freqs(sample_rate: int, mel_bins: int) -> np.ndarray:
    """Center frequencies (Hz) of the mel filters, lowest to highest."""
    peaks_mel = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2.0),
                            mel_bins + 2)
    return mel_to_hz(peaks_mel[1:-1])


def mel_energies(spectrum, filterbank: np.ndarray) -> MelSpectrum:
    """Weighted spectrum sums per mel filter, plus floored logs.

    ``spectrum`` may be one spectrum or a matrix of them (last axis =
    frequency bin).
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape[-1] != filterbank.shape[1]:
        raise DimensionMismatch(
            f"spectrum has {spectrum.shape[-1]} bins, filterbank expects "
            f"{filterbank.shape[1]}")
    values = spectrum @ filterbank.T
    log_values = np.log(np.maximum(values, MEL_LOG_FLOOR))
    return MelSpectrum(values=values, log_values=log_values)


def dct_basis(cepstral_count: int, mel_bins: int, dct_norm_len: int) -> np.ndarray:
    """Cosine matrix C[i-1, b-1] = cos(i * (b - 0.5) * pi / N_f), i = 1..D."""
    i = np.arange(1, cepstral_count + 1)[:, None]
    b = np.arange(1, mel_bins + 1)[None, :]
    return np.cos(i * (b - 0.5) * np.pi / dct_norm_len)


def dct_cepstrum(log_values, cepstral_count: int, dct_norm_len: int) -> np.ndarray:
    """Cosine transform of log mel energies, coefficients i = 1..D.

    The i = 0 term (pure energy) is excluded. Operates on the last axis.
    """
    log_values = np.asarray(log_values, dtype=np.float64)
    mel_bins = log_values.shape[-1]
    if not 1 <= cepstral_count <= mel_bins:
        raise BadCoefficientCount(
            f"cepstral_count {cepstral_count} outside 1..{mel_bins}")
    basis = dct_basis(cepstral_count, mel_bins, dct_norm_len)
    return log_values @ basis.T


def extract_features(signal: AudioSignal, config: PipelineConfig) -> FeatureSequence:
    """Run the full front end on one signal.

    DC removal, frame blocking, silence removal, pre-emphasis, Hamming
    windowing, magnitude spectrum, mel binning, log, cosine transform.
    Output has one row per frame that survived silence removal.

    Raises:
        SignalTooShort: fewer samples than one frame.
        AllSilent: every frame fell at or below the silence threshold.
    """
    fingerprint = config.fingerprint()
    signal = remove_dc(signal)
    frames = block_frames(signal, config.frame_len, config.frame_shift, fingerprint)
    frames = remove_silence(frames, config.silence_fraction)
    if frames.count == 0:
        raise AllSilent("no frames above the silence threshold")
    windowed = apply_hamming(preemphasize(frames.frames, config.preemph_coeff))
    spectra = magnitude_spectrum(windowed, config.fft_size)
    bank = mel_filterbank(config.sample_rate, config.fft_size, config.mel_bins)
    mel = mel_energies(spectra, bank)
    vectors = dct_cepstrum(mel.log_values, config.cepstral_count, config.dct_norm_len)
    return FeatureSequence(vectors=vectors, fingerprint=fingerprint)


def dump_features(seq: FeatureSequence, path) -> None:
    """Write one comma-separated row per frame, full float precision."""
    np.savetxt(path, seq.vectors, delimiter=",", fmt="%.17g")


def load_features(path) -> np.ndarray:
    """Read a feature dump written by dump_features."""
    return np.atleast_2d(np.loadtxt(path, delimiter=","))
