import numpy as np
import pytest

from speakerid import AudioSignal, PipelineConfig
from speakerid.errors import (AllSilent, BadCoefficientCount, BadFftSize,
                              DimensionMismatch, TooManyBins)
from speakerid.features import (MEL_LOG_FLOOR, FeatureSequence, dct_cepstrum,
                                dump_features, extract_features,
                                filter_peak_freqs, hz_to_mel, load_features,
                                magnitude_spectrum, mel_energies,
                                mel_filterbank, mel_to_hz)
from oracles import dft_magnitude, literal_cepstrum


class TestMagnitudeSpectrum:
    def test_matches_naive_dft(self, rng):
        for _ in range(20):
            frame = rng.normal(size=16)
            fast = magnitude_spectrum(frame, 16)
            slow = dft_magnitude(frame, 16)
            assert np.allclose(fast, slow, rtol=1e-6, atol=1e-9)

    def test_zero_padding(self, rng):
        frame = rng.normal(size=10)
        padded = np.concatenate([frame, np.zeros(6)])
        assert np.allclose(magnitude_spectrum(frame, 16),
                           magnitude_spectrum(padded, 16), atol=1e-12)

    def test_bin_count(self):
        assert magnitude_spectrum(np.ones(100), 512).shape == (257,)

    def test_pure_tone_peak(self):
        # bin 8 of a 64-point DFT holds an 8-cycle cosine
        n = np.arange(64)
        frame = np.cos(2.0 * np.pi * 8 * n / 64)
        mags = magnitude_spectrum(frame, 64)
        assert np.argmax(mags) == 8
        assert mags[8] == pytest.approx(32.0, rel=1e-9)

    def test_dc_bin(self):
        mags = magnitude_spectrum(np.full(16, 2.0), 16)
        assert mags[0] == pytest.approx(32.0, rel=1e-12)

    def test_rowwise(self, rng):
        frames = rng.normal(size=(5, 32))
        spectra = magnitude_spectrum(frames, 64)
        assert spectra.shape == (5, 33)
        for row, out in zip(frames, spectra):
            assert np.allclose(out, magnitude_spectrum(row, 64), atol=1e-12)

    def test_non_power_of_two(self):
        with pytest.raises(BadFftSize):
            magnitude_spectrum(np.ones(8), 12)

    def test_frame_longer_than_fft(self):
        with pytest.raises(BadFftSize):
            magnitude_spectrum(np.ones(20), 16)


class TestMelScale:
    def test_known_values(self):
        assert hz_to_mel(0.0) == pytest.approx(0.0)
        # 2595*log10(2) at the 700 Hz knee
        assert hz_to_mel(700.0) == pytest.approx(2595.0 * np.log10(2.0))

    def test_round_trip(self):
        freqs = np.array([0.0, 100.0, 700.0, 4000.0, 8000.0])
        assert np.allclose(mel_to_hz(hz_to_mel(freqs)), freqs, rtol=1e-12)

    def test_monotone(self):
        mels = hz_to_mel(np.linspace(0, 8000, 200))
        assert np.all(np.diff(mels) > 0)


class TestMelFilterbank:
    def test_shape(self):
        bank = mel_filterbank(16_000, 512, 26)
        assert bank.shape == (26, 257)

    def test_weights_nonnegative_bounded(self):
        bank = mel_filterbank(16_000, 512, 26)
        assert np.all(bank >= 0.0)
        assert np.all(bank <= 1.0 + 1e-12)

    def test_peaks_equally_spaced_in_mel(self):
        peaks = filter_peak_freqs(16_000, 26)
        gaps = np.diff(hz_to_mel(peaks))
        assert np.allclose(gaps, gaps[0], rtol=1e-9)

    def test_each_filter_peaks_near_its_center(self):
        bank = mel_filterbank(16_000, 512, 26)
        peaks = filter_peak_freqs(16_000, 26)
        bin_freqs = np.arange(257) * (16_000 / 512)
        for b in range(26):
            top = bin_freqs[np.argmax(bank[b])]
            # discretized peak lands within one bin of the analytic center
            assert abs(top - peaks[b]) <= 16_000 / 512 + 1e-9

    def test_triangle_value(self):
        # weight at a bin halfway up the rising edge is 0.5
        bank = mel_filterbank(16_000, 512, 26)
        peaks_mel = np.linspace(hz_to_mel(0.0), hz_to_mel(8_000.0), 28)
        left, center = mel_to_hz(peaks_mel[10]), mel_to_hz(peaks_mel[11])
        freq = (left + center) / 2.0
        expected = (freq - left) / (center - left)  # = 0.5
        weight = np.interp(freq, np.arange(257) * (16_000 / 512), bank[10])
        assert weight == pytest.approx(expected, abs=1e-9)

    def test_too_many_bins(self):
        with pytest.raises(TooManyBins):
            mel_filterbank(16_000, 64, 40)


class TestMelEnergies:
    def test_linear_in_spectrum(self, rng):
        bank = mel_filterbank(16_000, 256, 20)
        s = rng.uniform(0.0, 1.0, size=129)
        a = mel_energies(s, bank).values
        b = mel_energies(2.0 * s, bank).values
        assert np.allclose(b, 2.0 * a, rtol=1e-12)

    def test_log_floor(self):
        bank = mel_filterbank(16_000, 256, 20)
        out = mel_energies(np.zeros(129), bank)
        assert np.allclose(out.log_values, np.log(MEL_LOG_FLOOR))

    def test_matches_manual_sum(self, rng):
        bank = mel_filterbank(16_000, 256, 20)
        s = rng.uniform(0.0, 1.0, size=129)
        manual = np.array([np.sum(bank[b] * s) for b in range(20)])
        assert np.allclose(mel_energies(s, bank).values, manual, atol=1e-12)

    def test_dimension_mismatch(self):
        bank = mel_filterbank(16_000, 256, 20)
        with pytest.raises(DimensionMismatch):
            mel_energies(np.zeros(100), bank)


class TestDctCepstrum:
    def test_matches_literal_sum(self, rng):
        for _ in range(20):
            levels = rng.normal(size=8)
            fast = dct_cepstrum(levels, 5, 8)
            slow = literal_cepstrum(levels, 5, 8)
            assert np.allclose(fast, slow, atol=1e-9)

    def test_constant_input_nearly_vanishes(self):
        # i >= 1 coefficients of a constant are sums of cosines over a
        # half-period grid; with N_f = B they cancel exactly
        out = dct_cepstrum(np.full(26, 3.0), 12, 26)
        assert np.max(np.abs(out)) < 1e-9

    def test_rowwise(self, rng):
        levels = rng.normal(size=(6, 26))
        out = dct_cepstrum(levels, 12, 26)
        assert out.shape == (6, 12)
        for row, vec in zip(levels, out):
            assert np.allclose(vec, dct_cepstrum(row, 12, 26), atol=1e-12)

    def test_bad_count(self):
        with pytest.raises(BadCoefficientCount):
            dct_cepstrum(np.zeros(8), 9, 8)
        with pytest.raises(BadCoefficientCount):
            dct_cepstrum(np.zeros(8), 0, 8)


class TestExtractFeatures:
    def test_shape_and_fingerprint(self, default_config):
        rng = np.random.default_rng(3)
        sig = AudioSignal(rng.normal(0, 0.1, size=16_000), 16_000)
        seq = extract_features(sig, default_config)
        assert seq.dim == default_config.cepstral_count
        assert 0 < seq.count <= (16_000 - 400) // 160 + 1
        assert seq.fingerprint == default_config.fingerprint()

    def test_silence_removal_drops_padding(self, default_config):
        rng = np.random.default_rng(4)
        voiced = 0.5 * np.sin(2 * np.pi * 220 * np.arange(8_000) / 16_000)
        voiced += rng.normal(0, 0.01, size=8_000)
        padded = np.concatenate([np.zeros(8_000), voiced, np.zeros(8_000)])
        n_padded = extract_features(AudioSignal(padded, 16_000),
                                    default_config).count
        n_voiced = extract_features(AudioSignal(voiced, 16_000),
                                    default_config).count
        # padding adds ~100 silent frames; nearly all must be dropped (the
        # two runs see different energy ranges, so allow a few stragglers)
        total_padded = (padded.size - 400) // 160 + 1
        assert n_padded <= n_voiced + 10
        assert n_padded < total_padded // 2

    def test_all_silent(self, default_config):
        with pytest.raises(AllSilent):
            extract_features(AudioSignal(np.ones(16_000), 16_000),
                             default_config)

    def test_deterministic(self, default_config):
        rng = np.random.default_rng(5)
        sig = AudioSignal(rng.normal(0, 0.1, size=8_000), 16_000)
        a = extract_features(sig, default_config)
        b = extract_features(sig, default_config)
        assert np.array_equal(a.vectors, b.vectors)

    def test_dump_load_round_trip(self, tmp_path, default_config):
        rng = np.random.default_rng(6)
        sig = AudioSignal(rng.normal(0, 0.1, size=8_000), 16_000)
        seq = extract_features(sig, default_config)
        path = tmp_path / "f.csv"
        dump_features(seq, path)
        assert np.allclose(load_features(path), seq.vectors,
                           rtol=1e-15, atol=1e-15)

    def test_requires_2d(self):
        with pytest.raises(ValueError):
            FeatureSequence(vectors=np.zeros(5))
