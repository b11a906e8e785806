"""Seeded synthetic speech corpus and TSV manifests.

Real speech is out of scope for the test bench, so utterances are built
as harmonic stacks: each synthetic speaker gets a fundamental frequency
and a set of resonance peaks, and every utterance excites the harmonics
of a slightly wavering fundamental through that spectral envelope, with
additive noise and leading/trailing near-silence. The result is cheap,
deterministic for a given seed, and separable enough that the full
pipeline can be graded on it.

Manifests are one `path<TAB>speaker_id` line per file; relative paths
are resolved against the manifest's own directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal, save_wav
from .errors import IoFailure, ManifestParse

_F0_RANGE = (100.0, 260.0)
_FORMANT_RANGES = ((350.0, 850.0), (1000.0, 2200.0), (2500.0, 3400.0))
_MAX_HARMONIC_HZ = 4000.0
_SILENCE_NOISE = 2e-4


@dataclass(frozen=True)
class VoiceProfile:
    """Per-speaker timbre: fundamental plus resonance peaks."""

    f0: float
    formants: tuple[float, ...]
    gains: tuple[float, ...]
    bandwidths: tuple[float, ...]


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    speaker_id: str


@dataclass(frozen=True)
class SynthCorpus:
    """Where a generated corpus landed on disk."""

    out_dir: str
    speaker_ids: list[str]
    wav_paths: list[str]
    enroll_manifest: str
    test_manifest: str


def sample_profiles(rng: np.random.Generator, count: int) -> list[VoiceProfile]:
    """Draw ``count`` distinct voices.

    Fundamentals sit on an evenly spaced grid with small jitter so that
    voices stay apart even when many are requested; resonances are drawn
    independently per speaker.
    """
    if count < 1:
        raise ValueError("need at least one speaker")
    lo, hi = _F0_RANGE
    if count == 1:
        base = np.array([(lo + hi) / 2.0])
    else:
        base = np.linspace(lo, hi, count)
    profiles = []
    for i in range(count):
        f0 = float(base[i] + rng.uniform(-2.0, 2.0))
        formants = tuple(float(rng.uniform(a, b)) for a, b in _FORMANT_RANGES)
        gains = tuple(float(rng.uniform(0.7, 1.3)) for _ in _FORMANT_RANGES)
        bandwidths = tuple(float(rng.uniform(70.0, 140.0))
                           for _ in _FORMANT_RANGES)
        profiles.append(VoiceProfile(f0, formants, gains, bandwidths))
    return profiles


def _envelope(freqs: np.ndarray, profile: VoiceProfile) -> np.ndarray:
    """Spectral envelope: sum of Gaussian resonance bumps plus a gentle
    low-pass tilt so higher harmonics never vanish completely."""
    env = np.zeros_like(freqs)
    for peak, gain, bw in zip(profile.formants, profile.gains,
                              profile.bandwidths):
        env += gain * np.exp(-((freqs - peak) / (2.0 * bw)) ** 2)
    return env + 0.08 * (profile.formants[0] / freqs)


def synthesize_utterance(rng: np.random.Generator, profile: VoiceProfile,
                         sample_rate: int = 16_000) -> AudioSignal:
    """One ~2 s utterance: vibrato'd harmonic stack shaped by the
    speaker's envelope, plus noise and silence padding."""
    voiced_dur = rng.uniform(1.4, 1.7)
    lead = rng.uniform(0.15, 0.30)
    tail = rng.uniform(0.10, 0.25)

    n = int(round(voiced_dur * sample_rate))
    t = np.arange(n) / sample_rate
    f0 = profile.f0 * (1.0 + rng.uniform(-0.015, 0.015))
    vib_rate = rng.uniform(4.0, 6.0)
    vib_phase = rng.uniform(0.0, 2.0 * np.pi)
    inst_f0 = f0 * (1.0 + 0.005 * np.sin(2.0 * np.pi * vib_rate * t + vib_phase))
    phase = 2.0 * np.pi * np.cumsum(inst_f0) / sample_rate

    n_harm = max(1, int(_MAX_HARMONIC_HZ / f0))
    k = np.arange(1, n_harm + 1)
    amps = _envelope(k * f0, profile)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_harm)
    voiced = (amps[:, None] * np.sin(k[:, None] * phase[None, :]
                                     + phases[:, None])).sum(axis=0)

    ramp = int(0.05 * sample_rate)  # 50 ms fade in/out
    gate = np.ones(n)
    gate[:ramp] = np.linspace(0.0, 1.0, ramp)
    gate[-ramp:] = np.linspace(1.0, 0.0, ramp)
    voiced *= gate
    voiced += rng.normal(0.0, 0.01 * np.sqrt(np.mean(voiced ** 2)), size=n)

    peak = np.max(np.abs(voiced))
    voiced *= rng.uniform(0.35, 0.5) / peak

    lead_n = int(round(lead * sample_rate))
    tail_n = int(round(tail * sample_rate))
    samples = rng.normal(0.0, _SILENCE_NOISE, size=lead_n + n + tail_n)
    samples[lead_n:lead_n + n] += voiced
    return AudioSignal(samples=samples, sample_rate=sample_rate)


def write_manifest(path, entries: list[ManifestEntry]) -> None:
    """Write `path<TAB>speaker_id` lines."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for entry in entries:
                handle.write(f"{entry.path}\t{entry.speaker_id}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write manifest {path!r}: {exc}") from exc


def read_manifest(path) -> list[ManifestEntry]:
    """Parse a manifest; paths come back resolved against its directory.

    Raises ManifestParse on malformed lines or when no entries remain.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path!r}: {exc}") from exc

    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.rstrip("\r\n")
        if not stripped.strip():
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ManifestParse(
                f"{path}:{lineno}: expected 'path<TAB>speaker_id', "
                f"got {stripped!r}")
        wav = parts[0]
        if not os.path.isabs(wav):
            wav = os.path.join(base, wav)
        entries.append(ManifestEntry(path=wav, speaker_id=parts[1]))
    if not entries:
        raise ManifestParse(f"{path}: manifest has no entries")
    return entries


def synthesize_corpus(out_dir, speakers: int = 5, utterances: int = 4,
                      test_count: int = 1, seed: int = 0,
                      sample_rate: int = 16_000) -> SynthCorpus:
    """Generate a corpus of ``speakers`` x ``utterances`` WAV files.

    The last ``test_count`` utterances of each speaker go to test.tsv,
    the rest to enroll.tsv. Same seed and arguments reproduce the corpus
    byte for byte.
    """
    if speakers < 1 or utterances < 1:
        raise ValueError("speakers and utterances must be >= 1")
    if not 0 <= test_count < utterances:
        raise ValueError("test_count must leave at least one "
                         "enrollment utterance per speaker")
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out_dir!r}: {exc}") from exc

    rng = np.random.default_rng(seed)
    profiles = sample_profiles(rng, speakers)
    speaker_ids = [f"s{i + 1:02d}" for i in range(speakers)]

    wav_paths = []
    enroll_entries = []
    test_entries = []
    for sid, profile in zip(speaker_ids, profiles):
        for u in range(utterances):
            name = f"{sid}_u{u + 1:02d}.wav"
            full = os.path.join(out_dir, name)
            save_wav(synthesize_utterance(rng, profile, sample_rate), full)
            wav_paths.append(full)
            entry = ManifestEntry(path=name, speaker_id=sid)
            if u < utterances - test_count:
                enroll_entries.append(entry)
            else:
                test_entries.append(entry)

    enroll_manifest = os.path.join(out_dir, "enroll.tsv")
    test_manifest = os.path.join(out_dir, "test.tsv")
    write_manifest(enroll_manifest, enroll_entries)
    write_manifest(test_manifest, test_entries)
    return SynthCorpus(out_dir=str(out_dir), speaker_ids=speaker_ids,
                       wav_paths=wav_paths, enroll_manifest=enroll_manifest,
                       test_manifest=test_manifest)
