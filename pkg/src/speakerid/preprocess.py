"""Signal conditioning: DC removal, framing, silence gating, pre-emphasis,
Hamming windowing.

Stage order in the full pipeline: DC removal on the whole signal, frame
blocking, energy-threshold silence removal on the raw frames, then
pre-emphasis and windowing on the surviving frames. Per-frame operations
act on the last axis, so they accept a single frame or a frame matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal
from .errors import EmptyAudio, EmptyFrame, EmptySequence, FrameTooShort, SignalTooShort


@dataclass(frozen=True)
class FrameMatrix:
    """Overlapping fixed-length frames cut from one signal (rows = frames)."""

    frames: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2:
            raise ValueError("FrameMatrix requires a 2-D array")
        if not np.all(np.isfinite(frames)):
            raise ValueError("FrameMatrix entries must be finite")

    @property
    def count(self) -> int:
        return self.frames.shape[0]

    @property
    def frame_len(self) -> int:
        return self.frames.shape[1]


def remove_dc(signal: AudioSignal) -> AudioSignal:
    """Subtract the signal mean so the output averages to zero."""
    samples = signal.samples
    if samples.size == 0:
        raise EmptyAudio("cannot remove DC from an empty signal")
    return AudioSignal(samples - samples.mean(), signal.sample_rate)


def frame_energy(frame) -> float:
    """Root of the sum of squared samples of one frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise EmptyFrame("frame has no samples")
    return float(np.sqrt(np.sum(frame * frame)))


def frame_energies(frames: np.ndarray) -> np.ndarray:
    """frame_energy applied to each row of a frame matrix."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[-1] == 0:
        raise EmptyFrame("frames have no samples")
    return np.sqrt(np.sum(frames * frames, axis=-1))


def silence_threshold(energies, silence_fraction: float) -> float:
    """Energy level separating silence from speech.

    Interpolates between the lowest and greatest frame energy:
    E_min + silence_fraction * (E_max - E_min).
    """
    energies = np.asarray(energies, dtype=np.float64)
    if energies.size == 0:
        raise EmptySequence("no energies to threshold")
    e_min = float(energies.min())
    e_max = float(energies.max())
    return e_min + silence_fraction * (e_max - e_min)


def remove_silence(frames: FrameMatrix, silence_fraction: float) -> FrameMatrix:
    """Drop frames whose energy does not exceed the silence threshold.

    Comparison is strict, so an all-silent signal is removed entirely.
    The result may hold zero frames; downstream stages treat that as the
    all-silent condition.
    """
    if frames.count == 0:
        raise EmptySequence("no frames to gate")
    energies = frame_energies(frames.frames)
    threshold = silence_threshold(energies, silence_fraction)
    keep = energies > threshold
    return FrameMatrix(frames.frames[keep], frames.fingerprint)


def block_frames(signal: AudioSignal, frame_len: int, frame_shift: int,
                 fingerprint: str = "") -> FrameMatrix:
    """Cut the signal into overlapping frames of frame_len every frame_shift.

    Frame t covers samples [t*frame_shift, t*frame_shift + frame_len).
    Trailing samples that cannot fill a whole frame are discarded.
    """
    if not 1 <= frame_shift <= frame_len:
        raise ValueError("require 1 <= frame_shift <= frame_len")
    samples = signal.samples
    if samples.size < frame_len:
        raise SignalTooShort(
            f"signal of {samples.size} samples is shorter than one "
            f"{frame_len}-sample frame")
    count = (samples.size - frame_len) // frame_shift + 1
    starts = np.arange(count) * frame_shift
    frames = samples[starts[:, None] + np.arange(frame_len)[None, :]]
    return FrameMatrix(frames, fingerprint)


def preemphasize(frame, coeff: float):
    """First-difference high-pass: y(n) = x(n) - coeff*x(n-1), y(0) = x(0).

    Operates on the last axis, so a frame matrix is filtered row-wise with
    no state crossing frame boundaries.
    """
    if not 0.0 <= coeff < 1.0:
        raise ValueError("pre-emphasis coefficient must be in [0, 1)")
    x = np.asarray(frame, dtype=np.float64)
    if x.shape[-1] == 0:
        raise EmptyFrame("cannot pre-emphasize an empty frame")
    y = x.copy()
    y[..., 1:] -= coeff * x[..., :-1]
    return y


def hamming_window(length: int) -> np.ndarray:
    """Symmetric Hamming weights 0.54 - 0.46*cos(2*pi*n/(N-1))."""
    if length < 2:
        raise FrameTooShort("Hamming window needs at least 2 samples")
    return np.hamming(length)


def apply_hamming(frame):
    """Multiply the frame (last axis) by a symmetric Hamming window."""
    x = np.asarray(frame, dtype=np.float64)
    return x * hamming_window(x.shape[-1])
