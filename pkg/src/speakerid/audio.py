"""WAV decoding into normalized mono signals.

Deliberately narrow decoder: RIFF/WAVE containers holding little-endian
integer PCM at 8, 16, 24 or 32 bits. Compressed codecs and float WAV are
rejected so that decoding stays bit-exact. No resampling happens here; a
database records its expected rate and mismatches are errors upstream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFile, EmptyAudio, IoFailure, UnsupportedFormat

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE
# PCM subformat GUID for WAVE_FORMAT_EXTENSIBLE, little-endian first group.
_PCM_GUID = b"\x01\x00\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"

_SUPPORTED_BITS = (8, 16, 24, 32)


@dataclass(frozen=True)
class AudioSignal:
    """Mono sample sequence with its sample rate.

    ``samples`` is a float64 vector; file loading scales integer PCM into
    [-1, 1]. Derived signals (e.g. after DC removal) may leave that range.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("AudioSignal samples must be one-dimensional")
        if samples.size == 0:
            raise EmptyAudio("signal has zero samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioSignal samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def _read_exact(data: bytes, offset: int, size: int, what: str) -> bytes:
    if offset + size > len(data):
        raise CorruptFile(f"truncated WAV: expected {size} bytes for {what}")
    return data[offset:offset + size]


def _decode_pcm(raw: bytes, bits: int, n_channels: int) -> np.ndarray:
    """Decode interleaved integer PCM into a (frames, channels) float array."""
    bytes_per_sample = bits // 8
    n_values = len(raw) // bytes_per_sample
    if bits == 8:
        # 8-bit WAV PCM is unsigned with midpoint 128.
        ints = np.frombuffer(raw, dtype=np.uint8).astype(np.int32) - 128
        scale = 128.0
    elif bits == 16:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.int32)
        scale = 32768.0
    elif bits == 24:
        as_bytes = np.frombuffer(raw, dtype=np.uint8).reshape(n_values, 3)
        ints = (as_bytes[:, 0].astype(np.int32)
                | (as_bytes[:, 1].astype(np.int32) << 8)
                | (as_bytes[:, 2].astype(np.int32) << 16))
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        scale = float(1 << 23)
    else:  # 32
        ints = np.frombuffer(raw, dtype="<i4")
        scale = float(1 << 31)
    samples = ints.astype(np.float64) / scale
    return samples.reshape(-1, n_channels)


def load_wav(path) -> AudioSignal:
    """Load a WAV file as a normalized mono AudioSignal.

    Multi-channel input is downmixed by per-sample channel averaging.
    Integer PCM is scaled to [-1, 1] by the type's maximum magnitude.

    Raises:
        IoFailure: the file cannot be read.
        CorruptFile: broken RIFF structure or truncated data.
        UnsupportedFormat: non-PCM codec, zero channels, or odd bit depth.
        EmptyAudio: the data chunk holds zero samples.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    if len(data) < 12:
        raise CorruptFile("file too small for a RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptFile("not a RIFF/WAVE file")

    fmt = None
    pcm_data = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset:offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body_start = offset + 8
        if chunk_id == b"fmt ":
            body = _read_exact(data, body_start, min(chunk_size, 40), "fmt chunk")
            if chunk_size < 16:
                raise CorruptFile("fmt chunk shorter than 16 bytes")
            (tag, n_channels, sample_rate, _byte_rate, block_align,
             bits) = struct.unpack_from("<HHIIHH", body, 0)
            if tag == _WAVE_FORMAT_EXTENSIBLE:
                if chunk_size < 40:
                    raise CorruptFile("extensible fmt chunk shorter than 40 bytes")
                if body[24:40] != _PCM_GUID:
                    raise UnsupportedFormat("extensible WAV with non-PCM subformat")
                tag = _WAVE_FORMAT_PCM
            if tag == _WAVE_FORMAT_IEEE_FLOAT:
                raise UnsupportedFormat("float WAV is not supported")
            if tag != _WAVE_FORMAT_PCM:
                raise UnsupportedFormat(f"unsupported WAV codec tag {tag:#06x}")
            if n_channels == 0:
                raise UnsupportedFormat("WAV declares zero channels")
            if bits not in _SUPPORTED_BITS:
                raise UnsupportedFormat(f"unsupported bit depth {bits}")
            if block_align != n_channels * (bits // 8):
                raise CorruptFile("block alignment inconsistent with channel layout")
            fmt = (n_channels, sample_rate, bits)
        elif chunk_id == b"data":
            if fmt is None:
                raise CorruptFile("data chunk before fmt chunk")
            pcm_data = _read_exact(data, body_start, chunk_size, "data chunk")
            break
        # skip unknown chunks; chunks are word-aligned
        offset = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise CorruptFile("missing fmt chunk")
    if pcm_data is None:
        raise CorruptFile("missing data chunk")

    n_channels, sample_rate, bits = fmt
    frame_size = n_channels * (bits // 8)
    if len(pcm_data) % frame_size != 0:
        raise CorruptFile("data chunk does not hold a whole number of frames")
    if len(pcm_data) == 0:
        raise EmptyAudio("WAV contains zero samples")
    if sample_rate == 0:
        raise CorruptFile("WAV declares zero sample rate")

    channels = _decode_pcm(pcm_data, bits, n_channels)
    mono = channels.mean(axis=1)
    return AudioSignal(samples=mono, sample_rate=int(sample_rate))


def save_wav(signal: AudioSignal, path) -> None:
    """Write a signal as mono 16-bit PCM.

    Amplitudes are clipped to [-1, 1] and quantized with scale 32768, so a
    load_wav round trip reproduces each sample within 1/32768.
    """
    x = np.clip(signal.samples, -1.0, 1.0)
    ints = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    pcm = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, _WAVE_FORMAT_PCM, 1, signal.sample_rate,
        signal.sample_rate * 2, 2, 16,
        b"data", len(pcm),
    )
    try:
        Path(path).write_bytes(header + pcm)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
