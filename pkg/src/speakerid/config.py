"""Pipeline configuration shared by every stage.

All tunable constants flow through one frozen dataclass so that a database
can fingerprint the exact pipeline its models were built with.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError


@dataclass(frozen=True)
class PipelineConfig:
    """Frame geometry, feature, clustering and training parameters.

    Defaults: 25 ms frames with a 10 ms shift at 16 kHz, 512-point FFT,
    26 mel filters, 12 cepstral coefficients. ``dct_norm_len`` defaults to
    ``mel_bins`` when left as None.
    """

    sample_rate: int = 16_000
    frame_len: int = 400          # 25 ms at 16 kHz
    frame_shift: int = 160        # 10 ms
    preemph_coeff: float = 0.97
    silence_fraction: float = 0.1
    fft_size: int = 512
    mel_bins: int = 26
    cepstral_count: int = 12
    dct_norm_len: int | None = None
    cluster_radius: float = 0.5
    accept_ratio: float = 0.5
    reject_ratio: float = 0.15
    ridge_lambda: float = 1e-6

    def __post_init__(self):
        if self.dct_norm_len is None:
            object.__setattr__(self, "dct_norm_len", self.mel_bins)
        self._check("sample_rate > 0", self.sample_rate > 0)
        self._check("frame_len > 0", self.frame_len > 0)
        self._check("frame_shift > 0", self.frame_shift > 0)
        self._check("frame_shift <= frame_len", self.frame_shift <= self.frame_len)
        self._check("0 <= preemph_coeff < 1", 0.0 <= self.preemph_coeff < 1.0)
        self._check("fft_size is a power of two",
                    self.fft_size > 0 and self.fft_size & (self.fft_size - 1) == 0)
        self._check("fft_size >= frame_len", self.fft_size >= self.frame_len)
        self._check("mel_bins >= 2", self.mel_bins >= 2)
        self._check("1 <= cepstral_count <= mel_bins",
                    1 <= self.cepstral_count <= self.mel_bins)
        self._check("dct_norm_len > 0", self.dct_norm_len > 0)
        self._check("cluster_radius > 0", self.cluster_radius > 0)
        self._check("0 < reject_ratio < accept_ratio <= 1",
                    0.0 < self.reject_ratio < self.accept_ratio <= 1.0)
        self._check("ridge_lambda >= 0", self.ridge_lambda >= 0)

    @staticmethod
    def _check(desc: str, ok: bool):
        if not ok:
            raise ConfigError(f"config invariant violated: {desc}")

    @classmethod
    def from_ms(cls, sample_rate: int = 16_000, frame_ms: float = 25.0,
                shift_ms: float = 10.0, **overrides) -> "PipelineConfig":
        """Build a config from frame geometry given in milliseconds."""
        frame_len = int(round(sample_rate * frame_ms / 1000.0))
        frame_shift = int(round(sample_rate * shift_ms / 1000.0))
        return cls(sample_rate=sample_rate, frame_len=frame_len,
                   frame_shift=frame_shift, **overrides)

    def fingerprint(self) -> str:
        """Stable short digest of all fields, for compatibility checks."""
        parts = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)]
        digest = hashlib.sha256(";".join(parts).encode("utf-8")).hexdigest()
        return digest[:16]
