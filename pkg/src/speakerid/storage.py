"""Binary save/load for speaker databases.

Layout: 8-byte magic, little-endian format version, payload (config,
normalization bounds, per-speaker models with their raw training
features, shared RBF output weights), then a trailing SHA-256 over
everything before it. The checksum is verified before anything is
parsed, so truncation or bit rot surfaces as CorruptDatabase rather
than as garbage models.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile

import numpy as np

from .config import PipelineConfig
from .engine import FORMAT_VERSION, SpeakerDatabase, SpeakerModel
from .errors import CorruptDatabase, IoFailure, VersionMismatch
from .rbf import RbfNetwork

MAGIC = b"SPKRIDDB"
_DIGEST_LEN = 32

# config scalars travel as 7 uint32 then 6 float64, field order fixed
_CONFIG_INTS = ("sample_rate", "frame_len", "frame_shift", "fft_size",
                "mel_bins", "cepstral_count", "dct_norm_len")
_CONFIG_FLOATS = ("preemph_coeff", "silence_fraction", "cluster_radius",
                  "accept_ratio", "reject_ratio", "ridge_lambda")


def _pack_array(out: bytearray, arr: np.ndarray):
    out += np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _encode(db: SpeakerDatabase) -> bytes:
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", FORMAT_VERSION)

    cfg = db.config
    out += struct.pack("<7I", *(getattr(cfg, name) for name in _CONFIG_INTS))
    out += struct.pack("<6d", *(getattr(cfg, name) for name in _CONFIG_FLOATS))

    if db.feature_min is None:
        out += struct.pack("<I", 0)
    else:
        out += struct.pack("<I", db.feature_min.shape[0])
        _pack_array(out, db.feature_min)
        _pack_array(out, db.feature_max)

    out += struct.pack("<I", db.speaker_count)
    for sid, model in db.models.items():
        encoded = sid.encode("utf-8")
        out += struct.pack("<I", len(encoded))
        out += encoded
        k, d = model.centers.shape
        out += struct.pack("<3I", k, d, model.frame_count)
        _pack_array(out, model.centers)
        _pack_array(out, model.widths)
        _pack_array(out, model.train_features)

    if db.shared_rbf is None:
        out += struct.pack("<B", 0)
    else:
        net = db.shared_rbf
        out += struct.pack("<B", 1)
        out += struct.pack("<2I", net.weights.shape[0], net.weights.shape[1])
        _pack_array(out, net.weights)
        _pack_array(out, net.bias)

    out += hashlib.sha256(out).digest()
    return bytes(out)


class _Reader:
    """Cursor over the payload; any out-of-range read means corruption."""

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise CorruptDatabase("database payload is truncated")
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def floats(self, *shape: int) -> np.ndarray:
        count = int(np.prod(shape)) if shape else 0
        raw = self.take(8 * count)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)

    def done(self) -> bool:
        return self.pos == len(self.buf)


def _decode(payload: bytes) -> SpeakerDatabase:
    r = _Reader(payload)
    ints = r.unpack("<7I")
    floats = r.unpack("<6d")
    try:
        cfg = PipelineConfig(**dict(zip(_CONFIG_INTS, ints)),
                             **dict(zip(_CONFIG_FLOATS, floats)))
    except Exception as exc:
        raise CorruptDatabase(f"stored config is invalid: {exc}") from exc

    (dim,) = r.unpack("<I")
    fmin = fmax = None
    if dim:
        fmin = r.floats(dim)
        fmax = r.floats(dim)

    (n_speakers,) = r.unpack("<I")
    models: dict[str, SpeakerModel] = {}
    for _ in range(n_speakers):
        (id_len,) = r.unpack("<I")
        try:
            sid = r.take(id_len).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptDatabase("speaker id is not valid UTF-8") from exc
        k, d, frames = r.unpack("<3I")
        if dim and d != dim:
            raise CorruptDatabase(
                f"speaker {sid!r} has dim {d}, database has {dim}")
        try:
            models[sid] = SpeakerModel(
                speaker_id=sid, centers=r.floats(k, d),
                widths=r.floats(k), frame_count=frames,
                train_features=r.floats(frames, d))
        except ValueError as exc:
            raise CorruptDatabase(f"invalid model for {sid!r}: {exc}") from exc
    if len(models) != n_speakers:
        raise CorruptDatabase("duplicate speaker id in payload")

    (has_rbf,) = r.unpack("<B")
    shared = None
    if has_rbf:
        m, c = r.unpack("<2I")
        total_centers = sum(mod.centers.shape[0] for mod in models.values())
        if m != total_centers or c != n_speakers:
            raise CorruptDatabase(
                "shared network shape disagrees with the stored models")
        weights = r.floats(m, c)
        bias = r.floats(c)
        centers = np.vstack([mod.centers for mod in models.values()])
        widths = np.concatenate([mod.widths for mod in models.values()])
        try:
            shared = RbfNetwork(centers=centers, widths=widths,
                                weights=weights, bias=bias)
        except Exception as exc:
            raise CorruptDatabase(f"invalid shared network: {exc}") from exc

    if not r.done():
        raise CorruptDatabase("trailing bytes after database payload")
    return SpeakerDatabase(config=cfg, models=models,
                           feature_min=fmin, feature_max=fmax,
                           shared_rbf=shared)


def save_db(db: SpeakerDatabase, path: str):
    """Write the database atomically (temp file + rename in place)."""
    blob = _encode(db)
    directory = os.path.dirname(os.path.abspath(path))
    fd = tmp_path = None
    try:
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".spkriddb-")
        with os.fdopen(fd, "wb") as handle:
            fd = None
            handle.write(blob)
        os.replace(tmp_path, path)
        tmp_path = None
    except OSError as exc:
        raise IoFailure(f"cannot write database {path!r}: {exc}") from exc
    finally:
        if fd is not None:
            os.close(fd)
        if tmp_path is not None:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass


def load_db(path: str) -> SpeakerDatabase:
    """Read a database, verifying checksum then format version.

    Raises:
        IoFailure: file cannot be read.
        CorruptDatabase: checksum mismatch, bad magic, or malformed payload.
        VersionMismatch: payload written by an incompatible format version.
    """
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except OSError as exc:
        raise IoFailure(f"cannot read database {path!r}: {exc}") from exc

    if len(blob) < len(MAGIC) + 4 + _DIGEST_LEN:
        raise CorruptDatabase("file is too short to be a speaker database")
    body, digest = blob[:-_DIGEST_LEN], blob[-_DIGEST_LEN:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptDatabase("checksum mismatch, file is damaged")
    if body[:len(MAGIC)] != MAGIC:
        raise CorruptDatabase("not a speaker database file")
    (version,) = struct.unpack_from("<I", body, len(MAGIC))
    if version != FORMAT_VERSION:
        raise VersionMismatch(
            f"database format version {version}, this build reads "
            f"{FORMAT_VERSION}")
    return _decode(body[len(MAGIC) + 4:])
