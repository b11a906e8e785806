"""Enrollment and identification over a closed speaker set.

Enrollment extracts features from a speaker's recordings, min-max
normalizes them against all enrolled material, picks RBF centers by
subtractive clustering, and refits a shared RBF output layer with one
output per speaker. Identification scores an unknown recording against
every model either by mean nearest-center distance (distortion mode) or
by the shared network's mean outputs (rbf-score mode).

Databases are immutable values: enroll returns a new database and never
mutates its argument, so concurrent identification against a loaded
database is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import AudioSignal
from .clustering import estimate_widths, subtractive_cluster
from .config import PipelineConfig
from .errors import (DimensionMismatch, DuplicateSpeaker, EmptyDatabase,
                     EmptyFeatures, SampleRateMismatch, SpeakerIdError)
from .features import extract_features
from .rbf import RbfNetwork, design_matrix, fit_weights, forward_batch

MODE_DISTORTION = "distortion"
MODE_RBF = "rbf-score"
MODES = (MODE_DISTORTION, MODE_RBF)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SpeakerModel:
    """Per-speaker artifacts: centers and widths in normalized feature space,
    plus the raw training features they were derived from."""

    speaker_id: str
    centers: np.ndarray         # K x D
    widths: np.ndarray          # K
    frame_count: int
    train_features: np.ndarray  # raw (unnormalized) frames x D

    def __post_init__(self):
        if not self.speaker_id:
            raise ValueError("speaker_id must be non-empty")
        if self.centers.ndim != 2 or self.centers.shape[0] < 1:
            raise ValueError("model needs at least one center")
        if np.any(self.widths <= 0):
            raise ValueError("model widths must be positive")

    @property
    def center_count(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class SpeakerDatabase:
    """Enrolled models plus the pipeline configuration and normalization.

    ``models`` preserves enrollment order; the shared RBF's outputs follow
    that order. ``feature_min``/``feature_max`` are per-dimension bounds
    over all enrolled raw features and define the normalized space every
    model lives in.
    """

    config: PipelineConfig
    models: dict[str, SpeakerModel] = field(default_factory=dict)
    feature_min: np.ndarray | None = None
    feature_max: np.ndarray | None = None
    shared_rbf: RbfNetwork | None = None
    format_version: int = FORMAT_VERSION

    @property
    def speaker_ids(self) -> list[str]:
        return list(self.models)

    @property
    def speaker_count(self) -> int:
        return len(self.models)

    def normalize(self, features: np.ndarray) -> np.ndarray:
        """Map raw features into the database's per-dimension [0, 1] box."""
        if self.feature_min is None:
            raise EmptyDatabase("database has no normalization yet")
        span = self.feature_max - self.feature_min
        span = np.where(span > 0, span, 1.0)  # constant dims map to 0
        return (features - self.feature_min) / span


@dataclass(frozen=True)
class IdentificationResult:
    """Outcome of matching one recording against the database."""

    best_speaker: str
    scores: dict[str, float]
    mode: str
    margin: float

    def ranked(self) -> list[tuple[str, float]]:
        """Speakers best-first: ascending distortion or descending score."""
        reverse = self.mode == MODE_RBF
        return sorted(self.scores.items(),
                      key=lambda kv: (-kv[1] if reverse else kv[1], kv[0]))


def new_database(config: PipelineConfig) -> SpeakerDatabase:
    """Fresh database with no enrolled speakers."""
    return SpeakerDatabase(config=config)


def _rebuild(config: PipelineConfig, raw_features: dict[str, np.ndarray],
             fit_rbf: bool) -> SpeakerDatabase:
    """Derive every model and the shared output layer from raw features.

    Models depend on the global normalization, which moves whenever new
    material arrives, so all speakers are re-derived together. Cost is
    linear in the number of speakers per call.
    """
    all_feats = np.vstack(list(raw_features.values()))
    fmin = all_feats.min(axis=0)
    fmax = all_feats.max(axis=0)
    span = np.where(fmax - fmin > 0, fmax - fmin, 1.0)

    models: dict[str, SpeakerModel] = {}
    for sid, raw in raw_features.items():
        normed = (raw - fmin) / span
        result = subtractive_cluster(normed, config.cluster_radius,
                                     config.accept_ratio, config.reject_ratio)
        models[sid] = SpeakerModel(
            speaker_id=sid, centers=result.centers,
            widths=estimate_widths(result), frame_count=raw.shape[0],
            train_features=raw)

    shared = None
    if fit_rbf:
        order = list(models)
        centers = np.vstack([models[sid].centers for sid in order])
        widths = np.concatenate([models[sid].widths for sid in order])
        frames = np.vstack([(models[sid].train_features - fmin) / span
                            for sid in order])
        targets = np.zeros((frames.shape[0], len(order)))
        row = 0
        for col, sid in enumerate(order):
            n = models[sid].frame_count
            targets[row:row + n, col] = 1.0
            row += n
        weights, bias = fit_weights(design_matrix(frames, centers, widths),
                                    targets, config.ridge_lambda)
        shared = RbfNetwork(centers=centers, widths=widths,
                            weights=weights, bias=bias)

    return SpeakerDatabase(config=config, models=models,
                           feature_min=fmin, feature_max=fmax,
                           shared_rbf=shared)


def enroll(speaker_id: str, signals: list[AudioSignal],
           db: SpeakerDatabase, fit_rbf: bool = True) -> SpeakerDatabase:
    """Add one speaker and return the updated database.

    All signals must match the database sample rate. Normalization is
    recomputed over every enrolled speaker's material and the shared RBF
    output layer is refitted with one output per speaker.

    Raises:
        DuplicateSpeaker: the id is already enrolled.
        SampleRateMismatch: a signal's rate differs from the config.
        AllSilent / SignalTooShort: a signal yields no usable frames.
    """
    if not speaker_id:
        raise ValueError("speaker_id must be non-empty")
    if speaker_id in db.models:
        raise DuplicateSpeaker(f"speaker {speaker_id!r} is already enrolled")
    if not signals:
        raise ValueError("enrollment needs at least one signal")
    for signal in signals:
        if signal.sample_rate != db.config.sample_rate:
            raise SampleRateMismatch(
                f"signal at {signal.sample_rate} Hz, database expects "
                f"{db.config.sample_rate} Hz")

    feats = np.vstack([extract_features(s, db.config).vectors for s in signals])
    raw = {sid: m.train_features for sid, m in db.models.items()}
    raw[speaker_id] = feats
    return _rebuild(db.config, raw, fit_rbf)


def build_database(config: PipelineConfig,
                   speaker_signals: dict[str, list[AudioSignal]],
                   fit_rbf: bool = True) -> SpeakerDatabase:
    """Enroll many speakers at once (single rebuild, same result as
    sequential enrolls)."""
    db = new_database(config)
    if not speaker_signals:
        return db
    raw: dict[str, np.ndarray] = {}
    for sid, signals in speaker_signals.items():
        if not sid:
            raise ValueError("speaker_id must be non-empty")
        if sid in raw:
            raise DuplicateSpeaker(f"speaker {sid!r} listed twice")
        if not signals:
            raise ValueError(f"speaker {sid!r} has no signals")
        for signal in signals:
            if signal.sample_rate != config.sample_rate:
                raise SampleRateMismatch(
                    f"signal at {signal.sample_rate} Hz, database expects "
                    f"{config.sample_rate} Hz")
        raw[sid] = np.vstack([extract_features(s, config).vectors
                              for s in signals])
    return _rebuild(config, raw, fit_rbf)


def distortion_distance(features: np.ndarray, model: SpeakerModel) -> float:
    """Mean nearest-center Euclidean distance of a feature set to a model.

    ``features`` must live in the same (normalized) space as the model's
    centers. Zero iff every row coincides with some center.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[0] == 0 or features.size == 0:
        raise EmptyFeatures("no feature rows to score")
    if features.shape[1] != model.centers.shape[1]:
        raise DimensionMismatch(
            f"features have dim {features.shape[1]}, model centers "
            f"{model.centers.shape[1]}")
    d2 = (np.einsum("ij,ij->i", features, features)[:, None]
          + np.einsum("ij,ij->i", model.centers, model.centers)[None, :]
          - 2.0 * (features @ model.centers.T))
    np.maximum(d2, 0.0, out=d2)
    return float(np.mean(np.sqrt(d2.min(axis=1))))


def identify_features(raw_features: np.ndarray, db: SpeakerDatabase,
                      mode: str = MODE_DISTORTION) -> IdentificationResult:
    """Score already-extracted raw features against every enrolled speaker."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if db.speaker_count == 0:
        raise EmptyDatabase("no speakers enrolled")

    normed = db.normalize(np.atleast_2d(raw_features))
    if mode == MODE_DISTORTION:
        scores = {sid: distortion_distance(normed, model)
                  for sid, model in db.models.items()}
    else:
        if db.shared_rbf is None:
            raise SpeakerIdError(
                "database has no fitted RBF output layer; enroll with "
                "fit_rbf=True to use rbf-score mode")
        outputs = forward_batch(normed, db.shared_rbf).mean(axis=0)
        scores = dict(zip(db.speaker_ids, (float(v) for v in outputs)))

    scores = {sid: scores[sid] for sid in sorted(scores)}
    reverse = mode == MODE_RBF
    ranked = sorted(scores.items(),
                    key=lambda kv: (-kv[1] if reverse else kv[1], kv[0]))
    margin = abs(ranked[1][1] - ranked[0][1]) if len(ranked) > 1 else 0.0
    return IdentificationResult(best_speaker=ranked[0][0], scores=scores,
                                mode=mode, margin=margin)


def identify(signal: AudioSignal, db: SpeakerDatabase,
             mode: str = MODE_DISTORTION) -> IdentificationResult:
    """Identify the speaker of one recording within the closed set.

    Distortion mode returns the model with the lowest mean nearest-center
    distance; rbf-score mode the highest mean shared-network output. Ties
    go to the lexicographically smallest speaker id.

    Raises:
        EmptyDatabase: nothing enrolled.
        SampleRateMismatch: recording rate differs from the database.
        AllSilent / SignalTooShort: recording yields no usable frames.
    """
    if db.speaker_count == 0:
        raise EmptyDatabase("no speakers enrolled")
    if signal.sample_rate != db.config.sample_rate:
        raise SampleRateMismatch(
            f"signal at {signal.sample_rate} Hz, database expects "
            f"{db.config.sample_rate} Hz")
    feats = extract_features(signal, db.config)
    return identify_features(feats.vectors, db, mode)
