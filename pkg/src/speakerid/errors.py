"""Exception hierarchy for the speaker identification pipeline.

Every error the library raises on bad input or bad state derives from
SpeakerIdError, so callers can catch one base class at the boundary.
Programming errors (violated internal invariants) stay plain ValueError.
"""


class SpeakerIdError(Exception):
    """Base class for all library errors."""


class ConfigError(SpeakerIdError):
    """Pipeline configuration violates an invariant."""


# --- audio decoding ---------------------------------------------------------

class IoFailure(SpeakerIdError):
    """File could not be read or written."""


class UnsupportedFormat(SpeakerIdError):
    """WAV file uses a codec or sample layout we do not decode."""


class CorruptFile(SpeakerIdError):
    """WAV container is structurally broken (truncated header or data)."""


class EmptyAudio(SpeakerIdError):
    """Audio stream contains zero samples."""


# --- preprocessing ----------------------------------------------------------

class EmptyFrame(SpeakerIdError):
    """Frame has no samples."""


class EmptySequence(SpeakerIdError):
    """Energy sequence has no entries."""


class SignalTooShort(SpeakerIdError):
    """Signal is shorter than one analysis frame."""


class FrameTooShort(SpeakerIdError):
    """Frame too short to window (needs at least 2 samples)."""


class AllSilent(SpeakerIdError):
    """No frames survived silence removal."""


# --- feature extraction -----------------------------------------------------

class BadFftSize(SpeakerIdError):
    """FFT size is not a power of two or is smaller than the frame."""


class TooManyBins(SpeakerIdError):
    """Mel filterbank has a filter with no usable spectrum bin."""


class DimensionMismatch(SpeakerIdError):
    """Array shapes are inconsistent."""


class BadCoefficientCount(SpeakerIdError):
    """Requested cepstral coefficient count is out of range."""


# --- clustering -------------------------------------------------------------

class EmptyData(SpeakerIdError):
    """Clustering input has no rows."""


class BadRadius(SpeakerIdError):
    """Cluster radius must be positive."""


class BadRatios(SpeakerIdError):
    """Accept/reject ratios must satisfy 0 < reject < accept <= 1."""


# --- RBF network ------------------------------------------------------------

class BadWidth(SpeakerIdError):
    """Kernel width must be positive."""


class SolveFailure(SpeakerIdError):
    """Least-squares solve produced non-finite values."""


# --- engine / persistence ---------------------------------------------------

class DuplicateSpeaker(SpeakerIdError):
    """Speaker id is already enrolled."""


class SampleRateMismatch(SpeakerIdError):
    """Input sample rate differs from the database's configured rate."""


class EmptyFeatures(SpeakerIdError):
    """Feature matrix has no rows."""


class EmptyDatabase(SpeakerIdError):
    """Database has no enrolled speakers."""


class VersionMismatch(SpeakerIdError):
    """Database file was written with an incompatible format version."""


class CorruptDatabase(SpeakerIdError):
    """Database file failed its checksum or cannot be parsed."""


# --- evaluation -------------------------------------------------------------

class ManifestParse(SpeakerIdError):
    """Evaluation manifest is empty or malformed."""
