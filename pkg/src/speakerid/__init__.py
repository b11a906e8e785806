"""Closed-set speaker identification from WAV recordings.

Pipeline: DC removal, frame blocking, energy-based silence removal,
pre-emphasis, Hamming windowing, magnitude spectrum, mel filterbank,
cepstral cosine transform; per-speaker codebooks picked by subtractive
clustering; a shared Gaussian RBF output layer fit by regularized least
squares. Identification runs either on nearest-center distortion or on
the RBF outputs.
"""

from .audio import AudioSignal, load_wav, save_wav
from .clustering import ClusterResult, estimate_widths, subtractive_cluster
from .config import PipelineConfig
from .corpus import (ManifestEntry, SynthCorpus, read_manifest,
                     synthesize_corpus, write_manifest)
from .engine import (MODE_DISTORTION, MODE_RBF, MODES, IdentificationResult,
                     SpeakerDatabase, SpeakerModel, build_database,
                     distortion_distance, enroll, identify, identify_features,
                     new_database)
from .errors import *  # noqa: F401,F403  (every error class is public)
from .evaluate import EvalEntry, EvalReport, evaluate_manifest, write_report
from .features import (FeatureSequence, MelSpectrum, dct_cepstrum,
                       dump_features, extract_features, load_features,
                       magnitude_spectrum, mel_energies, mel_filterbank)
from .rbf import (RbfNetwork, design_matrix, fit_weights, forward,
                  forward_batch, gaussian_kernel, kernel_matrix)
from .storage import load_db, save_db

__version__ = "0.1.0"
