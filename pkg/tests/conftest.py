import numpy as np
import pytest

from speakerid import (PipelineConfig, build_database, load_wav,
                       read_manifest, synthesize_corpus)


@pytest.fixture(scope="session")
def default_config():
    return PipelineConfig()


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """3 speakers x 3 utterances, last utterance of each held out."""
    out = tmp_path_factory.mktemp("corpus")
    return synthesize_corpus(out, speakers=3, utterances=3, test_count=1,
                             seed=7)


@pytest.fixture(scope="session")
def small_db(small_corpus, default_config):
    by_speaker = {}
    for entry in read_manifest(small_corpus.enroll_manifest):
        by_speaker.setdefault(entry.speaker_id, []).append(load_wav(entry.path))
    return build_database(default_config, by_speaker)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
