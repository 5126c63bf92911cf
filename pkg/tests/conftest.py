import numpy as np
import pytest

from notevec.embedding import EmbeddingModel, TrainConfig, Vocabulary, build_vocab, init_model, train
from notevec.synth import TopicSpec, gen_topic_corpus


def hand_model(words, vectors):
    """Embedding model with the given input rows and unit counts."""
    vectors = np.asarray(vectors, dtype=np.float64)
    vocab = Vocabulary(list(words), np.ones(len(words), dtype=np.int64), total_tokens=len(words), min_count=1)
    return EmbeddingModel(vocab, vectors, np.zeros_like(vectors))


@pytest.fixture(scope="session")
def two_topic_corpus():
    spec = TopicSpec(n_topics=2, words_per_topic=30, shared_words=20, n_sentences=5000, min_count=5, rng_seed=11)
    return gen_topic_corpus(spec)


@pytest.fixture(scope="session")
def two_topic_model(two_topic_corpus):
    sentences, _ = two_topic_corpus
    config = TrainConfig(dim=16, window=5, min_count=5, negatives=5, epochs=15, rng_seed=5)
    vocab = build_vocab(sentences, config.min_count)
    return train(init_model(vocab, config), sentences, config)


_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _criteria.append((marker.args[0], report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
