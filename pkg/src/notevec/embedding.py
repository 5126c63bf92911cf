"""Vocabulary building, skip-gram negative-sampling training, and word2vec text I/O."""

import logging
import queue
import threading
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import EmptyVocabularyError, FormatError, ParameterError, VocabularyLookupError

log = logging.getLogger(__name__)

CHUNK_TOKENS = 50_000
NEGATIVE_POWER = 0.75


@dataclass
class Vocabulary:
    """Words in index order with their corpus counts.

    Index 0 is the most frequent word; equal counts are ordered
    lexicographically.
    """

    words: list
    counts: np.ndarray
    total_tokens: int = 0
    min_count: int = 1
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if len(self.words) != len(self.counts):
            raise ParameterError("words and counts differ in length")
        self._index = {w: i for i, w in enumerate(self.words)}
        if len(self._index) != len(self.words):
            raise ParameterError("duplicate words in vocabulary")

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self._index

    def __iter__(self):
        return iter(self.words)

    def index(self, word):
        try:
            return self._index[word]
        except KeyError:
            raise VocabularyLookupError(word) from None

    def get(self, word, default=None):
        return self._index.get(word, default)

    def word(self, index):
        return self.words[index]

    def count(self, word):
        return int(self.counts[self.index(word)])


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 500
    window: int = 10
    min_count: int = 100
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    rng_seed: int = 1
    workers: int = 1
    subsample_threshold: float = 0.0

    def __post_init__(self):
        checks = [
            (self.dim >= 1, "dim must be >= 1"),
            (self.window >= 1, "window must be >= 1"),
            (self.min_count >= 1, "min_count must be >= 1"),
            (self.negatives >= 1, "negatives must be >= 1"),
            (self.epochs >= 0, "epochs must be >= 0"),
            (self.initial_lr > 0, "initial_lr must be > 0"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.subsample_threshold >= 0, "subsample_threshold must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ParameterError(message)


@dataclass
class EmbeddingModel:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray

    @property
    def dim(self):
        return self.input_vectors.shape[1]

    def __len__(self):
        return len(self.vocab)

    def vector(self, word):
        return self.input_vectors[self.vocab.index(word)]

    def copy(self):
        return replace(self, input_vectors=self.input_vectors.copy(), output_vectors=self.output_vectors.copy())


def build_vocab(sentences, min_count=100):
    """Count tokens and keep those seen at least ``min_count`` times."""
    if min_count < 1:
        raise ParameterError("min_count must be >= 1")
    counter = Counter()
    total = 0
    for sentence in sentences:
        counter.update(sentence)
        total += len(sentence)
    kept = sorted(((w, c) for w, c in counter.items() if c >= min_count), key=lambda wc: (-wc[1], wc[0]))
    if not kept:
        raise EmptyVocabularyError(
            f"empty vocabulary: no word occurs at least {min_count} times in {total} tokens"
        )
    words = [w for w, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(words, counts, total_tokens=total, min_count=min_count)


def init_model(vocab, config):
    if len(vocab) == 0:
        raise EmptyVocabularyError("empty vocabulary")
    rng = np.random.default_rng(config.rng_seed)
    bound = 0.5 / config.dim
    syn0 = rng.uniform(-bound, bound, size=(len(vocab), config.dim))
    syn1 = np.zeros((len(vocab), config.dim))
    return EmbeddingModel(vocab, syn0, syn1)


def sgns_pair_loss_and_grads(model, center, context, negatives):
    """Negative-sampling loss of one (center, context) pair and its gradients.

    Returns ``(loss, grads)`` where ``grads["input"]`` maps the center row to
    its gradient and ``grads["output"]`` maps each touched output row to its
    gradient. Repeated negatives accumulate.
    """
    v = np.asarray(model.input_vectors[center], dtype=np.float64)
    syn1 = model.output_vectors
    targets = [context, *negatives]
    labels = np.array([1.0] + [0.0] * len(negatives))
    rows = np.asarray(syn1[targets], dtype=np.float64)
    dots = rows @ v
    # -log sigma(x) for the positive, -log sigma(-x) for negatives
    signs = 2.0 * labels - 1.0
    loss = float(np.sum(np.logaddexp(0.0, -signs * dots)))
    coeff = 1.0 / (1.0 + np.exp(-dots)) - labels  # d loss / d dot
    grad_center = coeff @ rows
    output = {}
    for t, c in zip(targets, coeff):
        output[t] = output.get(t, 0.0) + c * v
    return loss, {"input": {center: grad_center}, "output": output}


def negative_cdf(counts, power=NEGATIVE_POWER):
    """Cumulative distribution of the smoothed unigram noise distribution."""
    weights = np.asarray(counts, dtype=np.float64) ** power
    if weights.sum() <= 0:
        weights = np.ones_like(weights)
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0
    return cdf


def draw_negatives(cdf, n, seed):
    """Draw ``n`` indices from ``cdf`` with the trainer's own sampler."""
    return _kernels.draw_many(cdf, n, _kernels.seed_state(seed))


def _keep_probabilities(counts, threshold):
    counts = np.asarray(counts, dtype=np.float64)
    if threshold <= 0:
        return np.ones_like(counts)
    scaled = threshold * counts.sum()
    keep = (np.sqrt(counts / scaled) + 1.0) * scaled / np.maximum(counts, 1.0)
    return np.minimum(keep, 1.0)


def _encoded_chunks(sentences, vocab, chunk_tokens=CHUNK_TOKENS):
    tokens, bounds = [], [0]
    lookup = vocab.get
    for sentence in sentences:
        ids = [i for i in map(lookup, sentence) if i is not None]
        if not ids:
            continue
        tokens.extend(ids)
        bounds.append(len(tokens))
        if len(tokens) >= chunk_tokens:
            yield np.array(tokens, dtype=np.int64), np.array(bounds, dtype=np.int64)
            tokens, bounds = [], [0]
    if tokens:
        yield np.array(tokens, dtype=np.int64), np.array(bounds, dtype=np.int64)


def train(model, sentences, config):
    """Run ``config.epochs`` passes of skip-gram negative sampling in place.

    ``sentences`` must be re-iterable; it is traversed once per epoch. Tokens
    missing from the vocabulary are skipped. With one worker the result is a
    deterministic function of the model, the corpus and ``config.rng_seed``.
    """
    if config.epochs == 0:
        return model
    vocab = model.vocab
    if model.dim != config.dim:
        raise ParameterError(f"model dim {model.dim} != config dim {config.dim}")
    cdf = negative_cdf(vocab.counts)
    keep = _keep_probabilities(vocab.counts, config.subsample_threshold)
    corpus_tokens = int(vocab.counts.sum())
    total = float(max(corpus_tokens, 1) * config.epochs)
    progress = np.zeros(1, dtype=np.int64)
    states = [_kernels.seed_state(config.rng_seed, w) for w in range(config.workers)]
    syn0, syn1 = model.input_vectors, model.output_vectors

    def run(chunk, state):
        tokens, bounds = chunk
        _kernels.train_chunk(
            syn0, syn1, tokens, bounds, keep, cdf,
            config.window, config.negatives, config.initial_lr,
            progress, total, state,
        )

    for epoch in range(config.epochs):
        if config.workers == 1:
            for chunk in _encoded_chunks(sentences, vocab):
                run(chunk, states[0])
        else:
            _run_workers(run, _encoded_chunks(sentences, vocab), states)
        log.info("epoch %d/%d done, %d center tokens processed", epoch + 1, config.epochs, int(progress[0]))
    return model


def _run_workers(run, chunks, states):
    """Feed chunks round-robin to one thread per worker state."""
    queues = [queue.Queue(maxsize=2) for _ in states]
    errors = []

    def worker(q, state):
        while True:
            chunk = q.get()
            if chunk is None:
                return
            try:
                run(chunk, state)
            except Exception as exc:  # surfaced after join
                errors.append(exc)

    threads = [threading.Thread(target=worker, args=(q, s), daemon=True) for q, s in zip(queues, states)]
    for t in threads:
        t.start()
    try:
        for i, chunk in enumerate(chunks):
            queues[i % len(queues)].put(chunk)
    finally:
        for q in queues:
            q.put(None)
        for t in threads:
            t.join()
    if errors:
        raise errors[0]


def save_model(model, path):
    """Write input vectors in word2vec text format."""
    vectors = model.input_vectors
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{vectors.shape[0]} {vectors.shape[1]}\n")
        for word, row in zip(model.vocab.words, vectors):
            handle.write(word + " " + " ".join(format(x, ".9g") for x in row) + "\n")


def load_model(path):
    """Read a word2vec text file; output vectors come back as zeros."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise FormatError("header must be 'V D'", line=1, path=path)
        try:
            n_rows, dim = int(header[0]), int(header[1])
        except ValueError:
            raise FormatError("header must be two integers 'V D'", line=1, path=path) from None
        if n_rows < 1 or dim < 1:
            raise FormatError("header counts must be positive", line=1, path=path)
        words = []
        vectors = np.empty((n_rows, dim))
        line_no = 1
        for line in handle:
            line_no += 1
            parts = line.split()
            if not parts:
                continue
            if len(words) == n_rows:
                raise FormatError(f"more than {n_rows} rows", line=line_no, path=path)
            if len(parts) != dim + 1:
                raise FormatError(f"expected {dim} values, found {len(parts) - 1}", line=line_no, path=path)
            try:
                row = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise FormatError("non-numeric vector entry", line=line_no, path=path) from None
            if not np.all(np.isfinite(row)):
                raise FormatError("non-finite vector entry", line=line_no, path=path)
            vectors[len(words)] = row
            words.append(parts[0])
        if len(words) != n_rows:
            raise FormatError(f"expected {n_rows} rows, found {len(words)}", line=line_no + 1, path=path)
    if len(set(words)) != len(words):
        raise FormatError("duplicate word rows", path=path)
    vocab = Vocabulary(words, np.zeros(n_rows, dtype=np.int64), total_tokens=0, min_count=0)
    return EmbeddingModel(vocab, vectors, np.zeros_like(vectors))
