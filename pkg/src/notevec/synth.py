"""Synthetic corpora and labeled encounters with planted topic structure.

Topic words never overlap, so every emitted token has a known source: one
topic or the shared background vocabulary. Encounter labels depend on the
share of tokens drawn from the first topic, which gives the downstream
pipeline a signal of known strength to recover.
"""

import logging
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .corpus import RawNote, write_notes
from .errors import ParameterError
from .learn import DEFAULT_CUTOFF, LabelRecord, write_labels

log = logging.getLogger(__name__)

SHARED = "shared"
START_DATE = date(2012, 1, 1)
END_DATE = date(2014, 12, 31)

_CONSONANTS = "bcdfghjklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class TopicSpec:
    n_topics: int = 2
    words_per_topic: int = 30
    shared_words: int = 20
    sentence_min: int = 5
    sentence_max: int = 12
    topic_purity: float = 0.8
    n_sentences: int = 5000
    min_count: int = 5
    rng_seed: int = 0

    def validate(self):
        if self.n_topics < 1:
            raise ParameterError("n_topics must be >= 1")
        if self.words_per_topic < 1:
            raise ParameterError("words_per_topic must be >= 1")
        if self.shared_words < 0:
            raise ParameterError("shared_words must be >= 0")
        if self.sentence_min < 1 or self.sentence_max < self.sentence_min:
            raise ParameterError("sentence lengths need 1 <= sentence_min <= sentence_max")
        if not 0.0 < self.topic_purity <= 1.0:
            raise ParameterError("topic_purity must lie in (0, 1]")
        if self.n_sentences < 1:
            raise ParameterError("n_sentences must be >= 1")
        if self.min_count < 1:
            raise ParameterError("min_count must be >= 1")


def topic_name(t):
    return f"topic{t + 1}"


@dataclass
class SynthDataset:
    sentences: list
    topic_map: dict  # word -> "topic<i>" or "shared"
    notes: list  # RawNote
    records: list  # LabelRecord
    signal_share: dict  # encounter id -> share of tokens from topic1
    seeds: list

    def labels(self):
        return {r.encounter_id: r.label for r in self.records}


def _make_words(rng, n):
    words = set()
    ordered = []
    while len(ordered) < n:
        syllables = int(rng.integers(2, 4))
        word = "".join(rng.choice(list(_CONSONANTS)) + rng.choice(list(_VOWELS)) for _ in range(syllables))
        if rng.random() < 0.5:
            word += rng.choice(list(_CONSONANTS))
        if word not in words:
            words.add(word)
            ordered.append(word)
    return ordered


class _Vocab:
    def __init__(self, spec, rng):
        words = _make_words(rng, spec.n_topics * spec.words_per_topic + spec.shared_words)
        w = spec.words_per_topic
        self.topics = [words[t * w:(t + 1) * w] for t in range(spec.n_topics)]
        self.shared = words[spec.n_topics * w:]
        self.topic_map = {word: topic_name(t) for t, ws in enumerate(self.topics) for word in ws}
        self.topic_map.update({word: SHARED for word in self.shared})


def _sentence(rng, spec, vocab, topic):
    length = int(rng.integers(spec.sentence_min, spec.sentence_max + 1))
    words = vocab.topics[topic]
    out = []
    for _ in range(length):
        if vocab.shared and rng.random() >= spec.topic_purity:
            out.append(vocab.shared[int(rng.integers(len(vocab.shared)))])
        else:
            out.append(words[int(rng.integers(len(words)))])
    return out


def _topic_sentences(spec, vocab, rng):
    sentences = []
    counts = dict.fromkeys(vocab.topic_map, 0)
    target = spec.n_sentences
    while True:
        while len(sentences) < target:
            s = _sentence(rng, spec, vocab, int(rng.integers(spec.n_topics)))
            for word in s:
                counts[word] += 1
            sentences.append(s)
        if min(counts.values()) >= spec.min_count:
            return sentences
        target += max(1, spec.n_sentences // 10)


def gen_topic_corpus(spec):
    """Topic-labelled sentences; every vocabulary word reaches ``min_count``."""
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    vocab = _Vocab(spec, rng)
    return _topic_sentences(spec, vocab, rng), dict(vocab.topic_map)


def render_sentence(tokens, rng):
    """Dress tokens up as raw note text: capitals, stray numbers, commas."""
    words = list(tokens)
    words[0] = words[0].capitalize()
    out = []
    for word in words:
        out.append(word)
        roll = rng.random()
        if roll < 0.05:
            out[-1] += ","
        elif roll < 0.08:
            out.append(str(int(rng.integers(1, 200))))
        elif roll < 0.1:
            out.append(f"{int(rng.integers(50, 100))}%")
    return " ".join(out) + rng.choice(list(".;?!"))


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _random_date(rng, start, end):
    return start + timedelta(days=int(rng.integers(0, (end - start).days + 1)))


def gen_labeled_encounters(
    spec,
    n_encounters=500,
    cutoff_fraction=0.8,
    signal_beta=8.0,
    base_share=None,
    cutoff=DEFAULT_CUTOFF,
    notes_per_encounter=(1, 3),
    sentences_per_note=(1, 4),
):
    """Topic corpus plus encounters whose labels track their topic1 share.

    Each encounter draws a mixing weight ``m ~ U(0, 1)``; each of its
    sentences comes from topic1 with probability ``m`` and otherwise from
    another topic. The label is Bernoulli with probability
    ``sigmoid(signal_beta * (share - base_share))`` where ``share`` is the
    realised fraction of topic1 tokens and ``base_share`` defaults to its
    mean over encounters.
    """
    spec.validate()
    if n_encounters < 20:
        raise ParameterError("n_encounters must be >= 20")
    if not 0.0 < cutoff_fraction < 1.0:
        raise ParameterError("cutoff_fraction must lie strictly between 0 and 1")
    lo_notes, hi_notes = notes_per_encounter
    lo_sent, hi_sent = sentences_per_note
    if lo_notes < 1 or hi_notes < lo_notes or lo_sent < 1 or hi_sent < lo_sent:
        raise ParameterError("note and sentence ranges need 1 <= low <= high")
    if not START_DATE < cutoff <= END_DATE:
        raise ParameterError(f"cutoff must fall within {START_DATE}..{END_DATE}")

    rng = np.random.default_rng(spec.rng_seed)
    vocab = _Vocab(spec, rng)
    sentences = _topic_sentences(spec, vocab, rng)
    signal_words = set(vocab.topics[0])

    notes, shares, ids = [], {}, []
    for i in range(n_encounters):
        encounter_id = str(100000 + i)
        ids.append(encounter_id)
        mix = rng.random()
        n_signal = n_total = 0
        for _ in range(int(rng.integers(lo_notes, hi_notes + 1))):
            parts = []
            for _ in range(int(rng.integers(lo_sent, hi_sent + 1))):
                if spec.n_topics == 1 or rng.random() < mix:
                    topic = 0
                else:
                    topic = 1 + int(rng.integers(spec.n_topics - 1))
                tokens = _sentence(rng, spec, vocab, topic)
                n_signal += sum(t in signal_words for t in tokens)
                n_total += len(tokens)
                parts.append(render_sentence(tokens, rng))
            notes.append(RawNote(encounter_id, " ".join(parts)))
        shares[encounter_id] = n_signal / n_total

    base = float(np.mean(list(shares.values()))) if base_share is None else base_share
    n_train = int(round(cutoff_fraction * n_encounters))
    order = rng.permutation(n_encounters)
    is_train = np.zeros(n_encounters, dtype=bool)
    is_train[order[:n_train]] = True

    records = []
    for i, encounter_id in enumerate(ids):
        share = shares[encounter_id]
        label = int(rng.random() < _sigmoid(signal_beta * (share - base)))
        if label:
            lag = int(rng.integers(1, 31))
        else:
            lag = None if rng.random() < 0.6 else int(rng.integers(31, 366))
        if is_train[i]:
            when = _random_date(rng, START_DATE, cutoff - timedelta(days=1))
        else:
            when = _random_date(rng, cutoff, END_DATE)
        lace = float(np.clip(round(8 + 10 * (share - base) + rng.normal(0, 3)), 0, 19))
        records.append(LabelRecord(encounter_id, lag, when, lace))

    seeds = [ws[0] for ws in vocab.topics]
    return SynthDataset(sentences, dict(vocab.topic_map), notes, records, shares, seeds)


def write_corpus(sentences, corpus_dir, rng_seed=0, n_files=2):
    """Render sentences as raw text, a few per line, across ``n_files`` files."""
    corpus_dir = Path(corpus_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(rng_seed)
    per_file = -(-len(sentences) // n_files)
    paths = []
    for f in range(n_files):
        chunk = sentences[f * per_file:(f + 1) * per_file]
        path = corpus_dir / f"corpus_{f:03d}.txt"
        with open(path, "w", encoding="utf-8") as handle:
            at = 0
            while at < len(chunk):
                take = int(rng.integers(1, 5))
                handle.write(" ".join(render_sentence(s, rng) for s in chunk[at:at + take]) + "\n")
                at += take
        paths.append(path)
    return paths


def write_dataset(dataset, corpus_dir, notes_csv, labels_csv, seeds_file=None, rng_seed=0):
    write_corpus(dataset.sentences, corpus_dir, rng_seed=rng_seed)
    Path(notes_csv).parent.mkdir(parents=True, exist_ok=True)
    write_notes(dataset.notes, notes_csv)
    Path(labels_csv).parent.mkdir(parents=True, exist_ok=True)
    write_labels(dataset.records, labels_csv)
    if seeds_file is not None:
        Path(seeds_file).parent.mkdir(parents=True, exist_ok=True)
        Path(seeds_file).write_text("\n".join(dataset.seeds) + "\n", encoding="utf-8")
