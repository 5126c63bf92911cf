from collections import Counter
from datetime import date

import numpy as np
import pytest

from notevec.corpus import clean_notes, load_notes, stream_corpus
from notevec.errors import ParameterError
from notevec.features import FeatureTable
from notevec.learn import DEFAULT_CUTOFF, evaluate_pipeline, load_labels
from notevec.synth import SHARED, TopicSpec, gen_labeled_encounters, gen_topic_corpus, write_dataset

SMALL = TopicSpec(words_per_topic=10, shared_words=5, n_sentences=400, min_count=5, rng_seed=3)


class TestTopicCorpus:
    def test_deterministic(self):
        assert gen_topic_corpus(SMALL) == gen_topic_corpus(SMALL)
        other = gen_topic_corpus(TopicSpec(words_per_topic=10, shared_words=5, n_sentences=400, rng_seed=4))
        assert other != gen_topic_corpus(SMALL)

    def test_ground_truth_partition(self):
        sentences, topics = gen_topic_corpus(SMALL)
        labels = Counter(topics.values())
        assert labels == {"topic1": 10, "topic2": 10, SHARED: 5}
        assert {w for s in sentences for w in s} <= set(topics)

    def test_pure_topics_are_monotopic(self):
        spec = TopicSpec(n_topics=3, words_per_topic=8, shared_words=0, topic_purity=1.0, n_sentences=300)
        sentences, topics = gen_topic_corpus(spec)
        for s in sentences:
            assert len({topics[w] for w in s}) == 1

    def test_sentence_lengths(self):
        sentences, _ = gen_topic_corpus(SMALL)
        assert min(map(len, sentences)) >= SMALL.sentence_min
        assert max(map(len, sentences)) <= SMALL.sentence_max

    @pytest.mark.parametrize("min_count", [1, 40, 200])
    def test_min_count_guarantee(self, min_count):
        spec = TopicSpec(words_per_topic=10, shared_words=5, n_sentences=50, min_count=min_count, rng_seed=1)
        sentences, topics = gen_topic_corpus(spec)
        counts = Counter(w for s in sentences for w in s)
        assert min(counts[w] for w in topics) >= min_count

    @pytest.mark.parametrize(
        "field,value",
        [("n_topics", 0), ("words_per_topic", 0), ("sentence_min", 0), ("topic_purity", 0.0), ("topic_purity", 1.5)],
    )
    def test_infeasible_spec(self, field, value):
        with pytest.raises(ParameterError):
            gen_topic_corpus(TopicSpec(**{field: value}))


class TestEncounters:
    def test_deterministic(self):
        a = gen_labeled_encounters(SMALL, n_encounters=60)
        b = gen_labeled_encounters(SMALL, n_encounters=60)
        assert a.notes == b.notes and a.records == b.records

    def test_train_fraction_and_date_sides(self):
        data = gen_labeled_encounters(SMALL, n_encounters=100, cutoff_fraction=0.8)
        train = [r for r in data.records if r.discharge_date < DEFAULT_CUTOFF]
        assert len(train) == 80
        assert len(data.records) == 100

    def test_notes_per_encounter(self):
        data = gen_labeled_encounters(SMALL, n_encounters=200)
        per = Counter(n.encounter_id for n in data.notes)
        assert set(per.values()) <= {1, 2, 3}
        assert len(set(per.values())) > 1
        assert set(per) == {r.encounter_id for r in data.records}

    def test_shares_match_clean_tokens(self):
        data = gen_labeled_encounters(SMALL, n_encounters=40)
        topic1 = {w for w, t in data.topic_map.items() if t == "topic1"}
        pooled = {}
        for note in clean_notes(data.notes):
            pooled.setdefault(note.encounter_id, []).extend(note.tokens)
        for eid, tokens in pooled.items():
            assert sum(t in topic1 for t in tokens) / len(tokens) == pytest.approx(data.signal_share[eid])

    def test_null_label_rate(self):
        base = 0.5
        data = gen_labeled_encounters(SMALL, n_encounters=2000, signal_beta=0.0)
        rate = np.mean([r.label for r in data.records])
        assert abs(rate - base) <= 3 * np.sqrt(base * (1 - base) / 2000)

    @pytest.mark.parametrize("kwargs", [{"n_encounters": 19}, {"cutoff_fraction": 1.0}, {"cutoff": date(2020, 1, 1)}])
    def test_parameter_errors(self, kwargs):
        with pytest.raises(ParameterError):
            gen_labeled_encounters(SMALL, **kwargs)

    def test_signal_monotonicity(self):
        means = []
        for beta in (0.0, 4.0, 12.0):
            aucs = []
            for seed in range(5):
                spec = TopicSpec(words_per_topic=10, shared_words=5, n_sentences=200, rng_seed=seed)
                data = gen_labeled_encounters(spec, n_encounters=300, cutoff_fraction=0.5, signal_beta=beta)
                ids = [r.encounter_id for r in data.records]
                table = FeatureTable(ids, ["share"], [[data.signal_share[e]] for e in ids])
                aucs.append(evaluate_pipeline(table, data.records, rounds=20).auc)
            means.append(np.mean(aucs))
        assert means[0] <= means[1] <= means[2]

    def test_files_round_trip(self, tmp_path):
        data = gen_labeled_encounters(SMALL, n_encounters=30)
        write_dataset(data, tmp_path / "corpus", tmp_path / "notes.csv", tmp_path / "labels.csv", tmp_path / "seeds.txt")
        assert load_notes(tmp_path / "notes.csv") == data.notes
        assert load_labels(tmp_path / "labels.csv") == data.records
        assert (tmp_path / "seeds.txt").read_text().split() == data.seeds
        streamed = list(stream_corpus(tmp_path / "corpus"))
        assert streamed == data.sentences
