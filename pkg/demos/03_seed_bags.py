"""Expand seed words into scored bags and score notes against them.

Run with ``python demos/03_seed_bags.py``.
"""

from notevec.corpus import tokenize
from notevec.embedding import TrainConfig, build_vocab, init_model, train
from notevec.features import bag_score
from notevec.synth import TopicSpec, gen_topic_corpus
from notevec.vecops import build_seed_bag

sentences, topics = gen_topic_corpus(TopicSpec(n_sentences=3000, rng_seed=2))
config = TrainConfig(dim=16, window=5, min_count=5, epochs=10, rng_seed=1)
model = train(init_model(build_vocab(sentences, config.min_count), config), sentences, config)

seed = next(w for w, t in topics.items() if t == "topic1")
bag = build_seed_bag(model, seed, topn=8)
print(f"bag for {seed!r}:")
for word, score in bag.entries:
    print(f"  {word:12s} {score:+.3f}")

# A note scores the squared closeness of every distinct bag word it mentions.
on_topic = " ".join(w for w, _ in bag.entries[:4])
off_topic = " ".join(w for w, t in topics.items() if t == "topic2")
for label, text in [("on topic", on_topic), ("off topic", off_topic), ("repeated", on_topic + " " + on_topic)]:
    print(f"{label:10s} score {bag_score(tokenize(text), bag):.3f}")
