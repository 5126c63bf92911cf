"""Train word vectors on a synthetic two-topic corpus and look at neighbours.

Run with ``python demos/02_training_vectors.py``. Takes a few seconds, most
of it spent compiling the training kernel on first use.
"""

import numpy as np

from notevec.embedding import TrainConfig, build_vocab, init_model, train
from notevec.synth import TopicSpec, gen_topic_corpus
from notevec.vecops import most_similar

sentences, topics = gen_topic_corpus(TopicSpec(n_sentences=5000, rng_seed=0))
config = TrainConfig(dim=16, window=5, min_count=5, epochs=10, rng_seed=1)
vocab = build_vocab(sentences, config.min_count)
model = train(init_model(vocab, config), sentences, config)
print(f"{len(vocab)} words, {vocab.total_tokens} tokens")

for word in [w for w, t in topics.items() if t == "topic1"][:2]:
    print(f"\nnearest to {word!r} ({topics[word]}):")
    for neighbor, score in most_similar(model, word, topn=5):
        print(f"  {neighbor:12s} {score:.3f}  {topics[neighbor]}")

# Fraction of topic words whose nearest neighbour shares their topic.
unit = model.input_vectors / np.linalg.norm(model.input_vectors, axis=1, keepdims=True)
sims = unit @ unit.T
np.fill_diagonal(sims, -np.inf)
rows = [i for i, w in enumerate(vocab.words) if topics[w] != "shared"]
same = np.mean([topics[vocab.words[sims[i].argmax()]] == topics[vocab.words[i]] for i in rows])
print(f"\nsame-topic nearest neighbour: {same:.1%}")
