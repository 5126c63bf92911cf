"""Group the vocabulary with spherical k-means and turn notes into cluster features.

Run with ``python demos/04_word_clusters.py``.
"""

from collections import Counter

from notevec.embedding import TrainConfig, build_vocab, init_model, train
from notevec.features import cluster_affinities, cluster_percentages
from notevec.synth import TopicSpec, gen_topic_corpus
from notevec.vecops import build_sim_table, cluster_model, cluster_representatives

sentences, topics = gen_topic_corpus(TopicSpec(n_topics=3, words_per_topic=20, n_sentences=4000, rng_seed=4))
config = TrainConfig(dim=16, window=5, min_count=5, epochs=10, rng_seed=1)
model = train(init_model(build_vocab(sentences, config.min_count), config), sentences, config)

clusters = cluster_model(model, k=4, rng_seed=0)
print("objective by iteration:", [round(v, 2) for v in clusters.objective_history])
for c in range(1, clusters.k + 1):
    members = clusters.members(c)
    makeup = Counter(topics[w] for w in members)
    print(f"cluster {c}: {len(members):3d} words  {dict(makeup)}  e.g. {[w for w, _ in cluster_representatives(model, clusters, c, 3)]}")

sims = build_sim_table(model, clusters)
note = sentences[0] + ["unknownword"]
print("\nnote:", " ".join(note))
print("percentages:", cluster_percentages(note, clusters).round(3))
print("affinities: ", cluster_affinities(note, clusters, sims).round(3))
