"""Cosine queries, seed bags and spherical k-means over embedding rows."""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, FormatError, ParameterError, SchemaError

log = logging.getLogger(__name__)


@dataclass
class SeedBag:
    seed: str
    entries: list  # [(word, score)], seed first with score 1.0

    @property
    def words(self):
        return [w for w, _ in self.entries]

    def scores(self):
        """Word to score map; the first occurrence of a word wins."""
        out = {}
        for word, score in self.entries:
            out.setdefault(word, score)
        return out

    def __len__(self):
        return len(self.entries)


@dataclass
class ClusterModel:
    """Unit-length prototypes plus a word to cluster-id (1-based) map.

    ``prototypes`` is None when only the assignment was read back from a
    clusters CSV; ``k`` then falls back to the largest cluster id.
    """

    prototypes: np.ndarray
    assignment: dict
    objective_history: list = field(default_factory=list)

    @property
    def k(self):
        if self.prototypes is not None:
            return self.prototypes.shape[0]
        return max(self.assignment.values(), default=0)

    def members(self, cluster_id):
        return [w for w, c in self.assignment.items() if c == cluster_id]


@dataclass
class WordClusterSimTable:
    entries: dict  # word -> (cluster id, similarity to own prototype)

    def __len__(self):
        return len(self.entries)

    def cluster(self, word):
        return self.entries[word][0]

    def similarity(self, word):
        return self.entries[word][1]


def cosine_similarity(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise DomainError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(x, y) / (nx * ny), -1.0, 1.0))


def unit_rows(vectors):
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise DomainError(f"row {bad} is a zero vector")
    return vectors / norms[:, None]


def validate_nonzero(model):
    """Reject models containing zero rows, naming the first offending word."""
    norms = np.linalg.norm(model.input_vectors, axis=1)
    if np.any(norms == 0):
        raise DomainError(f"zero vector for word {model.vocab.word(int(np.flatnonzero(norms == 0)[0]))!r}")


def most_similar(model, word, topn=10):
    """Top ``topn`` words by cosine to ``word``, ties broken by vocabulary index."""
    if topn < 1:
        raise ParameterError("topn must be >= 1")
    query = model.vocab.index(word)
    vectors = model.input_vectors
    norms = np.linalg.norm(vectors, axis=1)
    if norms[query] == 0:
        raise DomainError(f"zero vector for word {word!r}")
    safe = np.where(norms == 0, 1.0, norms)
    sims = np.clip(vectors @ vectors[query] / (safe * norms[query]), -1.0, 1.0)
    order = np.lexsort((np.arange(len(sims)), -sims))
    order = order[order != query][:topn]
    return [(model.vocab.word(i), float(sims[i])) for i in order]


def build_seed_bag(model, seed, topn=200):
    return SeedBag(seed, [(seed, 1.0)] + most_similar(model, seed, topn))


def write_seed_bag(bag, path):
    """Headerless ``word,score`` rows for the neighbors; the seed row is implied."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        for word, score in bag.entries[1:]:
            writer.writerow([word, repr(float(score))])


def read_seed_bag(path, topn=200, seed=None):
    """Read a seed-bag CSV; the seed defaults to the file stem and gets score 1."""
    path = Path(path)
    seed = seed if seed is not None else path.stem
    entries = [(seed, 1.0)]
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if len(entries) > topn:
                break
            if len(row) != 2:
                raise FormatError("expected 'word,score'", line=line_no, path=path)
            try:
                entries.append((row[0], float(row[1])))
            except ValueError:
                raise FormatError("score is not a number", line=line_no, path=path) from None
    return SeedBag(seed, entries)


def _kmeanspp(unit, k, rng):
    n = unit.shape[0]
    chosen = [int(rng.integers(n))]
    best = unit @ unit[chosen[0]]
    for _ in range(1, k):
        dist = np.clip(1.0 - best, 0.0, None)
        dist[chosen] = 0.0
        total = dist.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=dist / total))
        else:
            remaining = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(remaining))
        chosen.append(nxt)
        best = np.maximum(best, unit @ unit[nxt])
    return unit[chosen].copy()


def _repair_empty(unit, labels, prototypes, k):
    """Give each empty cluster the worst-fitting point of a cluster with spares."""
    labels = labels.copy()
    for c in range(k):
        sizes = np.bincount(labels, minlength=k)
        if sizes[c] > 0:
            continue
        fit = np.einsum("ij,ij->i", unit, prototypes[labels])
        fit[sizes[labels] <= 1] = np.inf
        victim = int(np.argmin(fit))
        labels[victim] = c
    return labels


def _prototypes(unit, labels, k, previous):
    sums = np.zeros((k, unit.shape[1]))
    np.add.at(sums, labels, unit)
    norms = np.linalg.norm(sums, axis=1)
    protos = previous.copy()
    ok = norms > 0
    protos[ok] = sums[ok] / norms[ok, None]
    return protos


def objective(unit, labels, prototypes):
    return float(np.einsum("ij,ij->", unit, prototypes[labels]))


def spherical_kmeans(vectors, k, rng_seed=0, max_iter=100, tol=1e-10, words=None):
    """Cluster rows by cosine similarity.

    Returns a ``ClusterModel`` whose assignment keys are ``words`` (row
    indices when omitted) and whose ``objective_history`` lists the total
    cosine to own prototype after every prototype update.
    """
    unit = unit_rows(vectors)
    n = unit.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} must be between 1 and the number of vectors ({n})")
    if words is None:
        words = list(range(n))
    rng = np.random.default_rng(rng_seed)
    protos = _kmeanspp(unit, k, rng)
    labels = np.argmax(unit @ protos.T, axis=1)
    labels = _repair_empty(unit, labels, protos, k)
    history = []
    for _ in range(max_iter):
        protos = _prototypes(unit, labels, k, protos)
        history.append(objective(unit, labels, protos))
        new_labels = np.argmax(unit @ protos.T, axis=1)
        if np.array_equal(new_labels, labels):
            break
        new_labels = _repair_empty(unit, new_labels, protos, k)
        improved = objective(unit, new_labels, _prototypes(unit, new_labels, k, protos)) - history[-1]
        labels = new_labels
        if improved < tol:
            protos = _prototypes(unit, labels, k, protos)
            history.append(objective(unit, labels, protos))
            break
    else:
        protos = _prototypes(unit, labels, k, protos)
        history.append(objective(unit, labels, protos))
    assignment = {w: int(c) + 1 for w, c in zip(words, labels)}
    return ClusterModel(protos, assignment, history)


def cluster_model(model, k, rng_seed=0, max_iter=100, tol=1e-10):
    """Spherical k-means over an embedding model's input vectors."""
    validate_nonzero(model)
    if k > len(model.vocab):
        raise ParameterError(f"k={k} exceeds vocabulary size {len(model.vocab)}")
    return spherical_kmeans(model.input_vectors, k, rng_seed, max_iter, tol, words=model.vocab.words)


def _check_cluster(clusters, cluster_id):
    if not 1 <= cluster_id <= clusters.k:
        raise ParameterError(f"cluster id {cluster_id} outside 1..{clusters.k}")


def cluster_similarity(model, clusters, cluster_id, word):
    _check_cluster(clusters, cluster_id)
    return cosine_similarity(model.vector(word), clusters.prototypes[cluster_id - 1])


def cluster_representatives(model, clusters, cluster_id, n=6):
    _check_cluster(clusters, cluster_id)
    members = [w for w in model.vocab.words if clusters.assignment.get(w) == cluster_id]
    scored = [(w, cluster_similarity(model, clusters, cluster_id, w)) for w in members]
    scored.sort(key=lambda ws: -ws[1])
    return scored[:n]


def build_sim_table(model, clusters):
    entries = {}
    for word in model.vocab.words:
        c = clusters.assignment[word]
        entries[word] = (c, cluster_similarity(model, clusters, c, word))
    return WordClusterSimTable(entries)


def write_clusters(clusters, path, words=None):
    words = words if words is not None else list(clusters.assignment)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["word", "cluster"])
        for word in words:
            writer.writerow([word, clusters.assignment[word]])


def read_clusters(path):
    """Read ``word,cluster`` rows into a prototype-free ``ClusterModel``.

    A leading unnamed row-index column, as written by R, is ignored.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or "word" not in header or "cluster" not in header:
            raise SchemaError(f"{path}: expected columns word,cluster")
        w_at, c_at = header.index("word"), header.index("cluster")
        assignment = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                assignment[row[w_at]] = int(row[c_at])
            except (ValueError, IndexError):
                raise FormatError("bad cluster row", line=line_no, path=path) from None
    return ClusterModel(None, assignment)


def write_sim_table(table, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["word", "cluster", "similarity"])
        for word, (c, sim) in table.entries.items():
            writer.writerow([word, c, repr(float(sim))])


def read_sim_table(path):
    """Read the flat ``word,cluster,similarity`` table or the sparse k-column one.

    The sparse layout has a ``word`` column plus ``cluster<i>Sim`` columns that
    are zero except at the word's own cluster; the cluster is recovered as the
    single nonzero column (or column 1 when all are zero).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or "word" not in header:
            raise SchemaError(f"{path}: expected a word column")
        w_at = header.index("word")
        entries = {}
        if "cluster" in header and "similarity" in header:
            c_at, s_at = header.index("cluster"), header.index("similarity")
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    entries[row[w_at]] = (int(row[c_at]), float(row[s_at]))
                except (ValueError, IndexError):
                    raise FormatError("bad similarity row", line=line_no, path=path) from None
            return WordClusterSimTable(entries)
        sim_cols = []
        for i, name in enumerate(header):
            if name.startswith("cluster") and name.endswith("Sim"):
                try:
                    sim_cols.append((int(name[len("cluster"):-len("Sim")]), i))
                except ValueError:
                    continue
        if not sim_cols:
            raise SchemaError(f"{path}: expected word,cluster,similarity or cluster<i>Sim columns")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values = [(cid, float(row[i])) for cid, i in sim_cols]
            except (ValueError, IndexError):
                raise FormatError("bad similarity row", line=line_no, path=path) from None
            nonzero = [(cid, v) for cid, v in values if v != 0.0]
            if len(nonzero) > 1:
                raise FormatError("more than one nonzero cluster similarity", line=line_no, path=path)
            entries[row[w_at]] = nonzero[0] if nonzero else (values[0][0], 0.0)
    return WordClusterSimTable(entries)
