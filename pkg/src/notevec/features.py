"""Note-level features from seed bags and word clusters, aggregated per encounter."""

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError, SchemaError

log = logging.getLogger(__name__)

MODES = ("bags", "percentage", "affinity")


@dataclass
class FeatureTable:
    """Rows keyed by unique encounter id; missing values are NaN."""

    ids: list
    columns: list
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(len(self.ids), len(self.columns))
        if len(set(self.ids)) != len(self.ids):
            raise SchemaError("duplicate encounter ids in feature table")
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("duplicate column names in feature table")

    def __len__(self):
        return len(self.ids)

    def row(self, encounter_id):
        return dict(zip(self.columns, self.values[self.ids.index(encounter_id)]))

    def column(self, name):
        return self.values[:, self.columns.index(name)]

    def select(self, columns):
        at = [self.columns.index(c) for c in columns]
        return FeatureTable(list(self.ids), list(columns), self.values[:, at])

    def merge(self, other):
        """Outer join on encounter id; absent cells become NaN."""
        overlap = set(self.columns) & set(other.columns)
        if overlap:
            raise SchemaError(f"columns present in both tables: {sorted(overlap)}")
        known = set(self.ids)
        ids = list(self.ids) + [i for i in other.ids if i not in known]
        where = {e: n for n, e in enumerate(ids)}
        values = np.full((len(ids), len(self.columns) + len(other.columns)), np.nan)
        values[[where[e] for e in self.ids], : len(self.columns)] = self.values
        values[[where[e] for e in other.ids], len(self.columns):] = other.values
        return FeatureTable(ids, list(self.columns) + list(other.columns), values)


def bag_score(note_tokens, bag):
    """Sum of squared bag scores over the distinct note words found in the bag."""
    scores = bag.scores()
    return float(sum(scores[w] ** 2 for w in dict.fromkeys(note_tokens) if w in scores))


def aggregate_by_encounter(pairs):
    totals = {}
    for encounter_id, value in pairs:
        totals[encounter_id] = totals.get(encounter_id, 0.0) + value
    return totals


def cluster_percentages(note_tokens, clusters):
    """Share of token occurrences falling in each cluster.

    Out-of-vocabulary tokens count toward the denominator only.
    """
    k = clusters.k
    out = np.zeros(k)
    if not note_tokens:
        return out
    assignment = clusters.assignment
    for word, n in Counter(note_tokens).items():
        c = assignment.get(word)
        if c is not None:
            out[c - 1] += n
    return out / len(note_tokens)


def cluster_affinities(note_tokens, clusters, sims):
    """Per cluster, the sum of squared own-prototype similarities of distinct words."""
    out = np.zeros(clusters.k)
    assignment = clusters.assignment
    for word in dict.fromkeys(note_tokens):  # first-seen order keeps sums reproducible
        c = assignment.get(word)
        if c is None or word not in sims.entries:
            continue
        own, sim = sims.entries[word]
        if own == c:
            out[c - 1] += sim * sim
    return out


def _encounter_order(notes):
    return list(dict.fromkeys(note.encounter_id for note in notes))


def _pooled_tokens(notes):
    pooled = {}
    for note in notes:
        pooled.setdefault(note.encounter_id, []).extend(note.tokens)
    return pooled


def bag_feature_table(notes, bags):
    """One column per distinct seed; per-note scores summed per encounter."""
    unique = {}
    for bag in bags:
        unique.setdefault(bag.seed, bag)
    ids = _encounter_order(notes)
    where = {e: n for n, e in enumerate(ids)}
    values = np.zeros((len(ids), len(unique)))
    for col, bag in enumerate(unique.values()):
        for note in notes:
            values[where[note.encounter_id], col] += bag_score(note.tokens, bag)
    return FeatureTable(ids, list(unique), values)


def cluster_feature_table(notes, clusters, mode="percentage", sims=None, strict_compat=False):
    """Cluster features over each encounter's pooled tokens.

    Encounters without any token get an all-zero row, or are dropped when
    ``strict_compat`` is set; either way the count is logged.
    """
    if mode not in ("percentage", "affinity"):
        raise ParameterError(f"unknown cluster feature mode {mode!r}")
    if mode == "affinity" and sims is None:
        raise ParameterError("affinity mode needs a word-cluster similarity table")
    pooled = _pooled_tokens(notes)
    ids, rows, empty = [], [], 0
    for encounter_id in _encounter_order(notes):
        tokens = pooled[encounter_id]
        if not tokens:
            empty += 1
            if strict_compat:
                continue
        ids.append(encounter_id)
        if mode == "percentage":
            rows.append(cluster_percentages(tokens, clusters))
        else:
            rows.append(cluster_affinities(tokens, clusters, sims))
    if empty:
        action = "dropped" if strict_compat else "given all-zero rows"
        log.warning("%d encounter(s) with no usable tokens %s", empty, action)
    columns = [f"cluster{i}" for i in range(1, clusters.k + 1)]
    values = np.array(rows) if rows else np.zeros((0, clusters.k))
    return FeatureTable(ids, columns, values)


def build_feature_table(notes, extractor, mode=None, sims=None, strict_compat=False):
    """Dispatch on the extractor: a list of seed bags or a cluster model."""
    if isinstance(extractor, (list, tuple)):
        return bag_feature_table(notes, extractor)
    return cluster_feature_table(notes, extractor, mode or "percentage", sims=sims, strict_compat=strict_compat)


def _format(x):
    return "NA" if math.isnan(x) else repr(float(x))


def write_table(table, path, id_header="PAT_ENC_CSN_ID"):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([id_header, *table.columns])
        for encounter_id, row in zip(table.ids, table.values):
            writer.writerow([encounter_id, *(_format(x) for x in row)])


def write_bag_features(table, directory):
    """One ``<seed>.csv`` per column with header ``PAT_ENC_CSN_ID,<seed>``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for column in table.columns:
        path = directory / f"{column}.csv"
        write_table(table.select([column]), path)
        paths.append(path)
    return paths


def write_cluster_features(table, path):
    write_table(table, path, id_header="csn")


def read_table(path):
    """Read a feature CSV whose first column is the encounter id.

    A leading unnamed index column, as R writes by default, is skipped.
    Empty or ``NA`` cells read as NaN.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header:
            raise SchemaError(f"{path}: missing header")
        skip = 1 if header[0] in ("", "X") and len(header) > 2 else 0
        columns = header[skip + 1:]
        ids, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} fields, found {len(row)}", line=line_no, path=path)
            ids.append(row[skip])
            try:
                rows.append([np.nan if c in ("", "NA") else float(c) for c in row[skip + 1:]])
            except ValueError:
                raise FormatError("non-numeric feature value", line=line_no, path=path) from None
    return FeatureTable(ids, columns, np.array(rows) if rows else np.zeros((0, len(columns))))


def read_bag_features(directory):
    """Outer-join every per-seed CSV in ``directory`` (filename order)."""
    table = None
    for path in sorted(Path(directory).glob("*.csv")):
        part = read_table(path)
        table = part if table is None else table.merge(part)
    return table


def read_seeds(path):
    """Seed words, one per line, in file order with duplicates kept."""
    with open(path, encoding="utf-8") as handle:
        return [line.strip() for line in handle if line.strip() and not line.startswith("#")]


def default_seeds_path():
    return Path(__file__).with_name("data") / "default_seeds.txt"
