"""Readmission labels, date split, AdaBoost over decision stumps, and ROC AUC."""

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .errors import (
    EmptyPartitionError,
    FormatError,
    ParameterError,
    SchemaError,
    TrainingError,
    UndefinedAucError,
)
from .features import FeatureTable

log = logging.getLogger(__name__)

DEFAULT_CUTOFF = date(2014, 7, 1)
EPS_FLOOR = 1e-10
# weighted errors closer than this are ties, resolved by feature, threshold, polarity order
TIE_TOLERANCE = 1e-12

LABEL_COLUMNS = ("PAT_ENC_CSN_ID", "READMITLAG", "DISCHARGEDATE", "LACE")


@dataclass(frozen=True)
class LabelRecord:
    encounter_id: str
    readmit_lag: int | None
    discharge_date: date
    lace: float | None = None

    @property
    def label(self):
        return label_readmission(self.readmit_lag)


@dataclass(frozen=True)
class Stump:
    feature: str
    threshold: float
    polarity: int
    alpha: float

    def vote(self, x):
        """+polarity where ``x > threshold``, -polarity elsewhere."""
        return np.where(np.asarray(x) > self.threshold, self.polarity, -self.polarity)


@dataclass
class BoostModel:
    feature_names: list
    rounds: int
    stumps: list = field(default_factory=list)
    errors: list = field(default_factory=list)  # weighted error of each kept round


@dataclass(frozen=True)
class AucResult:
    auc: float
    positives: int
    negatives: int


def label_readmission(lag_days):
    """1 when the readmission lag is between 1 and 30 days inclusive."""
    if lag_days is None or (isinstance(lag_days, float) and math.isnan(lag_days)):
        return 0
    return 1 if 1 <= lag_days <= 30 else 0


def split_by_date(rows, cutoff=DEFAULT_CUTOFF):
    """Rows discharged before ``cutoff`` train; the rest test."""
    train = [r for r in rows if r.discharge_date < cutoff]
    test = [r for r in rows if r.discharge_date >= cutoff]
    if not train:
        raise EmptyPartitionError(f"no rows discharged before {cutoff.isoformat()}")
    if not test:
        raise EmptyPartitionError(f"no rows discharged on or after {cutoff.isoformat()}")
    return train, test


def _stump_errors(x, y, w):
    """Weighted errors for every candidate threshold of one feature.

    Returns ``(thresholds, errors)`` with ``errors[:, 0]`` for polarity +1 and
    ``errors[:, 1]`` for polarity -1. Thresholds are -inf, the midpoints of
    consecutive distinct values, and +inf.
    """
    values, inverse = np.unique(x, return_inverse=True)
    pos = np.bincount(inverse, weights=w * (y > 0), minlength=len(values))
    neg = np.bincount(inverse, weights=w * (y < 0), minlength=len(values))
    pos_le = np.concatenate([[0.0], np.cumsum(pos)])
    neg_le = np.concatenate([[0.0], np.cumsum(neg)])
    neg_total = neg_le[-1]
    # polarity +1 predicts +1 above the threshold
    err_plus = pos_le + (neg_total - neg_le)
    err_minus = w.sum() - err_plus
    mids = (values[:-1] + values[1:]) / 2.0
    thresholds = np.concatenate([[-np.inf], mids, [np.inf]])
    return thresholds, np.column_stack([err_plus, err_minus])


def best_stump(X, y, w, feature_names):
    """Lowest-error stump; near-ties go to the earliest feature, threshold, polarity."""
    candidates = []
    for j in range(X.shape[1]):
        thresholds, errors = _stump_errors(X[:, j], y, w)
        flat = errors.ravel()
        at = int(np.argmin(flat))
        candidates.append((flat, thresholds, at))
    best_error = min(flat[at] for flat, _, at in candidates)
    for j, (flat, thresholds, _) in enumerate(candidates):
        hits = np.flatnonzero(flat <= best_error + TIE_TOLERANCE)
        if len(hits):
            at = int(hits[0])
            polarity = 1 if at % 2 == 0 else -1
            return feature_names[j], float(thresholds[at // 2]), polarity, float(flat[at])
    raise AssertionError("unreachable")


def train_adaboost(X, y, rounds=100, feature_names=None):
    """Discrete AdaBoost over decision stumps.

    ``y`` holds 0/1 labels. Training stops early when no stump beats chance
    or when a stump classifies the weighted sample perfectly.
    """
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y01 = np.asarray(y)
    if X.shape[0] != y01.shape[0]:
        raise ParameterError("feature rows and labels differ in length")
    if np.any(np.isnan(X)):
        raise SchemaError("training features contain missing values")
    classes = set(np.unique(y01).tolist())
    if not classes <= {0, 1}:
        raise TrainingError("labels must be 0 or 1")
    if len(classes) < 2:
        raise TrainingError("training data holds a single class")
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(X.shape[1])]
    feature_names = list(feature_names)
    column = {name: j for j, name in enumerate(feature_names)}
    y = np.where(y01 == 1, 1.0, -1.0)
    w = np.full(len(y), 1.0 / len(y))
    model = BoostModel(feature_names, rounds)
    for _ in range(rounds):
        feature, threshold, polarity, eps = best_stump(X, y, w, feature_names)
        if eps >= 0.5:
            break
        clamped = min(max(eps, EPS_FLOOR), 1.0 - EPS_FLOOR)
        alpha = 0.5 * math.log((1.0 - clamped) / clamped)
        stump = Stump(feature, threshold, polarity, alpha)
        model.stumps.append(stump)
        model.errors.append(eps)
        h = stump.vote(X[:, column[feature]])
        w = w * np.exp(-alpha * y * h)
        w /= w.sum()
        if eps <= EPS_FLOOR:
            break
    return model


def _matrix(model, features):
    if isinstance(features, FeatureTable):
        missing = [f for f in model.feature_names if f not in features.columns]
        if missing:
            raise SchemaError(f"missing features: {missing}")
        X = features.select(model.feature_names).values
    else:
        X = np.asarray(features, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[1] != len(model.feature_names):
            raise SchemaError(f"expected {len(model.feature_names)} feature columns, got {X.shape[1]}")
    if np.any(np.isnan(X)):
        raise SchemaError("missing feature values at prediction time")
    return X


def predict_margin(model, features):
    X = _matrix(model, features)
    column = {name: j for j, name in enumerate(model.feature_names)}
    margin = np.zeros(X.shape[0])
    for stump in model.stumps:
        margin += stump.alpha * stump.vote(X[:, column[stump.feature]])
    return margin


def predict_score(model, features):
    """Probability-like score ``1 / (1 + exp(-2 * margin))``."""
    return expit(2.0 * predict_margin(model, features))


def roc_auc(scores, labels):
    """Mann-Whitney AUC with ties counted as one half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    positives = int(np.sum(labels == 1))
    negatives = int(np.sum(labels == 0))
    if positives + negatives != len(labels):
        raise ParameterError("labels must be 0 or 1")
    if positives == 0 or negatives == 0:
        raise UndefinedAucError("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    u = ranks[labels == 1].sum() - positives * (positives + 1) / 2.0
    return AucResult(float(u / (positives * negatives)), positives, negatives)


def _parse_optional(value, cast, what, line_no, path):
    value = value.strip()
    if value in ("", "NA"):
        return None
    try:
        return cast(value)
    except ValueError:
        raise FormatError(f"bad {what} value {value!r}", line=line_no, path=path) from None


def load_labels(path):
    """Read the labels CSV; ``LACE`` may be absent or blank."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = [h.strip().lstrip("\ufeff") for h in next(reader, [])]
        for column in LABEL_COLUMNS[:3]:
            if column not in header:
                raise SchemaError(f"{path}: missing required column {column}")
        at = {c: header.index(c) for c in LABEL_COLUMNS if c in header}
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} fields, found {len(row)}", line=line_no, path=path)
            lag = _parse_optional(row[at["READMITLAG"]], _int_days, "READMITLAG", line_no, path)
            try:
                when = date.fromisoformat(row[at["DISCHARGEDATE"]].strip())
            except ValueError:
                raise FormatError("DISCHARGEDATE must be YYYY-MM-DD", line=line_no, path=path) from None
            lace = None
            if "LACE" in at:
                lace = _parse_optional(row[at["LACE"]], float, "LACE", line_no, path)
            records.append(LabelRecord(row[at["PAT_ENC_CSN_ID"]].strip(), lag, when, lace))
    return records


def _int_days(text):
    value = float(text)
    if value != int(value):
        raise ValueError(text)
    return int(value)


def write_labels(records, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(LABEL_COLUMNS)
        for r in records:
            writer.writerow([
                r.encounter_id,
                "" if r.readmit_lag is None else r.readmit_lag,
                r.discharge_date.isoformat(),
                "" if r.lace is None else repr(float(r.lace)),
            ])


def baseline_table(records):
    """Single-column ``LACE`` feature table from label records."""
    ids = [r.encounter_id for r in records]
    values = [[np.nan if r.lace is None else r.lace] for r in records]
    return FeatureTable(ids, ["LACE"], np.array(values).reshape(len(ids), 1))


def evaluate_pipeline(table, records, cutoff=DEFAULT_CUTOFF, rounds=100):
    """Join, split by discharge date, boost on the training side, score the test side.

    Training rows with any missing feature are dropped; a missing feature on
    the test side is a schema error.
    """
    where = {e: n for n, e in enumerate(table.ids)}
    joined = [r for r in records if r.encounter_id in where]
    train, test = split_by_date(joined, cutoff)
    X_train = table.values[[where[r.encounter_id] for r in train]]
    y_train = np.array([r.label for r in train])
    complete = ~np.any(np.isnan(X_train), axis=1)
    if not complete.all():
        log.warning("dropping %d training rows with missing features", int((~complete).sum()))
    model = train_adaboost(X_train[complete], y_train[complete], rounds, table.columns)
    X_test = table.values[[where[r.encounter_id] for r in test]]
    scores = predict_score(model, X_test)
    return roc_auc(scores, [r.label for r in test])


def format_report(results):
    """Plain-text report, one ``name: AUC`` line per feature set."""
    lines = ["feature_set\tauc\tpositives\tnegatives"]
    for name, result in results.items():
        lines.append(f"{name}\t{result.auc:.4f}\t{result.positives}\t{result.negatives}")
    return "\n".join(lines) + "\n"
