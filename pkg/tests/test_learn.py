import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from notevec.errors import (
    EmptyPartitionError,
    FormatError,
    ParameterError,
    SchemaError,
    TrainingError,
    UndefinedAucError,
)
from notevec.features import FeatureTable
from notevec.learn import (
    BoostModel,
    LabelRecord,
    evaluate_pipeline,
    format_report,
    label_readmission,
    load_labels,
    predict_margin,
    predict_score,
    roc_auc,
    split_by_date,
    train_adaboost,
    write_labels,
)


def brute_auc(scores, labels):
    """Count every positive/negative pair; ties score one half."""
    wins = 0.0
    pairs = 0
    for sp, lp in zip(scores, labels):
        if lp != 1:
            continue
        for sn, ln in zip(scores, labels):
            if ln != 0:
                continue
            pairs += 1
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / pairs


def brute_first_stump(X, y):
    """Exhaustive search over every threshold between and around observed values."""
    n, d = X.shape
    w = np.full(n, 1.0 / n)
    best = None
    for j in range(d):
        values = sorted(set(X[:, j].tolist()))
        cuts = [values[0] - 1.0] + [(a + b) / 2 for a, b in zip(values, values[1:])] + [values[-1] + 1.0]
        for cut in cuts:
            for polarity in (1, -1):
                pred = [polarity if v > cut else -polarity for v in X[:, j]]
                err = sum(wi for wi, p, t in zip(w, pred, y) if p != (1 if t == 1 else -1))
                if best is None or err < best[0] - 1e-12:
                    best = (err, j, cut, polarity)
    return best


def record(eid, lag=None, when=date(2013, 1, 1), lace=None):
    return LabelRecord(eid, lag, when, lace)


class TestLabels:
    @pytest.mark.parametrize("lag,label", [(0, 0), (1, 1), (30, 1), (31, 0), (None, 0), (15, 1), (-3, 0)])
    def test_lag_boundaries(self, lag, label):
        assert label_readmission(lag) == label
        assert record("1", lag).label == label

    def test_nan_lag_is_missing(self):
        assert label_readmission(float("nan")) == 0

    def test_date_boundary(self):
        before = record("a", when=date(2014, 6, 30))
        on = record("b", when=date(2014, 7, 1))
        train, test = split_by_date([on, before])
        assert train == [before] and test == [on]

    def test_empty_side_raises(self):
        with pytest.raises(EmptyPartitionError):
            split_by_date([record("a", when=date(2015, 1, 1))])
        with pytest.raises(EmptyPartitionError):
            split_by_date([record("a", when=date(2010, 1, 1))])

    def test_csv_round_trip(self, tmp_path):
        rows = [
            record("10", 5, date(2013, 2, 3), 7.0),
            record("11", None, date(2014, 7, 1), None),
            record("12", 40, date(2014, 6, 30), 12.5),
        ]
        write_labels(rows, tmp_path / "labels.csv")
        assert load_labels(tmp_path / "labels.csv") == rows

    def test_reads_na_float_lags_and_no_lace(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("PAT_ENC_CSN_ID,READMITLAG,DISCHARGEDATE\n1,NA,2013-01-01\n2,12.0,2014-08-01\n")
        rows = load_labels(path)
        assert [r.label for r in rows] == [0, 1]
        assert rows[1].lace is None

    def test_bad_rows_report_line(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("PAT_ENC_CSN_ID,READMITLAG,DISCHARGEDATE\n1,3,2013-01-01\n2,x,2013-01-01\n")
        with pytest.raises(FormatError) as info:
            load_labels(path)
        assert info.value.line == 3
        path.write_text("PAT_ENC_CSN_ID,READMITLAG\n1,3\n")
        with pytest.raises(SchemaError):
            load_labels(path)


class TestAuc:
    def test_worked_example(self):
        result = roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
        assert result.auc == 0.75
        assert (result.positives, result.negatives) == (2, 2)

    def test_all_tied_is_half(self):
        assert roc_auc([0.3] * 6, [0, 1, 0, 1, 1, 0]).auc == 0.5

    def test_single_class_raises(self):
        with pytest.raises(UndefinedAucError):
            roc_auc([0.1, 0.2], [1, 1])

    def test_non_binary_labels_rejected(self):
        with pytest.raises(ParameterError):
            roc_auc([0.1, 0.2], [0, 2])

    def test_matches_pair_counting(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(2, 120))
            scores = rng.integers(0, 10, size=n) / 10.0  # plenty of ties
            labels = rng.integers(0, 2, size=n)
            labels[0], labels[1] = 0, 1
            assert roc_auc(scores, labels).auc == brute_auc(scores, labels)

    @settings(max_examples=100)
    @given(st.lists(st.tuples(st.integers(-20, 20), st.integers(0, 1)), min_size=2, max_size=60))
    def test_complement_and_monotone_invariance(self, rows):
        scores = np.array([s for s, _ in rows], dtype=float)
        labels = np.array([l for _, l in rows])
        if labels.min() == labels.max():
            return
        auc = roc_auc(scores, labels).auc
        assert abs(auc + roc_auc(scores, 1 - labels).auc - 1.0) <= 1e-12
        assert roc_auc(np.exp(scores), labels).auc == auc
        assert abs(roc_auc(-scores, labels).auc - (1.0 - auc)) <= 1e-12


class TestAdaBoost:
    def test_separable_one_dimensional(self):
        x = np.array([[0.1], [0.4], [0.5], [0.9], [1.3], [2.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        model = train_adaboost(x, y, rounds=3)
        assert len(model.stumps) <= 3
        assert np.array_equal(predict_score(model, x) > 0.5, y == 1)
        assert model.stumps[0].threshold == pytest.approx(0.7)

    def test_interval_needs_several_rounds(self):
        x = np.arange(9.0)[:, None]
        y = np.array([0, 0, 0, 1, 1, 1, 0, 0, 0])
        model = train_adaboost(x, y, rounds=3)
        assert all(e < 0.5 for e in model.errors)
        assert np.array_equal(predict_margin(model, x) > 0, y == 1)

    def test_rounds_errors_below_half_and_bound(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(200, 4))
        y = (X[:, 0] + 0.5 * X[:, 1] + rng.normal(0, 0.7, 200) > 0).astype(int)
        model = train_adaboost(X, y, rounds=40)
        assert model.errors and all(e < 0.5 for e in model.errors)
        margin = predict_margin(model, X)
        train_error = np.mean((margin > 0) != (y == 1))
        bound = math.prod(2 * math.sqrt(e * (1 - e)) for e in model.errors)
        assert train_error <= bound + 1e-12

    def test_first_stump_matches_exhaustive_search(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            X = rng.integers(0, 4, size=(n, 2)).astype(float)
            y = rng.integers(0, 2, size=n)
            if y.min() == y.max():
                continue
            best = brute_first_stump(X, y)
            model = train_adaboost(X, y, rounds=1)
            if best[0] >= 0.5:
                assert model.stumps == []
                continue
            stump = model.stumps[0]
            assert model.errors[0] == pytest.approx(best[0], abs=1e-12)
            err, j, cut, polarity = best
            assert (stump.feature, stump.polarity) == (f"x{j}", polarity)
            np.testing.assert_array_equal(stump.vote(X[:, j]), np.where(X[:, j] > cut, polarity, -polarity))

    def test_perfect_stump_stops_early(self):
        x = np.array([[0.0], [1.0]])
        model = train_adaboost(x, [0, 1], rounds=50)
        assert len(model.stumps) == 1
        assert model.errors == [0.0]

    @pytest.mark.parametrize("rounds", [0, -1])
    def test_rounds_must_be_positive(self, rounds):
        with pytest.raises(ParameterError):
            train_adaboost([[0.0], [1.0]], [0, 1], rounds=rounds)

    def test_single_class_and_missing_values(self):
        with pytest.raises(TrainingError):
            train_adaboost([[0.0], [1.0]], [1, 1])
        with pytest.raises(SchemaError):
            train_adaboost([[np.nan], [1.0]], [0, 1])

    def test_empty_model_scores_half(self):
        model = BoostModel(["x0"], 10)
        np.testing.assert_array_equal(predict_score(model, [[1.0], [5.0]]), [0.5, 0.5])

    def test_prediction_schema(self):
        model = train_adaboost([[0.0], [1.0]], [0, 1], feature_names=["a"])
        with pytest.raises(SchemaError):
            predict_score(model, FeatureTable(["1"], ["b"], [[0.0]]))
        with pytest.raises(SchemaError):
            predict_score(model, [[np.nan]])
        table = FeatureTable(["1", "2"], ["z", "a"], [[9.0, 0.0], [9.0, 1.0]])
        np.testing.assert_array_equal(predict_score(model, table) > 0.5, [False, True])


class TestEvaluate:
    def _data(self, seed, shuffle=False, n=400):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n)
        y = (x + rng.normal(0, 0.5, n) > 0).astype(int)
        if shuffle:
            y = rng.permutation(y)
        ids = [str(i) for i in range(n)]
        records = [
            record(ids[i], 10 if y[i] else None, date(2013, 1, 1) if i < n // 2 else date(2014, 9, 1))
            for i in range(n)
        ]
        return FeatureTable(ids, ["x"], x[:, None]), records

    def test_signal_is_found(self):
        table, records = self._data(0)
        assert evaluate_pipeline(table, records, rounds=30).auc > 0.85

    def test_shuffled_labels_near_chance(self):
        aucs = [evaluate_pipeline(*self._data(s, shuffle=True), rounds=30).auc for s in range(5)]
        assert abs(np.mean(aucs) - 0.5) < 0.07

    def test_inner_join_and_incomplete_training_rows(self, caplog):
        table, records = self._data(1)
        values = table.values.copy()
        values[0, 0] = np.nan
        table = FeatureTable(table.ids, table.columns, values)
        extra = records + [record("missing", 3, date(2014, 9, 1))]
        result = evaluate_pipeline(table, extra, rounds=10)
        assert result.positives + result.negatives == 200
        assert "dropping 1 training rows" in caplog.text

    def test_report_format(self):
        table, records = self._data(2)
        report = format_report({"x": evaluate_pipeline(table, records, rounds=5)})
        head, line = report.splitlines()
        assert head.split("\t") == ["feature_set", "auc", "positives", "negatives"]
        name, auc, pos, neg = line.split("\t")
        assert name == "x" and len(auc.split(".")[1]) == 4 and int(pos) + int(neg) == 200
