import numpy as np
import pytest
import scipy.sparse as sp

import netlabel.classifiers.local as local
from netlabel.classifiers import (LinearRegressionClassifier, MethodSpec, MultinomialNB,
                                  RandomForest, classify_local, ga_fit, ga_predict, ga_split,
                                  ga_surrogate_precision, gl_predict, majority, max_median_label)
from netlabel.errors import InputError
from netlabel.graph import LabelSet


def _labels(values):
    return LabelSet("x", np.array(values, dtype=np.uint8))


def test_method_spec_validation():
    assert MethodSpec("RF").params["n_trees"] == 50
    assert MethodSpec("GA", {"base": "NB"}).name == "GA-NB"
    with pytest.raises(InputError):
        MethodSpec("SVM")
    with pytest.raises(InputError):
        MethodSpec("RF", {"depth": 3})
    with pytest.raises(InputError):
        MethodSpec("NB", {"alpha": 0})
    with pytest.raises(InputError):
        MethodSpec("GA", {"base": "CS"})


def test_majority_ties_go_to_zero():
    assert majority([1, 1, 0]) == 1
    assert majority([1, 0]) == 0
    assert max_median_label(np.array([0.5, 0.5]), np.array([0, 1])) == 0


def test_nl_majority_and_abstain():
    A = sp.csr_matrix(np.eye(4, dtype=np.int64))
    L = _labels([0, 1, 1, 0])
    assert classify_local(MethodSpec("NL"), [1, 2, 3], A, L, 0).label == 1
    p = classify_local(MethodSpec("RF"), [], A, L, 0)
    assert p.abstained and p.reason == "empty-neighborhood"


def test_single_class_neighborhood_skips_training():
    A = sp.csr_matrix(np.eye(4, dtype=np.int64))
    p = classify_local(MethodSpec("LR"), [1, 2], A, _labels([0, 1, 1, 0]), 0)
    assert p.label == 1 and p.reason == "single-class"


def test_node_errors():
    A = sp.csr_matrix(np.eye(3, dtype=np.int64))
    L = _labels([0, 1, 0])
    with pytest.raises(InputError):
        classify_local(MethodSpec("NL"), [1], A, L, 7)
    with pytest.raises(InputError):
        classify_local(MethodSpec("NL"), [0, 1], A, L, 0)
    with pytest.raises(InputError):
        classify_local(MethodSpec("GA"), [1], A, L, 0)


def test_cs_max_median_rule():
    # node 0 equals the label-1 neighbors and shares nothing with the label-0 ones
    A = sp.csr_matrix(np.array([[2, 3, 0, 0], [2, 3, 0, 0], [4, 6, 0, 0], [0, 0, 1, 1], [0, 0, 5, 2]]))
    L = _labels([0, 1, 1, 0, 0])
    assert classify_local(MethodSpec("CS"), [1, 2, 3, 4], A, L, 0).label == 1
    scaled = sp.csr_matrix(A.toarray() * 3)
    assert classify_local(MethodSpec("CS"), [1, 2, 3, 4], scaled, L, 0).label == 1


def test_no_training_leakage(rng):
    seen = []
    local.training_hook = lambda i, rows: seen.append((i, set(rows.tolist())))
    try:
        A = sp.csr_matrix(rng.integers(0, 3, size=(12, 5)))
        L = _labels((np.arange(12) % 2).tolist())
        for i in range(12):
            nbrs = [j for j in range(12) if j != i][:6]
            for m in ("RF", "LR", "NB", "CS", "NL"):
                classify_local(MethodSpec(m), nbrs, A, L, i)
    finally:
        local.training_hook = None
    assert seen and all(i not in rows for i, rows in seen)


def test_predictions_are_order_independent(rng):
    A = sp.csr_matrix(rng.integers(0, 4, size=(30, 8)))
    L = _labels((rng.random(30) < 0.5).astype(int).tolist())
    spec = MethodSpec("RF", seed=9)
    nbrs = {i: [j for j in range(30) if j != i][:15] for i in range(30)}
    forward = [classify_local(spec, nbrs[i], A, L, i).label for i in range(30)]
    backward = [classify_local(spec, nbrs[i], A, L, i).label for i in reversed(range(30))]
    assert forward == backward[::-1]


def test_rf_separable_neighborhood_over_100_seeds():
    correct = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        X = np.vstack([r.uniform(0, 1, size=(10, 2)), r.uniform(2, 3, size=(10, 2))])
        y = np.r_[np.zeros(10, int), np.ones(10, int)]
        x = r.uniform(2, 3, size=(1, 2)) if seed % 2 else r.uniform(0, 1, size=(1, 2))
        pred = RandomForest().fit(X, y, r).predict(x)[0]
        correct += int(pred == seed % 2)
    assert correct >= 95


def test_learners_handle_single_class():
    X = np.array([[1.0, 0.0], [2.0, 1.0], [0.0, 3.0]])
    y = np.ones(3, dtype=int)
    for model in (RandomForest(), LinearRegressionClassifier(), MultinomialNB()):
        fitted = model.fit(X, y, np.random.default_rng(0))
        assert fitted.predict(X).tolist() == [1, 1, 1]


def test_lr_and_nb_fit_simple_patterns():
    X = np.array([[5.0, 0.0], [4.0, 1.0], [0.0, 5.0], [1.0, 4.0]])
    y = np.array([1, 1, 0, 0])
    assert LinearRegressionClassifier().fit(X, y).predict(X).tolist() == y.tolist()
    assert MultinomialNB().fit(X, y).predict(X).tolist() == y.tolist()


def test_rf_uses_random_stream():
    r = np.random.default_rng(3)
    X = r.normal(size=(60, 6))
    y = (X[:, 0] + r.normal(scale=1.0, size=60) > 0).astype(int)
    p1 = RandomForest().fit(X, y, np.random.default_rng(1)).predict(X)
    p2 = RandomForest().fit(X, y, np.random.default_rng(1)).predict(X)
    assert np.array_equal(p1, p2)


def test_ga_split_and_bookkeeping():
    half = ga_split(4, seed=1)
    assert sorted(np.bincount(half).tolist()) == [2, 2]
    with pytest.raises(InputError):
        ga_split(3, seed=1)
    A = sp.csr_matrix(np.array([[3, 0], [0, 3], [3, 1], [1, 3], [4, 0], [0, 4]]))
    L = _labels([1, 0, 1, 0, 1, 0])
    ga = ga_fit(A, L, seed=2, bases=("NB",))
    for i in range(6):
        model = ga.models[("NB", 1 - int(ga.half[i]))]
        x = A[i][:, ga.dims].toarray().astype(float)
        assert ga_predict(ga, i, x, "NB").label == int(model.predict(x)[0])


def test_ga_constant_labels():
    A = sp.csr_matrix(np.eye(6, dtype=np.int64))
    ga = ga_fit(A, _labels([1] * 6), seed=0)
    assert ga.predict_nodes(A, np.arange(6), "RF").tolist() == [1] * 6


def test_ga_surrogate():
    assert ga_surrogate_precision({"RF": 0.4, "LR": 0.6, "NB": 0.5}) == pytest.approx(0.5)
    assert ga_surrogate_precision({"RF": 0.7}) == 0.7
    with pytest.raises(InputError):
        ga_surrogate_precision({})


def test_gl_extremes_and_keying():
    zero, one = _labels([0] * 5), _labels([1] * 5)
    assert all(gl_predict(zero, i, 1).label == 0 for i in range(5))
    assert all(gl_predict(one, i, 1).label == 1 for i in range(5))
    half = _labels([1, 0] * 50)
    assert [gl_predict(half, i, 3).label for i in range(100)] == \
        [gl_predict(half, i, 3).label for i in range(100)]


def test_forest_splits_match_full_sort_with_negative_values():
    # the split scan sorts only nonzero values; mixed signs must still give
    # the split a full sort would, e.g. the clean cut between -1 and 0 here
    from netlabel.classifiers.forest import RandomForest
    X = np.array([[-2.0], [-1.0], [0.0], [0.0], [3.0], [5.0]])
    y = np.array([1, 1, 0, 0, 0, 0])
    rf = RandomForest(n_trees=25, min_rows=2).fit(X, y, np.random.default_rng(0))
    assert rf.predict(np.array([[-1.5], [0.0], [4.0]])).tolist() == [1, 0, 0]
