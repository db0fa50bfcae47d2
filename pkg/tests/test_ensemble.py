import numpy as np
import pytest

from droidtriage.dataset import Label
from droidtriage.ensemble import (
    ForestModel,
    ForestParams,
    LogitModel,
    LogitRegressor,
    WorkingResponse,
    derive_seed,
    forest_scores,
    log_likelihood,
    logit_scores,
    logitboost_response,
    predict_forest,
    predict_simple_logistic,
    train_forest,
    train_simple_logistic,
    training_log_likelihood,
)
from droidtriage.trees import Leaf, TreeModel, train_random_tree, tree_scores

from conftest import make_dataset, random_dataset


class TestDeriveSeed:
    def test_deterministic_and_distinct(self):
        seen = {derive_seed(42, i) for i in range(1000)}
        assert len(seen) == 1000
        assert derive_seed(42, 7) == derive_seed(42, 7)
        assert derive_seed(42, 7) != derive_seed(43, 7)

    def test_fits_in_64_bits(self):
        for i in range(100):
            assert 0 <= derive_seed(2**63, i) < 2**64


class TestForest:
    def test_t1_no_bootstrap_equals_random_tree(self, rng):
        ds = random_dataset(rng, 250, 9)
        forest = train_forest(ds, ForestParams(trees=1, k=3, bootstrap=False, seed=11))
        lone = train_random_tree(ds, 3, derive_seed(11, 0))
        assert forest.trees[0].root == lone.root
        votes = forest_scores(forest, ds.X)
        assert np.array_equal(votes, (tree_scores(lone, ds.X) > 0.5).astype(float))

    def test_deterministic_across_worker_counts(self, rng):
        ds = random_dataset(rng, 200, 8)
        params = ForestParams(trees=6, k=3, seed=5)
        models = [train_forest(ds, params, workers=w) for w in (1, 2, 8)]
        for other in models[1:]:
            assert all(a.root == b.root for a, b in zip(models[0].trees, other.trees))

    def test_bootstrap_fraction_changes_sample(self, rng):
        ds = random_dataset(rng, 100, 5)
        full = train_forest(ds, ForestParams(trees=3, k=2, seed=1))
        half = train_forest(ds, ForestParams(trees=3, k=2, bootstrap_fraction=0.5, seed=1))
        assert any(a.root != b.root for a, b in zip(full.trees, half.trees))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ForestParams(trees=0, k=1)
        with pytest.raises(ValueError):
            ForestParams(trees=1, k=0)
        with pytest.raises(ValueError):
            ForestParams(trees=1, k=1, bootstrap_fraction=0.0)

    def test_k_exceeding_features_rejected(self, rng):
        ds = random_dataset(rng, 20, 3)
        with pytest.raises(ValueError, match="k="):
            train_forest(ds, ForestParams(trees=2, k=4))

    def test_vote_scores_and_tie(self):
        def constant_tree(mal: int) -> TreeModel:
            return TreeModel(Leaf(1 - mal, mal), "entropy", False, 1, 0, 2)

        two = ForestModel((constant_tree(1), constant_tree(0)), ForestParams(2, 1))
        label, score = predict_forest(two, [0, 1])
        assert score == 0.5 and label is Label.BENIGN

        three = ForestModel(
            (constant_tree(1), constant_tree(1), constant_tree(0)), ForestParams(3, 1)
        )
        label, score = predict_forest(three, [0, 1])
        assert score == pytest.approx(2 / 3) and label is Label.MALWARE

        unanimous = ForestModel((constant_tree(1),) * 3, ForestParams(3, 1))
        assert predict_forest(unanimous, [0, 1]) == (Label.MALWARE, 1.0)

    def test_label_matches_score_rule(self, rng):
        ds = random_dataset(rng, 150, 6)
        model = train_forest(ds, ForestParams(trees=5, k=2, seed=3))
        scores = forest_scores(model, ds.X)
        for i in range(0, len(ds), 17):
            label, score = predict_forest(model, ds.X[i])
            assert score == scores[i]
            assert (label is Label.MALWARE) == (score > 0.5)

    def test_forest_at_least_median_tree_accuracy(self, rng):
        ds = random_dataset(rng, 400, 10)
        model = train_forest(ds, ForestParams(trees=9, k=3, seed=2))
        truth = ds.y == 1
        tree_accs = sorted(
            float(np.mean((tree_scores(t, ds.X) > 0.5) == truth)) for t in model.trees
        )
        forest_acc = float(np.mean((forest_scores(model, ds.X) > 0.5) == truth))
        assert forest_acc >= tree_accs[len(tree_accs) // 2]


class TestLogitboostResponse:
    def test_worked_values(self):
        assert logitboost_response(1, 0.5) == WorkingResponse(2.0, 0.25)
        assert logitboost_response(0, 0.5) == WorkingResponse(-2.0, 0.25)

    def test_clamping(self):
        resp = logitboost_response(1, 0.001, z_max=3.0)
        assert resp.z == 3.0
        resp = logitboost_response(0, 0.999, z_max=3.0)
        assert resp.z == -3.0

    def test_weight_floor(self):
        resp = logitboost_response(1, 1e-14)
        assert resp.w == 1e-10

    def test_p_domain(self):
        with pytest.raises(ValueError):
            logitboost_response(1, 0.0)
        with pytest.raises(ValueError):
            logitboost_response(0, 1.0)


def _separable_dataset():
    X = [[1, 0]] * 20 + [[1, 1]] * 5 + [[0, 1]] * 20 + [[0, 0]] * 5
    y = [1] * 25 + [0] * 25
    return make_dataset(X, y)


class TestSimpleLogistic:
    def test_separating_feature_learned(self):
        ds = _separable_dataset()
        model = train_simple_logistic(ds, max_iter=20, cv_folds=5, seed=0)
        scores = logit_scores(model, ds.X)
        assert np.mean((scores > 0.5) == (ds.y == 1)) == 1.0
        assert np.all(scores[np.asarray(ds.y) == 1] > 0.9)
        assert model.iterations_used <= 20

    def test_log_likelihood_improves_over_empty_model(self):
        ds = _separable_dataset()
        model = train_simple_logistic(ds, max_iter=20, cv_folds=5, seed=0)
        ll_final = training_log_likelihood(model, ds)
        empty = LogitModel(0.0, (), 0, 20, 5, ds.feature_count)
        assert ll_final > training_log_likelihood(empty, ds)

    def test_empty_model_scores_half(self):
        empty = LogitModel(0.0, (), 0, 10, 5, 3)
        label, score = predict_simple_logistic(empty, [1, 0, 1])
        assert score == 0.5 and label is Label.BENIGN

    def test_saturation(self):
        model = LogitModel(10.0, (), 0, 1, 2, 2)
        _, score = predict_simple_logistic(model, [0, 0])
        assert score > 0.999

    def test_score_complement_under_negation(self, rng):
        ds = random_dataset(rng, 60, 5)
        model = train_simple_logistic(ds, max_iter=8, cv_folds=3, seed=1)
        negated = LogitModel(
            -model.intercept,
            tuple(
                LogitRegressor(r.feature, -r.value_if_0, -r.value_if_1)
                for r in model.regressors
            ),
            model.iterations_used,
            model.max_iterations,
            model.cv_folds,
            model.n_features,
        )
        p = logit_scores(model, ds.X)
        q = logit_scores(negated, ds.X)
        assert np.all(np.abs(p + q - 1.0) < 1e-12)

    def test_monotone_in_positive_regressors(self, rng):
        regs = (
            LogitRegressor(0, -0.5, 1.0),
            LogitRegressor(2, 0.0, 0.7),
            LogitRegressor(0, -0.1, 0.2),
        )
        model = LogitModel(0.0, regs, 3, 10, 5, 4)
        for _ in range(50):
            bits = (rng.random(4) < 0.5).astype(np.uint8)
            base = logit_scores(model, bits[None, :])[0]
            for f in range(4):
                if bits[f] == 0:
                    up = bits.copy()
                    up[f] = 1
                    assert logit_scores(model, up[None, :])[0] >= base

    def test_determinism(self, rng):
        ds = random_dataset(rng, 80, 6)
        a = train_simple_logistic(ds, max_iter=10, cv_folds=4, seed=9)
        b = train_simple_logistic(ds, max_iter=10, cv_folds=4, seed=9)
        assert a == b

    def test_validation(self, rng):
        ds = random_dataset(rng, 30, 3)
        single = make_dataset([[0], [1]], [1, 1])
        with pytest.raises(ValueError, match="both classes"):
            train_simple_logistic(single, 5, 2, 0)
        with pytest.raises(ValueError, match="max_iter"):
            train_simple_logistic(ds, 0, 2, 0)
        with pytest.raises(ValueError, match="cv_folds"):
            train_simple_logistic(ds, 5, 1, 0)

    def test_log_likelihood_of_perfect_probabilities(self):
        assert log_likelihood([1.0, 1.0], [1, 1]) == pytest.approx(0.0, abs=1e-12)
        assert log_likelihood([0.5, 0.5], [0, 1]) == pytest.approx(2 * np.log(0.5))


def test_forest_beats_median_tree_on_calibrated_corpus():
    import dataclasses

    from droidtriage.calibration import reference_spec
    from droidtriage.dataset import synthesize

    spec = dataclasses.replace(reference_spec(), n_benign=700, n_malware=500)
    ds = synthesize(spec, 21)
    model = train_forest(ds, ForestParams(trees=10, k=8, seed=6))
    truth = ds.y == 1
    tree_accs = sorted(
        float(np.mean((tree_scores(t, ds.X) > 0.5) == truth)) for t in model.trees
    )
    forest_acc = float(np.mean((forest_scores(model, ds.X) > 0.5) == truth))
    assert forest_acc >= tree_accs[len(tree_accs) // 2]
