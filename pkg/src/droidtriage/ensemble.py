"""Ensemble learners: bagged random forests and boosted simple logistic.

The forest trains T random trees, each on its own bootstrap resample, and
aggregates hard majority votes. Every tree derives its own seed from the
master seed with a fixed 64-bit mixing function, so the model is a pure
function of (dataset, params) no matter how many workers train in parallel.

Simple logistic is stagewise additive logistic regression: each boosting
iteration computes Newton-step working responses z with weights w = p(1-p),
fits the single-feature weighted least-squares regressor that reduces the
weighted squared error most, and takes a half step. On a binary feature the
exact least-squares fit is just the weighted mean of z in each bit cell, so
no numeric solver is involved. The iteration count is chosen by k-fold
cross-validated log-likelihood and the model is then refit on all data.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Label, bootstrap_sample_size, stratified_fold_indices
from .trees import TreeModel, predict_tree, train_random_tree, tree_scores

_MASK64 = (1 << 64) - 1

# Fixed constants of the boosting procedure.
Z_MAX = 3.0
WEIGHT_FLOOR = 1e-10
_P_CLIP = 1e-15


def derive_seed(master: int, index: int) -> int:
    """Stable 64-bit mix of (master, index); the per-tree seed schedule."""
    z = (int(master) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ForestParams:
    """Forest training knobs.

    ``bootstrap_fraction`` scales the resample size (ceil of fraction * N,
    drawn with replacement). Setting ``bootstrap`` to False disables
    resampling entirely and every tree sees the full training set.
    """

    trees: int
    k: int
    bootstrap_fraction: float = 1.0
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.trees < 1:
            raise ValueError("forest needs at least one tree")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0.0 < self.bootstrap_fraction <= 1.0:
            raise ValueError("bootstrap fraction must lie in (0, 1]")


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeModel, ...]
    params: ForestParams

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features


def _train_member(dataset: Dataset, params: ForestParams, i: int) -> TreeModel:
    tree_seed = derive_seed(params.seed, i)
    sample = dataset
    if params.bootstrap:
        size = bootstrap_sample_size(len(dataset), params.bootstrap_fraction)
        rng = np.random.default_rng(derive_seed(tree_seed, 1))
        sample = dataset.subset(rng.integers(0, len(dataset), size=size))
    return train_random_tree(sample, params.k, tree_seed)


def train_forest(dataset: Dataset, params: ForestParams, workers: int = 1) -> ForestModel:
    """Train a bagged forest of random trees.

    Tree i uses seed ``derive_seed(params.seed, i)`` for its split sampling
    and a sub-derived stream for its bootstrap draw, so results are identical
    for any `workers` count. With one tree and bootstrap off, the forest is
    exactly ``train_random_tree(dataset, k, derive_seed(seed, 0))``.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if params.k > dataset.feature_count:
        raise ValueError(
            f"k={params.k} exceeds feature count {dataset.feature_count}"
        )
    if workers <= 1:
        members = [_train_member(dataset, params, i) for i in range(params.trees)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            members = list(
                pool.map(lambda i: _train_member(dataset, params, i), range(params.trees))
            )
    return ForestModel(tuple(members), params)


def predict_forest(model: ForestModel, vector) -> tuple[Label, float]:
    """Majority vote over the trees.

    Each tree votes the majority label of its leaf; the score is the fraction
    of malware votes. MALWARE requires a strict majority, so an even split
    predicts BENIGN.
    """
    votes = sum(predict_tree(t, vector)[0] == Label.MALWARE for t in model.trees)
    score = votes / len(model.trees)
    return (Label.MALWARE if score > 0.5 else Label.BENIGN), score


def forest_scores(model: ForestModel, X) -> np.ndarray:
    """Malware vote fraction for every row of `X`."""
    votes = np.zeros(np.asarray(X).shape[0], dtype=np.float64)
    for tree in model.trees:
        votes += tree_scores(tree, X) > 0.5
    return votes / len(model.trees)


@dataclass(frozen=True)
class WorkingResponse:
    """One instance's Newton-step regression target and weight."""

    z: float
    w: float


def logitboost_response(y: int, p: float, z_max: float = Z_MAX) -> WorkingResponse:
    """Working response for an instance with label `y` under probability `p`.

    z = (y - p) / (p (1 - p)) clamped to [-z_max, z_max]; w = p (1 - p)
    floored at a small positive constant so weighted fits stay defined.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly in (0, 1), got {p}")
    w = p * (1.0 - p)
    z = (y - p) / w
    z = max(-z_max, min(z_max, z))
    return WorkingResponse(z, max(w, WEIGHT_FLOOR))


@dataclass(frozen=True)
class LogitRegressor:
    """Single-feature regressor: one fitted value per bit state."""

    feature: int
    value_if_0: float
    value_if_1: float


@dataclass(frozen=True)
class LogitModel:
    intercept: float
    regressors: tuple[LogitRegressor, ...]
    iterations_used: int
    max_iterations: int
    cv_folds: int
    n_features: int


def _working_response(y, p):
    w = p * (1.0 - p)
    z = np.clip((y - p) / w, -Z_MAX, Z_MAX)
    return z, np.maximum(w, WEIGHT_FLOOR)


def _best_regressor(X, z, w) -> LogitRegressor:
    """Exact weighted least squares over all single-feature two-cell fits."""
    wz = w * z
    sw = w.sum()
    swz = wz.sum()
    sw1 = w @ X
    swz1 = wz @ X
    sw0 = sw - sw1
    swz0 = swz - swz1
    with np.errstate(divide="ignore", invalid="ignore"):
        explained = np.where(sw1 > 0.0, swz1 * swz1 / np.where(sw1 > 0.0, sw1, 1.0), 0.0)
        explained += np.where(sw0 > 0.0, swz0 * swz0 / np.where(sw0 > 0.0, sw0, 1.0), 0.0)
    residual = (w * z * z).sum() - explained
    f = int(np.argmin(residual))  # first minimum, i.e. lowest feature index
    v1 = swz1[f] / sw1[f] if sw1[f] > 0.0 else 0.0
    v0 = swz0[f] / sw0[f] if sw0[f] > 0.0 else 0.0
    return LogitRegressor(f, float(v0), float(v1))


def _apply_regressor(reg: LogitRegressor, X) -> np.ndarray:
    col = X[:, reg.feature]
    return reg.value_if_0 + (reg.value_if_1 - reg.value_if_0) * col


def _sigmoid2(F):
    """p = 1 / (1 + exp(-2 F)), computed stably for large |F|."""
    return 0.5 * (1.0 + np.tanh(F))


def log_likelihood(p, y) -> float:
    """Binomial log-likelihood of labels `y` under probabilities `p`."""
    p = np.clip(np.asarray(p, dtype=np.float64), _P_CLIP, 1.0 - _P_CLIP)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _boost(X, y, iterations: int, X_eval=None, y_eval=None):
    """Run `iterations` boosting steps on (X, y).

    Returns the regressor list and, when an eval set is supplied, the eval
    log-likelihood after each iteration count 0..iterations.
    """
    F = np.zeros(X.shape[0])
    track = X_eval is not None
    regressors: list[LogitRegressor] = []
    lls = []
    if track:
        F_eval = np.zeros(X_eval.shape[0])
        lls.append(log_likelihood(_sigmoid2(F_eval), y_eval))
    for _ in range(iterations):
        p = np.clip(_sigmoid2(F), _P_CLIP, 1.0 - _P_CLIP)
        z, w = _working_response(y, p)
        reg = _best_regressor(X, z, w)
        regressors.append(reg)
        F = F + 0.5 * _apply_regressor(reg, X)
        if track:
            F_eval = F_eval + 0.5 * _apply_regressor(reg, X_eval)
            lls.append(log_likelihood(_sigmoid2(F_eval), y_eval))
    return regressors, lls


def train_simple_logistic(
    dataset: Dataset, max_iter: int = 30, cv_folds: int = 5, seed: int = 0
) -> LogitModel:
    """Boosted additive logistic regression with CV-chosen iteration count.

    For each of `cv_folds` stratified folds, boosting runs on the complement
    for `max_iter` iterations while tracking the held-out log-likelihood; the
    iteration count with the best mean held-out log-likelihood wins (ties go
    to the smaller count, and zero iterations, the constant p = 0.5 model, is
    a permitted winner). The model is then refit on all data for that count.
    """
    n_ben, n_mal = dataset.class_counts()
    if n_ben == 0 or n_mal == 0:
        raise ValueError("training requires both classes present")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if cv_folds < 2:
        raise ValueError("cv_folds must be at least 2")

    X = dataset.X.astype(np.float64)
    y = dataset.y.astype(np.float64)
    folds = stratified_fold_indices(dataset.y, cv_folds, seed)
    everything = np.arange(len(dataset))
    ll_sum = np.zeros(max_iter + 1)
    for test_idx in folds:
        train_idx = np.setdiff1d(everything, test_idx)
        _, lls = _boost(
            X[train_idx], y[train_idx], max_iter, X_eval=X[test_idx], y_eval=y[test_idx]
        )
        ll_sum += np.asarray(lls)
    iterations_used = int(np.argmax(ll_sum))  # first maximum: simplest model wins ties

    regressors, _ = _boost(X, y, iterations_used)
    return LogitModel(
        intercept=0.0,
        regressors=tuple(regressors),
        iterations_used=iterations_used,
        max_iterations=max_iter,
        cv_folds=cv_folds,
        n_features=dataset.feature_count,
    )


def logit_additive_score(model: LogitModel, X) -> np.ndarray:
    """The additive score F(x) before the sigmoid, for every row of `X`."""
    X = np.asarray(X, dtype=np.float64)
    F = np.full(X.shape[0], model.intercept)
    for reg in model.regressors:
        F += 0.5 * _apply_regressor(reg, X)
    return F


def logit_scores(model: LogitModel, X) -> np.ndarray:
    """P(malware | x) = 1 / (1 + exp(-2 F(x))) for every row of `X`."""
    X = np.asarray(X)
    if X.shape[1] != model.n_features:
        raise ValueError(
            f"matrix width {X.shape[1]} does not match model features {model.n_features}"
        )
    return _sigmoid2(logit_additive_score(model, X))


def predict_simple_logistic(model: LogitModel, vector) -> tuple[Label, float]:
    """Score one vector; MALWARE when the probability exceeds 0.5."""
    bits = np.asarray(vector)
    if bits.shape != (model.n_features,):
        raise ValueError(
            f"vector length {bits.shape} does not match model features {model.n_features}"
        )
    score = float(logit_scores(model, bits[None, :])[0])
    return (Label.MALWARE if score > 0.5 else Label.BENIGN), score


def training_log_likelihood(model: LogitModel, dataset: Dataset) -> float:
    """Log-likelihood of `dataset` under the model's probabilities."""
    return log_likelihood(logit_scores(model, dataset.X), dataset.y)
