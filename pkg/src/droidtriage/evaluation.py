"""Evaluation harness: confusion metrics, ROC/AUC, and cross-validation.

Counts follow the (true class -> predicted class) convention with malware as
the positive ("sus") class. Cross-validation is stratified and pooled: fold
confusion matrices are summed into a single matrix and held-out scores are
concatenated into a single ROC, so each configuration yields one row of
rates, micro-averaged over the whole dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .algo import AlgoDescriptor, model_scores, train_model
from .catalog import FeatureSet, select_feature_set
from .dataset import Dataset, stratified_fold_indices
from .ensemble import derive_seed


@dataclass(frozen=True)
class ConfusionMatrix:
    """The four (true -> predicted) counts; sus denotes the malware class."""

    n_ben_ben: int
    n_ben_sus: int
    n_sus_ben: int
    n_sus_sus: int

    def __post_init__(self):
        if min(self.n_ben_ben, self.n_ben_sus, self.n_sus_ben, self.n_sus_sus) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n_ben_ben + self.n_ben_sus + self.n_sus_ben + self.n_sus_sus

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.n_ben_ben + other.n_ben_ben,
            self.n_ben_sus + other.n_ben_sus,
            self.n_sus_ben + other.n_sus_ben,
            self.n_sus_sus + other.n_sus_sus,
        )


def confusion(truth: Sequence[int], predicted: Sequence[int]) -> ConfusionMatrix:
    """Count (true -> predicted) outcomes; labels are 0 benign, 1 malware."""
    t = np.asarray(truth)
    p = np.asarray(predicted)
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.shape} truth vs {p.shape} predictions")
    if t.size == 0:
        raise ValueError("cannot build a confusion matrix from empty lists")
    return ConfusionMatrix(
        int(np.sum((t == 0) & (p == 0))),
        int(np.sum((t == 0) & (p == 1))),
        int(np.sum((t == 1) & (p == 0))),
        int(np.sum((t == 1) & (p == 1))),
    )


@dataclass(frozen=True)
class MetricsReport:
    """Confusion-derived rates.

    ``precision`` is None when nothing was predicted malware (undefined
    denominator); the other rates are NaN when their true class is absent.
    """

    tpr: float
    tnr: float
    fpr: float
    fnr: float
    acc: float
    err: float
    precision: float | None
    matrix: ConfusionMatrix


def _rate(num: int, den: int) -> float:
    return num / den if den else math.nan


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Rates from a confusion matrix; requires a nonempty matrix.

    TPR = sus->sus / all sus, TNR = ben->ben / all ben, FPR and FNR are their
    complements, ACC is the diagonal fraction, ERR the off-diagonal fraction,
    and precision is sus->sus over everything predicted sus.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    n_sus = cm.n_sus_sus + cm.n_sus_ben
    n_ben = cm.n_ben_ben + cm.n_ben_sus
    predicted_sus = cm.n_sus_sus + cm.n_ben_sus
    return MetricsReport(
        tpr=_rate(cm.n_sus_sus, n_sus),
        tnr=_rate(cm.n_ben_ben, n_ben),
        fpr=_rate(cm.n_ben_sus, n_ben),
        fnr=_rate(cm.n_sus_ben, n_sus),
        acc=(cm.n_ben_ben + cm.n_sus_sus) / cm.total,
        err=(cm.n_ben_sus + cm.n_sus_ben) / cm.total,
        precision=(cm.n_sus_sus / predicted_sus) if predicted_sus else None,
        matrix=cm,
    )


@dataclass(frozen=True)
class RocCurve:
    """Threshold-sweep staircase from (0,0) to (1,1) plus its area."""

    points: tuple[tuple[float, float, float], ...]  # (fpr, tpr, threshold)
    auc: float


def roc_auc(scores: Sequence[float], truth: Sequence[int]) -> RocCurve:
    """ROC staircase and trapezoidal area from malware scores.

    Thresholds sweep the distinct scores in descending order; instances with
    equal scores enter together, which renders ties as diagonal segments.
    The trapezoidal area then equals the Mann-Whitney statistic with tied
    pairs counted one half.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth)
    if s.shape != t.shape:
        raise ValueError(f"length mismatch: {s.shape} scores vs {t.shape} labels")
    n_pos = int(np.sum(t == 1))
    n_neg = int(t.size) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC requires both classes present")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    is_pos = (t[order] == 1).astype(np.int64)
    boundaries = np.flatnonzero(np.diff(s_sorted) != 0.0)
    group_ends = np.concatenate([boundaries, [s_sorted.size - 1]])
    cum_pos = np.cumsum(is_pos)

    points = [(0.0, 0.0, math.inf)]
    auc = 0.0
    prev_fpr = prev_tpr = 0.0
    for end in group_ends:
        tp = int(cum_pos[end])
        fp = int(end + 1 - tp)
        fpr = fp / n_neg
        tpr = tp / n_pos
        points.append((fpr, tpr, float(s_sorted[end])))
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        prev_fpr, prev_tpr = fpr, tpr
    return RocCurve(tuple(points), auc)


def write_roc(curve: RocCurve, path) -> None:
    """Write the staircase as CSV ``fpr,tpr,threshold``."""
    rows = ["fpr,tpr,threshold"]
    rows.extend(f"{fpr!r},{tpr!r},{thr!r}" for fpr, tpr, thr in curve.points)
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")


def stratified_folds(dataset: Dataset, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint test-index sets covering the dataset, class-balanced.

    Per-class counts across folds differ by at most one; deterministic given
    `seed`. Requires 2 <= k <= the smaller class size.
    """
    return stratified_fold_indices(dataset.y, k, seed)


class FoldError(RuntimeError):
    """A training failure inside cross-validation, tagged with its fold."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause


@dataclass(frozen=True)
class CvResult:
    """Pooled k-fold cross-validation outcome for one configuration."""

    algo: AlgoDescriptor
    k: int
    seed: int
    fold_matrices: tuple[ConfusionMatrix, ...]
    pooled_matrix: ConfusionMatrix
    pooled_metrics: MetricsReport
    roc: RocCurve


def cross_validate(dataset: Dataset, algo: AlgoDescriptor, k: int = 10, seed: int = 0) -> CvResult:
    """Train on each fold's complement, score the fold, pool the results.

    Fold models train with seeds derived from (`seed`, fold index), so the
    whole result is deterministic. Training errors are re-raised as
    :class:`FoldError` naming the fold.
    """
    folds = stratified_folds(dataset, k, seed)
    everything = np.arange(len(dataset))
    fold_matrices = []
    pooled_scores = []
    pooled_truth = []
    for fi, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(everything, test_idx)
        fold_seed = derive_seed(derive_seed(seed, fi), algo.seed)
        try:
            model = train_model(replace(algo, seed=fold_seed), dataset.subset(train_idx))
        except ValueError as exc:
            raise FoldError(fi, exc) from exc
        scores = model_scores(model, dataset.X[test_idx])
        truth = dataset.y[test_idx]
        fold_matrices.append(confusion(truth, scores > 0.5))
        pooled_scores.append(scores)
        pooled_truth.append(truth)
    pooled = fold_matrices[0]
    for cm in fold_matrices[1:]:
        pooled = pooled + cm
    return CvResult(
        algo=algo,
        k=k,
        seed=seed,
        fold_matrices=tuple(fold_matrices),
        pooled_matrix=pooled,
        pooled_metrics=metrics(pooled),
        roc=roc_auc(np.concatenate(pooled_scores), np.concatenate(pooled_truth)),
    )


@dataclass(frozen=True)
class ComparisonRow:
    """One line of the comparison table: a configuration and its rates."""

    algo: str
    feature_set: str
    features: int
    report: MetricsReport
    auc: float


def compare(
    dataset: Dataset,
    algos: Sequence[AlgoDescriptor],
    k: int = 10,
    seed: int = 0,
    feature_sets: Sequence[FeatureSet] = (FeatureSet.CAPF,),
) -> list[ComparisonRow]:
    """Cross-validate every (feature set, algorithm) pair on `dataset`."""
    if not algos:
        raise ValueError("compare needs at least one algorithm")
    rows = []
    for fs in feature_sets:
        sub = select_feature_set(dataset.catalog, fs)
        projected = dataset if fs is FeatureSet.CAPF else dataset.select_features(sub.names)
        for algo in algos:
            cv = cross_validate(projected, algo, k, seed)
            rows.append(
                ComparisonRow(algo.kind, fs.value, len(sub), cv.pooled_metrics, cv.roc.auc)
            )
    return rows


_REPORT_HEADER = "algo,feature_set,features,TPR,TNR,FPR,FNR,ACC,ERR,precision,AUC"


def _fmt(value: float | None) -> str:
    if value is None:
        return "undefined"
    return f"{value:.3f}"


def write_report(rows: Sequence[ComparisonRow], path) -> None:
    """Write comparison rows as CSV with 3-decimal rates."""
    lines = [_REPORT_HEADER]
    for row in rows:
        m = row.report
        lines.append(
            ",".join(
                [row.algo, row.feature_set, str(row.features)]
                + [_fmt(v) for v in (m.tpr, m.tnr, m.fpr, m.fnr, m.acc, m.err)]
                + [_fmt(m.precision), _fmt(row.auc)]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
