"""Bernoulli naive Bayes with Laplace smoothing.

Each feature bit is modeled as class-conditionally independent Bernoulli.
Smoothing keeps every conditional strictly inside (0, 1), and posteriors are
evaluated in log space so 179-feature products cannot underflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Label


@dataclass(frozen=True, eq=False)
class NbModel:
    """Smoothed class-conditional bit probabilities plus the malware prior."""

    prior_malware: float
    theta_benign: np.ndarray
    theta_malware: np.ndarray
    alpha: float

    def __post_init__(self):
        for attr in ("theta_benign", "theta_malware"):
            t = np.ascontiguousarray(getattr(self, attr), dtype=np.float64)
            if np.any(t <= 0.0) or np.any(t >= 1.0):
                raise ValueError(f"{attr} must lie strictly inside (0, 1)")
            t.setflags(write=False)
            object.__setattr__(self, attr, t)
        if self.theta_benign.shape != self.theta_malware.shape:
            raise ValueError("conditional probability arrays must have equal shape")
        if not 0.0 < self.prior_malware < 1.0:
            raise ValueError("prior must lie strictly inside (0, 1)")

    @property
    def n_features(self) -> int:
        return self.theta_benign.shape[0]


def train_nb(dataset: Dataset, alpha: float = 1.0) -> NbModel:
    """Fit conditionals theta = (count(bit=1, class) + alpha) / (n_class + 2 alpha).

    The prior is the malware fraction of the training set. Requires both
    classes present and positive smoothing.
    """
    if alpha <= 0.0:
        raise ValueError(f"smoothing alpha must be positive, got {alpha}")
    n_ben, n_mal = dataset.class_counts()
    if n_ben == 0 or n_mal == 0:
        raise ValueError("training requires both classes present")
    X = dataset.X.astype(np.float64)
    mal_mask = dataset.y == 1
    pos_mal = X[mal_mask].sum(axis=0)
    pos_ben = X[~mal_mask].sum(axis=0)
    return NbModel(
        prior_malware=n_mal / (n_ben + n_mal),
        theta_benign=(pos_ben + alpha) / (n_ben + 2.0 * alpha),
        theta_malware=(pos_mal + alpha) / (n_mal + 2.0 * alpha),
        alpha=alpha,
    )


def nb_scores(model: NbModel, X) -> np.ndarray:
    """Posterior P(malware | x) for every row of `X`, computed in log space."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"matrix width {X.shape[1] if X.ndim == 2 else X.shape} does not match "
            f"model features {model.n_features}"
        )
    log_mal = np.log(model.prior_malware) + X @ np.log(model.theta_malware) + (
        1.0 - X
    ) @ np.log1p(-model.theta_malware)
    log_ben = np.log1p(-model.prior_malware) + X @ np.log(model.theta_benign) + (
        1.0 - X
    ) @ np.log1p(-model.theta_benign)
    peak = np.maximum(log_mal, log_ben)
    mal = np.exp(log_mal - peak)
    ben = np.exp(log_ben - peak)
    return mal / (mal + ben)


def predict_nb(model: NbModel, vector) -> tuple[Label, float]:
    """Classify one vector; MALWARE when the posterior exceeds 0.5.

    An exact tie predicts BENIGN, the conservative choice for a detector
    judged on its false positive rate.
    """
    bits = np.asarray(vector)
    if bits.shape != (model.n_features,):
        raise ValueError(
            f"vector length {bits.shape} does not match model features {model.n_features}"
        )
    score = float(nb_scores(model, bits[None, :])[0])
    return (Label.MALWARE if score > 0.5 else Label.BENIGN), score
