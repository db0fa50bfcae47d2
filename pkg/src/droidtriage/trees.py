"""Decision-tree learners over binary features.

Split quality is the decrease in node impurity: parent impurity minus the
instance-weighted impurity of the two children, using information entropy or
the Gini index. Because features are binary, a feature spent on a path
carries no residual information, so it is never reconsidered below the split;
this bounds tree depth by the number of features.

The plain decision tree examines every unused feature at each node and can
optionally be simplified by reduced-error pruning against an internal
stratified holdout. The random tree examines only ``k`` features sampled
without replacement at each node and is never pruned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .dataset import Dataset, Label, stratified_fold_indices

ENTROPY = "entropy"
GINI = "gini"
CRITERIA = (ENTROPY, GINI)

# Internal stratified holdout used by reduced-error pruning: one fold in five.
_PRUNE_FOLDS = 5


@dataclass(frozen=True)
class ClassDistribution:
    """Class counts at a node and the fractions they induce."""

    n_benign: int
    n_malware: int

    @property
    def total(self) -> int:
        return self.n_benign + self.n_malware

    @property
    def fractions(self) -> tuple[float, float]:
        if self.total == 0:
            return (0.0, 0.0)
        return (self.n_benign / self.total, self.n_malware / self.total)


def _as_fractions(dist) -> np.ndarray:
    if isinstance(dist, ClassDistribution):
        dist = dist.fractions
    f = np.asarray(dist, dtype=np.float64)
    if f.size and (np.any(f < 0.0) or abs(f.sum() - 1.0) > 1e-9):
        raise ValueError("class fractions must be non-negative and sum to 1")
    return f


def entropy(dist) -> float:
    """Information entropy -sum f_i log2 f_i in bits, with 0 log 0 = 0.

    Accepts a :class:`ClassDistribution` or a sequence of class fractions.
    Ranges over [0, log2 m] for m classes.
    """
    f = _as_fractions(dist)
    nz = f[f > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def gini(dist) -> float:
    """Gini impurity 1 - sum f_i^2; ranges over [0, 1 - 1/m]."""
    f = _as_fractions(dist)
    return float(1.0 - (f * f).sum())


def _entropy_from_counts(mal, tot):
    """Vectorized two-class entropy from (malware count, total count)."""
    mal = np.asarray(mal, dtype=np.float64)
    tot = np.asarray(tot, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0.0, mal / np.where(tot > 0.0, tot, 1.0), 0.0)
        h = -np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
        q = 1.0 - p
        h -= np.where(q > 0.0, q * np.log2(np.where(q > 0.0, q, 1.0)), 0.0)
    return np.where(tot > 0.0, h, 0.0)


def _gini_from_counts(mal, tot):
    mal = np.asarray(mal, dtype=np.float64)
    tot = np.asarray(tot, dtype=np.float64)
    p = np.where(tot > 0.0, mal / np.where(tot > 0.0, tot, 1.0), 0.0)
    return 2.0 * p * (1.0 - p)


_IMPURITY = {ENTROPY: _entropy_from_counts, GINI: _gini_from_counts}


@dataclass(frozen=True)
class Leaf:
    """Terminal node holding the training class counts that reached it."""

    n_benign: int
    n_malware: int

    @property
    def malware_fraction(self) -> float:
        total = self.n_benign + self.n_malware
        return self.n_malware / total if total else 0.0


@dataclass(frozen=True)
class Split:
    """Internal node: test one feature bit, descend to `low` (0) or `high` (1)."""

    feature: int
    low: "TreeNode"
    high: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class TreeModel:
    """A trained tree plus the parameters that produced it.

    ``k`` is the number of random candidate features per split; 0 means all
    unused features were examined (the plain decision tree).
    """

    root: TreeNode
    criterion: str
    pruned: bool
    k: int
    seed: int
    n_features: int


def _grow(X, y, idx, unused, rng, k, impurity):
    """Recursive greedy growth over instance indices `idx`.

    `unused` is a boolean mask over features, mutated in place and restored
    on the way back up (cheaper than copying per node). When `k` is positive
    and fewer features than that remain, all remaining features are examined.
    Children are grown low side first so the random stream is consumed in a
    fixed order.
    """
    n = idx.size
    n_mal = int(y[idx].sum())
    leaf = Leaf(n - n_mal, n_mal)
    if n < 2 or n_mal == 0 or n_mal == n:
        return leaf
    candidates = np.flatnonzero(unused)
    if candidates.size == 0:
        return leaf
    if 0 < k < candidates.size:
        candidates = np.sort(rng.choice(candidates, size=k, replace=False))

    sub = X[np.ix_(idx, candidates)]
    y_sub = y[idx]
    pos = sub.sum(axis=0)
    pos_mal = y_sub @ sub
    parent = impurity(float(n_mal), float(n))
    child_high = impurity(pos_mal, pos)
    child_low = impurity(n_mal - pos_mal, n - pos)
    weighted = (pos * child_high + (n - pos) * child_low) / n
    # A feature constant within the node has zero decrease by definition;
    # mask it out so float jitter cannot promote it into an empty-child split.
    separates = (pos > 0.0) & (pos < n)
    gains = np.where(separates, parent - weighted, -np.inf)

    best = int(np.argmax(gains))  # first maximum, i.e. lowest feature index
    if gains[best] <= 0.0:
        return leaf
    feature = int(candidates[best])
    mask = X[idx, feature] == 1.0
    unused[feature] = False
    low = _grow(X, y, idx[~mask], unused, rng, k, impurity)
    high = _grow(X, y, idx[mask], unused, rng, k, impurity)
    unused[feature] = True
    return Split(feature, low, high)


def _grow_tree(dataset: Dataset, criterion: str, rng, k: int) -> TreeNode:
    X = dataset.X.astype(np.float64)
    y = dataset.y.astype(np.float64)
    idx = np.arange(len(dataset), dtype=np.intp)
    unused = np.ones(dataset.feature_count, dtype=bool)
    return _grow(X, y, idx, unused, rng, k, _IMPURITY[criterion])


def train_decision_tree(
    dataset: Dataset, criterion: str = ENTROPY, prune: bool = False, seed: int = 0
) -> TreeModel:
    """Greedy decision tree over all features.

    Splitting stops when a node is pure, has fewer than two instances, has no
    unused features left, or when the best impurity decrease is not positive.
    Ties between equally good features resolve to the lowest feature index.

    With ``prune`` set, the tree is grown on a stratified 80% of the data and
    simplified by reduced-error pruning against the held-out 20%: bottom-up,
    a subtree collapses to a leaf whenever the leaf makes no more mistakes on
    the holdout than the subtree did.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if not prune:
        root = _grow_tree(dataset, criterion, None, 0)
        return TreeModel(root, criterion, False, 0, seed, dataset.feature_count)

    folds = stratified_fold_indices(dataset.y, _PRUNE_FOLDS, seed)
    holdout_idx = folds[0]
    grow_idx = np.setdiff1d(np.arange(len(dataset)), holdout_idx)
    root = _grow_tree(dataset.subset(grow_idx), criterion, None, 0)
    X = dataset.X.astype(np.float64)
    y = dataset.y
    root, _ = _reduced_error_prune(root, X, y, holdout_idx)
    return TreeModel(root, criterion, True, 0, seed, dataset.feature_count)


def train_random_tree(dataset: Dataset, k: int, seed: int) -> TreeModel:
    """Entropy tree examining only `k` sampled candidate features per split.

    Candidates are drawn without replacement from the features unused on the
    path, from a stream seeded by `seed`; the tree is never pruned. With
    ``k`` equal to the feature count the sampled argmax is the global argmax,
    so the structure coincides with the unpruned decision tree.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if not 1 <= k <= dataset.feature_count:
        raise ValueError(
            f"k must lie in [1, {dataset.feature_count}], got {k}"
        )
    rng = np.random.default_rng(seed)
    root = _grow_tree(dataset, ENTROPY, rng, k)
    return TreeModel(root, ENTROPY, False, k, seed, dataset.feature_count)


def _subtree_counts(node: TreeNode) -> tuple[int, int]:
    if isinstance(node, Leaf):
        return node.n_benign, node.n_malware
    b0, m0 = _subtree_counts(node.low)
    b1, m1 = _subtree_counts(node.high)
    return b0 + b1, m0 + m1


def _leaf_errors(n_benign: int, n_malware: int, y, idx) -> int:
    majority_malware = n_malware > n_benign  # tie predicts benign
    wrong = (y[idx] == 0) if majority_malware else (y[idx] == 1)
    return int(np.sum(wrong))


def _reduced_error_prune(node: TreeNode, X, y, idx):
    """Return (possibly collapsed node, its error count on holdout `idx`)."""
    if isinstance(node, Leaf):
        return node, _leaf_errors(node.n_benign, node.n_malware, y, idx)
    mask = X[idx, node.feature] == 1.0
    low, e_low = _reduced_error_prune(node.low, X, y, idx[~mask])
    high, e_high = _reduced_error_prune(node.high, X, y, idx[mask])
    subtree_errors = e_low + e_high
    n_benign, n_malware = _subtree_counts(node)
    leaf_errors = _leaf_errors(n_benign, n_malware, y, idx)
    if leaf_errors <= subtree_errors:
        return Leaf(n_benign, n_malware), leaf_errors
    return Split(node.feature, low, high), subtree_errors


def _descend(root: TreeNode, bits) -> Leaf:
    node = root
    while isinstance(node, Split):
        node = node.high if bits[node.feature] else node.low
    return node


def predict_tree(model: TreeModel, vector: Sequence[int]) -> tuple[Label, float]:
    """Walk the tree by feature bits; the score is the leaf malware fraction.

    The label is MALWARE when the fraction exceeds 0.5; an exact tie predicts
    BENIGN.
    """
    bits = np.asarray(vector)
    if bits.shape != (model.n_features,):
        raise ValueError(
            f"vector length {bits.shape} does not match model features {model.n_features}"
        )
    score = _descend(model.root, bits).malware_fraction
    return (Label.MALWARE if score > 0.5 else Label.BENIGN), score


def tree_scores(model: TreeModel, X) -> np.ndarray:
    """Leaf malware fraction for every row of `X`."""
    X = np.asarray(X)
    if X.shape[1] != model.n_features:
        raise ValueError(
            f"matrix width {X.shape[1]} does not match model features {model.n_features}"
        )
    return np.array([_descend(model.root, row).malware_fraction for row in X])


def node_count(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + node_count(node.low) + node_count(node.high)


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.low), tree_depth(node.high))


def default_split_count(n_features: int) -> int:
    """Default number of random candidates per split: floor(log2 F) + 1."""
    if n_features < 1:
        raise ValueError("need at least one feature")
    return n_features.bit_length()  # floor(log2 F) + 1
