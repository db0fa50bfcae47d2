"""Model persistence: a line-oriented text format shared by all five kinds.

Every file starts with ``droidtriage-model v1 <kind>`` and the fingerprint of
the catalog the model was trained under; loading verifies the fingerprint
against the caller's catalog so vectors can never be silently misaligned.
Floats are written with ``repr``, which round-trips exactly, and tree leaves
store integer counts, so a reloaded model predicts bit-identically.
"""

from __future__ import annotations

from pathlib import Path

from .algo import Model, model_kind
from .bayes import NbModel
from .catalog import FeatureCatalog
from .ensemble import ForestModel, ForestParams, LogitModel, LogitRegressor
from .trees import Leaf, Split, TreeModel, TreeNode

_MAGIC = "droidtriage-model"
_VERSION = "v1"


class ModelFormatError(ValueError):
    """A model file is malformed or belongs to a different catalog."""


def _serialize_node(node: TreeNode, out: list[str]) -> None:
    if isinstance(node, Leaf):
        out.append(f"L {node.n_benign} {node.n_malware}")
    else:
        out.append(f"S {node.feature}")
        _serialize_node(node.low, out)
        _serialize_node(node.high, out)


class _Lines:
    def __init__(self, lines: list[str], path):
        self._lines = lines
        self._pos = 0
        self._path = path

    def next(self) -> str:
        if self._pos >= len(self._lines):
            raise ModelFormatError(f"{self._path}: unexpected end of file")
        line = self._lines[self._pos]
        self._pos += 1
        return line

    def next_field(self, key: str) -> str:
        line = self.next()
        tag, _, value = line.partition(" ")
        if tag != key:
            raise ModelFormatError(f"{self._path}: expected {key!r}, got {line!r}")
        return value

    def done(self) -> bool:
        return self._pos >= len(self._lines)


def _parse_node(lines: _Lines) -> TreeNode:
    parts = lines.next().split(" ")
    if parts[0] == "L" and len(parts) == 3:
        return Leaf(int(parts[1]), int(parts[2]))
    if parts[0] == "S" and len(parts) == 2:
        feature = int(parts[1])
        low = _parse_node(lines)
        high = _parse_node(lines)
        return Split(feature, low, high)
    raise ModelFormatError(f"{lines._path}: bad tree node line {' '.join(parts)!r}")


def _tree_body(model: TreeModel) -> list[str]:
    out = [
        f"criterion {model.criterion}",
        f"pruned {int(model.pruned)}",
        f"k {model.k}",
        f"seed {model.seed}",
        f"n_features {model.n_features}",
    ]
    _serialize_node(model.root, out)
    return out


def _parse_tree_body(lines: _Lines) -> TreeModel:
    criterion = lines.next_field("criterion")
    pruned = bool(int(lines.next_field("pruned")))
    k = int(lines.next_field("k"))
    seed = int(lines.next_field("seed"))
    n_features = int(lines.next_field("n_features"))
    root = _parse_node(lines)
    return TreeModel(root, criterion, pruned, k, seed, n_features)


def save_model(model: Model, path, catalog: FeatureCatalog) -> None:
    """Write `model` to `path`, stamped with `catalog`'s fingerprint."""
    kind = model_kind(model)
    out = [f"{_MAGIC} {_VERSION} {kind}", f"catalog {catalog.fingerprint()}"]
    if isinstance(model, NbModel):
        out.append(f"alpha {float(model.alpha)!r}")
        out.append(f"prior {float(model.prior_malware)!r}")
        out.append("theta_benign " + " ".join(repr(float(v)) for v in model.theta_benign))
        out.append("theta_malware " + " ".join(repr(float(v)) for v in model.theta_malware))
    elif isinstance(model, TreeModel):
        out.extend(_tree_body(model))
    elif isinstance(model, ForestModel):
        p = model.params
        out.append(f"trees {p.trees}")
        out.append(f"k {p.k}")
        out.append(f"bootstrap_fraction {p.bootstrap_fraction!r}")
        out.append(f"bootstrap {int(p.bootstrap)}")
        out.append(f"seed {p.seed}")
        for tree in model.trees:
            out.append("tree")
            out.extend(_tree_body(tree))
    elif isinstance(model, LogitModel):
        out.append(f"intercept {model.intercept!r}")
        out.append(f"iterations_used {model.iterations_used}")
        out.append(f"max_iterations {model.max_iterations}")
        out.append(f"cv_folds {model.cv_folds}")
        out.append(f"n_features {model.n_features}")
        for reg in model.regressors:
            out.append(f"R {reg.feature} {reg.value_if_0!r} {reg.value_if_1!r}")
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")


def load_model(path, catalog: FeatureCatalog) -> Model:
    """Load a model file, verifying version, kind, and catalog fingerprint."""
    text = Path(path).read_text(encoding="utf-8")
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    lines = _Lines(raw, path)
    header = lines.next().split(" ")
    if len(header) != 3 or header[0] != _MAGIC:
        raise ModelFormatError(f"{path}: not a model file")
    if header[1] != _VERSION:
        raise ModelFormatError(f"{path}: unsupported version {header[1]!r}")
    kind = header[2]
    stored = lines.next_field("catalog")
    actual = catalog.fingerprint()
    if stored != actual:
        raise ModelFormatError(
            f"{path}: catalog fingerprint mismatch: model built for {stored}, "
            f"current catalog is {actual}"
        )
    try:
        if kind == "nb":
            alpha = float(lines.next_field("alpha"))
            prior = float(lines.next_field("prior"))
            theta_b = [float(v) for v in lines.next_field("theta_benign").split(" ")]
            theta_m = [float(v) for v in lines.next_field("theta_malware").split(" ")]
            model: Model = NbModel(prior, theta_b, theta_m, alpha)
        elif kind in ("dt", "rt"):
            model = _parse_tree_body(lines)
        elif kind == "rf":
            trees = int(lines.next_field("trees"))
            k = int(lines.next_field("k"))
            fraction = float(lines.next_field("bootstrap_fraction"))
            bootstrap = bool(int(lines.next_field("bootstrap")))
            seed = int(lines.next_field("seed"))
            params = ForestParams(trees, k, fraction, bootstrap, seed)
            members = []
            for _ in range(trees):
                if lines.next() != "tree":
                    raise ModelFormatError(f"{path}: expected 'tree' marker")
                members.append(_parse_tree_body(lines))
            model = ForestModel(tuple(members), params)
        elif kind == "sl":
            intercept = float(lines.next_field("intercept"))
            iterations = int(lines.next_field("iterations_used"))
            max_iterations = int(lines.next_field("max_iterations"))
            cv_folds = int(lines.next_field("cv_folds"))
            n_features = int(lines.next_field("n_features"))
            regs = []
            for _ in range(iterations):
                parts = lines.next().split(" ")
                if len(parts) != 4 or parts[0] != "R":
                    raise ModelFormatError(f"{path}: bad regressor line")
                regs.append(LogitRegressor(int(parts[1]), float(parts[2]), float(parts[3])))
            model = LogitModel(
                intercept, tuple(regs), iterations, max_iterations, cv_folds, n_features
            )
        else:
            raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"{path}: malformed model file: {exc}") from None
    if not lines.done():
        raise ModelFormatError(f"{path}: trailing content after model body")
    return model
