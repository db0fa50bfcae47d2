"""Command-line front end wiring the library into one pipeline.

Subcommands: synth, extract, rank, train, predict, crossval, compare, roc.
Exit codes: 0 success, 1 usage error, 2 data or model error. stdout carries
only data and output paths; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .algo import KINDS, AlgoDescriptor, model_scores, train_model
from .catalog import (
    CatalogError,
    FeatureCatalog,
    FeatureSet,
    default_catalog,
    load_catalog,
    select_feature_set,
)
from .dataset import (
    Dataset,
    DatasetError,
    Label,
    load_spec,
    read_csv,
    read_vectors,
    synthesize,
    write_csv,
    write_vector_csv,
)
from .evaluation import ComparisonRow, FoldError, RocCurve, compare, cross_validate, roc_auc, write_report, write_roc
from .extract import scan_app
from .modelio import ModelFormatError, load_model, save_model
from .ranking import rank_features, write_ranking

_DATA_ERRORS = (CatalogError, DatasetError, ModelFormatError, FoldError, OSError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _base_catalog(args) -> FeatureCatalog:
    return default_catalog() if args.catalog is None else load_catalog(args.catalog)


def _load_projected(args) -> tuple[FeatureCatalog, Dataset]:
    """Read `--data` against the full catalog, then apply `--feature-set`.

    The file header must match the catalog exactly; projection happens on the
    loaded dataset, and the returned catalog describes the projected columns.
    """
    catalog = _base_catalog(args)
    dataset = read_csv(args.data, catalog)
    fs = getattr(args, "feature_set", None)
    if fs:
        sub = select_feature_set(catalog, FeatureSet(fs))
        return sub, dataset.select_features(sub.names)
    return catalog, dataset


def _algo_from_args(args, kind: str) -> AlgoDescriptor:
    return AlgoDescriptor(
        kind=kind,
        seed=args.seed,
        alpha=args.alpha,
        criterion=args.criterion,
        prune=args.prune,
        k=args.k,
        trees=args.trees,
        bootstrap_fraction=args.bootstrap,
        bootstrap=not args.no_bootstrap,
        max_iter=args.max_iter,
        cv_folds=args.cv_folds,
    )


def _add_algo_flags(p: _Parser, multi: bool = False) -> None:
    help_kind = "classifier kind" + (", comma-separated list allowed" if multi else "")
    p.add_argument("--algo", required=True, help=f"{help_kind}: one of {', '.join(KINDS)}")
    p.add_argument("--alpha", type=float, default=1.0, help="nb smoothing (default 1.0)")
    p.add_argument("--criterion", choices=["entropy", "gini"], default="entropy")
    p.add_argument("--prune", action="store_true", help="dt: reduced-error pruning")
    p.add_argument("--k", type=int, default=None, help="rt/rf: candidates per split (default log2 F + 1)")
    p.add_argument("--trees", type=int, default=10, help="rf: ensemble size (default 10)")
    p.add_argument("--bootstrap", type=float, default=1.0, help="rf: resample fraction (default 1.0)")
    p.add_argument("--no-bootstrap", action="store_true", help="rf: train every tree on the full set")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=30, help="sl: boosting iteration cap")
    p.add_argument("--cv-folds", dest="cv_folds", type=int, default=5, help="sl: folds for iteration selection")


def _add_common(p: _Parser, *, multi_sets: bool = False) -> None:
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--catalog", default=None, help="catalog CSV (default: shipped catalog)")
    if multi_sets:
        p.add_argument(
            "--feature-set",
            dest="feature_set",
            default=None,
            help="comma-separated subset list drawn from pf, af, capf",
        )
    else:
        p.add_argument(
            "--feature-set", dest="feature_set", choices=["pf", "af", "capf"], default=None
        )
    p.add_argument("--seed", type=int, default=0)


def _build_parser() -> _Parser:
    parser = _Parser(prog="droidtriage", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p.add_argument("--spec", default=None, help="synthesis spec file (default: shipped calibrated spec)")
    p.add_argument("--catalog", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("extract", help="scan an unpacked app directory into a vector CSV")
    p.add_argument("app_dir", help="root of the unpacked application tree")
    p.add_argument("--catalog", default=None)
    p.add_argument("--feature-set", dest="feature_set", choices=["pf", "af", "capf"], default=None)
    p.add_argument("--label", choices=["benign", "malware"], default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("rank", help="mutual-information feature ranking")
    _add_common(p)
    p.add_argument("--top", type=int, default=None, help="keep only the top K features")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("train", help="train a classifier and save the model file")
    _add_common(p)
    _add_algo_flags(p)
    p.add_argument("--model", required=True, help="output model path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score a dataset with a saved model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="predictions CSV")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation report")
    _add_common(p)
    _add_algo_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", required=True, help="report CSV")
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("compare", help="cross-validate several classifiers side by side")
    _add_common(p, multi_sets=True)
    _add_algo_flags(p, multi=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", required=True, help="report CSV")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("roc", help="ROC staircase (CSV, optionally SVG) for a saved model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="ROC CSV")
    p.add_argument("--svg", default=None, help="also write an SVG plot here")
    p.set_defaults(func=_cmd_roc)
    return parser


def _cmd_synth(args) -> int:
    catalog = default_catalog() if args.catalog is None else load_catalog(args.catalog)
    if args.spec is None:
        ref = resources.files("droidtriage").joinpath("data/reference.spec")
        with resources.as_file(ref) as p:
            spec = load_spec(p, catalog)
    else:
        spec = load_spec(args.spec, catalog)
    write_csv(synthesize(spec, args.seed), args.out)
    print(args.out)
    return 0


def _cmd_extract(args) -> int:
    catalog = _base_catalog(args)
    if args.feature_set:
        catalog = select_feature_set(catalog, FeatureSet(args.feature_set))
    bits = scan_app(args.app_dir, catalog)
    label = None if args.label is None else Label[args.label.upper()]
    write_vector_csv(catalog, bits, args.out, label=label)
    print(args.out)
    return 0


def _cmd_rank(args) -> int:
    _, dataset = _load_projected(args)
    ranking = rank_features(dataset)
    if args.top is not None:
        if not 1 <= args.top <= len(ranking):
            raise _UsageError(f"--top must lie in [1, {len(ranking)}], got {args.top}")
        ranking = ranking[: args.top]
    if args.out is None:
        print("rank,name,score")
        for i, r in enumerate(ranking, start=1):
            print(f"{i},{r.name},{r.score:.6f}")
    else:
        write_ranking(ranking, args.out)
        print(args.out)
    return 0


def _resolve_algo(args, kind: str) -> AlgoDescriptor:
    if kind not in KINDS:
        raise _UsageError(f"unknown algorithm {kind!r}; choose from {', '.join(KINDS)}")
    try:
        return _algo_from_args(args, kind)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _cmd_train(args) -> int:
    catalog, dataset = _load_projected(args)
    algo = _resolve_algo(args, args.algo)
    model = train_model(algo, dataset)
    save_model(model, args.model, catalog)
    print(args.model)
    return 0


def _cmd_predict(args) -> int:
    catalog = _base_catalog(args)
    X, _ = read_vectors(args.data, catalog)
    if args.feature_set:
        sub = select_feature_set(catalog, FeatureSet(args.feature_set))
        X = X[:, [catalog.index_of(n) for n in sub.names]]
        catalog = sub
    model = load_model(args.model, catalog)
    scores = model_scores(model, X)
    rows = ["row,label,score"]
    for i, s in enumerate(scores, start=1):
        label = "malware" if s > 0.5 else "benign"
        rows.append(f"{i},{label},{float(s)!r}")
    Path(args.out).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    print(args.out)
    return 0


def _cmd_crossval(args) -> int:
    _, dataset = _load_projected(args)
    algo = _resolve_algo(args, args.algo)
    try:
        cv = cross_validate(dataset, algo, args.folds, args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    fs = args.feature_set or "capf"
    row = ComparisonRow(algo.kind, fs, dataset.feature_count, cv.pooled_metrics, cv.roc.auc)
    write_report([row], args.out)
    print(args.out)
    return 0


def _cmd_compare(args) -> int:
    catalog = _base_catalog(args)
    dataset = read_csv(args.data, catalog)
    algos = [_resolve_algo(args, kind.strip()) for kind in args.algo.split(",") if kind.strip()]
    if not algos:
        raise _UsageError("--algo must name at least one classifier")
    try:
        sets = [FeatureSet(s.strip()) for s in (args.feature_set or "capf").split(",")]
    except ValueError:
        raise _UsageError(
            f"--feature-set must list values from pf, af, capf; got {args.feature_set!r}"
        ) from None
    try:
        rows = compare(dataset, algos, args.folds, args.seed, feature_sets=sets)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    write_report(rows, args.out)
    print(args.out)
    return 0


def _cmd_roc(args) -> int:
    catalog, dataset = _load_projected(args)
    model = load_model(args.model, catalog)
    curve = roc_auc(model_scores(model, dataset.X), dataset.y)
    write_roc(curve, args.out)
    print(args.out)
    if args.svg:
        Path(args.svg).write_text(roc_svg(curve), encoding="utf-8", newline="\n")
        print(args.svg)
    return 0


def roc_svg(curve: RocCurve, size: int = 480, margin: int = 56) -> str:
    """Standalone SVG rendering of a ROC staircase with its AUC annotated."""
    span = size - 2 * margin

    def sx(fpr: float) -> float:
        return margin + fpr * span

    def sy(tpr: float) -> float:
        return size - margin - tpr * span

    path = " ".join(f"{sx(f):.2f},{sy(t):.2f}" for f, t, _ in curve.points)
    ticks = []
    for i in range(6):
        v = i / 5
        x, y = sx(v), sy(v)
        ticks.append(
            f'<line x1="{x:.2f}" y1="{size - margin}" x2="{x:.2f}" y2="{size - margin + 5}" stroke="black"/>'
            f'<text x="{x:.2f}" y="{size - margin + 18}" font-size="11" text-anchor="middle">{v:.1f}</text>'
            f'<line x1="{margin - 5}" y1="{y:.2f}" x2="{margin}" y2="{y:.2f}" stroke="black"/>'
            f'<text x="{margin - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{v:.1f}</text>'
        )
    return f"""<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">
<rect width="{size}" height="{size}" fill="white"/>
<rect x="{margin}" y="{margin}" width="{span}" height="{span}" fill="none" stroke="black"/>
<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(1):.2f}" stroke="#999" stroke-dasharray="4,4"/>
<polyline points="{path}" fill="none" stroke="#c22" stroke-width="1.6"/>
{''.join(ticks)}
<text x="{size / 2:.0f}" y="{size - 14}" font-size="13" text-anchor="middle">false positive rate</text>
<text x="16" y="{size / 2:.0f}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {size / 2:.0f})">true positive rate</text>
<text x="{sx(0.62):.0f}" y="{sy(0.12):.0f}" font-size="14">AUC = {curve.auc:.3f}</text>
</svg>
"""


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"droidtriage: error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"droidtriage: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
