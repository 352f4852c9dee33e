"""Command-line entry point: ingest | inject | features | train-model | detect | evaluate."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import classifier, report
from .dataset import load_dataset, normalize_features, save_dataset, split_views
from .evaluation import (format_summary, run_experiment, run_multiview_experiment,
                         write_report_csv)
from .outlierness import (PipelineParams, multiview_outlierness,
                          single_view_features, write_features)
from .simulate import NAMED_CONFIGS, OutlierConfig, build_experiment_instance

CONFIG_KEYS = ("k", "q", "percentile", "entropy_tol", "normalize", "seed",
               "views", "label_col", "threads", "model", "out")


@dataclass
class RunConfig:
    """Merged run options: flags take precedence over the config file."""

    k: int = 40
    q: int | None = None
    percentile: float = 75.0
    entropy_tol: float = 0.2
    normalize: bool = False
    seed: int = 0
    views: int = 1
    label_col: str | int = -1
    threads: int = 0
    model: str = "model.json"
    out: str | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.q is not None and self.q < 2:
            raise ValueError("q must be at least 2")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError("percentile must lie in (0, 100]")
        if not 0.0 <= self.entropy_tol <= 1.0:
            raise ValueError("entropy tolerance must lie in [0, 1]")
        if self.views < 1:
            raise ValueError("views must be at least 1")
        if self.threads < 1:
            self.threads = os.cpu_count() or 1

    def pipeline_params(self) -> PipelineParams:
        return PipelineParams(k=self.k, clique_size=self.q, percentile=self.percentile,
                              entropy_tol=self.entropy_tol, normalize=self.normalize)


def _merge_run_config(args: argparse.Namespace) -> RunConfig:
    file_values: dict = {}
    if getattr(args, "config_file", None):
        path = Path(args.config_file)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        file_values = json.loads(path.read_text())
        unknown = set(file_values) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config file keys: {sorted(unknown)}")
    merged: dict = {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_values:
            merged[key] = file_values[key]
    if merged.get("label_col") is not None:
        merged["label_col"] = _parse_label_col(merged["label_col"])
    return RunConfig(**merged)


def _parse_label_col(value) -> str | int:
    # Numeric strings are treated as 0-based positions, anything else as a name.
    if isinstance(value, int):
        return value
    try:
        return int(value)
    except (TypeError, ValueError):
        return str(value)


def _add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="mutual kNN neighbor count (default 40)")
    p.add_argument("--q", type=int,
                   help="clique size for percolation (default: per-graph automatic)")
    p.add_argument("--percentile", type=float,
                   help="edge-weight percentile for the extension tolerance (default 75)")
    p.add_argument("--entropy-tol", dest="entropy_tol", type=float,
                   help="normalized-entropy tolerance (default 0.2)")
    p.add_argument("--normalize", dest="normalize", action="store_true",
                   default=None, help="z-score features before graph construction")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   default=None, help="skip z-scoring (the default)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--views", type=int, help="number of feature views (default 1)")
    p.add_argument("--label-col", dest="label_col",
                   help="label column name or 0-based index (default: last column)")
    p.add_argument("--threads", type=int,
                   help="worker count for repeated experiments (default: all cores)")
    p.add_argument("--model", help="model file path (default model.json)")
    p.add_argument("--out", help="output file path")
    p.add_argument("--config-file", dest="config_file",
                   help="flat JSON file with the same keys as the flags")
    p.add_argument("--no-figures", dest="figures", action="store_false",
                   help="skip rendering figures next to the CSV outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cod",
        description="Community-based outlier detection on labeled tabular data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a CSV dataset and report its shape")
    p.add_argument("dataset", help="CSV file with a header row")
    _add_common_options(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("inject", help="inject ground-truth outliers into a clean CSV")
    p.add_argument("dataset")
    p.add_argument("--config", required=True, choices=sorted(NAMED_CONFIGS),
                   help="outlier configuration (class%%-attribute%%)")
    _add_common_options(p)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("features", help="compute outlierness features for a dataset")
    p.add_argument("dataset")
    _add_common_options(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train-model", help="train the outlier scorer on synthetic data")
    p.add_argument("--corpus-datasets", type=int, default=20,
                   help="number of synthetic datasets in the corpus (default 20)")
    _add_common_options(p)
    p.set_defaults(func=cmd_train_model)

    p = sub.add_parser("detect", help="score and flag outliers in a dataset")
    p.add_argument("dataset")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="decision threshold on the outlier score (default 0.5)")
    _add_common_options(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="run the repeated injection experiment")
    p.add_argument("dataset")
    p.add_argument("--config", required=True, choices=sorted(NAMED_CONFIGS),
                   help="outlier configuration (class%%-attribute%%)")
    p.add_argument("--repeats", type=int, default=50,
                   help="number of randomized repeats (default 50)")
    _add_common_options(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def _compute_features(path: str, cfg: RunConfig):
    ds = load_dataset(path, cfg.label_col)
    if cfg.views > 1:
        mv = split_views(ds, cfg.views, cfg.seed)
        return ds, multiview_outlierness(mv, cfg.pipeline_params())
    return ds, single_view_features(ds, cfg.pipeline_params())


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _merge_run_config(args)
    ds = load_dataset(args.dataset, cfg.label_col)
    print(f"{args.dataset}: {ds.n_samples} samples, {ds.n_features} features, "
          f"{ds.n_classes} classes")
    if cfg.out:
        save_dataset(ds, cfg.out)
        print(f"wrote {cfg.out}")
    return 0


def cmd_inject(args: argparse.Namespace) -> int:
    cfg = _merge_run_config(args)
    ds = load_dataset(args.dataset, cfg.label_col)
    corrupted = build_experiment_instance(ds, OutlierConfig.named(args.config, cfg.seed))
    out = cfg.out or "injected.csv"
    save_dataset(corrupted.data, out, truth=corrupted.truth)
    n_class = corrupted.truth.count("class")
    n_attr = corrupted.truth.count("attribute")
    print(f"wrote {out}: {n_class} class outliers, {n_attr} attribute outliers")
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    cfg = _merge_run_config(args)
    _, feats = _compute_features(args.dataset, cfg)
    out = cfg.out or "features.csv"
    write_features(feats, out)
    print(f"wrote {out}")
    if args.figures:
        figure = Path(out).with_suffix(".png")
        report.render_outlierness_scatter(feats, figure)
        print(f"wrote {figure}")
    return 0


def cmd_train_model(args: argparse.Namespace) -> int:
    from .evaluation import auc

    cfg = _merge_run_config(args)
    model, phi, truth = classifier.train_default_model(cfg.seed, args.corpus_datasets)
    classifier.save_model(model, cfg.model)
    corpus_auc = auc(classifier.score_outlierness(model, phi), truth)
    print(f"wrote {cfg.model} (corpus AUC {corpus_auc:.4f}, "
          f"{len(truth)} training samples)")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    cfg = _merge_run_config(args)
    model = classifier.load_model(cfg.model)
    _, feats = _compute_features(args.dataset, cfg)
    scores = classifier.score_outlierness(model, feats.values)
    flags = classifier.detect(model, feats, args.threshold)
    out = cfg.out or "scores.csv"
    with Path(out).open("w") as fh:
        fh.write("sample_index,phi1,phi2,score,flag\n")
        for i in range(feats.n_samples):
            fh.write(f"{i},{float(feats.values[i, 0])!r},{float(feats.values[i, 1])!r},"
                     f"{float(scores[i])!r},{int(flags[i])}\n")
    print(f"wrote {out}: {int(flags.sum())} of {feats.n_samples} samples flagged")
    if args.figures:
        figure = Path(out).with_suffix(".png")
        report.render_outlierness_scatter(feats, figure, scores=scores, flags=flags)
        print(f"wrote {figure}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _merge_run_config(args)
    model = classifier.load_model(cfg.model)
    ds = load_dataset(args.dataset, cfg.label_col)
    config = OutlierConfig.named(args.config, cfg.seed)
    name = Path(args.dataset).stem
    if cfg.views > 1:
        rep = run_multiview_experiment(ds, cfg.views, config, cfg.pipeline_params(),
                                       model, args.repeats, name, cfg.threads)
    else:
        rep = run_experiment(ds, config, cfg.pipeline_params(), model,
                             args.repeats, name, cfg.threads)
    out = cfg.out or "report.csv"
    write_report_csv([rep], out)
    summary = format_summary([rep])
    Path(out).with_suffix(".txt").write_text(summary)
    print(summary, end="")
    if args.figures:
        figure = Path(out).with_suffix(".png")
        report.render_auc_distribution([rep], figure)
        print(f"wrote {figure}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
