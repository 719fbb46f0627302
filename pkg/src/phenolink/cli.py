"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, sample, embed, train,
evaluate) plus ``pipeline`` for a one-shot run from a TOML config.
Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import PhenolinkError, __version__
from .config import MODEL_NAMES, ConfigError, ModelSpec, load_config
from .embed import EdgeOperator, SkipGramConfig, WalkConfig
from .ingest import ColumnSpec
from .pipeline import (
    run_pipeline,
    stage_embed,
    stage_evaluate,
    stage_ingest,
    stage_sample,
    stage_train,
)
from .sampling import SamplingConfig

logger = logging.getLogger("phenolink")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=Path("."), metavar="DIR",
                        help="output directory (default: current directory)")
    parser.add_argument("--seed", type=int, default=0, help="global seed (default 0)")


def _delimiter(text: str) -> str:
    return {"\\t": "\t", "tab": "\t"}.get(text, text)


def _negative_count(text: str):
    if text == "all":
        return "all"
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phenolink",
        description="Phenotype-gene link prediction pipeline",
    )
    parser.add_argument("--version", action="version", version=f"phenolink {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse annotations, build graph, emit statistics")
    p.add_argument("input", type=Path, help="annotation file")
    _add_common(p)
    p.add_argument("--delimiter", type=_delimiter, default="\t",
                   help="column delimiter (default tab; 'tab' and '\\t' accepted)")
    p.add_argument("--source-col", type=int, default=0, help="0-based source column")
    p.add_argument("--target-col", type=int, default=1, help="0-based target column")
    p.add_argument("--header", action=argparse.BooleanOptionalAction, default=False,
                   help="skip the first non-comment line")
    p.add_argument("--comment-prefix", default="#")
    p.add_argument("--source-kind", default="HPO")
    p.add_argument("--target-kind", default="GENE")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("sample", help="build the labeled pair dataset")
    p.add_argument("--edges", type=Path, required=True,
                   help="canonical edge list (associations.tsv from ingest)")
    _add_common(p)
    p.add_argument("--positive-fraction", type=float, default=0.3)
    p.add_argument("--negative-count", type=_negative_count, default="all",
                   metavar="N|all")
    p.add_argument("--max-connectivity-checks", type=int, default=None, metavar="N")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--stratify", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("embed", help="train node embeddings on the residual graph")
    p.add_argument("--edges", type=Path, required=True,
                   help="residual edge list (residual.tsv from sample)")
    _add_common(p)
    p.add_argument("--dim", type=int, default=128, help="embedding dimensions (default 128)")
    p.add_argument("--walk-length", type=int, default=30)
    p.add_argument("--walks-per-node", type=int, default=200)
    p.add_argument("--p", type=float, default=1.0, help="return parameter")
    p.add_argument("--q", type=float, default=1.0, help="in-out parameter")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--step-size", type=float, default=0.025)
    p.add_argument("--noise-exponent", type=float, default=0.75)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("train", help="fit one model family on the train split")
    p.add_argument("--pairs", type=Path, required=True, help="pairs.csv from sample")
    p.add_argument("--embeddings", type=Path, required=True, help="embeddings.txt from embed")
    p.add_argument("--model", required=True, choices=MODEL_NAMES)
    _add_common(p)
    p.add_argument("--operator", default="hadamard",
                   choices=[op.value for op in EdgeOperator])
    group = p.add_argument_group("model options (family-specific)")
    group.add_argument("--learning-rate", type=float, dest="learning_rate")
    group.add_argument("--max-depth", type=int, dest="max_depth")
    group.add_argument("--n-trees", type=int, dest="n_trees")
    group.add_argument("--max-leaves", type=int, dest="max_leaves")
    group.add_argument("--scale-pos-weight", type=float, dest="scale_pos_weight")
    group.add_argument("--max-bins", type=int, dest="max_bins")
    group.add_argument("--min-samples-leaf", type=int, dest="min_samples_leaf")
    group.add_argument("--hidden", type=str, dest="hidden", metavar="H1,H2",
                       help="mlp hidden sizes, comma separated")
    group.add_argument("--epochs", type=int, dest="epochs")
    group.add_argument("--batch-size", type=int, dest="batch_size")
    group.add_argument("--step-size", type=float, dest="step_size")
    group.add_argument("--l2", type=float, dest="l2")
    group.add_argument("--max-iter", type=int, dest="max_iter")
    group.add_argument("--tol", type=float, dest="tol")

    p = sub.add_parser("evaluate", help="score a split and write the report")
    p.add_argument("--pairs", type=Path, required=True)
    p.add_argument("--embeddings", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True, help="model JSON from train")
    _add_common(p)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--split", default="test", choices=("train", "test", "all"))
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("pipeline", help="run every stage from a TOML config")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, default=None, help="override [run] out_dir")
    p.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p.add_argument("--workers", type=int, default=None, help="override [run] workers")
    p.add_argument("--no-figures", action="store_true")

    return parser


_MODEL_OPTION_KEYS = (
    "learning_rate", "max_depth", "n_trees", "max_leaves", "scale_pos_weight",
    "max_bins", "min_samples_leaf", "hidden", "epochs", "batch_size",
    "step_size", "l2", "max_iter", "tol",
)


def _model_spec_from_args(args: argparse.Namespace) -> ModelSpec:
    options = {}
    for key in _MODEL_OPTION_KEYS:
        value = getattr(args, key, None)
        if value is None:
            continue
        if key == "hidden":
            value = tuple(int(h) for h in value.split(","))
        options[key] = value
    return ModelSpec(name=args.model, options=options)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "ingest":
        try:
            spec = ColumnSpec(
                delimiter=args.delimiter,
                source_column=args.source_col,
                target_column=args.target_col,
                has_header=args.header,
                comment_prefix=args.comment_prefix,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        summary = stage_ingest(
            args.input,
            spec,
            args.out,
            source_kind=args.source_kind,
            target_kind=args.target_kind,
            render_figures=not args.no_figures,
        )
        print(f"{summary['associations']} associations, "
              f"{summary['nodes']} nodes, {summary['edges']} edges")
        print((Path(args.out) / "graph_stats.txt").read_text(encoding="utf-8"), end="")
        return 0

    if args.command == "sample":
        try:
            sampling = SamplingConfig(
                positive_fraction=args.positive_fraction,
                negative_count=args.negative_count,
                rng_seed=args.seed,
                max_connectivity_checks=args.max_connectivity_checks,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        summary = stage_sample(
            args.edges, sampling, args.out,
            train_fraction=args.train_fraction,
            stratified=args.stratify,
            seed=args.seed,
        )
        print(f"{summary['rows']} rows ({summary['positives']} positive, "
              f"rate {summary['positive_rate']:.4f}); "
              f"train {summary['train_rows']} / test {summary['test_rows']}")
        if summary["shortfall"]:
            print(f"warning: positive shortfall {summary['shortfall']} "
                  f"(requested {summary['positives_requested']})", file=sys.stderr)
        return 0

    if args.command == "embed":
        try:
            walks = WalkConfig(walk_length=args.walk_length, walks_per_node=args.walks_per_node,
                               p=args.p, q=args.q)
            skipgram = SkipGramConfig(
                dimensions=args.dim, window=args.window,
                negatives_per_positive=args.negatives, epochs=args.epochs,
                initial_step_size=args.step_size, noise_exponent=args.noise_exponent,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        summary = stage_embed(args.edges, walks, skipgram, args.out,
                              seed=args.seed, workers=args.workers)
        print(f"embedded {summary['nodes']} nodes in {summary['dimensions']} dimensions")
        return 0

    if args.command == "train":
        spec = _model_spec_from_args(args)
        summary = stage_train(
            args.pairs, args.embeddings, spec, EdgeOperator(args.operator),
            args.out, seed=args.seed,
        )
        print(f"trained {spec.name} on {summary['train_rows']} rows "
              f"-> {summary['model_path']}")
        return 0

    if args.command == "evaluate":
        doc = stage_evaluate(
            args.pairs, args.embeddings, args.model, args.out,
            threshold=args.threshold, split=args.split,
            render_figures=not args.no_figures,
        )
        report_txt = Path(args.out) / f"report_{doc['model']}.txt"
        if report_txt.is_file():
            print(report_txt.read_text(encoding="utf-8"), end="")
        else:
            print(f"AUROC {doc['auroc']:.4f} AUCPR {doc['aucpr']:.4f}")
        return 0

    if args.command == "pipeline":
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        if args.workers is not None:
            cfg.workers = args.workers
        if args.no_figures:
            cfg.render_figures = False
        manifest = run_pipeline(cfg)
        for stage in manifest["stages"]:
            print(f"{stage['stage']:<22} {stage['seconds']:8.2f}s")
        for stage in manifest["stages"]:
            if stage["stage"].startswith("evaluate["):
                summary = stage["summary"]
                print(f"{summary['model']}: AUROC {summary['auroc']:.4f} "
                      f"AUCPR {summary['aucpr']:.4f}")
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else (logging.DEBUG if args.verbose else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PhenolinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
