"""File-to-file pipeline stages and the one-shot runner.

Each stage reads only artifacts earlier stages wrote, so running the
stages separately or via :func:`run_pipeline` produces identical bytes.
Fixed artifact names (under the output directory):

    ingest    associations.tsv nodes.tsv validation.json graph_stats.json
              graph_stats.txt degree_histogram.csv degree_distribution.png
    sample    pairs.csv residual.tsv sampling.json
    embed     embeddings.txt
    train     model_<name>.json train_<name>.json
    evaluate  report_<name>.json report_<name>.txt roc_curve_<name>.csv
              pr_curve_<name>.csv curves_<name>.png
    pipeline  manifest.json (plus all of the above)
"""

from __future__ import annotations

import csv
import json
import logging
import time
import zlib
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ModelSpec, PipelineConfig, stage_seed
from .embed import (
    EdgeOperator,
    EmbeddingMatrix,
    SkipGramConfig,
    WalkConfig,
    build_transition_tables,
    edge_feature_matrix,
    generate_walks,
    read_embeddings,
    train_skipgram,
    write_embeddings,
)
from .figures import render_curves, render_degree_distribution
from .graph import build_graph, graph_stats
from .ingest import (
    ColumnSpec,
    NodeIndex,
    build_node_index,
    read_annotations,
    validate_associations,
    write_edge_list,
    write_node_index,
)
from .metrics import evaluation_report
from .models import load_model, predict_proba, save_model, train_forest, train_gbdt, train_logistic, train_mlp
from .sampling import (
    SamplingConfig,
    assemble_dataset,
    enumerate_negative_pairs,
    read_pairs_csv,
    sample_positive_edges,
    split_dataset,
    write_pairs_csv,
)

logger = logging.getLogger(__name__)


def _name_code(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _require_file(path: Path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"input file not found: {path}")
    return path


def stage_ingest(
    input_path: Path,
    spec: ColumnSpec,
    out_dir: Path,
    source_kind: str = "HPO",
    target_kind: str = "GENE",
    render_figures: bool = True,
) -> dict:
    """Parse, validate, index, build the graph and emit its statistics."""
    input_path = _require_file(input_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    assoc = read_annotations(input_path, spec)
    assoc.source_kind = source_kind
    assoc.target_kind = target_kind
    report = validate_associations(assoc)
    index = build_node_index(assoc)
    g = build_graph(assoc, index)
    stats = graph_stats(g, index)

    write_edge_list(assoc, out_dir / "associations.tsv")
    write_node_index(index, out_dir / "nodes.tsv")
    _write_json(report.to_dict(), out_dir / "validation.json")
    _write_json(stats.to_dict(), out_dir / "graph_stats.json")
    (out_dir / "graph_stats.txt").write_text(stats.to_text() + "\n", encoding="utf-8")
    with open(out_dir / "degree_histogram.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["degree", "count"])
        writer.writerows(stats.histogram_rows())
    if render_figures:
        render_degree_distribution(stats.histogram_rows(), out_dir / "degree_distribution.png")
    logger.info("ingested %d associations -> %d nodes, %d edges",
                len(assoc), g.node_count, g.edge_count)
    return {
        "associations": len(assoc),
        "nodes": g.node_count,
        "edges": g.edge_count,
        "validation": report.to_dict(),
        "stats": stats.to_dict(),
    }


def _load_edge_graph(path: Path) -> tuple:
    """Canonical edge list -> (graph, index); ids in file order."""
    assoc = read_annotations(_require_file(path), ColumnSpec())
    index = build_node_index(assoc)
    return build_graph(assoc, index), index


def stage_sample(
    edges_path: Path,
    sampling: SamplingConfig,
    out_dir: Path,
    train_fraction: float = 0.8,
    stratified: bool = True,
    seed: int = 0,
) -> dict:
    """Positives via safe edge removal, negatives via triangle scan,
    then the stratified train/test split; all seeded from ``seed``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    g, index = _load_edge_graph(edges_path)
    sample_rng = np.random.default_rng(stage_seed(seed, "sample"))
    result = sample_positive_edges(g, sampling, sample_rng)
    negatives = enumerate_negative_pairs(g, sampling, sample_rng)
    dataset = assemble_dataset(result.positives, negatives)
    dataset = split_dataset(dataset, train_fraction, stratified, sample_rng)

    write_pairs_csv(dataset, index, out_dir / "pairs.csv")
    residual_records = [
        (index.id_to_label[u], index.id_to_label[v]) for u, v in result.residual.edges()
    ]
    with open(out_dir / "residual.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for source, target in residual_records:
            fh.write(f"{source}\t{target}\n")
    summary = {
        "rows": len(dataset),
        "positives": int(result.achieved),
        "positives_requested": int(result.requested),
        "shortfall": int(result.shortfall),
        "negatives": len(negatives),
        "positive_rate": dataset.positive_rate(),
        "train_rows": int(len(dataset.rows_for_split("train"))),
        "test_rows": int(len(dataset.rows_for_split("test"))),
        "residual_edges": result.residual.edge_count,
    }
    _write_json(summary, out_dir / "sampling.json")
    if result.shortfall:
        logger.warning("positive sampling shortfall: %d of %d dropped",
                       result.achieved, result.requested)
    logger.info("dataset: %d rows, positive rate %.4f", len(dataset), dataset.positive_rate())
    return summary


def stage_embed(
    residual_path: Path,
    walks: WalkConfig,
    skipgram: SkipGramConfig,
    out_dir: Path,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Walk the residual graph and train embeddings; noise distribution
    follows residual degrees."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    g, index = _load_edge_graph(residual_path)
    walk_cfg = WalkConfig(
        walk_length=walks.walk_length,
        walks_per_node=walks.walks_per_node,
        p=walks.p,
        q=walks.q,
        rng_seed=stage_seed(seed, "walks"),
        workers=workers,
    )
    sg_cfg = SkipGramConfig(
        dimensions=skipgram.dimensions,
        window=skipgram.window,
        negatives_per_positive=skipgram.negatives_per_positive,
        epochs=skipgram.epochs,
        initial_step_size=skipgram.initial_step_size,
        noise_exponent=skipgram.noise_exponent,
        rng_seed=stage_seed(seed, "skipgram"),
    )
    tables = build_transition_tables(g, walk_cfg.p, walk_cfg.q)
    corpus = generate_walks(g, tables, walk_cfg)
    emb = train_skipgram(
        corpus, sg_cfg, np.random.default_rng(sg_cfg.rng_seed), degrees=g.degrees()
    )
    write_embeddings(emb, index.id_to_label, out_dir / "embeddings.txt")
    logger.info("embedded %d nodes in %d dimensions (%d walks)",
                emb.node_count, emb.dimensions, len(corpus))
    return {
        "nodes": emb.node_count,
        "dimensions": emb.dimensions,
        "walks": len(corpus),
        "epoch_losses": emb.epoch_losses,
    }


def _load_features(pairs_path: Path, embeddings_path: Path, operator: EdgeOperator):
    labels, matrix = read_embeddings(_require_file(embeddings_path))
    index = NodeIndex.from_labels(labels)
    dataset = read_pairs_csv(_require_file(pairs_path), index)
    emb = EmbeddingMatrix(input_vectors=matrix, context_vectors=np.zeros_like(matrix))
    features = edge_feature_matrix(emb, dataset.u, dataset.v, operator)
    return dataset, features


_TRAINERS = {
    "logistic": lambda X, y, cfg, rng: train_logistic(X, y, cfg=cfg),
    "mlp": lambda X, y, cfg, rng: train_mlp(X, y, cfg, rng),
    "forest": lambda X, y, cfg, rng: train_forest(X, y, cfg, rng),
    "gbdt-level": lambda X, y, cfg, rng: train_gbdt(X, y, cfg, rng),
    "gbdt-leaf": lambda X, y, cfg, rng: train_gbdt(X, y, cfg, rng),
}


def _config_echo(cfg) -> dict:
    from dataclasses import asdict

    echo = asdict(cfg)
    for key, value in echo.items():
        if isinstance(value, tuple):
            echo[key] = list(value)
    return echo


def stage_train(
    pairs_path: Path,
    embeddings_path: Path,
    model_spec: ModelSpec,
    operator: EdgeOperator,
    out_dir: Path,
    seed: int = 0,
) -> dict:
    """Fit one family on the train split; model JSON echoes its config.

    The training stream seeds from (seed, model name), so a standalone
    ``train`` invocation matches the same model inside ``pipeline``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    family_cfg = model_spec.build()
    dataset, features = _load_features(pairs_path, embeddings_path, operator)
    train_rows = dataset.rows_for_split("train")
    if len(train_rows) == 0:
        raise ConfigError("pairs file has no rows tagged train")
    X = features[train_rows]
    y = dataset.label[train_rows].astype(np.int8)
    rng = np.random.default_rng(stage_seed(seed, "train", _name_code(model_spec.name)))

    started = time.perf_counter()
    model = _TRAINERS[model_spec.name](X, y, family_cfg, rng)
    elapsed = time.perf_counter() - started

    resolved = _config_echo(family_cfg)
    if model_spec.name.startswith("gbdt"):
        resolved["max_depth"] = family_cfg.resolved_max_depth
    echo = {"model": model_spec.name, "operator": operator.value, "seed": seed, **resolved}
    model_path = out_dir / f"model_{model_spec.name}.json"
    save_model(model, model_path, config=echo)
    _write_json(
        {
            "model": model_spec.name,
            "config": echo,
            "train_rows": int(len(train_rows)),
            "feature_dim": int(X.shape[1]),
            "seconds": elapsed,
        },
        out_dir / f"train_{model_spec.name}.json",
    )
    logger.info("trained %s on %d rows in %.1fs", model_spec.name, len(train_rows), elapsed)
    return {"model": model_spec.name, "config": echo, "train_rows": int(len(train_rows)),
            "seconds": elapsed, "model_path": str(model_path)}


def stage_evaluate(
    pairs_path: Path,
    embeddings_path: Path,
    model_path: Path,
    out_dir: Path,
    threshold: float = 0.5,
    split: str = "test",
    render_figures: bool = True,
) -> dict:
    """Score the chosen split and write the report, curve CSVs, figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model, model_cfg = load_model(_require_file(model_path))
    operator = EdgeOperator(model_cfg.get("operator", "hadamard"))
    dataset, features = _load_features(pairs_path, embeddings_path, operator)
    if split == "all":
        rows = np.arange(len(dataset))
    else:
        rows = dataset.rows_for_split(split)
    if len(rows) == 0:
        raise ConfigError(f"pairs file has no rows tagged {split!r}")
    labels = dataset.label[rows].astype(np.int8)
    scores = predict_proba(model, features[rows])
    report = evaluation_report(labels, scores, threshold=threshold)

    name = Path(model_path).stem
    name = name[len("model_"):] if name.startswith("model_") else name
    doc = {
        "model": model_cfg.get("model", name),
        "split": split,
        "rows": int(len(rows)),
        "positive_rate": float(labels.mean()),
        **report.to_dict(),
    }
    _write_json(doc, out_dir / f"report_{name}.json")
    (out_dir / f"report_{name}.txt").write_text(report.to_text() + "\n", encoding="utf-8")
    with open(out_dir / f"roc_curve_{name}.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        writer.writerows([[repr(float(a)), repr(float(b))] for a, b in report.roc_points])
    with open(out_dir / f"pr_curve_{name}.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["recall", "precision"])
        writer.writerows([[repr(float(a)), repr(float(b))] for a, b in report.pr_points])
    if render_figures:
        render_curves(
            report.roc_points,
            report.pr_points,
            report.auroc,
            report.aucpr,
            float(labels.mean()),
            out_dir / f"curves_{name}.png",
        )
    logger.info("evaluated %s on %d %s rows: AUROC %.4f AUCPR %.4f",
                name, len(rows), split, report.auroc, report.aucpr)
    return doc


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage file-to-file and write the run manifest."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stages: list[dict] = []
    manifest = {
        "phenolink_version": __version__,
        "config": cfg.to_dict(),
        "seeds": {
            "global": cfg.seed,
            "sample": stage_seed(cfg.seed, "sample"),
            "walks": stage_seed(cfg.seed, "walks"),
            "skipgram": stage_seed(cfg.seed, "skipgram"),
            "train": {
                spec.name: stage_seed(cfg.seed, "train", _name_code(spec.name))
                for spec in cfg.models
            },
        },
        "stages": stages,
    }

    def timed(name: str, fn, *args, **kwargs):
        started = time.perf_counter()
        summary = fn(*args, **kwargs)
        stages.append({"stage": name, "seconds": time.perf_counter() - started,
                       "summary": summary})
        return summary

    timed(
        "ingest",
        stage_ingest,
        cfg.input_path,
        cfg.column_spec,
        out_dir,
        source_kind=cfg.source_kind,
        target_kind=cfg.target_kind,
        render_figures=cfg.render_figures,
    )
    timed(
        "sample",
        stage_sample,
        out_dir / "associations.tsv",
        cfg.sampling,
        out_dir,
        train_fraction=cfg.train_fraction,
        stratified=cfg.stratified,
        seed=cfg.seed,
    )
    timed(
        "embed",
        stage_embed,
        out_dir / "residual.tsv",
        cfg.walks,
        cfg.skipgram,
        out_dir,
        seed=cfg.seed,
        workers=cfg.workers,
    )
    for spec in cfg.models:
        timed(
            f"train[{spec.name}]",
            stage_train,
            out_dir / "pairs.csv",
            out_dir / "embeddings.txt",
            spec,
            cfg.operator,
            out_dir,
            seed=cfg.seed,
        )
        timed(
            f"evaluate[{spec.name}]",
            stage_evaluate,
            out_dir / "pairs.csv",
            out_dir / "embeddings.txt",
            out_dir / f"model_{spec.name}.json",
            out_dir,
            threshold=cfg.threshold,
            split="test",
            render_figures=cfg.render_figures,
        )
    _write_json(manifest, out_dir / "manifest.json")
    return manifest
