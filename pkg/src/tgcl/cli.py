"""Command-line pipeline: synth, index, select, train, replay, introspect.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 runtime error.
All outputs land under --out with fixed names (see README).
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import graph_indices, text_indices
from .competence import CompetenceParams
from .errors import ConfigurationError, DataError, TransferError
from .io import dataset_paths, load_split_map, load_task
from .learner import NeighborLogisticLearner, baseline_ccl, baseline_nocl
from .pipeline import (SORT_ORDERS, build_index_matrix, build_pair_tables,
                       load_index_matrix, rank_samples, save_index_matrix,
                       save_selection, select_indices, split_pair_id,
                       summed_difficulty_order)
from .records import introspect as introspect_record
from .records import load_record, replay, save_record
from .scheduler import SchedulerConfig, run_training
from .synth import make_planted_dataset

MATRIX_FILE = "index_matrix.csv"
SELECTION_FILE = "selected_indices.tsv"
RECORD_FILE = "record.jsonl"
MODEL_FILE = "model.csv"
METRICS_FILE = "metrics.json"
REPLAY_METRICS_FILE = "replay_metrics.json"

TASKS = ("node_classification", "link_prediction")
DEFAULT_EPOCHS = {"node_classification": 500, "link_prediction": 100}


def _echo(msg):
    click.echo(msg)


def _out_dir(out):
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _data_arguments(fn):
    fn = click.option("--data", type=click.Path(exists=True, file_okay=False),
                      help="Dataset directory with the fixed synth file names.")(fn)
    fn = click.option("--edges", type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--features", type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--labels", type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--texts", type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--samples", type=click.Path(exists=True, dir_okay=False))(fn)
    return fn


def _resolve_dataset(task, data, edges, features, labels, texts, samples,
                     need_features=False):
    if data:
        defaults = dataset_paths(data)
        edges = edges or (defaults["edges"] if defaults["edges"].exists() else None)
        features = features or (defaults["features"] if defaults["features"].exists() else None)
        labels = labels or (defaults["labels"] if defaults["labels"].exists() else None)
        texts = texts or (defaults["texts"] if defaults["texts"].exists() else None)
        samples = samples or (defaults["samples"] if defaults["samples"].exists() else None)
    if not edges or not samples:
        raise ConfigurationError("need --edges and --samples (or --data)")
    if need_features and not features:
        raise ConfigurationError("this command needs node features (--features)")
    return load_task(task, edges, samples, feature_path=features,
                     label_path=labels, text_path=texts)


def _parse_kinds(raw, known, label):
    if raw is None or raw == "default":
        return None
    if raw in ("", "none"):
        return ()
    kinds = tuple(k.strip() for k in raw.split(",") if k.strip())
    for k in kinds:
        if k not in known:
            raise ConfigurationError(f"unknown {label} index kind {k!r}")
    return kinds


def _parse_orders(raw):
    if raw is None or raw == "all":
        return SORT_ORDERS
    orders = tuple(o.strip() for o in raw.split(",") if o.strip())
    for o in orders:
        if o not in SORT_ORDERS:
            raise ConfigurationError(f"unknown sort order {o!r}")
    if not orders:
        raise ConfigurationError("--orders must name at least one order")
    return orders


@click.group()
@click.option("--verbose", is_flag=True, help="Enable info-level logging.")
def cli(verbose):
    """Complexity-guided curriculum scheduling for text-graph data."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--nodes", default=400, show_default=True)
@click.option("--blocks", default=2, show_default=True)
@click.option("--p-in", default=0.05, show_default=True)
@click.option("--p-out", default=0.005, show_default=True)
@click.option("--dim", default=16, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--noise", default=4.0, show_default=True)
@click.option("--train-frac", default=0.7, show_default=True)
@click.option("--val-frac", default=0.15, show_default=True)
def synth(out, nodes, blocks, p_in, p_out, dim, seed, noise, train_frac, val_frac):
    """Generate a planted-partition node-classification dataset."""
    paths = make_planted_dataset(out, nodes=nodes, blocks=blocks, p_in=p_in,
                                 p_out=p_out, dim=dim, seed=seed, noise=noise,
                                 train_frac=train_frac, val_frac=val_frac)
    _echo(f"wrote {len(paths)} files under {out}")


@cli.command()
@click.option("--task", type=click.Choice(TASKS), default="node_classification",
              show_default=True)
@_data_arguments
@click.option("--hops", default=1, show_default=True)
@click.option("--node-cap", default=256, show_default=True)
@click.option("--graph-kinds", default="default",
              help="Comma list of graph index kinds, 'default', or 'none'.")
@click.option("--text-kinds", default="default",
              help="Comma list of text index kinds, 'default', or 'none'.")
@click.option("--threads", default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def index(task, data, edges, features, labels, texts, samples, hops, node_cap,
          graph_kinds, text_kinds, threads, out):
    """Compute the per-sample complexity index matrix."""
    dataset = _resolve_dataset(task, data, edges, features, labels, texts, samples)
    gk = _parse_kinds(graph_kinds, graph_indices.GRAPH_INDEX_CATEGORIES, "graph")
    tk = _parse_kinds(text_kinds, text_indices.TEXT_INDEX_CATEGORIES, "text")
    matrix = build_index_matrix(dataset, graph_kinds=gk, text_kinds=tk,
                                hops=hops, node_cap=node_cap, threads=threads)
    out = _out_dir(out)
    save_index_matrix(matrix, out / MATRIX_FILE)
    _echo(f"indexed {matrix.raw.shape[0]} samples x {matrix.raw.shape[1]} indices "
          f"-> {out / MATRIX_FILE}")
    if matrix.constant_columns:
        _echo("constant columns: " + ", ".join(matrix.constant_columns))


@cli.command()
@click.option("--matrix", "matrix_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--samples", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", type=click.Choice(TASKS), default="node_classification",
              show_default=True)
@click.option("--clusters", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def select(matrix_path, samples, task, clusters, seed, out):
    """Cluster correlated indices and pick one representative per cluster."""
    split_map = load_split_map(samples, task)
    matrix = load_index_matrix(matrix_path, split_map=split_map)
    selected, cluster_of = select_indices(matrix, k_clusters=clusters, seed=seed)
    out = _out_dir(out)
    save_selection(out / SELECTION_FILE, selected, cluster_of)
    _echo("selected: " + ", ".join(selected))


def _train_learner(task, dataset, lr, batch_size, embed_dim, weight_decay, seed):
    return NeighborLogisticLearner(task=task, learning_rate=lr,
                                   batch_size=batch_size, embed_dim=embed_dim,
                                   weight_decay=weight_decay, seed=seed).bind(dataset)


def _write_metrics(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@cli.command()
@click.option("--task", type=click.Choice(TASKS), default="node_classification",
              show_default=True)
@_data_arguments
@click.option("--baseline", type=click.Choice(("tgcl", "nocl", "ccl")),
              default="tgcl", show_default=True)
@click.option("--kernel", type=click.Choice(("lap", "sec", "cos", "qua", "lin")),
              default="lap", show_default=True)
@click.option("--eta", default=0.8, show_default=True)
@click.option("--alpha", default=1.0, show_default=True)
@click.option("--c0", default=0.1, show_default=True)
@click.option("--epochs", default=None, type=int,
              help="Defaults to 500 for node tasks, 100 for link tasks.")
@click.option("--orders", default="all",
              help="Comma list of sort orders or 'all'.")
@click.option("--clusters", default=10, show_default=True)
@click.option("--hops", default=1, show_default=True)
@click.option("--node-cap", default=256, show_default=True)
@click.option("--graph-kinds", default="default")
@click.option("--text-kinds", default="default")
@click.option("--threads", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--lr", default=0.01, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--embed-dim", default=16, show_default=True)
@click.option("--weight-decay", default=0.03, show_default=True)
@click.option("--delay-cap", type=click.Choice(("remaining", "total")),
              default="remaining", show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def train(task, data, edges, features, labels, texts, samples, baseline, kernel,
          eta, alpha, c0, epochs, orders, clusters, hops, node_cap, graph_kinds,
          text_kinds, threads, seed, lr, batch_size, embed_dim, weight_decay,
          delay_cap, out):
    """Train the built-in learner under a curriculum (or a baseline)."""
    dataset = _resolve_dataset(task, data, edges, features, labels, texts,
                               samples, need_features=True)
    epochs = epochs or DEFAULT_EPOCHS[task]
    gk = _parse_kinds(graph_kinds, graph_indices.GRAPH_INDEX_CATEGORIES, "graph")
    tk = _parse_kinds(text_kinds, text_indices.TEXT_INDEX_CATEGORIES, "text")
    out = _out_dir(out)
    learner = _train_learner(task, dataset, lr, batch_size, embed_dim,
                             weight_decay, seed)
    params = CompetenceParams(c0=c0, alpha=alpha, epochs=epochs)

    if baseline == "nocl":
        result = baseline_nocl(learner, dataset, epochs)
        presented = result.presented_total
        best_epoch, val_metric = result.best_epoch, result.val_metric
    else:
        matrix = build_index_matrix(dataset, graph_kinds=gk, text_kinds=tk,
                                    hops=hops, node_cap=node_cap, threads=threads)
        save_index_matrix(matrix, out / MATRIX_FILE)
        if baseline == "ccl":
            ranking = summed_difficulty_order(matrix)
            result = baseline_ccl(learner, dataset, epochs, params, ranking)
            presented = result.presented_total
            best_epoch, val_metric = result.best_epoch, result.val_metric
        else:
            selected, cluster_of = select_indices(matrix, k_clusters=clusters,
                                                  seed=seed)
            save_selection(out / SELECTION_FILE, selected, cluster_of)
            rankings = build_pair_tables(matrix, selected, _parse_orders(orders))
            config = SchedulerConfig(kernel=kernel, eta=eta, competence=params,
                                     delay_cap=delay_cap, seed=seed)
            result = run_training(config, rankings, learner, dataset)
            save_record(result.record, out / RECORD_FILE)
            presented = result.presented_total
            best_epoch, val_metric = result.best_epoch, result.val_metric

    learner.save(out / MODEL_FILE)
    test_ids = dataset.test_ids
    test_metric = learner.eval_on(test_ids) if test_ids.size else None
    metric_name = "accuracy" if task == "node_classification" else "f1"
    payload = {"task": task, "baseline": baseline, "seed": seed, "epochs": epochs,
               "metric": metric_name, "val_metric": val_metric,
               "test_metric": test_metric, "best_epoch": best_epoch,
               "presented_total": presented,
               "train_size": int(dataset.train_ids.size),
               "nocl_presented_total": int(dataset.train_ids.size) * epochs}
    _write_metrics(out / METRICS_FILE, payload)
    test_str = "n/a" if test_metric is None else f"{test_metric:.4f}"
    _echo(f"{baseline}: validation {metric_name} {val_metric:.4f} "
          f"(epoch {best_epoch}), test {metric_name} {test_str}, "
          f"presented {presented} samples over {epochs} epochs")


@cli.command("replay")
@click.option("--record", "record_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--task", type=click.Choice(TASKS), default="node_classification",
              show_default=True)
@_data_arguments
@click.option("--hops", default=1, show_default=True)
@click.option("--node-cap", default=256, show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--lr", default=0.01, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--embed-dim", default=16, show_default=True)
@click.option("--weight-decay", default=0.03, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def replay_cmd(record_path, task, data, edges, features, labels, texts, samples,
               hops, node_cap, threads, seed, lr, batch_size, embed_dim,
               weight_decay, out):
    """Apply a recorded curriculum to a (possibly different) dataset."""
    record = load_record(record_path)
    dataset = _resolve_dataset(task, data, edges, features, labels, texts,
                               samples, need_features=True)
    names = []
    for pid in record.header.pairs:
        name, _ = split_pair_id(pid)
        if name not in names:
            names.append(name)
    gk = tuple(n for n in names if n in graph_indices.GRAPH_INDEX_CATEGORIES)
    tk = tuple(n for n in names if n in text_indices.TEXT_INDEX_CATEGORIES)
    unknown = [n for n in names if n not in gk and n not in tk]
    if unknown:
        raise TransferError("record references unknown indices: " + ", ".join(unknown))
    if tk and dataset.texts is None:
        raise TransferError("record uses text indices but the target has no texts")
    matrix = build_index_matrix(dataset, graph_kinds=gk, text_kinds=tk,
                                hops=hops, node_cap=node_cap, threads=threads)
    rankings = [rank_samples(matrix, *split_pair_id(pid))
                for pid in record.header.pairs]
    learner = _train_learner(task, dataset, lr, batch_size, embed_dim,
                             weight_decay, seed)
    result = replay(record, rankings, learner, dataset)
    out = _out_dir(out)
    learner.save(out / MODEL_FILE)
    test_ids = dataset.test_ids
    test_metric = learner.eval_on(test_ids) if test_ids.size else None
    metric_name = "accuracy" if task == "node_classification" else "f1"
    payload = {"task": task, "source_record": str(record_path), "seed": seed,
               "metric": metric_name, "val_metric": result.val_metric,
               "test_metric": test_metric, "best_epoch": result.best_epoch,
               "presented_total": result.presented_total,
               "train_size": int(dataset.train_ids.size),
               "nocl_presented_total": int(dataset.train_ids.size)
               * record.header.epochs}
    _write_metrics(out / REPLAY_METRICS_FILE, payload)
    test_str = "n/a" if test_metric is None else f"{test_metric:.4f}"
    _echo(f"replay: validation {metric_name} {result.val_metric:.4f} "
          f"(epoch {result.best_epoch}), test {metric_name} {test_str}, "
          f"presented {result.presented_total} samples")


@cli.command("introspect")
@click.option("--record", "record_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--phases", default=3, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def introspect_cmd(record_path, phases, out):
    """Phase-wise usage reports and activity series from a record."""
    record = load_record(record_path)
    report = introspect_record(record, phase_count=phases)
    paths = report.write(_out_dir(out))
    _echo(f"wrote {len(paths)} reports under {out} "
          f"({report.total_activations()} pair activations)")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(2)
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(3)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)
    return 0


if __name__ == "__main__":
    main()
