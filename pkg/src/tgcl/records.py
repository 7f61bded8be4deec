"""Curriculum records: persistence, cross-dataset replay, and introspection.

A record is the transferable curriculum: which pairs were active and how much
data was available at every epoch. The file format is line-delimited JSON
(version 1): the first line is the header object, then exactly one entry
object per epoch. Field names:

  header  version, kind, config_hash, seed, pairs, epochs, c0, alpha,
          kernel, eta, train_size, val_size
  entry   epoch, competence, current, delays, used, presented, performance

Replay keys on (index, order) pair identity, the only coordinate system
shared across datasets, and applies the recorded schedule verbatim: no
delay recomputation on the target.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .competence import CompetenceParams, scaled_count
from .errors import DomainError, SchemaError, TransferError
from .graph_indices import GRAPH_INDEX_CATEGORIES
from .pipeline import split_pair_id
from .text_indices import TEXT_INDEX_CATEGORIES

RECORD_VERSION = 1
RECORD_KIND = "tgcl-curriculum"


@dataclass(frozen=True)
class RecordHeader:
    version: int
    kind: str
    config_hash: str
    seed: int
    pairs: tuple[str, ...]
    epochs: int
    c0: float
    alpha: float
    kernel: str
    eta: float
    train_size: int
    val_size: int


def record_header(config_hash, seed, pairs, epochs, competence: CompetenceParams,
                  kernel, eta, train_size, val_size) -> RecordHeader:
    return RecordHeader(version=RECORD_VERSION, kind=RECORD_KIND,
                        config_hash=config_hash, seed=seed, pairs=tuple(pairs),
                        epochs=epochs, c0=competence.c0, alpha=competence.alpha,
                        kernel=kernel, eta=eta, train_size=train_size,
                        val_size=val_size)


@dataclass
class RecordEntry:
    epoch: int
    competence: float
    current_pairs: tuple[str, ...]
    delays: dict[str, float]
    used: dict[str, bool]
    presented: int
    performance: float


@dataclass
class CurriculumRecord:
    header: RecordHeader
    entries: list[RecordEntry]

    def validate(self) -> None:
        if len(self.entries) != self.header.epochs:
            raise SchemaError(f"record has {len(self.entries)} entries but header "
                              f"declares {self.header.epochs} epochs")
        known = set(self.header.pairs)
        last_c = -math.inf
        for i, e in enumerate(self.entries):
            if e.epoch != i:
                raise SchemaError(f"entry {i}: epoch field is {e.epoch}")
            if e.competence < last_c - 1e-12:
                raise SchemaError(f"entry {i}: competence decreased")
            last_c = e.competence
            extra = (set(e.current_pairs) | set(e.delays) | set(e.used)) - known
            if extra:
                raise SchemaError(f"entry {i}: unknown pair ids {sorted(extra)}")


def save_record(record: CurriculumRecord, path) -> None:
    record.validate()
    with open(path, "w", encoding="utf-8") as fh:
        head = asdict(record.header)
        head["pairs"] = list(record.header.pairs)
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for e in record.entries:
            obj = {"epoch": e.epoch, "competence": e.competence,
                   "current": list(e.current_pairs), "delays": e.delays,
                   "used": e.used, "presented": e.presented,
                   "performance": e.performance}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def load_record(path) -> CurriculumRecord:
    with open(path, encoding="utf-8") as fh:
        head_line = fh.readline()
        if not head_line.strip():
            raise SchemaError(f"{path}: empty record file")
        try:
            head = json.loads(head_line)
        except json.JSONDecodeError:
            raise SchemaError(f"{path}: malformed header line") from None
        if head.get("kind") != RECORD_KIND:
            raise SchemaError(f"{path}: not a curriculum record")
        if head.get("version") != RECORD_VERSION:
            raise SchemaError(f"{path}: unsupported record version {head.get('version')!r}")
        try:
            header = RecordHeader(version=head["version"], kind=head["kind"],
                                  config_hash=head["config_hash"], seed=head["seed"],
                                  pairs=tuple(head["pairs"]), epochs=head["epochs"],
                                  c0=head["c0"], alpha=head["alpha"],
                                  kernel=head["kernel"], eta=head["eta"],
                                  train_size=head["train_size"],
                                  val_size=head["val_size"])
        except KeyError as exc:
            raise SchemaError(f"{path}: header missing field {exc.args[0]!r}") from None
        entries = []
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entry = RecordEntry(epoch=obj["epoch"], competence=obj["competence"],
                                    current_pairs=tuple(obj["current"]),
                                    delays=obj["delays"], used=obj["used"],
                                    presented=obj["presented"],
                                    performance=obj["performance"])
            except (json.JSONDecodeError, KeyError, TypeError):
                raise SchemaError(f"{path}: malformed record entry {i}") from None
            entries.append(entry)
    record = CurriculumRecord(header=header, entries=entries)
    record.validate()
    return record


# ---------------------------------------------------------------------------
# replay


@dataclass
class ReplayResult:
    learner: object
    presented_total: int
    presented_per_epoch: list[int]
    presentation_log: list[tuple[int, str, np.ndarray]]
    val_history: list[float]
    best_epoch: int
    val_metric: float


def replay(record: CurriculumRecord, rankings, learner, dataset,
           track_presentations: bool = False) -> ReplayResult:
    """Apply a recorded curriculum to target data: at each epoch, train on the
    top recorded-competence fraction of exactly the recorded current pairs."""
    by_id = {r.pair_id: r for r in rankings}
    missing = [pid for pid in record.header.pairs if pid not in by_id]
    if missing:
        raise TransferError("target data lacks rankings for recorded pairs: "
                            + ", ".join(sorted(missing)))
    val_ids = dataset.val_ids
    if val_ids.size == 0:
        raise DomainError("target dataset has no validation samples")
    sizes = {by_id[pid].train_order.size for pid in record.header.pairs}
    if len(sizes) != 1:
        raise DomainError("target rankings disagree on training size")
    n_train = sizes.pop()

    presented, log, history = [], [], []
    best_metric, best_state, best_epoch = -np.inf, None, -1
    for entry in record.entries:
        count = scaled_count(entry.competence, n_train)
        chosen = []
        for pid in entry.current_pairs:
            ids = by_id[pid].train_order[:count]
            learner.train_on(ids)
            chosen.append(ids)
            if track_presentations:
                log.append((entry.epoch, pid, np.sort(ids)))
        union = np.unique(np.concatenate(chosen)) if chosen else np.empty(0, np.int64)
        presented.append(int(union.size))
        metric = learner.eval_on(val_ids)
        history.append(float(metric))
        if metric > best_metric:
            best_metric, best_state, best_epoch = metric, learner.snapshot(), entry.epoch
    learner.restore(best_state)
    return ReplayResult(learner=learner, presented_total=sum(presented),
                        presented_per_epoch=presented, presentation_log=log,
                        val_history=history, best_epoch=best_epoch,
                        val_metric=float(best_metric))


# ---------------------------------------------------------------------------
# introspection


def _category_of(index_name: str) -> str:
    if index_name in GRAPH_INDEX_CATEGORIES:
        return GRAPH_INDEX_CATEGORIES[index_name]
    if index_name in TEXT_INDEX_CATEGORIES:
        return TEXT_INDEX_CATEGORIES[index_name]
    return "other"


@dataclass
class IntrospectionReport:
    index_usage: list[tuple[int, str, str, int]]     # phase, index, category, count
    order_usage: list[tuple[int, str, int]]          # phase, order, count
    activity: list[tuple[int, int, int, float, float, float]]
    data_usage: list[tuple[int, int, int, int]]      # epoch, presented, cum, nocl cum

    def total_activations(self) -> int:
        return sum(c for _, _, _, c in self.index_usage)

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []

        def dump(name, headers, rows):
            p = out / name
            with open(p, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(headers)
                w.writerows(rows)
            paths.append(p)

        dump("usage_by_index.csv", ("phase", "index", "category", "count"),
             self.index_usage)
        dump("usage_by_order.csv", ("phase", "order", "count"), self.order_usage)
        dump("activity.csv", ("epoch", "current_pairs", "total_pairs",
                              "active_fraction", "competence", "performance"),
             self.activity)
        dump("data_usage.csv", ("epoch", "presented", "cumulative",
                                "nocl_cumulative"), self.data_usage)
        return paths


def introspect(record: CurriculumRecord, phase_count: int = 3) -> IntrospectionReport:
    """Phase-wise usage counts plus per-epoch activity and data-usage series."""
    if phase_count < 1:
        raise DomainError("phase_count must be >= 1")
    record.validate()
    epochs = record.header.epochs
    phase_of = {}
    for phase, chunk in enumerate(np.array_split(np.arange(epochs), phase_count)):
        for e in chunk:
            phase_of[int(e)] = phase

    indices = sorted({split_pair_id(pid)[0] for pid in record.header.pairs})
    orders = sorted({split_pair_id(pid)[1] for pid in record.header.pairs})
    index_counts = {(ph, name): 0 for ph in range(phase_count) for name in indices}
    order_counts = {(ph, o): 0 for ph in range(phase_count) for o in orders}
    activity, data_usage = [], []
    total_pairs = len(record.header.pairs)
    cumulative = 0
    for entry in record.entries:
        ph = phase_of[entry.epoch]
        for pid in entry.current_pairs:
            name, order = split_pair_id(pid)
            index_counts[(ph, name)] += 1
            order_counts[(ph, order)] += 1
        active = len(entry.current_pairs)
        activity.append((entry.epoch, active, total_pairs,
                         active / total_pairs if total_pairs else 0.0,
                         entry.competence, entry.performance))
        cumulative += entry.presented
        data_usage.append((entry.epoch, entry.presented, cumulative,
                           record.header.train_size * (entry.epoch + 1)))
    index_usage = [(ph, name, _category_of(name), index_counts[(ph, name)])
                   for ph in range(phase_count) for name in indices]
    order_usage = [(ph, o, order_counts[(ph, o)])
                   for ph in range(phase_count) for o in orders]
    return IntrospectionReport(index_usage=index_usage, order_usage=order_usage,
                               activity=activity, data_usage=data_usage)
