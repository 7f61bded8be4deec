"""Complexity-guided curriculum scheduling for text-graph training data.

Pipeline: score samples with graph/text complexity indices, de-duplicate the
indices by correlation clustering, rank samples per (index, order) pair, and
let a spaced-repetition scheduler with competence gating decide which pairs
train the learner at every epoch. Curricula are recorded and can be replayed
onto other datasets.
"""
from .competence import CompetenceParams, active_count, competence, competence_at_epoch
from .errors import (ConfigurationError, DataError, DomainError, ParseError,
                     SchemaError, TgclError, TransferError)
from .graph import Graph, Sample, Subgraph, build_graph, extract_ego_subgraph
from .graph_indices import (GRAPH_INDEX_CATEGORIES, GRAPH_INDEX_KINDS,
                            PAIRWISE_KINDS, compute_index)
from .io import Dataset, load_dataset, load_samples, load_task, load_texts
from .kernels import KERNEL_KINDS, fit_tau, kernel_eval, solve_delay_x
from .learner import (BaselineResult, LearnerContract, NeighborLogisticLearner,
                      baseline_ccl, baseline_nocl, neighbor_features)
from .pipeline import (SORT_ORDERS, IndexMatrix, IndexSelector, RankingTable,
                       build_index_matrix, build_pair_tables, load_index_matrix,
                       pair_id, rank_samples, save_index_matrix, select_indices,
                       split_pair_id, summed_difficulty_order)
from .records import (CurriculumRecord, RecordEntry, RecordHeader, introspect,
                      load_record, replay, save_record)
from .scheduler import (EpochPlan, PairFeedback, PairState, SchedulerConfig,
                        SchedulerState, Snapshot, TrainingResult, compute_delay,
                        run_training, scheduler_step)
from .synth import make_planted_dataset

__version__ = "0.1.0"

__all__ = [
    "CompetenceParams", "active_count", "competence", "competence_at_epoch",
    "ConfigurationError", "DataError", "DomainError", "ParseError",
    "SchemaError", "TgclError", "TransferError",
    "Graph", "Sample", "Subgraph", "build_graph", "extract_ego_subgraph",
    "GRAPH_INDEX_CATEGORIES", "GRAPH_INDEX_KINDS", "PAIRWISE_KINDS",
    "compute_index",
    "Dataset", "load_dataset", "load_samples", "load_task", "load_texts",
    "KERNEL_KINDS", "fit_tau", "kernel_eval", "solve_delay_x",
    "BaselineResult", "LearnerContract", "NeighborLogisticLearner",
    "baseline_ccl", "baseline_nocl", "neighbor_features",
    "SORT_ORDERS", "IndexMatrix", "IndexSelector", "RankingTable",
    "build_index_matrix", "build_pair_tables", "load_index_matrix", "pair_id",
    "rank_samples", "save_index_matrix", "select_indices", "split_pair_id",
    "summed_difficulty_order",
    "CurriculumRecord", "RecordEntry", "RecordHeader", "introspect",
    "load_record", "replay", "save_record",
    "EpochPlan", "PairFeedback", "PairState", "SchedulerConfig",
    "SchedulerState", "Snapshot", "TrainingResult", "compute_delay",
    "run_training", "scheduler_step",
    "make_planted_dataset",
    "__version__",
]
