"""Step-wise session API over the curriculum scheduler.

External training loops (real GNN stacks) keep ownership of their model and
drive the scheduler through two calls per epoch:

    plan   = session_plan(session)      # which samples to train/evaluate
    delays = session_report(session, losses, probas, performance)

The boundary is flat numeric arrays only: ``losses`` and ``probas`` are the
per-sample evaluation results for the plan's validation ids, concatenated in
the plan's pair order; ``performance`` is one value per current pair (or a
scalar applied to all). Everything else (delay bookkeeping, tau refits,
competence) happens inside the engine, with state evolution identical to the
native training loop given identical reported numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from tgcl.competence import CompetenceParams
from tgcl.io import load_split_map
from tgcl.kernels import TAU_MAX, TAU_MIN
from tgcl.pipeline import load_index_matrix, rank_samples, split_pair_id
from tgcl.records import CurriculumRecord, RecordEntry, record_header, save_record
from tgcl.scheduler import (EpochPlan, PairFeedback, SchedulerConfig,
                            SchedulerState)


class BindingError(ValueError):
    """Reported arrays do not line up with the issued plan."""


class ProtocolError(RuntimeError):
    """Session lifecycle misuse (stepping past the final epoch, etc.)."""


@dataclass(frozen=True)
class SessionConfig:
    """Flat configuration for a session; mirrors the engine's CLI knobs."""

    samples_path: str
    pairs: tuple[str, ...]
    task: str = "node_classification"
    kernel: str = "lap"
    eta: float = 0.8
    c0: float = 0.1
    alpha: float = 1.0
    epochs: int = 1
    seed: int = 0
    tau_min: float = TAU_MIN
    tau_max: float = TAU_MAX
    delay_cap: str = "remaining"


@dataclass
class PairPlan:
    pair_id: str
    train_ids: np.ndarray
    val_ids: np.ndarray


@dataclass
class SessionPlan:
    epoch: int
    competence: float
    pairs: list[PairPlan]
    delayed_pairs: tuple[str, ...]

    @property
    def current_pair_ids(self) -> tuple[str, ...]:
        return tuple(p.pair_id for p in self.pairs)


@dataclass
class ExternalSession:
    state: SchedulerState
    config: SessionConfig
    entries: list[RecordEntry] = field(default_factory=list)
    _plan_cache: EpochPlan | None = None

    @property
    def epoch(self) -> int:
        return self.state.epoch

    @property
    def finished(self) -> bool:
        return self.state.epoch >= self.state.epochs


def session_create(matrix_path, config) -> ExternalSession:
    """Open a session from an exported index-matrix CSV and a config.

    ``config`` is a SessionConfig or a mapping with the same field names;
    ``pairs`` names the (index, order) rankings to schedule, e.g.
    "degree/ascending".
    """
    if not isinstance(config, SessionConfig):
        config = SessionConfig(**dict(config))
    if not config.pairs:
        raise BindingError("config.pairs must name at least one index/order pair")
    split_map = load_split_map(config.samples_path, config.task)
    matrix = load_index_matrix(matrix_path, split_map=split_map)
    rankings = [rank_samples(matrix, *split_pair_id(pid)) for pid in config.pairs]
    params = CompetenceParams(c0=config.c0, alpha=config.alpha,
                              epochs=config.epochs)
    scheduler_config = SchedulerConfig(kernel=config.kernel, eta=config.eta,
                                       competence=params, seed=config.seed,
                                       tau_min=config.tau_min,
                                       tau_max=config.tau_max,
                                       delay_cap=config.delay_cap)
    return ExternalSession(state=SchedulerState(scheduler_config, rankings),
                           config=config)


def _current_plan(session: ExternalSession) -> EpochPlan:
    if session.finished:
        raise ProtocolError(f"session is complete after {session.state.epochs} epochs")
    if session._plan_cache is None or session._plan_cache.epoch != session.state.epoch:
        session._plan_cache = session.state.plan()
    return session._plan_cache


def session_plan(session: ExternalSession) -> SessionPlan:
    """This epoch's selections; repeated calls return the same plan."""
    plan = _current_plan(session)
    pairs = [PairPlan(pair_id=pid, train_ids=plan.train_lists[pid],
                      val_ids=plan.val_lists[pid])
             for pid in plan.current_pairs]
    return SessionPlan(epoch=plan.epoch, competence=plan.competence, pairs=pairs,
                       delayed_pairs=plan.delayed_pairs)


def session_report(session: ExternalSession, losses, probas, performance,
                   overall_performance=None) -> dict[str, float]:
    """Feed back evaluation results and advance one epoch.

    ``losses``/``probas`` are flat arrays covering the plan's validation ids
    in plan order; ``performance`` is a scalar or one value per current pair.
    Returns the updated per-pair delays.
    """
    plan = _current_plan(session)
    losses = np.asarray(losses, dtype=np.float64).ravel()
    probas = np.asarray(probas, dtype=np.float64).ravel()
    sizes = [plan.val_lists[pid].size for pid in plan.current_pairs]
    total = int(sum(sizes))
    if losses.size != total or probas.size != total:
        raise BindingError(f"expected {total} losses/probabilities for "
                           f"{len(sizes)} current pairs, got {losses.size} and "
                           f"{probas.size}")
    perf = np.asarray(performance, dtype=np.float64).ravel()
    if perf.size == 1:
        perf = np.repeat(perf, len(sizes))
    if perf.size != len(sizes):
        raise BindingError(f"expected 1 or {len(sizes)} performance values, "
                           f"got {perf.size}")
    feedback = {}
    offset = 0
    for i, pid in enumerate(plan.current_pairs):
        ids = plan.val_lists[pid]
        feedback[pid] = PairFeedback(val_ids=ids,
                                     losses=losses[offset:offset + ids.size],
                                     probas=probas[offset:offset + ids.size],
                                     performance=float(perf[i]))
        offset += ids.size
    session.state.apply_feedback(plan, feedback)
    session._plan_cache = None

    if overall_performance is None:
        overall = float(perf.mean()) if perf.size else 0.0
    else:
        overall = float(overall_performance)
    delays = session.state.delays()
    session.entries.append(RecordEntry(
        epoch=plan.epoch, competence=plan.competence,
        current_pairs=plan.current_pairs, delays=dict(delays),
        used={pid: pid in plan.current_pairs for pid in delays},
        presented=int(plan.train_selection.size), performance=overall))
    return delays


def session_delays(session: ExternalSession) -> dict[str, float]:
    return session.state.delays()


def session_record(session: ExternalSession, path) -> None:
    """Write the curriculum record; the session must have run to completion."""
    if not session.finished:
        raise ProtocolError(f"cannot write a record at epoch {session.epoch} of "
                            f"{session.state.epochs}")
    cfg = session.state.config
    header = record_header(config_hash=cfg.config_hash(), seed=cfg.seed,
                           pairs=[p.pair_id for p in session.state.pairs],
                           epochs=session.state.epochs, competence=cfg.competence,
                           kernel=cfg.kernel, eta=cfg.eta,
                           train_size=session.state.train_size,
                           val_size=session.state.val_size)
    record = CurriculumRecord(header=header, entries=list(session.entries))
    save_record(record, path)
