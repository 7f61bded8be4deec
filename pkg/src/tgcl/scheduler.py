"""Spaced-repetition scheduler over (index, order) pairs.

Every pair carries a real-valued delay; pairs with delay <= 1 form the
current batch and are trained on their top competence-fraction of ranked
samples, delayed pairs just tick down. After training, each current pair is
scored on its top validation samples: the kernel decay rate tau is refit
from the previous activation's snapshot, per-sample optimal delays are read
off the inverted kernel, and their mean (clipped to the remaining horizon)
becomes the pair's new delay.

The epoch is split into a pure ``plan`` and a state-advancing
``apply_feedback`` so external training loops can drive the same evolution
through flat arrays.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .competence import CompetenceParams, active_count, competence_at_epoch
from .errors import ConfigurationError, DomainError
from .kernels import KERNEL_KINDS, TAU_MAX, TAU_MIN, fit_tau, solve_delay_x
from .pipeline import RankingTable
from .records import CurriculumRecord, RecordEntry, record_header

LOSS_FLOOR = 1e-8
PERF_FLOOR = 1e-6

DELAY_CAP_POLICIES = ("remaining", "total")


@dataclass
class SchedulerConfig:
    kernel: str = "lap"
    eta: float = 0.8
    competence: CompetenceParams = field(default_factory=CompetenceParams)
    tau_min: float = TAU_MIN
    tau_max: float = TAU_MAX
    delay_cap: str = "remaining"
    pin_delays: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kernel not in KERNEL_KINDS:
            raise ConfigurationError(f"unknown kernel {self.kernel!r}")
        if not 0.0 < self.eta < 1.0:
            raise ConfigurationError(f"eta must be in (0, 1), got {self.eta}")
        if self.delay_cap not in DELAY_CAP_POLICIES:
            raise ConfigurationError(f"unknown delay cap policy {self.delay_cap!r}")
        if not 0.0 < self.tau_min < self.tau_max:
            raise ConfigurationError("need 0 < tau_min < tau_max")

    def config_hash(self) -> str:
        payload = {
            "kernel": self.kernel, "eta": self.eta, "c0": self.competence.c0,
            "alpha": self.competence.alpha, "epochs": self.competence.epochs,
            "tau_min": self.tau_min, "tau_max": self.tau_max,
            "delay_cap": self.delay_cap, "pin_delays": self.pin_delays,
            "seed": self.seed,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class Snapshot:
    """What a pair remembers from its last activation."""

    sample_ids: np.ndarray
    losses: np.ndarray
    performance: float
    epoch: int


@dataclass
class PairState:
    pair_id: str
    ranking: RankingTable
    delay: float = 1.0
    tau: float = 1.0
    snapshot: Snapshot | None = None


@dataclass
class PairFeedback:
    """Learner outputs on one current pair's evaluated validation samples."""

    val_ids: np.ndarray
    losses: np.ndarray
    probas: np.ndarray
    performance: float


@dataclass
class EpochPlan:
    epoch: int
    competence: float
    current_pairs: tuple[str, ...]
    delayed_pairs: tuple[str, ...]
    train_lists: dict[str, np.ndarray]
    val_lists: dict[str, np.ndarray]
    train_selection: np.ndarray  # deduplicated union, for usage accounting


def compute_delay(kernel: str, eta: float, tau: float, losses, performance: float,
                  remaining: float) -> float:
    """Mean per-sample optimal delay, clipped to [1, remaining].

    Inverts the kernel at eta to get the largest admissible x*, then maps
    each sample through t = x* * performance / loss: easier samples (small
    loss) in stronger models (large performance) earn longer delays.
    """
    losses = np.asarray(losses, dtype=np.float64)
    if losses.size == 0:
        raise DomainError("compute_delay needs at least one loss")
    if np.any(losses < 0.0):
        raise DomainError("losses must be >= 0")
    gamma = max(float(performance), PERF_FLOOR)
    x_star = solve_delay_x(kernel, eta, tau)
    per_sample = x_star * gamma / np.maximum(losses, LOSS_FLOOR)
    return float(np.clip(per_sample.mean(), 1.0, max(remaining, 1.0)))


class SchedulerState:
    """Delay bookkeeping for a full training run; one owner per run."""

    def __init__(self, config: SchedulerConfig, rankings: list[RankingTable]):
        if not rankings:
            raise ConfigurationError("scheduler needs at least one (index, order) pair")
        self.config = config
        self.pairs = [PairState(pair_id=r.pair_id, ranking=r) for r in rankings]
        ids = [p.pair_id for p in self.pairs]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("duplicate (index, order) pairs")
        sizes = {(r.train_order.size, r.val_order.size) for r in rankings}
        if len(sizes) != 1:
            raise ConfigurationError("pair rankings disagree on split sizes")
        self.train_size, self.val_size = sizes.pop()
        self.epoch = 0
        self._by_id = {p.pair_id: p for p in self.pairs}

    @property
    def epochs(self) -> int:
        return self.config.competence.epochs

    def pair(self, pid: str) -> PairState:
        return self._by_id[pid]

    def delays(self) -> dict[str, float]:
        return {p.pair_id: p.delay for p in self.pairs}

    def plan(self) -> EpochPlan:
        """Partition pairs and select this epoch's train/eval samples (pure)."""
        if self.epoch >= self.epochs:
            raise DomainError(f"run is complete after {self.epochs} epochs")
        params = self.config.competence
        c = competence_at_epoch(self.epoch, params)
        n_train = active_count(self.epoch, self.train_size, params)
        n_val = active_count(self.epoch, self.val_size, params)
        current, delayed = [], []
        for p in self.pairs:
            (current if p.delay <= 1.0 else delayed).append(p.pair_id)
        train_lists = {pid: self._by_id[pid].ranking.train_order[:n_train]
                       for pid in current}
        val_lists = {pid: self._by_id[pid].ranking.val_order[:n_val]
                     for pid in current}
        union = (np.unique(np.concatenate(list(train_lists.values())))
                 if train_lists else np.empty(0, dtype=np.int64))
        return EpochPlan(epoch=self.epoch, competence=c,
                         current_pairs=tuple(current), delayed_pairs=tuple(delayed),
                         train_lists=train_lists, val_lists=val_lists,
                         train_selection=union)

    def _remaining(self, epoch: int) -> float:
        if self.config.delay_cap == "total":
            return float(self.epochs)
        return float(max(self.epochs - 1 - epoch, 1))

    def apply_feedback(self, plan: EpochPlan, feedback: dict[str, PairFeedback]) -> None:
        """Advance one epoch: tick delayed pairs down, refit tau and set new
        delays for current pairs. All updates are computed before any state
        mutation, so a failure leaves the state untouched."""
        if plan.epoch != self.epoch:
            raise DomainError(f"plan is for epoch {plan.epoch}, state at {self.epoch}")
        if set(feedback) != set(plan.current_pairs):
            missing = set(plan.current_pairs) ^ set(feedback)
            raise DomainError(f"feedback does not match current batch: {sorted(missing)}")
        cfg = self.config
        updates: dict[str, tuple[float, float, Snapshot]] = {}
        for pid in plan.current_pairs:
            fb = feedback[pid]
            expected = plan.val_lists[pid]
            got = np.asarray(fb.val_ids, dtype=np.int64)
            if got.shape != expected.shape or not np.array_equal(got, expected):
                raise DomainError(f"pair {pid}: feedback ids differ from the plan")
            losses = np.asarray(fb.losses, dtype=np.float64)
            probas = np.asarray(fb.probas, dtype=np.float64)
            if losses.shape != expected.shape or probas.shape != expected.shape:
                raise DomainError(f"pair {pid}: feedback arrays misaligned")
            state = self._by_id[pid]
            tau = state.tau
            if state.snapshot is not None:
                tau = self._refit_tau(state, plan.epoch, expected, probas)
            gamma = max(float(fb.performance), PERF_FLOOR)
            delay = compute_delay(cfg.kernel, cfg.eta, tau, losses, gamma,
                                  self._remaining(plan.epoch))
            snap = Snapshot(sample_ids=expected.copy(), losses=losses.copy(),
                            performance=gamma, epoch=plan.epoch)
            updates[pid] = (delay, tau, snap)
        # commit
        for pid in plan.delayed_pairs:
            self._by_id[pid].delay -= 1.0
        for pid, (delay, tau, snap) in updates.items():
            state = self._by_id[pid]
            state.delay, state.tau, state.snapshot = delay, tau, snap
        if cfg.pin_delays:
            for p in self.pairs:
                p.delay = 1.0
        self.epoch += 1

    def _refit_tau(self, state: PairState, epoch: int, val_ids: np.ndarray,
                   probas: np.ndarray) -> float:
        """Refit tau from the snapshot losses and the current probabilities on
        the snapshot samples still inside the evaluated top set."""
        snap = state.snapshot
        pos = {int(s): i for i, s in enumerate(val_ids)}
        keep = [i for i, s in enumerate(snap.sample_ids) if int(s) in pos]
        if not keep:
            return state.tau
        dt = float(epoch - snap.epoch)
        x = snap.losses[keep] * dt / max(snap.performance, PERF_FLOOR)
        p = probas[[pos[int(snap.sample_ids[i])] for i in keep]]
        return fit_tau(self.config.kernel, x, p, self.config.eta,
                       tau_min=self.config.tau_min, tau_max=self.config.tau_max,
                       fallback=state.tau)


def scheduler_step(state: SchedulerState, learner) -> EpochPlan:
    """One epoch of Algorithm-style training with the native learner."""
    plan = state.plan()
    for pid in plan.current_pairs:
        learner.train_on(plan.train_lists[pid])
    feedback = {}
    for pid in plan.current_pairs:
        ids = plan.val_lists[pid]
        feedback[pid] = PairFeedback(val_ids=ids, losses=learner.loss_of(ids),
                                     probas=learner.proba_of(ids),
                                     performance=learner.eval_on(ids))
    state.apply_feedback(plan, feedback)
    return plan


@dataclass
class TrainingResult:
    learner: object
    record: CurriculumRecord
    presented_total: int
    best_epoch: int
    val_metric: float
    presentation_log: list[tuple[int, str, np.ndarray]]


def run_training(config: SchedulerConfig, rankings: list[RankingTable], learner,
                 dataset, track_presentations: bool = False,
                 record_sink=None) -> TrainingResult:
    """Full training loop: E planned epochs, one record entry per epoch,
    returning the best-validation checkpoint."""
    state = SchedulerState(config, rankings)
    val_ids = dataset.val_ids
    if val_ids.size == 0:
        raise DomainError("dataset has no validation samples")
    entries = []
    log: list[tuple[int, str, np.ndarray]] = []
    best_metric, best_state, best_epoch = -np.inf, None, -1
    presented_total = 0
    for _ in range(state.epochs):
        plan = state.plan()
        for pid in plan.current_pairs:
            ids = plan.train_lists[pid]
            learner.train_on(ids)
            if track_presentations:
                log.append((plan.epoch, pid, np.sort(ids)))
        feedback = {}
        for pid in plan.current_pairs:
            ids = plan.val_lists[pid]
            feedback[pid] = PairFeedback(val_ids=ids, losses=learner.loss_of(ids),
                                         probas=learner.proba_of(ids),
                                         performance=learner.eval_on(ids))
        state.apply_feedback(plan, feedback)
        metric = learner.eval_on(val_ids)
        if metric > best_metric:
            best_metric, best_state, best_epoch = metric, learner.snapshot(), plan.epoch
        presented = int(plan.train_selection.size)
        presented_total += presented
        entry = RecordEntry(epoch=plan.epoch, competence=plan.competence,
                            current_pairs=plan.current_pairs,
                            delays=state.delays(),
                            used={p.pair_id: (p.pair_id in plan.current_pairs)
                                  for p in state.pairs},
                            presented=presented, performance=float(metric))
        entries.append(entry)
        if record_sink is not None:
            record_sink(entry)
    learner.restore(best_state)
    header = record_header(config_hash=config.config_hash(), seed=config.seed,
                           pairs=[p.pair_id for p in state.pairs],
                           epochs=state.epochs, competence=config.competence,
                           kernel=config.kernel, eta=config.eta,
                           train_size=state.train_size, val_size=state.val_size)
    record = CurriculumRecord(header=header, entries=entries)
    record.validate()
    return TrainingResult(learner=learner, record=record,
                          presented_total=presented_total, best_epoch=best_epoch,
                          val_metric=float(best_metric), presentation_log=log)
