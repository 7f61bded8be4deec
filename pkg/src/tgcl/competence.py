"""Competence function: the fraction of ranked data available at time t.

c(t) = min(1, (1 - (1 - c0)(1 - t))^(1/alpha)); alpha > 1 front-loads data,
alpha < 1 lingers on the easy prefix. Epochs map to t via t = epoch/(E - 1)
so the final epoch always reaches full competence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class CompetenceParams:
    c0: float = 0.1
    alpha: float = 1.0
    epochs: int = 1

    def __post_init__(self):
        if not 0.0 <= self.c0 <= 1.0:
            raise ConfigurationError(f"c0 must be in [0, 1], got {self.c0}")
        if self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be > 0, got {self.alpha}")
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")


def competence(t: float, p: CompetenceParams) -> float:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"normalized time must be in [0, 1], got {t}")
    base = 1.0 - (1.0 - p.c0) * (1.0 - t)
    return min(1.0, base ** (1.0 / p.alpha))


def competence_at_epoch(epoch: int, p: CompetenceParams) -> float:
    if not 0 <= epoch < p.epochs:
        raise DomainError(f"epoch {epoch} outside [0, {p.epochs})")
    t = epoch / max(p.epochs - 1, 1)
    return competence(t, p)


def scaled_count(fraction: float, split_size: int) -> int:
    """ceil(split_size * fraction) clamped to [1, split_size].

    The epsilon guards against representation noise pushing exact integers
    over a ceil; replayed runs must reproduce the original counts exactly.
    """
    if split_size < 1:
        raise DomainError("split is empty")
    return min(split_size, max(1, math.ceil(split_size * fraction - 1e-9)))


def active_count(epoch: int, split_size: int, p: CompetenceParams) -> int:
    """Number of ranked samples available at ``epoch``, in [1, split_size]."""
    return scaled_count(competence_at_epoch(epoch, p), split_size)
