"""Retention kernels, their inverses, and decay-rate fitting.

Each kernel f(x, tau) is non-increasing in x = loss * delay / performance,
maps 0 to 1, and stays inside [0, 1]. solve_delay_x inverts f at a recall
threshold eta; fit_tau recovers tau from observed (x, p) pairs by least
squares over the samples that stayed above eta.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError, DomainError

KERNEL_KINDS = ("lap", "sec", "cos", "qua", "lin")

TAU_MIN = 1e-6
TAU_MAX = 1e6

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check(kind, tau):
    if kind not in KERNEL_KINDS:
        raise ConfigurationError(f"unknown kernel {kind!r}")
    if tau <= 0.0:
        raise DomainError(f"tau must be > 0, got {tau}")


def kernel_eval(kind: str, x, tau: float, literal_cos: bool = False):
    """Evaluate the kernel at x >= 0 (scalar or array)."""
    _check(kind, tau)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise DomainError("kernel argument must be >= 0")
    if kind == "lap":
        out = np.exp(-x * tau)
    elif kind == "sec":
        with np.errstate(over="ignore"):
            out = 2.0 / (np.exp(-tau * x ** 2) + np.exp(tau * x ** 2))
        out = np.nan_to_num(out, nan=0.0, posinf=0.0)
    elif kind == "cos":
        inside = x < 1.0 / tau
        raised = 0.5 * (np.cos(tau * math.pi * x) + 1.0)
        if literal_cos:
            raised = 0.5 * np.cos(tau * math.pi * x) + 1.0
        out = np.where(inside, raised, 0.0)
    elif kind == "qua":
        out = np.where(x ** 2 < 1.0 / tau, 1.0 - tau * x ** 2, 0.0)
    else:  # lin
        out = np.where(x < 1.0 / tau, 1.0 - tau * x, 0.0)
    return out if out.ndim else float(out)


def solve_delay_x(kind: str, eta: float, tau: float) -> float:
    """The unique x* >= 0 with f(x*, tau) = eta, in closed form."""
    _check(kind, tau)
    if not 0.0 < eta < 1.0:
        raise ConfigurationError(f"eta must be in (0, 1), got {eta}")
    if kind == "lap":
        return -math.log(eta) / tau
    if kind == "sec":
        return math.sqrt(math.acosh(1.0 / eta) / tau)
    if kind == "cos":
        return math.acos(2.0 * eta - 1.0) / (tau * math.pi)
    if kind == "qua":
        return math.sqrt((1.0 - eta) / tau)
    return (1.0 - eta) / tau  # lin


def fit_tau(kind: str, x, p, eta: float, tau_min: float = TAU_MIN,
            tau_max: float = TAU_MAX, fallback: float = 1.0,
            grid_size: int = 64, tol: float = 1e-6) -> float:
    """Least-squares tau over samples with p >= eta.

    A log-spaced grid scan brackets the minimum and golden-section search
    refines it; with no qualifying samples the previous tau (``fallback``)
    is kept. A minimum at the low end of the grid returns tau_min, so a
    flat objective resolves deterministically to the lower bound.
    """
    _check(kind, 1.0)
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if x.shape != p.shape:
        raise DomainError(f"x and p must align, got {x.shape} vs {p.shape}")
    keep = p >= eta
    if not np.any(keep):
        return fallback
    x, p = x[keep], p[keep]

    def objective(log_tau):
        return float(np.sum((kernel_eval(kind, x, math.exp(log_tau)) - p) ** 2))

    lo, hi = math.log(tau_min), math.log(tau_max)
    grid = np.linspace(lo, hi, grid_size)
    values = [objective(g) for g in grid]
    best = int(np.argmin(values))
    if best == 0:
        return tau_min
    a = grid[best - 1]
    b = grid[min(best + 1, grid_size - 1)]

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
    return math.exp((a + b) / 2.0)
