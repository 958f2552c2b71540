"""Run quality metrics and their closed-form oracles.

All values are exact: lengths are integers, parallelism and efficiency
are rationals.  Floating point appears only when callers render text.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Metrics, RunTable, UtilizationString
from .errors import DomainTooSmallError


def utilization_string(rt: RunTable) -> UtilizationString:
    """Per-step used-slot counts, recounted from the action matrix."""
    return tuple(
        sum(1 for row in rt.actions if row[t].is_comm) for t in range(rt.length)
    )


def run_length(rt: RunTable) -> int:
    return rt.length


def mean_slot_utilization(rt: RunTable) -> Fraction:
    """Average used slots per step; equals 2N(N+1)/lambda exactly."""
    return mu_from_length(rt.n, rt.length)


def mu_from_length(n: int, length: int) -> Fraction:
    return Fraction(2 * n * (n + 1), length)


def efficiency(rt: RunTable) -> Fraction:
    """Fraction of the N+1 available slots per step actually used."""
    return mean_slot_utilization(rt) / (rt.n + 1)


def metrics_for(rt: RunTable) -> Metrics:
    mu = mean_slot_utilization(rt)
    return Metrics(rt.length, mu, mu / (rt.n + 1))


def closed_form_length_identity(n: int) -> int:
    """Homogeneous identity run length: 3/4 N^2 + 5/4 N + 1/2 floor(N/2)."""
    if n < 1:
        raise DomainTooSmallError(f"identity length needs N >= 1, got {n}")
    value = Fraction(3 * n * n + 5 * n, 4) + Fraction(n // 2, 2)
    assert value.denominator == 1
    return int(value)


def closed_form_length_pipelined(n: int) -> int:
    """Homogeneous pipelined run length: 3N, valid for N >= 2.

    At N=1 the simulated run takes 2 steps, not 3, so the formula's
    domain starts at 2.
    """
    if n < 2:
        raise DomainTooSmallError(f"pipelined length formula needs N >= 2, got {n}")
    return 3 * n


def closed_form_mu_pipelined(n: int) -> Fraction:
    """Homogeneous pipelined parallelism: (2/3)(N+1), valid for N >= 2."""
    if n < 2:
        raise DomainTooSmallError(f"pipelined mu formula needs N >= 2, got {n}")
    return Fraction(2, 3) * (n + 1)


def asymptotic_mu_identity() -> Fraction:
    """Limit of the identity family's parallelism as N grows."""
    return Fraction(8, 3)
