"""Shared domain vocabulary: processes, actions, permutations, runs.

A system of size N has N+1 processes identified by the integers 0..N.
Time is discrete; each step offers every process one slot, which it
either uses (send or receive) or wastes (wait).  A completed run is a
(N+1) x lambda action matrix plus the per-step used-slot counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    DuplicateTargetError,
    InvalidCapacityError,
    OutOfRangeError,
    SelfTargetError,
    WrongLengthError,
)

# Action kinds as stored in run tables.
SEND = "S"
RECEIVE = "R"
WAIT_SEND = "ws"
WAIT_RECEIVE = "wr"


@dataclass(frozen=True)
class Action:
    """What one process did during one slot."""

    kind: str
    peer: int | None = None

    @classmethod
    def send(cls, to: int) -> "Action":
        return cls(SEND, to)

    @classmethod
    def receive(cls, source: int) -> "Action":
        return cls(RECEIVE, source)

    @classmethod
    def wait_send(cls) -> "Action":
        return cls(WAIT_SEND)

    @classmethod
    def wait_receive(cls) -> "Action":
        return cls(WAIT_RECEIVE)

    @property
    def is_comm(self) -> bool:
        return self.kind in (SEND, RECEIVE)


@dataclass(frozen=True)
class PermutationSpec:
    """The send order of one process: a permutation of every other id."""

    owner: int
    targets: tuple[int, ...]


def validate_permutation(
    owner: int, targets: Sequence[int], n: int
) -> PermutationSpec:
    """Check that `targets` is a permutation of {0..n} minus `owner`.

    Raises an error naming the first offending position.
    """
    if n < 1:
        raise ValueError(f"system size must be >= 1, got {n}")
    if not 0 <= owner <= n:
        raise OutOfRangeError(owner, owner, n)
    targets = tuple(int(t) for t in targets)
    if len(targets) != n:
        raise WrongLengthError(owner, n, len(targets))
    seen: set[int] = set()
    for index, t in enumerate(targets):
        if not 0 <= t <= n:
            raise OutOfRangeError(owner, t, n, index)
        if t == owner:
            raise SelfTargetError(owner, index)
        if t in seen:
            raise DuplicateTargetError(owner, t, index)
        seen.add(t)
    return PermutationSpec(owner, targets)


# Per-step used-slot counts [nu_1, ..., nu_lambda].
UtilizationString = tuple[int, ...]


@dataclass(frozen=True)
class RunTable:
    """A completed run: action matrix (process x step) plus used counts."""

    n: int
    actions: tuple[tuple[Action, ...], ...]
    nu: UtilizationString

    @property
    def length(self) -> int:
        return len(self.nu)


def validate_run_table(rt: RunTable) -> None:
    """Assert every structural invariant of a run table.

    Intended for tests and debugging; simulation output satisfies these
    by construction.
    """
    n = rt.n
    lam = rt.length
    if len(rt.actions) != n + 1:
        raise ValueError(f"expected {n + 1} rows, got {len(rt.actions)}")
    for i, row in enumerate(rt.actions):
        if len(row) != lam:
            raise ValueError(f"row {i}: expected {lam} cells, got {len(row)}")
        sends = [a for a in row if a.kind == SEND]
        receives = [a for a in row if a.kind == RECEIVE]
        if len(sends) != n or len(receives) != n:
            raise ValueError(
                f"row {i}: {len(sends)} sends / {len(receives)} receives, want {n}/{n}"
            )
        # Broadcast right: exactly i receives before the first send.
        first_send = next(t for t, a in enumerate(row) if a.kind == SEND)
        before = sum(1 for a in row[:first_send] if a.kind == RECEIVE)
        if before != i:
            raise ValueError(f"row {i}: {before} receives before first send, want {i}")
    # Column pairing and used counts.
    for t in range(lam):
        used = 0
        for i in range(n + 1):
            a = rt.actions[i][t]
            if not a.is_comm:
                continue
            used += 1
            if a.kind == SEND:
                mate = rt.actions[a.peer][t]
                if mate != Action.receive(i):
                    raise ValueError(f"step {t + 1}: send {i}->{a.peer} unmatched")
            else:
                mate = rt.actions[a.peer][t]
                if mate != Action.send(i):
                    raise ValueError(f"step {t + 1}: receive {i}<-{a.peer} unmatched")
        if used != rt.nu[t]:
            raise ValueError(f"step {t + 1}: nu={rt.nu[t]} but {used} slots used")
        if used % 2 != 0 or used > n + 1:
            raise ValueError(f"step {t + 1}: impossible used count {used}")
    if sum(rt.nu) != 2 * n * (n + 1):
        raise ValueError(f"total used slots {sum(rt.nu)} != {2 * n * (n + 1)}")
    if lam and rt.nu[-1] == 0:
        raise ValueError("final step carries no communication")


@dataclass(frozen=True)
class ChannelProfile:
    """Time-varying channel capacity: at most capacity(t) pairs per step."""

    capacity: Callable[[int], int]
    description: str

    @classmethod
    def constant(cls, value: int) -> "ChannelProfile":
        if value < 1:
            raise InvalidCapacityError(f"capacity must be >= 1, got {value}")
        return cls(lambda t: value, f"constant:{value}")

    @classmethod
    def unconstrained(cls, n: int) -> "ChannelProfile":
        # N+1 can never bind: a step holds at most floor((N+1)/2) pairs.
        return cls(lambda t: n + 1, "unconstrained")

    def at(self, t: int) -> int:
        value = self.capacity(t)
        if value < 1:
            raise InvalidCapacityError(f"capacity {value} at step {t}")
        return value


@dataclass(frozen=True)
class Metrics:
    """Quality metrics of a run: length, parallelism, channel exploitation."""

    length: int
    mu: Fraction
    efficiency: Fraction
