"""Automaton composition and the named permutation families.

Each process runs a finite state automaton made of couples: a wait
state fused with its action state.  A receive couple accepts a message
from any sender; a send couple targets one peer.  For process i the
program is always: i receive couples, N send couples following the
process's permutation, then N-i receive couples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import PermutationSpec, validate_permutation
from .errors import OutOfRangeError, OwnerMismatchError, UnknownStrategyError

RECV = "recv"
SEND = "send"


@dataclass(frozen=True)
class StateCouple:
    """One schedulable unit: (WR,R) with wildcard source, or (WS_j,S_j)."""

    kind: str
    target: int | None = None


RECEIVE_COUPLE = StateCouple(RECV)


def send_couple(target: int) -> StateCouple:
    return StateCouple(SEND, target)


@dataclass(frozen=True)
class FsaProgram:
    """Ordered couple sequence for one process; START/STOP are implicit."""

    owner: int
    couples: tuple[StateCouple, ...]

    @property
    def send_targets(self) -> tuple[int, ...]:
        return tuple(c.target for c in self.couples if c.kind == SEND)


def identity_permutation(owner: int, n: int) -> PermutationSpec:
    """Send order 0..N ascending, skipping the owner."""
    if not 0 <= owner <= n:
        raise OutOfRangeError(owner, owner, n)
    targets = tuple(j for j in range(n + 1) if j != owner)
    return PermutationSpec(owner, targets)


def pipelined_permutation(owner: int, n: int) -> PermutationSpec:
    """Send order owner+1..N then 0..owner-1 (owner cyclic left shifts)."""
    if not 0 <= owner <= n:
        raise OutOfRangeError(owner, owner, n)
    targets = tuple(range(owner + 1, n + 1)) + tuple(range(owner))
    return PermutationSpec(owner, targets)


def compose_fsa(owner: int, n: int, perm: PermutationSpec) -> FsaProgram:
    """Build the gossiping automaton for one process.

    Structure: owner receive couples, one send couple per permutation
    target in order, then n-owner receive couples (2n couples total).
    """
    if perm.owner != owner:
        raise OwnerMismatchError(
            f"permutation owned by {perm.owner}, composing for {owner}"
        )
    validate_permutation(owner, perm.targets, n)
    couples = (
        (RECEIVE_COUPLE,) * owner
        + tuple(send_couple(j) for j in perm.targets)
        + (RECEIVE_COUPLE,) * (n - owner)
    )
    return FsaProgram(owner, couples)


@dataclass(frozen=True)
class HybridSpec:
    """Mix descriptor: fraction h of processes use the pipelined order."""

    n: int
    h: Fraction
    strategy: str = "prefix"

    def __post_init__(self):
        if not 0 <= self.h <= 1:
            raise ValueError(f"h must lie in [0, 1], got {self.h}")


# strategy name -> (n, k) -> ids that receive the pipelined permutation
_STRATEGIES: dict[str, Callable[[int, int], Sequence[int]]] = {
    "prefix": lambda n, k: range(k),
}


def pipelined_count(n: int, h: Fraction) -> int:
    """Number of pipelined processes: round-half-up of h*(N+1)."""
    return int(Fraction(h) * (n + 1) + Fraction(1, 2))


def hybrid_assignment(spec: HybridSpec) -> list[PermutationSpec]:
    """Assign pipelined permutations to k processes, identity to the rest."""
    try:
        pick = _STRATEGIES[spec.strategy]
    except KeyError:
        raise UnknownStrategyError(
            f"unknown strategy {spec.strategy!r}; known: {sorted(_STRATEGIES)}"
        ) from None
    k = pipelined_count(spec.n, spec.h)
    chosen = set(pick(spec.n, k))
    return [
        pipelined_permutation(i, spec.n) if i in chosen else identity_permutation(i, spec.n)
        for i in range(spec.n + 1)
    ]


def homogeneous_assignment(n: int, family: str) -> list[PermutationSpec]:
    """All processes use one family: 'identity' or 'pipelined'."""
    if family == "identity":
        return [identity_permutation(i, n) for i in range(n + 1)]
    if family == "pipelined":
        return [pipelined_permutation(i, n) for i in range(n + 1)]
    raise ValueError(f"unknown family {family!r}")
