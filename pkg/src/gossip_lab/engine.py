"""Synchronous slot-based execution of gossiping automata.

Each step pairs senders with ready receivers under a channel cap:

* an eligible pair is a process whose next couple is a send to some
  peer whose next couple is a receive;
* receivers are served in ascending id, each matched with its lowest-id
  pending sender;
* when the channel cap binds, the first `cap` pairs in ascending
  receiver order fire and the rest wait.

Wait states take zero steps when the rendezvous is immediately
available: a couple either fires (S/R) or waits (ws/wr) each step.
Processes that already reached STOP are recorded as waiting to receive,
which is how published run tables render them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .core import Action, ChannelProfile, PermutationSpec, RunTable
from .errors import DeadlockDetectedError, StepLimitExceededError
from .fsa import RECV, SEND, FsaProgram, StateCouple, compose_fsa


def default_step_cap(n: int) -> int:
    # Far above the identity family's ~(3/4)N^2 worst case.
    return 10 * n * n + 10


@dataclass
class ProcessCursor:
    """Program counter over one process's couple sequence."""

    owner: int
    program: FsaProgram
    position: int = 0

    @property
    def stopped(self) -> bool:
        return self.position >= len(self.program.couples)

    def next_couple(self) -> StateCouple | None:
        if self.stopped:
            return None
        return self.program.couples[self.position]


@dataclass(frozen=True)
class StepOutcome:
    """Everything that happened during one step."""

    step: int
    pairs: tuple[tuple[int, int], ...]  # (sender, receiver), ascending receiver
    actions: tuple[Action, ...]


def fresh_cursors(assignment: Sequence[PermutationSpec]) -> list[ProcessCursor]:
    """Compose one automaton per process and park each at its start."""
    n = len(assignment) - 1
    for i, spec in enumerate(assignment):
        if spec.owner != i:
            raise ValueError(f"assignment slot {i} holds permutation of {spec.owner}")
    return [ProcessCursor(i, compose_fsa(i, n, assignment[i])) for i in range(n + 1)]


def match_step(
    cursors: Sequence[ProcessCursor], cap: int, step: int = 1
) -> StepOutcome:
    """Reference matcher: fire up to `cap` rendezvous, advance the paired
    cursors in place, and report every process's action for this step."""
    active = [c for c in cursors if not c.stopped]
    if not active:
        raise ValueError("all cursors stopped")

    senders: dict[int, list[int]] = {}  # receiver -> sender ids targeting it
    receivers: list[int] = []
    for c in cursors:
        couple = c.next_couple()
        if couple is None:
            continue
        if couple.kind == SEND:
            senders.setdefault(couple.target, []).append(c.owner)
        else:
            receivers.append(c.owner)

    tentative = []
    for r in sorted(receivers):
        if senders.get(r):
            tentative.append((min(senders[r]), r))
    if not tentative:
        raise DeadlockDetectedError(step, tuple(c.owner for c in active))
    pairs = tuple(tentative[:cap])

    actions: list[Action] = []
    paired = {s: r for s, r in pairs} | {r: s for s, r in pairs}
    for c in cursors:
        couple = c.next_couple()
        if c.owner in paired:
            if couple.kind == SEND:
                actions.append(Action.send(paired[c.owner]))
            else:
                actions.append(Action.receive(paired[c.owner]))
            c.position += 1
        elif couple is not None and couple.kind == SEND:
            actions.append(Action.wait_send())
        else:
            actions.append(Action.wait_receive())
    return StepOutcome(step, pairs, tuple(actions))


@dataclass(frozen=True)
class RunSummary:
    """Metrics-only view of a run; the action matrix is elided."""

    n: int
    nu: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.nu)


class _Engine:
    """Incremental state for the step loop.

    Tracks, per process, the pending couple phase plus two derived
    structures: a min-heap of pending senders per receiver and the set
    of receivers with at least one pending sender.  Pair selection per
    step is then proportional to the number of pairs, not to N.
    """

    def __init__(self, assignment: Sequence[PermutationSpec]):
        self.n = len(assignment) - 1
        for i, spec in enumerate(assignment):
            if spec.owner != i:
                raise ValueError(
                    f"assignment slot {i} holds permutation of {spec.owner}"
                )
        self.programs = [
            compose_fsa(i, self.n, assignment[i]).couples for i in range(self.n + 1)
        ]
        self.pos = [0] * (self.n + 1)
        self.phase: list[str | None] = [None] * (self.n + 1)  # SEND/RECV/None
        self.pending: list[list[int]] = [[] for _ in range(self.n + 1)]
        self.eligible: set[int] = set()
        self.active = self.n + 1
        for i in range(self.n + 1):
            self._enter(i)

    def _enter(self, i: int) -> None:
        program = self.programs[i]
        if self.pos[i] >= len(program):
            self.phase[i] = None
            self.active -= 1
            return
        couple = program[self.pos[i]]
        if couple.kind == SEND:
            self.phase[i] = SEND
            heapq.heappush(self.pending[couple.target], i)
            if self.phase[couple.target] == RECV:
                self.eligible.add(couple.target)
        else:
            self.phase[i] = RECV
            if self.pending[i]:
                self.eligible.add(i)

    def _advance(self, i: int) -> None:
        if self.phase[i] == RECV:
            self.eligible.discard(i)
        self.pos[i] += 1
        self._enter(i)

    def step_pairs(self, step: int, cap: int) -> list[tuple[int, int]]:
        if not self.eligible:
            raise DeadlockDetectedError(
                step,
                tuple(i for i in range(self.n + 1) if self.phase[i] is not None),
            )
        chosen = sorted(self.eligible)[:cap]
        # Pop every selected sender before any cursor moves: selection
        # must only see the state the step started with.
        pairs = [(heapq.heappop(self.pending[r]), r) for r in chosen]
        return pairs

    def commit(self, pairs: list[tuple[int, int]]) -> None:
        for s, r in pairs:
            self._advance(s)
            self._advance(r)

    def column(self, pairs: list[tuple[int, int]]) -> tuple[Action, ...]:
        col = [
            Action.wait_send() if self.phase[i] == SEND else Action.wait_receive()
            for i in range(self.n + 1)
        ]
        for s, r in pairs:
            col[s] = Action.send(r)
            col[r] = Action.receive(s)
        return tuple(col)


def _run(
    assignment: Sequence[PermutationSpec],
    profile: ChannelProfile | None,
    max_steps: int | None,
    record: bool,
):
    engine = _Engine(assignment)
    if profile is None:
        profile = ChannelProfile.unconstrained(engine.n)
    if max_steps is None:
        max_steps = default_step_cap(engine.n)
    nu: list[int] = []
    columns: list[tuple[Action, ...]] = []
    t = 0
    while engine.active:
        t += 1
        if t > max_steps:
            raise StepLimitExceededError(max_steps)
        pairs = engine.step_pairs(t, profile.at(t))
        if record:
            columns.append(engine.column(pairs))
        nu.append(2 * len(pairs))
        engine.commit(pairs)
    return engine.n, tuple(nu), columns


def simulate(
    assignment: Sequence[PermutationSpec],
    profile: ChannelProfile | None = None,
    max_steps: int | None = None,
) -> RunTable:
    """Run the system to completion and return the full run table."""
    n, nu, columns = _run(assignment, profile, max_steps, record=True)
    rows = tuple(tuple(col[i] for col in columns) for i in range(n + 1))
    return RunTable(n, rows, nu)


def simulate_metrics(
    assignment: Sequence[PermutationSpec],
    profile: ChannelProfile | None = None,
    max_steps: int | None = None,
) -> RunSummary:
    """Run the system recording only per-step used-slot counts.

    Same stepping core as simulate(); used where the action matrix
    would dominate memory (large N sweeps and tuning sessions).
    """
    n, nu, _ = _run(assignment, profile, max_steps, record=False)
    return RunSummary(n, nu)
