"""Exception hierarchy shared by all gossip_lab modules."""

from __future__ import annotations


class GossipLabError(Exception):
    """Base class for every error raised by this package."""


class PermutationError(GossipLabError, ValueError):
    """A send-order permutation failed validation."""


class DuplicateTargetError(PermutationError):
    def __init__(self, owner: int, target: int, index: int):
        super().__init__(
            f"process {owner}: target {target} repeated at position {index}"
        )
        self.owner = owner
        self.target = target
        self.index = index


class SelfTargetError(PermutationError):
    def __init__(self, owner: int, index: int):
        super().__init__(f"process {owner}: sends to itself at position {index}")
        self.owner = owner
        self.index = index


class WrongLengthError(PermutationError):
    def __init__(self, owner: int, expected: int, got: int):
        super().__init__(
            f"process {owner}: expected {expected} targets, got {got}"
        )
        self.owner = owner
        self.expected = expected
        self.got = got


class OutOfRangeError(PermutationError):
    def __init__(self, owner: int, value: int, n: int, index: int | None = None):
        where = f" at position {index}" if index is not None else ""
        super().__init__(
            f"process {owner}: id {value}{where} outside 0..{n}"
        )
        self.owner = owner
        self.value = value
        self.index = index


class OwnerMismatchError(GossipLabError, ValueError):
    """Permutation passed to an automaton builder belongs to another process."""


class UnknownStrategyError(GossipLabError, ValueError):
    """Hybrid assignment strategy name is not registered."""


class InvalidCapacityError(GossipLabError, ValueError):
    """Channel capacity must provide at least one slot pair per step."""


class DomainTooSmallError(GossipLabError, ValueError):
    """Closed-form metric evaluated below its validated domain."""


class EmptyGridError(GossipLabError, ValueError):
    """Lookup-table grid contains no sample points."""


class EngineError(GossipLabError):
    """Base class for simulation failures."""


class DeadlockDetectedError(EngineError):
    """No communication pair is eligible while processes are still active."""

    def __init__(self, step: int, active: tuple[int, ...]):
        super().__init__(f"deadlock at step {step}: active processes {list(active)}")
        self.step = step
        self.active = active


class StepLimitExceededError(EngineError):
    """Run length would exceed the configured safety cap."""

    def __init__(self, limit: int):
        super().__init__(f"run did not terminate within {limit} steps")
        self.limit = limit
