"""MAPE-style tuning of the hybrid mix after sensed channel capacity.

Monitor reads the contextual parallelism cp from a pluggable provider;
Analyze compares the incumbent mix's parallelism against cp with a
tolerance band; Plan picks a new mix from a lookup table or refines a
growing associative map dichotomically; Execute adopts the result.

The associative-map planner performs one refinement per call: find the
smallest known h whose mu clears cp, bracket it with the largest known
h whose mu falls below, probe between them, and record the probe.  The
default probe is the h-space midpoint; the literal mu-gap variant reads
the halved mu difference as a percentage (see `tune_adaptive`).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .engine import simulate_metrics
from .errors import EmptyGridError
from .fsa import HybridSpec, hybrid_assignment
from .metrics import mu_from_length

HBISECTION = "hbisect"
LITERAL_MU_GAP = "mugap"

NO_CHANGE = "no_change"
UNDERSHOOT = "undershoot"
OVERSHOOT = "overshoot"
SATURATED = "saturated"


def compute_mu(n: int, h, strategy: str = "prefix") -> Fraction:
    """Simulate one hybrid run on an unconstrained channel and return mu."""
    assignment = hybrid_assignment(HybridSpec(n, Fraction(h), strategy))
    summary = simulate_metrics(assignment)
    return mu_from_length(n, summary.length)


def format_exact(value: Fraction) -> str:
    """Exact text for a rational: decimal when terminating, else num/den."""
    value = Fraction(value)
    den = value.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = 0
    scaled = value
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(int(scaled))).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits] or '0'}.{text[-digits:]}"


def parse_exact(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(text)


class ParallelismMap:
    """Sorted h -> mu associations for one system size."""

    def __init__(self, n: int, entries: Iterable[tuple[Fraction, Fraction]] = ()):
        self.n = n
        self._mu: dict[Fraction, Fraction] = {}
        self._keys: list[Fraction] = []
        for h, mu in entries:
            self.insert(h, mu)

    @classmethod
    def seeded(cls, n: int) -> "ParallelismMap":
        """Map holding the two homogeneous endpoints h=0 and h=1."""
        return cls(n, [(Fraction(0), compute_mu(n, 0)), (Fraction(1), compute_mu(n, 1))])

    def insert(self, h, mu) -> None:
        h = Fraction(h)
        if not 0 <= h <= 1:
            raise ValueError(f"h must lie in [0, 1], got {h}")
        if h in self._mu:
            raise ValueError(f"duplicate key h={h}")
        self._mu[h] = Fraction(mu)
        bisect.insort(self._keys, h)

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, h) -> bool:
        return Fraction(h) in self._mu

    def __getitem__(self, h) -> Fraction:
        return self._mu[Fraction(h)]

    def keys(self) -> tuple[Fraction, ...]:
        return tuple(self._keys)

    def items(self) -> list[tuple[Fraction, Fraction]]:
        return [(h, self._mu[h]) for h in self._keys]

    def max_mu(self) -> Fraction:
        return max(self._mu.values())

    def min_key_at_least(self, cp) -> Fraction | None:
        """Smallest h whose mu clears cp, or None when cp is unreachable."""
        for h in self._keys:
            if self._mu[h] >= cp:
                return h
        return None

    def max_key_with_mu_below(self, value) -> Fraction | None:
        """Largest h whose mu lies strictly below `value`."""
        best = None
        for h in self._keys:
            if self._mu[h] < value:
                best = h
        return best

    def save_csv(self, path) -> None:
        lines = ["h,mu"]
        lines += [f"{format_exact(h)},{format_exact(mu)}" for h, mu in self.items()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load_csv(cls, path, n: int) -> "ParallelismMap":
        pmap = cls(n)
        lines = Path(path).read_text().splitlines()
        for line in lines[1:]:
            if not line.strip():
                continue
            h_text, mu_text = line.split(",")
            pmap.insert(parse_exact(h_text), parse_exact(mu_text))
        return pmap


def default_grid() -> tuple[Fraction, ...]:
    """200 samples of h: 0.5% to 100% in 0.5% steps."""
    return tuple(Fraction(k, 200) for k in range(1, 201))


def build_lookup_table(
    n: int, grid: Sequence[Fraction] | None = None, strategy: str = "prefix"
) -> ParallelismMap:
    """Precompute the h -> mu table over a grid of mix fractions."""
    grid = default_grid() if grid is None else tuple(Fraction(g) for g in grid)
    if not grid:
        raise EmptyGridError("lookup grid has no sample points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid values must be strictly increasing")
    pmap = ParallelismMap(n)
    for h in grid:
        pmap.insert(h, compute_mu(n, h, strategy))
    return pmap


@dataclass(frozen=True)
class PlanResult:
    """Outcome of a table lookup: chosen mix, its mu, saturation flag."""

    h: Fraction
    mu: Fraction
    saturated: bool


def tune_lookup(cp, pmap: ParallelismMap) -> PlanResult:
    """Smallest h whose mu clears cp; largest key flagged when none does."""
    if len(pmap) == 0:
        raise ValueError("empty parallelism map")
    h = pmap.min_key_at_least(cp)
    if h is None:
        top = pmap.keys()[-1]
        return PlanResult(top, pmap[top], True)
    return PlanResult(h, pmap[h], False)


@dataclass(frozen=True)
class Refinement:
    """Outcome of one associative-map refinement step."""

    status: str  # exact | refined | saturated | duplicate | floor
    h_best: Fraction
    mu_best: Fraction
    inserted: tuple[Fraction, Fraction] | None
    bracket: tuple[Fraction, Fraction] | None  # (sb, h0) when a bracket existed


def tune_adaptive(
    cp,
    pmap: ParallelismMap,
    mode: str = HBISECTION,
    compute: Callable[[Fraction], Fraction] | None = None,
) -> Refinement:
    """One dichotomic refinement of the associative map.

    Exact hits return without touching the map.  Otherwise the bracket
    is (sb, h0) with h0 the smallest satisfying key and sb the largest
    key with strictly smaller mu; the probe is their midpoint, or in
    mu-gap mode half the mu difference read as a percentage and clamped
    into the bracket.  A probe landing on a known key cannot refine and
    reports `duplicate`.
    """
    if compute is None:
        compute = lambda h: compute_mu(pmap.n, h)
    h0 = pmap.min_key_at_least(cp)
    if h0 is None:
        top = pmap.keys()[-1]
        return Refinement(SATURATED, top, pmap[top], None, None)
    mu0 = pmap[h0]
    if mu0 == cp:
        return Refinement("exact", h0, mu0, None, None)
    sb = pmap.max_key_with_mu_below(mu0)
    if sb is None:
        # Every known mu already clears cp; nothing to bracket against.
        return Refinement("floor", h0, mu0, None, None)
    if mode == HBISECTION:
        h_new = (h0 + sb) / 2
    elif mode == LITERAL_MU_GAP:
        h_new = (mu0 - pmap[sb]) / 2 / 100
        h_new = min(max(h_new, min(sb, h0)), max(sb, h0))
    else:
        raise ValueError(f"unknown refinement mode {mode!r}")
    if h_new in pmap:
        return Refinement("duplicate", h0, mu0, None, (sb, h0))
    mu_new = compute(h_new)
    pmap.insert(h_new, mu_new)
    return Refinement("refined", h_new, mu_new, (h_new, mu_new), (sb, h0))


@dataclass(frozen=True)
class SenseProvider:
    """Source of contextual parallelism readings, one integer per step."""

    kind: str
    constant_value: int | None = None
    schedule: tuple[tuple[int, int], ...] | None = None
    trace: tuple[int, ...] | None = None

    @classmethod
    def constant(cls, value: int) -> "SenseProvider":
        if value < 1:
            raise ValueError(f"capacity readings must be >= 1, got {value}")
        return cls("constant", constant_value=value)

    @classmethod
    def step_schedule(cls, pairs: Sequence[tuple[int, int]]) -> "SenseProvider":
        pairs = tuple((int(s), int(v)) for s, v in pairs)
        if not pairs:
            raise ValueError("empty schedule")
        if any(v < 1 for _, v in pairs):
            raise ValueError("capacity readings must be >= 1")
        if any(b[0] <= a[0] for a, b in zip(pairs, pairs[1:])):
            raise ValueError("schedule steps must be strictly increasing")
        return cls("schedule", schedule=pairs)

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "SenseProvider":
        values = tuple(int(v) for v in values)
        if not values:
            raise ValueError("empty trace")
        if any(v < 1 for v in values):
            raise ValueError("capacity readings must be >= 1")
        return cls("trace", trace=values)

    @classmethod
    def trace_file(cls, path) -> "SenseProvider":
        lines = Path(path).read_text().split()
        return cls.from_values([int(x) for x in lines])

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant:{self.constant_value}"
        if self.kind == "schedule":
            return "schedule:" + ",".join(f"{s}:{v}" for s, v in self.schedule)
        return f"trace[{len(self.trace)}]"


def sense(provider: SenseProvider, t: int) -> int:
    """Contextual parallelism at step t; traces hold their last value."""
    if provider.kind == "constant":
        return provider.constant_value
    if provider.kind == "schedule":
        value = provider.schedule[0][1]
        for start, v in provider.schedule:
            if start <= t:
                value = v
        return value
    if t <= len(provider.trace):
        return provider.trace[t - 1]
    return provider.trace[-1]


@dataclass(frozen=True)
class MapeDecision:
    """One Monitor-Analyze-Plan-Execute cycle, fully logged."""

    step: int
    cp: int
    status: str
    chosen_h: Fraction
    chosen_mu: Fraction
    refinements: tuple[tuple[Fraction, Fraction], ...]
    map_size: int


class MapeController:
    """Single-owner control-loop state: incumbent mix plus known map.

    Analyze flags the incumbent as in-band (no change), undershooting
    (mu below cp) or overshooting (mu above cp plus the band); Plan
    delegates to the lookup or adaptive planner; Execute adopts the
    planner's answer as the new incumbent.
    """

    def __init__(
        self,
        n: int,
        provider: SenseProvider,
        planner: str = "adaptive",
        mode: str = HBISECTION,
        band: Fraction = Fraction(1, 10),
        pmap: ParallelismMap | None = None,
        start_h=Fraction(0),
        compute: Callable[[Fraction], Fraction] | None = None,
    ):
        if planner not in ("lookup", "adaptive"):
            raise ValueError(f"unknown planner {planner!r}")
        self.n = n
        self.provider = provider
        self.planner = planner
        self.mode = mode
        self.band = Fraction(band)
        self.compute = compute or (lambda h: compute_mu(n, h))
        self.pmap = pmap if pmap is not None else ParallelismMap.seeded(n)
        self.incumbent = Fraction(start_h)
        if self.incumbent not in self.pmap:
            self.pmap.insert(self.incumbent, self.compute(self.incumbent))
        self.clock = 0
        self.history: list[MapeDecision] = []
        self.last_bracket: tuple[Fraction, Fraction] | None = None

    def in_band(self, mu: Fraction, cp: int) -> bool:
        return cp <= mu <= cp * (1 + self.band)

    def iterate(self) -> MapeDecision:
        """Run one MAPE cycle and adopt the planned mix."""
        self.clock += 1
        cp = sense(self.provider, self.clock)
        mu_inc = self.pmap[self.incumbent]
        refinements: tuple[tuple[Fraction, Fraction], ...] = ()
        self.last_bracket = None
        if self.in_band(mu_inc, cp):
            decision = MapeDecision(
                self.clock, cp, NO_CHANGE, self.incumbent, mu_inc, (), len(self.pmap)
            )
        else:
            if self.planner == "lookup":
                plan = tune_lookup(cp, self.pmap)
                chosen, saturated = plan.h, plan.saturated
            else:
                ref = tune_adaptive(cp, self.pmap, self.mode, self.compute)
                chosen, saturated = ref.h_best, ref.status == SATURATED
                if ref.inserted is not None:
                    refinements = (ref.inserted,)
                self.last_bracket = ref.bracket
            if saturated:
                status = SATURATED
            elif chosen == self.incumbent:
                status = NO_CHANGE
            elif mu_inc < cp:
                status = UNDERSHOOT
            else:
                status = OVERSHOOT
            self.incumbent = chosen
            decision = MapeDecision(
                self.clock, cp, status, chosen, self.pmap[chosen], refinements,
                len(self.pmap),
            )
        self.history.append(decision)
        return decision


def mape_iterate(controller: MapeController) -> MapeDecision:
    return controller.iterate()


@dataclass(frozen=True)
class SessionResult:
    """End state of an iterated tuning session."""

    decisions: tuple[MapeDecision, ...]
    reason: str  # in_band | saturated | resolution | stalled | max_iterations
    cp: int
    h_best: Fraction
    mu_best: Fraction
    saturated: bool
    refinement_count: int
    map_size: int


def run_session(controller: MapeController, max_iterations: int = 32) -> SessionResult:
    """Iterate the controller until it settles.

    Stops on an in-band incumbent, on saturation, when the refinement
    bracket drops below the mix resolution 1/(N+1) (further probes
    cannot move the selected mix by a whole process), or at the
    iteration cap.
    """
    initial_size = len(controller.pmap)
    resolution = Fraction(1, controller.n + 1)
    reason = "max_iterations"
    decision = None
    for _ in range(max_iterations):
        decision = controller.iterate()
        if decision.status == NO_CHANGE:
            reason = (
                "in_band"
                if controller.in_band(decision.chosen_mu, decision.cp)
                else "stalled"
            )
            break
        if decision.status == SATURATED:
            reason = "saturated"
            break
        br = controller.last_bracket
        if br is not None and abs(br[1] - br[0]) < resolution:
            reason = "resolution"
            break
    cp = decision.cp if decision else sense(controller.provider, 1)
    h_best = controller.pmap.min_key_at_least(cp)
    saturated = h_best is None
    if saturated:
        h_best = controller.pmap.keys()[-1]
    return SessionResult(
        decisions=tuple(controller.history),
        reason=reason,
        cp=cp,
        h_best=h_best,
        mu_best=controller.pmap[h_best],
        saturated=saturated,
        refinement_count=len(controller.pmap) - initial_size,
        map_size=len(controller.pmap),
    )
