"""Concurrent dynamic NSGA-II runs with power-of-two phase lengths.

Instance ``A_i`` runs with ``tau = 2**i`` (``i >= 2``). The scheduler repeatedly
runs one phase of the instance whose evaluation total after that phase would be
smallest, creating instances lazily, until some instance covers the front.
Everything runs cooperatively in one thread, so a run replays exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import derive_seed
from .dynamic import DnsgaState, RunResult, ScheduleVariant, init_run, phase_length, step
from .nsga2 import OperatorConfig
from .problems import BiObjectiveProblem

EVENT_HEADER = ("event_index", "picked_i", "phi_before", "phase_evals", "r_i_after", "total_after")


@dataclass
class InstanceSlot:
    i: int
    r: int = 0
    phi: int = 0
    state: DnsgaState | None = None

    @property
    def tau(self) -> int:
        return 2 ** self.i


@dataclass(frozen=True)
class SchedulerEvent:
    event_index: int
    picked_i: int
    phi_before: int
    phase_evals: int
    r_i_after: int
    total_after: int
    # False for the event that stopped mid-phase on coverage
    completed: bool = True

    def as_row(self) -> tuple:
        return (self.event_index, self.picked_i, self.phi_before, self.phase_evals,
                self.r_i_after, self.total_after)


@dataclass
class SchedulerState:
    variant: ScheduleVariant
    mu: int
    seed: int
    slots: dict[int, InstanceSlot] = field(default_factory=dict)
    total_evals: int = 0
    winner: tuple[int, int] | None = None
    events: list[SchedulerEvent] = field(default_factory=list)

    def __post_init__(self):
        if not self.variant.dynamic:
            raise ValueError("the scheduler runs dynamic instances only")
        if self.mu <= 4:
            raise ValueError(f"mu must exceed 4, got {self.mu}")

    @property
    def initial_evals(self) -> int:
        """Evaluations spent on initial populations of started instances."""
        return 4 * sum(slot.state is not None for slot in self.slots.values())

    def slot(self, i: int) -> InstanceSlot:
        found = self.slots.get(i)
        return found if found is not None else InstanceSlot(i)

    def projected(self, i: int) -> int:
        """Evaluations ``A_i`` will have received after its next phase."""
        s = self.slot(i)
        return s.r + phase_length(self.variant, self.mu, i, s.phi)


@dataclass
class ConcurrentResult:
    result: RunResult
    winner: int | None
    slots: list[InstanceSlot]
    events: list[SchedulerEvent]


def pick_instance(s: SchedulerState) -> int:
    """Smallest ``j >= 2`` minimizing ``r_j + phase_length(j, phi_j)``.

    Every phase of ``A_j`` has at least ``2**j`` evaluations, so the upward search
    stops as soon as ``2**j`` exceeds the best projected total found so far.
    """
    best_i, best = 2, s.projected(2)
    j = 3
    while 2 ** j <= best:
        value = s.projected(j)
        if value < best:
            best_i, best = j, value
        j += 1
    return best_i


def run_next_phase(s: SchedulerState, problem: BiObjectiveProblem,
                   cfg: OperatorConfig) -> SchedulerState:
    """Advance the picked instance by one phase, or up to coverage within it."""
    if s.winner is not None:
        raise RuntimeError("the scheduler already has a winner")
    i = pick_instance(s)
    slot = s.slots.get(i)
    if slot is None:
        slot = s.slots[i] = InstanceSlot(i)
    if slot.state is None:
        slot.state = init_run(s.variant, s.mu, slot.tau, problem, derive_seed(s.seed, i))
    state = slot.state
    # Phase bookkeeping counts offspring only; initial members are tallied separately.
    start = state.evals.total
    phi_before = slot.phi
    while state.covered_at is None and state.phase == phi_before:
        step(state, problem, cfg)
    if state.covered_at is not None:
        spent = max(state.covered_at - start, 0)
    else:
        spent = state.evals.total - start
        slot.phi += 1
    slot.r += spent
    s.total_evals += spent
    if state.covered_at is not None:
        s.winner = (i, s.total_evals)
    s.events.append(SchedulerEvent(len(s.events), i, phi_before, spent, slot.r, s.total_evals,
                                   completed=state.covered_at is None))
    return s


def concurrent_run(variant: ScheduleVariant, mu: int, problem: BiObjectiveProblem,
                   cfg: OperatorConfig, seed: int, eval_budget: int) -> ConcurrentResult:
    """Schedule phases until an instance covers the front or the budget is spent.

    The budget applies to scheduled phase evaluations. The reported runtime also
    includes the four initial evaluations of every started instance.
    """
    s = SchedulerState(variant, mu, seed)
    while s.winner is None and s.total_evals < eval_budget:
        run_next_phase(s, problem, cfg)
    won = s.winner is not None and s.winner[1] <= eval_budget
    winner = s.winner[0] if won else None
    result = RunResult(
        evals_to_cover=s.total_evals + s.initial_evals if won else None,
        iterations_to_cover=s.slots[winner].state.covered_iteration if won else None,
        budget_exhausted=not won,
        evals_total=s.total_evals + s.initial_evals,
    )
    slots = [s.slots[i] for i in sorted(s.slots)]
    return ConcurrentResult(result, winner, slots, s.events)


def balancing_violations(events: list[SchedulerEvent]) -> list[tuple[int, int, int, float]]:
    """Checkpoints where the total exceeds ``2 r log2(2 r)``.

    After every event, each instance that has finished phase 0 and received ``r``
    evaluations so far is a checkpoint. Returns
    ``(event_index, instance, r, bound)`` for every violated checkpoint.
    """
    received: dict[int, int] = {}
    phases: dict[int, int] = {}
    bad = []
    for ev in events:
        received[ev.picked_i] = ev.r_i_after
        phases[ev.picked_i] = ev.phi_before + (1 if ev.completed else 0)
        for i, r in received.items():
            if phases.get(i, 0) < 1 or r < 1:
                continue
            bound = 2 * r * math.log2(2 * r)
            if ev.total_after > bound:
                bad.append((ev.event_index, i, r, bound))
    return bad
