"""The dynamic-population NSGA-II run loop.

One loop serves all three schedules. The classic NSGA-II starts with ``mu``
individuals and a doubling counter of ``-inf``, so it never doubles; the two
dynamic schedules start with four individuals and double the population after
every ``tau`` evaluations (the spread schedule stretches phase 0 to
``ceil(log2(mu/4)) * tau`` evaluations) until the size reaches ``mu``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .analysis import coverage_fraction, has_extremes, mei
from .core import EvaluationCounter, RngStream
from .nsga2 import OperatorConfig, Population, generate_offspring, survival_selection
from .problems import BiObjectiveProblem, OneMinMax, first_covering_index, presence

NEG_INF = -math.inf


class ScheduleVariant(enum.Enum):
    CLASSIC = "classic"
    TAU_GROWING = "grow"
    TAU_SPREAD = "spread"

    @property
    def dynamic(self) -> bool:
        return self is not ScheduleVariant.CLASSIC


def doublings(mu: int) -> int:
    """Number of doublings from size 4 until the size is at least ``mu``."""
    return max(0, math.ceil(math.log2(mu / 4)))


@dataclass
class TraceRow:
    t: int
    phase: int
    pop_size: int
    evals_total: int
    mei: int | None
    coverage_fraction: float


@dataclass
class DnsgaState:
    variant: ScheduleVariant
    mu: int
    tau: int
    population: Population
    evals: EvaluationCounter
    rng: RngStream
    w: float
    t: int = 0
    phase: int = 0
    covered_at: int | None = None
    covered_iteration: int | None = None
    # Literal pseudocode reading: a blocked doubling attempt neither resets w
    # nor ends the phase.
    literal_w: bool = False
    trace: list[TraceRow] | None = None

    @property
    def pop_size(self) -> int:
        return len(self.population)


@dataclass
class RunResult:
    evals_to_cover: int | None
    iterations_to_cover: int | None
    budget_exhausted: bool
    evals_total: int
    trace: list[TraceRow] | None = field(default=None, repr=False)

    @property
    def covered(self) -> bool:
        return self.evals_to_cover is not None


# Called after every iteration with (state after the step, parent population,
# next population, whether the iteration doubled).
StepObserver = Callable[[DnsgaState, Population, Population, bool], None]


def _trace_row(state: DnsgaState, problem: BiObjectiveProblem) -> TraceRow:
    objs = state.population.objectives
    m = None
    frac = 0.0
    if isinstance(problem, OneMinMax):
        if has_extremes(objs, problem.n):
            m = mei(objs, problem.n)
        frac = coverage_fraction(objs, problem.n)
    return TraceRow(state.t, state.phase, state.pop_size, state.evals.total, m, frac)


def init_run(variant: ScheduleVariant, mu: int, tau: int, problem: BiObjectiveProblem,
             seed: int, *, literal_w: bool = False, trace: bool = False) -> DnsgaState:
    """Draw and evaluate the initial population and set the doubling counter."""
    if mu < 4:
        raise ValueError(f"mu must be >= 4, got {mu}")
    if variant.dynamic and tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    rng = RngStream(seed)
    counter = EvaluationCounter()
    size = mu if variant is ScheduleVariant.CLASSIC else 4
    population = Population.evaluate(rng.bits((size, problem.n)), problem, counter)
    if variant is ScheduleVariant.CLASSIC:
        w = NEG_INF
    elif variant is ScheduleVariant.TAU_GROWING:
        w = 0
    else:
        w = -(doublings(mu) - 1) * tau
    state = DnsgaState(variant, mu, tau, population, counter, rng, w, literal_w=literal_w)
    hit = first_covering_index(np.zeros(problem.front_size, dtype=bool),
                               problem.front_positions(population.objectives))
    if hit is not None:
        state.covered_at = hit + 1
        state.covered_iteration = 0
    if trace:
        state.trace = [_trace_row(state, problem)]
    return state


def step(state: DnsgaState, problem: BiObjectiveProblem, cfg: OperatorConfig,
         observer: StepObserver | None = None) -> DnsgaState:
    """Run one iteration of the main loop in place and return ``state``."""
    parents = state.population
    size = len(parents)
    before = state.evals.total
    offspring = generate_offspring(parents, problem, cfg, state.rng, state.evals)
    if state.covered_at is None:
        hit = first_covering_index(presence(problem, parents.objectives),
                                   problem.front_positions(offspring.objectives))
        if hit is not None:
            state.covered_at = before + max(hit, 0) + 1
            state.covered_iteration = state.t + 1
    state.w = state.w + size
    doubled = False
    if state.w >= state.tau:
        if size < state.mu:
            doubled = True
            state.w = 0
            state.phase += 1
        elif not state.literal_w:
            state.w = 0
            state.phase += 1
    if doubled:
        state.population = parents.concat(offspring)
    else:
        state.population = survival_selection(parents.concat(offspring), size, cfg, state.rng)
    state.t += 1
    if state.trace is not None:
        state.trace.append(_trace_row(state, problem))
    if observer is not None:
        observer(state, parents, state.population, doubled)
    return state


def run(state: DnsgaState, problem: BiObjectiveProblem, cfg: OperatorConfig,
        eval_budget: int, observer: StepObserver | None = None) -> RunResult:
    """Iterate until the front is covered or ``eval_budget`` evaluations are spent.

    Coverage is evaluation-exact: ``evals_to_cover`` is the index of the
    evaluation after which parents plus offspring created so far first hold
    every Pareto optimum. A coverage event past the budget does not count.
    """
    if eval_budget < 1:
        raise ValueError("eval_budget must be >= 1")
    while state.covered_at is None and state.evals.total < eval_budget:
        step(state, problem, cfg, observer)
    covered = state.covered_at is not None and state.covered_at <= eval_budget
    return RunResult(
        evals_to_cover=state.covered_at if covered else None,
        iterations_to_cover=state.covered_iteration if covered else None,
        budget_exhausted=not covered,
        evals_total=state.evals.total,
        trace=state.trace,
    )


def phase_length(variant: ScheduleVariant, mu: int, i: int, phi: int) -> int:
    """Evaluations in phase ``phi`` of a dynamic run with ``tau = 2**i``."""
    if not variant.dynamic:
        raise ValueError("phase lengths are defined for the dynamic schedules only")
    d = doublings(mu)
    if variant is ScheduleVariant.TAU_SPREAD and phi == 0:
        return d * 2 ** i
    return max(2 ** i, 4 * 2 ** min(phi, d))
