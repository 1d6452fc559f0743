"""Invariant suites shared by the ``verify`` command and the acceptance tests.

Each suite returns a :class:`CheckResult`; sizes are parameters so the command
line can run a quick version and the test suite the full one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .analysis import empty_intervals, has_extremes, interval_lengths, mei
from .core import RngStream, derive_seed
from .dynamic import ScheduleVariant, init_run, phase_length, step
from .nsga2 import OperatorConfig, non_dominated_sort
from .problems import OneMinMax
from .scheduler import balancing_violations, concurrent_run


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_mei_oracle(ns=(2, 4, 8, 16), populations: int = 1000, seed: int = 1) -> CheckResult:
    rng = RngStream(seed)
    mismatches = 0
    for n in ns:
        for _ in range(populations):
            size = int(rng.integers(0, 3 * n + 1))
            f1 = np.concatenate(([0, n], rng.integers(0, n + 1, size=size)))
            rng.generator.shuffle(f1)
            if (empty_intervals(f1, n) != oracles.intervals_brute_force(f1, n)
                    or mei(f1, n) != oracles.mei_brute_force(f1, n)):
                mismatches += 1
    total = len(ns) * populations
    return CheckResult("mei-oracle", mismatches == 0, f"{mismatches} mismatches in {total} populations")


def check_nds_oracle(populations: int = 500, max_size: int = 64, max_n: int = 8,
                     seed: int = 2) -> CheckResult:
    rng = RngStream(seed)
    mismatches = 0
    for _ in range(populations):
        size = int(rng.integers(1, max_size + 1))
        n = int(rng.integers(1, max_n + 1))
        objs = rng.integers(0, n + 1, size=(size, 2))
        if non_dominated_sort(objs) != oracles.fronts_brute_force(objs.tolist()):
            mismatches += 1
    return CheckResult("nds-oracle", mismatches == 0, f"{mismatches} mismatches in {populations} populations")


def invariant_tau(n: int) -> int:
    """Phase length used by the invariant suite; short so that runs stay cheap."""
    return 8 * n


def check_lemma_invariants(ns=(16, 32), seeds: int = 100, extra_iterations: int = 20,
                           master_seed: int = 3) -> CheckResult:
    """Extreme survival and interval non-growth after both extremes are present.

    Runs every schedule with ``mu = 4(n+1)`` until the front is covered, then for
    ``extra_iterations`` more iterations, checking each iteration whose parent
    population holds both extremes.
    """
    cfg = OperatorConfig()
    lost = grew = checked = 0
    for n in ns:
        problem = OneMinMax(n)
        mu = 4 * (n + 1)
        for v, variant in enumerate(ScheduleVariant):
            for k in range(seeds):
                seed = derive_seed(master_seed, (n * 8 + v) * 100_000 + k)
                state = init_run(variant, mu, invariant_tau(n), problem, seed)
                remaining = extra_iterations
                while remaining > 0:
                    parents = state.population
                    step(state, problem, cfg)
                    if state.covered_at is not None:
                        remaining -= 1
                    if not has_extremes(parents.objectives, n):
                        continue
                    checked += 1
                    after = state.population.objectives
                    if not has_extremes(after, n):
                        lost += 1
                        continue
                    bound = np.maximum(interval_lengths(parents.objectives, n),
                                       2 * n / (len(parents) - 3))
                    if (interval_lengths(after, n) > bound).any():
                        grew += 1
    ok = lost == 0 and grew == 0 and checked > 0
    return CheckResult("lemma-invariants", ok,
                       f"{checked} iterations checked, {lost} lost extremes, {grew} grown intervals")


def simulate_phase_lengths(variant: ScheduleVariant, mu: int, i: int, phases: int,
                           n: int = 8, seed: int = 0) -> list[int]:
    """Offspring evaluations per phase of an actual run with ``tau = 2**i``."""
    problem = OneMinMax(n)
    state = init_run(variant, mu, 2 ** i, problem, seed)
    cfg = OperatorConfig()
    out = []
    mark = state.evals.total
    while len(out) < phases:
        phase = state.phase
        step(state, problem, cfg)
        if state.phase != phase:
            out.append(state.evals.total - mark)
            mark = state.evals.total
    return out


def check_phase_lengths(i_values=range(2, 11), mus=(16, 36, 68), phases: int = 20) -> CheckResult:
    mismatches = []
    for variant in (ScheduleVariant.TAU_GROWING, ScheduleVariant.TAU_SPREAD):
        for mu in mus:
            for i in i_values:
                got = simulate_phase_lengths(variant, mu, i, phases)
                want = [phase_length(variant, mu, i, phi) for phi in range(phases)]
                if got != want:
                    mismatches.append((variant.value, mu, i))
    return CheckResult("phase-lengths", not mismatches,
                       f"{len(mismatches)} mismatching (variant, mu, i) cells {mismatches[:3]}")


def check_balancing(ns=(8, 16), runs: int = 50, master_seed: int = 4) -> CheckResult:
    cfg = OperatorConfig()
    violations = events = 0
    for n in ns:
        problem = OneMinMax(n)
        for k in range(runs):
            variant = ScheduleVariant.TAU_GROWING if k % 2 == 0 else ScheduleVariant.TAU_SPREAD
            res = concurrent_run(variant, 4 * (n + 1), problem, cfg,
                                 derive_seed(master_seed, n * 1000 + k), 10 ** 7)
            events += len(res.events)
            violations += len(balancing_violations(res.events))
    return CheckResult("balancing-bound", violations == 0,
                       f"{violations} violations over {events} scheduler events")


def run_all(quick: bool = True) -> list[CheckResult]:
    if quick:
        return [
            check_mei_oracle(populations=100),
            check_nds_oracle(populations=100),
            check_lemma_invariants(ns=(8, 16), seeds=5),
            check_phase_lengths(i_values=range(2, 7), mus=(16, 36)),
            check_balancing(runs=6),
        ]
    return [
        check_mei_oracle(),
        check_nds_oracle(),
        check_lemma_invariants(),
        check_phase_lengths(),
        check_balancing(),
    ]

