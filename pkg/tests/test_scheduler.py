import math

import pytest

from dnsga import oracles
from dnsga.core import derive_seed
from dnsga.dynamic import ScheduleVariant, init_run, phase_length, step
from dnsga.nsga2 import OperatorConfig
from dnsga.problems import OneMinMax
from dnsga.scheduler import (InstanceSlot, SchedulerEvent, SchedulerState, balancing_violations,
                             concurrent_run, pick_instance, run_next_phase)

CFG = OperatorConfig()
GROW, SPREAD = ScheduleVariant.TAU_GROWING, ScheduleVariant.TAU_SPREAD


def test_pick_fresh_scheduler():
    assert pick_instance(SchedulerState(GROW, 16, seed=0)) == 2


def test_pick_after_first_phase():
    s = SchedulerState(GROW, 16, seed=0)
    s.slots[2] = InstanceSlot(2, r=4, phi=1)
    # j=2: 4 + max(4, 8) = 12; j=3: 0 + 8 = 8
    assert s.projected(2) == 12 and s.projected(3) == 8
    assert pick_instance(s) == 3


def test_pick_ties_go_to_smaller_index():
    s = SchedulerState(GROW, 16, seed=0)
    s.slots[2] = InstanceSlot(2, r=4, phi=1)  # projected 12
    s.slots[3] = InstanceSlot(3, r=4, phi=1)  # projected 4 + max(8, 8) = 12
    s.slots[4] = InstanceSlot(4, r=0, phi=0)  # projected 16
    assert s.projected(2) == s.projected(3) == 12
    assert pick_instance(s) == 2


def test_scheduler_state_validation():
    with pytest.raises(ValueError):
        SchedulerState(ScheduleVariant.CLASSIC, 16, seed=0)
    with pytest.raises(ValueError):
        SchedulerState(GROW, 4, seed=0)


def test_first_phase_creates_a2():
    s = SchedulerState(GROW, 16, seed=0)
    run_next_phase(s, OneMinMax(200), CFG)
    slot = s.slots[2]
    assert slot.state is not None and slot.r == 4 and slot.phi == 1 and s.total_evals == 4
    assert s.events[0] == SchedulerEvent(0, 2, 0, 4, 4, 4)


@pytest.mark.parametrize("variant", [GROW, SPREAD])
def test_slot_invariants_along_a_run(variant):
    # Large n so that no instance covers the front during the checked events.
    s = SchedulerState(variant, 36, seed=3)
    problem = OneMinMax(300)
    for _ in range(60):
        before = {i: (sl.phi, sl.r) for i, sl in s.slots.items()}
        run_next_phase(s, problem, CFG)
        assert s.winner is None
        ev = s.events[-1]
        slot = s.slots[ev.picked_i]
        assert slot.phi == before.get(ev.picked_i, (0, 0))[0] + 1
        assert slot.r == sum(phase_length(variant, 36, slot.i, p) for p in range(slot.phi))
        assert s.total_evals == sum(sl.r for sl in s.slots.values())
        for sl in s.slots.values():
            assert (sl.state is None) == (sl.phi == 0 and sl.r == 0)


@pytest.mark.parametrize("variant", [GROW, SPREAD])
def test_greedy_optimality_against_exhaustive_search(variant):
    s = SchedulerState(variant, 68, seed=1)
    problem = OneMinMax(400)
    for _ in range(150):
        picked = pick_instance(s)
        assert picked == oracles.pick_brute_force(s.projected, horizon=40)
        run_next_phase(s, problem, CFG)


def test_cannot_continue_after_winner():
    problem = OneMinMax(4)
    res = concurrent_run(GROW, 20, problem, CFG, seed=0, eval_budget=10 ** 6)
    assert res.winner is not None
    s = SchedulerState(GROW, 20, seed=0)
    s.winner = (2, 10)
    with pytest.raises(RuntimeError):
        run_next_phase(s, problem, CFG)


def test_mid_phase_stop_counts_only_evaluations_up_to_coverage():
    problem = OneMinMax(8)
    for k in range(20):
        seed = derive_seed(5, k)
        res = concurrent_run(GROW, 36, problem, CFG, seed, 10 ** 6)
        last = res.events[-1]
        win = next(sl for sl in res.slots if sl.i == res.winner)
        assert not last.completed and last.picked_i == res.winner
        assert all(ev.completed for ev in res.events[:-1])
        # The winner's own bookkeeping: initial draws plus r equals its coverage index.
        assert win.state.covered_at == 4 + win.r or (win.state.covered_at <= 4 and last.phase_evals == 0)
        assert win.r <= last.total_after
        assert last.phase_evals <= phase_length(GROW, 36, win.i, last.phi_before)
        starts = sum(1 for sl in res.slots if sl.state is not None)
        assert res.result.evals_to_cover == last.total_after + 4 * starts


def test_n8_all_seeds_win():
    problem = OneMinMax(8)
    for k in range(50):
        res = concurrent_run(GROW, 36, problem, CFG, derive_seed(8, k), 10 ** 6)
        assert res.result.covered and res.result.evals_to_cover <= 10 ** 6
        assert not balancing_violations(res.events)


def test_budget_exhaustion():
    res = concurrent_run(GROW, 260, OneMinMax(64), CFG, seed=0, eval_budget=500)
    assert res.winner is None and res.result.budget_exhausted and not res.result.covered
    assert res.result.evals_to_cover is None
    assert sum(sl.r for sl in res.slots) == res.events[-1].total_after >= 500
    assert all(sl.r > 0 for sl in res.slots)


def test_determinism():
    problem = OneMinMax(10)
    a = concurrent_run(SPREAD, 44, problem, CFG, seed=77, eval_budget=10 ** 6)
    b = concurrent_run(SPREAD, 44, problem, CFG, seed=77, eval_budget=10 ** 6)
    assert a.events == b.events and a.winner == b.winner
    assert a.result.evals_to_cover == b.result.evals_to_cover


def test_instance_seeds_independent_of_schedule():
    # Instance i always starts from the same population, whatever else ran before.
    problem = OneMinMax(300)
    s = SchedulerState(GROW, 36, seed=4)
    while 5 not in s.slots:
        run_next_phase(s, problem, CFG)
    fresh = init_run(GROW, 36, 32, problem, derive_seed(4, 5))
    while fresh.phase == 0:
        step(fresh, problem, CFG)
    assert (s.slots[5].state.population.genomes == fresh.population.genomes).all()


def test_balancing_violation_detector():
    ok = [SchedulerEvent(0, 2, 0, 4, 4, 4), SchedulerEvent(1, 3, 0, 8, 8, 12)]
    assert balancing_violations(ok) == []
    # Instance 2 finished a phase with r=4 (bound 2*4*log2(8) = 24); total jumps to 40.
    bad = ok + [SchedulerEvent(2, 5, 0, 28, 28, 40)]
    found = balancing_violations(bad)
    assert (2, 2, 4, 24.0) in found
    # Incomplete phase 0 events are not checkpoints.
    assert balancing_violations([SchedulerEvent(0, 2, 0, 100, 1, 100, completed=False)]) == []
    assert math.isclose(found[0][3], 2 * 4 * math.log2(8))
