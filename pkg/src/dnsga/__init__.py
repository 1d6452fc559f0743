"""Dynamic-population NSGA-II on OneMinMax, with the classic baseline and a
concurrent phase-length scheduler."""

from .analysis import coverage_fraction, empty_intervals, mei
from .core import Dominance, EvaluationCounter, RngStream, compare, derive_seed, ones_count
from .dynamic import (DnsgaState, RunResult, ScheduleVariant, init_run, phase_length, run,
                      step)
from .nsga2 import (Crowding, Mutation, OperatorConfig, ParentSelection, Population,
                    crowding_distance, generate_offspring, mutate, non_dominated_sort,
                    reduce_by_classic_cd, reduce_by_current_cd, survival_selection)
from .problems import BiObjectiveProblem, OneMinMax, is_front_covered, omm_evaluate
from .scheduler import SchedulerState, concurrent_run, pick_instance, run_next_phase

__version__ = "0.1.0"
