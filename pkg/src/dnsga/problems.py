"""Bi-objective pseudo-Boolean problems and Pareto-front coverage checks."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable

import numpy as np

from .core import EvaluationCounter, ones_count


class BiObjectiveProblem(ABC):
    """A maximization problem ``{0,1}^n -> R^2`` with a finite, known Pareto front.

    Subclasses implement :meth:`evaluate_batch` and :meth:`front_positions`;
    the latter maps objective pairs to an index into the front (``-1`` for
    values that are not Pareto optima), which is what coverage tracking uses.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"problem size must be >= 1, got {n}")
        self.n = int(n)

    @property
    @abstractmethod
    def front(self) -> list[tuple]:
        """All Pareto optima, in front-index order."""

    @abstractmethod
    def evaluate_batch(self, genomes: np.ndarray) -> np.ndarray:
        """Objective pairs for each row of ``genomes`` as an ``(m, 2)`` array."""

    @abstractmethod
    def front_positions(self, objectives: np.ndarray) -> np.ndarray:
        """Front index of each objective pair, ``-1`` if not a Pareto optimum."""

    @property
    def front_size(self) -> int:
        return len(self.front)

    def evaluate(self, x, counter: EvaluationCounter | None = None) -> tuple:
        genome = np.asarray(x, dtype=np.uint8)
        if genome.ndim != 1 or genome.shape[0] != self.n:
            raise ValueError(f"expected a bitstring of length {self.n}, got shape {genome.shape}")
        if counter is not None:
            counter.increment()
        f1, f2 = self.evaluate_batch(genome[None, :])[0].tolist()
        return (f1, f2)


class OneMinMax(BiObjectiveProblem):
    """``x -> (n - |x|_1, |x|_1)``: zeros versus ones. Every bitstring is Pareto-optimal."""

    @property
    def front(self) -> list[tuple[int, int]]:
        return [(i, self.n - i) for i in range(self.n + 1)]

    @property
    def front_size(self) -> int:
        return self.n + 1

    def evaluate_batch(self, genomes: np.ndarray) -> np.ndarray:
        genomes = np.asarray(genomes)
        if genomes.ndim != 2 or genomes.shape[1] != self.n:
            raise ValueError(f"expected bitstrings of length {self.n}, got shape {genomes.shape}")
        ones = np.count_nonzero(genomes, axis=1).astype(np.int64)
        return np.stack((self.n - ones, ones), axis=1)

    def front_positions(self, objectives: np.ndarray) -> np.ndarray:
        # Index by the first objective so that front index i is the pair (i, n - i).
        objectives = np.asarray(objectives)
        return objectives[:, 0].astype(np.int64)

    def __repr__(self) -> str:
        return f"OneMinMax(n={self.n})"


def omm_evaluate(x, n: int, counter: EvaluationCounter | None = None) -> tuple[int, int]:
    """Evaluate ``x`` on OneMinMax of size ``n``."""
    if len(x) != n:
        raise ValueError(f"expected a bitstring of length {n}, got {len(x)}")
    if counter is not None:
        counter.increment()
    ones = ones_count(x)
    return (n - ones, ones)


def is_front_covered(values: Iterable[tuple], n: int) -> bool:
    """True iff every OneMinMax optimum ``(i, n - i)`` appears among ``values``."""
    seen = np.zeros(n + 1, dtype=bool)
    for f1, f2 in values:
        if f1 + f2 != n or not 0 <= f1 <= n:
            raise ValueError(f"({f1}, {f2}) is not a OneMinMax value for n={n}")
        seen[int(f1)] = True
    return bool(seen.all())


def presence(problem: BiObjectiveProblem, objectives: np.ndarray) -> np.ndarray:
    """Boolean map over the front marking which optima occur in ``objectives``."""
    present = np.zeros(problem.front_size, dtype=bool)
    if len(objectives):
        pos = problem.front_positions(objectives)
        present[pos[pos >= 0]] = True
    return present


def first_covering_index(present: np.ndarray, positions: np.ndarray) -> int | None:
    """Index of the evaluation in ``positions`` that completes coverage.

    ``present`` marks optima already held before the batch; ``positions`` are the
    front indices of the new evaluations in creation order. Returns ``None`` if
    coverage is still incomplete after the whole batch, and ``-1`` if
    ``present`` was already complete.
    """
    missing = np.flatnonzero(~present)
    if missing.size == 0:
        return -1
    if missing.size > positions.size:
        return None
    valid = positions >= 0
    idx = np.flatnonzero(valid)
    values, first = np.unique(positions[valid], return_index=True)
    hit = np.searchsorted(values, missing)
    hit = np.minimum(hit, values.size - 1) if values.size else hit
    if values.size == 0 or not np.array_equal(values[hit], missing):
        return None
    return int(idx[first[hit]].max())
