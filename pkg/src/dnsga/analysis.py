"""Empty intervals, maximum empty interval (MEI) and coverage statistics on OneMinMax.

Interval ``i`` (for ``i`` in ``1..n``) brackets the half-point ``i - 0.5`` in
first-objective space by the nearest population values on either side. The
half-point comparisons are done on integers: ``f1 <= i - 1`` and ``f1 >= i``.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np


def _f1_values(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim == 2:
        arr = arr[:, 0]
    return arr.astype(np.int64, copy=False)


def has_extremes(values, n: int) -> bool:
    f1 = _f1_values(values)
    return bool(f1.size) and bool((f1 == 0).any()) and bool((f1 == n).any())


def empty_intervals(values, n: int) -> list[tuple[int, int]]:
    """The ``n`` empty intervals ``[a_i .. b_i]`` of a population.

    Args:
        values: first-objective values, or an ``(m, 2)`` array of objective pairs.
        n: problem size.

    Raises:
        ValueError: if the values 0 and ``n`` are not both present.
    """
    f1 = _f1_values(values)
    if not has_extremes(f1, n):
        raise ValueError("empty intervals need both extreme values 0 and n in the population")
    distinct = np.unique(f1)
    i = np.arange(1, n + 1)
    hi = np.searchsorted(distinct, i, side="left")
    return list(zip(distinct[hi - 1].tolist(), distinct[hi].tolist()))


def mei(values, n: int) -> int:
    """Maximum empty-interval length ``max_i (b_i - a_i)``; 1 iff the front is covered."""
    f1 = _f1_values(values)
    if not has_extremes(f1, n):
        raise ValueError("MEI needs both extreme values 0 and n in the population")
    distinct = np.unique(f1)
    return int(np.diff(distinct).max()) if distinct.size > 1 else 0


def interval_lengths(values, n: int) -> np.ndarray:
    """Lengths ``b_i - a_i`` for ``i = 1..n`` as an array."""
    f1 = _f1_values(values)
    if not has_extremes(f1, n):
        raise ValueError("empty intervals need both extreme values 0 and n in the population")
    distinct = np.unique(f1)
    hi = np.searchsorted(distinct, np.arange(1, n + 1), side="left")
    return distinct[hi] - distinct[hi - 1]


def coverage_fraction(values: Iterable, n: int) -> float:
    """Share of the ``n + 1`` OneMinMax optima present among ``values``."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if arr.size == 0:
        return 0.0
    f1 = _f1_values(arr)
    return np.unique(f1[(f1 >= 0) & (f1 <= n)]).size / (n + 1)
