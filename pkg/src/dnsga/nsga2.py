"""NSGA-II building blocks: variation, non-dominated sorting, crowding distance
and survival selection for bi-objective maximization.

Populations are stored column-wise (genome matrix, objective matrix, creation
indices) so that mutation and evaluation are vectorized; the sequential parts
(current crowding distance) work on plain Python lists.
"""

from __future__ import annotations

import enum
import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import EvaluationCounter, RngStream
from .problems import BiObjectiveProblem

INF = math.inf


class Mutation(enum.Enum):
    STANDARD_BIT = "standard"
    ONE_BIT = "one-bit"


class ParentSelection(enum.Enum):
    FAIR = "fair"
    UNIFORM = "uniform"


class Crowding(enum.Enum):
    CLASSIC = "classic"
    CURRENT = "current"


@dataclass(frozen=True)
class OperatorConfig:
    mutation: Mutation = Mutation.STANDARD_BIT
    parent_selection: ParentSelection = ParentSelection.FAIR
    crossover_rate: float = 0.0
    crowding: Crowding = Crowding.CURRENT

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate < 1.0:
            raise ValueError(f"crossover_rate must lie in [0, 1), got {self.crossover_rate}")


class EvaluatedIndividual(NamedTuple):
    genome: np.ndarray
    objectives: tuple
    creation_index: int


@dataclass
class Population:
    """Ordered multiset of evaluated individuals.

    Attributes:
        genomes: ``(m, n)`` uint8 matrix, one bitstring per row.
        objectives: ``(m, 2)`` objective values, cached at creation.
        created: ``(m,)`` evaluation-counter value at which each row was created.
    """

    genomes: np.ndarray
    objectives: np.ndarray
    created: np.ndarray

    def __len__(self) -> int:
        return self.genomes.shape[0]

    def __getitem__(self, i: int) -> EvaluatedIndividual:
        return EvaluatedIndividual(
            self.genomes[i], tuple(self.objectives[i].tolist()), int(self.created[i])
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def take(self, indices) -> Population:
        indices = np.asarray(indices, dtype=np.int64)
        return Population(self.genomes[indices], self.objectives[indices], self.created[indices])

    def concat(self, other: Population) -> Population:
        return Population(
            np.concatenate((self.genomes, other.genomes)),
            np.concatenate((self.objectives, other.objectives)),
            np.concatenate((self.created, other.created)),
        )

    @classmethod
    def evaluate(cls, genomes: np.ndarray, problem: BiObjectiveProblem,
                 counter: EvaluationCounter) -> Population:
        """Evaluate each row of ``genomes`` once, stamping creation indices."""
        genomes = np.ascontiguousarray(genomes, dtype=np.uint8)
        m = genomes.shape[0]
        objectives = problem.evaluate_batch(genomes)
        created = np.arange(counter.total + 1, counter.total + m + 1, dtype=np.int64)
        counter.increment(m)
        return cls(genomes, objectives, created)


# --------------------------------------------------------------------------
# variation


def mutate_batch(genomes: np.ndarray, cfg: OperatorConfig, rng: RngStream) -> np.ndarray:
    """Mutated copies of each row of ``genomes``."""
    m, n = genomes.shape
    if n < 1:
        raise ValueError("cannot mutate empty bitstrings")
    out = genomes.copy()
    if cfg.mutation is Mutation.STANDARD_BIT:
        out ^= (rng.random((m, n)) < 1.0 / n).astype(np.uint8)
    else:
        out[np.arange(m), rng.integers(0, n, size=m)] ^= 1
    return out


def mutate(x, cfg: OperatorConfig, rng: RngStream) -> np.ndarray:
    """Mutated copy of a single bitstring (standard bit or one-bit mutation)."""
    x = np.asarray(x, dtype=np.uint8)
    return mutate_batch(x[None, :], cfg, rng)[0]


def generate_offspring(pop: Population, problem: BiObjectiveProblem, cfg: OperatorConfig,
                       rng: RngStream, counter: EvaluationCounter) -> Population:
    """Create and evaluate ``len(pop)`` offspring.

    With fair selection offspring ``i`` descends from parent ``i``; with uniform
    selection each parent is drawn with replacement. When crossover fires, the
    second parent is drawn uniformly and bits are mixed uniformly before mutation.
    """
    m = len(pop)
    if m == 0:
        raise ValueError("cannot generate offspring from an empty population")
    if cfg.parent_selection is ParentSelection.FAIR:
        children = pop.genomes.copy()
    else:
        children = pop.genomes[rng.integers(0, m, size=m)]
    if cfg.crossover_rate > 0.0:
        crossed = np.flatnonzero(rng.random(m) < cfg.crossover_rate)
        if crossed.size:
            mates = pop.genomes[rng.integers(0, m, size=crossed.size)]
            pick = rng.random(mates.shape) < 0.5
            children[crossed] = np.where(pick, children[crossed], mates)
    children = mutate_batch(children, cfg, rng)
    return Population.evaluate(children, problem, counter)


# --------------------------------------------------------------------------
# non-dominated sorting


def non_dominated_sort(objectives) -> list[list[int]]:
    """Partition indices of ``objectives`` into non-dominated fronts (maximization).

    Bi-objective sweep: values are visited by decreasing first objective and
    dropped into the first front none of whose members dominates them. Within
    each front, indices keep their input order. Duplicates share a front.
    """
    objs = np.asarray(objectives)
    m = len(objs)
    if m == 0:
        return []
    f1 = objs[:, 0].tolist()
    f2 = objs[:, 1].tolist()
    order = sorted(range(m), key=lambda i: (-f1[i], -f2[i]))
    rank = [0] * m
    # neg_best[k] = -(max second objective in front k); increasing in k
    neg_best: list = []
    last = None
    last_rank = 0
    for i in order:
        point = (f1[i], f2[i])
        if point == last:
            rank[i] = last_rank
            continue
        k = bisect_right(neg_best, -f2[i])
        if k == len(neg_best):
            neg_best.append(-f2[i])
        else:
            neg_best[k] = -f2[i]
        rank[i] = last_rank = k
        last = point
    fronts: list[list[int]] = [[] for _ in neg_best]
    for i, k in enumerate(rank):
        fronts[k].append(i)
    return fronts


# --------------------------------------------------------------------------
# crowding distance


def _sort_orders(values: list[list], tiebreak: list) -> list[list[int]]:
    m = len(tiebreak)
    return [sorted(range(m), key=lambda i, v=v: (v[i], tiebreak[i])) for v in values]


def _weights(values, first, last) -> tuple[list, object]:
    """Per-objective multipliers turning neighbour gaps into scaled distances.

    Scaled key = sum_j w_j * gap_j, equal to the crowding distance times the
    positive constant returned as ``scale``. Integer objectives give integer keys,
    so ties are detected exactly.
    """
    d = [values[j][last[j]] - values[j][first[j]] for j in (0, 1)]
    w = [0, 0]
    scale = 1
    for j in (0, 1):
        if d[j] > 0:
            other = d[1 - j]
            w[j] = other if other > 0 else 1
            scale = scale * d[j]
    return w, scale


def _linked(order: list[int], m: int) -> tuple[list[int], list[int]]:
    prev = [-1] * m
    nxt = [-1] * m
    for a, b in zip(order, order[1:]):
        nxt[a] = b
        prev[b] = a
    return prev, nxt


def _prepare(objectives, tiebreak):
    objs = np.asarray(objectives)
    m = len(objs)
    values = [objs[:, 0].tolist(), objs[:, 1].tolist()]
    if tiebreak is None:
        tiebreak = list(range(m))
    else:
        tiebreak = np.asarray(tiebreak).tolist()
    return m, values, tiebreak


def _scaled_keys(values, orders) -> tuple[list, object]:
    m = len(orders[0])
    keys = [0] * m
    first = [orders[0][0], orders[1][0]]
    last = [orders[0][-1], orders[1][-1]]
    w, scale = _weights(values, first, last)
    for j in (0, 1):
        v = values[j]
        o = orders[j]
        keys[o[0]] = INF
        keys[o[-1]] = INF
        if w[j]:
            for a, x, b in zip(o, o[1:], o[2:]):
                keys[x] += w[j] * (v[b] - v[a])
    return keys, scale


def crowding_distance(objectives, tiebreak=None) -> list[float]:
    """Classic crowding distance of every member of a front.

    Per objective, members are sorted ascending (ties by ``tiebreak``, default
    input order); the first and last positions get ``inf`` and interior members
    the neighbour gap divided by the objective's range. An objective whose range
    is zero contributes nothing.

    Returns:
        Distances aligned with the input order.
    """
    m, values, tiebreak = _prepare(objectives, tiebreak)
    if m == 0:
        return []
    keys, scale = _scaled_keys(values, _sort_orders(values, tiebreak))
    return [k if k == INF else k / scale for k in keys]


def reduce_by_classic_cd(objectives, k: int, rng: RngStream, tiebreak=None) -> list[int]:
    """Indices of the ``k`` members with largest crowding distance, ties at random."""
    m, values, tiebreak = _prepare(objectives, tiebreak)
    if not 0 <= k <= m:
        raise ValueError(f"cannot keep {k} of {m} individuals")
    if k == m:
        return list(range(m))
    keys, _ = _scaled_keys(values, _sort_orders(values, tiebreak))
    noise = rng.random(m).tolist()
    ranked = sorted(range(m), key=lambda i: (-keys[i], noise[i]))
    return sorted(ranked[:k])


class _MinBuckets:
    """Multiset of (key, item) supporting uniform sampling among minimal keys."""

    def __init__(self, keys: list):
        self.key = list(keys)
        self.buckets: dict = {}
        self.pos = [0] * len(keys)
        self.heap: list = []
        self.queued: set = set()
        for item, key in enumerate(keys):
            self._add(item, key)

    def _add(self, item, key):
        bucket = self.buckets.get(key)
        if bucket is None:
            bucket = self.buckets[key] = []
        if key not in self.queued:
            self.queued.add(key)
            heapq.heappush(self.heap, key)
        self.pos[item] = len(bucket)
        bucket.append(item)

    def discard(self, item):
        bucket = self.buckets[self.key[item]]
        at = self.pos[item]
        tail = bucket.pop()
        if tail != item:
            bucket[at] = tail
            self.pos[tail] = at

    def update(self, item, key):
        if key != self.key[item]:
            self.discard(item)
            self.key[item] = key
            self._add(item, key)

    def sample_min(self, u: float):
        """Remove and return a uniformly chosen item of minimal key (``u`` in [0, 1))."""
        heap = self.heap
        while True:
            key = heap[0]
            bucket = self.buckets[key]
            if bucket:
                break
            heapq.heappop(heap)
            self.queued.discard(key)
            del self.buckets[key]
        item = bucket[int(u * len(bucket))]
        self.discard(item)
        return item, key


def reduce_by_current_cd(objectives, k: int, rng: RngStream, tiebreak=None) -> list[int]:
    """Indices surviving iterated removal of a minimum-crowding-distance member.

    Each removal recomputes the distances of the remaining members; since only
    the sort-order neighbours of a removed interior member change, updates are
    local. Ties among minimal distances are broken uniformly at random.
    """
    m, values, tiebreak = _prepare(objectives, tiebreak)
    if not 0 <= k <= m:
        raise ValueError(f"cannot keep {k} of {m} individuals")
    if k == m:
        return list(range(m))
    orders = _sort_orders(values, tiebreak)
    links = [_linked(o, m) for o in orders]
    first = [orders[0][0], orders[1][0]]
    last = [orders[0][-1], orders[1][-1]]
    alive = [True] * m
    keys, _ = _scaled_keys(values, orders)
    w, _ = _weights(values, first, last)
    buckets = _MinBuckets(keys)
    noise = rng.random(m - k).tolist()

    def key_of(x):
        total = 0
        for j in (0, 1):
            prev, nxt = links[j]
            a, b = prev[x], nxt[x]
            if a < 0 or b < 0:
                return INF
            if w[j]:
                total += w[j] * (values[j][b] - values[j][a])
        return total

    for u in noise:
        x, key = buckets.sample_min(u)
        alive[x] = False
        touched = []
        for j in (0, 1):
            prev, nxt = links[j]
            a, b = prev[x], nxt[x]
            if a >= 0:
                nxt[a] = b
                touched.append(a)
            else:
                first[j] = b
            if b >= 0:
                prev[b] = a
                touched.append(b)
            else:
                last[j] = a
        if key == INF:
            # A boundary member left: ranges may change, so rescore everyone.
            w, _ = _weights(values, first, last)
            for y in range(m):
                if alive[y]:
                    buckets.update(y, key_of(y))
        else:
            for y in touched:
                buckets.update(y, key_of(y))
    return [i for i in range(m) if alive[i]]


# --------------------------------------------------------------------------
# survival selection


def survival_selection(pop: Population, size: int, cfg: OperatorConfig,
                       rng: RngStream) -> Population:
    """Select ``size`` members: whole fronts first, the critical front by crowding."""
    m = len(pop)
    if size < 1 or size > m:
        raise ValueError(f"cannot select {size} of {m} individuals")
    if size == m:
        return pop
    fronts = non_dominated_sort(pop.objectives)
    kept: list[int] = []
    for front in fronts:
        room = size - len(kept)
        if len(front) <= room:
            kept.extend(front)
            if len(front) == room:
                break
            continue
        reduce = reduce_by_current_cd if cfg.crowding is Crowding.CURRENT else reduce_by_classic_cd
        chosen = reduce(pop.objectives[front], room, rng, tiebreak=pop.created[front])
        kept.extend(front[i] for i in chosen)
        break
    kept.sort()
    return pop.take(kept)
