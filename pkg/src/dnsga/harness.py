"""Experiment configuration, replicate sweeps, CSV output and summaries."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from .core import derive_seed
from .dynamic import ScheduleVariant, TraceRow, init_run, run
from .nsga2 import Crowding, Mutation, OperatorConfig, ParentSelection
from .problems import OneMinMax
from .scheduler import EVENT_HEADER, SchedulerEvent, concurrent_run

log = logging.getLogger(__name__)

RESULT_HEADER = ("algorithm", "n", "mu", "tau", "seed", "covered", "evals_to_cover",
                 "iterations", "wall_ms")
TRACE_HEADER = ("t", "phase", "pop_size", "evals_total", "mei", "coverage_fraction")

ALGORITHMS = {
    "classic": ScheduleVariant.CLASSIC,
    "grow": ScheduleVariant.TAU_GROWING,
    "spread": ScheduleVariant.TAU_SPREAD,
    "concurrent-grow": ScheduleVariant.TAU_GROWING,
    "concurrent-spread": ScheduleVariant.TAU_SPREAD,
}

E = 2.718281828459045


def _normalize(token: str) -> str:
    return "".join(ch for ch in token if ch not in " *·\t")


MU_RULES = {"4(n+1)": lambda n: 4 * (n + 1)}
TAU_RULES = {
    "8enln(n)": lambda n: 8 * E * n * math.log(n),
    "(256/5)en": lambda n: 256 / 5 * E * n,
    "520e(n+1)ln(n)": lambda n: 520 * E * (n + 1) * math.log(n),
}
DEFAULT_TAU = {"grow": "8en·ln(n)", "spread": "(256/5)·e·n"}


def resolve_rule(rule: int | str, n: int, table: dict, what: str) -> int:
    """Integer value of an explicit number or a symbolic rule at problem size ``n``."""
    if isinstance(rule, int):
        return rule
    token = str(rule).strip()
    if token.lstrip("-").isdigit():
        return int(token)
    fn = table.get(_normalize(token))
    if fn is None:
        known = ", ".join(sorted(table))
        raise ValueError(f"unknown {what} rule {token!r} (known: {known})")
    return math.ceil(fn(n))


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "grow"
    ns: tuple[int, ...] = (16,)
    mu: int | str = "4(n+1)"
    tau: int | str | None = None
    seed: int = 0
    replicates: int = 1
    eval_budget: int = 10_000_000
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    trace: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r} (known: {', '.join(ALGORITHMS)})")
        if self.replicates < 0:
            raise ValueError("replicates must be >= 0")
        if self.eval_budget < 1:
            raise ValueError("budget must be >= 1")
        if not self.ns or any(n < 1 for n in self.ns):
            raise ValueError(f"problem sizes must be positive, got {self.ns}")

    @property
    def concurrent(self) -> bool:
        return self.algorithm.startswith("concurrent")

    @property
    def variant(self) -> ScheduleVariant:
        return ALGORITHMS[self.algorithm]

    def resolve(self, n: int) -> tuple[int, int | None]:
        """``(mu, tau)`` at size ``n``; ``tau`` is ``None`` where it does not apply."""
        mu = resolve_rule(self.mu, n, MU_RULES, "mu")
        if self.concurrent or self.variant is ScheduleVariant.CLASSIC:
            return mu, None
        tau_rule = self.tau if self.tau is not None else DEFAULT_TAU[self.algorithm]
        return mu, resolve_rule(tau_rule, n, TAU_RULES, "tau")


@dataclass
class ResultRow:
    algorithm: str
    n: int
    mu: int
    tau: int | None
    seed: int
    covered: bool
    evals_to_cover: int | None
    iterations: int | None
    wall_ms: int | None = None

    def as_row(self) -> tuple:
        def cell(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            return v
        return tuple(cell(getattr(self, f.name)) for f in fields(self))


@dataclass
class CellOutput:
    row: ResultRow
    trace: list[TraceRow] | None = None
    events: list[SchedulerEvent] | None = None


def run_cell(cfg: ExperimentConfig, n: int, replicate: int) -> CellOutput:
    """Execute one (n, replicate) cell; its seed depends only on the master seed and index."""
    mu, tau = cfg.resolve(n)
    seed = derive_seed(cfg.seed, replicate)
    problem = OneMinMax(n)
    started = time.perf_counter()
    if cfg.concurrent:
        res = concurrent_run(cfg.variant, mu, problem, cfg.operators, seed, cfg.eval_budget)
        result, trace, events = res.result, None, res.events
    else:
        state = init_run(cfg.variant, mu, tau if tau is not None else 1, problem, seed,
                         trace=cfg.trace)
        result = run(state, problem, cfg.operators, cfg.eval_budget)
        trace, events = result.trace, None
    wall = round((time.perf_counter() - started) * 1000) if cfg.timing else None
    row = ResultRow(cfg.algorithm, n, mu, tau, seed, result.covered, result.evals_to_cover,
                    result.iterations_to_cover, wall)
    return CellOutput(row, trace, events)


def _run_cell_args(args):
    return run_cell(*args)


def run_cells(cfg: ExperimentConfig, workers: int = 1) -> list[CellOutput]:
    """All cells in canonical (n, replicate) order, optionally on worker processes."""
    for n in cfg.ns:
        mu, tau = cfg.resolve(n)
        log.info("%s n=%d: mu=%d tau=%s", cfg.algorithm, n, mu, tau)
    cells = [(cfg, n, k) for n in cfg.ns for k in range(cfg.replicates)]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell_args, cells))
    return [run_cell(*c) for c in cells]


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
    return [out.row for out in run_cells(cfg, workers)]


# --------------------------------------------------------------------------
# summaries


@dataclass
class Summary:
    algorithm: str
    n: int
    runs: int
    success_rate: float
    median: int | None
    q1: int | None
    q3: int | None


def lower_quantile(values: Sequence, q: float):
    ordered = sorted(values)
    return ordered[math.floor((len(ordered) - 1) * q)]


def summarize(rows: Iterable[ResultRow]) -> list[Summary]:
    """Per-(algorithm, n) success rate and lower-convention quartiles of F."""
    groups: dict[tuple[str, int], list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.algorithm, row.n), []).append(row)
    if not groups:
        raise ValueError("cannot summarize an empty set of rows")
    out = []
    for (algo, n) in sorted(groups):
        group = groups[(algo, n)]
        fs = [r.evals_to_cover for r in group if r.covered]
        stats = [lower_quantile(fs, q) for q in (0.5, 0.25, 0.75)] if fs else [None] * 3
        out.append(Summary(algo, n, len(group), len(fs) / len(group), *stats))
    return out


# --------------------------------------------------------------------------
# CSV


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def results_csv(rows: Iterable[ResultRow]) -> str:
    return _csv_text(RESULT_HEADER, (r.as_row() for r in rows))


def trace_csv(trace: Iterable[TraceRow]) -> str:
    def fmt(row: TraceRow):
        return (row.t, row.phase, row.pop_size, row.evals_total,
                "" if row.mei is None else row.mei, f"{row.coverage_fraction:.6f}")
    return _csv_text(TRACE_HEADER, (fmt(r) for r in trace))


def events_csv(events: Iterable[SchedulerEvent]) -> str:
    return _csv_text(EVENT_HEADER, (e.as_row() for e in events))


def trace_path(base: Path, n: int, replicate: int, single: bool) -> Path:
    """Trace file for a cell; multi-cell runs get ``_n{n}_r{k}`` before the suffix."""
    if single:
        return base
    return base.with_name(f"{base.stem}_n{n}_r{replicate}{base.suffix}")


def write_traces(outputs: Sequence[CellOutput], base: Path) -> list[Path]:
    written = []
    seen: dict[int, int] = {}
    for out in outputs:
        k = seen[out.row.n] = seen.get(out.row.n, -1) + 1
        path = trace_path(base, out.row.n, k, len(outputs) == 1)
        if out.events is not None:
            path.write_text(events_csv(out.events))
        elif out.trace is not None:
            path.write_text(trace_csv(out.trace))
        else:
            continue
        written.append(path)
    return written


# --------------------------------------------------------------------------
# key=value configuration

CONFIG_KEYS = ("algo", "n", "mu", "tau", "seed", "replicates", "budget", "trace", "out",
               "mutation", "selection", "crossover", "crowding", "workers", "timing")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment, blank lines are ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: expected one of {', '.join(CONFIG_KEYS)} as key=value, got {raw!r}")
        values[key] = value.strip()
    return values


def parse_config_file(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in str(text).split(",") if tok.strip())


def _truthy(text) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def config_from_mapping(values: dict) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from string-valued settings."""
    kwargs: dict = {}
    if "algo" in values:
        kwargs["algorithm"] = str(values["algo"]).strip()
    if "n" in values:
        kwargs["ns"] = _int_list(values["n"])
    if "mu" in values:
        kwargs["mu"] = str(values["mu"])
    if "tau" in values:
        kwargs["tau"] = str(values["tau"])
    for key, name in (("seed", "seed"), ("replicates", "replicates"), ("budget", "eval_budget")):
        if key in values:
            kwargs[name] = int(values[key])
    if "trace" in values:
        kwargs["trace"] = bool(values["trace"])
    if "timing" in values:
        kwargs["timing"] = _truthy(values["timing"])
    ops = {}
    if "mutation" in values:
        ops["mutation"] = Mutation(values["mutation"])
    if "selection" in values:
        ops["parent_selection"] = ParentSelection(values["selection"])
    if "crowding" in values:
        ops["crowding"] = Crowding(values["crowding"])
    if "crossover" in values:
        ops["crossover_rate"] = float(values["crossover"])
    if ops:
        kwargs["operators"] = OperatorConfig(**ops)
    return ExperimentConfig(**kwargs)
