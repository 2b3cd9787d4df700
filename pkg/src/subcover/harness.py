"""Experiment driver: instance assembly, algorithm dispatch, trace files.

An experiment builds one problem instance (a coverage instance from JSON,
or an influence instance from a graph file plus a sampled oracle and
degree-noise costs), runs one algorithm for each seed, and writes:

  * one raw trace CSV per repetition,
  * an averaged trace aligning repetitions on their shared evaluation
    checkpoints (mean of the best feasible cost, with min/max columns as a
    dispersion extension), and
  * for the evolutionary algorithms, a normalized trace dividing
    evaluations by n * |G| and costs by c(G), where G is the greedy
    reference solution on the same instance.

Evaluation counts, not wall-clock time, are the x-axis everywhere.  A
fixed configuration reproduces its CSVs byte for byte.  Partial outputs
are removed if the run fails.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from .core import MCSCInstance
from .easc import EASCConfig, TraceRow, choose_delta, run_easc
from .errors import ConfigError
from .greedy import GreedyResult, run_greedy
from .influence import RISOracle, degree_noise_costs, generate_rr_sets
from .io import (
    load_snap_graph,
    read_instance,
    read_rr_cache,
    write_rr_cache,
    write_trace_csv,
)
from .pom import run_pom

__all__ = [
    "CoverageSource",
    "GraphSource",
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "average_rows",
    "normalize_rows",
    "write_averaged_csv",
    "write_normalized_csv",
]

ALGORITHMS = ("greedy", "easc", "pom")

AVERAGED_HEADER = [
    "iteration",
    "evaluations",
    "mean_best_cost",
    "min_best_cost",
    "max_best_cost",
]

NORMALIZED_HEADER = ["normalized_evaluations", "normalized_best_cost"]


@dataclass(frozen=True)
class CoverageSource:
    """Instance loaded from a coverage-instance JSON file."""

    path: str


@dataclass(frozen=True)
class GraphSource:
    """Influence instance: SNAP edge list + sampled oracle + noise costs."""

    path: str
    edge_probability: float
    ris_samples: int
    cost_sigma: float = 0.5
    cost_seed: int = 0
    rr_seed: int = 0
    rr_cache: Optional[str] = None  # reuse/persist RR samples at this path
    tau_fraction: Optional[float] = None  # tau = fraction * f(V); f(V) = |V|


@dataclass(frozen=True)
class ExperimentConfig:
    source: Union[CoverageSource, GraphSource]
    algorithm: str
    epsilon: float
    output_dir: str
    seeds: Sequence[int] = (0,)
    tau: Optional[float] = None  # overrides the source-derived threshold
    delta: Union[float, str, None] = None  # explicit, "auto", or unused
    iterations: Optional[int] = None
    trace_stride: int = 100
    max_steps: Optional[int] = None  # greedy step budget

    @property
    def repetitions(self) -> int:
        return len(self.seeds)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.repetitions < 1:
            raise ConfigError("at least one seed is required")
        if self.delta == "auto" and self.algorithm != "easc":
            raise ConfigError("delta='auto' is only meaningful for easc")
        if self.algorithm in ("easc", "pom"):
            if self.iterations is None or self.iterations < 0:
                raise ConfigError(f"{self.algorithm} requires iterations >= 0")
        if self.algorithm == "easc" and self.delta is None:
            raise ConfigError("easc requires delta (a float or 'auto')")
        if not 0.0 <= self.epsilon < 1.0:
            raise ConfigError(f"epsilon must be in [0, 1), got {self.epsilon}")


@dataclass
class ExperimentResult:
    """Everything a caller needs to inspect or chain an experiment."""

    config: ExperimentConfig
    instance: MCSCInstance
    raw_paths: List[str]
    averaged_path: Optional[str]
    normalized_path: Optional[str]
    greedy_reference: Optional[GreedyResult]
    delta: Optional[float]
    traces: List[List[TraceRow]] = field(default_factory=list)
    final_best_costs: List[Optional[float]] = field(default_factory=list)
    max_population_sizes: List[int] = field(default_factory=list)


def build_instance(source) -> MCSCInstance:
    """Assemble the MCSC instance described by a source."""
    if isinstance(source, CoverageSource):
        return read_instance(source.path)
    if isinstance(source, GraphSource):
        graph, _ = load_snap_graph(source.path, source.edge_probability)
        costs = degree_noise_costs(graph, source.cost_sigma, source.cost_seed).costs
        index = None
        if source.rr_cache and os.path.exists(source.rr_cache):
            index = read_rr_cache(
                source.rr_cache,
                graph.content_hash(),
                source.edge_probability,
                sample_count=source.ris_samples,
                seed=source.rr_seed,
            )
        if index is None:
            index = generate_rr_sets(graph, source.ris_samples, source.rr_seed)
            if source.rr_cache:
                write_rr_cache(
                    source.rr_cache, index, graph.content_hash(),
                    source.edge_probability,
                )
        oracle = RISOracle(index, graph.vertex_count)
        if source.tau_fraction is not None:
            # Every RR set contains its root, so the sampled f(V) is |V|.
            tau = source.tau_fraction * graph.vertex_count
        else:
            tau = None
        instance = MCSCInstance(costs, oracle, 0.0 if tau is None else tau)
        return instance
    raise ConfigError(f"unsupported source {type(source).__name__}")


def _greedy_trace_rows(
    instance: MCSCInstance, result: GreedyResult, epsilon: float
) -> List[TraceRow]:
    """Per-step rows for a greedy run: one row per element added.

    The solution is a single growing set, so population_size is 1 and the
    best feasible columns stay empty until the prefix crosses
    (1 - epsilon) * tau.
    """
    n = instance.n
    target = (1.0 - epsilon) * instance.tau
    rows = [TraceRow(0, 1, None, None, 1)]
    running_cost = 0.0
    for i, element in enumerate(result.order, start=1):
        running_cost += float(instance.costs[element])
        f_i = result.f_values[i - 1]
        feasible = f_i >= target
        rows.append(
            TraceRow(
                iteration=i,
                evaluations=1 + i * n,
                best_feasible_cost=running_cost if feasible else None,
                best_feasible_f=f_i if feasible else None,
                population_size=1,
            )
        )
    return rows


def average_rows(traces: Sequence[Sequence[TraceRow]]) -> List[dict]:
    """Align repetitions on their shared checkpoints and average best costs.

    Repetitions share iteration/evaluation checkpoints by construction
    (same stride, same length); this is asserted.  The mean/min/max are
    defined only where every repetition has a defined best cost.
    """
    first = traces[0]
    for other in traces[1:]:
        if len(other) != len(first) or any(
            a.iteration != b.iteration or a.evaluations != b.evaluations
            for a, b in zip(first, other)
        ):
            raise ConfigError("repetition traces are not checkpoint-aligned")
    out = []
    for i, row in enumerate(first):
        costs = [t[i].best_feasible_cost for t in traces]
        if all(c is not None for c in costs):
            mean = sum(costs) / len(costs)
            lo, hi = min(costs), max(costs)
        else:
            mean = lo = hi = None
        out.append(
            {
                "iteration": row.iteration,
                "evaluations": row.evaluations,
                "mean_best_cost": mean,
                "min_best_cost": lo,
                "max_best_cost": hi,
            }
        )
    return out


def normalize_rows(
    averaged: Sequence[dict], n: int, reference: GreedyResult
) -> List[dict]:
    """Scale checkpoints by the greedy reference: evaluations by n * |G|,
    costs by c(G)."""
    denom_evals = n * len(reference.order)
    if denom_evals <= 0 or reference.cost <= 0:
        raise ConfigError("greedy reference is degenerate; cannot normalize")
    out = []
    for row in averaged:
        cost = row["mean_best_cost"]
        out.append(
            {
                "normalized_evaluations": row["evaluations"] / denom_evals,
                "normalized_best_cost": None
                if cost is None
                else cost / reference.cost,
            }
        )
    return out


def _write_dict_csv(path, header, rows) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            record = []
            for key in header:
                value = row[key]
                if value is None:
                    record.append("")
                elif isinstance(value, float):
                    record.append("%.17g" % value)
                else:
                    record.append(value)
            writer.writerow(record)


def write_averaged_csv(path, averaged) -> None:
    _write_dict_csv(path, AVERAGED_HEADER, averaged)


def write_normalized_csv(path, normalized) -> None:
    _write_dict_csv(path, NORMALIZED_HEADER, normalized)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute one experiment configuration and write its output files.

    For the evolutionary algorithms a greedy reference run (same epsilon)
    supplies the normalizers; delta='auto' additionally runs greedy with
    epsilon = 0 and sets delta = 1 - c_min / B from its cost B.  All module
    errors propagate after partial outputs are deleted.
    """
    config.validate()
    os.makedirs(config.output_dir, exist_ok=True)
    created: List[str] = []
    try:
        instance = build_instance(config.source)
        if config.tau is not None:
            if config.tau > instance.oracle.evaluate(
                __import__("subcover.core", fromlist=["Subset"]).Subset.full(
                    instance.n
                )
            ):
                raise ConfigError("tau exceeds f(S)")
            instance = MCSCInstance(instance.costs, instance.oracle, config.tau)
        return _run_on_instance(config, instance, created)
    except BaseException:
        for path in created:
            if os.path.exists(path):
                os.remove(path)
        raise


def _run_on_instance(
    config: ExperimentConfig, instance: MCSCInstance, created: List[str]
) -> ExperimentResult:
    algorithm = config.algorithm
    out = config.output_dir
    greedy_reference = None
    delta: Optional[float] = None

    if algorithm in ("easc", "pom"):
        greedy_reference = run_greedy(instance, config.epsilon, config.max_steps)
    if algorithm == "easc":
        if config.delta == "auto":
            bound = run_greedy(instance, 0.0, config.max_steps).cost
            delta = choose_delta(instance, bound)
        else:
            delta = float(config.delta)

    raw_paths: List[str] = []
    traces: List[List[TraceRow]] = []
    final_costs: List[Optional[float]] = []
    max_pops: List[int] = []

    if algorithm == "greedy":
        result = run_greedy(instance, config.epsilon, config.max_steps)
        rows = _greedy_trace_rows(instance, result, config.epsilon)
        path = os.path.join(out, "trace_greedy.csv")
        created.append(path)
        write_trace_csv(path, rows)
        raw_paths.append(path)
        traces.append(rows)
        final_costs.append(rows[-1].best_feasible_cost)
        max_pops.append(1)
        return ExperimentResult(
            config, instance, raw_paths, None, None, result, None, traces,
            final_costs, max_pops,
        )

    for seed in config.seeds:
        if algorithm == "easc":
            run_config = EASCConfig(
                epsilon=config.epsilon,
                delta=delta,
                iterations=config.iterations,
                rng_seed=seed,
                trace_stride=config.trace_stride,
            )
            population, rows = run_easc(instance, run_config)
            max_pops.append(population.max_size_seen)
        else:
            tau_prime = (1.0 - config.epsilon) * instance.tau
            population, rows = run_pom(
                instance,
                tau_prime,
                config.iterations,
                seed,
                trace_stride=config.trace_stride,
            )
            max_pops.append(population.max_size_seen)
        path = os.path.join(out, f"trace_{algorithm}_seed{seed}.csv")
        created.append(path)
        write_trace_csv(path, rows)
        raw_paths.append(path)
        traces.append(rows)
        final_costs.append(rows[-1].best_feasible_cost)

    averaged = average_rows(traces)
    averaged_path = os.path.join(out, f"trace_{algorithm}_mean.csv")
    created.append(averaged_path)
    write_averaged_csv(averaged_path, averaged)

    normalized_path = None
    if greedy_reference is not None and greedy_reference.order:
        normalized = normalize_rows(averaged, instance.n, greedy_reference)
        normalized_path = os.path.join(out, f"trace_{algorithm}_normalized.csv")
        created.append(normalized_path)
        write_normalized_csv(normalized_path, normalized)

    return ExperimentResult(
        config,
        instance,
        raw_paths,
        averaged_path,
        normalized_path,
        greedy_reference,
        delta,
        traces,
        final_costs,
        max_pops,
    )
