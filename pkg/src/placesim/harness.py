"""Experiment orchestration: per-iteration placement runs on shared workload
streams, cross-algorithm comparison, training campaigns, and report emission.

Every iteration starts from a fresh environment and stops at the first
infeasible placement; all algorithms of one iteration consume the identical
stream. Iterations are independent and may run on parallel workers; results
merge deterministically by iteration index.
"""
from __future__ import annotations

import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from .controller import Infeasible, Policy, place
from .qlearning import Hyperparams, QTable, act_greedy, encode_state, load_qtable, save_qtable, train
from .resources import DEFAULT_QUANTUM, DcInventory, SlotQuantum, reset_inventory
from .topology import Topology, load_topology, reset_network, save_topology
from .workload import WorkloadStream, generate_stream

HEURISTIC_ALGORITHMS = ("Random", "DataCentreOpt", "PathUtilOpt", "LatencyOpt")
ALGORITHMS = HEURISTIC_ALGORITHMS + ("QLearning",)
STOP_STREAM_EXHAUSTED = "stream_exhausted"

_POLICY_BY_NAME = {p.value: p for p in Policy}


@dataclass(frozen=True)
class IterationResult:
    algorithm: str
    iteration: int
    placed_count: int
    stop_reason: str


@dataclass(frozen=True)
class AlgorithmSummary:
    algorithm: str
    mean_placed: float
    min_placed: int
    max_placed: int
    normalized_mean: float | None
    win_rate: float


@dataclass(frozen=True)
class ComparisonReport:
    iterations: int
    summaries: tuple[AlgorithmSummary, ...]

    def summary(self, algorithm: str) -> AlgorithmSummary:
        for s in self.summaries:
            if s.algorithm == algorithm:
                return s
        raise KeyError(algorithm)


@dataclass
class ExperimentConfig:
    topology: Topology
    quantum: SlotQuantum = DEFAULT_QUANTUM
    threshold: float = 0.9
    iterations: int = 100
    stream_length: int = 2000
    base_seed: int = 0
    algorithms: tuple[str, ...] = HEURISTIC_ALGORITHMS
    qtable: QTable | None = None
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    train_workloads: int = 100_000
    workers: int = 1

    def __post_init__(self) -> None:
        if self.iterations < 1 or self.stream_length < 1:
            raise ValueError("iterations and stream_length must be >= 1")
        if not self.algorithms:
            raise ValueError("algorithm set must not be empty")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm '{name}' (known: {', '.join(ALGORITHMS)})")
        if "QLearning" in self.algorithms and self.qtable is None:
            raise ValueError("QLearning requires a trained q-table")


def run_iteration(
    topo: Topology,
    inventory: DcInventory,
    stream: WorkloadStream,
    algorithm: str,
    qtable: QTable | None = None,
    threshold: float = 0.9,
    seed: int = 0,
    iteration: int = 0,
) -> IterationResult:
    """Place the stream in order on a fresh environment until the first
    infeasible workload (or the stream runs out)."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm '{algorithm}'")
    if algorithm == "QLearning":
        if qtable is None:
            raise ValueError("QLearning requires a trained q-table")
        qtable.check_compatible(topo)
    reset_network(topo)
    reset_inventory(inventory)
    rng = Random(seed)
    placed = 0
    stop_reason = STOP_STREAM_EXHAUSTED
    fixed_policy = _POLICY_BY_NAME.get(algorithm)
    for workload in stream.workloads:
        if fixed_policy is not None:
            policy = fixed_policy
        else:
            state = encode_state(topo, inventory, workload, qtable.hyperparams)
            policy = act_greedy(qtable, state)
        outcome = place(topo, inventory, workload, policy, threshold, rng)
        if isinstance(outcome, Infeasible):
            stop_reason = outcome.reason
            break
        placed += 1
    return IterationResult(algorithm, iteration, placed, stop_reason)


def _run_iteration_block(args: tuple) -> list[IterationResult]:
    """Worker task: rebuild the environment from serialized inputs and run
    one iteration's worth of algorithm runs."""
    (topology_text, qtable_text, quantum, iteration, seed, algorithms, threshold, stream_length) = args
    topo = load_topology(topology_text)
    inventory = DcInventory.from_topology(topo, SlotQuantum(*quantum))
    qtable = load_qtable(qtable_text, topo) if qtable_text is not None else None
    stream = generate_stream(seed, stream_length, topo)
    return [
        run_iteration(topo, inventory, stream, name, qtable, threshold, seed, iteration)
        for name in algorithms
    ]


def run_comparison(config: ExperimentConfig) -> tuple[ComparisonReport, list[IterationResult]]:
    """Run every configured algorithm over `iterations` shared streams and
    aggregate the per-algorithm statistics."""
    results: list[IterationResult] = []
    if config.workers > 1:
        topology_text = save_topology(config.topology)
        qtable_text = save_qtable(config.qtable) if config.qtable is not None else None
        quantum = (config.quantum.vcpus, config.quantum.memory_gb, config.quantum.storage_gb)
        tasks = [
            (topology_text, qtable_text, quantum, i, config.base_seed + i,
             config.algorithms, config.threshold, config.stream_length)
            for i in range(config.iterations)
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for block in pool.map(_run_iteration_block, tasks):
                results.extend(block)
    else:
        inventory = DcInventory.from_topology(config.topology, config.quantum)
        for i in range(config.iterations):
            seed = config.base_seed + i
            stream = generate_stream(seed, config.stream_length, config.topology)
            for name in config.algorithms:
                results.append(
                    run_iteration(
                        config.topology, inventory, stream, name,
                        config.qtable, config.threshold, seed, i,
                    )
                )
    report = build_report(results, config.algorithms, config.iterations)
    return report, results


def build_report(
    results: list[IterationResult],
    algorithms: tuple[str, ...],
    iterations: int,
) -> ComparisonReport:
    """Aggregate raw results: mean/min/max placements, normalization against
    Random, and win rates (a tie credits every tied algorithm)."""
    if not results:
        raise ValueError("no results to report on")
    by_algorithm: dict[str, list[int]] = {name: [] for name in algorithms}
    best_per_iteration: dict[int, int] = {}
    for r in results:
        by_algorithm[r.algorithm].append(r.placed_count)
        best = best_per_iteration.get(r.iteration)
        if best is None or r.placed_count > best:
            best_per_iteration[r.iteration] = r.placed_count
    wins = {name: 0 for name in algorithms}
    for r in results:
        if r.placed_count == best_per_iteration[r.iteration]:
            wins[r.algorithm] += 1
    random_mean = None
    if "Random" in by_algorithm and by_algorithm["Random"]:
        random_mean = statistics.mean(by_algorithm["Random"])
    summaries = []
    for name in algorithms:
        counts = by_algorithm[name]
        if not counts:
            raise ValueError(f"no results recorded for algorithm '{name}'")
        mean = statistics.mean(counts)
        normalized = mean / random_mean if random_mean else None
        summaries.append(
            AlgorithmSummary(
                algorithm=name,
                mean_placed=mean,
                min_placed=min(counts),
                max_placed=max(counts),
                normalized_mean=normalized,
                win_rate=wins[name] / iterations,
            )
        )
    return ComparisonReport(iterations, tuple(summaries))


def results_csv(results: list[IterationResult], algorithms: tuple[str, ...]) -> str:
    """Plot-ready CSV, rows ordered by (algorithm as configured, iteration)."""
    order = {name: i for i, name in enumerate(algorithms)}
    out = io.StringIO()
    out.write("algorithm,iteration,placed_count,stop_reason\n")
    for r in sorted(results, key=lambda r: (order[r.algorithm], r.iteration)):
        out.write(f"{r.algorithm},{r.iteration},{r.placed_count},{r.stop_reason}\n")
    return out.getvalue()


def report_json(report: ComparisonReport) -> str:
    doc = {
        "iterations": report.iterations,
        "win_rate_rule": "a tie for most workloads placed credits every tied algorithm",
        "normalization": "mean placed count divided by the Random mean",
        "algorithms": [
            {
                "algorithm": s.algorithm,
                "mean_placed": s.mean_placed,
                "min_placed": s.min_placed,
                "max_placed": s.max_placed,
                "normalized_mean": s.normalized_mean,
                "win_rate": s.win_rate,
            }
            for s in report.summaries
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_report(
    results: list[IterationResult],
    algorithms: tuple[str, ...],
    iterations: int,
    csv_path: str | Path,
    summary_path: str | Path,
) -> ComparisonReport:
    """Write the raw-results CSV and the summary file; returns the report."""
    report = build_report(results, algorithms, iterations)
    Path(csv_path).write_text(results_csv(results, algorithms))
    Path(summary_path).write_text(report_json(report))
    return report


def reward_log_csv(windows) -> str:
    out = io.StringIO()
    out.write("window_index,total_reward,placements_failed\n")
    for w in windows:
        out.write(f"{w.window_index},{w.total_reward},{w.placements_failed}\n")
    return out.getvalue()


def run_training(
    config: ExperimentConfig,
    qtable_path: str | Path,
    reward_log_path: str | Path,
    seed: int = 0,
) -> tuple[QTable, list]:
    """Train on the configured topology and persist the q-table plus the
    per-1000-placements reward log."""
    inventory = DcInventory.from_topology(config.topology, config.quantum)
    qtable, windows = train(
        config.topology,
        inventory,
        config.train_workloads,
        config.hyperparams,
        seed,
        config.threshold,
    )
    Path(qtable_path).write_text(save_qtable(qtable))
    Path(reward_log_path).write_text(reward_log_csv(windows))
    return qtable, windows
