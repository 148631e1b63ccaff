"""Command-line front end: topology/workload generation, training,
single-algorithm evaluation and multi-algorithm comparison."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    ALGORITHMS,
    ExperimentConfig,
    emit_report,
    results_csv,
    run_comparison,
    run_iteration,
    run_training,
)
from .qlearning import Hyperparams, load_qtable
from .resources import DcInventory, SlotQuantum
from .topology import generate_topology, load_topology, save_topology
from .workload import generate_stream, load_stream, save_stream


def _parse_quantum(text: str) -> SlotQuantum:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"quantum must be 'vcpus,memory_gb,storage_gb', got '{text}'")
    try:
        vcpus, memory_gb, storage_gb = (int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"quantum components must be integers: '{text}'") from exc
    return SlotQuantum(vcpus, memory_gb, storage_gb)


def _parse_algorithms(text: str) -> tuple[str, ...]:
    names = tuple(name.strip() for name in text.split(",") if name.strip())
    if not names:
        raise argparse.ArgumentTypeError("algorithm list must not be empty")
    return names


def _load_topology_file(path: str):
    return load_topology(Path(path).read_text())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="placesim",
        description="Joint WAN + data-centre workload placement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-topology", help="generate a synthetic topology file")
    p.add_argument("--pops", type=int, default=11, help="number of access POPs")
    p.add_argument("--dcs", type=int, default=7, help="POPs that also host a DC cluster")
    p.add_argument("--capacity-gbps", type=float, default=10.0)
    p.add_argument("--latency-min", type=float, default=1.0, metavar="MS")
    p.add_argument("--latency-max", type=float, default=30.0, metavar="MS")
    p.add_argument("--avg-degree", type=float, default=3.0)
    p.add_argument("--slots-per-dc", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("gen-workloads", help="generate a workload stream file")
    p.add_argument("--topology", required=True)
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("train", help="train the Q-learning agent")
    p.add_argument("--topology", required=True)
    p.add_argument("--workloads", type=int, default=100_000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument("--epsilon-start", type=float, default=1.0)
    p.add_argument("--epsilon-end", type=float, default=0.05)
    p.add_argument("--util-bins", type=int, default=8)
    p.add_argument("--slot-bins", type=int, default=4)
    p.add_argument("--quantum", type=_parse_quantum, default=SlotQuantum(2, 4, 256), metavar="V,M,H")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="q-table file")
    p.add_argument("--reward-log", required=True, help="reward log CSV")

    p = sub.add_parser("evaluate", help="run one algorithm over a stream")
    p.add_argument("--topology", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--qtable", help="q-table file (required for QLearning)")
    p.add_argument("--stream", required=True)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("compare", help="compare algorithms over shared streams")
    p.add_argument("--topology", required=True)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--stream-length", type=int, default=2000)
    p.add_argument("--algorithms", type=_parse_algorithms,
                   default=("Random", "DataCentreOpt", "PathUtilOpt", "LatencyOpt"),
                   metavar="a,b,c")
    p.add_argument("--qtable", help="q-table file (required when QLearning is compared)")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="results CSV")
    p.add_argument("--summary", required=True, help="summary JSON")
    return parser


def _cmd_gen_topology(args) -> int:
    topo = generate_topology(
        pop_count=args.pops,
        dc_count=args.dcs,
        link_capacity_bps=int(args.capacity_gbps * 1e9),
        latency_range_ms=(args.latency_min, args.latency_max),
        avg_degree=args.avg_degree,
        seed=args.seed,
        slots_per_dc=args.slots_per_dc,
    )
    Path(args.output).write_text(save_topology(topo))
    print(f"wrote {args.output}: {len(topo.nodes)} nodes, {len(topo.links)} links, "
          f"{len(topo.dc_ids)} DCs")
    return 0


def _cmd_gen_workloads(args) -> int:
    topo = _load_topology_file(args.topology)
    stream = generate_stream(args.seed, args.count, topo)
    Path(args.output).write_text(save_stream(stream))
    print(f"wrote {args.output}: {len(stream)} workloads (seed {args.seed})")
    return 0


def _cmd_train(args) -> int:
    topo = _load_topology_file(args.topology)
    hp = Hyperparams(
        alpha=args.alpha,
        gamma=args.gamma,
        epsilon_start=args.epsilon_start,
        epsilon_end=args.epsilon_end,
        util_bins=args.util_bins,
        slot_bins=args.slot_bins,
    )
    config = ExperimentConfig(
        topology=topo,
        quantum=args.quantum,
        threshold=args.threshold,
        hyperparams=hp,
        train_workloads=args.workloads,
    )
    qtable, windows = run_training(config, args.output, args.reward_log, seed=args.seed)
    print(f"trained on {args.workloads} workloads: {len(qtable.values)} states visited, "
          f"q-table in {args.output}, reward log in {args.reward_log}")
    return 0


def _cmd_evaluate(args) -> int:
    topo = _load_topology_file(args.topology)
    inventory = DcInventory.from_topology(topo)
    stream = load_stream(Path(args.stream).read_text(), topo)
    qtable = None
    if args.algorithm == "QLearning":
        if not args.qtable:
            raise ValueError("evaluate --algorithm QLearning requires --qtable")
        qtable = load_qtable(Path(args.qtable).read_text(), topo)
    result = run_iteration(
        topo, inventory, stream, args.algorithm, qtable, args.threshold, args.seed
    )
    Path(args.output).write_text(results_csv([result], (args.algorithm,)))
    print(f"{args.algorithm}: placed {result.placed_count} workloads "
          f"(stopped: {result.stop_reason})")
    return 0


def _cmd_compare(args) -> int:
    topo = _load_topology_file(args.topology)
    qtable = None
    if "QLearning" in args.algorithms:
        if not args.qtable:
            raise ValueError("compare with QLearning requires --qtable")
        qtable = load_qtable(Path(args.qtable).read_text(), topo)
    config = ExperimentConfig(
        topology=topo,
        threshold=args.threshold,
        iterations=args.iterations,
        stream_length=args.stream_length,
        base_seed=args.base_seed,
        algorithms=args.algorithms,
        qtable=qtable,
    )
    report, results = run_comparison(config)
    emit_report(results, args.algorithms, args.iterations, args.output, args.summary)
    for s in report.summaries:
        norm = f"{s.normalized_mean:.3f}" if s.normalized_mean is not None else "n/a"
        print(f"{s.algorithm}: mean {s.mean_placed:.1f} placed "
              f"(min {s.min_placed}, max {s.max_placed}), "
              f"normalized {norm}, win rate {s.win_rate:.2f}")
    return 0


_COMMANDS = {
    "gen-topology": _cmd_gen_topology,
    "gen-workloads": _cmd_gen_workloads,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
