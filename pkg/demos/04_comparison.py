"""Compare the placement algorithms on shared workload streams.

Run with: python demos/04_comparison.py  (about 30 seconds)
"""
from placesim import DcInventory, ExperimentConfig, Hyperparams, generate_topology, train
from placesim.harness import run_comparison

topo = generate_topology(11, 7, 10_000_000_000, (1.0, 30.0), 3.0, seed=42)
inventory = DcInventory.from_topology(topo)

print("training the agent (100k workloads)...")
qtable, _ = train(topo, inventory, 100_000, Hyperparams(), seed=0)

# Every iteration draws a fresh stream; all five algorithms replay the
# identical stream on a fresh environment and place until the first
# infeasible workload.
config = ExperimentConfig(
    topology=topo,
    iterations=40,
    stream_length=2000,
    base_seed=0,
    algorithms=("Random", "DataCentreOpt", "PathUtilOpt", "LatencyOpt", "QLearning"),
    qtable=qtable,
)
print(f"comparing {len(config.algorithms)} algorithms over {config.iterations} iterations...")
report, results = run_comparison(config)

print(f"\n{'algorithm':15s} {'mean':>7s} {'min':>4s} {'max':>4s} {'vs random':>10s} {'win rate':>9s}")
for s in report.summaries:
    norm = f"{s.normalized_mean:.3f}" if s.normalized_mean is not None else "-"
    print(f"{s.algorithm:15s} {s.mean_placed:7.2f} {s.min_placed:4d} {s.max_placed:4d} "
          f"{norm:>10s} {s.win_rate:9.2f}")

stops = {}
for r in results:
    stops.setdefault(r.algorithm, set()).add(r.stop_reason)
print(f"\nstop reasons seen: { {k: sorted(v) for k, v in stops.items()} }")
