"""Train a small Q-learning agent and inspect what it learned.

Run with: python demos/03_training.py  (about 10 seconds)
"""
from collections import Counter

from placesim import DcInventory, Hyperparams, generate_topology, save_qtable, train
from placesim.controller import RL_ACTION_POLICIES

topo = generate_topology(11, 7, 10_000_000_000, (1.0, 30.0), 3.0, seed=42)
inventory = DcInventory.from_topology(topo)

# The agent sees per-DC utilization and free-slot bins plus the incoming
# workload's demand class and slot count, and picks one of the three
# optimisation policies per workload. A placement failure costs -1000 and
# resets the environment.
print("training on 40,000 workloads...")
qtable, windows = train(topo, inventory, 40_000, Hyperparams(), seed=0)

print(f"visited {len(qtable.values)} distinct states")
print("\nreward per 1000-placement window (failures in parentheses):")
for w in windows[::5]:
    print(f"  window {w.window_index:3d}: {w.total_reward:12.1f}  ({w.placements_failed} failed)")

early = sum(w.total_reward for w in windows[:5]) / 5
late = sum(w.total_reward for w in windows[-5:]) / 5
print(f"\nmean window reward, first 5 vs last 5: {early:.0f} -> {late:.0f}")

greedy = Counter()
for state, row in qtable.values.items():
    best = max(range(3), key=lambda i: row[i])
    greedy[RL_ACTION_POLICIES[best].value] += qtable.visits[state]
total = sum(greedy.values())
print("\nvisit-weighted greedy policy mix:")
for name, count in greedy.most_common():
    print(f"  {name:14s} {count / total:6.1%}")

text = save_qtable(qtable)
print(f"\nserialized q-table: {len(text.splitlines())} lines of JSON")
