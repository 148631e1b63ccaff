"""Build a network, route over it, and account for bandwidth reservations.

Run with: python demos/01_topology_and_routing.py
"""
import random

from placesim import (
    compute_paths,
    generate_topology,
    max_path_utilization,
    reserve,
    reset_network,
    save_topology,
)
from placesim.topology import release

# A synthetic stand-in for a service-provider WAN: 11 access POPs, 7 of which
# also host a DC cluster, wired as a random spanning tree plus extra edges.
topo = generate_topology(
    pop_count=11,
    dc_count=7,
    link_capacity_bps=10_000_000_000,
    latency_range_ms=(1.0, 30.0),
    avg_degree=3.0,
    seed=42,
)
print(f"nodes: {sorted(topo.nodes)}")
print(f"DC-capable POPs: {topo.dc_ids}")
print(f"links: {len(topo.links)} x 10 Gb/s")

# Routing is equal-cost multipath over latency-weighted shortest paths.
src, dst = topo.access_ids[0], topo.dc_ids[-1]
path_set = compute_paths(topo, src, dst)
print(f"\nshortest paths {src} -> {dst} ({path_set.latency_ms:.3f} ms):")
for path in path_set.paths:
    print("  " + " -> ".join(path))

# A demand splits equally across the equal-cost paths; reservations are
# integer bits/s, so releasing a handle restores the exact prior state.
demand = 512_000_000
print(f"\nreserving {demand/1e6:.0f} Mb/s on that path set")
handle = reserve(topo, path_set, demand)
print(f"max path utilization now: {max_path_utilization(topo, path_set):.4f}")
print(f"utilization if we added another 1 Gb/s: "
      f"{max_path_utilization(topo, path_set, 1_000_000_000):.4f}")

release(topo, handle)
print(f"after release: {max_path_utilization(topo, path_set):.4f}")

# What-if games over, wipe everything.
rng = random.Random(7)
for _ in range(5):
    a, b = rng.sample(sorted(topo.nodes), 2)
    reserve(topo, compute_paths(topo, a, b), rng.randrange(0, 2_000_000_000))
reset_network(topo)
print(f"after reset_network, busiest link carries "
      f"{max(l.reserved_bps for l in topo.links)} b/s")

print("\ncanonical topology file (first 3 lines):")
print("\n".join(save_topology(topo).splitlines()[:3]))
