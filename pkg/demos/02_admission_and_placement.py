"""Walk one workload through admission control and policy-based placement.

Run with: python demos/02_admission_and_placement.py
"""
import random

from placesim import (
    DcInventory,
    Infeasible,
    Policy,
    WorkloadSpec,
    feasible_sites,
    generate_topology,
    place,
    slots_required,
)
from placesim.resources import release as release_slots
from placesim.topology import compute_paths, release as release_bw, reserve

topo = generate_topology(11, 7, 10_000_000_000, (1.0, 30.0), 3.0, seed=42)
inventory = DcInventory.from_topology(topo)
rng = random.Random(1)

# A workload: DC resource triple + access POPs, each leg carrying 512 Mb/s.
workload = WorkloadSpec(
    vcpus=8,
    memory_gb=16,
    storage_gb=512,
    access_pops=(topo.access_ids[0], topo.access_ids[3], topo.access_ids[8]),
    demand_bw_bps=512_000_000,
    l_max_ms=60.0,
)
slots = slots_required(workload.vcpus, workload.memory_gb, workload.storage_gb, inventory.quantum)
print(f"workload needs {slots} slots and {len(workload.access_pops)} legs "
      f"of {workload.demand_bw_bps/1e6:.0f} Mb/s")

# Admission screens every DC: slot headroom (F >= 1), post-placement link
# utilization <= T on every leg, and per-leg latency within the bound.
candidates = feasible_sites(topo, inventory, workload, threshold=0.9)
print("\nfeasible DCs at T=0.9:")
for c in candidates:
    print(f"  {c.dc_node}: slots_free_after={c.slots_free_after} "
          f"worst_util_after={c.worst_util_after:.4f} "
          f"avg_latency={c.avg_latency_ms:.2f}ms max={c.max_latency_ms:.2f}ms")

# Each policy reads the same candidate list differently; undo each placement
# so every policy sees the identical environment.
for policy in (Policy.DATA_CENTRE_OPT, Policy.PATH_UTIL_OPT, Policy.LATENCY_OPT):
    outcome = place(topo, inventory, workload, policy, 0.9, rng)
    print(f"{policy.value:14s} places at {outcome.dc_node}")
    release_slots(inventory, outcome.allocation)
    for handle in outcome.reservations:
        release_bw(topo, handle)

# Saturate the WAN and watch admission refuse with the dominant reason.
for dc in topo.dc_ids:
    for pop in topo.access_ids:
        if pop != dc:
            reserve(topo, compute_paths(topo, pop, dc), 800_000_000)
outcome = place(topo, inventory, workload, Policy.PATH_UTIL_OPT, 0.9, rng)
assert isinstance(outcome, Infeasible)
print(f"\nafter saturating the WAN: Infeasible({outcome.reason})")
