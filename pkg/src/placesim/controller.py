"""Global placement decision: admission control over DC slots, path
utilization and latency, then policy-based selection among feasible DCs.

Legs of one workload are what-if-reserved cumulatively (in canonical A-end
order) while a candidate is evaluated, so shared links see the combined load;
the what-ifs are rolled back exactly before the verdict. A leg whose access
POP is the candidate DC itself stays local: zero latency, no WAN demand.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from . import resources, topology as net
from .resources import DcInventory, slots_required
from .topology import Topology
from .workload import WorkloadSpec


class Policy(Enum):
    RANDOM = "Random"
    DATA_CENTRE_OPT = "DataCentreOpt"
    PATH_UTIL_OPT = "PathUtilOpt"
    LATENCY_OPT = "LatencyOpt"


# Action set available to the learning agent, in fixed index order.
RL_ACTION_POLICIES = (Policy.DATA_CENTRE_OPT, Policy.PATH_UTIL_OPT, Policy.LATENCY_OPT)

REASON_DC_CAPACITY = "dc_capacity"
REASON_BANDWIDTH = "bandwidth"
REASON_LATENCY = "latency"
REASON_NO_CANDIDATES = "no_candidates"


@dataclass(frozen=True)
class CandidateEvaluation:
    dc_node: str
    slots_free_after: int
    worst_util_after: float
    avg_latency_ms: float
    max_latency_ms: float


@dataclass(frozen=True)
class Placed:
    dc_node: str
    allocation: resources.Allocation
    reservations: tuple[net.Reservation, ...]


@dataclass(frozen=True)
class Infeasible:
    reason: str


PlacementOutcome = Placed | Infeasible


def dc_admission(cluster: resources.ClusterState, slots_needed: int, strict_headroom: bool = True) -> bool:
    """Accept iff the cluster keeps at least one free slot after placement
    (or merely does not go negative, with strict_headroom off)."""
    floor = 1 if strict_headroom else 0
    return cluster.free_slots - slots_needed >= floor


def network_admission(
    topo: Topology, path_set: net.PathSet, demand_bps: int, threshold: float
) -> bool:
    """Accept iff adding the demand keeps every link on the path set at or
    below the utilization threshold."""
    return net.max_path_utilization(topo, path_set, demand_bps) <= threshold


def latency_admission(max_latency_ms: float, l_max_ms: float | None) -> bool:
    """Accept iff no latency bound is set or the worst path latency meets it."""
    return l_max_ms is None or max_latency_ms <= l_max_ms


def _evaluate_candidates(
    topo: Topology,
    inventory: DcInventory,
    workload: WorkloadSpec,
    threshold: float,
    strict_headroom: bool,
) -> tuple[list[CandidateEvaluation], dict[str, str]]:
    slots_needed = slots_required(
        workload.vcpus, workload.memory_gb, workload.storage_gb, inventory.quantum
    )
    candidates: list[CandidateEvaluation] = []
    failures: dict[str, str] = {}
    for dc in topo.dc_ids:
        cluster = inventory.clusters[dc]
        if not dc_admission(cluster, slots_needed, strict_headroom):
            failures[dc] = REASON_DC_CAPACITY
            continue
        what_ifs: list[net.Reservation] = []
        failure = None
        worst_util = 0.0
        latency_sum = 0.0
        latency_max = 0.0
        for pop in workload.access_pops:
            if pop == dc:
                continue
            path_set = net.compute_paths(topo, pop, dc)
            util_after = net.max_path_utilization(topo, path_set, workload.demand_bw_bps)
            if util_after > threshold:
                failure = REASON_BANDWIDTH
                break
            if not latency_admission(path_set.latency_ms, workload.l_max_ms):
                failure = REASON_LATENCY
                break
            if util_after > worst_util:
                worst_util = util_after
            latency_sum += path_set.latency_ms
            if path_set.latency_ms > latency_max:
                latency_max = path_set.latency_ms
            what_ifs.append(net.reserve(topo, path_set, workload.demand_bw_bps))
        for handle in reversed(what_ifs):
            net.release(topo, handle)
        if failure is None:
            candidates.append(
                CandidateEvaluation(
                    dc_node=dc,
                    slots_free_after=cluster.free_slots - slots_needed,
                    worst_util_after=worst_util,
                    avg_latency_ms=latency_sum / len(workload.access_pops),
                    max_latency_ms=latency_max,
                )
            )
        else:
            failures[dc] = failure
    return candidates, failures


def feasible_sites(
    topo: Topology,
    inventory: DcInventory,
    workload: WorkloadSpec,
    threshold: float,
    strict_headroom: bool = True,
) -> list[CandidateEvaluation]:
    """Every DC that passes slot, bandwidth and latency admission for all
    legs of the workload, ordered by dc node id."""
    candidates, _ = _evaluate_candidates(topo, inventory, workload, threshold, strict_headroom)
    return candidates


def select_by_policy(
    policy: Policy, candidates: list[CandidateEvaluation], rng: random.Random
) -> str:
    """Pick a DC from a non-empty candidate list; ties go to the
    lexicographically first dc node id."""
    if not candidates:
        raise ValueError("cannot select from an empty candidate list")
    if policy is Policy.RANDOM:
        return candidates[rng.randrange(len(candidates))].dc_node
    if policy is Policy.DATA_CENTRE_OPT:
        return max(candidates, key=lambda c: c.slots_free_after).dc_node
    if policy is Policy.PATH_UTIL_OPT:
        return min(candidates, key=lambda c: c.worst_util_after).dc_node
    if policy is Policy.LATENCY_OPT:
        return min(candidates, key=lambda c: c.avg_latency_ms).dc_node
    raise ValueError(f"unknown policy {policy!r}")


def _dominant_reason(topo: Topology, failures: dict[str, str]) -> str:
    if not topo.dc_ids:
        return REASON_NO_CANDIDATES
    if all(reason == REASON_DC_CAPACITY for reason in failures.values()):
        return REASON_DC_CAPACITY
    if any(reason == REASON_BANDWIDTH for reason in failures.values()):
        return REASON_BANDWIDTH
    return REASON_LATENCY


def place(
    topo: Topology,
    inventory: DcInventory,
    workload: WorkloadSpec,
    policy: Policy,
    threshold: float,
    rng: random.Random,
    strict_headroom: bool = True,
) -> PlacementOutcome:
    """Admission-check all DCs, pick one by policy, and commit the slot
    allocation plus one bandwidth reservation per WAN leg. Infeasible
    outcomes leave topology and inventory untouched."""
    candidates, failures = _evaluate_candidates(
        topo, inventory, workload, threshold, strict_headroom
    )
    if not candidates:
        return Infeasible(_dominant_reason(topo, failures))
    chosen = select_by_policy(policy, candidates, rng)
    slots_needed = slots_required(
        workload.vcpus, workload.memory_gb, workload.storage_gb, inventory.quantum
    )
    allocation = resources.allocate(inventory, chosen, slots_needed)
    reservations = tuple(
        net.reserve(topo, net.compute_paths(topo, pop, chosen), workload.demand_bw_bps)
        for pop in workload.access_pops
        if pop != chosen
    )
    return Placed(chosen, allocation, reservations)
