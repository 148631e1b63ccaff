"""Data-centre capacity model in slot units, with allocation accounting.

One cluster per dc node; a slot bundles a fixed quantum of vCPU, memory and
storage, so a request maps to the max of the per-resource ceilings.
"""
from __future__ import annotations

from dataclasses import dataclass

from .topology import Topology


@dataclass(frozen=True)
class SlotQuantum:
    vcpus: int
    memory_gb: int
    storage_gb: int

    def __post_init__(self) -> None:
        if self.vcpus < 1 or self.memory_gb < 1 or self.storage_gb < 1:
            raise ValueError(f"slot quantum components must be positive: {self}")


# Sized so the smallest generated workload needs exactly 1 slot and the
# largest 4, keeping the slot axis small for the tabular agent.
DEFAULT_QUANTUM = SlotQuantum(vcpus=2, memory_gb=4, storage_gb=256)


class ClusterState:
    __slots__ = ("dc_node", "total_slots", "free_slots")

    def __init__(self, dc_node: str, total_slots: int):
        if total_slots < 1:
            raise ValueError(f"cluster '{dc_node}' needs at least 1 slot")
        self.dc_node = dc_node
        self.total_slots = total_slots
        self.free_slots = total_slots

    def __repr__(self) -> str:
        return f"ClusterState({self.dc_node}, {self.free_slots}/{self.total_slots} free)"


class Allocation:
    """Handle for an exact slot give-back."""

    __slots__ = ("dc_node", "slots", "epoch", "released")

    def __init__(self, dc_node: str, slots: int, epoch: int):
        self.dc_node = dc_node
        self.slots = slots
        self.epoch = epoch
        self.released = False


class DcInventory:
    """One ClusterState per dc node of a topology, sharing one slot quantum."""

    def __init__(self, clusters: dict[str, ClusterState], quantum: SlotQuantum):
        if not clusters:
            raise ValueError("inventory needs at least one cluster")
        self.clusters = clusters
        self.quantum = quantum
        self.epoch = 0

    @classmethod
    def from_topology(cls, topology: Topology, quantum: SlotQuantum = DEFAULT_QUANTUM) -> "DcInventory":
        clusters = {
            node_id: ClusterState(node_id, topology.nodes[node_id].slots)
            for node_id in topology.dc_ids
        }
        return cls(clusters, quantum)


def _ceil_div(value: int, quantum: int) -> int:
    return -(-value // quantum)


def slots_required(vcpus: int, memory_gb: int, storage_gb: int, quantum: SlotQuantum) -> int:
    """Slots needed to cover a resource triple: max of per-component ceilings."""
    if vcpus <= 0 or memory_gb <= 0 or storage_gb <= 0:
        raise ValueError("resource requirements must be positive")
    return max(
        _ceil_div(vcpus, quantum.vcpus),
        _ceil_div(memory_gb, quantum.memory_gb),
        _ceil_div(storage_gb, quantum.storage_gb),
    )


def slots_free_fraction(inventory: DcInventory) -> float:
    """Aggregate free-slot fraction across all clusters, in [0, 1]."""
    free = sum(c.free_slots for c in inventory.clusters.values())
    total = sum(c.total_slots for c in inventory.clusters.values())
    return free / total


def allocate(inventory: DcInventory, dc_node: str, slots: int) -> Allocation:
    """Take slots from a cluster; the caller must have run admission first,
    so shortfall here signals a harness bug."""
    cluster = inventory.clusters.get(dc_node)
    if cluster is None:
        raise ValueError(f"unknown dc node '{dc_node}'")
    if slots < 1:
        raise ValueError("allocation must be at least 1 slot")
    if cluster.free_slots < slots:
        raise RuntimeError(
            f"cluster '{dc_node}' has {cluster.free_slots} free slots, needs {slots}"
        )
    cluster.free_slots -= slots
    return Allocation(dc_node, slots, inventory.epoch)


def release(inventory: DcInventory, allocation: Allocation) -> None:
    """Return exactly the slots an allocate() took."""
    if allocation.released:
        raise RuntimeError("allocation already released")
    if allocation.epoch != inventory.epoch:
        raise RuntimeError("stale allocation handle: inventory was reset")
    inventory.clusters[allocation.dc_node].free_slots += allocation.slots
    allocation.released = True


def reset_inventory(inventory: DcInventory) -> None:
    """Restore every cluster to fully free and invalidate outstanding handles."""
    for cluster in inventory.clusters.values():
        cluster.free_slots = cluster.total_slots
    inventory.epoch += 1
