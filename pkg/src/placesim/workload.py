"""Workload model and seeded random generator, plus stream persistence.

A workload couples a DC resource triple with a set of access POPs; every
access leg carries the same demand bandwidth toward the hosting DC.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .topology import Topology

VCPU_CHOICES = (2, 4, 8)
MEMORY_GB_CHOICES = (4, 8, 16)
STORAGE_GB_CHOICES = (256, 512, 1024)
DEMAND_BW_CHOICES_BPS = (128_000_000, 256_000_000, 512_000_000)


@dataclass(frozen=True)
class WorkloadSpec:
    vcpus: int
    memory_gb: int
    storage_gb: int
    access_pops: tuple[str, ...]
    demand_bw_bps: int
    l_max_ms: float | None = None

    def __post_init__(self) -> None:
        if self.vcpus <= 0 or self.memory_gb <= 0 or self.storage_gb <= 0:
            raise ValueError(f"resource requirements must be positive: {self}")
        if not self.access_pops:
            raise ValueError("workload needs at least one access POP")
        if self.demand_bw_bps < 0:
            raise ValueError("demand bandwidth must be >= 0")
        object.__setattr__(self, "access_pops", tuple(sorted(set(self.access_pops))))


@dataclass
class WorkloadStream:
    seed: int
    workloads: list[WorkloadSpec] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.workloads)


def demand_class_index(demand_bw_bps: int) -> int:
    """Index of the nearest demand class (ties resolve downward)."""
    best = 0
    best_gap = abs(demand_bw_bps - DEMAND_BW_CHOICES_BPS[0])
    for i, choice in enumerate(DEMAND_BW_CHOICES_BPS[1:], start=1):
        gap = abs(demand_bw_bps - choice)
        if gap < best_gap:
            best, best_gap = i, gap
    return best


def generate_workload(
    rng: random.Random,
    topology: Topology,
    fixed_pop_count: int | None = None,
    l_max_ms: float | None = None,
) -> WorkloadSpec:
    """Draw one workload: uniform over each metric's value set, and a
    uniformly sized, uniformly chosen access-POP subset (or a fixed-size one
    when fixed_pop_count is given)."""
    pops = topology.access_ids
    if not pops:
        raise ValueError("topology has no access POPs")
    vcpus = rng.choice(VCPU_CHOICES)
    memory_gb = rng.choice(MEMORY_GB_CHOICES)
    storage_gb = rng.choice(STORAGE_GB_CHOICES)
    demand = rng.choice(DEMAND_BW_CHOICES_BPS)
    if fixed_pop_count is not None:
        if not (1 <= fixed_pop_count <= len(pops)):
            raise ValueError(f"fixed_pop_count {fixed_pop_count} out of range 1..{len(pops)}")
        k = fixed_pop_count
    else:
        k = rng.randint(1, len(pops))
    access = tuple(sorted(rng.sample(pops, k)))
    return WorkloadSpec(vcpus, memory_gb, storage_gb, access, demand, l_max_ms)


def generate_stream(
    seed: int,
    count: int,
    topology: Topology,
    fixed_pop_count: int | None = None,
    l_max_ms: float | None = None,
) -> WorkloadStream:
    """Deterministic stream of `count` workloads from a generator seeded with
    `seed`; content depends only on (seed, count, topology access-node set)."""
    if count < 1:
        raise ValueError("stream must contain at least one workload")
    rng = random.Random(seed)
    workloads = [
        generate_workload(rng, topology, fixed_pop_count, l_max_ms) for _ in range(count)
    ]
    return WorkloadStream(seed, workloads)


def _workload_record(w: WorkloadSpec) -> dict:
    return {
        "vcpus": w.vcpus,
        "memory_gb": w.memory_gb,
        "storage_gb": w.storage_gb,
        "access_pops": list(w.access_pops),
        "demand_bw_bps": w.demand_bw_bps,
        "l_max_ms": w.l_max_ms,
    }


def save_stream(stream: WorkloadStream) -> str:
    """Line-delimited records under a {seed, count} header line."""
    lines = [json.dumps({"count": len(stream.workloads), "seed": stream.seed}, sort_keys=True)]
    lines.extend(json.dumps(_workload_record(w), sort_keys=True) for w in stream.workloads)
    return "\n".join(lines) + "\n"


def load_stream(file_contents: str, topology: Topology | None = None) -> WorkloadStream:
    """Inverse of save_stream; validates access POPs against a topology when
    one is supplied."""
    lines = [line for line in file_contents.splitlines() if line.strip()]
    if not lines:
        raise ValueError("stream file is empty")
    try:
        header = json.loads(lines[0])
        records = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ValueError(f"stream file is not valid line-delimited JSON: {exc}") from exc
    if not isinstance(header, dict) or "seed" not in header or "count" not in header:
        raise ValueError("stream header must carry 'seed' and 'count'")
    count = header["count"]
    if not isinstance(count, int) or count < 1:
        raise ValueError(f"stream count must be a positive integer, got {count!r}")
    if count != len(records):
        raise ValueError(f"stream header says {count} workloads, file has {len(records)}")

    known = set(topology.access_ids) if topology is not None else None
    workloads = []
    for i, rec in enumerate(records, start=1):
        try:
            spec = WorkloadSpec(
                vcpus=rec["vcpus"],
                memory_gb=rec["memory_gb"],
                storage_gb=rec["storage_gb"],
                access_pops=tuple(rec["access_pops"]),
                demand_bw_bps=rec["demand_bw_bps"],
                l_max_ms=rec.get("l_max_ms"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"invalid workload record on line {i + 1}: {exc}") from exc
        if known is not None:
            for pop in spec.access_pops:
                if pop not in known:
                    raise ValueError(
                        f"workload on line {i + 1} references unknown access POP '{pop}'"
                    )
        workloads.append(spec)
    return WorkloadStream(header["seed"], workloads)
