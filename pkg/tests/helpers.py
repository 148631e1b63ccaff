"""Shared builders for hand-made test topologies."""
from __future__ import annotations

import json
import random

from placesim.topology import Topology, load_topology


def build(nodes, links) -> Topology:
    """nodes: [(id, role[, slots])], links: [(a, b, capacity_bps, latency_ms)]."""
    node_entries = []
    for entry in nodes:
        node = {"id": entry[0], "role": entry[1]}
        if len(entry) > 2:
            node["slots"] = entry[2]
        node_entries.append(node)
    link_entries = [
        {"a": a, "b": b, "capacity_bps": cap, "latency_ms": lat}
        for a, b, cap, lat in links
    ]
    return load_topology(json.dumps({"nodes": node_entries, "links": link_entries}))


def line_topology(cap=10_000_000_000) -> Topology:
    """a -- b -- c with unit latencies; c hosts the only DC."""
    return build(
        [("a", "access"), ("b", "transit"), ("c", "dc", 10)],
        [("a", "b", cap, 1.0), ("b", "c", cap, 1.0)],
    )


def square_topology(ab_latency=1.0, cap=10_000_000_000) -> Topology:
    """Cycle a-b-c-d-a; two equal-cost a->c paths when ab_latency == 1."""
    return build(
        [("a", "access"), ("b", "transit"), ("c", "dc", 10), ("d", "transit")],
        [
            ("a", "b", cap, ab_latency),
            ("b", "c", cap, 1.0),
            ("c", "d", cap, 1.0),
            ("a", "d", cap, 1.0),
        ],
    )


def two_dc_topology(slots1=10, slots2=10, cap=10_000_000_000) -> Topology:
    """One access POP with a distinct path to each of two DCs."""
    return build(
        [("a", "access"), ("d1", "dc", slots1), ("d2", "dc", slots2), ("t", "transit")],
        [
            ("a", "d1", cap, 2.0),
            ("a", "t", cap, 1.0),
            ("t", "d2", cap, 3.0),
            ("d1", "d2", cap, 5.0),
        ],
    )


def random_topology(rng: random.Random, max_nodes=6, dc_slots=10) -> Topology:
    """Small random connected topology for oracle comparisons."""
    n = rng.randint(2, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    edges = set()
    order = ids[:]
    rng.shuffle(order)
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            if (a, b) not in edges and rng.random() < 0.4:
                edges.add((a, b))
    dc_count = rng.randint(1, min(2, n))
    dcs = set(rng.sample(ids, dc_count))
    nodes = [(i, "dc", dc_slots) if i in dcs else (i, "access") for i in ids]
    links = [
        (a, b, rng.choice([1_000_000_000, 10_000_000_000]), round(rng.uniform(1, 10), 3))
        for a, b in sorted(edges)
    ]
    return build(nodes, links)
