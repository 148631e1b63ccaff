"""Network graph model: nodes, capacity/latency links, equal-cost shortest-path
routing and bandwidth-reservation accounting.

A node with the "dc" role is a POP that also hosts a cluster, so it counts as
an access location too; "transit" nodes neither originate nor host workloads.
"""
from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field

ROLES = ("access", "dc", "transit")

# Latency is kept internally in integer nanoseconds so equal-cost comparison
# and tie-breaking are exact (float sums would depend on accumulation order).
_NS_PER_MS = 1_000_000


@dataclass(frozen=True)
class Node:
    id: str
    role: str
    slots: int | None = None

    @property
    def is_access(self) -> bool:
        return self.role in ("access", "dc")

    @property
    def is_dc(self) -> bool:
        return self.role == "dc"


class Link:
    """Undirected link with a single reservation counter (demands are placed
    symmetrically, so per-direction accounting would add state without
    changing outcomes)."""

    __slots__ = ("a", "b", "capacity_bps", "latency_ms", "latency_ns", "reserved_bps")

    def __init__(self, a: str, b: str, capacity_bps: int, latency_ms: float):
        if a > b:
            a, b = b, a
        self.a = a
        self.b = b
        self.capacity_bps = capacity_bps
        self.latency_ms = latency_ms
        self.latency_ns = round(latency_ms * _NS_PER_MS)
        self.reserved_bps = 0

    def utilization(self) -> float:
        return self.reserved_bps / self.capacity_bps

    def __repr__(self) -> str:
        return f"Link({self.a}--{self.b}, {self.capacity_bps} bps, {self.latency_ms} ms)"


@dataclass(frozen=True)
class PathSet:
    """All equal-cost shortest paths between one node pair, in lexicographic
    order, with the common latency they share."""

    source: str
    destination: str
    paths: tuple[tuple[str, ...], ...]
    latency_ms: float
    path_links: tuple[tuple[Link, ...], ...] = field(compare=False, repr=False)
    all_links: tuple[Link, ...] = field(compare=False, repr=False)


class Reservation:
    """Handle recording the exact per-link amounts a reserve() call added."""

    __slots__ = ("entries", "epoch", "released")

    def __init__(self, entries: tuple[tuple[Link, int], ...], epoch: int):
        self.entries = entries
        self.epoch = epoch
        self.released = False


class Topology:
    """Connected undirected graph, owned by one simulation run at a time."""

    def __init__(self, nodes: list[Node], links: list[Link], ecmp: bool = True):
        self.nodes: dict[str, Node] = {n.id: n for n in nodes}
        self.links: list[Link] = links
        self.ecmp = ecmp
        self.epoch = 0
        self._link_by_pair: dict[tuple[str, str], Link] = {
            (l.a, l.b): l for l in links
        }
        self._adjacency: dict[str, list[tuple[str, Link]]] = {n.id: [] for n in nodes}
        for l in links:
            self._adjacency[l.a].append((l.b, l))
            self._adjacency[l.b].append((l.a, l))
        self.access_ids: tuple[str, ...] = tuple(
            sorted(n.id for n in nodes if n.is_access)
        )
        self.dc_ids: tuple[str, ...] = tuple(sorted(n.id for n in nodes if n.is_dc))
        self._path_cache: dict[tuple[str, str, bool], PathSet] = {}

    def link_between(self, u: str, v: str) -> Link | None:
        if u > v:
            u, v = v, u
        return self._link_by_pair.get((u, v))

    def neighbors(self, node_id: str) -> list[tuple[str, Link]]:
        return self._adjacency[node_id]


def _validate_graph(nodes: list[Node], links: list[Link]) -> None:
    if not any(n.is_access for n in nodes):
        raise ValueError("topology has no access-capable node")
    if not any(n.is_dc for n in nodes):
        raise ValueError("topology has no dc node")
    # connectivity check (BFS from an arbitrary node)
    adjacency: dict[str, list[str]] = {n.id: [] for n in nodes}
    for l in links:
        adjacency[l.a].append(l.b)
        adjacency[l.b].append(l.a)
    start = nodes[0].id
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    if len(seen) != len(nodes):
        missing = sorted(n.id for n in nodes if n.id not in seen)
        raise ValueError(f"topology is not connected: node '{missing[0]}' is unreachable")


def load_topology(file_contents: str, ecmp: bool = True) -> Topology:
    """Parse and validate a topology file; all reservations start at zero."""
    try:
        doc = json.loads(file_contents)
    except json.JSONDecodeError as exc:
        raise ValueError(f"topology file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc or "links" not in doc:
        raise ValueError("topology file must be an object with 'nodes' and 'links'")

    nodes: list[Node] = []
    seen_ids: set[str] = set()
    for entry in doc["nodes"]:
        node_id = entry.get("id")
        role = entry.get("role")
        if not isinstance(node_id, str) or not node_id:
            raise ValueError(f"node entry {entry!r} has no valid 'id'")
        if node_id in seen_ids:
            raise ValueError(f"duplicate node id '{node_id}'")
        seen_ids.add(node_id)
        if role not in ROLES:
            raise ValueError(f"node '{node_id}' has invalid role {role!r}")
        slots = entry.get("slots")
        if role == "dc":
            if not isinstance(slots, int) or slots < 1:
                raise ValueError(f"dc node '{node_id}' needs a positive integer 'slots'")
        elif slots is not None:
            raise ValueError(f"non-dc node '{node_id}' must not carry 'slots'")
        nodes.append(Node(node_id, role, slots))

    links: list[Link] = []
    seen_pairs: set[tuple[str, str]] = set()
    for entry in doc["links"]:
        a, b = entry.get("a"), entry.get("b")
        for end in (a, b):
            if end not in seen_ids:
                raise ValueError(f"link endpoint '{end}' is not a declared node")
        if a == b:
            raise ValueError(f"self-loop on node '{a}'")
        pair = (min(a, b), max(a, b))
        if pair in seen_pairs:
            raise ValueError(f"duplicate link between '{pair[0]}' and '{pair[1]}'")
        seen_pairs.add(pair)
        capacity = entry.get("capacity_bps")
        if not isinstance(capacity, int) or capacity <= 0:
            raise ValueError(
                f"link {pair[0]}--{pair[1]} has nonpositive capacity {capacity!r}"
            )
        latency = entry.get("latency_ms")
        if not isinstance(latency, (int, float)) or latency < 0:
            raise ValueError(f"link {pair[0]}--{pair[1]} has invalid latency {latency!r}")
        links.append(Link(a, b, capacity, float(latency)))

    _validate_graph(nodes, links)
    return Topology(nodes, links, ecmp=ecmp)


def save_topology(topology: Topology) -> str:
    """Canonical serialization: nodes sorted by id, links by (a, b)."""
    nodes = []
    for node in sorted(topology.nodes.values(), key=lambda n: n.id):
        entry: dict = {"id": node.id, "role": node.role}
        if node.slots is not None:
            entry["slots"] = node.slots
        nodes.append(entry)
    links = [
        {"a": l.a, "b": l.b, "capacity_bps": l.capacity_bps, "latency_ms": l.latency_ms}
        for l in sorted(topology.links, key=lambda l: (l.a, l.b))
    ]
    return json.dumps({"nodes": nodes, "links": links}, indent=2, sort_keys=True) + "\n"


def generate_topology(
    pop_count: int,
    dc_count: int,
    link_capacity_bps: int,
    latency_range_ms: tuple[float, float],
    avg_degree: float,
    seed: int,
    slots_per_dc: int = 500,
) -> Topology:
    """Build a random connected topology of access POPs, dc_count of which
    also host a DC cluster.

    Wiring is a random spanning tree plus extra edges up to the target average
    degree, so connectivity holds by construction. Identical arguments produce
    an identical topology.
    """
    if pop_count < 1 or not (1 <= dc_count <= pop_count):
        raise ValueError(f"need 1 <= dc_count <= pop_count, got {dc_count}/{pop_count}")
    if avg_degree < 2:
        raise ValueError(f"avg_degree must be >= 2, got {avg_degree}")
    if link_capacity_bps <= 0:
        raise ValueError("link capacity must be positive")
    lat_min, lat_max = latency_range_ms
    if lat_min < 0 or lat_max < lat_min:
        raise ValueError(f"invalid latency range {latency_range_ms}")

    target_edges = round(avg_degree * pop_count / 2)
    max_edges = pop_count * (pop_count - 1) // 2
    if target_edges > max_edges:
        raise ValueError(
            f"average degree {avg_degree} infeasible for {pop_count} nodes "
            f"({target_edges} edges needed, {max_edges} possible)"
        )

    rng = random.Random(seed)
    width = len(str(pop_count))
    ids = [f"pop{i:0{width}d}" for i in range(1, pop_count + 1)]
    dc_set = set(rng.sample(ids, dc_count))

    def sample_latency() -> float:
        return round(rng.uniform(lat_min, lat_max), 3)

    order = ids[:]
    rng.shuffle(order)
    edges: list[tuple[str, str]] = []
    for i in range(1, pop_count):
        edges.append((order[i], order[rng.randrange(i)]))
    in_tree = {(min(a, b), max(a, b)) for a, b in edges}
    spare = [
        (u, v)
        for i, u in enumerate(ids)
        for v in ids[i + 1 :]
        if (u, v) not in in_tree
    ]
    rng.shuffle(spare)
    edges.extend(spare[: target_edges - len(edges)])

    links = [Link(a, b, link_capacity_bps, sample_latency()) for a, b in edges]
    nodes = [
        Node(i, "dc", slots_per_dc) if i in dc_set else Node(i, "access") for i in ids
    ]
    _validate_graph(nodes, links)
    return Topology(nodes, links)


def compute_paths(topology: Topology, src: str, dst: str) -> PathSet:
    """All minimum-latency paths between src and dst (or just the
    lexicographically first one when topology.ecmp is off)."""
    key = (src, dst, topology.ecmp)
    cached = topology._path_cache.get(key)
    if cached is not None:
        return cached
    for end in (src, dst):
        if end not in topology.nodes:
            raise ValueError(f"unknown node id '{end}'")
    if src == dst:
        raise ValueError(f"source and destination are both '{src}'")

    dist: dict[str, int] = {src: 0}
    preds: dict[str, set[str]] = {}
    heap: list[tuple[int, str]] = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, link in topology.neighbors(u):
            nd = d + link.latency_ns
            known = dist.get(v)
            if known is None or nd < known:
                dist[v] = nd
                preds[v] = {u}
                heapq.heappush(heap, (nd, v))
            elif nd == known:
                preds[v].add(u)

    paths: list[tuple[str, ...]] = []
    stack = [dst]

    def backtrack(node: str) -> None:
        if node == src:
            paths.append(tuple(reversed(stack)))
            return
        for p in preds[node]:
            stack.append(p)
            backtrack(p)
            stack.pop()

    backtrack(dst)
    paths.sort()
    if not topology.ecmp:
        paths = paths[:1]

    path_links = tuple(
        tuple(topology.link_between(p[i], p[i + 1]) for i in range(len(p) - 1))
        for p in paths
    )
    seen: set[int] = set()
    all_links: list[Link] = []
    for linkseq in path_links:
        for link in linkseq:
            if id(link) not in seen:
                seen.add(id(link))
                all_links.append(link)

    result = PathSet(
        source=src,
        destination=dst,
        paths=tuple(paths),
        latency_ms=dist[dst] / _NS_PER_MS,
        path_links=path_links,
        all_links=tuple(all_links),
    )
    topology._path_cache[key] = result
    return result


def _per_link_additions(path_set: PathSet, demand_bps: int) -> dict[Link, int]:
    """Split a demand across the path set's paths in integer bits/s.

    The remainder is spread one bit/s over the first (demand mod k) paths in
    canonical order, which keeps per-path shares nondecreasing in the demand
    (assigning the whole remainder to one path would not) while still summing
    exactly to the demand.
    """
    k = len(path_set.paths)
    base, rem = divmod(demand_bps, k)
    additions: dict[Link, int] = {}
    for i, links in enumerate(path_set.path_links):
        share = base + (1 if i < rem else 0)
        if share == 0:
            continue
        for link in links:
            additions[link] = additions.get(link, 0) + share
    return additions


def max_path_utilization(
    topology: Topology, path_set: PathSet, extra_demand_bps: int = 0
) -> float:
    """Worst link utilization across the path set after splitting
    extra_demand equally over its paths (0 extra = current utilization)."""
    if extra_demand_bps < 0:
        raise ValueError("extra demand must be >= 0")
    if extra_demand_bps == 0:
        return max(l.reserved_bps / l.capacity_bps for l in path_set.all_links)
    additions = _per_link_additions(path_set, extra_demand_bps)
    return max(
        (l.reserved_bps + additions.get(l, 0)) / l.capacity_bps
        for l in path_set.all_links
    )


def reserve(topology: Topology, path_set: PathSet, demand_bps: int) -> Reservation:
    """Commit a demand onto every link of the path set; admission is the
    caller's job, this only accounts. The handle releases exactly what was
    added."""
    if demand_bps < 0:
        raise ValueError("demand must be >= 0")
    additions = _per_link_additions(path_set, demand_bps) if demand_bps else {}
    for link, amount in additions.items():
        link.reserved_bps += amount
    return Reservation(tuple(additions.items()), topology.epoch)


def release(topology: Topology, reservation: Reservation) -> None:
    """Undo a reservation exactly; a handle is single-use and dies on reset."""
    if reservation.released:
        raise RuntimeError("reservation already released")
    if reservation.epoch != topology.epoch:
        raise RuntimeError("stale reservation handle: network was reset")
    for link, amount in reservation.entries:
        link.reserved_bps -= amount
    reservation.released = True


def reset_network(topology: Topology) -> None:
    """Zero all reservations and invalidate outstanding handles."""
    for link in topology.links:
        link.reserved_bps = 0
    topology.epoch += 1
