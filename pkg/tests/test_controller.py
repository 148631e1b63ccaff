import random

import pytest

from placesim.controller import (
    CandidateEvaluation,
    Infeasible,
    Placed,
    Policy,
    dc_admission,
    feasible_sites,
    latency_admission,
    network_admission,
    place,
    select_by_policy,
)
from placesim.resources import ClusterState, DcInventory, SlotQuantum
from placesim.topology import compute_paths, reserve
from placesim.workload import WorkloadSpec, generate_workload

from helpers import line_topology, random_topology, two_dc_topology
from oracles import feasible_sites_oracle, topology_as_dicts

GBPS = 1_000_000_000
QUANTUM = SlotQuantum(2, 4, 256)


def make_env(slots1=10, slots2=10):
    topo = two_dc_topology(slots1, slots2)
    return topo, DcInventory.from_topology(topo, QUANTUM)


def test_dc_admission_keeps_one_slot_of_headroom():
    cluster = ClusterState("d", 5)
    assert dc_admission(cluster, 4) is True  # leaves exactly one free
    cluster = ClusterState("d", 4)
    assert dc_admission(cluster, 4) is False  # would leave zero
    cluster = ClusterState("d", 4)
    cluster.free_slots = 0
    assert dc_admission(cluster, 1) is False


def test_dc_admission_strict_headroom_off():
    cluster = ClusterState("d", 4)
    assert dc_admission(cluster, 4, strict_headroom=False) is True
    assert dc_admission(cluster, 5, strict_headroom=False) is False


def test_network_admission_threshold():
    topo = line_topology(cap=10 * GBPS)
    ps = compute_paths(topo, "a", "c")
    topo.link_between("a", "b").reserved_bps = 8 * GBPS
    topo.link_between("b", "c").reserved_bps = 8 * GBPS
    assert network_admission(topo, ps, 512_000_000, 0.9) is True  # 0.8512
    topo.link_between("a", "b").reserved_bps = 8_500_000_000
    assert network_admission(topo, ps, 512_000_000, 0.9) is False  # 0.9012


def test_network_admission_at_full_threshold():
    topo = line_topology(cap=10 * GBPS)
    ps = compute_paths(topo, "a", "c")
    assert network_admission(topo, ps, 10 * GBPS, 1.0) is True


def test_latency_admission():
    assert latency_admission(12.0, 10.0) is False
    assert latency_admission(10.0, 10.0) is True
    assert latency_admission(1e9, None) is True


def test_feasible_sites_empty_when_workload_too_big():
    topo, inv = make_env(slots1=2, slots2=2)
    w = WorkloadSpec(8, 16, 1024, ("a",), 128_000_000)  # needs 4 slots
    assert feasible_sites(topo, inv, w, 0.9) == []


def test_feasible_sites_empty_at_zero_threshold():
    topo, inv = make_env()
    w = WorkloadSpec(2, 4, 256, ("a",), 128_000_000)
    assert feasible_sites(topo, inv, w, 0.0) == []


def test_feasible_sites_ordered_by_dc_id():
    topo, inv = make_env()
    w = WorkloadSpec(2, 4, 256, ("a",), 128_000_000)
    sites = feasible_sites(topo, inv, w, 0.9)
    assert [c.dc_node for c in sites] == ["d1", "d2"]


def test_feasible_sites_worked_values():
    topo, inv = make_env()
    w = WorkloadSpec(8, 4, 512, ("a",), 500_000_000)  # 4 slots, one leg
    sites = feasible_sites(topo, inv, w, 0.9)
    d1, d2 = sites
    assert d1.slots_free_after == 6 and d2.slots_free_after == 6
    assert d1.worst_util_after == 0.05  # a--d1 direct
    assert d2.worst_util_after == 0.05  # a--t--d2
    assert d1.avg_latency_ms == 2.0 and d1.max_latency_ms == 2.0
    assert d2.avg_latency_ms == 4.0 and d2.max_latency_ms == 4.0


def test_feasible_sites_local_leg_is_free():
    topo, inv = make_env()
    w = WorkloadSpec(2, 4, 256, ("d1",), 512_000_000)
    sites = feasible_sites(topo, inv, w, 0.9)
    local = next(c for c in sites if c.dc_node == "d1")
    assert local.worst_util_after == 0.0
    assert local.avg_latency_ms == 0.0 and local.max_latency_ms == 0.0


def test_feasible_sites_cumulative_legs_share_links():
    # Both legs of one workload funnel into d2 through link t--d2: the second
    # leg must see the first leg's what-if load.
    topo, inv = make_env()
    w = WorkloadSpec(2, 4, 256, ("a", "d1"), 5 * GBPS)
    sites = feasible_sites(topo, inv, w, 0.9)
    d2 = next(c for c in sites if c.dc_node == "d2")
    # legs a->d2 (a-t-d2) and d1->d2 (direct): disjoint, so 0.5 each
    assert d2.worst_util_after == 0.5
    w_big = WorkloadSpec(2, 4, 256, ("a", "d1"), 9 * GBPS + 1)
    sites = feasible_sites(topo, inv, w_big, 0.9)
    assert "d2" not in [c.dc_node for c in sites]


def test_feasible_sites_matches_oracle_on_random_instances():
    rng = random.Random(31)
    matched = 0
    for _ in range(300):
        topo = random_topology(rng, max_nodes=5)
        inv = DcInventory.from_topology(topo, QUANTUM)
        for cluster in inv.clusters.values():
            cluster.free_slots = rng.randint(0, cluster.total_slots)
        w = generate_workload(rng, topo)
        threshold = rng.choice([0.5, 0.9, 1.0])
        got = feasible_sites(topo, inv, w, threshold)
        edges, capacities, reserved = topology_as_dicts(topo)
        free = {dc: c.free_slots for dc, c in inv.clusters.items()}
        expected = feasible_sites_oracle(
            edges, capacities, reserved, free, (2, 4, 256), w, threshold
        )
        assert [
            (c.dc_node, c.slots_free_after, c.worst_util_after, c.avg_latency_ms, c.max_latency_ms)
            for c in got
        ] == expected
        matched += 1
    assert matched == 300


def _candidates():
    return [
        CandidateEvaluation("DC1", 96, 0.50, 10.0, 12.0),
        CandidateEvaluation("DC2", 76, 0.30, 20.0, 25.0),
    ]


def test_select_by_policy_worked_example():
    rng = random.Random(0)
    cands = _candidates()
    assert select_by_policy(Policy.DATA_CENTRE_OPT, cands, rng) == "DC1"
    assert select_by_policy(Policy.PATH_UTIL_OPT, cands, rng) == "DC2"
    assert select_by_policy(Policy.LATENCY_OPT, cands, rng) == "DC1"


def test_select_by_policy_single_candidate():
    rng = random.Random(0)
    only = [CandidateEvaluation("DC9", 5, 0.1, 1.0, 1.0)]
    for policy in Policy:
        assert select_by_policy(policy, only, rng) == "DC9"


def test_select_by_policy_tie_break_is_lexicographic():
    rng = random.Random(0)
    cands = [
        CandidateEvaluation("DCa", 10, 0.5, 3.0, 3.0),
        CandidateEvaluation("DCb", 10, 0.5, 3.0, 3.0),
    ]
    for policy in (Policy.DATA_CENTRE_OPT, Policy.PATH_UTIL_OPT, Policy.LATENCY_OPT):
        assert select_by_policy(policy, cands, rng) == "DCa"


def test_select_by_policy_empty_list():
    with pytest.raises(ValueError):
        select_by_policy(Policy.RANDOM, [], random.Random(0))


def test_select_random_is_seeded():
    cands = _candidates()
    picks_a = [select_by_policy(Policy.RANDOM, cands, random.Random(5)) for _ in range(10)]
    picks_b = [select_by_policy(Policy.RANDOM, cands, random.Random(5)) for _ in range(10)]
    assert picks_a == picks_b


def snapshot(topo, inv):
    return (
        tuple(l.reserved_bps for l in topo.links),
        tuple(c.free_slots for c in inv.clusters.values()),
    )


def test_place_commits_exact_amounts():
    topo, inv = make_env()
    w = WorkloadSpec(8, 4, 512, ("a",), 512_000_000)  # 4 slots
    outcome = place(topo, inv, w, Policy.LATENCY_OPT, 0.9, random.Random(0))
    assert isinstance(outcome, Placed)
    assert outcome.dc_node == "d1"
    assert inv.clusters["d1"].free_slots == 6
    assert topo.link_between("a", "d1").reserved_bps == 512_000_000
    assert topo.link_between("a", "t").reserved_bps == 0
    assert len(outcome.reservations) == 1


def test_place_infeasible_leaves_state_untouched():
    topo, inv = make_env()
    reserve(topo, compute_paths(topo, "a", "d1"), 9 * GBPS)
    reserve(topo, compute_paths(topo, "a", "d2"), 9 * GBPS)
    before = snapshot(topo, inv)
    w = WorkloadSpec(2, 4, 256, ("a",), 2 * GBPS)
    outcome = place(topo, inv, w, Policy.PATH_UTIL_OPT, 0.9, random.Random(0))
    assert outcome == Infeasible("bandwidth")
    assert snapshot(topo, inv) == before


def test_place_is_deterministic():
    results = []
    for _ in range(2):
        topo, inv = make_env()
        w = WorkloadSpec(2, 4, 256, ("a",), 128_000_000)
        out = place(topo, inv, w, Policy.RANDOM, 0.9, random.Random(9))
        results.append((out.dc_node, snapshot(topo, inv)))
    assert results[0] == results[1]


def test_place_reports_dc_capacity_only_when_all_dcs_lack_slots():
    topo, inv = make_env(slots1=1, slots2=1)
    w = WorkloadSpec(8, 16, 1024, ("a",), 128_000_000)
    out = place(topo, inv, w, Policy.RANDOM, 0.9, random.Random(0))
    assert out == Infeasible("dc_capacity")


def test_place_reports_bandwidth_over_latency():
    topo, inv = make_env()
    # d1 (2.0 ms away) fails on latency, d2 on bandwidth -> bandwidth dominates
    reserve(topo, compute_paths(topo, "a", "d2"), 9 * GBPS)
    w = WorkloadSpec(2, 4, 256, ("a",), 2 * GBPS, l_max_ms=1.0)
    out = place(topo, inv, w, Policy.RANDOM, 0.9, random.Random(0))
    assert out == Infeasible("bandwidth")


def test_place_reports_latency():
    topo, inv = make_env()
    w = WorkloadSpec(2, 4, 256, ("a",), 128_000_000, l_max_ms=0.5)
    out = place(topo, inv, w, Policy.RANDOM, 0.9, random.Random(0))
    assert out == Infeasible("latency")


def test_place_atomicity_under_random_load():
    rng = random.Random(47)
    topo, inv = make_env(slots1=6, slots2=6)
    for _ in range(300):
        w = generate_workload(rng, topo)
        before = snapshot(topo, inv)
        out = place(topo, inv, w, Policy.RANDOM, 0.6, rng)
        if isinstance(out, Infeasible):
            assert snapshot(topo, inv) == before


def test_admitted_workload_with_smaller_demand_is_admitted():
    rng = random.Random(53)
    for _ in range(200):
        topo = random_topology(rng, max_nodes=5)
        inv = DcInventory.from_topology(topo, QUANTUM)
        w = generate_workload(rng, topo)
        # preload some background traffic
        ids = sorted(topo.nodes)
        for _ in range(rng.randint(0, 3)):
            u, v = rng.sample(ids, 2)
            reserve(topo, compute_paths(topo, u, v), rng.randrange(0, GBPS))
        sites = feasible_sites(topo, inv, w, 0.9)
        if not sites or w.demand_bw_bps == 0:
            continue
        smaller = WorkloadSpec(
            w.vcpus, w.memory_gb, w.storage_gb, w.access_pops,
            rng.randrange(0, w.demand_bw_bps), w.l_max_ms,
        )
        smaller_sites = feasible_sites(topo, inv, smaller, 0.9)
        assert set(c.dc_node for c in sites) <= set(c.dc_node for c in smaller_sites)
