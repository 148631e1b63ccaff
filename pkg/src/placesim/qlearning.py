"""Tabular Q-learning over discretized network/DC state, choosing one of the
three optimisation policies per workload.

State: one max-path-utilization bin per DC (worst over that DC's paths to
every access POP), one free-slot bin per DC, and by default the incoming
workload's demand class and slot count. Only visited states are materialized.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass

from .controller import Infeasible, Placed, PlacementOutcome, Policy, RL_ACTION_POLICIES, place
from .resources import DcInventory, reset_inventory, slots_free_fraction, slots_required
from .topology import Link, Topology, compute_paths, reset_network
from .workload import WorkloadSpec, demand_class_index, generate_workload

FAILURE_REWARD = -1000.0
N_ACTIONS = len(RL_ACTION_POLICIES)
REWARD_WINDOW = 1000


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.05
    gamma: float = 0.9
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    # None resolves to half the training workload count.
    epsilon_decay_steps: int | None = None
    util_bins: int = 8
    slot_bins: int = 4
    include_workload_features: bool = True
    reward_scope: str = "global"

    def __post_init__(self) -> None:
        if not (0 < self.alpha <= 1):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (0 <= self.gamma < 1):
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not (0 <= eps <= 1):
                raise ValueError(f"epsilon values must be in [0, 1], got {eps}")
        if self.util_bins < 1 or self.slot_bins < 1:
            raise ValueError("bin counts must be positive")
        if self.reward_scope not in ("global", "workload"):
            raise ValueError(f"reward_scope must be 'global' or 'workload', got {self.reward_scope!r}")


@dataclass(frozen=True)
class RewardWindow:
    window_index: int
    total_reward: float
    placements_failed: int


class QTable:
    """Sparse map from state tuples to one value per action; unvisited states
    read as all zeros without being materialized."""

    def __init__(self, hyperparams: Hyperparams, dc_order: tuple[str, ...]):
        self.hyperparams = hyperparams
        self.dc_order = tuple(dc_order)
        self.values: dict[tuple[int, ...], list[float]] = {}
        self.visits: dict[tuple[int, ...], int] = {}

    def lookup(self, state: tuple[int, ...]) -> tuple[float, ...]:
        row = self.values.get(state)
        return tuple(row) if row is not None else (0.0,) * N_ACTIONS

    def best_action(self, state: tuple[int, ...]) -> int:
        row = self.values.get(state)
        if row is None:
            return 0
        best = 0
        for i in range(1, N_ACTIONS):
            if row[i] > row[best]:
                best = i
        return best

    def check_compatible(self, topo: Topology) -> None:
        if tuple(topo.dc_ids) != self.dc_order:
            raise ValueError(
                f"q-table was built for DCs {list(self.dc_order)}, "
                f"topology has {list(topo.dc_ids)}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTable):
            return NotImplemented
        return (
            self.hyperparams == other.hyperparams
            and self.dc_order == other.dc_order
            and self.values == other.values
            and self.visits == other.visits
        )


def _tracking(topo: Topology) -> tuple[dict[str, tuple[Link, ...]], tuple[Link, ...]]:
    """Per-DC link sets covering that DC's shortest paths to every access POP,
    plus their union; cached on the topology."""
    cache = getattr(topo, "_rl_tracking", None)
    if cache is not None and cache[0] == topo.ecmp:
        return cache[1], cache[2]
    per_dc: dict[str, tuple[Link, ...]] = {}
    union: dict[int, Link] = {}
    for dc in topo.dc_ids:
        links: dict[int, Link] = {}
        for pop in topo.access_ids:
            if pop == dc:
                continue
            for link in compute_paths(topo, dc, pop).all_links:
                links[id(link)] = link
                union[id(link)] = link
        per_dc[dc] = tuple(links.values())
    result = (topo.ecmp, per_dc, tuple(union.values()))
    topo._rl_tracking = result
    return per_dc, result[2]


def _bin(value: float, bins: int) -> int:
    index = int(value * bins)
    return bins - 1 if index >= bins else index


def encode_state(
    topo: Topology,
    inventory: DcInventory,
    workload: WorkloadSpec | None,
    hp: Hyperparams,
) -> tuple[int, ...]:
    """Discretize the environment (and optionally the incoming workload) into
    a fixed-length integer tuple."""
    per_dc, _ = _tracking(topo)
    key: list[int] = []
    for dc in topo.dc_ids:
        worst = 0.0
        for link in per_dc[dc]:
            util = link.reserved_bps / link.capacity_bps
            if util > worst:
                worst = util
        key.append(_bin(worst, hp.util_bins))
    for dc in topo.dc_ids:
        cluster = inventory.clusters[dc]
        key.append(_bin(cluster.free_slots / cluster.total_slots, hp.slot_bins))
    if hp.include_workload_features and workload is not None:
        key.append(demand_class_index(workload.demand_bw_bps))
        key.append(
            slots_required(
                workload.vcpus, workload.memory_gb, workload.storage_gb, inventory.quantum
            )
        )
    return tuple(key)


def _clip01(value: float) -> float:
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def reward(
    outcome: PlacementOutcome,
    topo: Topology,
    inventory: DcInventory,
    workload: WorkloadSpec | None = None,
    scope: str = "global",
) -> float:
    """Post-placement reward: headroom left on the worst path plus the
    free-slot fraction, each clipped to [0, 1]; a failed placement is worth
    exactly -1000."""
    if isinstance(outcome, Infeasible):
        return FAILURE_REWARD
    if scope == "workload":
        if workload is None:
            raise ValueError("workload-scoped reward needs the placed workload")
        worst = 0.0
        for pop in workload.access_pops:
            if pop == outcome.dc_node:
                continue
            for link in compute_paths(topo, pop, outcome.dc_node).all_links:
                util = link.reserved_bps / link.capacity_bps
                if util > worst:
                    worst = util
    else:
        _, tracked = _tracking(topo)
        worst = 0.0
        for link in tracked:
            util = link.reserved_bps / link.capacity_bps
            if util > worst:
                worst = util
    return _clip01(1.0 - worst) + _clip01(slots_free_fraction(inventory))


def select_action(
    qtable: QTable, state: tuple[int, ...], epsilon: float, rng: random.Random
) -> int:
    """Epsilon-greedy over the three actions; greedy ties break low."""
    if not (0 <= epsilon <= 1):
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return rng.randrange(N_ACTIONS)
    return qtable.best_action(state)


def q_update(
    qtable: QTable,
    state: tuple[int, ...],
    action: int,
    reward_value: float,
    next_state: tuple[int, ...] | None,
    terminal: bool,
) -> None:
    """One-step update of a single (state, action) cell; terminal transitions
    bootstrap from zero."""
    if not (0 <= action < N_ACTIONS):
        raise ValueError(f"action index {action} out of range")
    hp = qtable.hyperparams
    row = qtable.values.get(state)
    if row is None:
        row = [0.0] * N_ACTIONS
        qtable.values[state] = row
    if terminal:
        target = reward_value
    else:
        next_row = qtable.values.get(next_state)
        best_next = max(next_row) if next_row is not None else 0.0
        target = reward_value + hp.gamma * best_next
    row[action] += hp.alpha * (target - row[action])
    qtable.visits[state] = qtable.visits.get(state, 0) + 1


def _epsilon_at(step: int, decay_steps: int, hp: Hyperparams) -> float:
    if decay_steps <= 0:
        return hp.epsilon_end
    frac = min(1.0, step / decay_steps)
    return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac


def train(
    topo: Topology,
    inventory: DcInventory,
    workload_count: int,
    hyperparams: Hyperparams,
    seed: int,
    threshold: float = 0.9,
) -> tuple[QTable, list[RewardWindow]]:
    """Run the training loop over a seeded workload stream.

    Each step encodes the state for the incoming workload, picks a policy
    epsilon-greedily, attempts the placement and updates the table with the
    resulting reward. A failed placement is terminal: the network and the
    inventory reset and training continues on the fresh environment. The
    returned log holds one window per 1000 attempts.
    """
    if workload_count < 1:
        raise ValueError("workload_count must be >= 1")
    hp = hyperparams
    decay_steps = (
        hp.epsilon_decay_steps
        if hp.epsilon_decay_steps is not None
        else max(1, workload_count // 2)
    )
    rng = random.Random(seed)
    qtable = QTable(hp, topo.dc_ids)
    reset_network(topo)
    reset_inventory(inventory)

    windows: list[RewardWindow] = []
    window_total = 0.0
    window_failures = 0
    current = generate_workload(rng, topo)
    for step in range(workload_count):
        state = encode_state(topo, inventory, current, hp)
        action = select_action(qtable, state, _epsilon_at(step, decay_steps, hp), rng)
        outcome = place(topo, inventory, current, RL_ACTION_POLICIES[action], threshold, rng)
        r = reward(outcome, topo, inventory, workload=current, scope=hp.reward_scope)
        if isinstance(outcome, Infeasible):
            q_update(qtable, state, action, r, None, terminal=True)
            reset_network(topo)
            reset_inventory(inventory)
            current = generate_workload(rng, topo)
            window_failures += 1
        else:
            upcoming = generate_workload(rng, topo)
            next_state = encode_state(topo, inventory, upcoming, hp)
            q_update(qtable, state, action, r, next_state, terminal=False)
            current = upcoming
        window_total += r
        if (step + 1) % REWARD_WINDOW == 0 or step + 1 == workload_count:
            windows.append(RewardWindow(len(windows), window_total, window_failures))
            window_total = 0.0
            window_failures = 0
    return qtable, windows


def act_greedy(
    qtable: QTable,
    state: tuple[int, ...],
    fallback: Policy = Policy.PATH_UTIL_OPT,
) -> Policy:
    """Greedy policy choice; states never seen in training fall back to the
    configured default."""
    if state not in qtable.values:
        return fallback
    return RL_ACTION_POLICIES[qtable.best_action(state)]


def save_qtable(qtable: QTable) -> str:
    """Canonical JSON: header with config and dc order, entries sorted by
    state tuple."""
    entries = [
        [list(state), qtable.values[state], qtable.visits.get(state, 0)]
        for state in sorted(qtable.values)
    ]
    doc = {
        "hyperparams": asdict(qtable.hyperparams),
        "dc_order": list(qtable.dc_order),
        "entries": entries,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_qtable(
    file_contents: str,
    topo: Topology | None = None,
    expected: Hyperparams | None = None,
) -> QTable:
    """Inverse of save_qtable. Rejects a table whose configuration differs
    from `expected` or whose DC set does not match `topo`."""
    try:
        doc = json.loads(file_contents)
    except json.JSONDecodeError as exc:
        raise ValueError(f"q-table file is not valid JSON: {exc}") from exc
    try:
        hp = Hyperparams(**doc["hyperparams"])
        dc_order = tuple(doc["dc_order"])
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"q-table file is missing required fields: {exc}") from exc
    if expected is not None and hp != expected:
        raise ValueError(
            f"q-table configuration {hp} does not match the expected {expected}"
        )
    qtable = QTable(hp, dc_order)
    if topo is not None:
        qtable.check_compatible(topo)
    for state, values, visits in entries:
        if len(values) != N_ACTIONS:
            raise ValueError(f"q-table entry for state {state} has {len(values)} values")
        key = tuple(state)
        qtable.values[key] = [float(v) for v in values]
        qtable.visits[key] = int(visits)
    return qtable
