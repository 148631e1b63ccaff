"""placesim: joint WAN + data-centre workload placement simulator.

A placement controller admits workloads against DC slot capacity, link
utilization and path latency, then selects among feasible DCs with one of
four heuristic policies or a tabular Q-learning agent trained to switch
between them. The harness reproduces seeded train/evaluate/compare
experiments on synthetic topologies.
"""
from .controller import (
    CandidateEvaluation,
    Infeasible,
    Placed,
    PlacementOutcome,
    Policy,
    dc_admission,
    feasible_sites,
    latency_admission,
    network_admission,
    place,
    select_by_policy,
)
from .harness import (
    ALGORITHMS,
    ComparisonReport,
    ExperimentConfig,
    IterationResult,
    run_comparison,
    run_iteration,
    run_training,
)
from .qlearning import (
    FAILURE_REWARD,
    Hyperparams,
    QTable,
    act_greedy,
    encode_state,
    load_qtable,
    q_update,
    reward,
    save_qtable,
    select_action,
    train,
)
from .resources import (
    DEFAULT_QUANTUM,
    DcInventory,
    SlotQuantum,
    reset_inventory,
    slots_free_fraction,
    slots_required,
)
from .topology import (
    Link,
    Node,
    PathSet,
    Topology,
    compute_paths,
    generate_topology,
    load_topology,
    max_path_utilization,
    reserve,
    reset_network,
    save_topology,
)
from .workload import (
    WorkloadSpec,
    WorkloadStream,
    generate_stream,
    generate_workload,
    load_stream,
    save_stream,
)

__version__ = "0.1.0"
