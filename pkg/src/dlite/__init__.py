"""Programmable virtual objects (transducer behaviours over REST-style
lifecycles) plus a tree-network simulator comparing choreographed and
orchestrated message routing."""

from .salt import (
    DEFAULT_CATALOG,
    Feature,
    Message,
    MessageKind,
    ParseError,
    Transducer,
    Transition,
    UnknownFeatureError,
    ValidationIssue,
    parse_transducer,
    print_transducer,
    validate_against_features,
)
from .vm import (
    VM,
    ChainLimitExceeded,
    Emission,
    VmArithmeticError,
    VmError,
    VmOverflowError,
    apply_logical_set,
    create_vm,
    eval_logical_test,
)
from .node import (
    Ack,
    Delivery,
    InProcessNetwork,
    NoBehaviourError,
    Node,
    NodeFaultedError,
    Rejection,
    UnknownNodeError,
    UnsupportedSensingWordError,
)
from .netsim import (
    CHOREOGRAPHY,
    ORCHESTRATION,
    LoadReport,
    NotAttachedError,
    PathStats,
    TooFewNodesError,
    TopologyParams,
    TreeTopology,
    all_pairs_stats,
    build_tree,
    dump_edge_list,
    from_parents,
    linear_chain,
    pair_length_matrix,
    path_length,
    run_load_experiment,
)
from .analysis import (
    DEFAULT_SCENARIOS,
    Scenario,
    StudyConfig,
    StudyReport,
    calibrate_radius,
    emit_csv,
    mu_choreography,
    mu_orchestration,
    run_study,
)
from .gateway import EventBuffer, EventRecord, Gateway, Registry, make_server

__version__ = "0.1.0"
