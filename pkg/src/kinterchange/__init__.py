"""k-interchange neighborhoods, operational digraphs and adaptive local search over permutations."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .perm import (  # noqa: E402
    DEFAULT_ENUMERATION_CAP,
    NeighborPartition,
    Permutation,
    WindowMove,
    apply_move,
    classify_neighbors,
    inversion_count,
    k_neighborhood,
    lex_rank,
    lex_unrank,
    make_permutation,
    move_between,
    parse_permutation,
)
from .objectives import (  # noqa: E402
    Flowshop2Objective,
    FlowshopJobs,
    InversionObjective,
    Objective,
    SearchDistanceObjective,
    TableObjective,
    WeightedCompletionObjective,
    WeightedJobs,
    build_search_distance_objective,
    evaluate,
    flowshop2_makespan,
    global_optima,
    load_objective,
    table1_objective,
    weighted_completion_value,
)
from .landscape import (  # noqa: E402
    LandscapeReport,
    LevelStructure,
    OperationalDigraph,
    analyze,
    build_digraph,
    compute_levels,
    enumerate_local_optima,
    export_dot,
    reachability_to_optima,
    verify_nesting,
)
from .search import (  # noqa: E402
    MultiStartResult,
    SearchTrajectory,
    StrategyConfig,
    is_local_optimum,
    run_multistart,
    run_trajectory,
    search_step,
)
from .control import (  # noqa: E402
    ProbeReport,
    RunRecord,
    RunRepository,
    execute_plan,
    probe_instance,
    select_strategy,
    verify_paper,
)
