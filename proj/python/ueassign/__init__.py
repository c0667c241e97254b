"""Traffic user-equilibrium assignment with Physarum dynamics and Frank-Wolfe."""

from ._core import (
    ConditioningError,
    DemandTable,
    DisconnectedError,
    DomainError,
    DuplicateLinkError,
    Error,
    FrankWolfeConfig,
    InfeasibleError,
    Link,
    Mode,
    Network,
    ParseError,
    Problem,
    SolutionReport,
    SolverConfig,
    beckmann_gradient,
    beckmann_objective,
    error_metrics,
    crossed_pairs,
    frank_wolfe,
    load_problem,
    relative_gap,
    shortest_path_flux,
    sioux_falls,
    sioux_falls_reference_flows,
    solve_ue,
    travel_times,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
