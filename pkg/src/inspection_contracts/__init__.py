"""Optimal linear contracts with random safety inspections.

Library layout:

* ``envelope``     - upper envelope of the agent-utility lines (hull duality)
* ``single_agent`` - the beta(gamma) curve, the optimal contract, statics sweeps
* ``multi_agent``  - per-agent utility curves and the budget-allocation DP
* ``scheduler``    - sequential randomized inspector assignment, exact marginals
* ``oracle``       - brute-force cross-checks for all of the above
* ``instances``    - strict JSON instance ingestion
* ``cli``          - batch front end
"""

from .envelope import (
    Action,
    UpperEnvelope,
    build_envelope,
    eval_envelope,
    invert_envelope,
)
from .errors import (
    BelowIRThreshold,
    BelowMinimumInspection,
    BelowRange,
    BudgetExceeded,
    ContractError,
    DegenerateInput,
    InfeasibleBudget,
    InfeasibleError,
    InfeasibleSafety,
    InvalidProbability,
    NonpositiveLowerBound,
    NoSafeContract,
    ValidationError,
)
from .instances import Instance, NamedAgent, load_instance, parse_instance
from .multi_agent import (
    Allocation,
    AllocationProblem,
    ContractChoice,
    UtilityCurve,
    allocate,
    best_contract_at,
    build_utility_curve,
    gap_bound,
    min_beta,
    utility_at,
)
from .oracle import brute_force_allocate, brute_force_single, check_ic_ir
from .scheduler import (
    InspectionSchedule,
    build_schedule,
    exact_marginals,
    sample_assignment,
)
from .single_agent import (
    AgentSpec,
    BetaCurve,
    BetaPiece,
    Contract,
    SingleAgentSolution,
    SweepPoint,
    agent_best_response,
    beta_at,
    build_beta_curve,
    needs_inspection,
    principal_utility,
    solve_single,
    sweep_parameter,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentSpec",
    "Allocation",
    "AllocationProblem",
    "BelowIRThreshold",
    "BelowMinimumInspection",
    "BelowRange",
    "BetaCurve",
    "BetaPiece",
    "BudgetExceeded",
    "Contract",
    "ContractChoice",
    "ContractError",
    "DegenerateInput",
    "InfeasibleBudget",
    "InfeasibleError",
    "InfeasibleSafety",
    "InspectionSchedule",
    "Instance",
    "InvalidProbability",
    "NamedAgent",
    "NonpositiveLowerBound",
    "NoSafeContract",
    "SingleAgentSolution",
    "SweepPoint",
    "UpperEnvelope",
    "UtilityCurve",
    "ValidationError",
    "agent_best_response",
    "allocate",
    "best_contract_at",
    "beta_at",
    "brute_force_allocate",
    "brute_force_single",
    "build_beta_curve",
    "build_envelope",
    "build_schedule",
    "build_utility_curve",
    "check_ic_ir",
    "eval_envelope",
    "exact_marginals",
    "gap_bound",
    "invert_envelope",
    "load_instance",
    "min_beta",
    "needs_inspection",
    "parse_instance",
    "principal_utility",
    "sample_assignment",
    "solve_single",
    "sweep_parameter",
    "utility_at",
]
