"""Energy-aware profit-rate scheduling on heterogeneous machine types."""

from .errors import (
    BudgetExceededError,
    CandidateInfeasibleError,
    DegenerateInstanceError,
    EapmsError,
    InstanceParseError,
    InvalidInstanceError,
    InvalidSpecError,
    MalformedGraphError,
    SweepError,
)
from .model import (
    Instance,
    MachineLevelSchedule,
    SolutionReport,
    TypeLevelSchedule,
    e_min,
    energy,
    finish_time,
    makespan,
    profit_rate,
)
from .oracle import OracleBudget, exact_opt
from .solver import SweepConfig, tms_solve, ttb_solve

__version__ = "0.1.0"
