from ..core.system_helpers import register_cleanup
from .client import (SOLVER_ENV, SolverConfig, SolverException, SolverLaunchException, solve, solve_constraint)
from .models import (ClauseCheck, Interpretation, Model, ModelException, ModelReport, INVALID, VALID, check_clause,
                     check_model)

register_cleanup()
