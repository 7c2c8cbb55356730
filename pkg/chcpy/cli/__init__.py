from ..core.system_helpers import register_cleanup
from .context import ProgramContext
from .main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, main, run, run_verify, verify_main
from .repl import Session, run_session
from .report import GoalOutcome, format_summary, write_report
from .verify import PlanEntry, PlanRunner, VerifyPlan, plan_from_dict, read_plan, run_plan, write_plan

register_cleanup()
