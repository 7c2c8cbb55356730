from .model import (Atom, BOOL, BoolBind, BoolConst, BoolEq, Clause, ClauseSet, Cons, DEFINITION, DERIVED, GOAL, INT,
                    INT_LIST, IllSortedSubstitutionException, IntConst, LinExpr, LinRel, ListSort, Nil, PROGRAM, Var,
                    apply_subst, canonical_names, check_well_sorted, free_vars, is_list_free, rename_apart)
from .constraints import (SAT, UNSAT, UNKNOWN, EngineConfig, entails, equivalent, find_model, is_sat, project,
                          simplify)
from .syntax import (ChcSyntaxException, SortConflictException, SourceSpan, parse_atom, parse_chc, parse_clause,
                     print_chc, read_chc, write_chc)
from .smtlib import SolverVerdict, emit_smtlib_horn, parse_solver_output
from .system_helpers import LOG_LEVEL, HANDLERS, get_logger, set_log_level
