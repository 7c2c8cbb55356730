from .rules import (Definition, DefinitionException, FoldException, LemmaException, LocalityException,
                    TransformationException, add_total_cata, apply_lemma, cleanup, define, fold, remove_true_conjunct,
                    unfold)
from .workspace import Workspace, head_variables
from .script import (AddTotalCata, ApplyLemma, Auto, Cleanup, Command, Commit, Define, Fold, RemoveTrueConjunct,
                     ScriptException, Unfold, format_script, parse_script, read_script, write_script)
from .strategy import (Derivation, DerivationResult, ResultReport, StrategyLimitException, StrategyLimits, auto_define,
                       check_result, run_rcata)
