"""
The list removal strategy. Starting from a goal, it alternates definition and folding of the list parts of a clause,
unfolding of the new definitions and catamorphism replacement until no clause has list arguments. Every step is a
script command, so a run either follows a script or records the script it followed.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.constraints import EngineConfig
from ..core.matching import Subst, match_atom, match_atoms
from ..core.model import (Atom, BoolConst, Clause, ClauseSet, DEFINITION, FALSE_CONJUNCT, IntConst, Var,
                          check_well_sorted, clause_has_list, is_constructor, is_list_free, is_list_sort)
from ..core.registry import CatamorphismSpec, Lemma
from ..core.system_helpers import get_logger
from .rules import (Definition, LemmaException, STATUS_UNFOLDED, TransformationException, apply_lemma, can_fold,
                    input_positions, justifies, pattern_positions)
from .script import (AddTotalCata, ApplyLemma, Auto, Cleanup, Command, Define, FRESH, Fold, RemoveTrueConjunct,
                     ScriptException, Unfold, format_script, parse_script)
from .workspace import Workspace, head_variables

logger = get_logger(__name__)


class StrategyLimits:
    def __init__(self, max_iterations: int = 50, max_definitions: int = 20, max_lemma_rounds: int = 8,
                 max_unfolds: int = 500, max_steps: int = 200):
        """
        :param max_iterations: passes of the main loop, each one handling one clause with list arguments
        :param max_definitions: definitions introduced by the strategy
        :param max_lemma_rounds: rounds of lemma application on one clause
        :param max_unfolds: unfolding steps in total
        :param max_steps: definition and folding steps spent on one clause
        """
        if min(max_iterations, max_definitions, max_lemma_rounds, max_unfolds, max_steps) <= 0:
            raise ValueError('Strategy limits must be positive')
        self.max_iterations = max_iterations
        self.max_definitions = max_definitions
        self.max_lemma_rounds = max_lemma_rounds
        self.max_unfolds = max_unfolds
        self.max_steps = max_steps


class StrategyLimitException(Exception):
    def __init__(self, message: str, workspace: Workspace = None):
        self.message = message
        self.workspace = workspace

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class DerivationResult:
    clauses: ClauseSet
    definitions: Tuple[Clause, ...]
    trace: Tuple[Command, ...]
    iterations: int
    stuck: Optional[str] = None
    workspace: Optional[Workspace] = field(default=None, compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return self.stuck is None

    def script(self, header: str = None) -> str:
        return format_script(self.trace, header)


@dataclass
class ResultReport:
    ok: bool
    violations: List[str] = field(default_factory=list)


def check_result(cs: ClauseSet) -> ResultReport:
    """
    Checks that a transformed clause set is ready for a solver over integers and booleans.
    """
    violations = []
    if not cs.goals():
        violations.append('no goal clause')
    for c in cs:
        if clause_has_list(c):
            violations.append('list arguments in {}'.format(c))
    if not violations and not is_list_free(cs):
        violations.append('list sorts in the predicate signatures')
    violations.extend(check_well_sorted(cs))
    return ResultReport(not violations, violations)


def list_blocks(c: Clause) -> List[List[int]]:
    """
    Groups the body atoms with list arguments into blocks connected by shared list variables.
    :return: 0-based body positions of each block, blocks ordered by their first atom
    """
    members = [j for j, a in enumerate(c.body) if a.has_list()]
    lists = {j: {v.name for v in c.body[j].variables() if is_list_sort(v.sort)} for j in members}
    blocks, seen = [], set()
    for j in members:
        if j in seen:
            continue
        block, frontier = {j}, [j]
        while frontier:
            k = frontier.pop()
            for m in members:
                if m not in block and lists[k] & lists[m]:
                    block.add(m)
                    frontier.append(m)
        seen |= block
        blocks.append(sorted(block))
    return blocks


def _term_text(t) -> str:
    return str(t) if isinstance(t, (Var, IntConst, BoolConst)) else FRESH


def _cata_matches(patterns: Sequence[Atom], c: Clause, allowed: Sequence[int], s: Subst,
                  matched: Tuple[int, ...] = (), missing: Tuple[Atom, ...] = ()):
    """
    Enumerates matches of catamorphism atoms into the body positions allowed. An atom may also be left unmatched,
    it is then reported as missing; matches come before misses.
    :return: triples of (substitution, matched positions, missing atoms)
    """
    if not patterns:
        yield s, matched, missing
        return
    for j in allowed:
        if j not in matched:
            extended = match_atom(patterns[0], c.body[j], s)
            if extended is not None:
                yield from _cata_matches(patterns[1:], c, allowed, extended, matched + (j,), missing)
    yield from _cata_matches(patterns[1:], c, allowed, s, matched, missing + (patterns[0],))


def _total_cata(c: Clause, label: str, missing: Atom, s: Subst,
                catamorphisms: Mapping[str, CatamorphismSpec]) -> Optional[AddTotalCata]:
    spec = catamorphisms[missing.pred]
    list_arg = missing.args[spec.list_position]
    list_arg = s.get(list_arg.name) if isinstance(list_arg, Var) else None
    if not isinstance(list_arg, Var):
        return None
    params = []
    for position in spec.params:
        arg = missing.args[position]
        if isinstance(arg, Var) and arg.name in s:
            arg = s[arg.name]
        elif isinstance(arg, Var):
            arg = next((a.args[position] for a in c.body if a.pred == missing.pred), None)
        params.append(_term_text(arg))
    return AddTotalCata(label, missing.pred, list_arg.name, tuple(params))


def _covering(ws: Workspace, label: str, block: Sequence[int], d: Definition, weak: bool) -> Optional[Command]:
    """
    Plans a fold of the clause with d inside block. The non-catamorphism atoms of d must match those of the block,
    all of them for a strict fold, a proper part of them for a weak one. Each catamorphism atom of d must match an
    atom of the block; a missing one is planned as a totality-based insertion first. A strict fold covers every atom
    of the block, so a definition made of catamorphisms only is reused for any block it covers up to renaming and
    instantiation of its head variables.
    :return: a Fold, an AddTotalCata that makes the fold possible, or None
    """
    c = ws.clause(label)
    catamorphisms = ws.catamorphisms
    d_plain = [a for a in d.clause.body if a.pred not in catamorphisms]
    d_cata = [a for a in d.clause.body if a.pred in catamorphisms]
    plain = [j for j in block if c.body[j].pred not in catamorphisms]
    catas = [j for j in block if c.body[j].pred in catamorphisms]
    if weak and (not d_plain or len(d_plain) >= len(plain)):
        return None
    if not weak and (len(d_plain) != len(plain) or len(d_cata) < len(catas)):
        return None
    best = None
    for s, used in match_atoms(d_plain, c.body, {}, plain):
        for t, matched, missing in _cata_matches(d_cata, c, catas, s):
            if not (used or matched) or (not weak and len(matched) != len(catas)):
                continue
            if not missing:
                return Fold(label, d.name, tuple(sorted(j + 1 for j in used + matched)), weak)
            if best is None or len(missing) < best[0]:
                plans = [_total_cata(c, label, atom, t, catamorphisms) for atom in missing]
                if all(plans):
                    best = len(missing), plans[0]
    return best[1] if best else None


def fresh_definition_name(ws: Workspace, hints: Sequence[str] = ()) -> str:
    taken = set(ws.signatures()) | set(ws.labels())
    for hint in hints:
        if hint not in taken:
            return hint
    k = 1
    while 'new{}'.format(k) in taken:
        k += 1
    return 'new{}'.format(k)


def auto_define(ws: Workspace, label: str, hints: Sequence[str] = ()) -> Optional[Command]:
    """
    Decides how to eliminate the list arguments of a clause: fold with an existing definition that covers a block of
    the clause up to renaming and instantiation of its head variables, or define a new predicate for the first block.
    Blocks of goals are defined as they are, those of other clauses with their constants generalized.
    :return: a Fold or a Define command, or None when the clause has no list arguments
    """
    c = ws.clause(label)
    blocks = list_blocks(c)
    if not blocks:
        return None
    for block in blocks:
        for d in ws.definitions:
            if can_fold(c, d):
                plan = _covering(ws, label, block, d, weak=False)
                if isinstance(plan, Fold):
                    return plan
    block = blocks[0]
    return Define(fresh_definition_name(ws, hints), label, tuple(j + 1 for j in block),
                  tuple(head_variables(c, block)), generalize=not c.is_goal())


def select_unfold_atom(c: Clause, program: ClauseSet, catamorphisms: Mapping[str, CatamorphismSpec]) -> Optional[int]:
    """
    The leftmost atom of a program predicate that is not a catamorphism, else the leftmost catamorphism atom whose
    list argument is a constructor term, else the leftmost atom of a program predicate.
    """
    defined = [j for j, a in enumerate(c.body) if program.defining(a.pred)]
    for j in defined:
        if c.body[j].pred not in catamorphisms:
            return j
    for j in defined:
        spec = catamorphisms[c.body[j].pred]
        if is_constructor(c.body[j].args[spec.list_position]):
            return j
    return defined[0] if defined else None


class Derivation:
    """
    A derivation in progress: the workspace, the trace of executed commands with their generated names made explicit,
    and the number of strategy iterations so far.
    """
    def __init__(self, ws: Workspace, limits: StrategyLimits = None, hints: Sequence[str] = ()):
        self.ws = ws
        self.limits = limits or StrategyLimits()
        self.hints = list(hints)
        self.trace: List[Command] = []
        self.iterations = 0
        self.unfolds = 0
        self._patterns: Dict[str, List[int]] = {}

    def do(self, command: Command) -> Command:
        self.ws, resolved = command.execute(self.ws)
        self.trace.append(resolved)
        return resolved

    def execute(self, command: Command, line_number: int = None):
        """
        Executes one script command; rule failures are reported as ScriptException.
        """
        try:
            if isinstance(command, Auto):
                self.auto()
            else:
                self.do(command)
        except ScriptException as e:
            if e.line_number is None:
                e.line_number = line_number
            if e.command is None:
                e.command = command
            logger.error(str(e))
            raise
        except (TransformationException, ValueError) as e:
            error = ScriptException(str(e), line_number, command)
            logger.error(str(error))
            raise error from e

    def run(self, commands: Sequence[Union[Command, Tuple[int, Command]]]):
        for item in commands:
            line_number, command = item if isinstance(item, tuple) else (None, item)
            self.execute(command, line_number)

    def auto(self):
        while True:
            labels = self.ws.list_labels()
            if not labels:
                return
            self.iterations += 1
            if self.iterations > self.limits.max_iterations:
                raise StrategyLimitException('More than {} iterations'.format(self.limits.max_iterations), self.ws)
            label = labels[0]
            logger.debug('Iteration {} on {}: {}'.format(self.iterations, label, self.ws.clause(label)))
            try:
                if self.ws.clause(label).origin == DEFINITION:
                    self.unfold_phase(label)
                else:
                    self.define_fold(label)
            except TransformationException as e:
                raise StrategyLimitException('Stuck at {}: {}'.format(label, e), self.ws)

    def unfold(self, label: str, index: int) -> List[str]:
        self.unfolds += 1
        if self.unfolds > self.limits.max_unfolds:
            raise StrategyLimitException('More than {} unfolding steps'.format(self.limits.max_unfolds), self.ws)
        return list(self.do(Unfold(label, index + 1)).labels)

    def _pattern_positions(self, pred: str) -> List[int]:
        if pred not in self._patterns:
            self._patterns[pred] = pattern_positions(pred, self.ws.program)
        return self._patterns[pred]

    def constructor_atom(self, c: Clause) -> Optional[int]:
        for j, a in enumerate(c.body):
            if any(is_constructor(a.args[p]) for p in self._pattern_positions(a.pred)):
                return j
        return None

    def unfold_constructors(self, labels: Sequence[str]) -> List[str]:
        result = []
        for label in labels:
            j = self.constructor_atom(self.ws.clause(label))
            if j is None:
                result.append(label)
            else:
                result.extend(self.unfold_constructors(self.unfold(label, j)))
        return result

    def unfold_phase(self, label: str):
        j = select_unfold_atom(self.ws.clause(label), self.ws.program, self.ws.catamorphisms)
        if j is None:
            raise StrategyLimitException('Nothing to unfold in {}'.format(label), self.ws)
        produced = self.unfold_constructors(self.unfold(label, j))
        self.do(Cleanup())
        present = set(self.ws.labels())
        for l in produced:
            if l in present:
                self.replace_cata(l)

    def replace_cata(self, label: str):
        """
        Applies the lemmas to the clause until none of them adds anything.
        """
        for _ in range(self.limits.max_lemma_rounds):
            changed = False
            for lemma in self.ws.lemmas:
                c = self.ws.clause(label)
                if c.constraint == (FALSE_CONJUNCT,):
                    return
                try:
                    updated = apply_lemma(c, lemma, self.ws.catamorphisms, self.ws.config)
                except LemmaException:
                    continue
                if updated != c:
                    self.do(ApplyLemma(label, lemma.name))
                    changed = True
            if not changed:
                return
        logger.warning('Lemma application on {} stopped after {} rounds'.format(label, self.limits.max_lemma_rounds))

    def _attempt(self, command: Optional[Command]) -> bool:
        if command is None:
            return False
        try:
            self.do(command)
            return True
        except TransformationException as e:
            logger.debug('{} failed: {}'.format(command, e))
            return False

    def completion_fold(self, label: str) -> bool:
        """
        Folds the clause with a definition covering one of its blocks, adding missing catamorphism atoms first when no
        definition covers a block as it is.
        """
        c = self.ws.clause(label)
        plans = [_covering(self.ws, label, block, d, weak=False)
                 for block in list_blocks(c) for d in self.ws.definitions if can_fold(c, d)]
        plans = [p for p in plans if isinstance(p, Fold)] + [p for p in plans if isinstance(p, AddTotalCata)]
        return any(self._attempt(p) for p in plans)

    def weak_fold(self, label: str) -> bool:
        c = self.ws.clause(label)
        for block in list_blocks(c):
            for d in self.ws.definitions:
                if d.status == STATUS_UNFOLDED and self._attempt(_covering(self.ws, label, block, d, weak=True)):
                    return True
        return False

    def remove_conjunct(self, label: str) -> bool:
        c = self.ws.clause(label)
        for i, anchor in enumerate(c.body):
            if not anchor.has_list() or input_positions(anchor.pred, self.ws.catamorphisms, self.ws.modes) is None:
                continue
            companions = tuple(j + 1 for j, a in enumerate(c.body)
                               if j != i and any(justifies(l, anchor, a, c, self.ws.config) for l in self.ws.lemmas))
            if self._attempt(RemoveTrueConjunct(label, i + 1, companions)):
                return True
        return False

    def introduce(self, label: str):
        command = auto_define(self.ws, label, self.hints)
        if isinstance(command, Define):
            if len(self.ws.definitions) >= self.limits.max_definitions:
                raise StrategyLimitException('More than {} definitions'.format(self.limits.max_definitions), self.ws)
            self.do(command)
            command = Fold(label, command.name, command.atoms)
        self.do(command)

    def define_fold(self, label: str):
        for step in range(self.limits.max_steps + 1):
            if label not in self.ws.labels() or not clause_has_list(self.ws.clause(label)):
                return
            if step == self.limits.max_steps:
                break
            if self.completion_fold(label) or self.weak_fold(label) or self.remove_conjunct(label):
                continue
            self.introduce(label)
        raise StrategyLimitException('No progress on {}'.format(label), self.ws)

    def result(self, stuck: str = None) -> DerivationResult:
        return DerivationResult(self.ws.result(), tuple(d.clause for d in self.ws.definitions), tuple(self.trace),
                                self.iterations, stuck, self.ws)


def run_rcata(program: ClauseSet, goal: Clause, lemmas: Sequence[Lemma] = (),
              script: Union[str, Sequence[Union[Command, Tuple[int, Command]]]] = None,
              limits: StrategyLimits = None, catamorphisms: Mapping[str, CatamorphismSpec] = None,
              modes: Mapping[str, int] = None, config: EngineConfig = None, hints: Sequence[str] = (),
              raise_on_failure: bool = True) -> DerivationResult:
    """
    Transforms program and goal into a clause set without list arguments.
    :param program: the program clauses, goals in it are ignored
    :param goal:
    :param lemmas: lemmas from goals already proved
    :param script: commands to replay, as text or parsed; the automatic strategy runs when absent
    :param limits:
    :param catamorphisms:
    :param modes: number of input arguments of each function-derived predicate
    :param config:
    :param hints: names for the definitions the strategy introduces
    :param raise_on_failure: when false a failure is reported in DerivationResult.stuck
    :return: the result, with T_G in its clauses
    """
    ws = Workspace.start(program, goal, lemmas, catamorphisms, modes, config)
    derivation = Derivation(ws, limits, hints)
    try:
        if script is None:
            derivation.auto()
        else:
            derivation.run(parse_script(script) if isinstance(script, str) else script)
            remaining = derivation.ws.list_labels()
            if remaining:
                raise ScriptException('Clauses with list arguments remain: {}'.format(', '.join(remaining)))
    except (StrategyLimitException, ScriptException) as e:
        if raise_on_failure:
            raise
        logger.warning('Derivation of {} stopped: {}'.format(goal.tag or 'goal', e))
        return derivation.result(str(e))
    result = derivation.result()
    logger.info('Derived {} clauses for {} in {} iterations with {} definitions'.format(
        len(result.clauses), goal.tag or 'goal', result.iterations, len(result.definitions)))
    return result
