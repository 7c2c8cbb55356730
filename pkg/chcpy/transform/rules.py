"""
The transformation rules: definition, unfolding, folding, the three catamorphism replacements (lemma application,
totality-based insertion and removal of a conjunction that is always true) and cleanup.

Every rule takes clauses and returns new clauses; derived clauses have their constraint projected onto the variables
of their atoms, simplified, and their variables renamed canonically.
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from ..core.constraints import EngineConfig, UNSAT, entails, is_sat, project, simplify
from ..core.matching import atom_vars, match_atom, match_atoms, subsumes
from ..core.model import (Atom, AtomicConstraint, BOOL, BoolBind, BoolConst, BoolEq, Clause, ClauseSet, Cons,
                          DEFINITION, DERIVED, FALSE_CONJUNCT, GOAL, INT, IntConst, LinExpr, LinRel, REL_EQ,
                          Signatures, Term, Var, apply_subst, canonical_name, canonical_names, fold_ground_conjuncts,
                          free_vars, fresh_name, is_constructor, is_list_sort, ordered_vars, rename_apart,
                          subst_atom, subst_constraint, term_sort, term_vars, var_sorts)
from ..core.registry import CatamorphismSpec, Lemma
from ..core.system_helpers import get_logger

logger = get_logger(__name__)

STATUS_UNUSED, STATUS_UNFOLDED = 'unused', 'unfolded'


class TransformationException(Exception):
    def __init__(self, message: str, clause: Clause = None):
        self.message = message
        self.clause = clause

    def __str__(self):
        if self.clause is None:
            return self.message
        return '{}: {}'.format(self.message, self.clause)


class FoldException(TransformationException):
    pass


class LemmaException(TransformationException):
    pass


class LocalityException(TransformationException):
    pass


class DefinitionException(TransformationException):
    pass


@dataclass(frozen=True)
class Definition:
    clause: Clause
    status: str = STATUS_UNUSED

    @property
    def name(self) -> str:
        return self.clause.head.pred

    @property
    def head(self) -> Atom:
        return self.clause.head

    def unfolded(self) -> 'Definition':
        return replace(self, status=STATUS_UNFOLDED)


def canonical_with_mapping(c: Clause) -> Tuple[Clause, Dict[str, str]]:
    mapping = {name: canonical_name(i) for i, name in enumerate(ordered_vars(c))}
    return canonical_names(c), mapping


def finish(c: Clause, config: EngineConfig = None) -> Optional[Clause]:
    """
    Projects the constraint of a derived clause onto the variables of its atoms, simplifies it and renames the
    variables canonically.
    :return: the clause, or None when its constraint is unsatisfiable
    """
    constraint = project(fold_ground_conjuncts(c.constraint), atom_vars(c.atoms()), config)
    constraint = simplify(constraint, config)
    if constraint == (FALSE_CONJUNCT,):
        return None
    return canonical_names(replace(c, constraint=constraint))


def _derived_origin(c: Clause) -> str:
    return GOAL if c.is_goal() else DERIVED


def _linexpr(t: Term) -> LinExpr:
    if isinstance(t, IntConst):
        return LinExpr.const(t.value)
    return LinExpr.var(t.name)


def equality(a: Term, b: Term) -> AtomicConstraint:
    """
    The constraint a = b between two integer or boolean terms.
    """
    if term_sort(a) == INT:
        return LinRel(REL_EQ, _linexpr(a), _linexpr(b))
    if isinstance(a, BoolConst):
        a, b = b, a
    if isinstance(b, BoolConst):
        if isinstance(a, BoolConst):
            return LinRel(REL_EQ, LinExpr.const(0), LinExpr.const(0 if a == b else 1))
        return BoolBind(a.name, b.value)
    return BoolEq(a.name, b.name)


class _Unifier:
    """
    Unifies an atom of the clause being unfolded with the head of a program clause renamed apart. Program variables
    are bound to clause terms, lists unify structurally, and two scalar clause terms that must be equal give an
    equality constraint instead of a binding.
    """
    def __init__(self, program_vars: Set[str]):
        self.program_vars = program_vars
        self.bindings: Dict[str, Term] = {}
        self.equalities: List[Tuple[Term, Term]] = []

    def resolve(self, t: Term) -> Term:
        while isinstance(t, Var) and t.name in self.bindings:
            t = self.bindings[t.name]
        return t

    def full(self, t: Term) -> Term:
        t = self.resolve(t)
        if isinstance(t, Cons):
            return Cons(self.full(t.head), self.full(t.tail))
        return t

    def occurs(self, name: str, t: Term) -> bool:
        t = self.resolve(t)
        if isinstance(t, Var):
            return t.name == name
        elif isinstance(t, Cons):
            return self.occurs(name, t.head) or self.occurs(name, t.tail)
        return False

    def bind(self, v: Var, t: Term) -> bool:
        if self.occurs(v.name, t):
            return False
        self.bindings[v.name] = t
        return True

    def unify(self, clause_term: Term, program_term: Term) -> bool:
        a, b = self.resolve(clause_term), self.resolve(program_term)
        if a == b:
            return True
        if isinstance(b, Var) and b.name in self.program_vars:
            return self.bind(b, a)
        if isinstance(a, Var) and a.name in self.program_vars:
            return self.bind(a, b)
        if isinstance(a, Cons) and isinstance(b, Cons):
            return self.unify(a.head, b.head) and self.unify(a.tail, b.tail)
        if is_list_sort(term_sort(a)):
            if isinstance(a, Var):
                return self.bind(a, b)
            elif isinstance(b, Var):
                return self.bind(b, a)
            return False
        if isinstance(a, Var) or isinstance(b, Var):
            self.equalities.append((a, b))
            return True
        return False

    def substitution(self) -> Dict[str, Term]:
        return {name: self.full(t) for name, t in self.bindings.items()}


def define(constraint: Sequence[AtomicConstraint], atoms: Sequence[Atom], head_vars: Sequence[str], name: str,
           signatures: Signatures, generalize: bool = False) -> Definition:
    """
    Introduces a new predicate defined by one clause over the given body.
    :param constraint: body constraint, projected onto the variables of the atoms
    :param atoms: body atoms
    :param head_vars: names of the head variables, none of them of a list sort
    :param name: the new predicate, which must not occur in signatures
    :param signatures: predicates already in use
    :param generalize: replace every constant in a top-level non-list argument of the atoms by a fresh variable that
        is appended to the head
    :return: the definition, unused
    """
    if name in signatures:
        raise DefinitionException('Predicate {} already exists'.format(name))
    if not atoms:
        raise DefinitionException('Definition {} has an empty body'.format(name))
    atoms = list(atoms)
    sorts = var_sorts(Clause(None, tuple(constraint), tuple(atoms)))
    head = []
    for v in head_vars:
        if v not in sorts:
            raise DefinitionException('Head variable {} of {} does not occur in its body'.format(v, name))
        if is_list_sort(sorts[v]):
            raise DefinitionException('Head variable {} of {} is a list'.format(v, name))
        head.append(Var(v, sorts[v]))
    if generalize:
        taken = set(sorts)
        for i, atom in enumerate(atoms):
            args = []
            for arg in atom.args:
                if isinstance(arg, (IntConst, BoolConst)):
                    param = Var(fresh_name('P', taken), term_sort(arg))
                    taken.add(param.name)
                    head.append(param)
                    arg = param
                args.append(arg)
            atoms[i] = Atom(atom.pred, tuple(args))
    constraint = simplify(project(constraint, atom_vars(atoms)))
    clause = Clause(Atom(name, tuple(head)), constraint, tuple(atoms), tag=name, origin=DEFINITION)
    clause = canonical_names(clause)
    logger.info('Defined {}'.format(clause))
    return Definition(clause)


def pattern_positions(pred: str, program: ClauseSet) -> List[int]:
    """
    Argument positions where every clause defining pred has a constructor term in its head.
    """
    heads = [c.head for c in program.defining(pred)]
    if not heads:
        return []
    return [i for i in range(len(heads[0].args)) if all(is_constructor(h.args[i]) for h in heads)]


def unfold(c: Clause, index: int, program: ClauseSet, config: EngineConfig = None) -> List[Clause]:
    """
    Resolves the body atom at index with every program clause defining its predicate.
    :param c:
    :param index: 0-based position in the body
    :param program:
    :param config:
    :return: the resolvents whose constraint is satisfiable, in program order
    """
    if not 0 <= index < len(c.body):
        raise TransformationException('No body atom {}'.format(index + 1), c)
    atom = c.body[index]
    defining = program.defining(atom.pred)
    if not defining:
        raise TransformationException('{} has no defining clauses'.format(atom.pred), c)
    taken = free_vars(c)
    results = []
    for d in defining:
        d = rename_apart(d, taken)
        unifier = _Unifier(free_vars(d))
        if not all(unifier.unify(a, b) for a, b in zip(atom.args, d.head.args)):
            logger.debug('{} does not unify with {}'.format(atom, d.head))
            continue
        equalities = tuple(equality(a, b) for a, b in unifier.equalities)
        body = c.body[:index] + d.body + c.body[index + 1:]
        resolvent = Clause(c.head, c.constraint + d.constraint + equalities, body, origin=_derived_origin(c))
        finished = finish(apply_subst(resolvent, unifier.substitution()), config)
        if finished is None:
            logger.info('Dropped resolvent of {} with {}: unsatisfiable constraint'.format(atom, d))
            continue
        results.append(finished)
    return results


def can_fold(c: Clause, d: Definition) -> bool:
    return d.status == STATUS_UNFOLDED or c.is_goal() or c.head.pred != d.name


def fold(c: Clause, d: Definition, atoms: Sequence[int] = None, weak: bool = False,
         catamorphisms: Mapping[str, CatamorphismSpec] = None, config: EngineConfig = None) -> Clause:
    """
    Replaces an instance of the body of d inside c by the corresponding instance of its head.

    In strict mode the variables that only occur in the body of d must be mapped to distinct variables of c that occur
    nowhere else, so the result is equivalent to c given d. In weak mode that condition is dropped and the matched
    catamorphism atoms whose list still occurs outside the match are kept; the result then only implies c.
    :param c:
    :param d:
    :param atoms: 0-based body positions of c the body of d must be matched to
    :param weak:
    :param catamorphisms:
    :param config:
    :return: the folded clause
    """
    catamorphisms = catamorphisms or {}
    if not can_fold(c, d):
        raise FoldException('{} is unused and cannot fold its own clauses'.format(d.name), c)
    pattern = d.clause.body
    if atoms is not None and len(set(atoms)) != len(pattern):
        raise FoldException('{} has {} body atoms, {} given'.format(d.name, len(pattern), len(set(atoms))), c)
    head_names = {v.name for v in d.head.variables()}
    local = [name for name in atom_vars(pattern) if name not in head_names]
    reason = 'body of {} does not occur in the clause'.format(d.name)
    for s, used in match_atoms(pattern, c.body, {}, atoms):
        if not entails(c.constraint, subst_constraint(d.clause.constraint, s), config):
            reason = 'constraint of the clause does not entail that of {}'.format(d.name)
            continue
        head = subst_atom(d.head, s)
        rest = [a for j, a in enumerate(c.body) if j not in used]
        if not weak:
            images = [s[name] for name in local]
            outside = free_vars(Clause(c.head, c.constraint, tuple(rest) + (head,)))
            if not all(isinstance(t, Var) for t in images) or len({t.name for t in images}) != len(images) or \
                    any(t.name in outside for t in images):
                reason = 'local variables of {} occur elsewhere in the clause'.format(d.name)
                continue
        kept = set()
        if weak:
            kept = {j for j in used if _list_escapes(c, j, used, catamorphisms)}
        body = []
        for j, a in enumerate(c.body):
            if j == min(used):
                body.append(head)
            if j not in used or j in kept:
                body.append(a)
        folded = finish(replace(c, body=tuple(body), origin=_derived_origin(c)), config)
        logger.info('Folded with {}: {}'.format(d.name, folded))
        return folded
    raise FoldException('Cannot fold with {}: {}'.format(d.name, reason), c)


def _list_escapes(c: Clause, j: int, used: Sequence[int], catamorphisms: Mapping[str, CatamorphismSpec]) -> bool:
    spec = catamorphisms.get(c.body[j].pred)
    if spec is None:
        return False
    names = {v.name for v in term_vars(c.body[j].args[spec.list_position])}
    others = [a for k, a in enumerate(c.body) if k not in used]
    return any(v.name in names for a in others for v in a.variables())


def _add_conclusion(c: Clause, conclusion: Atom, catamorphisms: Mapping[str, CatamorphismSpec],
                    config: EngineConfig) -> Optional[Clause]:
    if conclusion in c.body:
        return None
    spec = catamorphisms.get(conclusion.pred)
    if spec is not None:
        for a in c.body:
            if a.pred == conclusion.pred and all(a.args[i] == conclusion.args[i] for i in spec.inputs()):
                eq = equality(a.args[spec.output], conclusion.args[spec.output])
                if entails(c.constraint, (eq,), config):
                    return None
                return finish(replace(c, constraint=c.constraint + (eq,)), config) or \
                    replace(c, constraint=(FALSE_CONJUNCT,))
    return finish(replace(c, body=c.body + (conclusion,)), config)


def apply_lemma(c: Clause, lemma: Lemma, catamorphisms: Mapping[str, CatamorphismSpec] = None,
                config: EngineConfig = None) -> Clause:
    """
    Adds the conclusion of lemma for the first match of its premises in c that changes c. A catamorphism conclusion
    whose inputs already have an atom in c becomes an equality between the two outputs.
    :return: c itself when every match is already accounted for
    """
    catamorphisms = catamorphisms or {}
    premise_clause = rename_apart(lemma.as_clause(), free_vars(c))
    matched = False
    for s, _ in match_atoms(premise_clause.body, c.body):
        if not entails(c.constraint, subst_constraint(premise_clause.constraint, s), config):
            continue
        matched = True
        updated = _add_conclusion(c, subst_atom(premise_clause.head, s), catamorphisms, config)
        if updated is not None:
            logger.info('Applied lemma {}: {}'.format(lemma.name, updated))
            return updated
    if not matched:
        raise LemmaException('Premises of lemma {} do not occur in the clause'.format(lemma.name), c)
    return c


def add_total_cata(c: Clause, spec: CatamorphismSpec, params: Sequence[Term], list_arg: Term) -> Tuple[Clause, Var]:
    """
    Adds spec.pred(params, list_arg, Out) with a fresh output variable, which by totality does not change the
    meaning of c.
    :return: the clause and its output variable, both after canonical renaming
    """
    if not spec.total:
        raise TransformationException('{} is not known to be total'.format(spec.pred), c)
    if len(params) != len(spec.params):
        raise ValueError('{} takes {} parameters, got {}'.format(spec.pred, len(spec.params), len(params)))
    names = {v.name for v in term_vars(list_arg)}
    taken = free_vars(c)
    if not names <= taken:
        raise TransformationException('{} does not occur in the clause'.format(list_arg), c)
    out = Var(fresh_name('B' if spec.output_sort == BOOL else 'N', taken), spec.output_sort)
    args: List[Term] = [out] * (len(spec.params) + 2)
    for position, param in zip(spec.params, params):
        args[position] = param
    args[spec.list_position] = list_arg
    atom = Atom(spec.pred, tuple(args))
    body = list(c.body)
    position = next((j + 1 for j, a in enumerate(body) if any(v.name in names for v in a.variables())), len(body))
    body.insert(position, atom)
    result, mapping = canonical_with_mapping(replace(c, body=tuple(body), origin=_derived_origin(c)))
    logger.info('Added {} by totality: {}'.format(atom, result))
    return result, Var(mapping[out.name], out.sort)


def input_positions(pred: str, catamorphisms: Mapping[str, CatamorphismSpec],
                    modes: Mapping[str, int]) -> Optional[Tuple[int, ...]]:
    """
    Input argument positions of a predicate known to be total, or None.
    """
    spec = catamorphisms.get(pred)
    if spec is not None and spec.total:
        return spec.inputs()
    if pred in modes:
        return tuple(range(modes[pred]))
    return None


def justifies(lemma: Lemma, anchor: Atom, companion: Atom, c: Clause, config: EngineConfig = None) -> bool:
    if len(lemma.premises) != 1:
        return False
    lemma_clause = rename_apart(lemma.as_clause(), free_vars(c))
    s = match_atom(lemma_clause.body[0], anchor, {})
    if s is None or match_atom(lemma_clause.head, companion, s) is None:
        return False
    return entails(c.constraint, subst_constraint(lemma_clause.constraint, s), config)


def remove_true_conjunct(c: Clause, anchor: int, companions: Sequence[int], lemmas: Iterable[Lemma],
                         catamorphisms: Mapping[str, CatamorphismSpec] = None, modes: Mapping[str, int] = None,
                         config: EngineConfig = None) -> Clause:
    """
    Deletes a total anchor atom together with companions that lemmas derive from it. The outputs of the anchor and
    the companion variables that are not anchor inputs must not occur anywhere else in c.
    :param c:
    :param anchor: 0-based body position
    :param companions: 0-based body positions
    :param lemmas:
    :param catamorphisms:
    :param modes: number of input arguments of each function-derived predicate
    :param config:
    :return:
    """
    catamorphisms, modes = catamorphisms or {}, modes or {}
    lemmas = list(lemmas)
    atom = c.body[anchor]
    inputs = input_positions(atom.pred, catamorphisms, modes)
    if inputs is None:
        raise TransformationException('{} is not known to be total'.format(atom.pred), c)
    outputs = [a for i, a in enumerate(atom.args) if i not in inputs]
    if not all(isinstance(a, Var) for a in outputs) or len(set(outputs)) != len(outputs):
        raise TransformationException('Outputs of {} are not distinct variables'.format(atom), c)
    for j in companions:
        if j == anchor or not any(justifies(l, atom, c.body[j], c, config) for l in lemmas):
            raise LemmaException('No lemma derives {} from {}'.format(c.body[j], atom), c)
    removed = {anchor} | set(companions)
    input_names = {v.name for i in inputs for v in term_vars(atom.args[i])}
    removed_names = {v.name for j in removed for v in c.body[j].variables()} - input_names
    rest = replace(c, body=tuple(a for j, a in enumerate(c.body) if j not in removed), origin=_derived_origin(c))
    clash = sorted(removed_names & free_vars(rest))
    if clash:
        raise LocalityException('Variables {} of the removed atoms occur elsewhere'.format(', '.join(clash)), c)
    result = finish(rest, config)
    logger.info('Removed {} and {} companions: {}'.format(atom, len(companions), result))
    return result


def kept_indices(clauses: Sequence[Clause], config: EngineConfig = None) -> List[int]:
    """
    Positions of the clauses cleanup keeps.
    """
    kept: List[int] = []
    for i, c in enumerate(clauses):
        if is_sat(c.constraint, config) == UNSAT:
            logger.warning('Removed clause with unsatisfiable constraint: {}'.format(c))
            continue
        if any(subsumes(clauses[k], c, config) is not None for k in kept):
            logger.warning('Removed subsumed clause: {}'.format(c))
            continue
        dropped = [k for k in kept if subsumes(c, clauses[k], config) is not None]
        for k in dropped:
            logger.warning('Removed subsumed clause: {}'.format(clauses[k]))
        kept = [k for k in kept if k not in dropped] + [i]
    return sorted(kept)


def cleanup(clauses: Sequence[Clause], config: EngineConfig = None) -> List[Clause]:
    """
    Drops clauses with an unsatisfiable constraint and clauses subsumed by, or variants of, another kept clause.
    """
    return [clauses[i] for i in kept_indices(clauses, config)]
