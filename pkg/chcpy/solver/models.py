"""
Candidate models of clause sets and their validation. A model interprets each predicate by a disjunction of
constraints over its formal arguments; a clause holds in it when its constraint and the interpretations of its body
entail the interpretation of its head, which the constraint engine decides disjunct by disjunct.
"""
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.constraints import EngineConfig, SAT, UNKNOWN, is_sat, negate_atomic
from ..core.model import (Atom, AtomicConstraint, BOOL, BoolBind, BoolConst, BoolEq, Clause, ClauseSet, Constraint,
                          FALSE_CONJUNCT, INT, IntConst, LinExpr, LinRel, REL_EQ, REL_GE, REL_GT, REL_LE, REL_LT,
                          Signatures, Var, canonical_name, constraint_vars, is_list_sort, subst_constraint, term_sort)
from ..core.smtlib import SExpr, SolverVerdict, parse_sexprs, parse_solver_output, unquote
from ..core.syntax import parse_chc, print_chc
from ..core.system_helpers import get_logger

logger = get_logger(__name__)

VALID, INVALID = 'valid', 'invalid'
DEFAULT_MAX_DISJUNCTS = 256

# a formula in disjunctive normal form: no disjunct is false, an empty disjunct is true
Dnf = List[Constraint]

_INT_RE = re.compile(r'^-?[0-9]+$')
_RELATIONS = {'<=': REL_LE, '<': REL_LT, '>=': REL_GE, '>': REL_GT}


class ModelException(Exception):
    def __init__(self, message: str):
        self.message = message

    def __str__(self):
        return self.message


class _TooLarge(Exception):
    pass


def _prune(dnf: Iterable[Constraint]) -> Dnf:
    result = []
    for d in dnf:
        if FALSE_CONJUNCT not in d and d not in result:
            result.append(d)
    return result


def conjoin(left: Dnf, right: Dnf, max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> Dnf:
    if len(left) * len(right) > max_disjuncts:
        raise _TooLarge()
    return _prune(l + tuple(a for a in r if a not in l) for l in left for r in right)


def negate(dnf: Dnf, max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> Dnf:
    result = [()]
    for d in dnf:
        alternatives = [(alt,) for a in d for alt in negate_atomic(a)]
        result = conjoin(result, alternatives, max_disjuncts)
    return result


@dataclass(frozen=True)
class Interpretation:
    formals: Tuple[Var, ...]
    disjuncts: Tuple[Constraint, ...]

    def instantiate(self, args: Sequence) -> Dnf:
        s = {f.name: arg for f, arg in zip(self.formals, args)}
        return _prune(subst_constraint(d, s) for d in self.disjuncts)


def _formals(sorts: Sequence) -> Tuple[Var, ...]:
    return tuple(Var(canonical_name(i), sort) for i, sort in enumerate(sorts))


def _equality(formal: Var, t) -> AtomicConstraint:
    if isinstance(t, BoolConst):
        return BoolBind(formal.name, t.value)
    elif isinstance(t, Var) and t.sort == BOOL:
        return BoolEq(formal.name, t.name)
    elif isinstance(t, IntConst):
        return LinRel(REL_EQ, LinExpr.var(formal.name), LinExpr.const(t.value))
    return LinRel(REL_EQ, LinExpr.var(formal.name), LinExpr.var(t.name))


def _interpretation_disjunct(c: Clause, formals: Tuple[Var, ...]) -> Constraint:
    """
    Rewrites a model clause p(t1,...,tn) :- c into a constraint over the formals.
    """
    if c.body:
        raise ModelException('Model clause {} has body atoms'.format(c))
    if len(c.head.args) != len(formals):
        raise ModelException('Model clause {} has {} arguments, expected {}'.format(c, len(c.head.args), len(formals)))
    mapping, equalities = {}, []
    for formal, arg in zip(formals, c.head.args):
        if is_list_sort(term_sort(arg)):
            raise ModelException('Model clause {} has list arguments'.format(c))
        if isinstance(arg, Var) and arg.name not in mapping:
            mapping[arg.name] = formal
        else:
            equalities.append((formal, arg))
    loose = [name for name in constraint_vars(c.constraint) if name not in mapping]
    if loose:
        raise ModelException('Variables {} of model clause {} are not arguments'.format(', '.join(loose), c))
    renamed = list(subst_constraint(c.constraint, mapping))
    for formal, arg in equalities:
        renamed.append(_equality(formal, mapping.get(arg.name, arg) if isinstance(arg, Var) else arg))
    return tuple(renamed)


class Model:
    """
    Interpretation of predicates by constraints. Several clauses for one predicate in the clause syntax stand for a
    disjunction, and a fact p(X) for true.
    """
    def __init__(self, interpretations: Mapping[str, Interpretation] = None):
        self.interpretations = dict(interpretations or {})

    def __contains__(self, pred: str) -> bool:
        return pred in self.interpretations

    def __getitem__(self, pred: str) -> Interpretation:
        if pred not in self.interpretations:
            raise ModelException('No interpretation for predicate {}'.format(pred))
        return self.interpretations[pred]

    def predicates(self) -> List[str]:
        return list(self.interpretations.keys())

    def formula(self, atom: Atom) -> Dnf:
        if atom.has_list():
            raise ModelException('Cannot interpret {}, it has list arguments'.format(atom))
        return self[atom.pred].instantiate(atom.args)

    @staticmethod
    def from_clauses(clauses: Iterable[Clause], signatures: Signatures = None) -> 'Model':
        signatures = signatures or {}
        disjuncts: Dict[str, List[Constraint]] = {}
        formals: Dict[str, Tuple[Var, ...]] = {}
        for c in clauses:
            if c.head is None:
                raise ModelException('Model files cannot contain goals: {}'.format(c))
            pred = c.head.pred
            if pred not in formals:
                formals[pred] = _formals(signatures.get(pred) or [term_sort(a) for a in c.head.args])
            disjuncts.setdefault(pred, []).append(_interpretation_disjunct(c, formals[pred]))
        return Model({pred: Interpretation(formals[pred], tuple(_prune(ds))) for pred, ds in disjuncts.items()})

    @staticmethod
    def parse(text: str, signatures: Signatures = None, filename: str = '<string>') -> 'Model':
        cs = parse_chc(text, filename, signatures)
        return Model.from_clauses(cs.clauses, cs.signatures)

    @staticmethod
    def read(path: str, signatures: Signatures = None) -> 'Model':
        with open(path, encoding='utf-8') as f:
            return Model.parse(f.read(), signatures, path)

    @staticmethod
    def from_solver_output(output: Union[str, SolverVerdict], max_disjuncts: int = DEFAULT_MAX_DISJUNCTS) -> 'Model':
        """
        Reads the define-fun blocks a solver prints after sat.
        """
        verdict = parse_solver_output(output) if isinstance(output, str) else output
        if not verdict.model:
            raise ModelException('Solver output carries no model')
        interpretations = {}
        for pred, (params, body) in verdict.model.items():
            sorts = []
            for _, sort in params:
                if sort not in ('Int', 'Bool'):
                    raise ModelException('Unsupported sort {} in the model of {}'.format(sort, pred))
                sorts.append(INT if sort == 'Int' else BOOL)
            formals = _formals(sorts)
            env = {name: formal for (name, _), formal in zip(params, formals)}
            expressions = parse_sexprs(body)
            if len(expressions) != 1:
                raise ModelException('Cannot read the model of {}: {}'.format(pred, body))
            try:
                dnf = _SExprReader(env, max_disjuncts).formula(expressions[0])
            except _TooLarge:
                raise ModelException('The model of {} has more than {} disjuncts'.format(pred, max_disjuncts))
            interpretations[pred] = Interpretation(formals, tuple(dnf))
        return Model(interpretations)

    def clauses(self) -> List[Clause]:
        result = []
        for pred, interpretation in self.interpretations.items():
            head = Atom(pred, interpretation.formals)
            for d in interpretation.disjuncts or ((FALSE_CONJUNCT,),):
                result.append(Clause(head, d))
        return result

    def __str__(self):
        return print_chc(self.clauses())

    def write(self, path: str):
        with open(path, 'w', encoding='utf-8') as f:
            f.write(str(self))


class _SExprReader:
    """
    Converts solver formulas over integers and booleans into disjunctive normal form.
    """
    def __init__(self, env: Mapping[str, Var], max_disjuncts: int):
        self.env = dict(env)
        self.max_disjuncts = max_disjuncts

    def _var(self, name: str) -> Optional[Var]:
        return self.env.get(unquote(name))

    def is_bool(self, e: SExpr) -> bool:
        if isinstance(e, str):
            v = self._var(e)
            return e in ('true', 'false') or (v is not None and v.sort == BOOL)
        if not e or not isinstance(e[0], str):
            return False
        return e[0] in ('and', 'or', 'not', '=>', '=', 'distinct', 'let') or e[0] in _RELATIONS or \
            (e[0] == 'ite' and self.is_bool(e[2]))

    def formula(self, e: SExpr) -> Dnf:
        if isinstance(e, str):
            if e == 'true':
                return [()]
            elif e == 'false':
                return []
            v = self._var(e)
            if v is None or v.sort != BOOL:
                raise ModelException('Unexpected {} in a model formula'.format(e))
            return [(BoolBind(v.name, True),)]
        _check_application(e)
        op, args = e[0], e[1:]
        if op == 'and':
            result = [()]
            for arg in args:
                result = conjoin(result, self.formula(arg), self.max_disjuncts)
            return result
        elif op == 'or':
            result = []
            for arg in args:
                result = _prune(result + self.formula(arg))
            if len(result) > self.max_disjuncts:
                raise _TooLarge()
            return result
        elif op == 'not':
            return negate(self.formula(args[0]), self.max_disjuncts)
        elif op == '=>':
            return _prune(negate(self.formula(args[0]), self.max_disjuncts) + self.formula(args[1]))
        elif op == 'ite':
            cond = self.formula(args[0])
            return _prune(conjoin(cond, self.formula(args[1]), self.max_disjuncts) +
                          conjoin(negate(cond, self.max_disjuncts), self.formula(args[2]), self.max_disjuncts))
        elif op == 'let':
            return self.formula(_expand_let(args[0], args[1]))
        elif op in ('=', 'distinct') and len(args) == 2:
            dnf = self.equality(args[0], args[1])
            return dnf if op == '=' else negate(dnf, self.max_disjuncts)
        elif op in _RELATIONS and len(args) == 2:
            return [(LinRel(_RELATIONS[op], self.linexpr(args[0]), self.linexpr(args[1])),)]
        raise ModelException('Unsupported operator {} in a model formula'.format(op))

    def equality(self, lhs: SExpr, rhs: SExpr) -> Dnf:
        if not (self.is_bool(lhs) or self.is_bool(rhs)):
            return [(LinRel(REL_EQ, self.linexpr(lhs), self.linexpr(rhs)),)]
        left, right = self._var(lhs) if isinstance(lhs, str) else None, self._var(rhs) if isinstance(rhs, str) else None
        if left is not None and right is not None:
            return [(BoolEq(left.name, right.name),)]
        a, b = self.formula(lhs), self.formula(rhs)
        both = conjoin(a, b, self.max_disjuncts)
        neither = conjoin(negate(a, self.max_disjuncts), negate(b, self.max_disjuncts), self.max_disjuncts)
        return _prune(both + neither)

    def linexpr(self, e: SExpr) -> LinExpr:
        if isinstance(e, str):
            if _INT_RE.match(e):
                return LinExpr.const(int(e))
            v = self._var(e)
            if v is None or v.sort != INT:
                raise ModelException('Unexpected {} in an arithmetic term'.format(e))
            return LinExpr.var(v.name)
        _check_application(e)
        op, args = e[0], e[1:]
        if op == '+':
            result = LinExpr.const(0)
            for arg in args:
                result = result + self.linexpr(arg)
            return result
        elif op == '-' and len(args) == 1:
            return -self.linexpr(args[0])
        elif op == '-':
            result = self.linexpr(args[0])
            for arg in args[1:]:
                result = result - self.linexpr(arg)
            return result
        elif op == '*' and len(args) == 2:
            left, right = self.linexpr(args[0]), self.linexpr(args[1])
            if left.is_constant():
                return right.scale(left.constant)
            elif right.is_constant():
                return left.scale(right.constant)
        elif op == 'let':
            return self.linexpr(_expand_let(args[0], args[1]))
        raise ModelException('Unsupported arithmetic term {}'.format(e))


def _check_application(e: SExpr):
    if not e or not isinstance(e[0], str):
        raise ModelException('Cannot read model term {}'.format(e))


def _substitute(e: SExpr, s: Mapping[str, SExpr]) -> SExpr:
    if isinstance(e, str):
        return s.get(e, e)
    if e and e[0] == 'let':
        inner = {k: v for k, v in s.items() if k not in {b[0] for b in e[1]}}
        return ['let', [[b[0], _substitute(b[1], s)] for b in e[1]], _substitute(e[2], inner)]
    return [_substitute(x, s) for x in e]


def _expand_let(bindings: SExpr, body: SExpr) -> SExpr:
    return _substitute(body, {b[0]: b[1] for b in bindings})


@dataclass
class ClauseCheck:
    clause: Clause
    status: str
    counterexample: Optional[Constraint] = None

    def __str__(self):
        text = '{}: {}'.format(self.status, self.clause)
        if self.counterexample is not None:
            text += '  [{}]'.format(', '.join(str(a) for a in self.counterexample))
        return text


@dataclass
class ModelReport:
    checks: List[ClauseCheck] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(c.status == VALID for c in self.checks)

    def invalid(self) -> List[ClauseCheck]:
        return [c for c in self.checks if c.status == INVALID]

    def __str__(self):
        return '\n'.join(str(c) for c in self.checks)


def _negated_implication(c: Clause, m: Model, max_disjuncts: int) -> Dnf:
    dnf = [tuple(c.constraint)]
    for atom in c.body:
        dnf = conjoin(dnf, m.formula(atom), max_disjuncts)
    if c.head is not None:
        dnf = conjoin(dnf, negate(m.formula(c.head), max_disjuncts), max_disjuncts)
    return dnf


def check_clause(c: Clause, m: Model, max_disjuncts: int = DEFAULT_MAX_DISJUNCTS,
                 config: EngineConfig = None) -> ClauseCheck:
    try:
        dnf = _negated_implication(c, m, max_disjuncts)
    except _TooLarge:
        logger.warning('Gave up on {}: more than {} disjuncts'.format(c, max_disjuncts))
        return ClauseCheck(c, UNKNOWN)
    status = VALID
    for d in dnf:
        verdict = is_sat(d, config)
        if verdict == SAT:
            return ClauseCheck(c, INVALID, d)
        elif verdict == UNKNOWN:
            status = UNKNOWN
    return ClauseCheck(c, status)


def check_model(cs: ClauseSet, m: Model, max_disjuncts: int = DEFAULT_MAX_DISJUNCTS,
                config: EngineConfig = None) -> ModelReport:
    """
    Checks that every clause of cs holds when its atoms are replaced by their interpretations in m.
    :param cs: a list-free clause set
    :param m: must interpret every predicate occurring in cs
    :param max_disjuncts: cap on the disjunctive normal form of a negated clause; beyond it the clause is unknown
    :param config:
    :return: valid, invalid with the satisfiable disjunct, or unknown for each clause
    """
    used = {a.pred for c in cs for a in c.atoms()}
    missing = sorted(p for p in used if p not in m)
    if missing:
        logger.error('Model misses predicates {}'.format(', '.join(missing)))
        raise ModelException('No interpretation for predicates {}'.format(', '.join(missing)))
    report = ModelReport([check_clause(c, m, max_disjuncts, config) for c in cs])
    logger.info('Model check: {} of {} clauses valid'.format(sum(1 for c in report.checks if c.status == VALID),
                                                              len(report.checks)))
    return report
