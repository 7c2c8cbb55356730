"""
Translation of source functions into constrained Horn clauses, and of their contracts into goals.

A function f(x1..xn) whose result flattens to k values becomes an (n+k)-ary predicate. The body is evaluated
symbolically along paths: every match case, guard and if/else branch opens a path, calls become body atoms with fresh
output variables, and every path that survives simplification becomes one clause.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from ..core.constraints import UNSAT, is_sat, simplify
from ..core.model import (Atom, BOOL, BoolBind, BoolConst, BoolEq, Clause, ClauseSet, Cons, FALSE_CONJUNCT, GOAL,
                          INT, IntConst, LinExpr, LinRel, ListSort, Nil, PROGRAM, REL_EQ, REL_GE, REL_GT,
                          REL_LE, REL_LT, REL_NE, Sort, Term, Var, apply_subst, constraint_vars, fresh_name, term_sort)
from ..core.registry import CatamorphismSpec, Lemma, Manifest, lemma_from_goal
from ..core.system_helpers import get_logger
from .source import (BinOp, Block, BoolLit, Call, Case, ConsLit, Expr, Forall, FunDef, IfExpr, IntLit, Match, Name,
                     NilLit, Not, Observe, Proj, SourceType, TupleLit, UnsupportedConstructException, rename_names,
                     walk)

logger = get_logger(__name__)

# python tuples stand for source tuples; leaves are LinExpr (integers) or terms (booleans, lists)
Value = Union[LinExpr, Term, tuple]

_NEGATED = {REL_EQ: REL_NE, REL_NE: REL_EQ, REL_LE: REL_GT, REL_LT: REL_GE, REL_GE: REL_LT, REL_GT: REL_LE}
_SOURCE_RELATIONS = {'==': REL_EQ, '!=': REL_NE, '<=': REL_LE, '<': REL_LT, '>=': REL_GE, '>': REL_GT}
_LOGICAL = ('&&', '||', '==>')
_OUTPUT_BASE = {INT: 'N', BOOL: 'B'}


class TranslationException(Exception):
    def __init__(self, message: str):
        self.message = message

    def __str__(self):
        return self.message


def sort_of(t: SourceType) -> Sort:
    if t.name in ('Nat', 'Int'):
        return INT
    elif t.name == 'Boolean':
        return BOOL
    elif t.name == 'List':
        return ListSort(INT)
    raise ValueError('No single sort for {}'.format(t))


def flat_sorts(t: SourceType) -> List[Sort]:
    return [sort_of(item) for item in t.flatten()]


def signature(f: FunDef) -> Tuple[Sort, ...]:
    sorts = []
    for _, t in f.params:
        sorts.extend(flat_sorts(t))
    return tuple(sorts + flat_sorts(f.result))


def variable_name(source_name: str) -> str:
    name = source_name.lstrip('_')
    if not name:
        return 'V'
    return name[0].upper() + name[1:]


def _flatten(value: Value) -> List:
    if isinstance(value, tuple):
        return [leaf for item in value for leaf in _flatten(item)]
    return [value]


def _as_value(t: Term) -> Value:
    if isinstance(t, Var) and t.sort == INT:
        return LinExpr.var(t.name)
    elif isinstance(t, IntConst):
        return LinExpr.const(t.value)
    return t


def _single_var(e: LinExpr) -> Optional[str]:
    if len(e.coeffs) == 1 and e.coeffs[0][1] == 1 and e.constant == 0:
        return e.coeffs[0][0]
    return None


class _Path:
    """
    One evaluation path: the conjunction, the body atoms and the list refinements collected so far.
    """
    def __init__(self, constraint=(), atoms=(), subst=None, env=None, taken=frozenset(), nat_lists=frozenset()):
        self.constraint = tuple(constraint)
        self.atoms = tuple(atoms)
        self.subst = dict(subst or {})
        self.env = dict(env or {})
        self.taken = frozenset(taken)
        self.nat_lists = frozenset(nat_lists)

    def _copy(self, **changes) -> '_Path':
        state = dict(constraint=self.constraint, atoms=self.atoms, subst=self.subst, env=self.env, taken=self.taken,
                     nat_lists=self.nat_lists)
        state.update(changes)
        return _Path(**state)

    def constrain(self, *conjuncts) -> '_Path':
        return self._copy(constraint=self.constraint + tuple(conjuncts))

    def call(self, atom: Atom) -> '_Path':
        return self._copy(atoms=self.atoms + (atom,))

    def bind(self, name: str, value: Value) -> '_Path':
        env = dict(self.env)
        env[name] = value
        return self._copy(env=env)

    def refine(self, name: str, term: Term) -> '_Path':
        subst = dict(self.subst)
        subst[name] = term
        return self._copy(subst=subst)

    def fresh(self, base: str, sort: Sort, nat: bool = False) -> Tuple['_Path', Var]:
        name = base if base not in self.taken else fresh_name(base, set(self.taken))
        nat_lists = self.nat_lists | {name} if nat and isinstance(sort, ListSort) else self.nat_lists
        return self._copy(taken=self.taken | {name}, nat_lists=nat_lists), Var(name, sort)

    def resolve(self, t: Term) -> Term:
        if isinstance(t, Var) and t.name in self.subst:
            return self.resolve(self.subst[t.name])
        elif isinstance(t, Cons):
            return Cons(self.resolve(t.head), self.resolve(t.tail))
        return t

    def resolved_subst(self) -> Dict[str, Term]:
        return {name: self.resolve(term) for name, term in self.subst.items()}

    def lookup(self, name: Name) -> Value:
        if name.name not in self.env:
            raise UnsupportedConstructException('{} is not bound here'.format(name.name), name.span)
        value = self.env[name.name]
        return self.resolve(value) if isinstance(value, Term) else value


class _Evaluator:
    """
    Symbolic evaluation of expressions. In contract mode every call must be a catamorphism.
    """
    def __init__(self, functions: Mapping[str, FunDef], catamorphisms: Mapping[str, 'CataFun'] = None,
                 owner: str = None):
        self.functions = functions
        self.catamorphisms = catamorphisms
        self.owner = owner

    def eval(self, e: Expr, path: _Path) -> List[Tuple[_Path, Value]]:
        if isinstance(e, Name):
            return [(path, path.lookup(e))]
        elif isinstance(e, IntLit):
            return [(path, LinExpr.const(e.value))]
        elif isinstance(e, BoolLit):
            return [(path, BoolConst(e.value))]
        elif isinstance(e, NilLit):
            return [(path, Nil(INT))]
        elif isinstance(e, ConsLit):
            result = []
            for p, head in self.eval(e.head, path):
                p, head_term = self.int_term(head, p, e)
                for q, tail in self.eval(e.tail, p):
                    result.append((q, Cons(head_term, self.list_term(tail, e))))
            return result
        elif isinstance(e, TupleLit):
            return self._eval_all(e.items, path)
        elif isinstance(e, Proj):
            result = []
            for p, value in self.eval(e.expr, path):
                if not isinstance(value, tuple) or not 1 <= e.index <= len(value):
                    raise UnsupportedConstructException('projection _{} of {}'.format(e.index, e.expr), e.span)
                result.append((p, value[e.index - 1]))
            return result
        elif isinstance(e, Observe):
            return [(p, pair[0] if e.observer == 'head' else pair[1])
                    for p, pair in self._observe(e, path)]
        elif isinstance(e, Call):
            return self._call(e, path)
        elif isinstance(e, BinOp) and e.op in ('+', '-'):
            result = []
            for p, lhs in self.eval(e.lhs, path):
                for q, rhs in self.eval(e.rhs, p):
                    lhs_e, rhs_e = self.linexpr(lhs, e.lhs), self.linexpr(rhs, e.rhs)
                    result.append((q, lhs_e + rhs_e if e.op == '+' else lhs_e - rhs_e))
            return result
        elif isinstance(e, (BinOp, Not)):
            return [(p, BoolConst(True)) for p in self.cond(e, path, True)] + \
                   [(p, BoolConst(False)) for p in self.cond(e, path, False)]
        elif isinstance(e, IfExpr):
            if self.catamorphisms is not None:
                raise TranslationException('Contract of {} uses a conditional: {}'.format(self.owner, e))
            return [r for p in self.cond(e.cond, path, True) for r in self.eval(e.then, p)] + \
                   [r for p in self.cond(e.cond, path, False) for r in self.eval(e.orelse, p)]
        elif isinstance(e, Match):
            return self._match(e, path)
        elif isinstance(e, Block):
            paths = [path]
            for val in e.vals:
                bound = []
                for p, value in [r for p in paths for r in self.eval(val.expr, p)]:
                    bound.append(self._bind_val(val, p, value))
                paths = bound
            return [r for p in paths for r in self.eval(e.result, p)]
        elif isinstance(e, Forall):
            raise UnsupportedConstructException('forall outside a postcondition', e.span)
        raise UnsupportedConstructException(str(e), getattr(e, 'span', None))

    def _eval_all(self, exprs: Sequence[Expr], path: _Path) -> List[Tuple[_Path, tuple]]:
        results = [(path, ())]
        for item in exprs:
            results = [(q, values + (value,)) for p, values in results for q, value in self.eval(item, p)]
        return results

    def _bind_val(self, val, path: _Path, value: Value) -> _Path:
        if len(val.names) == 1:
            return path.bind(val.names[0], value)
        if not isinstance(value, tuple) or len(value) != len(val.names):
            raise UnsupportedConstructException('cannot destructure {} into {} names'.format(
                val.expr, len(val.names)), val.span)
        for name, item in zip(val.names, value):
            path = path.bind(name, item)
        return path

    def linexpr(self, value: Value, e: Expr) -> LinExpr:
        if isinstance(value, LinExpr):
            return value
        raise UnsupportedConstructException('{} is not an integer'.format(e), getattr(e, 'span', None))

    def list_term(self, value: Value, e: Expr) -> Term:
        if isinstance(value, Term) and isinstance(term_sort(value), ListSort):
            return value
        raise UnsupportedConstructException('{} is not a list'.format(e), getattr(e, 'span', None))

    def int_term(self, value: Value, path: _Path, e: Expr) -> Tuple[_Path, Term]:
        """
        Atom arguments carry no arithmetic: anything but a variable or a constant is named by a fresh variable.
        """
        expr = self.linexpr(value, e)
        if expr.is_constant():
            return path, IntConst(expr.constant)
        single = _single_var(expr)
        if single is not None:
            return path, Var(single, INT)
        path, v = path.fresh('V', INT)
        return path.constrain(LinRel(REL_EQ, LinExpr.var(v.name), expr)), v

    def term(self, value: Value, path: _Path, e: Expr) -> Tuple[_Path, Term]:
        if isinstance(value, LinExpr):
            return self.int_term(value, path, e)
        if isinstance(value, tuple):
            raise UnsupportedConstructException('tuple {} where a single value is expected'.format(e),
                                                getattr(e, 'span', None))
        return path, value

    def _call(self, e: Call, path: _Path) -> List[Tuple[_Path, Value]]:
        callee = self.functions.get(e.func)
        if callee is None:
            raise UnsupportedConstructException('call to unknown function {}'.format(e.func), e.span)
        if self.catamorphisms is not None and e.func not in self.catamorphisms:
            raise TranslationException('Contract of {} calls {}, which is not a catamorphism'.format(
                self.owner, e.func))
        if len(e.args) != len(callee.params):
            raise UnsupportedConstructException('{} expects {} arguments'.format(e.func, len(callee.params)), e.span)
        expected = signature(callee)
        result = []
        for p, values in self._eval_all(e.args, path):
            args = []
            for arg, value in zip(e.args, values):
                for leaf in _flatten(value):
                    p, t = self.term(leaf, p, arg)
                    args.append(t)
            if tuple(term_sort(a) for a in args) != expected[:len(args)] or \
                    len(args) + len(callee.result.flatten()) != len(expected):
                raise UnsupportedConstructException('arguments of {} do not match its parameter types'.format(
                    e.func), e.span)
            outputs = []
            for item in callee.result.flatten():
                sort = sort_of(item)
                p, out = p.fresh(_OUTPUT_BASE.get(sort, 'L'), sort, nat=item.is_list() and item.items[0].name == 'Nat')
                outputs.append(out)
            p = p.call(Atom(e.func, tuple(args) + tuple(outputs)))
            result.append((p, _shape(callee.result, [_as_value(o) for o in outputs])))
        return result

    def _observe(self, e: Observe, path: _Path) -> List[Tuple[_Path, Tuple[Value, Value]]]:
        result = []
        for p, value in self.eval(e.expr, path):
            t = self.list_term(value, e.expr)
            if isinstance(t, Nil):
                logger.debug('{} of an empty list has no value on this path'.format(e))
                continue
            if isinstance(t, Var):
                p, head, tail = self._split_cons(p, t, 'H', 'T')
                t = Cons(head, tail)
            result.append((p, (_as_value(t.head), t.tail)))
        return result

    def _split_cons(self, path: _Path, v: Var, head_base: str, tail_base: str) -> Tuple[_Path, Var, Var]:
        nat = v.name in path.nat_lists
        path, head = path.fresh(head_base, INT)
        path, tail = path.fresh(tail_base, v.sort, nat=nat)
        path = path.refine(v.name, Cons(head, tail))
        if nat and self.catamorphisms is None:
            path = path.constrain(LinRel(REL_GE, LinExpr.var(head.name), LinExpr.const(0)))
        return path, head, tail

    def _match(self, e: Match, path: _Path) -> List[Tuple[_Path, Value]]:
        result = []
        for p, subject in self.eval(e.subject, path):
            t = self.list_term(subject, e.subject)
            for i, case in enumerate(e.cases):
                earlier = [c for c in e.cases[:i] if c.constructor == case.constructor]
                if any(c.guard is None for c in earlier):
                    logger.debug('{} is unreachable'.format(case.pattern()))
                    continue
                opened = self._open_case(case, t, p)
                if opened is None:
                    continue
                q, head, tail = opened
                paths = [q]
                for c in earlier:
                    paths = [r for pp in paths
                             for r in self.cond(c.guard, self._bind_pattern(c, pp, head, tail), False)]
                paths = [self._bind_pattern(case, pp, head, tail) for pp in paths]
                if case.guard is not None:
                    paths = [r for pp in paths for r in self.cond(case.guard, pp, True)]
                result.extend(r for pp in paths for r in self.eval(case.body, pp))
        return result

    def _open_case(self, case: Case, t: Term, path: _Path):
        if case.constructor == 'Nil':
            if isinstance(t, Cons):
                return None
            if isinstance(t, Var):
                path = path.refine(t.name, Nil(INT))
            return path, None, None
        if isinstance(t, Nil):
            return None
        if isinstance(t, Var):
            path, head, tail = self._split_cons(path, t, variable_name(case.head), variable_name(case.tail))
            t = Cons(head, tail)
        return path, _as_value(t.head), t.tail

    @staticmethod
    def _bind_pattern(case: Case, path: _Path, head: Value, tail: Value) -> _Path:
        if case.constructor == 'Cons':
            path = path.bind(case.head, head).bind(case.tail, tail)
        return path

    def cond(self, e: Expr, path: _Path, truth: bool) -> List[_Path]:
        """
        The paths on which e evaluates to truth.
        """
        if isinstance(e, BoolLit):
            return [path] if e.value == truth else []
        elif isinstance(e, Not):
            return self.cond(e.expr, path, not truth)
        elif isinstance(e, BinOp) and e.op in _LOGICAL:
            if e.op == '==>':
                return self.cond(BinOp('||', Not(e.lhs, e.span), e.rhs, e.span), path, truth)
            both = e.op == '&&'
            if truth == both:
                return [q for p in self.cond(e.lhs, path, truth) for q in self.cond(e.rhs, p, truth)]
            return self.cond(e.lhs, path, truth) + \
                [q for p in self.cond(e.lhs, path, not truth) for q in self.cond(e.rhs, p, truth)]
        elif isinstance(e, BinOp) and e.op in _SOURCE_RELATIONS:
            return self._compare(e, path, truth)
        result = []
        for p, value in self.eval(e, path):
            if isinstance(value, BoolConst):
                if value.value == truth:
                    result.append(p)
            elif isinstance(value, Var) and value.sort == BOOL:
                result.append(p.constrain(BoolBind(value.name, truth)))
            else:
                raise UnsupportedConstructException('{} is not a condition'.format(e), getattr(e, 'span', None))
        return result

    def _compare(self, e: BinOp, path: _Path, truth: bool) -> List[_Path]:
        rel = _SOURCE_RELATIONS[e.op]
        if not truth:
            rel = _NEGATED[rel]
        result = []
        for p, lhs in self.eval(e.lhs, path):
            for q, rhs in self.eval(e.rhs, p):
                if isinstance(lhs, LinExpr) and isinstance(rhs, LinExpr):
                    result.append(q.constrain(LinRel(rel, lhs, rhs)))
                elif rel in (REL_EQ, REL_NE) and isinstance(lhs, Term) and term_sort(lhs) == BOOL and \
                        isinstance(rhs, Term) and term_sort(rhs) == BOOL:
                    result.extend(self._bool_equality(q, lhs, rhs, rel == REL_EQ))
                elif rel in (REL_EQ, REL_NE) and isinstance(lhs, Term) and isinstance(rhs, Term) and \
                        isinstance(term_sort(lhs), ListSort):
                    result.extend(self._nil_test(q, lhs, rhs, rel == REL_EQ, e))
                else:
                    raise UnsupportedConstructException('comparison {}'.format(e), e.span)
        return result

    @staticmethod
    def _bool_equality(path: _Path, lhs: Term, rhs: Term, equal: bool) -> List[_Path]:
        if isinstance(lhs, BoolConst) and isinstance(rhs, BoolConst):
            return [path] if (lhs.value == rhs.value) == equal else []
        if isinstance(lhs, BoolConst):
            lhs, rhs = rhs, lhs
        if isinstance(rhs, BoolConst):
            return [path.constrain(BoolBind(lhs.name, rhs.value == equal))]
        return [path.constrain(BoolEq(lhs.name, rhs.name, equal))]

    def _nil_test(self, path: _Path, lhs: Term, rhs: Term, equal: bool, e: BinOp) -> List[_Path]:
        if isinstance(lhs, Nil):
            lhs, rhs = rhs, lhs
        if not isinstance(rhs, Nil):
            raise UnsupportedConstructException('list equality other than a test against Nil()', e.span)
        if isinstance(lhs, Var):
            if equal:
                return [path.refine(lhs.name, Nil(INT))]
            path, _, _ = self._split_cons(path, lhs, 'H', 'T')
            return [path]
        return [path] if isinstance(lhs, Nil) == equal else []


def _shape(t: SourceType, leaves: List[Value]) -> Value:
    if t.name != 'Tuple':
        return leaves[0]
    values, i = [], 0
    for item in t.items:
        n = len(item.flatten())
        values.append(_shape(item, leaves[i:i + n]))
        i += n
    return tuple(values)


def _nat_items(t: SourceType) -> bool:
    return t.is_list() and t.items[0].name == 'Nat'


def _initial_path(f: FunDef) -> Tuple[_Path, List[Var], List[str]]:
    """
    Binds every parameter to fresh variables named after it.
    :return: the path, the head arguments for the parameters and the names of the Nat-typed ones
    """
    path = _Path()
    head_args, nats = [], []
    for name, t in f.params:
        items = t.flatten()
        leaves = []
        for k, item in enumerate(items):
            base = variable_name(name) if len(items) == 1 else '{}{}'.format(variable_name(name), k + 1)
            path, v = path.fresh(base, sort_of(item), nat=_nat_items(item))
            head_args.append(v)
            leaves.append(_as_value(v))
            if item.name == 'Nat':
                nats.append(v.name)
        path = path.bind(name, _shape(t, leaves))
    return path, head_args, nats


def _function_table(fs: Sequence[FunDef], known: Sequence[FunDef]) -> Dict[str, FunDef]:
    table = {f.name: f for f in known}
    table.update({f.name: f for f in fs})
    return table


@dataclass(frozen=True)
class CataFun:
    """
    A function of the shape

        def p(params, l) = l match {
          case Nil() => base
          case Cons(x, xs) => g(params, x, p(update(params, x), xs))
        }

    where g may be spread over several guarded cases.
    """
    fun: FunDef
    list_index: int
    base: Expr
    update: Optional[Tuple[Expr, ...]]
    cases: Tuple[Case, ...]
    total: bool = True

    @property
    def name(self) -> str:
        return self.fun.name

    def spec(self) -> CatamorphismSpec:
        n = len(self.fun.params)
        return CatamorphismSpec(self.fun.name, tuple(i for i in range(n) if i != self.list_index), self.list_index, n,
                                sort_of(self.fun.result), self.total)


def _cons_case_update(f: FunDef, case: Case, list_index: int, scalars: Set[str]):
    """
    Checks one Cons case of a catamorphism candidate.
    :return: the update arguments of its recursive calls with the head renamed to a marker, and as written; or None
        when the case does not fit
    """
    allowed = scalars | {case.head}
    calls = []
    names = []
    for part in ([case.guard] if case.guard is not None else []) + [case.body]:
        for node in walk(part):
            if isinstance(node, (Match, Block, Forall, Observe, Proj, TupleLit, NilLit, ConsLit)):
                return None
            elif isinstance(node, Call):
                if node.func != f.name or part is case.guard:
                    return None
                calls.append(node)
            elif isinstance(node, Name):
                names.append(node.name)
    key, written = None, None
    for call in calls:
        if len(call.args) != len(f.params) or call.args[list_index] != Name(case.tail):
            return None
        args = tuple(a for i, a in enumerate(call.args) if i != list_index)
        if any(isinstance(node, Call) for arg in args for node in walk(arg)):
            return None
        renamed = rename_names(args, {case.head: '#head'})
        if key is not None and renamed != key:
            return None
        key, written = renamed, args
    if names.count(case.tail) != len(calls) or any(n not in allowed for n in names if n != case.tail):
        return None
    return key, written


def _covers(f: FunDef, cases: Sequence[Case], list_index: int) -> bool:
    """
    True when the guards of the Cons cases leave no head value uncovered.
    """
    if any(c.guard is None for c in cases):
        return True
    path, _, nats = _initial_path(f)
    path, head = path.fresh('H', INT)
    path = path.constrain(*[LinRel(REL_GE, LinExpr.var(name), LinExpr.const(0)) for name in nats])
    if _nat_items(f.params[list_index][1]):
        path = path.constrain(LinRel(REL_GE, LinExpr.var(head.name), LinExpr.const(0)))
    evaluator = _Evaluator({})
    paths = [path]
    try:
        for case in cases:
            paths = [q for p in paths for q in evaluator.cond(case.guard, p.bind(case.head, LinExpr.var(head.name)),
                                                            False)]
    except UnsupportedConstructException:
        return False
    return all(is_sat(p.constraint) == UNSAT for p in paths)


def recognize_cata(f: FunDef) -> Optional[CataFun]:
    """
    Decomposes f as a parameterized catamorphism over its only list parameter.
    :param f:
    :return: the decomposition, or None when f does not have the shape
    """
    kinds = [t.is_list() for _, t in f.params]
    if kinds.count(True) != 1 or not f.result.is_scalar() or \
            any(not t.is_list() and not t.is_scalar() for _, t in f.params):
        return None
    list_index = kinds.index(True)
    body = f.body
    if not isinstance(body, Match) or body.subject != Name(f.params[list_index][0]):
        return None
    nil_cases = [c for c in body.cases if c.constructor == 'Nil']
    cons_cases = [c for c in body.cases if c.constructor == 'Cons']
    if len(nil_cases) != 1 or nil_cases[0].guard is not None or not isinstance(nil_cases[0].body, (IntLit, BoolLit)):
        return None
    if not cons_cases:
        return None
    scalars = {name for name, t in f.params if t.is_scalar()}
    key, update = None, None
    for case in cons_cases:
        found = _cons_case_update(f, case, list_index, scalars)
        if found is None:
            return None
        if found[0] is None:
            continue
        if key is not None and found[0] != key:
            return None
        key, update = found[0], update or found[1]
    result = CataFun(f, list_index, nil_cases[0].body, update, tuple(cons_cases),
                      _covers(f, cons_cases, list_index))
    logger.debug('{} is a catamorphism over parameter {}'.format(f.name, list_index))
    return result


def _output(evaluator: _Evaluator, f: FunDef, path: _Path, value: Value) -> Tuple[_Path, List[Term]]:
    leaves = _flatten(value)
    items = f.result.flatten()
    if len(leaves) != len(items):
        raise UnsupportedConstructException('body of {} does not match its result type {}'.format(f.name, f.result),
                                            f.span)
    outputs = []
    for leaf, item in zip(leaves, items):
        sort = sort_of(item)
        if sort == INT:
            expr = evaluator.linexpr(leaf, f.body)
            single = _single_var(expr)
            if single is not None:
                outputs.append(Var(single, INT))
                continue
            path, v = path.fresh('N', INT)
            path = path.constrain(LinRel(REL_EQ, LinExpr.var(v.name), expr))
            outputs.append(v)
        elif isinstance(leaf, BoolConst):
            path, v = path.fresh('B', BOOL)
            path = path.constrain(BoolBind(v.name, leaf.value))
            outputs.append(v)
        elif isinstance(leaf, Term) and term_sort(leaf) == sort:
            outputs.append(leaf)
        else:
            raise UnsupportedConstructException('body of {} does not match its result type {}'.format(
                f.name, f.result), f.span)
    return path, outputs


def translate_function(f: FunDef, functions: Mapping[str, FunDef]) -> List[Clause]:
    """
    One clause per feasible evaluation path of the body of f.
    """
    evaluator = _Evaluator(functions)
    start, head_args, nats = _initial_path(f)
    clauses = []
    for path, value in evaluator.eval(f.body, start):
        path, outputs = _output(evaluator, f, path, value)
        occurring = set(constraint_vars(path.constraint))
        nonneg = [LinRel(REL_GE, LinExpr.var(name), LinExpr.const(0)) for name in nats
                  if f.result.is_scalar() or name in occurring]
        constraint = simplify(path.constraint + tuple(nonneg))
        if constraint == (FALSE_CONJUNCT,):
            logger.info('Dropping an infeasible path of {}'.format(f.name))
            continue
        clause = Clause(Atom(f.name, tuple(head_args) + tuple(outputs)), constraint, path.atoms, origin=PROGRAM)
        clauses.append(apply_subst(clause, path.resolved_subst()))
    logger.debug('{} translated to {} clauses'.format(f.name, len(clauses)))
    return clauses


def translate_program(fs: Sequence[FunDef], known: Sequence[FunDef] = ()) -> ClauseSet:
    """
    Translates function definitions into a clause set.
    :param fs: the functions to translate
    :param known: functions defined elsewhere that fs may call, e.g. those of another source file
    :return: the clauses of fs, with signatures for every predicate they mention
    """
    functions = _function_table(fs, known)
    clauses = []
    for f in fs:
        clauses.extend(translate_function(f, functions))
    preds = [f.name for f in fs] + [a.pred for c in clauses for a in c.body]
    signatures = {pred: signature(functions[pred]) for pred in dict.fromkeys(preds)}
    logger.info('Translated {} functions into {} clauses'.format(len(fs), len(clauses)))
    return ClauseSet(signatures, tuple(clauses))


def _conjuncts(e: Expr, bound: Tuple[Tuple[str, SourceType], ...] = ()):
    """
    Splits a postcondition into (quantified variables, premises, conclusion) triples.
    """
    if isinstance(e, BinOp) and e.op == '&&':
        return _conjuncts(e.lhs, bound) + _conjuncts(e.rhs, bound)
    elif isinstance(e, Forall):
        return _conjuncts(e.body, bound + ((e.var, e.type),))
    elif isinstance(e, BinOp) and e.op == '==>':
        return [(b, (e.lhs,) + premises, c) for b, premises, c in _conjuncts(e.rhs, bound)]
    return [(bound, (), e)]


def _goal_tag(tag: str, nil: bool, used: Set[str]) -> str:
    candidate = tag + ('nil' if nil else '')
    suffix = ord('b')
    result = candidate
    while result in used:
        result = candidate + chr(suffix)
        suffix += 1
    used.add(result)
    return result


def _contract_goals(f: FunDef, evaluator: _Evaluator, bound, premises, conclusion, tag: str) -> List[Clause]:
    path, head_args, _ = _initial_path(f)
    items = f.result.flatten()
    outputs = []
    for k, item in enumerate(items):
        base = variable_name(f.res) if len(items) == 1 else '{}{}'.format(variable_name(f.res), k + 1)
        path, v = path.fresh(base, sort_of(item), nat=_nat_items(item))
        outputs.append(v)
    path = path.bind(f.res, _shape(f.result, [_as_value(v) for v in outputs]))
    for name, t in bound:
        path, v = path.fresh(variable_name(name), sort_of(t))
        path = path.bind(name, _as_value(v))

    paths = [path]
    for premise in ([f.pre] if f.pre is not None else []) + list(premises):
        paths = [q for p in paths for q in evaluator.cond(premise, p, True)]
    paths = [q for p in paths for q in evaluator.cond(conclusion, p, False)]

    fun_atom = Atom(f.name, tuple(head_args) + tuple(outputs))
    res_names = {v.name for v in outputs}
    goals, used = [], set()
    for p in paths:
        before = [a for a in p.atoms if not res_names & {v.name for v in a.variables()}]
        after = [a for a in p.atoms if res_names & {v.name for v in a.variables()}]
        subst = p.resolved_subst()
        nil = any(isinstance(subst.get(v.name), Nil) for v in head_args + outputs)
        goal = apply_subst(Clause(None, p.constraint, tuple(before + [fun_atom] + after), origin=GOAL), subst)
        if is_sat(goal.constraint) == UNSAT:
            logger.info('A case of {} holds trivially: {}'.format(tag, goal))
            continue
        goals.append(Clause(None, goal.constraint, goal.body, tag=_goal_tag(tag, nil, used), origin=GOAL))
    return goals


def translate_contracts(fs: Sequence[FunDef], known: Sequence[FunDef] = (),
                        first_index: int = 1) -> Tuple[List[Clause], List[Lemma]]:
    """
    Turns every postcondition conjunct into goals 'false :- premises, negated conclusion' and reads each goal back as
    a lemma candidate.
    :param fs: the functions whose contracts are translated
    :param known: functions defined elsewhere that the contracts may call
    :param first_index: number of the first goal tag
    :return: the goals, tagged G<n>, and the lemmas obtained from them
    """
    functions = _function_table(fs, known)
    catamorphisms = {}
    for name, g in functions.items():
        cata = recognize_cata(g)
        if cata is not None:
            catamorphisms[name] = cata
    specs = {name: cata.spec() for name, cata in catamorphisms.items()}
    goals, lemmas = [], []
    index = first_index
    for f in fs:
        if f.post is None:
            continue
        evaluator = _Evaluator(functions, catamorphisms, owner=f.name)
        for bound, premises, conclusion in _conjuncts(f.post):
            tag = 'G{}'.format(index)
            index += 1
            for goal in _contract_goals(f, evaluator, bound, premises, conclusion, tag):
                goals.append(goal)
                lemma = lemma_from_goal(goal, specs)
                if lemma is not None:
                    lemmas.append(lemma)
    logger.info('Translated contracts into {} goals and {} lemmas'.format(len(goals), len(lemmas)))
    return goals, lemmas


def function_modes(fs: Iterable[FunDef]) -> Dict[str, int]:
    """
    Number of input arguments of each predicate; the remaining ones are outputs.
    """
    return {f.name: sum(len(t.flatten()) for _, t in f.params) for f in fs}


def build_manifest(fs: Sequence[FunDef], goals: Sequence[Clause], lemmas: Sequence[Lemma],
                   known: Sequence[FunDef] = (), goal_file: str = None) -> Manifest:
    functions = _function_table(fs, known)
    catamorphisms = {}
    for name, f in functions.items():
        cata = recognize_cata(f)
        if cata is not None:
            catamorphisms[name] = cata.spec()
    goal_files = {g.tag: goal_file for g in goals} if goal_file is not None else {}
    return Manifest(catamorphisms, function_modes(functions.values()), {l.name: l for l in lemmas}, goal_files)
