"""
SMT-LIB2 exchange with external Horn solvers: emission of clause sets in the HORN logic and interpretation of what the
solvers print back.
"""
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .constraints import SAT, UNKNOWN, UNSAT
from .model import (AtomicConstraint, BoolBind, BoolConst, BoolEq, BoolSort, Clause, ClauseSet, IntConst, IntSort,
                    LinExpr, ListSort, Nil, REL_EQ, REL_GE, REL_GT, REL_LE, REL_LT, REL_NE, Sort, Term, Var,
                    is_list_free, var_sorts)
from .system_helpers import get_logger

logger = get_logger(__name__)

_SIMPLE_SYMBOL = re.compile(r'^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$')
_RESERVED = {'and', 'or', 'not', 'true', 'false', 'forall', 'exists', 'let', 'assert', 'ite', 'as', 'par', '_', '!',
             'distinct', 'select', 'store'}

_SMT_RELATION = {REL_EQ: '=', REL_LE: '<=', REL_LT: '<', REL_GE: '>=', REL_GT: '>'}


def symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name) and name not in _RESERVED:
        return name
    return '|{}|'.format(name.replace('|', '_'))


def sort_name(sort: Sort) -> str:
    if isinstance(sort, IntSort):
        return 'Int'
    elif isinstance(sort, BoolSort):
        return 'Bool'
    return '{}List'.format(sort_name(sort.element))


def _int(value: int) -> str:
    return str(value) if value >= 0 else '(- {})'.format(-value)


def linexpr_smt(e: LinExpr) -> str:
    terms = []
    for name, coeff in e.coeffs:
        if coeff == 1:
            terms.append(symbol(name))
        elif coeff == -1:
            terms.append('(- {})'.format(symbol(name)))
        else:
            terms.append('(* {} {})'.format(_int(coeff), symbol(name)))
    if e.constant != 0 or not terms:
        terms.append(_int(e.constant))
    if len(terms) == 1:
        return terms[0]
    return '(+ {})'.format(' '.join(terms))


def constraint_smt(a: AtomicConstraint) -> str:
    if isinstance(a, BoolBind):
        return symbol(a.var) if a.value else '(not {})'.format(symbol(a.var))
    elif isinstance(a, BoolEq):
        eq = '(= {} {})'.format(symbol(a.lhs), symbol(a.rhs))
        return eq if a.equal else '(not {})'.format(eq)
    if a.rel == REL_NE:
        return '(not (= {} {}))'.format(linexpr_smt(a.lhs), linexpr_smt(a.rhs))
    return '({} {} {})'.format(_SMT_RELATION[a.rel], linexpr_smt(a.lhs), linexpr_smt(a.rhs))


def term_smt(t: Term) -> str:
    if isinstance(t, Var):
        return symbol(t.name)
    elif isinstance(t, IntConst):
        return _int(t.value)
    elif isinstance(t, BoolConst):
        return 'true' if t.value else 'false'
    elif isinstance(t, Nil):
        return '(as nil {})'.format(sort_name(ListSort(t.elem_sort)))
    return '(cons {} {})'.format(term_smt(t.head), term_smt(t.tail))


def _atom_smt(atom) -> str:
    if not atom.args:
        return symbol(atom.pred)
    return '({} {})'.format(symbol(atom.pred), ' '.join(term_smt(a) for a in atom.args))


def clause_smt(c: Clause) -> str:
    """
    One universally quantified implication.
    """
    premises = [constraint_smt(a) for a in c.constraint] + [_atom_smt(a) for a in c.body]
    head = 'false' if c.head is None else _atom_smt(c.head)
    if not premises:
        formula = head
    else:
        body = premises[0] if len(premises) == 1 else '(and {})'.format(' '.join(premises))
        formula = '(=> {} {})'.format(body, head)
    sorts = var_sorts(c)
    if not sorts:
        return '(assert {})'.format(formula)
    bound = ' '.join('({} {})'.format(symbol(name), sort_name(sort)) for name, sort in sorts.items())
    return '(assert (forall ({}) {}))'.format(bound, formula)


def _list_sorts(cs: ClauseSet) -> List[ListSort]:
    found = []

    def visit(sort):
        if isinstance(sort, ListSort):
            visit(sort.element)
            if sort not in found:
                found.append(sort)

    for sorts in cs.signatures.values():
        for sort in sorts:
            visit(sort)
    for c in cs.clauses:
        for sort in var_sorts(c).values():
            visit(sort)
    return found


def emit_smtlib_horn(cs: ClauseSet, adt: bool = False) -> str:
    """
    Renders a clause set as an SMT-LIB2 script in the HORN logic.
    :param cs:
    :param adt: declare lists as an algebraic datatype instead of rejecting them
    :return:
    """
    if not adt and not is_list_free(cs):
        raise ValueError('Clause set has list arguments; emit it in ADT mode or remove the lists first')
    lines = ['(set-logic HORN)']
    for sort in _list_sorts(cs):
        name, element = sort_name(sort), sort_name(sort.element)
        lines.append('(declare-datatypes (({} 0)) (((nil) (cons (head {}) (tail {})))))'.format(name, element, name))
    for pred, sorts in cs.signatures.items():
        lines.append('(declare-fun {} ({}) Bool)'.format(symbol(pred), ' '.join(sort_name(s) for s in sorts)))
    for c in cs.clauses:
        lines.append(clause_smt(c))
    lines.append('(check-sat)')
    return '\n'.join(lines) + '\n'


@dataclass
class SolverVerdict:
    status: str
    model: Optional[Dict[str, Tuple[Tuple[Tuple[str, str], ...], str]]] = None
    raw: str = field(default='', repr=False)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    def __str__(self):
        return self.status


SExpr = Union[str, List['SExpr']]

_SEXPR_TOKEN = re.compile(r'\s*(?:(\()|(\))|(\|[^|]*\|)|("(?:[^"]|"")*")|([^\s()|";]+)|(;[^\n]*))')


def parse_sexprs(text: str) -> List[SExpr]:
    """
    Reads every s-expression in text. Unbalanced input raises ValueError.
    """
    stack = [[]]
    pos = 0
    while pos < len(text):
        match = _SEXPR_TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            if text[pos:].strip() == '':
                break
            raise ValueError('Cannot read s-expression at offset {}'.format(pos))
        pos = match.end()
        opening, closing, quoted, string, atom, comment = match.groups()
        if opening:
            stack.append([])
        elif closing:
            if len(stack) == 1:
                raise ValueError('Unbalanced parenthesis at offset {}'.format(pos))
            done = stack.pop()
            stack[-1].append(done)
        elif quoted or string or atom:
            stack[-1].append(quoted or string or atom)
    if len(stack) != 1:
        raise ValueError('Unbalanced s-expression')
    return stack[0]


def print_sexpr(e: SExpr) -> str:
    if isinstance(e, str):
        return e
    return '({})'.format(' '.join(print_sexpr(x) for x in e))


def unquote(name: str) -> str:
    if name.startswith('|') and name.endswith('|'):
        return name[1:-1]
    return name


def _define_funs(e: SExpr, found: list):
    if isinstance(e, list):
        if len(e) == 5 and e[0] == 'define-fun':
            found.append(e)
            return
        for item in e:
            _define_funs(item, found)


def parse_solver_output(text: str) -> SolverVerdict:
    """
    Interprets the standard output of a Horn solver. Model extraction is best effort and never changes the verdict.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        return SolverVerdict(UNKNOWN, raw=text)
    first = lines[0].lower()
    if first == 'sat':
        status = SAT
    elif first == 'unsat':
        status = UNSAT
    elif first in ('unknown', 'timeout'):
        status = UNKNOWN
    else:
        logger.warning('Unrecognised solver output: {}'.format(lines[0]))
        return SolverVerdict(UNKNOWN, raw=text)

    model = None
    if status == SAT and len(lines) > 1:
        try:
            found = []
            for e in parse_sexprs('\n'.join(lines[1:])):
                _define_funs(e, found)
            model = {}
            for _, name, formals, _, body in found:
                params = tuple((unquote(p[0]), p[1]) for p in formals)
                model[unquote(name)] = (params, print_sexpr(body))
        except (ValueError, IndexError, TypeError) as e:
            logger.debug('Could not read solver model: {}'.format(e))
            model = None
    return SolverVerdict(status, model, text)
