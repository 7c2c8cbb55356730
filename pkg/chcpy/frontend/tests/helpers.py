from dataclasses import replace
from itertools import product
from typing import Dict, List, Mapping, Sequence, Set

from chcpy.core.matching import variant
from chcpy.core.model import Atom, Clause, INT, LinRel, REL_EQ, Var, apply_subst
from chcpy.core.syntax import print_chc
from chcpy.frontend.source import (BinOp, Block, BoolLit, Call, ConsLit, FunDef, IfExpr, IntLit, Match, Name, NilLit,
                                   Not, Observe, Proj, SourceType, TupleLit)
from chcpy.frontend.translate import signature, sort_of
from chcpy.oracle.lfp import DomainBounds, ground_atom, to_python


class InterpreterError(Exception):
    def __init__(self, message):
        self.message = message


_OPERATORS = {
    '+': lambda a, b: a + b,
    '-': lambda a, b: a - b,
    '==': lambda a, b: a == b,
    '!=': lambda a, b: a != b,
    '<': lambda a, b: a < b,
    '<=': lambda a, b: a <= b,
    '>': lambda a, b: a > b,
    '>=': lambda a, b: a >= b,
}


def evaluate(e, env: Dict[str, object], functions: Mapping[str, FunDef]):
    """
    Direct evaluation of the source language. Lists are Python tuples of ints.
    """
    if isinstance(e, Name):
        return env[e.name]
    elif isinstance(e, (IntLit, BoolLit)):
        return e.value
    elif isinstance(e, NilLit):
        return ()
    elif isinstance(e, ConsLit):
        return (evaluate(e.head, env, functions),) + evaluate(e.tail, env, functions)
    elif isinstance(e, Call):
        return interpret(functions, e.func, [evaluate(a, env, functions) for a in e.args])
    elif isinstance(e, TupleLit):
        return tuple(evaluate(item, env, functions) for item in e.items)
    elif isinstance(e, Proj):
        return evaluate(e.expr, env, functions)[e.index - 1]
    elif isinstance(e, Observe):
        value = evaluate(e.expr, env, functions)
        if not value:
            raise InterpreterError('{} of an empty list'.format(e.observer))
        return value[0] if e.observer == 'head' else value[1:]
    elif isinstance(e, Not):
        return not evaluate(e.expr, env, functions)
    elif isinstance(e, BinOp) and e.op == '&&':
        return evaluate(e.lhs, env, functions) and evaluate(e.rhs, env, functions)
    elif isinstance(e, BinOp) and e.op == '||':
        return evaluate(e.lhs, env, functions) or evaluate(e.rhs, env, functions)
    elif isinstance(e, BinOp) and e.op == '==>':
        return not evaluate(e.lhs, env, functions) or evaluate(e.rhs, env, functions)
    elif isinstance(e, BinOp):
        return _OPERATORS[e.op](evaluate(e.lhs, env, functions), evaluate(e.rhs, env, functions))
    elif isinstance(e, IfExpr):
        branch = e.then if evaluate(e.cond, env, functions) else e.orelse
        return evaluate(branch, env, functions)
    elif isinstance(e, Match):
        value = evaluate(e.subject, env, functions)
        for case in e.cases:
            if case.constructor == 'Nil':
                if value:
                    continue
                inner = env
            else:
                if not value:
                    continue
                inner = dict(env)
                inner[case.head] = value[0]
                inner[case.tail] = value[1:]
            if case.guard is None or evaluate(case.guard, inner, functions):
                return evaluate(case.body, inner, functions)
        raise InterpreterError('no case matches {}'.format(value))
    elif isinstance(e, Block):
        inner = dict(env)
        for val in e.vals:
            value = evaluate(val.expr, inner, functions)
            if len(val.names) == 1:
                inner[val.names[0]] = value
            else:
                inner.update(zip(val.names, value))
        return evaluate(e.result, inner, functions)
    raise InterpreterError('cannot evaluate {}'.format(e))


def interpret(functions: Mapping[str, FunDef], name: str, args: Sequence):
    f = functions[name]
    return evaluate(f.body, dict(zip(f.param_names(), args)), functions)


def _flatten_value(value, t: SourceType) -> List:
    if t.name != 'Tuple':
        return [value]
    return [leaf for item, item_type in zip(value, t.items) for leaf in _flatten_value(item, item_type)]


def function_graph(functions: Mapping[str, FunDef], name: str, bounds: DomainBounds) -> Set[Atom]:
    """
    Input/output pairs of the interpreter for every in-bounds input, as ground atoms. Pairs whose output leaves the
    bounds are left out.
    """
    f = functions[name]
    signatures = {name: signature(f)}
    pools = [[to_python(t) for t in bounds.pool(sort_of(t))] for _, t in f.params]
    graph = set()
    for inputs in product(*pools):
        try:
            output = interpret(functions, name, inputs)
        except InterpreterError:
            continue
        atom = ground_atom(name, list(inputs) + _flatten_value(output, f.result), signatures)
        if all(bounds.contains(a) for a in atom.args):
            graph.add(atom)
    return graph


def _single(e) -> str:
    if len(e.coeffs) == 1 and e.coeffs[0][1] == 1 and e.constant == 0:
        return e.coeffs[0][0]
    return None


def solved(c: Clause) -> Clause:
    """
    Eliminates equalities between two integer variables by substitution, so that N=M, count(X,Ys,M) and
    count(X,Ys,N) compare equal.
    """
    while True:
        for conjunct in c.constraint:
            if isinstance(conjunct, LinRel) and conjunct.rel == REL_EQ and _single(conjunct.lhs) and \
                    _single(conjunct.rhs):
                rest = tuple(a for a in c.constraint if a is not conjunct)
                c = apply_subst(replace(c, constraint=rest), {_single(conjunct.lhs): Var(_single(conjunct.rhs), INT)})
                break
        else:
            return c


def assert_same_clauses(actual: Sequence[Clause], expected: Sequence[Clause]):
    """
    Every expected clause has its own variant among the actual ones, up to equalities between variables.
    """
    assert len(actual) == len(expected), print_chc(list(actual))
    remaining = [solved(c) for c in actual]
    for c in expected:
        target = solved(c)
        match = next((a for a in remaining if variant(a, target) is not None), None)
        assert match is not None, 'No translated clause is a variant of {}\n{}'.format(c, print_chc(list(actual)))
        remaining.remove(match)
