import os
import random
from typing import Dict, List, Optional

from chcpy.core.model import (AtomicConstraint, BoolBind, ClauseSet, LinExpr, LinRel, REL_EQ, REL_GE, REL_GT, REL_LE,
                              REL_LT, REL_NE, check_well_sorted, constraint_vars)

CORPUS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..', '..', 'corpus'))

RANDOM_RELATIONS = (REL_EQ, REL_NE, REL_LE, REL_LT, REL_GE, REL_GT)


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS_DIR, name)


def read_corpus(name: str) -> str:
    with open(corpus_path(name), encoding='utf-8') as f:
        return f.read()


def assert_well_sorted(cs: ClauseSet):
    violations = check_well_sorted(cs)
    assert not violations, '\n'.join(violations)


def holds(c: List[AtomicConstraint], values: Dict[str, object]) -> bool:
    for conjunct in c:
        if isinstance(conjunct, LinRel):
            if not conjunct.holds(values):
                return False
        elif isinstance(conjunct, BoolBind):
            if values[conjunct.var] != conjunct.value:
                return False
        else:
            equal = values[conjunct.lhs] == values[conjunct.rhs]
            if equal != conjunct.equal:
                return False
    return True


def brute_force(c: List[AtomicConstraint], names: List[str], lo: int = -10, hi: int = 10,
                fixed: Dict[str, int] = None) -> Optional[Dict[str, int]]:
    """
    Depth-first enumeration over [lo, hi] for every name, pruning on conjuncts whose variables are all assigned.
    """
    values = dict(fixed or {})
    names = [n for n in names if n not in values]

    def ready(conjunct, assigned):
        return all(v in assigned for v in conjunct.variables())

    def extend(i):
        if not holds([a for a in c if ready(a, values)], values):
            return False
        if i == len(names):
            return True
        for value in range(lo, hi + 1):
            values[names[i]] = value
            if extend(i + 1):
                return True
        del values[names[i]]
        return False

    return dict(values) if extend(0) else None


def random_conjunction(rng: random.Random, names: List[str], max_conjuncts: int = 6,
                       const_range: int = 5) -> List[LinRel]:
    """
    A random conjunction with unit coefficients and at most two variables per conjunct.
    """
    result = []
    for _ in range(rng.randint(1, max_conjuncts)):
        picked = rng.sample(names, rng.randint(1, min(2, len(names))))
        coeffs = {name: rng.choice((1, -1)) for name in picked}
        lhs = LinExpr.from_dict(coeffs)
        rhs = LinExpr.const(rng.randint(-const_range, const_range))
        result.append(LinRel(rng.choice(RANDOM_RELATIONS), lhs, rhs))
    return result


def variables_of(c: List[AtomicConstraint]) -> List[str]:
    return sorted(constraint_vars(c))
