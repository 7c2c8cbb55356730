"""
Decision procedures for conjunctions of linear integer relations and boolean bindings.

Integer reasoning normalises strict inequalities using integrality, eliminates equalities by substitution and then runs
Fourier-Motzkin elimination with gcd tightening. An empty rational shadow proves unsatisfiability; satisfiability is
only claimed with an integer witness found by back-substitution. Anything else is Unknown. Booleans never interact
with integers and are decided separately with a union-find over equalities and bindings.
"""
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .model import (AtomicConstraint, BoolBind, BoolEq, Constraint, FALSE_CONJUNCT, LinExpr, LinRel, REL_EQ,
                    REL_GE, REL_GT, REL_LE, REL_LT, REL_NE, fold_ground_conjuncts)
from .system_helpers import get_logger

logger = get_logger(__name__)

SAT, UNSAT, UNKNOWN = 'sat', 'unsat', 'unknown'

KIND_LE, KIND_EQ, KIND_NE = 'le', 'eq', 'ne'

ROW_CAP = 5000

# half-widths tried in turn for variables unbounded on one side
SEARCH_RADII = (10, 1000)

_TRUE_NODE = '#true'


class EngineConfig:
    """
    Tuning knobs of the constraint engine.
    """
    def __init__(self, max_splits: int = 16, search_budget: int = 20000, cross_check=None):
        """
        :param max_splits: disequality case-split depth
        :param search_budget: nodes explored while looking for an integer witness
        :param cross_check: a SolverConfig; when given every is_sat answer is compared with the external solver
        """
        if max_splits < 0 or search_budget <= 0:
            raise ValueError('Engine limits must be positive')
        self.max_splits = max_splits
        self.search_budget = search_budget
        self.cross_check = cross_check


DEFAULT_CONFIG = EngineConfig()


class _Row:
    """
    sum(coeffs) + const (<=, =, !=) 0 with integer coefficients.
    """
    __slots__ = ('coeffs', 'const', 'kind')

    def __init__(self, coeffs: Dict[str, int], const: int, kind: str):
        self.coeffs = {v: c for v, c in coeffs.items() if c != 0}
        self.const = const
        self.kind = kind

    def key(self):
        return self.kind, tuple(sorted(self.coeffs.items())), self.const

    def substitute(self, var: str, expr: Tuple[Dict[str, int], int]) -> '_Row':
        c = self.coeffs.get(var, 0)
        if c == 0:
            return self
        coeffs = dict(self.coeffs)
        del coeffs[var]
        e_coeffs, e_const = expr
        for v, k in e_coeffs.items():
            coeffs[v] = coeffs.get(v, 0) + c * k
        return _Row(coeffs, self.const + c * e_const, self.kind)

    def value(self, values: Mapping[str, int]) -> int:
        return self.const + sum(c * values[v] for v, c in self.coeffs.items())


def _rows_of(conjunct: LinRel) -> _Row:
    diff = conjunct.lhs - conjunct.rhs
    coeffs, const = diff.as_dict(), diff.constant
    if conjunct.rel == REL_EQ:
        return _Row(coeffs, const, KIND_EQ)
    elif conjunct.rel == REL_NE:
        return _Row(coeffs, const, KIND_NE)
    elif conjunct.rel == REL_LE:
        return _Row(coeffs, const, KIND_LE)
    elif conjunct.rel == REL_LT:
        return _Row(coeffs, const + 1, KIND_LE)
    elif conjunct.rel == REL_GE:
        return _Row({v: -c for v, c in coeffs.items()}, -const, KIND_LE)
    return _Row({v: -c for v, c in coeffs.items()}, -const + 1, KIND_LE)


def _tighten(row: _Row) -> Optional[_Row]:
    """
    Divides by the gcd of the coefficients. Returns None for a row that is trivially true and raises _Infeasible
    for one that is trivially false.
    """
    if not row.coeffs:
        if row.kind == KIND_LE and row.const <= 0:
            return None
        if row.kind == KIND_EQ and row.const == 0:
            return None
        if row.kind == KIND_NE and row.const != 0:
            return None
        raise _Infeasible()
    g = 0
    for c in row.coeffs.values():
        g = gcd(g, abs(c))
    if g == 1:
        return row
    if row.kind == KIND_LE:
        # sum(c/g x) <= -const/g, floored
        return _Row({v: c // g for v, c in row.coeffs.items()}, -((-row.const) // g), KIND_LE)
    if row.const % g != 0:
        if row.kind == KIND_EQ:
            raise _Infeasible()
        return None
    return _Row({v: c // g for v, c in row.coeffs.items()}, row.const // g, row.kind)


class _Infeasible(Exception):
    pass


class _BudgetExhausted(Exception):
    pass


class _BoolSystem:
    """
    Union-find with parity: find(x) returns (root, parity) meaning x == root xor parity.
    """
    def __init__(self):
        self.parent = {}

    def find(self, x: str) -> Tuple[str, bool]:
        parity = False
        path = []
        while self.parent.get(x, (x, False))[0] != x:
            up, p = self.parent[x]
            path.append(x)
            parity ^= p
            x = up
        return x, parity

    def union(self, a: str, b: str, differ: bool):
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            if (pa ^ pb) != differ:
                raise _Infeasible()
            return
        if rb == _TRUE_NODE:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = (ra, pa ^ pb ^ differ)

    def value(self, x: str) -> Optional[bool]:
        root, parity = self.find(x)
        if root == _TRUE_NODE:
            return not parity
        return None


def _split(constraint: Iterable[AtomicConstraint]):
    rows, bools = [], _BoolSystem()
    bool_vars = []
    for conjunct in constraint:
        if isinstance(conjunct, LinRel):
            rows.append(_rows_of(conjunct))
        elif isinstance(conjunct, BoolBind):
            bool_vars.append(conjunct.var)
            bools.union(conjunct.var, _TRUE_NODE, not conjunct.value)
        elif isinstance(conjunct, BoolEq):
            bool_vars.extend([conjunct.lhs, conjunct.rhs])
            bools.union(conjunct.lhs, conjunct.rhs, not conjunct.equal)
        else:
            raise ValueError('Unknown constraint {}'.format(conjunct))
    return rows, bools, bool_vars


def _eliminate_equalities(rows: List[_Row], protected: Set[str] = frozenset()):
    """
    Solves equalities with a unit coefficient for one variable and substitutes it everywhere. Equalities without a
    unit coefficient become a pair of inequalities.
    :return: (remaining rows, [(var, (coeffs, const))] in elimination order)
    """
    eliminated = []
    work = [r for r in rows]
    changed = True
    while changed:
        changed = False
        for i, row in enumerate(work):
            if row.kind != KIND_EQ:
                continue
            row = _tighten(row)
            if row is None:
                work.pop(i)
                changed = True
                break
            candidates = [v for v, c in sorted(row.coeffs.items()) if abs(c) == 1 and v not in protected]
            if not candidates:
                continue
            var = candidates[0]
            c = row.coeffs[var]
            # c*var + rest + const = 0  =>  var = -(rest + const)/c
            expr = ({v: -k * c for v, k in row.coeffs.items() if v != var}, -row.const * c)
            eliminated.append((var, expr))
            work = [r.substitute(var, expr) for j, r in enumerate(work) if j != i]
            changed = True
            break
    result = []
    for row in work:
        if row.kind == KIND_EQ:
            result.append(_Row(row.coeffs, row.const, KIND_LE))
            result.append(_Row({v: -c for v, c in row.coeffs.items()}, -row.const, KIND_LE))
        else:
            result.append(row)
    return result, eliminated


def _normalize_le(rows: Iterable[_Row]) -> List[_Row]:
    best = {}
    for row in rows:
        row = _tighten(row)
        if row is None:
            continue
        key = tuple(sorted(row.coeffs.items()))
        if key not in best or row.const > best[key].const:
            best[key] = row
    return list(best.values())


def _pick_var(rows: List[_Row], candidates: Set[str]) -> Optional[str]:
    best, best_cost = None, None
    for var in sorted(candidates):
        pos = sum(1 for r in rows if r.coeffs.get(var, 0) > 0)
        neg = sum(1 for r in rows if r.coeffs.get(var, 0) < 0)
        if pos + neg == 0:
            continue
        cost = pos * neg - pos - neg
        if best_cost is None or cost < best_cost:
            best, best_cost = var, cost
    return best


def _fourier_motzkin(rows: List[_Row], to_eliminate: Set[str]):
    """
    Eliminates the given variables from a list of <= rows.
    :return: (rows without those variables, stages) where each stage is (var, rows that bounded it)
    """
    rows = _normalize_le(rows)
    stages = []
    remaining = set(to_eliminate)
    while True:
        var = _pick_var(rows, remaining)
        if var is None:
            break
        remaining.discard(var)
        pos = [r for r in rows if r.coeffs.get(var, 0) > 0]
        neg = [r for r in rows if r.coeffs.get(var, 0) < 0]
        rest = [r for r in rows if r.coeffs.get(var, 0) == 0]
        combined = []
        for p in pos:
            a = p.coeffs[var]
            for n in neg:
                b = -n.coeffs[var]
                coeffs = {}
                for v, c in p.coeffs.items():
                    coeffs[v] = coeffs.get(v, 0) + b * c
                for v, c in n.coeffs.items():
                    coeffs[v] = coeffs.get(v, 0) + a * c
                coeffs.pop(var, None)
                combined.append(_Row(coeffs, b * p.const + a * n.const, KIND_LE))
        stages.append((var, pos + neg))
        rows = _normalize_le(rest + combined)
        if len(rows) > ROW_CAP:
            raise _BudgetExhausted()
    return rows, stages


def _bounds(var: str, rows: List[_Row], values: Mapping[str, int]):
    lo, hi = None, None
    for row in rows:
        a = row.coeffs[var]
        rest = row.const + sum(c * values.get(v, 0) for v, c in row.coeffs.items() if v != var)
        if a > 0:
            bound = Fraction(-rest, a)
            hi = bound if hi is None or bound < hi else hi
        else:
            bound = Fraction(rest, -a)
            lo = bound if lo is None or bound > lo else lo
    lo_int = None if lo is None else -((-lo.numerator) // lo.denominator)
    hi_int = None if hi is None else hi.numerator // hi.denominator
    return lo_int, hi_int


def _candidates(lo: Optional[int], hi: Optional[int], radius: int):
    start = 0
    if lo is not None and start < lo:
        start = lo
    if hi is not None and start > hi:
        start = hi
    lo = start - radius if lo is None else lo
    hi = start + radius if hi is None else hi
    yield start
    step = 1
    while True:
        up, down = start + step, start - step
        up_ok = up <= hi
        down_ok = down >= lo
        if not up_ok and not down_ok:
            return
        if up_ok:
            yield up
        if down_ok:
            yield down
        step += 1


def _search(stages, ne_rows: List[_Row], free_vars: List[str], pinned: Set[str],
            budget: List[int], radius: int) -> Optional[Dict[str, int]]:
    """
    Assigns integer values in reverse elimination order, backtracking over candidate values.
    """
    order = [var for var, _ in reversed(stages)] + free_vars
    bounding = dict(stages)
    values = {v: 0 for v in pinned}

    def ne_ok():
        for row in ne_rows:
            if all(v in values for v in row.coeffs) and row.value(values) == 0:
                return False
        return True

    def assign(i: int) -> bool:
        if i == len(order):
            return True
        var = order[i]
        lo, hi = _bounds(var, bounding.get(var, []), values)
        if lo is not None and hi is not None and lo > hi:
            return False
        for value in _candidates(lo, hi, radius):
            budget[0] -= 1
            if budget[0] < 0:
                raise _BudgetExhausted()
            values[var] = value
            if ne_ok() and assign(i + 1):
                return True
            del values[var]
        return False

    if assign(0):
        return values
    return None


def _int_solve(rows: List[_Row], config: EngineConfig, splits_left: int) -> Tuple[str, Optional[Dict[str, int]]]:
    all_vars = set()
    for r in rows:
        all_vars.update(r.coeffs)
    try:
        rows, eliminated = _eliminate_equalities(rows)
        le_rows = [r for r in rows if r.kind == KIND_LE]
        ne_rows = []
        for r in rows:
            if r.kind == KIND_NE:
                tight = _tighten(r)
                if tight is not None:
                    ne_rows.append(tight)
        variables = set()
        for r in le_rows:
            variables.update(r.coeffs)
        _, stages = _fourier_motzkin(le_rows, variables)
    except _Infeasible:
        return UNSAT, None
    except _BudgetExhausted:
        return UNKNOWN, None

    staged = {var for var, _ in stages}
    # cancelled out before their own stage: keep the 0 that bounded their neighbours
    pinned = {v for _, bounding in stages for r in bounding for v in r.coeffs} - staged
    free = sorted({v for r in ne_rows for v in r.coeffs} - staged - pinned)
    values, budget = None, [config.search_budget]
    try:
        for radius in SEARCH_RADII:
            values = _search(stages, ne_rows, free, pinned, budget, radius)
            if values is not None:
                break
    except _BudgetExhausted:
        values = None
    if values is not None:
        solved = {var for var, _ in eliminated}
        for var in all_vars - solved:
            values.setdefault(var, 0)
        for var, (coeffs, const) in reversed(eliminated):
            values[var] = const + sum(c * values.get(v, 0) for v, c in coeffs.items())
        return SAT, values
    if not ne_rows:
        return UNKNOWN, None
    if splits_left <= 0:
        logger.debug('Disequality split limit reached')
        return UNKNOWN, None

    first, others = ne_rows[0], ne_rows[1:]
    below = _Row(dict(first.coeffs), first.const + 1, KIND_LE)
    above = _Row({v: -c for v, c in first.coeffs.items()}, -first.const + 1, KIND_LE)
    verdicts = []
    for branch in (below, above):
        base = [r for r in le_rows] + others + [branch]
        branch_rows = _restore(base, eliminated)
        verdict, model = _int_solve(branch_rows, config, splits_left - 1)
        if verdict == SAT:
            return SAT, model
        verdicts.append(verdict)
    if all(v == UNSAT for v in verdicts):
        return UNSAT, None
    return UNKNOWN, None


def _restore(rows: List[_Row], eliminated) -> List[_Row]:
    """
    Re-adds eliminated equalities so a branch can be solved independently.
    """
    result = list(rows)
    for var, (coeffs, const) in eliminated:
        eq = dict({v: -c for v, c in coeffs.items()})
        eq[var] = eq.get(var, 0) + 1
        result.append(_Row(eq, -const, KIND_EQ))
    return result


def _bool_model(bools: _BoolSystem, names: Iterable[str]) -> Dict[str, bool]:
    model = {}
    for name in names:
        root, parity = bools.find(name)
        if root == _TRUE_NODE:
            model[name] = not parity
        else:
            model[name] = parity
    return model


def _decide(c: Iterable[AtomicConstraint], config: EngineConfig):
    c = fold_ground_conjuncts(c)
    try:
        rows, bools, bool_vars = _split(c)
    except _Infeasible:
        return UNSAT, None
    verdict, values = _int_solve(rows, config, config.max_splits)
    if verdict != SAT:
        return verdict, None
    model = dict(values)
    model.update(_bool_model(bools, bool_vars))
    return SAT, model


def is_sat(c: Iterable[AtomicConstraint], config: EngineConfig = None) -> str:
    """
    Decides satisfiability of a conjunction over integers and booleans.
    :param c:
    :param config:
    :return: SAT, UNSAT or UNKNOWN
    """
    config = config or DEFAULT_CONFIG
    c = tuple(c)
    verdict, _ = _decide(c, config)
    if config.cross_check is not None and verdict != UNKNOWN:
        _cross_check(c, verdict, config.cross_check)
    return verdict


def _cross_check(c: Constraint, verdict: str, solver_config):
    from ..solver.client import solve_constraint
    external = solve_constraint(c, solver_config)
    if external != UNKNOWN and external != verdict:
        logger.error('Constraint engine and external solver disagree on {}: {} vs {}'.format(
            ', '.join(str(a) for a in c), verdict, external))


def find_model(c: Iterable[AtomicConstraint], config: EngineConfig = None) -> Optional[Dict[str, Union[int, bool]]]:
    """
    Returns an integer/boolean assignment satisfying c, or None when none was found.
    """
    verdict, model = _decide(tuple(c), config or DEFAULT_CONFIG)
    return model if verdict == SAT else None


def negate_atomic(a: AtomicConstraint) -> List[AtomicConstraint]:
    """
    The alternatives whose disjunction is the negation of a.
    """
    if isinstance(a, BoolBind):
        return [BoolBind(a.var, not a.value)]
    if isinstance(a, BoolEq):
        return [BoolEq(a.lhs, a.rhs, not a.equal)]
    opposite = {REL_LE: [REL_GT], REL_LT: [REL_GE], REL_GE: [REL_LT], REL_GT: [REL_LE],
                REL_NE: [REL_EQ], REL_EQ: [REL_LT, REL_GT]}
    return [LinRel(rel, a.lhs, a.rhs) for rel in opposite[a.rel]]


def entails(c1: Iterable[AtomicConstraint], c2: Iterable[AtomicConstraint], config: EngineConfig = None) -> bool:
    """
    True only if every solution of c1 satisfies c2. Unknown answers count as not entailed.
    """
    c1 = tuple(c1)
    if is_sat(c1, config) == UNSAT:
        return True
    for conjunct in c2:
        if conjunct in c1:
            continue
        for alternative in negate_atomic(conjunct):
            if is_sat(c1 + (alternative,), config) != UNSAT:
                return False
    return True


def equivalent(c1: Iterable[AtomicConstraint], c2: Iterable[AtomicConstraint], config: EngineConfig = None) -> bool:
    c1, c2 = tuple(c1), tuple(c2)
    return entails(c1, c2, config) and entails(c2, c1, config)


def _first_var(coeffs: Mapping[str, int]) -> str:
    return sorted(coeffs)[0]


def row_to_atomic(coeffs: Mapping[str, int], const: int, kind: str) -> LinRel:
    """
    Prints sum(coeffs)+const REL 0 with the first variable (by name) on the left with a positive coefficient.
    """
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    if not coeffs:
        rel = {KIND_LE: REL_LE, KIND_EQ: REL_EQ, KIND_NE: REL_NE}[kind]
        return LinRel(rel, LinExpr.const(const), LinExpr.const(0))
    flip = coeffs[_first_var(coeffs)] < 0
    if flip:
        coeffs = {v: -c for v, c in coeffs.items()}
        const = -const
    lhs = LinExpr.from_dict({v: c for v, c in coeffs.items() if c > 0})
    rhs = LinExpr.from_dict({v: -c for v, c in coeffs.items() if c < 0}, -const)
    if kind == KIND_LE:
        return LinRel(REL_GE if flip else REL_LE, lhs, rhs)
    return LinRel(REL_EQ if kind == KIND_EQ else REL_NE, lhs, rhs)


def _normal_form(conjunct: AtomicConstraint) -> Optional[AtomicConstraint]:
    if not isinstance(conjunct, LinRel):
        if isinstance(conjunct, BoolEq) and conjunct.rhs < conjunct.lhs:
            return BoolEq(conjunct.rhs, conjunct.lhs, conjunct.equal)
        return conjunct
    row = _rows_of(conjunct)
    try:
        row = _tighten(row)
    except _Infeasible:
        return FALSE_CONJUNCT
    if row is None:
        return None
    return row_to_atomic(row.coeffs, row.const, row.kind)


def normalize(c: Iterable[AtomicConstraint]) -> Constraint:
    """
    Rewrites every conjunct into the internal normal form and drops duplicates and trivially true conjuncts.
    """
    result = []
    for conjunct in c:
        normal = _normal_form(conjunct)
        if normal is None:
            continue
        if normal == FALSE_CONJUNCT:
            return (FALSE_CONJUNCT,)
        if normal not in result:
            result.append(normal)
    return tuple(result)


def simplify(c: Iterable[AtomicConstraint], config: EngineConfig = None) -> Constraint:
    """
    Returns an equivalent constraint in normal form without duplicate or entailed conjuncts.
    """
    c = normalize(c)
    if c == (FALSE_CONJUNCT,) or is_sat(c, config) == UNSAT:
        return (FALSE_CONJUNCT,)
    kept = list(c)
    i = 0
    while i < len(kept):
        others = tuple(kept[:i] + kept[i + 1:])
        if others and entails(others, (kept[i],), config):
            kept.pop(i)
        else:
            i += 1
    return tuple(kept)


def project(c: Iterable[AtomicConstraint], keep: Iterable[str], config: EngineConfig = None) -> Constraint:
    """
    Existentially eliminates every variable not in keep. The result is entailed by c and, for unit-coefficient
    constraints, is the exact projection.
    :param c:
    :param keep: names of the variables to retain
    :param config:
    :return:
    """
    keep = set(keep)
    c = fold_ground_conjuncts(c)
    try:
        rows, bools, bool_vars = _split(c)
    except _Infeasible:
        return (FALSE_CONJUNCT,)

    result = []
    classes = {}
    for name in bool_vars:
        if name not in keep:
            continue
        root, parity = bools.find(name)
        classes.setdefault(root, [])
        if (name, parity) not in classes[root]:
            classes[root].append((name, parity))
    for root, members in classes.items():
        if root == _TRUE_NODE:
            for name, parity in members:
                result.append(BoolBind(name, not parity))
        else:
            first, first_parity = members[0]
            for name, parity in members[1:]:
                result.append(BoolEq(first, name, first_parity == parity))

    int_vars = set()
    for r in rows:
        int_vars.update(r.coeffs)
    drop = int_vars - keep
    try:
        rows, _ = _eliminate_equalities(rows, protected=keep)
        le_rows = [r for r in rows if r.kind == KIND_LE]
        ne_rows = [r for r in rows if r.kind == KIND_NE and not (set(r.coeffs) & drop)]
        shadow, _ = _fourier_motzkin(le_rows, drop)
    except _Infeasible:
        return (FALSE_CONJUNCT,)
    except _BudgetExhausted:
        logger.warning('Projection gave up; keeping constraints over retained variables only')
        return tuple(a for a in c if set(a.variables()) <= keep)

    shadow = _pair_equalities(shadow)
    for row in shadow + ne_rows:
        try:
            row = _tighten(row)
        except _Infeasible:
            return (FALSE_CONJUNCT,)
        if row is not None:
            result.append(row_to_atomic(row.coeffs, row.const, row.kind))
    return simplify(result, config)


def _pair_equalities(rows: List[_Row]) -> List[_Row]:
    """
    Merges e <= 0 and -e <= 0 back into e = 0.
    """
    by_key = {tuple(sorted(r.coeffs.items())): r for r in rows}
    used = set()
    result = []
    for key, row in by_key.items():
        if key in used:
            continue
        negated = tuple(sorted((v, -c) for v, c in row.coeffs.items()))
        other = by_key.get(negated)
        if other is not None and negated not in used and other.const == -row.const:
            used.update({key, negated})
            result.append(_Row(row.coeffs, row.const, KIND_EQ))
        else:
            used.add(key)
            result.append(row)
    return result
