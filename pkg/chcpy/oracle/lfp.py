"""
Bounded bottom-up evaluation of clause sets.

Clauses are instantiated over a finite domain: integers in [int_min, int_max], booleans, and lists over that integer
range up to max_list_len elements. Constraints of ground instances are evaluated with plain arithmetic, so nothing here
depends on the constraint engine.
"""
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set

from ..core.matching import match_atom
from ..core.model import (Atom, BOOL, BoolBind, BoolConst, Clause, ClauseSet, Cons, INT, IntConst, LinRel, ListSort,
                          Nil, Signatures, Sort, Term, apply_subst, make_list, subst_atom, var_sorts)
from ..core.system_helpers import get_logger

logger = get_logger(__name__)

DEFAULT_GROUND_TERM_CAP = 10 ** 6


class GroundTermCapException(Exception):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap

    def __str__(self):
        return 'Refusing to enumerate {} ground instances (cap {})'.format(self.count, self.cap)


class DomainBounds:
    def __init__(self,
                 int_min: int = 0,
                 int_max: int = 2,
                 max_list_len: int = 3,
                 max_iterations: int = 100,
                 ground_term_cap: int = DEFAULT_GROUND_TERM_CAP):
        if int_min > int_max:
            raise ValueError('int_min {} is greater than int_max {}'.format(int_min, int_max))
        if max_list_len < 0 or max_iterations <= 0 or ground_term_cap <= 0:
            raise ValueError('Domain bounds must be positive')
        self.int_min = int_min
        self.int_max = int_max
        self.max_list_len = max_list_len
        self.max_iterations = max_iterations
        self.ground_term_cap = ground_term_cap
        self._pools = {}

    @staticmethod
    def parse(text: str, **kwargs) -> 'DomainBounds':
        """
        Reads bounds written as "min,max,len".
        """
        try:
            int_min, int_max, max_list_len = (int(part) for part in text.split(','))
        except ValueError:
            raise ValueError('Bounds must be written min,max,len, got {!r}'.format(text))
        return DomainBounds(int_min, int_max, max_list_len, **kwargs)

    def ints(self) -> List[Term]:
        return [IntConst(i) for i in range(self.int_min, self.int_max + 1)]

    def pool(self, sort: Sort) -> List[Term]:
        """
        Every ground term of the sort within bounds, shortest lists first.
        """
        if sort not in self._pools:
            if sort == INT:
                terms = self.ints()
            elif sort == BOOL:
                terms = [BoolConst(False), BoolConst(True)]
            elif isinstance(sort, ListSort):
                elements = self.pool(sort.element)
                terms = []
                for n in range(self.max_list_len + 1):
                    for items in product(elements, repeat=n):
                        terms.append(make_list(list(items), elem_sort=sort.element))
            else:
                raise ValueError('No domain for sort {}'.format(sort))
            self._pools[sort] = terms
        return self._pools[sort]

    def contains(self, t: Term) -> bool:
        if isinstance(t, IntConst):
            return self.int_min <= t.value <= self.int_max
        elif isinstance(t, (BoolConst, Nil)):
            return True
        elif isinstance(t, Cons):
            length = 0
            while isinstance(t, Cons):
                if not self.contains(t.head):
                    return False
                length += 1
                t = t.tail
            return length <= self.max_list_len and self.contains(t)
        return False

    def __str__(self):
        return 'ints {}..{}, lists up to {}'.format(self.int_min, self.int_max, self.max_list_len)


def to_term(value, sort: Sort) -> Term:
    if sort == BOOL:
        return BoolConst(bool(value))
    elif sort == INT:
        if isinstance(value, bool):
            raise ValueError('{} is not an integer'.format(value))
        return IntConst(int(value))
    elif isinstance(sort, ListSort):
        return make_list([to_term(v, sort.element) for v in value], elem_sort=sort.element)
    raise ValueError('No term of sort {} for {}'.format(sort, value))


def to_python(t: Term):
    if isinstance(t, (IntConst, BoolConst)):
        return t.value
    elif isinstance(t, Nil):
        return ()
    elif isinstance(t, Cons):
        return (to_python(t.head),) + to_python(t.tail)
    raise ValueError('{} is not ground'.format(t))


def ground_atom(pred: str, values: Sequence, signatures: Signatures) -> Atom:
    """
    Builds a ground atom from Python values: ints, bools and sequences of ints for lists.
    """
    sorts = signatures[pred]
    if len(sorts) != len(values):
        raise ValueError('{} takes {} arguments, got {}'.format(pred, len(sorts), len(values)))
    return Atom(pred, tuple(to_term(v, s) for v, s in zip(values, sorts)))


def restrict(atoms: Iterable[Atom], preds: Iterable[str]) -> Set[Atom]:
    preds = set(preds)
    return {a for a in atoms if a.pred in preds}


def _holds(c: Clause, binding: Mapping[str, Term]) -> bool:
    values = {name: t.value for name, t in binding.items() if isinstance(t, (IntConst, BoolConst))}
    for conjunct in c.constraint:
        if isinstance(conjunct, LinRel):
            if not conjunct.holds(values):
                return False
        elif isinstance(conjunct, BoolBind):
            if values[conjunct.var] != conjunct.value:
                return False
        elif (values[conjunct.lhs] == values[conjunct.rhs]) != conjunct.equal:
            return False
    return True


class _Facts:
    """
    Derived atoms per predicate, in derivation order.
    """
    def __init__(self):
        self.by_pred: Dict[str, List[Atom]] = {}
        self.all: Set[Atom] = set()

    def add(self, atom: Atom) -> bool:
        if atom in self.all:
            return False
        self.all.add(atom)
        self.by_pred.setdefault(atom.pred, []).append(atom)
        return True

    def get(self, pred: str) -> List[Atom]:
        return self.by_pred.get(pred, [])


def _join(body: Sequence[Atom], sources: Sequence[_Facts], binding: Dict[str, Term]):
    if not body:
        yield binding
        return
    for fact in sources[0].get(body[0].pred):
        extended = match_atom(body[0], fact, binding)
        if extended is not None:
            yield from _join(body[1:], sources[1:], extended)


def _instances(c: Clause, sources: Sequence[_Facts], bounds: DomainBounds):
    """
    Ground substitutions for c whose body atoms come from sources (one per body atom) and whose constraint holds.
    """
    bindings = list(_join(c.body, sources, {}))
    if not bindings:
        return
    bound = set(bindings[0])
    free = [(name, sort) for name, sort in var_sorts(c).items() if name not in bound]
    pools = [bounds.pool(sort) for _, sort in free]
    count = len(bindings)
    for pool in pools:
        count *= len(pool)
    if count > bounds.ground_term_cap:
        logger.error('Clause {} needs {} ground instances'.format(c, count))
        raise GroundTermCapException(count, bounds.ground_term_cap)
    for binding in bindings:
        for values in product(*pools):
            full = dict(binding)
            full.update((name, value) for (name, _), value in zip(free, values))
            if _holds(c, full):
                yield full


def bounded_lfp(cs: ClauseSet, bounds: DomainBounds = None) -> Set[Atom]:
    """
    Semi-naive bottom-up evaluation of the immediate consequence operator over the bounded domain. Heads with terms
    outside the bounds are discarded.
    :param cs: definite clauses; goals are ignored
    :param bounds:
    :return: the derived ground atoms
    """
    bounds = bounds or DomainBounds()
    clauses = [c for c in cs.clauses if not c.is_goal()]
    total, delta = _Facts(), _Facts()

    def derive(c: Clause, sources: Sequence[_Facts], new: _Facts):
        for binding in _instances(c, sources, bounds):
            head = subst_atom(c.head, binding)
            if all(bounds.contains(a) for a in head.args) and head not in total.all:
                new.add(head)

    for c in clauses:
        if not c.body:
            derive(c, [], delta)
    for atoms in delta.by_pred.values():
        for a in atoms:
            total.add(a)

    iteration = 1
    while delta.all:
        if iteration >= bounds.max_iterations:
            logger.warning('Bounded evaluation stopped after {} iterations with {} atoms'.format(
                iteration, len(total.all)))
            break
        old = _Facts()
        for a in total.all - delta.all:
            old.add(a)
        new = _Facts()
        for c in clauses:
            n = len(c.body)
            for i in range(n):
                sources = [old] * i + [delta] + [total] * (n - i - 1)
                derive(c, sources, new)
        for atoms in new.by_pred.values():
            for a in atoms:
                total.add(a)
        delta = new
        iteration += 1
    logger.debug('Bounded least model over {} has {} atoms after {} iterations'.format(
        bounds, len(total.all), iteration))
    return set(total.all)


def goal_violated(atoms: Iterable[Atom], g: Clause, bounds: DomainBounds = None) -> Optional[Clause]:
    """
    Looks for a ground instance of g that is false in the given interpretation: body atoms and constraint hold, and
    the head is absent (always, for a goal). Instances whose head leaves the bounds are not judged.
    :param atoms: typically the result of bounded_lfp on the program
    :param g: a goal, or any clause such as a lemma
    :param bounds:
    :return: the violating ground instance, or None
    """
    bounds = bounds or DomainBounds()
    facts = _Facts()
    for a in sorted(atoms, key=str):
        facts.add(a)
    for binding in _instances(g, [facts] * len(g.body), bounds):
        if g.head is not None:
            head = subst_atom(g.head, binding)
            if not all(bounds.contains(a) for a in head.args) or head in facts.all:
                continue
        witness = apply_subst(g, binding)
        logger.info('Bounded counterexample: {}'.format(witness))
        return witness
    return None
