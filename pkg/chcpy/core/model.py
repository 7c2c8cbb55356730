from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

PROGRAM, GOAL, DEFINITION, DERIVED = 'program', 'goal', 'definition', 'derived'
ORIGINS = (PROGRAM, GOAL, DEFINITION, DERIVED)

REL_EQ, REL_NE, REL_LE, REL_LT, REL_GE, REL_GT = '=', '!=', '<=', '<', '>=', '>'
RELATIONS = (REL_EQ, REL_NE, REL_LE, REL_LT, REL_GE, REL_GT)

# printed the way the clause listings write them
REL_TEXT = {REL_EQ: '=', REL_NE: '=\\=', REL_LE: '=<', REL_LT: '<', REL_GE: '>=', REL_GT: '>'}


class IllSortedSubstitutionException(Exception):
    """
    Raised when a substitution maps a variable to a term of a different sort.
    """
    def __init__(self, var, term):
        self.var = var
        self.term = term

    def __str__(self):
        return 'Cannot substitute {} for variable {}'.format(self.term, self.var)


class Sort:
    pass


@dataclass(frozen=True)
class IntSort(Sort):
    def __str__(self):
        return 'Int'


@dataclass(frozen=True)
class BoolSort(Sort):
    def __str__(self):
        return 'Bool'


@dataclass(frozen=True)
class ListSort(Sort):
    element: Sort

    def __str__(self):
        return 'List({})'.format(self.element)


INT = IntSort()
BOOL = BoolSort()
INT_LIST = ListSort(INT)


def is_list_sort(sort: Sort) -> bool:
    return isinstance(sort, ListSort)


class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: Sort

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class IntConst(Term):
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BoolConst(Term):
    value: bool

    def __str__(self):
        return 'true' if self.value else 'false'


@dataclass(frozen=True)
class Nil(Term):
    elem_sort: Sort = INT

    def __str__(self):
        return '[]'


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term

    def __post_init__(self):
        tail_sort = term_sort(self.tail)
        if not isinstance(tail_sort, ListSort) or tail_sort.element != term_sort(self.head):
            raise ValueError('Ill-sorted list cell [{}|{}]'.format(self.head, self.tail))

    def __str__(self):
        items, rest = [], self
        while isinstance(rest, Cons):
            items.append(str(rest.head))
            rest = rest.tail
        if isinstance(rest, Nil):
            return '[{}]'.format(','.join(items))
        return '[{}|{}]'.format(','.join(items), rest)


def term_sort(t: Term) -> Sort:
    if isinstance(t, Var):
        return t.sort
    elif isinstance(t, IntConst):
        return INT
    elif isinstance(t, BoolConst):
        return BOOL
    elif isinstance(t, Nil):
        return ListSort(t.elem_sort)
    elif isinstance(t, Cons):
        return term_sort(t.tail)
    raise ValueError('Not a term: {}'.format(t))


def make_list(items: List[Term], tail: Term = None, elem_sort: Sort = INT) -> Term:
    result = tail if tail is not None else Nil(elem_sort)
    for item in reversed(items):
        result = Cons(item, result)
    return result


def term_vars(t: Term) -> List[Var]:
    """
    Variables of a term in left-to-right order, with repetitions.
    """
    if isinstance(t, Var):
        return [t]
    elif isinstance(t, Cons):
        return term_vars(t.head) + term_vars(t.tail)
    return []


def term_has_list(t: Term) -> bool:
    return is_list_sort(term_sort(t))


def is_constructor(t: Term) -> bool:
    return isinstance(t, (Nil, Cons))


@dataclass(frozen=True)
class LinExpr:
    """
    A linear integer expression sum(coeff * var) + constant. Coefficients are kept sorted by variable name and never
    zero, so structural equality is semantic equality.
    """
    coeffs: Tuple[Tuple[str, int], ...] = ()
    constant: int = 0

    @staticmethod
    def from_dict(coeffs: Mapping[str, int], constant: int = 0) -> 'LinExpr':
        return LinExpr(tuple(sorted((v, c) for v, c in coeffs.items() if c != 0)), constant)

    @staticmethod
    def var(name: str, coeff: int = 1) -> 'LinExpr':
        return LinExpr.from_dict({name: coeff})

    @staticmethod
    def const(value: int) -> 'LinExpr':
        return LinExpr((), value)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.coeffs)

    def variables(self) -> List[str]:
        return [v for v, _ in self.coeffs]

    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> int:
        return self.as_dict().get(name, 0)

    def __add__(self, other: 'LinExpr') -> 'LinExpr':
        merged = self.as_dict()
        for v, c in other.coeffs:
            merged[v] = merged.get(v, 0) + c
        return LinExpr.from_dict(merged, self.constant + other.constant)

    def __neg__(self) -> 'LinExpr':
        return self.scale(-1)

    def __sub__(self, other: 'LinExpr') -> 'LinExpr':
        return self + (-other)

    def scale(self, k: int) -> 'LinExpr':
        return LinExpr.from_dict({v: c * k for v, c in self.coeffs}, self.constant * k)

    def substitute(self, mapping: Mapping[str, 'LinExpr']) -> 'LinExpr':
        result = LinExpr.const(self.constant)
        for v, c in self.coeffs:
            if v in mapping:
                result = result + mapping[v].scale(c)
            else:
                result = result + LinExpr.var(v, c)
        return result

    def rename(self, mapping: Mapping[str, str]) -> 'LinExpr':
        return self.substitute({old: LinExpr.var(new) for old, new in mapping.items()})

    def evaluate(self, values: Mapping[str, int]) -> int:
        return self.constant + sum(c * values[v] for v, c in self.coeffs)

    def __str__(self):
        parts = []
        for v, c in self.coeffs:
            if c == 1:
                text = v
            elif c == -1:
                text = '-' + v
            else:
                text = '{}*{}'.format(c, v)
            if parts and not text.startswith('-'):
                text = '+' + text
            parts.append(text)
        if self.constant or not parts:
            if parts and self.constant > 0:
                parts.append('+{}'.format(self.constant))
            else:
                parts.append(str(self.constant))
        return ''.join(parts)


class AtomicConstraint:
    def variables(self) -> List[str]:
        raise NotImplementedError

    def rename(self, mapping: Mapping[str, str]) -> 'AtomicConstraint':
        raise NotImplementedError


@dataclass(frozen=True)
class LinRel(AtomicConstraint):
    rel: str
    lhs: LinExpr
    rhs: LinExpr

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError('Unknown relation {}'.format(self.rel))

    def variables(self) -> List[str]:
        return self.lhs.variables() + [v for v in self.rhs.variables() if v not in self.lhs.variables()]

    def rename(self, mapping: Mapping[str, str]) -> 'LinRel':
        return LinRel(self.rel, self.lhs.rename(mapping), self.rhs.rename(mapping))

    def is_ground(self) -> bool:
        return self.lhs.is_constant() and self.rhs.is_constant()

    def holds(self, values: Mapping[str, int] = None) -> bool:
        values = values or {}
        return compare(self.rel, self.lhs.evaluate(values), self.rhs.evaluate(values))

    def __str__(self):
        rhs = str(self.rhs)
        sep = ' ' if rhs.startswith('-') else ''
        return '{}{}{}{}'.format(self.lhs, REL_TEXT[self.rel], sep, rhs)


@dataclass(frozen=True)
class BoolBind(AtomicConstraint):
    var: str
    value: bool

    def variables(self) -> List[str]:
        return [self.var]

    def rename(self, mapping: Mapping[str, str]) -> 'BoolBind':
        return BoolBind(mapping.get(self.var, self.var), self.value)

    def __str__(self):
        return '{}={}'.format(self.var, 'true' if self.value else 'false')


@dataclass(frozen=True)
class BoolEq(AtomicConstraint):
    lhs: str
    rhs: str
    equal: bool = True

    def variables(self) -> List[str]:
        return [self.lhs] if self.lhs == self.rhs else [self.lhs, self.rhs]

    def rename(self, mapping: Mapping[str, str]) -> 'BoolEq':
        return BoolEq(mapping.get(self.lhs, self.lhs), mapping.get(self.rhs, self.rhs), self.equal)

    def __str__(self):
        return '{}{}{}'.format(self.lhs, '=' if self.equal else '=\\=', self.rhs)


Constraint = Tuple[AtomicConstraint, ...]

FALSE_CONJUNCT = LinRel(REL_EQ, LinExpr.const(0), LinExpr.const(1))


def compare(rel: str, a: int, b: int) -> bool:
    if rel == REL_EQ:
        return a == b
    elif rel == REL_NE:
        return a != b
    elif rel == REL_LE:
        return a <= b
    elif rel == REL_LT:
        return a < b
    elif rel == REL_GE:
        return a >= b
    return a > b


def constraint_vars(constraint: Iterable[AtomicConstraint]) -> List[str]:
    seen = []
    for conjunct in constraint:
        for v in conjunct.variables():
            if v not in seen:
                seen.append(v)
    return seen


def fold_ground_conjuncts(constraint: Iterable[AtomicConstraint]) -> Constraint:
    """
    Evaluates variable-free relations: true ones disappear, a false one collapses the constraint to 0=1.
    """
    result = []
    for conjunct in constraint:
        if isinstance(conjunct, LinRel) and conjunct.is_ground():
            if not conjunct.holds():
                return (FALSE_CONJUNCT,)
            continue
        if isinstance(conjunct, BoolEq) and conjunct.lhs == conjunct.rhs:
            if not conjunct.equal:
                return (FALSE_CONJUNCT,)
            continue
        if conjunct not in result:
            result.append(conjunct)
    return tuple(result)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...]

    def variables(self) -> List[Var]:
        result = []
        for arg in self.args:
            for v in term_vars(arg):
                if v not in result:
                    result.append(v)
        return result

    def has_list(self) -> bool:
        return any(term_has_list(a) for a in self.args)

    def __str__(self):
        if not self.args:
            return self.pred
        return '{}({})'.format(self.pred, ','.join(str(a) for a in self.args))


@dataclass(frozen=True)
class Clause:
    head: Optional[Atom]
    constraint: Constraint = ()
    body: Tuple[Atom, ...] = ()
    tag: Optional[str] = field(default=None, compare=False)
    origin: str = field(default=DERIVED, compare=False)

    def is_goal(self) -> bool:
        return self.head is None

    def atoms(self) -> List[Atom]:
        return ([self.head] if self.head is not None else []) + list(self.body)

    def __str__(self):
        head = 'false' if self.head is None else str(self.head)
        parts = [str(c) for c in self.constraint] + [str(a) for a in self.body]
        if not parts:
            return '{} :- .'.format(head) if self.head is None else '{}.'.format(head)
        return '{} :- {}.'.format(head, ', '.join(parts))


Signatures = Mapping[str, Tuple[Sort, ...]]


@dataclass(frozen=True)
class ClauseSet:
    signatures: Signatures = field(default_factory=dict)
    clauses: Tuple[Clause, ...] = ()

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def predicates(self) -> List[str]:
        return list(self.signatures.keys())

    def defining(self, pred: str) -> List[Clause]:
        return [c for c in self.clauses if c.head is not None and c.head.pred == pred]

    def goals(self) -> List[Clause]:
        return [c for c in self.clauses if c.is_goal()]

    def without_goals(self) -> 'ClauseSet':
        return ClauseSet(self.signatures, tuple(c for c in self.clauses if not c.is_goal()))

    def by_tag(self, tag: str) -> Optional[Clause]:
        for c in self.clauses:
            if c.tag == tag:
                return c
        return None

    def extend(self, clauses: Iterable[Clause], signatures: Signatures = None) -> 'ClauseSet':
        merged = merge_signatures(self.signatures, signatures or {})
        return ClauseSet(merged, self.clauses + tuple(clauses))

    def __str__(self):
        return '\n'.join(str(c) for c in self.clauses)


def merge_signatures(first: Signatures, second: Signatures) -> Dict[str, Tuple[Sort, ...]]:
    merged = dict(first)
    for pred, sorts in second.items():
        if pred in merged and tuple(merged[pred]) != tuple(sorts):
            raise ValueError('Conflicting signatures for {}: {} vs {}'.format(pred, merged[pred], sorts))
        merged[pred] = tuple(sorts)
    return merged


def signatures_of(clauses: Iterable[Clause]) -> Dict[str, Tuple[Sort, ...]]:
    result = {}
    for clause in clauses:
        for atom in clause.atoms():
            result.setdefault(atom.pred, tuple(term_sort(a) for a in atom.args))
    return result


def var_sorts(c: Clause) -> Dict[str, Sort]:
    """
    Sort of every variable of the clause: atom occurrences carry it, constraint occurrences imply it.
    """
    sorts = {}
    for atom in c.atoms():
        for v in atom.variables():
            sorts.setdefault(v.name, v.sort)
    for conjunct in c.constraint:
        sort = INT if isinstance(conjunct, LinRel) else BOOL
        for name in conjunct.variables():
            sorts.setdefault(name, sort)
    return sorts


def free_vars(c: Clause) -> Set[str]:
    return set(var_sorts(c).keys())


def ordered_vars(c: Clause) -> List[str]:
    """
    Variable names in order of first occurrence: head, body atoms, then constraint.
    """
    names = []
    for atom in c.atoms():
        for v in atom.variables():
            if v.name not in names:
                names.append(v.name)
    for name in constraint_vars(c.constraint):
        if name not in names:
            names.append(name)
    return names


def _subst_term(t: Term, s: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        if t.name in s:
            image = s[t.name]
            if term_sort(image) != t.sort:
                raise IllSortedSubstitutionException(t.name, image)
            return image
        return t
    elif isinstance(t, Cons):
        return Cons(_subst_term(t.head, s), _subst_term(t.tail, s))
    return t


def subst_atom(atom: Atom, s: Mapping[str, Term]) -> Atom:
    return Atom(atom.pred, tuple(_subst_term(a, s) for a in atom.args))


def _as_linexpr(t: Term, name: str) -> LinExpr:
    if isinstance(t, Var) and t.sort == INT:
        return LinExpr.var(t.name)
    elif isinstance(t, IntConst):
        return LinExpr.const(t.value)
    raise IllSortedSubstitutionException(name, t)


def subst_constraint(constraint: Iterable[AtomicConstraint], s: Mapping[str, Term]) -> Constraint:
    linear = {}
    for name, t in s.items():
        if term_sort(t) == INT:
            linear[name] = _as_linexpr(t, name)
    result = []
    for conjunct in constraint:
        if isinstance(conjunct, LinRel):
            for name in conjunct.variables():
                if name in s and term_sort(s[name]) != INT:
                    raise IllSortedSubstitutionException(name, s[name])
            result.append(LinRel(conjunct.rel, conjunct.lhs.substitute(linear), conjunct.rhs.substitute(linear)))
        elif isinstance(conjunct, BoolBind):
            image = s.get(conjunct.var)
            if image is None:
                result.append(conjunct)
            elif isinstance(image, BoolConst):
                if image.value != conjunct.value:
                    result.append(FALSE_CONJUNCT)
            elif isinstance(image, Var) and image.sort == BOOL:
                result.append(BoolBind(image.name, conjunct.value))
            else:
                raise IllSortedSubstitutionException(conjunct.var, image)
        else:
            result.append(_subst_bool_eq(conjunct, s))
    return fold_ground_conjuncts(result)


def _subst_bool_eq(conjunct: BoolEq, s: Mapping[str, Term]) -> AtomicConstraint:
    sides = []
    for name in (conjunct.lhs, conjunct.rhs):
        image = s.get(name, Var(name, BOOL))
        if term_sort(image) != BOOL:
            raise IllSortedSubstitutionException(name, image)
        sides.append(image)
    left, right = sides
    if isinstance(left, BoolConst) and isinstance(right, BoolConst):
        holds = (left.value == right.value) == conjunct.equal
        return LinRel(REL_EQ, LinExpr.const(0), LinExpr.const(0 if holds else 1))
    if isinstance(left, BoolConst):
        left, right = right, left
    if isinstance(right, BoolConst):
        return BoolBind(left.name, right.value if conjunct.equal else not right.value)
    return BoolEq(left.name, right.name, conjunct.equal)


def apply_subst(c: Clause, s: Mapping[str, Term]) -> Clause:
    """
    Simultaneous substitution over head, constraint and body. Integer images must be variables or constants, since
    atoms carry no arithmetic.
    :param c:
    :param s: variable name to term
    :return:
    """
    head = subst_atom(c.head, s) if c.head is not None else None
    body = tuple(subst_atom(a, s) for a in c.body)
    return replace(c, head=head, constraint=subst_constraint(c.constraint, s), body=body)


def rename_vars(c: Clause, mapping: Mapping[str, str]) -> Clause:
    if not mapping:
        return c
    sorts = var_sorts(c)
    s = {old: Var(new, sorts[old]) for old, new in mapping.items() if old in sorts}
    head = subst_atom(c.head, s) if c.head is not None else None
    body = tuple(subst_atom(a, s) for a in c.body)
    constraint = tuple(conj.rename(mapping) for conj in c.constraint)
    return replace(c, head=head, constraint=constraint, body=body)


def fresh_name(base: str, taken: Set[str]) -> str:
    stem = base.rstrip('0123456789') or base
    k = 1
    while '{}{}'.format(stem, k) in taken:
        k += 1
    return '{}{}'.format(stem, k)


def rename_apart(c: Clause, avoid: Set[str]) -> Clause:
    """
    Returns a variant of c sharing no variable with avoid. Clashing variables get the first free numeric suffix.
    """
    names = ordered_vars(c)
    taken = set(avoid) | set(names)
    mapping = {}
    for name in names:
        if name in avoid:
            new = fresh_name(name, taken)
            taken.add(new)
            mapping[name] = new
    return rename_vars(c, mapping)


class FreshNames:
    """
    Monotone generator of variable names with a reserved prefix, one per derivation.
    """
    def __init__(self, prefix: str = 'V', start: int = 0):
        self.prefix = prefix
        self.counter = start

    def next(self) -> str:
        name = '{}{}'.format(self.prefix, self.counter)
        self.counter += 1
        return name

    def var(self, sort: Sort) -> Var:
        return Var(self.next(), sort)


def canonical_name(index: int) -> str:
    letter = chr(ord('A') + index % 26)
    round_ = index // 26
    return letter if round_ == 0 else '{}{}'.format(letter, round_)


def canonical_names(c: Clause) -> Clause:
    """
    Renames variables to A, B, ..., Z, A1, ... in order of first occurrence.
    """
    names = ordered_vars(c)
    mapping = {name: canonical_name(i) for i, name in enumerate(names)}
    # rename through temporaries so swaps such as A<->B stay simultaneous
    temp = {name: '_t{}'.format(i) for i, name in enumerate(names)}
    renamed = rename_vars(c, temp)
    return rename_vars(renamed, {temp[n]: mapping[n] for n in names})


def clause_has_list(c: Clause) -> bool:
    return any(a.has_list() for a in c.atoms())


def list_vars(c: Clause) -> List[str]:
    return [name for name, sort in var_sorts(c).items() if is_list_sort(sort)]


def is_list_free(cs: ClauseSet) -> bool:
    if any(any(is_list_sort(s) for s in sorts) for sorts in cs.signatures.values()):
        return False
    return not any(clause_has_list(c) for c in cs.clauses)


def check_well_sorted(cs: ClauseSet) -> List[str]:
    """
    Validates every clause against the signatures.
    :param cs:
    :return: a list of violations, empty when the set is well-sorted
    """
    violations = []
    for c in cs.clauses:
        seen = {}
        for atom in c.atoms():
            sorts = cs.signatures.get(atom.pred)
            if sorts is None:
                violations.append('{}: undeclared predicate {}'.format(c, atom.pred))
                continue
            if len(sorts) != len(atom.args):
                violations.append('{}: {} expects {} arguments'.format(c, atom.pred, len(sorts)))
                continue
            for arg, sort in zip(atom.args, sorts):
                if term_sort(arg) != sort:
                    violations.append('{}: argument {} of {} is not {}'.format(c, arg, atom.pred, sort))
            for v in atom.variables():
                if seen.setdefault(v.name, v.sort) != v.sort:
                    violations.append('{}: variable {} used with two sorts'.format(c, v.name))
        for conjunct in c.constraint:
            expected = INT if isinstance(conjunct, LinRel) else BOOL
            for name in conjunct.variables():
                if seen.setdefault(name, expected) != expected:
                    violations.append('{}: variable {} used with two sorts'.format(c, name))
    return violations
