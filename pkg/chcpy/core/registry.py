"""
Knowledge about predicates that the transformation rules rely on: catamorphism specs, function modes and lemmas
obtained from proved goals. A manifest file carries all three between the translator and later runs.
"""
import os
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import yaml

from .model import (Atom, BOOL, BoolBind, BoolConst, BoolEq, Clause, Constraint, DERIVED, INT, LinRel, REL_NE,
                    Signatures, Sort, Var, term_vars)
from .syntax import parse_clause
from .system_helpers import get_logger

logger = get_logger(__name__)

SORT_NAMES = {'Int': INT, 'Bool': BOOL}


class ManifestException(Exception):
    def __init__(self, message: str):
        self.message = message

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class CatamorphismSpec:
    """
    Argument layout of a parameterized catamorphism predicate p(params..., list, output).
    """
    pred: str
    params: Tuple[int, ...]
    list_position: int
    output: int
    output_sort: Sort
    total: bool = True

    def inputs(self) -> Tuple[int, ...]:
        return tuple(sorted(self.params + (self.list_position,)))

    def to_dict(self) -> dict:
        return {'params': list(self.params), 'list': self.list_position, 'output': self.output,
                'sort': str(self.output_sort), 'total': self.total}

    @staticmethod
    def from_dict(pred: str, data: Mapping) -> 'CatamorphismSpec':
        try:
            return CatamorphismSpec(pred, tuple(data['params']), int(data['list']), int(data['output']),
                                    SORT_NAMES[data['sort']], bool(data.get('total', True)))
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestException('Bad catamorphism entry for {}: {}'.format(pred, e))


@dataclass(frozen=True)
class Lemma:
    """
    premises /\\ premise_constraint ==> conclusion, valid in the least model once the goal it comes from is proved.
    """
    name: str
    premises: Tuple[Atom, ...]
    premise_constraint: Constraint
    conclusion: Atom

    def as_clause(self) -> Clause:
        return Clause(self.conclusion, self.premise_constraint, self.premises, tag=self.name, origin=DERIVED)

    @staticmethod
    def from_clause(name: str, c: Clause) -> 'Lemma':
        if c.head is None:
            raise ManifestException('Lemma {} has no conclusion'.format(name))
        return Lemma(name, c.body, c.constraint, c.head)

    def __str__(self):
        return str(self.as_clause())


def lemma_from_goal(goal: Clause, catamorphisms: Mapping[str, CatamorphismSpec]) -> Optional[Lemma]:
    """
    Reads a goal 'false :- premises, negated conclusion' back as an implication. The conclusion is the last body atom,
    which must be a catamorphism whose output is only constrained by the negating conjunct: a boolean binding, or a
    disequality with another variable.
    :param goal:
    :param catamorphisms:
    :return: the lemma, or None when the goal does not have that shape
    """
    if not goal.is_goal() or not goal.body:
        return None
    last = goal.body[-1]
    spec = catamorphisms.get(last.pred)
    if spec is None:
        return None
    out = last.args[spec.output]
    if not isinstance(out, Var):
        return None
    related = [a for a in goal.constraint if out.name in a.variables()]
    others = [a for a in goal.body[:-1] if out in a.variables()]
    if len(related) != 1 or others or sum(1 for arg in last.args if out in term_vars(arg)) != 1:
        return None
    negation = related[0]
    if isinstance(negation, BoolBind):
        value = BoolConst(not negation.value)
    elif isinstance(negation, BoolEq) and not negation.equal:
        value = Var(negation.rhs if negation.lhs == out.name else negation.lhs, BOOL)
    elif isinstance(negation, LinRel) and negation.rel == REL_NE and \
            len(negation.lhs.coeffs) == 1 and len(negation.rhs.coeffs) == 1 and \
            not negation.lhs.constant and not negation.rhs.constant and \
            negation.lhs.coeffs[0][1] == 1 and negation.rhs.coeffs[0][1] == 1:
        names = negation.lhs.variables() + negation.rhs.variables()
        other = names[1] if names[0] == out.name else names[0]
        value = Var(other, INT)
    else:
        return None
    args = tuple(value if i == spec.output else a for i, a in enumerate(last.args))
    constraint = tuple(a for a in goal.constraint if a is not negation)
    return Lemma(goal.tag or 'lemma', goal.body[:-1], constraint, Atom(last.pred, args))


@dataclass
class Manifest:
    """
    Catamorphism specs, function modes (number of input arguments) and lemma candidates per goal tag.
    """
    catamorphisms: Dict[str, CatamorphismSpec] = field(default_factory=dict)
    modes: Dict[str, int] = field(default_factory=dict)
    lemmas: Dict[str, Lemma] = field(default_factory=dict)
    goal_files: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        goals = {}
        for tag in list(self.goal_files) + [t for t in self.lemmas if t not in self.goal_files]:
            entry = {}
            if tag in self.goal_files:
                entry['file'] = self.goal_files[tag]
            if tag in self.lemmas:
                entry['lemma'] = str(self.lemmas[tag])
            goals[tag] = entry
        return {'catamorphisms': {pred: spec.to_dict() for pred, spec in self.catamorphisms.items()},
                'modes': dict(self.modes),
                'goals': goals}

    @staticmethod
    def from_dict(data: Mapping, signatures: Signatures = None) -> 'Manifest':
        data = data or {}
        catamorphisms = {pred: CatamorphismSpec.from_dict(pred, entry)
                         for pred, entry in (data.get('catamorphisms') or {}).items()}
        modes = {pred: int(n) for pred, n in (data.get('modes') or {}).items()}
        lemmas, goal_files = {}, {}
        for tag, entry in (data.get('goals') or {}).items():
            tag = str(tag)
            entry = entry or {}
            if 'file' in entry:
                goal_files[tag] = entry['file']
            if entry.get('lemma'):
                lemmas[tag] = Lemma.from_clause(tag, parse_clause(entry['lemma'], signatures))
        return Manifest(catamorphisms, modes, lemmas, goal_files)

    def merge(self, other: 'Manifest') -> 'Manifest':
        return Manifest({**self.catamorphisms, **other.catamorphisms}, {**self.modes, **other.modes},
                        {**self.lemmas, **other.lemmas}, {**self.goal_files, **other.goal_files})


def read_manifest(path: str, signatures: Signatures = None) -> Manifest:
    with open(path, encoding='utf-8') as f:
        data = yaml.safe_load(f)
    logger.debug('Read manifest {}'.format(path))
    manifest = Manifest.from_dict(data, signatures)
    base = os.path.dirname(os.path.abspath(path))
    manifest.goal_files = {tag: os.path.join(base, f) for tag, f in manifest.goal_files.items()}
    return manifest


def write_manifest(path: str, manifest: Manifest):
    with open(path, 'w', encoding='utf-8') as f:
        yaml.dump(manifest.to_dict(), stream=f, default_flow_style=False, sort_keys=False)
