"""
The state of one derivation: the program, the labelled clauses being transformed, the definitions introduced so far,
the lemma store and what is known about catamorphisms and function modes. Every operation returns a new Workspace.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..core.constraints import EngineConfig
from ..core.matching import atom_vars
from ..core.model import (Clause, ClauseSet, DEFINITION, Term, Var, clause_has_list, constraint_vars, fresh_name,
                          is_list_sort, merge_signatures, signatures_of, var_sorts)
from ..core.registry import CatamorphismSpec, Lemma
from ..core.system_helpers import get_logger
from . import rules
from .rules import Definition, DefinitionException, TransformationException

logger = get_logger(__name__)

Labelled = Tuple[str, Clause]


def head_variables(c: Clause, indices: Sequence[int]) -> List[str]:
    """
    Non-list variables of the atoms at indices: those also occurring in the rest of the clause first (head, then
    constraint, then other atoms), then the others, each group in order of occurrence.
    """
    block = [c.body[i] for i in indices]
    sorts = var_sorts(c)
    block_vars = [name for name in atom_vars(block) if not is_list_sort(sorts[name])]
    context = []
    for name in atom_vars([c.head] if c.head is not None else []) + constraint_vars(c.constraint) + \
            atom_vars([a for j, a in enumerate(c.body) if j not in indices]):
        if name not in context:
            context.append(name)
    shared = [name for name in context if name in block_vars]
    return shared + [name for name in block_vars if name not in shared]


@dataclass(frozen=True)
class Workspace:
    program: ClauseSet
    clauses: Tuple[Labelled, ...] = ()
    definitions: Tuple[Definition, ...] = ()
    lemmas: Tuple[Lemma, ...] = ()
    catamorphisms: Mapping[str, CatamorphismSpec] = field(default_factory=dict)
    modes: Mapping[str, int] = field(default_factory=dict)
    counter: int = 0
    config: Optional[EngineConfig] = None

    @staticmethod
    def start(program: ClauseSet, goal: Clause, lemmas: Sequence[Lemma] = (),
              catamorphisms: Mapping[str, CatamorphismSpec] = None, modes: Mapping[str, int] = None,
              config: EngineConfig = None) -> 'Workspace':
        if not goal.is_goal():
            raise ValueError('{} is not a goal'.format(goal))
        return Workspace(program.without_goals(), ((goal.tag or 'G', goal),), (), tuple(lemmas),
                         dict(catamorphisms or {}), dict(modes or {}), 0, config)

    def labels(self) -> List[str]:
        return [label for label, _ in self.clauses]

    def clause(self, label: str) -> Clause:
        for l, c in self.clauses:
            if l == label:
                return c
        raise TransformationException('No clause labelled {}'.format(label))

    def definition(self, name: str) -> Definition:
        for d in self.definitions:
            if d.name == name:
                return d
        raise TransformationException('No definition {}'.format(name))

    def lemma(self, name: str) -> Lemma:
        for l in self.lemmas:
            if l.name == name:
                return l
        raise TransformationException('No lemma {}'.format(name))

    def signatures(self) -> Dict[str, tuple]:
        result = dict(self.program.signatures)
        for d in self.definitions:
            result[d.name] = tuple(var_sorts(d.clause)[v.name] for v in d.head.args)
        return result

    def with_lemmas(self, lemmas: Sequence[Lemma]) -> 'Workspace':
        return replace(self, lemmas=self.lemmas + tuple(lemmas))

    def list_labels(self) -> List[str]:
        return [label for label, c in self.clauses if clause_has_list(c)]

    def fresh_label(self) -> Tuple['Workspace', str]:
        taken = set(self.labels()) | {d.name for d in self.definitions}
        counter = self.counter
        while True:
            counter += 1
            label = 'c{}'.format(counter)
            if label not in taken:
                return replace(self, counter=counter), label

    def _labels_for(self, count: int, labels: Optional[Sequence[str]]) -> Tuple['Workspace', List[str]]:
        if labels is not None:
            if len(labels) != count:
                raise TransformationException('{} labels given for {} clauses'.format(len(labels), count))
            return self, list(labels)
        ws, result = self, []
        for _ in range(count):
            ws, label = ws.fresh_label()
            result.append(label)
        return ws, result

    def _replace(self, label: str, new: Sequence[Labelled]) -> 'Workspace':
        self.clause(label)
        taken = [l for l, _ in self.clauses if l != label]
        for l, _ in new:
            if l in taken:
                raise TransformationException('Label {} is already in use'.format(l))
        clauses = []
        for l, c in self.clauses:
            if l == label:
                clauses.extend(new)
            else:
                clauses.append((l, c))
        return replace(self, clauses=tuple(clauses))

    def _update(self, label: str, c: Optional[Clause], new_label: str = None) -> 'Workspace':
        if c is None:
            logger.info('Dropped {}: unsatisfiable constraint'.format(label))
            return self._replace(label, [])
        return self._replace(label, [(new_label or label, c)])

    def define(self, name: str, label: str, indices: Sequence[int], head: Sequence[str] = None,
               generalize: bool = False) -> Tuple['Workspace', Definition]:
        """
        Introduces a definition whose body is the atoms at the 0-based indices of the clause; its defining clause is
        added to the workspace, labelled with its name.
        """
        c = self.clause(label)
        if not indices or any(not 0 <= i < len(c.body) for i in indices):
            raise DefinitionException('Bad atom positions for {}'.format(name), c)
        if name in self.labels():
            raise DefinitionException('Label {} is already in use'.format(name), c)
        head = list(head) if head is not None else head_variables(c, indices)
        d = rules.define((), [c.body[i] for i in indices], head, name, self.signatures(), generalize)
        ws = replace(self, definitions=self.definitions + (d,), clauses=self.clauses + ((name, d.clause),))
        return ws, d

    def unfold(self, label: str, index: int, labels: Sequence[str] = None) -> Tuple['Workspace', List[str]]:
        c = self.clause(label)
        results = rules.unfold(c, index, self.program, self.config)
        ws, new_labels = self._labels_for(len(results), labels)
        ws = ws._replace(label, list(zip(new_labels, results)))
        if c.origin == DEFINITION:
            ws = ws._mark_unfolded(c.head.pred)
        logger.info('Unfolded {} at {} into {} clauses'.format(label, index + 1, len(results)))
        return ws, new_labels

    def _mark_unfolded(self, name: str) -> 'Workspace':
        definitions = tuple(d.unfolded() if d.name == name else d for d in self.definitions)
        return replace(self, definitions=definitions)

    def fold(self, label: str, name: str, indices: Sequence[int] = None, weak: bool = False,
             new_label: str = None) -> 'Workspace':
        folded = rules.fold(self.clause(label), self.definition(name), indices, weak, self.catamorphisms,
                            self.config)
        return self._update(label, folded, new_label)

    def apply_lemma(self, label: str, lemma: str, new_label: str = None) -> 'Workspace':
        updated = rules.apply_lemma(self.clause(label), self.lemma(lemma), self.catamorphisms, self.config)
        return self._update(label, updated, new_label)

    def add_total_cata(self, label: str, pred: str, list_var: str, params: Sequence[Optional[Term]],
                       new_label: str = None) -> Tuple['Workspace', Var]:
        """
        :param params: parameter terms; None stands for a fresh variable
        """
        c = self.clause(label)
        spec = self.catamorphisms.get(pred)
        if spec is None:
            raise TransformationException('{} is not a catamorphism'.format(pred), c)
        sorts = var_sorts(c)
        if not is_list_sort(sorts.get(list_var)):
            raise TransformationException('{} is not a list variable of the clause'.format(list_var), c)
        signature = self.signatures()[pred]
        taken = set(sorts)
        resolved = []
        for position, param in zip(spec.params, params):
            if param is None:
                name = fresh_name('P', taken)
                taken.add(name)
                param = Var(name, signature[position])
            resolved.append(param)
        updated, out = rules.add_total_cata(c, spec, resolved, Var(list_var, sorts[list_var]))
        return self._replace(label, [(new_label or label, updated)]), out

    def remove(self, label: str, anchor: int, companions: Sequence[int], new_label: str = None) -> 'Workspace':
        updated = rules.remove_true_conjunct(self.clause(label), anchor, companions, self.lemmas, self.catamorphisms,
                                             self.modes, self.config)
        return self._update(label, updated, new_label)

    def cleanup(self) -> 'Workspace':
        kept = rules.kept_indices([c for _, c in self.clauses], self.config)
        return replace(self, clauses=tuple(self.clauses[i] for i in kept))

    def support(self) -> List[Clause]:
        """
        Program clauses of the list-free program predicates the workspace clauses depend on.
        """
        wanted = [a.pred for _, c in self.clauses for a in c.body]
        seen, result = set(), []
        while wanted:
            pred = wanted.pop(0)
            if pred in seen:
                continue
            seen.add(pred)
            defining = self.program.defining(pred)
            if not defining or any(clause_has_list(d) for d in defining):
                continue
            result.extend(defining)
            wanted.extend(a.pred for d in defining for a in d.body)
        return result

    def result(self) -> ClauseSet:
        clauses = [c for _, c in self.clauses] + self.support()
        known = self.signatures()
        used = signatures_of(clauses)
        return ClauseSet(merge_signatures(used, {p: known[p] for p in used if p in known}), tuple(clauses))

