"""
One-way matching of atoms and the variant test between clauses.
"""
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .constraints import EngineConfig, entails, equivalent, project
from .model import Atom, Clause, Cons, Term, Var, term_sort

Subst = Dict[str, Term]


def match_term(pattern: Term, target: Term, s: Subst) -> Optional[Subst]:
    """
    Extends s so that pattern under s equals target. Only pattern variables get bound.
    """
    if isinstance(pattern, Var):
        bound = s.get(pattern.name)
        if bound is not None:
            return s if bound == target else None
        if term_sort(target) != pattern.sort:
            return None
        extended = dict(s)
        extended[pattern.name] = target
        return extended
    if isinstance(pattern, Cons):
        if not isinstance(target, Cons):
            return None
        s = match_term(pattern.head, target.head, s)
        return None if s is None else match_term(pattern.tail, target.tail, s)
    return s if pattern == target else None


def match_atom(pattern: Atom, target: Atom, s: Subst) -> Optional[Subst]:
    if pattern.pred != target.pred or len(pattern.args) != len(target.args):
        return None
    for p, t in zip(pattern.args, target.args):
        s = match_term(p, t, s)
        if s is None:
            return None
    return s


def match_atoms(patterns: Sequence[Atom], targets: Sequence[Atom], s: Subst = None,
                allowed: Sequence[int] = None) -> Iterator[Tuple[Subst, Tuple[int, ...]]]:
    """
    Enumerates injective matches of the pattern atoms into the target atoms. Patterns are matched in order and each
    one takes the leftmost target that fits, so the first result is the leftmost match.
    :param patterns:
    :param targets:
    :param s: initial bindings
    :param allowed: indices of targets that may be used, all of them by default
    :return: pairs of (substitution, target index for each pattern)
    """
    allowed = list(range(len(targets))) if allowed is None else list(allowed)

    def search(i: int, s: Subst, used: Tuple[int, ...]):
        if i == len(patterns):
            yield s, used
            return
        for j in allowed:
            if j in used:
                continue
            extended = match_atom(patterns[i], targets[j], s)
            if extended is not None:
                yield from search(i + 1, extended, used + (j,))

    yield from search(0, dict(s or {}), ())


def is_renaming(s: Subst) -> bool:
    images = [t for t in s.values()]
    return all(isinstance(t, Var) for t in images) and len({t.name for t in images}) == len(images)


def atom_vars(atoms: Sequence[Atom]) -> List[str]:
    names = []
    for atom in atoms:
        for v in atom.variables():
            if v.name not in names:
                names.append(v.name)
    return names


def _renamings(c1: Clause, c2: Clause) -> Iterator[Dict[str, str]]:
    if (c1.head is None) != (c2.head is None) or len(c1.body) != len(c2.body):
        return
    start = {}
    if c1.head is not None:
        start = match_atom(c1.head, c2.head, {})
        if start is None or not is_renaming(start):
            return
    vars1 = atom_vars(c1.atoms())
    for s, _ in match_atoms(c1.body, c2.body, start):
        if is_renaming(s):
            yield {name: s[name].name for name in vars1 if name in s}


def variant(c1: Clause, c2: Clause, config: EngineConfig = None) -> Optional[Dict[str, str]]:
    """
    Decides whether c1 and c2 are equal up to a bijective renaming of variables, a permutation of body atoms and
    equivalence of their constraints projected onto the atom variables.
    :return: the renaming from the variables of c1 to those of c2, or None
    """
    projected2 = project(c2.constraint, atom_vars(c2.atoms()), config)
    projected1 = project(c1.constraint, atom_vars(c1.atoms()), config)
    for mapping in _renamings(c1, c2):
        if equivalent(tuple(a.rename(mapping) for a in projected1), projected2, config):
            return mapping
    return None


def subsumes(general: Clause, specific: Clause, config: EngineConfig = None) -> Optional[Dict[str, str]]:
    """
    Like variant, but the projected constraint of specific only has to entail that of general. Dropping specific
    from a set that keeps general then preserves the least model.
    :return: the renaming from the variables of general to those of specific, or None
    """
    projected_specific = project(specific.constraint, atom_vars(specific.atoms()), config)
    projected_general = project(general.constraint, atom_vars(general.atoms()), config)
    for mapping in _renamings(general, specific):
        if entails(projected_specific, tuple(a.rename(mapping) for a in projected_general), config):
            return mapping
    return None
