from typing import Iterable, Sequence

from chcpy.core.matching import variant
from chcpy.core.model import Clause, ClauseSet, signatures_of
from chcpy.core.syntax import parse_clause, print_chc
from chcpy.oracle.lfp import DomainBounds, bounded_lfp, restrict

ORACLE_BOUNDS = DomainBounds(int_min=0, int_max=2, max_list_len=3)


def signatures_for(program: ClauseSet, *clauses: Clause) -> dict:
    """
    Program signatures extended with those of the predicates the given clauses introduce.
    """
    result = dict(signatures_of(clauses))
    result.update(program.signatures)
    return result


def assert_variants(actual: Iterable[Clause], expected: Sequence[str], signatures=None):
    """
    The clauses are, in some order, variants of the expected ones.
    """
    remaining = list(actual)
    listing = print_chc(remaining)
    assert len(remaining) == len(expected), listing
    for text in expected:
        target = parse_clause(text, signatures)
        match = next((c for c in remaining if variant(c, target) is not None), None)
        assert match is not None, 'No variant of {} in\n{}'.format(text, listing)
        remaining.remove(match)


def bounded_meaning(program: ClauseSet, clauses: Iterable[Clause], preds: Iterable[str]) -> set:
    """
    The bounded least model of program plus clauses, restricted to preds.
    """
    clauses = [c for c in clauses if not c.is_goal()]
    cs = program.extend(clauses, signatures_of(clauses))
    return restrict(bounded_lfp(cs, ORACLE_BOUNDS), preds)
