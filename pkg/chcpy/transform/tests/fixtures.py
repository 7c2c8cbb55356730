from typing import Dict, List

import pytest

from chcpy.core.model import BOOL, Clause, INT
from chcpy.core.registry import CatamorphismSpec, Lemma, lemma_from_goal
from chcpy.transform.rules import Definition, define


@pytest.fixture
def catamorphisms() -> Dict[str, CatamorphismSpec]:
    return {
        'all_grt': CatamorphismSpec('all_grt', (0,), 1, 2, BOOL),
        'all_leq': CatamorphismSpec('all_leq', (0,), 1, 2, BOOL),
        'count': CatamorphismSpec('count', (0,), 1, 2, INT),
        'isSorted': CatamorphismSpec('isSorted', (0,), 1, 2, BOOL),
    }


@pytest.fixture
def modes() -> Dict[str, int]:
    return {'partition': 2, 'quicksort': 1, 'append': 2}


@pytest.fixture
def partition_lemmas(partition_chc, catamorphisms) -> List[Lemma]:
    return [lemma_from_goal(partition_chc.by_tag(tag), catamorphisms) for tag in ('G1', 'G2')]


@pytest.fixture
def quicksort_lemmas(partition_lemmas, quicksort_chc, catamorphisms) -> List[Lemma]:
    return partition_lemmas + [lemma_from_goal(quicksort_chc.by_tag(tag), catamorphisms) for tag in ('G3', 'G4')]


@pytest.fixture
def g1(partition_chc) -> Clause:
    return partition_chc.by_tag('G1')


@pytest.fixture
def g2(partition_chc) -> Clause:
    return partition_chc.by_tag('G2')


@pytest.fixture
def g5(quicksort_chc) -> Clause:
    return quicksort_chc.by_tag('G5')


@pytest.fixture
def pl_definition(g2, partition_program) -> Definition:
    """
    pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).
    """
    return define((), g2.body, ['B', 'X'], 'pl', partition_program.signatures)


@pytest.fixture
def pl_signatures(partition_program) -> dict:
    return {**partition_program.signatures, 'pl': (BOOL, INT)}


@pytest.fixture
def qs_signatures(quicksort_program) -> dict:
    return {**quicksort_program.signatures, 'qss': (BOOL,)}
