import pytest

from chcpy.core.model import ClauseSet
from chcpy.core.syntax import parse_chc
from chcpy.core.tests.helpers import corpus_path, read_corpus


@pytest.fixture
def partition_chc() -> ClauseSet:
    return parse_chc(read_corpus('partition.chc'), corpus_path('partition.chc'))


@pytest.fixture
def partition_program(partition_chc) -> ClauseSet:
    return partition_chc.without_goals()


@pytest.fixture
def quicksort_chc() -> ClauseSet:
    return parse_chc(read_corpus('quicksort.chc'), corpus_path('quicksort.chc'))


@pytest.fixture
def quicksort_program(partition_program) -> ClauseSet:
    """
    Quicksort clauses together with the partition clauses they call.
    """
    quicksort = parse_chc(read_corpus('quicksort.chc'), corpus_path('quicksort.chc'), partition_program.signatures)
    return partition_program.extend(quicksort.without_goals().clauses, quicksort.signatures)


@pytest.fixture
def derived_g5_chc() -> ClauseSet:
    return parse_chc(read_corpus('derived_g5.chc'), corpus_path('derived_g5.chc'))
