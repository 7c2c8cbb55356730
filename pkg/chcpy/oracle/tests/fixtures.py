from typing import Set

import pytest

from chcpy.core.model import Atom
from chcpy.oracle.lfp import DomainBounds, bounded_lfp


@pytest.fixture
def small_bounds() -> DomainBounds:
    return DomainBounds(int_min=0, int_max=2, max_list_len=2)


@pytest.fixture
def partition_model(partition_program, small_bounds) -> Set[Atom]:
    return bounded_lfp(partition_program, small_bounds)


@pytest.fixture
def quicksort_model(quicksort_program, small_bounds) -> Set[Atom]:
    return bounded_lfp(quicksort_program, small_bounds)
