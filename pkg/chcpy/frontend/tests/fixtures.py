from typing import List

import pytest

from chcpy.core.tests.helpers import corpus_path, read_corpus
from chcpy.frontend.source import FunDef, parse_source


@pytest.fixture
def partition_fun() -> List[FunDef]:
    return parse_source(read_corpus('partition.fun'), corpus_path('partition.fun'))


@pytest.fixture
def quicksort_fun() -> List[FunDef]:
    return parse_source(read_corpus('quicksort.fun'), corpus_path('quicksort.fun'))


@pytest.fixture
def all_functions(partition_fun, quicksort_fun) -> List[FunDef]:
    return partition_fun + quicksort_fun
