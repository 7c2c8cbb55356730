from chcpy.core.tests.fixtures import partition_chc, partition_program, quicksort_chc, quicksort_program
from .fixtures import partition_model, quicksort_model, small_bounds
