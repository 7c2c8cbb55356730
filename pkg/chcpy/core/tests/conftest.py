from .fixtures import partition_chc, partition_program, quicksort_chc, quicksort_program, derived_g5_chc
