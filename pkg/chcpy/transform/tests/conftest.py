from chcpy.core.tests.fixtures import partition_chc, partition_program, quicksort_chc, quicksort_program, derived_g5_chc
from .fixtures import (catamorphisms, modes, partition_lemmas, quicksort_lemmas, g1, g2, g5, pl_definition,
                       pl_signatures, qs_signatures)
