from chcpy.core.tests.fixtures import partition_chc, partition_program, derived_g5_chc
from .fixtures import t_g2, pl_model, fake_solver
