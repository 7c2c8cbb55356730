from chcpy.core.tests.fixtures import partition_chc, partition_program
from .fixtures import partition_args, echo_solver, t_g2_file, partition_plan
