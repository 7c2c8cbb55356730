import shutil
from typing import List

import pytest

from chcpy.core.tests.helpers import corpus_path
from chcpy.solver.tests.fixtures import T_G2

G2_SCRIPT = '''define pl from G2 atoms 1,2
fold G2 with pl
unfold pl at 1 as 2,3,4
unfold 2 at 1 as 5
unfold 4 at 2 as 7
cleanup
fold 7 with pl as 8
'''


@pytest.fixture
def partition_args() -> List[str]:
    return [corpus_path('partition.chc'), '--manifest', corpus_path('manifest.yaml')]


@pytest.fixture
def echo_solver():
    """
    Solver flags for a shell snippet that prints a fixed verdict.
    """
    if shutil.which('sh') is None:
        pytest.skip('No shell to play the solver')

    def flags(verdict: str) -> List[str]:
        return ['--solver', "sh -c 'echo {}'".format(verdict)]

    return flags


@pytest.fixture
def t_g2_file(tmp_path) -> str:
    path = tmp_path / 't_g2.chc'
    path.write_text(T_G2)
    return str(path)


@pytest.fixture
def partition_plan(tmp_path) -> dict:
    return {'program': [corpus_path('partition.chc')],
            'manifest': corpus_path('manifest.yaml'),
            'goals': [{'goal': 'G1'}, {'goal': 'G2', 'hints': ['pl']}]}
