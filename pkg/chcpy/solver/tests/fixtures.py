import shutil

import pytest

from chcpy.core.model import ClauseSet
from chcpy.core.syntax import parse_chc
from chcpy.solver.client import SolverConfig
from chcpy.solver.models import Model

T_G2 = '''
false :- A=false, pl(A,B).
pl(A,B) :- A=true, B>=0.
pl(A,B) :- B>=0, pl(A,B).
'''

PL_MODEL = 'pl(A,B) :- A=true, B>=0.\n'


@pytest.fixture
def t_g2() -> ClauseSet:
    return parse_chc(T_G2, 't_g2.chc')


@pytest.fixture
def pl_model(t_g2) -> Model:
    return Model.parse(PL_MODEL, t_g2.signatures)


@pytest.fixture
def fake_solver(tmp_path):
    """
    A config whose solver is a shell snippet; the emitted file is its $0.
    """
    if shutil.which('sh') is None:
        pytest.skip('No shell to play the solver')

    def config(snippet: str, **kwargs) -> SolverConfig:
        return SolverConfig(command="sh -c '{}'".format(snippet), **kwargs)

    return config
