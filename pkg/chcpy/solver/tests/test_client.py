import os

import pytest

from chcpy.core.constraints import SAT, UNKNOWN, UNSAT
from chcpy.core.model import Clause, ClauseSet
from chcpy.core.syntax import parse_clause
from chcpy.solver.client import (SOLVER_ENV, SolverConfig, SolverException, SolverLaunchException, solve,
                                 solve_constraint)

needs_solver = pytest.mark.skipif(not os.environ.get(SOLVER_ENV), reason='{} is not set'.format(SOLVER_ENV))


def test_config_defaults(monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, 'eld -hsmt')
    cfg = SolverConfig()
    assert cfg.command == 'eld -hsmt'
    assert cfg.timeout == 60
    assert cfg.exec_args('/tmp/a.smt2') == ['eld', '-hsmt', '/tmp/a.smt2']
    assert SolverConfig(command='z3 fp.engine=spacer {file}').exec_args('x.smt2') == ['z3', 'fp.engine=spacer',
                                                                                      'x.smt2']


def test_config_rejects_bad_timeout():
    with pytest.raises(ValueError):
        SolverConfig(command='z3', timeout=0)


def test_unconfigured(monkeypatch, t_g2):
    monkeypatch.delenv(SOLVER_ENV, raising=False)
    cfg = SolverConfig()
    assert not cfg.configured
    with pytest.raises(SolverLaunchException):
        solve(t_g2, cfg)


def test_missing_binary(t_g2, monkeypatch):
    sleeps = []
    monkeypatch.setattr('retry.api.time.sleep', sleeps.append)
    with pytest.raises(SolverLaunchException) as e:
        solve(t_g2, SolverConfig(command='chcpy-no-such-solver'))
    assert e.value.exec_args[0] == 'chcpy-no-such-solver'
    assert isinstance(e.value.cause, FileNotFoundError)
    assert sleeps == []


def test_rejects_lists(partition_chc, fake_solver):
    with pytest.raises(ValueError):
        solve(partition_chc, fake_solver('echo sat'))


def test_verdicts(t_g2, fake_solver):
    assert solve(t_g2, fake_solver('echo sat')).status == SAT
    assert solve(t_g2, fake_solver('echo unsat')).status == UNSAT
    assert solve(t_g2, fake_solver('echo gibberish')).status == UNKNOWN


def test_nonzero_exit_with_verdict(t_g2, fake_solver):
    assert solve(t_g2, fake_solver('echo unsat; exit 3')).status == UNSAT


def test_nonzero_exit_without_verdict(t_g2, fake_solver):
    with pytest.raises(SolverException) as e:
        solve(t_g2, fake_solver('echo broken >&2; exit 2'))
    assert e.value.exitcode == 2
    assert 'broken' in e.value.stderr


def test_timeout(t_g2, fake_solver):
    verdict = solve(t_g2, fake_solver('sleep 30', timeout=0.5))
    assert verdict.status == UNKNOWN
    assert verdict.raw == 'timeout'


def test_keep_temps(t_g2, fake_solver, tmp_path):
    artifacts = tmp_path / 'artifacts'
    cfg = fake_solver('grep -q HORN "$0" && echo sat', keep_temps=True, artifacts_dir=str(artifacts))
    assert solve(t_g2, cfg, 'tg2').status == SAT
    kept = sorted(os.listdir(str(artifacts)))
    assert len(kept) == 2
    assert kept[0].startswith('tg2-') and kept[0].endswith('.out')
    assert kept[1].endswith('.smt2')


def test_solve_constraint_flips_verdict(fake_solver):
    c = parse_clause('false :- X>=1, X=<0.').constraint
    assert solve_constraint(c, fake_solver('echo sat')) == UNSAT
    assert solve_constraint(c, fake_solver('echo unsat')) == SAT
    assert solve_constraint(c, SolverConfig(command='chcpy-no-such-solver')) == UNKNOWN


@needs_solver
def test_partition_result_is_sat(t_g2):
    assert solve(t_g2).status == SAT


@needs_solver
def test_derived_g5_is_sat(derived_g5_chc):
    assert solve(derived_g5_chc).status == SAT


@needs_solver
def test_empty_goal_is_unsat():
    assert solve(ClauseSet({}, (Clause(None),))).status == UNSAT
