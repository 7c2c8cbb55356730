import os
import shlex
import shutil
import tempfile
import time
from subprocess import PIPE, Popen, TimeoutExpired
from typing import Iterable, List

from retry import retry

from ..core.constraints import SAT, UNKNOWN, UNSAT
from ..core.model import AtomicConstraint, Clause, ClauseSet
from ..core.smtlib import SolverVerdict, emit_smtlib_horn, parse_solver_output
from ..core.system_helpers import get_logger, kill_process_tree

logger = get_logger(__name__)

SOLVER_ENV = 'CHC_SOLVER_CMD'
FILE_PLACEHOLDER = '{file}'
VERDICT_WORDS = ('sat', 'unsat', 'unknown', 'timeout')


class SolverException(Exception):
    """
    The solver exited abnormally without printing a verdict.
    """
    def __init__(self, exec_args, stdout, stderr, exitcode):
        self.exec_args = exec_args
        self.stdout = stdout
        self.stderr = stderr
        self.exitcode = exitcode

    def __str__(self):
        return 'Solver {} exited with {}: {}'.format(' '.join(self.exec_args), self.exitcode,
                                                     (self.stderr or self.stdout).strip()[:500])


class SolverLaunchException(Exception):
    def __init__(self, exec_args, cause):
        self.exec_args = exec_args
        self.cause = cause

    def __str__(self):
        return 'Cannot launch solver {}: {}'.format(' '.join(self.exec_args) or '<none>', self.cause)


class SolverConfig:
    """
    How to reach the external Horn solver. The command is a template in which {file} stands for the SMT-LIB file;
    without the placeholder the file path is appended.
    """
    def __init__(self,
                 command: str = None,
                 timeout: float = 60,
                 keep_temps: bool = False,
                 artifacts_dir: str = None,
                 adt: bool = False):
        """
        :param command: falls back to the CHC_SOLVER_CMD environment variable
        :param timeout: seconds before the solver process tree is killed
        :param keep_temps: keep the emitted files and the solver output
        :param artifacts_dir: where kept files go, a fresh temporary directory by default
        :param adt: emit list sorts as algebraic datatypes instead of rejecting them
        """
        if timeout <= 0:
            raise ValueError('Solver timeout must be positive, got {}'.format(timeout))
        self.command = command or os.environ.get(SOLVER_ENV)
        self.timeout = timeout
        self.keep_temps = keep_temps
        self.artifacts_dir = artifacts_dir
        self.adt = adt

    @property
    def configured(self) -> bool:
        return bool(self.command)

    def exec_args(self, path: str) -> List[str]:
        if not self.command:
            raise SolverLaunchException([], 'no solver command, set {} or pass --solver'.format(SOLVER_ENV))
        args = shlex.split(self.command)
        if any(FILE_PLACEHOLDER in arg for arg in args):
            return [arg.replace(FILE_PLACEHOLDER, path) for arg in args]
        return args + [path]


@retry(exceptions=OSError, tries=3, delay=1)
def _launch(args: List[str]) -> Popen:
    try:
        return Popen(args=args, stdout=PIPE, stderr=PIPE)
    except (FileNotFoundError, PermissionError) as e:
        # not transient, fail without retrying
        logger.error('Solver launch failed: {}'.format(e))
        raise SolverLaunchException(args, e)


def _has_verdict(stdout: str) -> bool:
    lines = [line.strip().lower() for line in stdout.splitlines() if line.strip()]
    return bool(lines) and lines[0] in VERDICT_WORDS


def _run(args: List[str], timeout: float) -> SolverVerdict:
    try:
        proc = _launch(args)
    except OSError as e:
        logger.error('Solver launch failed: {}'.format(e))
        raise SolverLaunchException(args, e)

    try:
        out, err = proc.communicate(timeout=timeout)
    except TimeoutExpired:
        killed = kill_process_tree(proc.pid)
        proc.communicate()
        logger.warning('Solver timed out after {}s, killed {} processes'.format(timeout, killed))
        return SolverVerdict(UNKNOWN, raw='timeout')

    stdout, stderr = out.decode('utf-8', errors='replace'), err.decode('utf-8', errors='replace')
    if proc.returncode != 0:
        if not _has_verdict(stdout):
            raise SolverException(args, stdout, stderr, proc.returncode)
        logger.debug('Solver exited with {} after printing a verdict'.format(proc.returncode))
    return parse_solver_output(stdout)


def solve(cs: ClauseSet, cfg: SolverConfig = None, name: str = 'clauses') -> SolverVerdict:
    """
    Decides the satisfiability of a clause set with the external solver.
    :param cs: a list-free clause set, unless the config asks for datatypes
    :param cfg:
    :param name: stem of the emitted file
    :return: the verdict, unknown on timeout
    """
    cfg = cfg or SolverConfig()
    text = emit_smtlib_horn(cs, adt=cfg.adt)

    if cfg.keep_temps:
        directory = cfg.artifacts_dir or tempfile.mkdtemp(prefix='chcpy-')
        os.makedirs(directory, exist_ok=True)
    else:
        directory = tempfile.mkdtemp(prefix='chcpy-')

    try:
        fd, path = tempfile.mkstemp(suffix='.smt2', prefix='{}-'.format(name), dir=directory)
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write(text)

        start = time.time()
        verdict = _run(cfg.exec_args(path), cfg.timeout)
        logger.info('Solver says {} on {} ({} clauses) in {:.2f}s'.format(verdict.status, name, len(cs),
                                                                          time.time() - start))
        if cfg.keep_temps:
            with open(path[:-len('.smt2')] + '.out', 'w', encoding='utf-8') as f:
                f.write(verdict.raw)
            logger.info('Kept solver input {}'.format(path))
        return verdict
    finally:
        if not cfg.keep_temps:
            shutil.rmtree(directory, ignore_errors=True)


def solve_constraint(c: Iterable[AtomicConstraint], cfg: SolverConfig = None) -> str:
    """
    Satisfiability of a single constraint, asked as the goal false :- c. A solver failure gives unknown.
    """
    cs = ClauseSet({}, (Clause(None, tuple(c)),))
    try:
        verdict = solve(cs, cfg, 'constraint')
    except (SolverException, SolverLaunchException) as e:
        logger.warning('Constraint cross-check unavailable: {}'.format(e))
        return UNKNOWN
    if verdict.status == SAT:
        return UNSAT
    elif verdict.status == UNSAT:
        return SAT
    return UNKNOWN
