"""
Verification plans: goals verified in dependency order, each one free to use as lemmas the goals it depends on once
those are verified.
"""
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import psutil
import yaml

from ..core.constraints import SAT
from ..core.model import ClauseSet
from ..core.syntax import ChcSyntaxException, SortConflictException, write_chc
from ..core.system_helpers import get_logger
from ..solver.client import SolverConfig, SolverException, SolverLaunchException, solve
from ..transform.rules import TransformationException
from ..transform.script import ScriptException
from ..transform.strategy import StrategyLimitException, StrategyLimits, check_result, run_rcata
from .context import ProgramContext
from .report import FAILED, GoalOutcome

logger = get_logger(__name__)


@dataclass(frozen=True)
class PlanEntry:
    goal: str
    lemmas: Tuple[str, ...] = ()
    script: Optional[str] = None
    auto: bool = False
    hints: Tuple[str, ...] = ()


@dataclass
class VerifyPlan:
    programs: List[str]
    entries: List[PlanEntry]
    manifest: Optional[str] = None
    goals_dir: Optional[str] = None

    def tags(self) -> List[str]:
        return [e.goal for e in self.entries]

    def waves(self) -> List[List[PlanEntry]]:
        """
        Groups the entries so that every dependency inside the plan is in an earlier group.
        """
        tags = set(self.tags())
        placed, waves, pending = set(), [], list(self.entries)
        while pending:
            ready = [e for e in pending if all(d in placed or d not in tags for d in e.lemmas)]
            if not ready:
                raise ValueError('Plan dependencies form a cycle among {}'.format(', '.join(e.goal for e in pending)))
            waves.append(ready)
            placed |= {e.goal for e in ready}
            pending = [e for e in pending if e.goal not in placed]
        return waves


def _resolve(base: str, path: Optional[str]) -> Optional[str]:
    if path is None or os.path.isabs(path):
        return path
    return os.path.join(base, path)


def plan_from_dict(data: Mapping, base: str = '.') -> VerifyPlan:
    data = data or {}
    programs = data.get('program')
    if not programs:
        raise ValueError('Plan has no program')
    if isinstance(programs, str):
        programs = [programs]
    entries, seen = [], set()
    for item in data.get('goals') or []:
        if isinstance(item, str):
            item = {'goal': item}
        tag = str(item['goal'])
        if tag in seen:
            raise ValueError('Goal {} appears twice in the plan'.format(tag))
        seen.add(tag)
        entries.append(PlanEntry(tag, tuple(str(l) for l in item.get('lemmas') or ()),
                                 _resolve(base, item.get('script')), bool(item.get('auto', False)),
                                 tuple(item.get('hints') or ())))
    if not entries:
        raise ValueError('Plan has no goals')
    plan = VerifyPlan([_resolve(base, p) for p in programs], entries, _resolve(base, data.get('manifest')),
                      _resolve(base, data.get('goals_dir')))
    plan.waves()
    return plan


def read_plan(path: str) -> VerifyPlan:
    with open(path, encoding='utf-8') as f:
        data = yaml.safe_load(f)
    return plan_from_dict(data, os.path.dirname(os.path.abspath(path)))


def write_plan(path: str, plan: VerifyPlan):
    goals = []
    for e in plan.entries:
        entry = {'goal': e.goal}
        if e.lemmas:
            entry['lemmas'] = list(e.lemmas)
        if e.script:
            entry['script'] = e.script
        if e.auto:
            entry['auto'] = True
        if e.hints:
            entry['hints'] = list(e.hints)
        goals.append(entry)
    data = {'program': plan.programs, 'goals': goals}
    if plan.manifest:
        data['manifest'] = plan.manifest
    if plan.goals_dir:
        data['goals_dir'] = plan.goals_dir
    with open(path, 'w', encoding='utf-8') as f:
        yaml.dump(data, stream=f, default_flow_style=False, sort_keys=False)


def _script_text(entry: PlanEntry) -> Optional[str]:
    if entry.script is None:
        return None
    with open(entry.script, encoding='utf-8') as f:
        text = f.read()
    return text + '\nauto\n' if entry.auto else text


class PlanRunner:
    """
    Runs the entries of a plan wave by wave; the goals of one wave are independent and run in a thread pool.
    """
    def __init__(self, plan: VerifyPlan, context: ProgramContext, solver: SolverConfig = None,
                 limits: StrategyLimits = None, jobs: int = None, out_dir: str = None):
        self.plan = plan
        self.context = context
        self.solver = solver or SolverConfig()
        self.limits = limits
        self.jobs = jobs or max(1, min(len(plan.entries), psutil.cpu_count() or 1))
        self.out_dir = out_dir
        self.outcomes: Dict[str, GoalOutcome] = {}

    def available_lemmas(self, entry: PlanEntry) -> List[str]:
        available = []
        for dependency in entry.lemmas:
            outcome = self.outcomes.get(dependency)
            if outcome is not None and outcome.verified:
                available.append(dependency)
            else:
                logger.warning('Lemma {} is not available to {}'.format(dependency, entry.goal))
        return available

    def verify(self, entry: PlanEntry) -> GoalOutcome:
        start = time.time()
        outcome = GoalOutcome(entry.goal, FAILED)
        try:
            goal = self.context.goal(entry.goal)
            lemmas = self.context.lemmas(self.available_lemmas(entry))
            result = run_rcata(self.context.program, goal, lemmas, _script_text(entry), self.limits,
                               self.context.catamorphisms, self.context.modes, hints=entry.hints)
            outcome.iterations, outcome.definitions = result.iterations, len(result.definitions)
            outcome.clauses = len(result.clauses)
            self._save(entry.goal, result.clauses, result.script(header='derivation of {}'.format(entry.goal)))
            report = check_result(result.clauses)
            if not report.ok:
                outcome.detail = '; '.join(report.violations)
            else:
                verdict = solve(result.clauses, self.solver, entry.goal)
                outcome.verdict = verdict.status
                if verdict.status != SAT:
                    outcome.detail = 'solver says {}'.format(verdict.status)
        except (ScriptException, StrategyLimitException, TransformationException, SolverException,
                SolverLaunchException, ChcSyntaxException, SortConflictException, OSError, ValueError) as e:
            logger.error('Verification of {} failed: {}'.format(entry.goal, e))
            outcome.detail = str(e)
        outcome.wall_time = time.time() - start
        logger.info('{}: {} in {:.2f}s'.format(entry.goal, outcome.verdict, outcome.wall_time))
        return outcome

    def _save(self, tag: str, clauses: ClauseSet, script: str):
        if self.out_dir is None:
            return
        os.makedirs(self.out_dir, exist_ok=True)
        write_chc(os.path.join(self.out_dir, '{}.chc'.format(tag)), clauses)
        with open(os.path.join(self.out_dir, '{}.script'.format(tag)), 'w', encoding='utf-8') as f:
            f.write(script)

    def run(self) -> List[GoalOutcome]:
        for wave in self.plan.waves():
            logger.info('Verifying {} with {} workers'.format(', '.join(e.goal for e in wave), self.jobs))
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                for outcome in pool.map(self.verify, wave):
                    self.outcomes[outcome.goal] = outcome
        return [self.outcomes[tag] for tag in self.plan.tags()]


def run_plan(plan: VerifyPlan, solver: SolverConfig = None, limits: StrategyLimits = None, jobs: int = None,
             out_dir: str = None) -> List[GoalOutcome]:
    context = ProgramContext.load(plan.programs, plan.manifest, plan.goals_dir)
    return PlanRunner(plan, context, solver, limits, jobs, out_dir).run()
