import argparse
import logging
import os
import sys
from typing import List, Sequence

from ..core.registry import ManifestException, write_manifest
from ..core.syntax import ChcSyntaxException, SortConflictException, print_chc, read_chc, write_chc
from ..core.system_helpers import get_logger, set_log_level
from ..frontend.source import SourceSyntaxException, UnsupportedConstructException, read_source
from ..frontend.translate import TranslationException, build_manifest, translate_contracts, translate_program
from ..oracle.lfp import DomainBounds, GroundTermCapException, bounded_lfp, goal_violated
from ..solver.client import SolverConfig, SolverLaunchException, solve
from ..solver.models import Model, ModelException, check_model
from ..transform.script import ScriptException
from ..transform.strategy import Derivation, StrategyLimitException, check_result, run_rcata
from ..transform.workspace import Workspace
from .context import ProgramContext
from .repl import Session, run_session
from .report import format_summary, write_report
from .verify import read_plan, run_plan

logger = get_logger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

USAGE_ERRORS = (ChcSyntaxException, SortConflictException, SourceSyntaxException, UnsupportedConstructException,
                TranslationException, ManifestException, ModelException, ScriptException, SolverLaunchException,
                OSError, ValueError)


def _names(text: str) -> List[str]:
    return [part.strip() for part in text.split(',') if part.strip()] if text else []


def _solver_config(args) -> SolverConfig:
    return SolverConfig(command=args.solver, timeout=args.timeout, keep_temps=args.keep_temps,
                        artifacts_dir=args.artifacts)


def _context(args) -> ProgramContext:
    return ProgramContext.load(args.program, getattr(args, 'manifest', None), getattr(args, 'goals_dir', None))


def cmd_translate(args) -> int:
    functions = read_source(args.source)
    if not functions:
        raise ValueError('{}: no definitions'.format(args.source))
    known = [f for path in args.known for f in read_source(path)]
    program = translate_program(functions, known)
    goals, lemmas = translate_contracts(functions, known, args.first_goal)

    os.makedirs(args.output, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.source))[0]
    write_chc(os.path.join(args.output, '{}.chc'.format(stem)), program)
    for g in goals:
        write_chc(os.path.join(args.output, '{}.chc'.format(g.tag)), [g])
    manifest = build_manifest(functions, goals, lemmas, known)
    manifest.goal_files.update({g.tag: '{}.chc'.format(g.tag) for g in goals})
    write_manifest(os.path.join(args.output, '{}.manifest.yaml'.format(stem)), manifest)
    print('{} clauses, goals {}'.format(len(program), ', '.join(g.tag for g in goals) or '-'))
    return EXIT_OK


def cmd_transform(args) -> int:
    context = _context(args)
    goal = context.goal(args.goal)
    lemmas = context.lemmas(_names(args.lemmas))
    script = None
    if args.script:
        with open(args.script, encoding='utf-8') as f:
            script = f.read()
    result = run_rcata(context.program, goal, lemmas, script, catamorphisms=context.catamorphisms,
                       modes=context.modes, hints=_names(args.hints), raise_on_failure=False)
    if args.save_script:
        with open(args.save_script, 'w', encoding='utf-8') as f:
            f.write(result.script(header='derivation of {}'.format(goal.tag or args.goal)))
    if args.output:
        write_chc(args.output, result.clauses)
    else:
        sys.stdout.write(print_chc(result.clauses))
    if not result.ok:
        logger.error('Derivation stuck: {}'.format(result.stuck))
        return EXIT_FAILURE
    report = check_result(result.clauses)
    for violation in report.violations:
        logger.error(violation)
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_solve(args) -> int:
    cs = read_chc(args.chc)
    verdict = solve(cs, _solver_config(args), os.path.splitext(os.path.basename(args.chc))[0])
    print(verdict.status)
    if args.check_model and verdict.model:
        report = check_model(cs, Model.from_solver_output(verdict))
        print(report)
        if not report.valid:
            return EXIT_FAILURE
    return EXIT_OK if verdict.is_sat else EXIT_FAILURE


def cmd_verify(args) -> int:
    plan = read_plan(args.plan)
    outcomes = run_plan(plan, _solver_config(args), jobs=args.jobs, out_dir=args.output)
    print(format_summary(outcomes))
    if args.report:
        write_report(outcomes, args.report)
    return EXIT_OK if all(o.verified for o in outcomes) else EXIT_FAILURE


def cmd_oracle_check(args) -> int:
    context = _context(args)
    goal = context.goal(args.goal)
    bounds = DomainBounds.parse(args.bounds)
    atoms = bounded_lfp(context.program, bounds)
    witness = goal_violated(atoms, goal, bounds)
    if witness is not None:
        print('Violated within {}: {}'.format(bounds, witness))
        return EXIT_FAILURE
    print('No violation within {}'.format(bounds))
    return EXIT_OK


def cmd_check_model(args) -> int:
    cs = read_chc(args.chc)
    report = check_model(cs, Model.read(args.model, cs.signatures), args.max_disjuncts)
    print(report)
    return EXIT_OK if report.valid else EXIT_FAILURE


def cmd_repl(args) -> int:
    context = _context(args)
    ws = Workspace.start(context.program, context.goal(args.goal), context.lemmas(_names(args.lemmas)),
                         context.catamorphisms, context.modes)
    run_session(Session(Derivation(ws, hints=_names(args.hints))))
    return EXIT_OK


def _add_program_args(p: argparse.ArgumentParser):
    p.add_argument('program', nargs='+', help='clause files of the program, later ones may use earlier ones')
    p.add_argument('--goal', '-g', required=True, help='goal tag, or a clause file holding the goal')
    p.add_argument('--manifest', '-m', help='manifest with catamorphisms, modes and lemmas')
    p.add_argument('--goals-dir', help='directory with one clause file per goal tag')


def _add_derivation_args(p: argparse.ArgumentParser):
    p.add_argument('--lemmas', help='comma separated tags of proved goals to use as lemmas')
    p.add_argument('--hints', help='comma separated names for the definitions the strategy introduces')


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--solver', help='solver command template, {file} is the SMT-LIB file; '
                                         'defaults to $CHC_SOLVER_CMD')
    parser.add_argument('--timeout', type=float, default=60, help='solver timeout in seconds')
    parser.add_argument('--keep-temps', action='store_true', help='keep the files handed to the solver')
    parser.add_argument('--artifacts', help='directory for kept solver files')
    parser.add_argument('--verbose', '-v', action='store_true', help='log at debug level')
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='chcpy', description='Verification of list programs through constrained '
                                                               'Horn clauses without list arguments')
    subparsers = parser.add_subparsers(dest='command')

    s = subparsers.add_parser('translate', parents=[common],
                              help='Translate a source file into clauses, goals and a manifest')
    s.set_defaults(main=cmd_translate)
    s.add_argument('source')
    s.add_argument('--known', action='append', default=[], help='source file with functions the source calls')
    s.add_argument('--first-goal', type=int, default=1, help='number of the first goal tag')
    s.add_argument('--output', '-o', default='.', help='output directory')

    s = subparsers.add_parser('transform', parents=[common],
                              help='Remove the list arguments of a goal and the clauses it depends on')
    s.set_defaults(main=cmd_transform)
    _add_program_args(s)
    _add_derivation_args(s)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument('--script', help='transformation script to replay')
    mode.add_argument('--auto', action='store_true', help='run the automatic strategy, the default')
    s.add_argument('--save-script', help='write the commands of the derivation to this file')
    s.add_argument('--output', '-o', help='clause file for the result, stdout by default')

    s = subparsers.add_parser('solve', parents=[common], help='Decide the satisfiability of a list-free clause file')
    s.set_defaults(main=cmd_solve)
    s.add_argument('chc')
    s.add_argument('--check-model', action='store_true', help='validate the model the solver prints')

    s = subparsers.add_parser('verify', parents=[common], help='Verify the goals of a plan in dependency order')
    s.set_defaults(main=cmd_verify)
    s.add_argument('plan')
    s.add_argument('--report', help='CSV file for the per-goal report')
    s.add_argument('--jobs', '-j', type=int, help='goals verified at the same time')
    s.add_argument('--output', '-o', help='directory for the derived clauses and scripts')

    s = subparsers.add_parser('oracle-check', parents=[common],
                              help='Look for a goal violation in a bounded least model')
    s.set_defaults(main=cmd_oracle_check)
    _add_program_args(s)
    s.add_argument('--bounds', default='0,2,3', help='min,max,len of the integers and lists enumerated')

    s = subparsers.add_parser('check-model', parents=[common], help='Check a candidate model against a clause file')
    s.set_defaults(main=cmd_check_model)
    s.add_argument('chc')
    s.add_argument('model')
    s.add_argument('--max-disjuncts', type=int, default=256)

    s = subparsers.add_parser('repl', parents=[common], help='Apply transformation commands interactively')
    s.set_defaults(main=cmd_repl)
    _add_program_args(s)
    _add_derivation_args(s)

    return parser


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, 'verbose', False):
        set_log_level(logging.DEBUG)
    if not getattr(args, 'main', None):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.main(args)
    except (StrategyLimitException, GroundTermCapException) as e:
        logger.error(str(e))
        return EXIT_FAILURE
    except USAGE_ERRORS as e:
        logger.error(str(e))
        return EXIT_USAGE


def verify_main(argv: Sequence[str] = None) -> int:
    """
    Entry point of chc-verify, a shorthand for chcpy verify.
    """
    return main(['verify'] + list(sys.argv[1:] if argv is None else argv))


def run():
    sys.exit(main())


def run_verify():
    sys.exit(verify_main())
