import os
from typing import Dict, List, Optional, Sequence

from ..core.model import Clause, ClauseSet
from ..core.registry import CatamorphismSpec, Lemma, Manifest, lemma_from_goal, read_manifest
from ..core.syntax import read_chc
from ..core.system_helpers import get_logger

logger = get_logger(__name__)


class ProgramContext:
    """
    Program clauses, the goals found next to them and the manifest describing their predicates.
    """
    def __init__(self, program: ClauseSet, goals: Sequence[Clause] = (), manifest: Manifest = None,
                 goals_dir: str = None):
        self.program = program
        self.goals = list(goals)
        self.manifest = manifest or Manifest()
        self.goals_dir = goals_dir

    @staticmethod
    def load(program_paths: Sequence[str], manifest_path: str = None, goals_dir: str = None) -> 'ProgramContext':
        """
        Reads one or more clause files, each one parsed with the signatures of those before it.
        """
        if not program_paths:
            raise ValueError('No program files given')
        program, goals = ClauseSet(), []
        for path in program_paths:
            cs = read_chc(path, program.signatures)
            program = program.extend(cs.without_goals().clauses, cs.signatures)
            goals.extend(cs.goals())
        manifest = read_manifest(manifest_path, program.signatures) if manifest_path else None
        logger.info('Loaded {} program clauses and {} goals from {}'.format(len(program), len(goals),
                                                                          ', '.join(program_paths)))
        return ProgramContext(program, goals, manifest, goals_dir)

    @property
    def catamorphisms(self) -> Dict[str, CatamorphismSpec]:
        return self.manifest.catamorphisms

    @property
    def modes(self) -> Dict[str, int]:
        return self.manifest.modes

    def goal(self, name: str) -> Clause:
        """
        A goal given by tag, looked up in the program files, the manifest's goal files and the goals directory, or by
        the path of a clause file holding it.
        """
        for g in self.goals:
            if g.tag == name:
                return g
        candidates = []
        if name in self.manifest.goal_files:
            candidates.append(self.manifest.goal_files[name])
        if self.goals_dir:
            candidates.append(os.path.join(self.goals_dir, '{}.chc'.format(name)))
        candidates.append(name)
        for path in candidates:
            if path and os.path.isfile(path):
                goals = read_chc(path, self.program.signatures).goals()
                tagged = [g for g in goals if g.tag == name] or goals
                if tagged:
                    return tagged[0]
        raise ValueError('Cannot find goal {}'.format(name))

    def lemma(self, name: str) -> Optional[Lemma]:
        if name in self.manifest.lemmas:
            return self.manifest.lemmas[name]
        try:
            lemma = lemma_from_goal(self.goal(name), self.catamorphisms)
        except ValueError:
            lemma = None
        if lemma is None:
            logger.warning('Goal {} does not give a lemma'.format(name))
        return lemma

    def lemmas(self, names: Sequence[str]) -> List[Lemma]:
        return [l for l in (self.lemma(n) for n in names) if l is not None]
