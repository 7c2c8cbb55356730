"""
The line-oriented command language that drives a derivation. One command per line, '#' starts a comment, atom
positions are 1-based:

    define NAME from LABEL atoms I,J,... [head V,...] [generalize]
    unfold LABEL at I [as L1,L2,...]
    fold LABEL with NAME [atoms I,J,...] [weak] [as L]
    lemma LABEL using GOAL [as L]
    total LABEL PRED LISTVAR [params T,...] [as L]
    remove LABEL anchor I [companions J,K,...] [as L]
    cleanup
    auto
    commit LABEL
"""
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..core.model import BoolConst, IntConst, Term, Var, var_sorts
from ..core.system_helpers import get_logger
from .workspace import Workspace, head_variables

logger = get_logger(__name__)

_NAME_RE = re.compile(r'^[A-Za-z0-9_][A-Za-z0-9_\']*$')
_INT_RE = re.compile(r'^-?[0-9]+$')
FRESH = '_'


class ScriptException(Exception):
    def __init__(self, message: str, line_number: int = None, command: 'Command' = None):
        self.message = message
        self.line_number = line_number
        self.command = command

    def __str__(self):
        where = []
        if self.line_number is not None:
            where.append('line {}'.format(self.line_number))
        if self.command is not None:
            where.append("'{}'".format(self.command))
        if not where:
            return self.message
        return '{}: {}'.format(' '.join(where), self.message)


def _positions(atoms: Sequence[int]) -> List[int]:
    return [i - 1 for i in atoms]


def _join(items: Sequence) -> str:
    return ','.join(str(i) for i in items)


def _as(label: Optional[str]) -> str:
    return ' as {}'.format(label) if label else ''


class Command:
    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Command']:
        """
        Runs the command.
        :return: the new workspace and the command with every generated name made explicit, so that it replays to the
            same result
        """
        raise NotImplementedError()


@dataclass(frozen=True)
class Define(Command):
    name: str
    label: str
    atoms: Tuple[int, ...]
    head: Optional[Tuple[str, ...]] = None
    generalize: bool = False

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Define']:
        positions = _positions(self.atoms)
        head = self.head
        if head is None:
            c = ws.clause(self.label)
            if any(not 0 <= i < len(c.body) for i in positions):
                raise ScriptException('No atom {} in {}'.format(_join(self.atoms), self.label), command=self)
            head = tuple(head_variables(c, positions))
        ws, _ = ws.define(self.name, self.label, positions, head, self.generalize)
        return ws, Define(self.name, self.label, self.atoms, head, self.generalize)

    def __str__(self):
        text = 'define {} from {} atoms {}'.format(self.name, self.label, _join(self.atoms))
        if self.head is not None:
            text += ' head {}'.format(_join(self.head)) if self.head else ' head -'
        return text + (' generalize' if self.generalize else '')


@dataclass(frozen=True)
class Unfold(Command):
    label: str
    atom: int
    labels: Optional[Tuple[str, ...]] = None

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Unfold']:
        ws, labels = ws.unfold(self.label, self.atom - 1, self.labels)
        return ws, Unfold(self.label, self.atom, tuple(labels))

    def __str__(self):
        text = 'unfold {} at {}'.format(self.label, self.atom)
        if self.labels is not None:
            text += ' as {}'.format(_join(self.labels)) if self.labels else ' as -'
        return text


@dataclass(frozen=True)
class Fold(Command):
    label: str
    definition: str
    atoms: Optional[Tuple[int, ...]] = None
    weak: bool = False
    new_label: Optional[str] = None

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Fold']:
        positions = None if self.atoms is None else _positions(self.atoms)
        return ws.fold(self.label, self.definition, positions, self.weak, self.new_label), self

    def __str__(self):
        text = 'fold {} with {}'.format(self.label, self.definition)
        if self.atoms is not None:
            text += ' atoms {}'.format(_join(self.atoms))
        return text + (' weak' if self.weak else '') + _as(self.new_label)


@dataclass(frozen=True)
class ApplyLemma(Command):
    label: str
    lemma: str
    new_label: Optional[str] = None

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'ApplyLemma']:
        return ws.apply_lemma(self.label, self.lemma, self.new_label), self

    def __str__(self):
        return 'lemma {} using {}{}'.format(self.label, self.lemma, _as(self.new_label))


def _param_term(text: str, sorts) -> Optional[Term]:
    if text == FRESH:
        return None
    if _INT_RE.match(text):
        return IntConst(int(text))
    if text in ('true', 'false'):
        return BoolConst(text == 'true')
    if text not in sorts:
        raise ScriptException('Unknown variable {}'.format(text))
    return Var(text, sorts[text])


@dataclass(frozen=True)
class AddTotalCata(Command):
    label: str
    pred: str
    list_var: str
    params: Tuple[str, ...] = ()
    new_label: Optional[str] = None

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'AddTotalCata']:
        sorts = var_sorts(ws.clause(self.label))
        params = [_param_term(p, sorts) for p in self.params]
        spec = ws.catamorphisms.get(self.pred)
        if spec is not None and len(params) != len(spec.params):
            raise ScriptException('{} takes {} parameters'.format(self.pred, len(spec.params)), command=self)
        ws, _ = ws.add_total_cata(self.label, self.pred, self.list_var, params, self.new_label)
        return ws, self

    def __str__(self):
        text = 'total {} {} {}'.format(self.label, self.pred, self.list_var)
        if self.params:
            text += ' params {}'.format(_join(self.params))
        return text + _as(self.new_label)


@dataclass(frozen=True)
class RemoveTrueConjunct(Command):
    label: str
    anchor: int
    companions: Tuple[int, ...] = ()
    new_label: Optional[str] = None

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'RemoveTrueConjunct']:
        return ws.remove(self.label, self.anchor - 1, _positions(self.companions), self.new_label), self

    def __str__(self):
        text = 'remove {} anchor {}'.format(self.label, self.anchor)
        if self.companions:
            text += ' companions {}'.format(_join(self.companions))
        return text + _as(self.new_label)


@dataclass(frozen=True)
class Cleanup(Command):
    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Cleanup']:
        return ws.cleanup(), self

    def __str__(self):
        return 'cleanup'


@dataclass(frozen=True)
class Auto(Command):
    """
    Runs the automatic strategy until no clause with list arguments is left. The strategy runner executes it.
    """
    def __str__(self):
        return 'auto'


@dataclass(frozen=True)
class Commit(Command):
    label: str

    def execute(self, ws: Workspace) -> Tuple[Workspace, 'Commit']:
        ws.clause(self.label)
        return ws, self

    def __str__(self):
        return 'commit {}'.format(self.label)


class _Line:
    def __init__(self, tokens: List[str], line_number: int):
        self.tokens = tokens
        self.position = 0
        self.line_number = line_number

    def fail(self, message: str):
        raise ScriptException(message, self.line_number)

    def done(self) -> bool:
        return self.position >= len(self.tokens)

    def next(self, what: str) -> str:
        if self.done():
            self.fail('Expected {}'.format(what))
        token = self.tokens[self.position]
        self.position += 1
        return token

    def name(self, what: str) -> str:
        token = self.next(what)
        if not _NAME_RE.match(token):
            self.fail('Bad {}: {}'.format(what, token))
        return token

    def keyword(self, word: str):
        token = self.next("'{}'".format(word))
        if token != word:
            self.fail("Expected '{}', found '{}'".format(word, token))

    def accept(self, word: str) -> bool:
        if not self.done() and self.tokens[self.position] == word:
            self.position += 1
            return True
        return False

    def integers(self, what: str) -> Tuple[int, ...]:
        token = self.next(what)
        try:
            values = tuple(int(t) for t in token.split(','))
        except ValueError:
            self.fail('Bad {}: {}'.format(what, token))
        if any(v < 1 for v in values):
            self.fail('Atom positions start at 1: {}'.format(token))
        return values

    def integer(self, what: str) -> int:
        values = self.integers(what)
        if len(values) != 1:
            self.fail('Expected one {}'.format(what))
        return values[0]

    def names(self, what: str) -> Tuple[str, ...]:
        token = self.next(what)
        if token == '-':
            return ()
        values = tuple(token.split(','))
        if not all(_NAME_RE.match(v) for v in values):
            self.fail('Bad {}: {}'.format(what, token))
        return values

    def optional_label(self) -> Optional[str]:
        return self.name('label') if self.accept('as') else None

    def finish(self, command: Command) -> Command:
        if not self.done():
            self.fail("Unexpected '{}'".format(' '.join(self.tokens[self.position:])))
        return command


def _parse_define(line: _Line) -> Command:
    name = line.name('definition name')
    line.keyword('from')
    label = line.name('label')
    line.keyword('atoms')
    atoms = line.integers('atom positions')
    head = line.names('head variables') if line.accept('head') else None
    generalize = line.accept('generalize')
    return Define(name, label, atoms, head, generalize)


def _parse_unfold(line: _Line) -> Command:
    label = line.name('label')
    line.keyword('at')
    atom = line.integer('atom position')
    labels = line.names('labels') if line.accept('as') else None
    return Unfold(label, atom, labels)


def _parse_fold(line: _Line) -> Command:
    label = line.name('label')
    line.keyword('with')
    definition = line.name('definition name')
    atoms = line.integers('atom positions') if line.accept('atoms') else None
    weak = line.accept('weak')
    return Fold(label, definition, atoms, weak, line.optional_label())


def _parse_lemma(line: _Line) -> Command:
    label = line.name('label')
    line.keyword('using')
    return ApplyLemma(label, line.name('lemma name'), line.optional_label())


def _parse_total(line: _Line) -> Command:
    label = line.name('label')
    pred = line.name('predicate')
    list_var = line.name('list variable')
    params = ()
    if line.accept('params'):
        params = tuple(line.next('parameters').split(','))
    return AddTotalCata(label, pred, list_var, params, line.optional_label())


def _parse_remove(line: _Line) -> Command:
    label = line.name('label')
    line.keyword('anchor')
    anchor = line.integer('anchor position')
    companions = line.integers('companion positions') if line.accept('companions') else ()
    return RemoveTrueConjunct(label, anchor, companions, line.optional_label())


_PARSERS = {
    'define': _parse_define,
    'unfold': _parse_unfold,
    'fold': _parse_fold,
    'lemma': _parse_lemma,
    'total': _parse_total,
    'remove': _parse_remove,
    'cleanup': lambda line: Cleanup(),
    'auto': lambda line: Auto(),
    'commit': lambda line: Commit(line.name('label')),
}


def parse_command(text: str, line_number: int = None) -> Optional[Command]:
    """
    Parses one script line.
    :return: the command, or None for a blank or comment line
    """
    text = re.sub(r'\s*,\s*', ',', text.split('#', 1)[0]).strip()
    if not text:
        return None
    line = _Line(text.split(), line_number)
    word = line.next('command')
    parser = _PARSERS.get(word)
    if parser is None:
        line.fail('Unknown command {}'.format(word))
    return line.finish(parser(line))


def parse_script(text: str) -> List[Tuple[int, Command]]:
    """
    :return: pairs of (1-based line number, command)
    """
    result = []
    for i, line in enumerate(text.splitlines(), start=1):
        command = parse_command(line, i)
        if command is not None:
            result.append((i, command))
    return result


def format_script(commands: Sequence[Command], header: str = None) -> str:
    lines = ['# {}'.format(l) for l in header.splitlines()] if header else []
    return '\n'.join(lines + [str(c) for c in commands]) + '\n'


def read_script(path: str) -> List[Tuple[int, Command]]:
    with open(path, encoding='utf-8') as f:
        text = f.read()
    logger.debug('Read script {}'.format(path))
    return parse_script(text)


def write_script(path: str, commands: Sequence[Command], header: str = None):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(format_script(commands, header))
    logger.info('Wrote {} commands to {}'.format(len(commands), path))
