import sys
from typing import List, Optional, TextIO, Tuple

from ..core.system_helpers import get_logger
from ..transform.rules import TransformationException
from ..transform.script import Command, ScriptException, parse_command, write_script
from ..transform.strategy import Derivation, StrategyLimitException
from ..transform.workspace import Workspace

logger = get_logger(__name__)

PROMPT = 'chc> '

HELP = '''Script commands:
  define NAME from LABEL atoms I,J,... [head V,...] [generalize]
  unfold LABEL at I [as L1,L2,...]
  fold LABEL with NAME [atoms I,J,...] [weak] [as L]
  lemma LABEL using NAME [as L]
  total LABEL PRED LISTVAR params P,... [as L]
  remove LABEL anchor I [companions J,...] [as L]
  cleanup
  auto
  commit LABEL
Session commands:
  show           print the current clauses
  undo           take back the last command
  freeze FILE    write the commands so far as a script
  help           this text
  quit           leave the session
'''

_Snapshot = Tuple[Workspace, List[Command], int, int]


class Session:
    """
    An interactive derivation. A command that fails leaves the clauses as they were.
    """
    def __init__(self, derivation: Derivation, out: TextIO = None):
        self.derivation = derivation
        self.out = out or sys.stdout
        self.history: List[_Snapshot] = []

    def _snapshot(self) -> _Snapshot:
        d = self.derivation
        return d.ws, list(d.trace), d.iterations, d.unfolds

    def _restore(self, snapshot: _Snapshot):
        d = self.derivation
        d.ws, d.trace, d.iterations, d.unfolds = snapshot[0], list(snapshot[1]), snapshot[2], snapshot[3]

    def _print(self, text: str = ''):
        self.out.write(text + '\n')

    def show(self):
        ws = self.derivation.ws
        for label in ws.labels():
            self._print('{}. {}'.format(label, ws.clause(label)))
        remaining = ws.list_labels()
        if remaining:
            self._print('% with list arguments: {}'.format(', '.join(remaining)))
        else:
            self._print('% no list arguments left')

    def undo(self):
        if not self.history:
            self._print('Nothing to undo')
            return
        self._restore(self.history.pop())
        self.show()

    def freeze(self, path: str):
        write_script(path, self.derivation.trace, header='session on {}'.format(self.derivation.ws.labels()[0]))
        self._print('Wrote {} commands to {}'.format(len(self.derivation.trace), path))

    def execute(self, command: Command):
        snapshot = self._snapshot()
        try:
            self.derivation.execute(command)
        except (ScriptException, StrategyLimitException, TransformationException) as e:
            self._restore(snapshot)
            self._print('Error: {}'.format(e))
            return
        self.history.append(snapshot)
        self.show()

    def handle(self, line: str) -> bool:
        """
        Handles one input line.
        :return: False once the session should end
        """
        words = line.split()
        if not words or words[0].startswith('#'):
            return True
        keyword = words[0]
        if keyword in ('quit', 'exit'):
            return False
        elif keyword == 'help':
            self._print(HELP.rstrip())
        elif keyword == 'show':
            self.show()
        elif keyword == 'undo':
            self.undo()
        elif keyword == 'freeze':
            if len(words) != 2:
                self._print('Usage: freeze FILE')
            else:
                try:
                    self.freeze(words[1])
                except OSError as e:
                    self._print('Error: {}'.format(e))
        else:
            try:
                command = parse_command(line)
            except ScriptException as e:
                self._print('Error: {}'.format(e))
                return True
            if command is not None:
                self.execute(command)
        return True


def run_session(session: Session, stream: Optional[TextIO] = None):
    stream = stream or sys.stdin
    interactive = stream.isatty()
    session.show()
    while True:
        if interactive:
            session.out.write(PROMPT)
            session.out.flush()
        line = stream.readline()
        if not line:
            break
        if not session.handle(line.strip()):
            break
    logger.debug('Session ended after {} commands'.format(len(session.derivation.trace)))
