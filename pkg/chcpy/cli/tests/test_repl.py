import io

import pytest

from chcpy.cli.repl import PROMPT, Session, run_session
from chcpy.cli.tests.fixtures import G2_SCRIPT
from chcpy.transform.strategy import Derivation, run_rcata
from chcpy.transform.workspace import Workspace


@pytest.fixture
def session(partition_chc, partition_program) -> Session:
    ws = Workspace.start(partition_program, partition_chc.by_tag('G2'))
    return Session(Derivation(ws), io.StringIO())


def _replay(session: Session):
    for line in G2_SCRIPT.splitlines():
        assert session.handle(line)


def test_replay_script(session):
    _replay(session)
    assert session.derivation.ws.labels() == ['G2', '5', '8']
    assert session.out.getvalue().rstrip().endswith('% no list arguments left')


def test_undo(session):
    session.handle('define pl from G2 atoms 1,2')
    session.handle('fold G2 with pl')
    session.handle('undo')
    session.handle('undo')
    assert session.derivation.ws.labels() == ['G2']
    assert session.derivation.trace == []
    session.handle('undo')
    assert 'Nothing to undo' in session.out.getvalue()


def test_failed_command_keeps_state(session):
    session.handle('define pl from G2 atoms 1,2')
    before = session.derivation.ws
    session.handle('fold G2 with nothing')
    session.handle('unfold G2 at')
    assert session.derivation.ws is before
    assert len(session.derivation.trace) == 1
    assert session.out.getvalue().count('Error: ') == 2


def test_freeze_replays(session, partition_chc, partition_program, tmp_path):
    _replay(session)
    path = str(tmp_path / 'g2.script')
    session.handle('freeze {}'.format(path))
    with open(path) as f:
        script = f.read()
    replayed = run_rcata(partition_program, partition_chc.by_tag('G2'), script=script)
    assert [str(c) for c in replayed.trace] == [str(c) for c in session.derivation.trace]
    assert [str(c) for c in replayed.clauses] == [str(c) for c in session.derivation.ws.result()]


def test_session_commands(session):
    session.handle('help')
    session.handle('freeze')
    session.handle('# comment')
    out = session.out.getvalue()
    assert 'define NAME from LABEL' in out
    assert 'Usage: freeze FILE' in out
    assert not session.handle('quit')
    assert not session.handle('exit')


def test_run_session(session):
    run_session(session, io.StringIO('define pl from G2 atoms 1,2\nshow\nquit\nfold G2 with pl\n'))
    assert len(session.derivation.trace) == 1
    assert PROMPT not in session.out.getvalue()
    assert session.out.getvalue().startswith('G2. false :- ')
