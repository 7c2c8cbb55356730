import pytest

from chcpy.transform.script import (AddTotalCata, ApplyLemma, Auto, Cleanup, Commit, Define, Fold,
                                    RemoveTrueConjunct, ScriptException, Unfold, parse_command, parse_script,
                                    read_script, write_script)

PARTITION_SCRIPT = '''
# the derivation of T_G2
define pl from G2 atoms 1,2
fold G2 with pl
unfold pl at 1 as 2,3,4
unfold 2 at 1 as 5
unfold 4 at 2 as 7   # clause 6 has an unsatisfiable constraint
cleanup
fold 7 with pl as 8
'''


@pytest.mark.parametrize('text, command', [
    ('define pl from G2 atoms 1,2', Define('pl', 'G2', (1, 2))),
    ('define a from c5 atoms 3,4,5 head A,B generalize', Define('a', 'c5', (3, 4, 5), ('A', 'B'), True)),
    ('unfold pl at 1', Unfold('pl', 1)),
    ('unfold pl at 1 as 2,3,4', Unfold('pl', 1, ('2', '3', '4'))),
    ('fold 7 with pl', Fold('7', 'pl')),
    ('fold c3 with qss atoms 2,5 weak as c4', Fold('c3', 'qss', (2, 5), True, 'c4')),
    ('lemma 3 using G2 as 4', ApplyLemma('3', 'G2', '4')),
    ('total 5 isSorted F params 0', AddTotalCata('5', 'isSorted', 'F', ('0',))),
    ('total 5 isSorted F params _ as 6', AddTotalCata('5', 'isSorted', 'F', ('_',), '6')),
    ('remove 7 anchor 2 companions 6,7 as 8', RemoveTrueConjunct('7', 2, (6, 7), '8')),
    ('remove 7 anchor 2', RemoveTrueConjunct('7', 2)),
    ('cleanup', Cleanup()),
    ('auto', Auto()),
    ('commit 8', Commit('8')),
])
def test_parse_command(text, command):
    assert parse_command(text) == command
    assert str(command) == text


def test_commas_and_comments():
    assert parse_command('define pl from G2 atoms 1 , 2   # the pl definition') == Define('pl', 'G2', (1, 2))
    assert parse_command('   ') is None
    assert parse_command('# nothing') is None


def test_empty_outputs_round_trip():
    command = Unfold('c6', 2, ())
    assert parse_command(str(command)) == command
    command = Define('p', 'G', (1,), ())
    assert parse_command(str(command)) == command


def test_parse_script_line_numbers():
    commands = parse_script(PARTITION_SCRIPT)
    assert [n for n, _ in commands] == [3, 4, 5, 6, 7, 8, 9]
    assert commands[4][1] == Unfold('4', 2, ('7',))


@pytest.mark.parametrize('text', [
    'frobnicate G2',
    'unfold G2 at',
    'unfold G2 at 0',
    'unfold G2 at 1,2',
    'fold G2 with',
    'define pl from G2 atoms x',
    'define pl G2 atoms 1',
    'cleanup now',
    'lemma 3 using G2 as',
    'commit',
])
def test_parse_errors(text):
    with pytest.raises(ScriptException):
        parse_command(text)


def test_parse_error_line_number():
    with pytest.raises(ScriptException) as e:
        parse_script('cleanup\n\nunfold pl at one\n')
    assert e.value.line_number == 3
    assert str(e.value).startswith('line 3')


def test_write_and_read(tmp_path):
    commands = [c for _, c in parse_script(PARTITION_SCRIPT)]
    path = str(tmp_path / 'g2.script')
    write_script(path, commands, header='derivation of G2')
    assert [c for _, c in read_script(path)] == commands
    with open(path) as f:
        assert f.readline() == '# derivation of G2\n'
