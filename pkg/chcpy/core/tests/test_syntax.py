import pytest

from chcpy.core.model import (BOOL, BoolBind, BoolEq, GOAL, INT, INT_LIST, LinRel, PROGRAM, REL_NE, is_list_free)
from chcpy.core.syntax import (ChcSyntaxException, SortConflictException, parse_atom, parse_chc, parse_clause,
                               print_chc, read_chc, write_chc)
from chcpy.core.tests.helpers import assert_well_sorted, corpus_path


def test_partition_program(partition_chc):
    assert len(partition_chc) == 11
    assert len(partition_chc.without_goals()) == 9
    assert partition_chc.signatures['all_grt'] == (INT, INT_LIST, BOOL)
    assert partition_chc.signatures['all_leq'] == (INT, INT_LIST, BOOL)
    assert partition_chc.signatures['partition'] == (INT, INT_LIST, INT_LIST, INT_LIST)
    assert_well_sorted(partition_chc)


def test_goal_constraints(partition_chc):
    g2 = partition_chc.by_tag('G2')
    assert g2.is_goal()
    assert g2.origin == GOAL
    assert g2.constraint == (BoolBind('B', False),)
    assert [a.pred for a in g2.body] == ['partition', 'all_leq']
    assert all(c.origin == PROGRAM for c in partition_chc.without_goals())


def test_quicksort_goals(quicksort_chc):
    assert [g.tag for g in quicksort_chc.goals()] == ['G3', 'G4', 'G5', 'G6', 'G7']
    assert len(quicksort_chc) == 15
    g6 = quicksort_chc.by_tag('G6')
    assert isinstance(g6.constraint[0], LinRel) and g6.constraint[0].rel == REL_NE
    assert quicksort_chc.signatures['isSorted'] == (INT, INT_LIST, BOOL)


def test_quicksort_program(quicksort_program):
    assert len(quicksort_program) == 19
    assert not quicksort_program.goals()
    assert_well_sorted(quicksort_program)


def test_derived_g5_clauses(derived_g5_chc):
    assert len(derived_g5_chc) == 21
    assert is_list_free(derived_g5_chc)
    assert derived_g5_chc.by_tag('F5').is_goal()
    assert derived_g5_chc.by_tag('28').head.pred == 'new11'
    assert_well_sorted(derived_g5_chc)


def test_boolean_variable_equalities():
    c = parse_clause('p(A,B) :- A=B, q(B).', {'q': (BOOL,)})
    assert c.constraint == (BoolEq('A', 'B'),)
    c = parse_clause('p(A,B) :- A=B.')
    assert isinstance(c.constraint[0], LinRel)
    c = parse_clause('p(A) :- A=\\=true.')
    assert c.constraint == (BoolBind('A', False),)


def test_disequality_spellings():
    expected = parse_clause('p(X,Y) :- X=\\=Y.')
    for spelling in ('=/=', '!='):
        assert parse_clause('p(X,Y) :- X{}Y.'.format(spelling)) == expected
    assert str(expected) == 'p(X,Y) :- X=\\=Y.'


def test_anonymous_variables():
    c = parse_clause('p(X) :- q(X,_,_).')
    assert [str(a) for a in c.body[0].args] == ['X', '_1', '_2']


def test_syntax_errors():
    with pytest.raises(ChcSyntaxException) as e:
        parse_chc('p(X')
    assert e.value.span.line == 1
    with pytest.raises(ChcSyntaxException):
        parse_chc('p(X) :- X*Y>0.')
    with pytest.raises(ChcSyntaxException):
        parse_chc('p(X) :- q(X).\np(X,Y).')
    with pytest.raises(ChcSyntaxException) as e:
        parse_chc('p(X).\n\np(X) :- X # 1.')
    assert e.value.span.line == 3


def test_sort_conflicts():
    with pytest.raises(SortConflictException):
        parse_chc('p(X) :- X=true.\np(X) :- X>=0.')
    with pytest.raises(SortConflictException):
        parse_clause('p(X) :- X>=0, q([X|X]).')


def test_empty_file():
    assert len(parse_chc('% nothing here\n')) == 0
    assert print_chc(parse_chc('')) == ''


def test_round_trip(partition_chc, quicksort_chc, derived_g5_chc):
    for cs in (partition_chc, quicksort_chc, derived_g5_chc):
        printed = print_chc(cs)
        again = parse_chc(printed)
        assert again.clauses == cs.clauses
        assert [c.tag for c in again] == [c.tag for c in cs]
        assert print_chc(again) == printed


def test_write_and_read(tmp_path, partition_chc):
    path = str(tmp_path / 'out.chc')
    write_chc(path, partition_chc)
    assert read_chc(path).clauses == partition_chc.clauses


def test_given_signatures(partition_program):
    cs = parse_chc(read_goal(), signatures=partition_program.signatures)
    assert cs.signatures['partition'] == (INT, INT_LIST, INT_LIST, INT_LIST)
    assert cs.goals()[0].body[0].args[1].sort == INT_LIST
    atom = parse_atom('all_leq(X,[],B)', cs.signatures)
    assert str(atom) == 'all_leq(X,[],B)'


def test_nil_sort_follows_context():
    c = parse_clause('p([]) :- q([[]]).')
    assert str(c) == 'p([]) :- q([[]]).'


def read_goal() -> str:
    with open(corpus_path('partition.chc'), encoding='utf-8') as f:
        return ''.join(line for line in f if line.startswith('false') or line.startswith('%@'))
