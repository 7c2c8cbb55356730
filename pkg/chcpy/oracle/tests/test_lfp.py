from itertools import product

import pytest

from chcpy.core.model import BOOL, INT, INT_LIST, IntConst
from chcpy.core.registry import read_manifest
from chcpy.core.syntax import parse_atom, parse_chc, parse_clause
from chcpy.core.tests.helpers import corpus_path
from chcpy.oracle.lfp import (DomainBounds, GroundTermCapException, bounded_lfp, goal_violated, ground_atom,
                              restrict, to_python, to_term)

CORPUS_MANIFEST = read_manifest(corpus_path('manifest.yaml'))


def test_partition_facts(partition_program, partition_model):
    signatures = partition_program.signatures
    assert parse_atom('partition(1,[0],[0],[])', signatures) in partition_model
    assert parse_atom('all_leq(1,[1],true)', signatures) in partition_model
    assert parse_atom('all_leq(1,[1],false)', signatures) not in partition_model


def test_quicksort_facts(quicksort_program, small_bounds):
    atoms = bounded_lfp(quicksort_program, small_bounds)
    signatures = quicksort_program.signatures
    assert ground_atom('quicksort', [(1, 0), (0, 1)], signatures) in atoms
    assert ground_atom('quicksort', [(1, 0), (1, 0)], signatures) not in atoms
    assert ground_atom('count', [0, (0, 0), 2], signatures) in atoms
    assert ground_atom('isSorted', [0, (2, 1), False], signatures) in atoms


def test_fact_without_body():
    assert bounded_lfp(parse_chc('p(0).')) == {parse_atom('p(0)')}


def test_heads_outside_bounds_are_discarded():
    cs = parse_chc('nat(0).\nnat(N) :- N=M+1, nat(M).')
    atoms = bounded_lfp(cs, DomainBounds(int_min=0, int_max=3))
    assert {a.args[0].value for a in atoms} == {0, 1, 2, 3}


def test_goals_are_ignored(partition_chc, small_bounds):
    assert bounded_lfp(partition_chc, small_bounds) == bounded_lfp(partition_chc.without_goals(), small_bounds)


def test_goal_holds(partition_chc, partition_model, small_bounds):
    for tag in ('G1', 'G2'):
        assert goal_violated(partition_model, partition_chc.by_tag(tag), small_bounds) is None


def test_mutated_goal_has_witness(partition_program, partition_model, small_bounds):
    mutated = parse_clause('false :- B=true, partition(X,L,L1,L2), all_leq(X,L2,B)', partition_program.signatures)
    witness = goal_violated(partition_model, mutated, small_bounds)
    assert witness is not None
    assert witness.is_goal()
    assert all(small_bounds.contains(t) for atom in witness.body for t in atom.args)


@pytest.fixture
def wider_bounds() -> DomainBounds:
    return DomainBounds(0, 2, 3)


@pytest.mark.parametrize('text', [
    'false :- B=false, partition(X,L,L1,L2), all_grt(X,L2,B)',
    'false :- B=false, partition(X,L,L1,L2), all_leq(X,L1,B)',
    'false :- B=false, Y=X-1, partition(X,L,L1,L2), all_grt(Y,L1,B)',
    'false :- B=false, Y=X+1, partition(X,L,L1,L2), all_leq(Y,L2,B)',
])
def test_wrong_contracts_are_refuted(partition_chc, partition_program, wider_bounds, text):
    model = bounded_lfp(partition_program, wider_bounds)
    for tag in ('G1', 'G2'):
        assert goal_violated(model, partition_chc.by_tag(tag), wider_bounds) is None
    witness = goal_violated(model, parse_clause(text, partition_program.signatures), wider_bounds)
    assert witness is not None
    assert all(wider_bounds.contains(t) for atom in witness.body for t in atom.args)


def test_empty_interpretation_has_no_witness(partition_chc, small_bounds):
    assert goal_violated(set(), partition_chc.by_tag('G1'), small_bounds) is None


def test_lemma_checked_against_model(partition_program, partition_model, small_bounds):
    signatures = partition_program.signatures
    lemma = parse_clause('all_grt(X,L1,true) :- partition(X,L,L1,L2)', signatures)
    assert goal_violated(partition_model, lemma, small_bounds) is None
    wrong = parse_clause('all_grt(X,L2,true) :- partition(X,L,L1,L2)', signatures)
    assert goal_violated(partition_model, wrong, small_bounds) is not None


def test_ground_term_cap():
    cs = parse_chc('p(X,Y) :- X>=0, Y>=0.')
    with pytest.raises(GroundTermCapException) as e:
        bounded_lfp(cs, DomainBounds(int_min=0, int_max=2, ground_term_cap=5))
    assert e.value.count == 9
    assert e.value.cap == 5


def test_larger_bounds_derive_more(quicksort_program):
    small = DomainBounds(int_min=0, int_max=1, max_list_len=2)
    large = DomainBounds(int_min=0, int_max=2, max_list_len=3)
    small_atoms = bounded_lfp(quicksort_program, small)
    large_atoms = bounded_lfp(quicksort_program, large)
    assert small_atoms <= large_atoms


@pytest.mark.parametrize('pred', sorted(CORPUS_MANIFEST.catamorphisms))
def test_catamorphisms_are_total(quicksort_program, quicksort_model, small_bounds, pred):
    spec = CORPUS_MANIFEST.catamorphisms[pred]
    sorts = quicksort_program.signatures[pred]
    facts = restrict(quicksort_model, [pred])
    inputs = spec.inputs()
    for values in product(*(small_bounds.pool(sorts[i]) for i in inputs)):
        outputs = [a.args[spec.output] for a in facts if tuple(a.args[i] for i in inputs) == values]
        assert len(outputs) == 1, (pred, values)


def test_pools(small_bounds):
    assert small_bounds.pool(INT) == [IntConst(0), IntConst(1), IntConst(2)]
    assert len(small_bounds.pool(BOOL)) == 2
    assert len(small_bounds.pool(INT_LIST)) == 1 + 3 + 9
    assert small_bounds.contains(to_term((2, 2), INT_LIST))
    assert not small_bounds.contains(to_term((0, 0, 0), INT_LIST))
    assert not small_bounds.contains(IntConst(3))


def test_conversions():
    assert to_python(to_term((1, 2), INT_LIST)) == (1, 2)
    assert to_python(to_term(True, BOOL)) is True
    with pytest.raises(ValueError):
        to_term(True, INT)
    with pytest.raises(ValueError):
        ground_atom('p', [1, 2], {'p': (INT,)})


def test_parse_bounds():
    bounds = DomainBounds.parse('-1,3,2', max_iterations=7)
    assert (bounds.int_min, bounds.int_max, bounds.max_list_len, bounds.max_iterations) == (-1, 3, 2, 7)
    assert str(bounds) == 'ints -1..3, lists up to 2'


@pytest.mark.parametrize('text', ['1,2', 'a,b,c', '3,1,2', '0,1,-1'])
def test_parse_bad_bounds(text):
    with pytest.raises(ValueError):
        DomainBounds.parse(text)
