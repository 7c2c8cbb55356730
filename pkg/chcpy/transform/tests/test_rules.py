import pytest

from chcpy.core.model import BOOL, DEFINITION, FALSE_CONJUNCT, INT, INT_LIST, IntConst, Var
from chcpy.core.registry import CatamorphismSpec
from chcpy.core.syntax import parse_clause
from chcpy.transform.rules import (DefinitionException, FoldException, LemmaException, LocalityException,
                                   STATUS_UNUSED, TransformationException, add_total_cata, apply_lemma, cleanup,
                                   define, fold, pattern_positions, remove_true_conjunct, unfold)
from chcpy.transform.tests.helpers import assert_variants, bounded_meaning

CLAUSE_2 = 'pl(A,B) :- all_leq(B,[],A).'
CLAUSE_3 = 'pl(A,B) :- B>=1, partition(B,C,D,E), all_leq(B,E,A).'
CLAUSE_4 = 'pl(A,B) :- B=<C, B>=0, partition(B,D,E,F), all_leq(B,[C|F],A).'
CLAUSE_5 = 'pl(A,B) :- A=true, B>=0.'
CLAUSE_7 = 'pl(A,B) :- B>=0, partition(B,C,D,E), all_leq(B,E,A).'
QSS_3 = 'qss(A) :- B>=0, partition(B,C,D,E), quicksort(D,F), quicksort(E,G), append(F,[B|G],H), isSorted(0,H,A).'


def test_define_partition(pl_definition):
    assert str(pl_definition.clause) == 'pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).'
    assert pl_definition.status == STATUS_UNUSED
    assert pl_definition.clause.origin == DEFINITION
    assert pl_definition.name == 'pl'


def test_define_quicksort(g5, quicksort_program):
    d = define((), g5.body, ['B1'], 'qss', quicksort_program.signatures)
    assert str(d.clause) == 'qss(A) :- quicksort(B,C), isSorted(0,C,A).'


def test_define_generalize(g5, quicksort_program):
    d = define((), g5.body, ['B1'], 'q', quicksort_program.signatures, generalize=True)
    assert str(d.clause) == 'q(A,B) :- quicksort(C,D), isSorted(B,D,A).'


@pytest.mark.parametrize('name, head', [
    ('partition', ['B']),
    ('pl', ['L']),
    ('pl', ['Z']),
])
def test_define_errors(g2, partition_program, name, head):
    with pytest.raises(DefinitionException):
        define((), g2.body, head, name, partition_program.signatures)


def test_define_empty_body(partition_program):
    with pytest.raises(DefinitionException):
        define((), [], [], 'pl', partition_program.signatures)


def test_pattern_positions(partition_program):
    assert pattern_positions('partition', partition_program) == [1]
    assert pattern_positions('all_leq', partition_program) == [1]
    assert pattern_positions('pl', partition_program) == []


def test_unfold_partition(pl_definition, partition_program, pl_signatures):
    clauses = unfold(pl_definition.clause, 0, partition_program)
    assert_variants(clauses, [CLAUSE_2, CLAUSE_3, CLAUSE_4], pl_signatures)
    assert str(clauses[0]) == CLAUSE_2


def test_unfold_drops_unsatisfiable(partition_program, pl_signatures):
    clauses = unfold(parse_clause(CLAUSE_4, pl_signatures), 1, partition_program)
    assert_variants(clauses, [CLAUSE_7], pl_signatures)


def test_unfold_empty_list(partition_program, pl_signatures):
    clauses = unfold(parse_clause(CLAUSE_2, pl_signatures), 0, partition_program)
    assert_variants(clauses, [CLAUSE_5], pl_signatures)


def test_unfold_errors(partition_program, pl_signatures):
    with pytest.raises(TransformationException):
        unfold(parse_clause(CLAUSE_7, pl_signatures), 5, partition_program)
    with pytest.raises(TransformationException):
        unfold(parse_clause('false :- A=false, pl(A,B).', pl_signatures), 0, partition_program)


def test_unfold_preserves_bounded_model(pl_definition, partition_program):
    before = bounded_meaning(partition_program, [pl_definition.clause], ['pl'])
    after = bounded_meaning(partition_program, unfold(pl_definition.clause, 0, partition_program), ['pl'])
    assert before
    assert after == before


def test_fold_goal(g2, pl_definition):
    assert str(fold(g2, pl_definition)) == 'false :- A=false, pl(A,B).'


def test_fold_needs_unfolded_definition(pl_definition, pl_signatures):
    c7 = parse_clause(CLAUSE_7, pl_signatures)
    with pytest.raises(FoldException):
        fold(c7, pl_definition)
    assert str(fold(c7, pl_definition.unfolded())) == 'pl(A,B) :- B>=0, pl(A,B).'


def test_fold_locality(pl_definition, pl_signatures):
    c = parse_clause('false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B), all_grt(X,L1,B).', pl_signatures)
    with pytest.raises(FoldException):
        fold(c, pl_definition)


def test_fold_requires_entailment(g2, partition_program):
    positive = parse_clause('false :- X>=1, partition(X,L,L1,L2), all_leq(X,L2,B).', partition_program.signatures)
    d = define(positive.constraint, positive.body, ['B', 'X'], 'pos', partition_program.signatures)
    with pytest.raises(FoldException) as e:
        fold(g2, d)
    assert 'entail' in str(e.value)


def test_fold_pinned_atoms(g2, pl_definition):
    with pytest.raises(FoldException):
        fold(g2, pl_definition, atoms=[0])
    assert str(fold(g2, pl_definition, atoms=[0, 1])) == 'false :- A=false, pl(A,B).'


def test_weak_fold(g5, quicksort_program, qs_signatures, catamorphisms):
    qss = define((), g5.body, ['B1'], 'qss', quicksort_program.signatures).unfolded()
    c = parse_clause('p(A) :- quicksort(B,C), isSorted(0,C,A), append(C,[],D).', qs_signatures)
    with pytest.raises(FoldException):
        fold(c, qss, catamorphisms=catamorphisms)
    folded = fold(c, qss, weak=True, catamorphisms=catamorphisms)
    assert str(folded) == 'p(A) :- qss(A), isSorted(0,B,A), append(B,[],C).'


def test_apply_lemma(quicksort_lemmas, catamorphisms, qs_signatures):
    c3 = parse_clause(QSS_3, qs_signatures)
    g2_lemma = quicksort_lemmas[1]
    c4 = apply_lemma(c3, g2_lemma, catamorphisms)
    assert c4.body[:-1] == c3.body
    assert str(c4.body[-1]) == 'all_leq(B,E,true)'
    assert apply_lemma(c4, g2_lemma, catamorphisms) == c4


def test_apply_lemmas_in_turn(quicksort_lemmas, catamorphisms, qs_signatures):
    c = parse_clause(QSS_3, qs_signatures)
    for lemma in quicksort_lemmas:
        c = apply_lemma(c, lemma, catamorphisms)
    assert [str(a) for a in c.body[5:]] == ['all_grt(B,D,true)', 'all_leq(B,E,true)', 'all_grt(B,F,true)',
                                           'all_leq(B,G,true)']


def test_apply_lemma_without_premises(partition_lemmas, catamorphisms, qs_signatures):
    c = parse_clause('p(A) :- isSorted(0,B,A).', qs_signatures)
    with pytest.raises(LemmaException):
        apply_lemma(c, partition_lemmas[0], catamorphisms)


def test_apply_lemma_equates_outputs(partition_lemmas, catamorphisms, pl_signatures):
    lemma = partition_lemmas[1]
    c = parse_clause('p(A) :- partition(B,C,D,E), all_leq(B,E,A).', pl_signatures)
    updated = apply_lemma(c, lemma, catamorphisms)
    assert str(updated) == 'p(A) :- A=true, partition(B,C,D,E), all_leq(B,E,A).'
    assert apply_lemma(updated, lemma, catamorphisms) == updated

    contradicted = parse_clause('p(A) :- A=false, partition(B,C,D,E), all_leq(B,E,A).', pl_signatures)
    assert apply_lemma(contradicted, lemma, catamorphisms).constraint == (FALSE_CONJUNCT,)


def test_add_total_cata(catamorphisms, qs_signatures):
    c = parse_clause('qss(A) :- quicksort(B,C), append(C,[],D), isSorted(0,D,A).', qs_signatures)
    updated, out = add_total_cata(c, catamorphisms['isSorted'], [IntConst(0)], Var('C', INT_LIST))
    assert str(updated) == 'qss(A) :- quicksort(B,C), isSorted(0,C,D), append(C,[],E), isSorted(0,E,A).'
    assert out == Var('D', BOOL)


def test_add_total_cata_errors(catamorphisms, qs_signatures):
    c = parse_clause('qss(A) :- quicksort(B,C), isSorted(0,C,A).', qs_signatures)
    partial = CatamorphismSpec('isSorted', (0,), 1, 2, BOOL, total=False)
    with pytest.raises(TransformationException):
        add_total_cata(c, partial, [IntConst(0)], Var('B', INT_LIST))
    with pytest.raises(ValueError):
        add_total_cata(c, catamorphisms['isSorted'], [], Var('B', INT_LIST))
    with pytest.raises(TransformationException):
        add_total_cata(c, catamorphisms['isSorted'], [IntConst(0)], Var('Z', INT_LIST))


def test_add_total_cata_preserves_bounded_model(catamorphisms, partition_program):
    c = parse_clause('q(A) :- partition(A,B,C,D).', partition_program.signatures)
    updated, _ = add_total_cata(c, catamorphisms['all_leq'], [Var('A', INT)], Var('D', INT_LIST))
    assert bounded_meaning(partition_program, [updated], ['q']) == bounded_meaning(partition_program, [c], ['q'])


def test_remove_true_conjunct(partition_lemmas, catamorphisms, modes, pl_signatures):
    c = parse_clause('p(A) :- A>=0, partition(A,B,C,D), all_grt(A,C,true), all_leq(A,D,true).', pl_signatures)
    removed = remove_true_conjunct(c, 0, [1, 2], partition_lemmas, catamorphisms, modes)
    assert str(removed) == 'p(A) :- A>=0.'


def test_remove_anchor_alone(catamorphisms, modes, pl_signatures):
    c = parse_clause('p(A) :- A>=0, partition(A,B,C,D).', pl_signatures)
    assert str(remove_true_conjunct(c, 0, [], [], catamorphisms, modes)) == 'p(A) :- A>=0.'


def test_remove_locality(partition_lemmas, catamorphisms, modes, pl_signatures):
    c = parse_clause('p(A,F) :- partition(A,B,C,D), all_grt(A,C,true), all_leq(A,D,F).', pl_signatures)
    with pytest.raises(LocalityException):
        remove_true_conjunct(c, 0, [1], partition_lemmas, catamorphisms, modes)


def test_remove_needs_lemma(catamorphisms, modes, pl_signatures):
    c = parse_clause('p(A) :- A>=0, partition(A,B,C,D), all_grt(A,C,true), all_leq(A,D,true).', pl_signatures)
    with pytest.raises(LemmaException):
        remove_true_conjunct(c, 0, [1, 2], [], catamorphisms, modes)


def test_remove_needs_total_anchor(catamorphisms, pl_signatures):
    c = parse_clause('p(A) :- A>=0, partition(A,B,C,D).', pl_signatures)
    with pytest.raises(TransformationException):
        remove_true_conjunct(c, 0, [], [], catamorphisms, {})


def test_cleanup_subsumed(pl_signatures):
    c3, c7 = parse_clause(CLAUSE_3, pl_signatures), parse_clause(CLAUSE_7, pl_signatures)
    assert cleanup([c3, c7]) == [c7]
    assert cleanup([c7, c3]) == [c7]


def test_cleanup_unsatisfiable(pl_signatures):
    c6 = parse_clause('pl(A,B) :- B=<C, B>C, partition(B,D,E,F), all_leq(B,[C|F],A).', pl_signatures)
    assert cleanup([c6]) == []


def test_cleanup_keeps_distinct_clauses(pl_signatures):
    clauses = [parse_clause(t, pl_signatures) for t in (CLAUSE_5, CLAUSE_7, 'false :- A=false, pl(A,B).')]
    assert cleanup(clauses) == clauses


def test_cleanup_variants(pl_signatures):
    c7 = parse_clause(CLAUSE_7, pl_signatures)
    renamed = parse_clause('pl(X,Y) :- Y>=0, partition(Y,L,L1,L2), all_leq(Y,L2,X).', pl_signatures)
    assert cleanup([c7, renamed]) == [c7]
