import random

import pytest

from chcpy.core.constraints import (EngineConfig, SAT, UNKNOWN, UNSAT, entails, equivalent, find_model, is_sat,
                                    negate_atomic, normalize, project, simplify)
from chcpy.core.model import BoolBind, BoolEq, FALSE_CONJUNCT, LinExpr, LinRel, REL_EQ, REL_GT, REL_LT
from chcpy.core.tests.helpers import brute_force, holds, random_conjunction, variables_of

RANDOM_SEED = 20201016
NAMES = ['W', 'X', 'Y', 'Z']


def rel(text: str) -> LinRel:
    """
    Builds a relation from text such as 'X>=Y+1' or '2*X=<1', with at most one relation symbol.
    """
    from chcpy.core.syntax import parse_clause
    return parse_clause('p :- {}.'.format(text)).constraint[0]


def rels(*texts):
    return tuple(rel(t) for t in texts)


def test_is_sat_examples():
    assert is_sat(rels('B=<C', 'B>C')) == UNSAT
    assert is_sat(rels('X>=0')) == SAT
    assert is_sat((BoolBind('B', True), BoolBind('B', False))) == UNSAT
    assert is_sat(()) == SAT
    assert is_sat((FALSE_CONJUNCT,)) == UNSAT


def test_integer_reasoning():
    assert is_sat(rels('2*X=1')) == UNSAT
    assert is_sat(rels('2*X+2*Y=3')) == UNSAT
    assert is_sat(rels('2*X=<1', '2*X>=1')) == UNSAT
    assert is_sat(rels('X>Y', 'Y>X-1')) == UNSAT
    assert is_sat(rels('N=M+1', 'M>=0', 'N=<0')) == UNSAT


def test_disequalities():
    assert find_model(rels('X=\\=0', 'X>=0', 'X=<1')) == {'X': 1}
    assert is_sat(rels('X=\\=0', 'X=\\=1', 'X>=0', 'X=<1')) == UNSAT
    assert is_sat(rels('X=\\=Y', 'X=Y')) == UNSAT
    assert is_sat(rels('X=\\=0', 'X=\\=1', 'X>=0', 'X=<1'), EngineConfig(max_splits=0)) == UNKNOWN


def test_booleans():
    assert is_sat((BoolEq('A', 'B'), BoolBind('B', True), BoolBind('A', False))) == UNSAT
    assert is_sat((BoolEq('A', 'B', equal=False), BoolEq('B', 'C', equal=False), BoolEq('A', 'C', equal=False))) \
        == UNSAT
    model = find_model((BoolEq('A', 'B', equal=False), BoolBind('A', True), rel('X>=2')))
    assert model == {'A': True, 'B': False, 'X': 2}


def test_find_model_satisfies():
    c = rels('X>=3', 'X=<3', 'Y=X+2', 'Z>Y')
    model = find_model(c)
    assert model['X'] == 3 and model['Y'] == 5
    assert holds(list(c), model)
    assert find_model(rels('X>Y', 'Y>X')) is None


def test_entails_examples():
    assert entails(rels('X>Y', 'Y>=0'), rels('X>=1'))
    assert not entails(rels('X>=0'), rels('X>0'))
    assert entails(rels('B>=0', 'B=<C'), rels('B>=0'))
    assert entails(rels('X>Y', 'Y>X'), rels('X=5'))
    assert entails((BoolBind('A', True), BoolEq('A', 'B')), (BoolBind('B', True),))
    assert not entails(rels('X>=0'), rels('X=0'))


def test_equivalent_examples():
    assert equivalent(rels('X>Y'), rels('X>=Y+1'))
    assert equivalent(rels('X>=0', 'X>=0'), rels('X>=0'))
    assert not equivalent(rels('X>=0'), rels('X>=1'))


def test_project_examples():
    assert project(rels('B=<C', 'B>=0'), {'B'}) == rels('B>=0')
    assert project(rels('X>=0'), {'X'}) == rels('X>=0')
    assert project(rels('X=Y+1', 'Y>=0'), {'X'}) == rels('X>=1')
    assert project(rels('X>Y', 'Y>X'), {'X'}) == (FALSE_CONJUNCT,)
    assert project((BoolEq('A', 'C'), BoolBind('C', True)), {'A'}) == (BoolBind('A', True),)
    assert project(rels('X=Y', 'Y=Z'), {'X', 'Z'}) in (rels('X=Z'), rels('Z=X'))


def test_project_drops_disequalities_on_eliminated_variables():
    assert project(rels('X>=0', 'Y=\\=X'), {'X'}) == rels('X>=0')
    assert project(rels('X>=0', 'Y=X', 'Y=\\=2'), {'X'}) == rels('X>=0', 'X=\\=2')


def test_simplify_examples():
    assert simplify(rels('X>=0', 'X>=0')) == rels('X>=0')
    assert [str(a) for a in simplify(rels('X>Y'))] == ['X>=Y+1']
    assert simplify(rels('B=<C', 'B>=0', 'B=<C')) == rels('B=<C', 'B>=0')
    assert simplify(rels('B>C', 'B=<C')) == (FALSE_CONJUNCT,)
    assert simplify(rels('X>=1', 'X>=0')) == rels('X>=1')


def test_normal_form_orientation():
    assert [str(a) for a in normalize(rels('0=<B', 'C>=B', 'Q-L=< -1'))] == ['B>=0', 'B=<C', 'L>=Q+1']
    assert [str(a) for a in normalize(rels('2*X=<3'))] == ['X=<1']


def test_negate_atomic():
    assert negate_atomic(rel('X=Y')) == [LinRel(REL_LT, LinExpr.var('X'), LinExpr.var('Y')),
                                         LinRel(REL_GT, LinExpr.var('X'), LinExpr.var('Y'))]
    assert negate_atomic(rel('X=\\=Y')) == [LinRel(REL_EQ, LinExpr.var('X'), LinExpr.var('Y'))]
    assert negate_atomic(rel('X=<0')) == [LinRel(REL_GT, LinExpr.var('X'), LinExpr.const(0))]
    assert negate_atomic(BoolBind('B', False)) == [BoolBind('B', True)]
    assert negate_atomic(BoolEq('A', 'B')) == [BoolEq('A', 'B', equal=False)]


def test_engine_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(search_budget=0)
    with pytest.raises(ValueError):
        EngineConfig(max_splits=-1)


def test_is_sat_against_brute_force():
    rng = random.Random(RANDOM_SEED)
    for _ in range(1000):
        c = random_conjunction(rng, NAMES[:rng.randint(1, 4)])
        verdict = is_sat(c)
        witness = brute_force(c, variables_of(c))
        if witness is not None:
            assert verdict == SAT, ', '.join(str(a) for a in c)
        if verdict == SAT:
            assert holds(c, find_model(c))


def test_project_loses_no_solutions():
    rng = random.Random(RANDOM_SEED + 1)
    for _ in range(200):
        names = NAMES[:rng.randint(2, 3)]
        c = random_conjunction(rng, names)
        all_vars = variables_of(c)
        keep = sorted(rng.sample(all_vars, rng.randint(1, len(all_vars)))) if all_vars else []
        projected = project(c, keep)
        assert set(variables_of(projected)) <= set(keep)
        for point in _grid(keep, -4, 4):
            if brute_force(c, all_vars, fixed=point) is not None:
                assert holds(list(projected), point), '{} on {}'.format(point, ', '.join(str(a) for a in c))


def test_simplify_preserves_meaning():
    rng = random.Random(RANDOM_SEED + 2)
    for _ in range(200):
        c = random_conjunction(rng, NAMES[:rng.randint(1, 3)])
        simplified = simplify(c)
        if simplified == (FALSE_CONJUNCT,):
            assert is_sat(c) == UNSAT
        else:
            assert equivalent(c, simplified)
            assert equivalent(simplified, c)
            assert equivalent(simplified, normalize(list(reversed(c))))


def _grid(names, lo, hi):
    points = [{}]
    for name in names:
        points = [dict(p, **{name: v}) for p in points for v in range(lo, hi + 1)]
    return points
