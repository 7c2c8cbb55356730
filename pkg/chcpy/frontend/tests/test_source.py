import pytest

from chcpy.frontend.source import (BinOp, Block, BoolLit, Call, IntLit, Match, Name, NAT, NAT_LIST, NilLit, Not,
                                   SourceSyntaxException, SourceType, UnsupportedConstructException, ValDef,
                                   parse_source, rename_names, tokenize_source, walk)


def test_parse_partition(partition_fun):
    assert [f.name for f in partition_fun] == ['all_grt', 'all_leq', 'partition']
    partition = partition_fun[2]
    assert partition.params == (('x', NAT), ('l', NAT_LIST))
    assert partition.result == SourceType('Tuple', (NAT_LIST, NAT_LIST))
    assert partition.has_contract()
    assert partition.res == 'res'
    assert not partition_fun[0].has_contract()


def test_parse_cases(partition_fun):
    all_grt = partition_fun[0]
    assert isinstance(all_grt.body, Match)
    assert all_grt.body.subject == Name('l')
    cases = all_grt.body.cases
    assert [c.constructor for c in cases] == ['Nil', 'Cons', 'Cons']
    assert cases[0].body == BoolLit(True)
    assert cases[1].guard == BinOp('<=', Name('x'), Name('y'))
    assert cases[2].body == Call('all_grt', (Name('x'), Name('ys')))


def test_parse_quicksort(quicksort_fun):
    assert [f.name for f in quicksort_fun] == ['quicksort', 'append', 'count', 'isSorted']
    quicksort, append, count, _ = quicksort_fun
    assert quicksort.pre is None and quicksort.post is not None
    assert append.pre is not None
    assert count.result == NAT
    assert sum(1 for e in walk(quicksort.body) if isinstance(e, Call)) == 4


def test_parse_nil_forms():
    f, = parse_source('def e(x: Nat): List[Nat] = Nil[Nat]()')
    g, = parse_source('def e(x: Nat): List[Nat] = Nil()')
    assert f.body == g.body == NilLit()


def test_precedence():
    f, = parse_source('def f(x: Nat, y: Nat): Boolean = x + 1 <= y && !(x == y) || y > 2')
    expected = BinOp('||',
                     BinOp('&&', BinOp('<=', BinOp('+', Name('x'), IntLit(1)), Name('y')),
                           Not(BinOp('==', Name('x'), Name('y')))),
                     BinOp('>', Name('y'), IntLit(2)))
    assert f.body == expected


def test_implication_is_right_associative():
    f, = parse_source('def f(a: Boolean, b: Boolean, c: Boolean): Boolean = a ==> b ==> c')
    assert f.body == BinOp('==>', Name('a'), BinOp('==>', Name('b'), Name('c')))


def test_block_with_vals():
    f, = parse_source('def f(x: Nat): Nat = { val y = x + 1; y }')
    assert f.body == Block((ValDef(('y',), BinOp('+', Name('x'), IntLit(1))),), Name('y'))


def test_unary_minus():
    f, = parse_source('def f(x: Int): Int = -x')
    assert f.body == BinOp('-', IntLit(0), Name('x'))


def test_comments_and_spans():
    tokens = tokenize_source('// header\ndef f(x: Nat): Nat =\n  x // trailing\n', 'f.fun')
    assert [t.text for t in tokens] == ['def', 'f', '(', 'x', ':', 'Nat', ')', ':', 'Nat', '=', 'x', '']
    assert tokens[0].span.line == 2
    assert tokens[10].span.line == 3
    assert tokens[10].span.column == 3


def test_syntax_error_span():
    with pytest.raises(SourceSyntaxException) as e:
        parse_source('def f(x: Nat): Nat = {\n  x +\n}', 'broken.fun')
    assert e.value.span.file == 'broken.fun'
    assert e.value.span.line == 3


def test_function_used_as_value():
    with pytest.raises(UnsupportedConstructException):
        parse_source('def f(x: Nat): Nat = f')


def test_polymorphism_rejected():
    with pytest.raises(UnsupportedConstructException) as e:
        parse_source('def f[T](x: T): T = x')
    assert e.value.span.line == 1
    assert e.value.span.column == 6


@pytest.mark.parametrize('text', [
    'def f(g: Nat => Nat): Nat = 0',
    'def f(x: Nat): Nat = x * 2',
    'def f(s: Set[Nat]): Nat = 0',
    'def f(l: List[Boolean]): Nat = 0',
    'def f(x: Nat): Nat = g(y => y)',
])
def test_unsupported_constructs(text):
    with pytest.raises(UnsupportedConstructException):
        parse_source(text)


def test_unknown_name():
    with pytest.raises(SourceSyntaxException) as e:
        parse_source('def f(x: Nat): Nat = y')
    assert 'y' in e.value.message


def test_duplicate_definition():
    with pytest.raises(SourceSyntaxException):
        parse_source('def f(x: Nat): Nat = x\ndef f(y: Nat): Nat = y')


def test_result_only_in_postcondition():
    with pytest.raises(SourceSyntaxException):
        parse_source('def f(x: Nat): Nat = { require(res > 0)\n x } ensuring { res => res >= 0 }')


def test_rename_names():
    e = BinOp('+', Name('x'), Call('f', (Name('y'), Name('x'))))
    assert rename_names(e, {'x': 'z'}) == BinOp('+', Name('z'), Call('f', (Name('y'), Name('z'))))
