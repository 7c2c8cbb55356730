"""
Parser for the contract-annotated functional source language.

    def all_grt(x: Nat, l: List[Nat]): Boolean = {
      l match {
        case Nil() => true
        case Cons(y, ys) if (x =< y) => false
        case Cons(y, ys) if (x > y) => all_grt(x, ys)
      }
    }

The fragment is first-order and monomorphic: Nat, Int, Boolean, List[Nat], List[Int] and tuples of those, pattern
matching on lists, if/else, val bindings, calls, linear arithmetic and comparisons. Contracts are written with
require(...) as the first item of the body and ensuring { res => ... } after it.
"""
import re
from dataclasses import dataclass, field, fields, is_dataclass, replace
from typing import Iterator, List, Optional, Set, Tuple

from ..core.syntax import SourceSpan, Token
from ..core.system_helpers import get_logger

logger = get_logger(__name__)

SCALAR_TYPES = ('Nat', 'Int', 'Boolean')
COMPARISONS = ('==', '!=', '<', '<=', '=<', '>', '>=')
ARITHMETIC = ('+', '-')
OBSERVERS = ('head', 'tail')

_SPAN = dict(default=None, compare=False, repr=False)


class SourceSyntaxException(Exception):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span

    def __str__(self):
        return '{}: {}'.format(self.span, self.message)


class UnsupportedConstructException(Exception):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span

    def __str__(self):
        return '{}: unsupported construct: {}'.format(self.span, self.message)


@dataclass(frozen=True)
class SourceType:
    name: str
    items: Tuple['SourceType', ...] = ()

    def is_scalar(self) -> bool:
        return self.name in SCALAR_TYPES

    def is_list(self) -> bool:
        return self.name == 'List'

    def flatten(self) -> List['SourceType']:
        if self.name == 'Tuple':
            return [t for item in self.items for t in item.flatten()]
        return [self]

    def __str__(self):
        if self.name == 'List':
            return 'List[{}]'.format(self.items[0])
        elif self.name == 'Tuple':
            return '({})'.format(', '.join(str(t) for t in self.items))
        return self.name


NAT = SourceType('Nat')
BOOLEAN = SourceType('Boolean')
NAT_LIST = SourceType('List', (NAT,))


class Expr:
    pass


@dataclass(frozen=True)
class Name(Expr):
    name: str
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return 'true' if self.value else 'false'


@dataclass(frozen=True)
class NilLit(Expr):
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return 'Nil()'


@dataclass(frozen=True)
class ConsLit(Expr):
    head: Expr
    tail: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return 'Cons({}, {})'.format(self.head, self.tail)


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: Tuple[Expr, ...]
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '{}({})'.format(self.func, ', '.join(str(a) for a in self.args))


@dataclass(frozen=True)
class TupleLit(Expr):
    items: Tuple[Expr, ...]
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '({})'.format(', '.join(str(a) for a in self.items))


@dataclass(frozen=True)
class Proj(Expr):
    expr: Expr
    index: int
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '{}._{}'.format(self.expr, self.index)


@dataclass(frozen=True)
class Observe(Expr):
    expr: Expr
    observer: str
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '{}.{}'.format(self.expr, self.observer)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '({} {} {})'.format(self.lhs, self.op, self.rhs)


@dataclass(frozen=True)
class Not(Expr):
    expr: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '!{}'.format(self.expr)


@dataclass(frozen=True)
class IfExpr(Expr):
    cond: Expr
    then: Expr
    orelse: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return 'if ({}) {} else {}'.format(self.cond, self.then, self.orelse)


@dataclass(frozen=True)
class Case:
    constructor: str
    head: Optional[str]
    tail: Optional[str]
    guard: Optional[Expr]
    body: Expr
    span: SourceSpan = field(**_SPAN)

    def pattern(self) -> str:
        if self.constructor == 'Nil':
            return 'Nil()'
        return 'Cons({}, {})'.format(self.head, self.tail)

    def __str__(self):
        guard = ' if ({})'.format(self.guard) if self.guard is not None else ''
        return 'case {}{} => {}'.format(self.pattern(), guard, self.body)


@dataclass(frozen=True)
class Match(Expr):
    subject: Expr
    cases: Tuple[Case, ...]
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return '{} match {{ {} }}'.format(self.subject, ' '.join(str(c) for c in self.cases))


@dataclass(frozen=True)
class ValDef:
    names: Tuple[str, ...]
    expr: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass(frozen=True)
class Block(Expr):
    vals: Tuple[ValDef, ...]
    result: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        vals = ''.join('val {} = {}; '.format(
            v.names[0] if len(v.names) == 1 else '({})'.format(', '.join(v.names)), v.expr) for v in self.vals)
        return '{{ {}{} }}'.format(vals, self.result)


@dataclass(frozen=True)
class Forall(Expr):
    var: str
    type: SourceType
    body: Expr
    span: SourceSpan = field(**_SPAN)

    def __str__(self):
        return 'forall(({}: {}) => {})'.format(self.var, self.type, self.body)


@dataclass(frozen=True)
class FunDef:
    name: str
    params: Tuple[Tuple[str, SourceType], ...]
    result: SourceType
    body: Expr
    pre: Optional[Expr] = None
    res: Optional[str] = None
    post: Optional[Expr] = None
    span: SourceSpan = field(**_SPAN)

    def param_names(self) -> List[str]:
        return [name for name, _ in self.params]

    def has_contract(self) -> bool:
        return self.post is not None


def children(e) -> List[Expr]:
    """
    Direct subexpressions, including case guards and bodies.
    """
    if isinstance(e, (ConsLit,)):
        return [e.head, e.tail]
    elif isinstance(e, Call):
        return list(e.args)
    elif isinstance(e, TupleLit):
        return list(e.items)
    elif isinstance(e, (Proj, Observe, Not)):
        return [e.expr]
    elif isinstance(e, BinOp):
        return [e.lhs, e.rhs]
    elif isinstance(e, IfExpr):
        return [e.cond, e.then, e.orelse]
    elif isinstance(e, Match):
        result = [e.subject]
        for case in e.cases:
            result.extend(([case.guard] if case.guard is not None else []) + [case.body])
        return result
    elif isinstance(e, Block):
        return [v.expr for v in e.vals] + [e.result]
    elif isinstance(e, Forall):
        return [e.body]
    return []


def walk(e) -> Iterator[Expr]:
    yield e
    for child in children(e):
        yield from walk(child)


def rename_names(e, mapping):
    """
    Renames free occurrences of names. Binders are not renamed, so mapping should avoid bound names.
    """
    if isinstance(e, Name):
        return replace(e, name=mapping.get(e.name, e.name))
    elif isinstance(e, tuple):
        return tuple(rename_names(item, mapping) for item in e)
    elif is_dataclass(e) and not isinstance(e, SourceType):
        changes = {f.name: rename_names(getattr(e, f.name), mapping) for f in fields(e) if f.name != 'span'}
        return replace(e, **changes)
    return e


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>==>|=>|==|!=|<=|=<|>=|&&|\|\||[=<>!+\-*(){}\[\],:.;])
""", re.VERBOSE)

KEYWORDS = {'def', 'match', 'case', 'if', 'else', 'val', 'ensuring', 'require', 'true', 'false', 'forall'}


def tokenize_source(text: str, filename: str = '<string>') -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        span = SourceSpan(filename, line, pos - line_start + 1)
        if match is None:
            raise SourceSyntaxException('Unexpected character {!r}'.format(text[pos]), span)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind not in ('ws', 'comment'):
            tokens.append(Token(kind, match.group(), span))
        pos = match.end()
    tokens.append(Token('eof', '', SourceSpan(filename, line, pos - line_start + 1)))
    return tokens


class _SourceParser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def at(self, text: str) -> bool:
        return self.current.kind in ('punct', 'ident') and self.current.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise SourceSyntaxException('Expected {!r} but found {!r}'.format(
                text, self.current.text or 'end of input'), self.current.span)
        return self.advance()

    def identifier(self) -> Token:
        token = self.current
        if token.kind != 'ident' or token.text in KEYWORDS:
            raise SourceSyntaxException('Expected a name but found {!r}'.format(token.text or 'end of input'),
                                        token.span)
        return self.advance()

    def functions(self) -> List[FunDef]:
        result = []
        while self.current.kind != 'eof':
            result.append(self.fundef())
        return result

    def fundef(self) -> FunDef:
        span = self.expect('def').span
        name = self.identifier().text
        if self.at('['):
            raise UnsupportedConstructException('type parameters of {}'.format(name), self.current.span)
        self.expect('(')
        params = []
        if not self.at(')'):
            params.append(self.param())
            while self.at(','):
                self.advance()
                params.append(self.param())
        self.expect(')')
        self.expect(':')
        result = self.type()
        self.expect('=')
        pre = None
        if self.at('{'):
            self.advance()
            if self.at('require'):
                self.advance()
                self.expect('(')
                pre = self.expr()
                self.expect(')')
            body = self.block(('}',))
            self.expect('}')
        else:
            body = self.expr()
        res, post = None, None
        if self.at('ensuring'):
            self.advance()
            self.expect('{')
            res = self.identifier().text
            self.expect('=>')
            post = self.expr()
            self.expect('}')
        return FunDef(name, tuple(params), result, body, pre, res, post, span)

    def param(self) -> Tuple[str, SourceType]:
        name = self.identifier().text
        self.expect(':')
        return name, self.type()

    def type(self) -> SourceType:
        token = self.current
        if self.at('('):
            self.advance()
            items = [self.type()]
            while self.at(','):
                self.advance()
                items.append(self.type())
            self.expect(')')
            result = SourceType('Tuple', tuple(items)) if len(items) > 1 else items[0]
        elif token.kind == 'ident' and token.text in SCALAR_TYPES:
            self.advance()
            result = SourceType(token.text)
        elif token.kind == 'ident' and token.text == 'List':
            self.advance()
            self.expect('[')
            element = self.type()
            self.expect(']')
            if element.name not in ('Nat', 'Int'):
                raise UnsupportedConstructException('lists of {}'.format(element), token.span)
            result = SourceType('List', (element,))
        elif token.kind == 'ident':
            raise UnsupportedConstructException('type {}'.format(token.text), token.span)
        else:
            raise SourceSyntaxException('Expected a type but found {!r}'.format(token.text or 'end of input'),
                                        token.span)
        if self.at('=>'):
            raise UnsupportedConstructException('function types', self.current.span)
        return result

    def block(self, terminators: Tuple[str, ...]) -> Expr:
        span = self.current.span
        vals = []
        while True:
            while self.at(';'):
                self.advance()
            if not self.at('val'):
                break
            vals.append(self.valdef())
        result = self.expr()
        while self.at(';'):
            self.advance()
        if not any(self.at(t) for t in terminators):
            raise SourceSyntaxException('Expected {} but found {!r}'.format(
                ' or '.join(repr(t) for t in terminators), self.current.text or 'end of input'), self.current.span)
        if not vals:
            return result
        return Block(tuple(vals), result, span)

    def valdef(self) -> ValDef:
        span = self.expect('val').span
        if self.at('('):
            self.advance()
            names = [self.identifier().text]
            while self.at(','):
                self.advance()
                names.append(self.identifier().text)
            self.expect(')')
        else:
            names = [self.identifier().text]
        if self.at(':'):
            self.advance()
            self.type()
        self.expect('=')
        return ValDef(tuple(names), self.expr(), span)

    def expr(self) -> Expr:
        lhs = self.disjunction()
        if self.at('==>'):
            span = self.advance().span
            return BinOp('==>', lhs, self.expr(), span)
        return lhs

    def disjunction(self) -> Expr:
        lhs = self.conjunction()
        while self.at('||'):
            span = self.advance().span
            lhs = BinOp('||', lhs, self.conjunction(), span)
        return lhs

    def conjunction(self) -> Expr:
        lhs = self.comparison()
        while self.at('&&'):
            span = self.advance().span
            lhs = BinOp('&&', lhs, self.comparison(), span)
        return lhs

    def comparison(self) -> Expr:
        lhs = self.sum()
        if self.current.kind == 'punct' and self.current.text in COMPARISONS:
            token = self.advance()
            op = '<=' if token.text == '=<' else token.text
            return BinOp(op, lhs, self.sum(), token.span)
        return lhs

    def sum(self) -> Expr:
        lhs = self.unary()
        while self.current.kind == 'punct' and self.current.text in ARITHMETIC:
            token = self.advance()
            lhs = BinOp(token.text, lhs, self.unary(), token.span)
        return lhs

    def unary(self) -> Expr:
        if self.at('!'):
            span = self.advance().span
            return Not(self.unary(), span)
        if self.at('-'):
            span = self.advance().span
            return BinOp('-', IntLit(0, span), self.unary(), span)
        if self.at('*'):
            raise UnsupportedConstructException('multiplication', self.current.span)
        return self.postfix()

    def postfix(self) -> Expr:
        e = self.primary()
        while True:
            if self.at('.'):
                self.advance()
                token = self.current
                if token.kind == 'ident' and re.match(r'^_[0-9]+$', token.text):
                    self.advance()
                    e = Proj(e, int(token.text[1:]), token.span)
                elif token.kind == 'ident' and token.text in OBSERVERS:
                    self.advance()
                    e = Observe(e, token.text, token.span)
                else:
                    raise UnsupportedConstructException('member {!r}'.format(token.text), token.span)
            elif self.at('match'):
                span = self.advance().span
                self.expect('{')
                cases = []
                while self.at('case'):
                    cases.append(self.case())
                self.expect('}')
                if not cases:
                    raise SourceSyntaxException('A match needs at least one case', span)
                e = Match(e, tuple(cases), span)
            elif self.at('*'):
                raise UnsupportedConstructException('multiplication', self.current.span)
            else:
                return e

    def case(self) -> Case:
        span = self.expect('case').span
        token = self.current
        if self.at('Nil'):
            self.advance()
            self.expect('(')
            self.expect(')')
            constructor, head, tail = 'Nil', None, None
        elif self.at('Cons'):
            self.advance()
            self.expect('(')
            head = self.identifier().text
            self.expect(',')
            tail = self.identifier().text
            self.expect(')')
            constructor = 'Cons'
        else:
            raise UnsupportedConstructException('pattern {!r}'.format(token.text), token.span)
        guard = None
        if self.at('if'):
            self.advance()
            self.expect('(')
            guard = self.expr()
            self.expect(')')
        self.expect('=>')
        body = self.block(('case', '}'))
        return Case(constructor, head, tail, guard, body, span)

    def primary(self) -> Expr:
        token = self.current
        if token.kind == 'int':
            self.advance()
            return IntLit(int(token.text), token.span)
        elif self.at('true') or self.at('false'):
            self.advance()
            return BoolLit(token.text == 'true', token.span)
        elif self.at('if'):
            self.advance()
            self.expect('(')
            cond = self.expr()
            self.expect(')')
            then = self.expr()
            self.expect('else')
            return IfExpr(cond, then, self.expr(), token.span)
        elif self.at('{'):
            self.advance()
            body = self.block(('}',))
            self.expect('}')
            return body
        elif self.at('('):
            self.advance()
            items = [self.expr()]
            while self.at(','):
                self.advance()
                items.append(self.expr())
            self.expect(')')
            return items[0] if len(items) == 1 else TupleLit(tuple(items), token.span)
        elif self.at('Nil'):
            self.advance()
            if self.at('['):
                self.advance()
                self.type()
                self.expect(']')
            self.expect('(')
            self.expect(')')
            return NilLit(token.span)
        elif self.at('Cons'):
            self.advance()
            self.expect('(')
            head = self.expr()
            self.expect(',')
            tail = self.expr()
            self.expect(')')
            return ConsLit(head, tail, token.span)
        elif self.at('forall'):
            self.advance()
            self.expect('(')
            self.expect('(')
            var = self.identifier().text
            self.expect(':')
            var_type = self.type()
            if not var_type.is_scalar():
                raise UnsupportedConstructException('quantification over {}'.format(var_type), token.span)
            self.expect(')')
            self.expect('=>')
            body = self.expr()
            self.expect(')')
            return Forall(var, var_type, body, token.span)
        elif token.kind == 'ident' and token.text not in KEYWORDS:
            self.advance()
            if self.at('('):
                self.advance()
                args = []
                if not self.at(')'):
                    args.append(self.expr())
                    while self.at(','):
                        self.advance()
                        args.append(self.expr())
                self.expect(')')
                return Call(token.text, tuple(args), token.span)
            if self.at('=>'):
                raise UnsupportedConstructException('anonymous functions', self.current.span)
            return Name(token.text, token.span)
        raise SourceSyntaxException('Expected an expression but found {!r}'.format(token.text or 'end of input'),
                                    token.span)


def _check_scopes(f: FunDef, functions: Set[str]):
    """
    Every name must be a parameter, a val, a pattern variable, a quantified variable or the result; functions can
    only be called.
    """
    def check(e, bound: Set[str]):
        if isinstance(e, Name):
            if e.name in bound:
                return
            if e.name in functions:
                raise UnsupportedConstructException('{} is a function and cannot be used as a value'.format(e.name),
                                                    e.span)
            raise SourceSyntaxException('Unknown name {}'.format(e.name), e.span)
        elif isinstance(e, Call) and e.func in bound:
            raise UnsupportedConstructException('{} is not a function'.format(e.func), e.span)
        if isinstance(e, Match):
            check(e.subject, bound)
            for case in e.cases:
                inner = bound | {n for n in (case.head, case.tail) if n is not None}
                if case.guard is not None:
                    check(case.guard, inner)
                check(case.body, inner)
        elif isinstance(e, Block):
            inner = set(bound)
            for v in e.vals:
                check(v.expr, inner)
                inner |= set(v.names)
            check(e.result, inner)
        elif isinstance(e, Forall):
            check(e.body, bound | {e.var})
        else:
            for child in children(e):
                check(child, bound)

    params = set(f.param_names())
    check(f.body, params)
    if f.pre is not None:
        check(f.pre, params)
    if f.post is not None:
        check(f.post, params | {f.res})


def parse_source(text: str, filename: str = '<string>') -> List[FunDef]:
    """
    Parses a source file into function definitions.
    :param text:
    :param filename: used in error spans
    :return: the definitions in file order
    """
    functions = _SourceParser(tokenize_source(text, filename)).functions()
    names = set()
    for f in functions:
        if f.name in names:
            raise SourceSyntaxException('{} is defined twice'.format(f.name), f.span)
        names.add(f.name)
    for f in functions:
        _check_scopes(f, names)
    logger.debug('Parsed {} definitions from {}'.format(len(functions), filename))
    return functions


def read_source(path: str) -> List[FunDef]:
    with open(path, encoding='utf-8') as f:
        return parse_source(f.read(), path)
