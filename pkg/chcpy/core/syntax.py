"""
Reading and writing clause files.

The concrete syntax is the Prolog-like notation of constraint logic programs:

    all_grt(X,[Y|Ys],B) :- X>Y, Y>=0, all_grt(X,Ys,B).
    false :- B=false, partition(X,L,L1,L2), all_leq(X,L2,B).

Parsing runs in two phases. A tokenizer and recursive-descent parser build untyped clauses that remember source
positions, then sorts are inferred by unification over variables and predicate argument positions.
"""
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple, Union

from .model import (Atom, BOOL, BoolBind, BoolConst, BoolEq, BoolSort, Clause, ClauseSet, Cons, DERIVED, GOAL, INT,
                    IntConst, IntSort, LinExpr, LinRel, ListSort, Nil, PROGRAM, REL_EQ, REL_GE, REL_GT, REL_LE,
                    REL_LT, REL_NE, Signatures, Sort, Term, Var, merge_signatures)
from .system_helpers import get_logger

logger = get_logger(__name__)

TAG_PRAGMA = '%@'


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return '{}:{}:{}'.format(self.file, self.line, self.column)


class ChcSyntaxException(Exception):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span

    def __str__(self):
        return '{}: {}'.format(self.span, self.message)


class SortConflictException(Exception):
    def __init__(self, message: str, first_span: Optional[SourceSpan], second_span: SourceSpan):
        self.message = message
        self.first_span = first_span
        self.second_span = second_span

    def __str__(self):
        return '{}: {} (first use at {})'.format(self.second_span, self.message, self.first_span)


RELATION_TOKENS = {'=': REL_EQ, '=\\=': REL_NE, '=/=': REL_NE, '!=': REL_NE, '=<': REL_LE, '<=': REL_LE,
                   '<': REL_LT, '>=': REL_GE, '>': REL_GT}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<pragma>%@[^\n]*)
  | (?P<comment>%[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>=\\=|=/=|=<|>=|<=|!=|:-|[=<>()\[\]|,.+\-*])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str, filename: str = '<string>') -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        span = SourceSpan(filename, line, pos - line_start + 1)
        if match is None:
            raise ChcSyntaxException('Unexpected character {!r}'.format(text[pos]), span)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind == 'pragma':
            tokens.append(Token('pragma', match.group()[len(TAG_PRAGMA):].strip(), span))
        elif kind not in ('ws', 'comment'):
            tokens.append(Token(kind, match.group(), span))
        pos = match.end()
    tokens.append(Token('eof', '', SourceSpan(filename, line, pos - line_start + 1)))
    return tokens


# untyped syntax trees


class RawVar(NamedTuple):
    name: str
    span: SourceSpan


class RawConst(NamedTuple):
    value: Union[int, bool]
    span: SourceSpan


class RawNil(NamedTuple):
    span: SourceSpan


class RawCons(NamedTuple):
    head: object
    tail: object
    span: SourceSpan


class RawLin(NamedTuple):
    coeffs: Dict[str, int]
    constant: int
    occurrences: List[RawVar]
    span: SourceSpan

    def single_var(self) -> Optional[str]:
        if self.constant == 0 and len(self.coeffs) == 1:
            name, coeff = next(iter(self.coeffs.items()))
            if coeff == 1:
                return name
        return None


class RawAtom(NamedTuple):
    pred: str
    args: List[object]
    span: SourceSpan


class RawRelation(NamedTuple):
    rel: str
    lhs: object
    rhs: object
    span: SourceSpan


class RawClause(NamedTuple):
    head: Optional[RawAtom]
    items: List[object]
    span: SourceSpan
    tag: Optional[str]


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0
        self.anonymous = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind not in ('punct', 'ident'):
            raise ChcSyntaxException('Expected {!r} but found {!r}'.format(text, self.current.text or 'end of input'),
                                     self.current.span)
        return self.advance()

    def at(self, text: str) -> bool:
        return self.current.kind == 'punct' and self.current.text == text

    def clauses(self) -> List[RawClause]:
        result = []
        tag = None
        while self.current.kind != 'eof':
            if self.current.kind == 'pragma':
                tag = self.advance().text or None
                continue
            result.append(self.clause(tag, require_dot=True))
            tag = None
        return result

    def clause(self, tag: Optional[str] = None, require_dot: bool = True) -> RawClause:
        self.anonymous = 0
        span = self.current.span
        if self.current.kind == 'ident' and self.current.text == 'false' and self.peek().text != '(':
            self.advance()
            head = None
        else:
            head = self.atom()
        items = []
        if self.at(':-'):
            self.advance()
            if not self.at('.'):
                items.append(self.body_item())
                while self.at(','):
                    self.advance()
                    items.append(self.body_item())
        if require_dot or not self.current.kind == 'eof':
            self.expect('.')
        return RawClause(head, items, span, tag)

    def body_item(self):
        token = self.current
        if token.kind == 'ident' and token.text not in ('true', 'false'):
            following = self.peek()
            if following.text == '(' or following.text in (',', '.') or following.kind == 'eof':
                return self.atom()
        return self.relation()

    def atom(self) -> RawAtom:
        token = self.current
        if token.kind != 'ident':
            raise ChcSyntaxException('Expected a predicate but found {!r}'.format(token.text or 'end of input'),
                                     token.span)
        self.advance()
        args = []
        if self.at('('):
            self.advance()
            args.append(self.term())
            while self.at(','):
                self.advance()
                args.append(self.term())
            self.expect(')')
        return RawAtom(token.text, args, token.span)

    def variable(self) -> RawVar:
        token = self.advance()
        if token.text == '_':
            self.anonymous += 1
            return RawVar('_{}'.format(self.anonymous), token.span)
        return RawVar(token.text, token.span)

    def term(self):
        token = self.current
        if token.kind == 'var':
            return self.variable()
        elif token.kind == 'int':
            self.advance()
            return RawConst(int(token.text), token.span)
        elif token.kind == 'punct' and token.text == '-' and self.peek().kind == 'int':
            self.advance()
            return RawConst(-int(self.advance().text), token.span)
        elif token.kind == 'ident' and token.text in ('true', 'false'):
            self.advance()
            return RawConst(token.text == 'true', token.span)
        elif self.at('['):
            return self.list_term()
        raise ChcSyntaxException('Expected a term but found {!r}'.format(token.text or 'end of input'), token.span)

    def list_term(self):
        open_span = self.expect('[').span
        if self.at(']'):
            self.advance()
            return RawNil(open_span)
        items = [self.term()]
        while self.at(','):
            self.advance()
            items.append(self.term())
        tail = RawNil(open_span)
        if self.at('|'):
            self.advance()
            tail = self.term()
        self.expect(']')
        for item in reversed(items):
            tail = RawCons(item, tail, item.span)
        return tail

    def relation(self) -> RawRelation:
        span = self.current.span
        lhs = self.side()
        token = self.current
        if token.kind != 'punct' or token.text not in RELATION_TOKENS:
            raise ChcSyntaxException('Expected a relation but found {!r}'.format(token.text or 'end of input'),
                                     token.span)
        self.advance()
        rhs = self.side()
        return RawRelation(RELATION_TOKENS[token.text], lhs, rhs, span)

    def side(self):
        token = self.current
        if token.kind == 'ident' and token.text in ('true', 'false'):
            self.advance()
            return RawConst(token.text == 'true', token.span)
        coeffs, constant, occurrences = {}, 0, []
        sign = 1
        if self.at('-'):
            self.advance()
            sign = -1
        while True:
            name, value, occurrence = self.product()
            if name is None:
                constant += sign * value
            else:
                coeffs[name] = coeffs.get(name, 0) + sign * value
                occurrences.append(occurrence)
            if self.at('+'):
                sign = 1
            elif self.at('-'):
                sign = -1
            else:
                break
            self.advance()
        return RawLin(coeffs, constant, occurrences, token.span)

    def product(self):
        """
        INT, VAR, INT*VAR or VAR*INT.
        """
        token = self.current
        if token.kind == 'int':
            self.advance()
            value = int(token.text)
            if self.at('*'):
                self.advance()
                if self.current.kind != 'var':
                    raise ChcSyntaxException('Expected a variable after *', self.current.span)
                occurrence = self.variable()
                return occurrence.name, value, occurrence
            return None, value, None
        elif token.kind == 'var':
            occurrence = self.variable()
            value = 1
            if self.at('*'):
                self.advance()
                if self.current.kind != 'int':
                    raise ChcSyntaxException('Only linear arithmetic is supported', self.current.span)
                value = int(self.advance().text)
            return occurrence.name, value, occurrence
        raise ChcSyntaxException('Expected an arithmetic term but found {!r}'.format(token.text or 'end of input'),
                                 token.span)


class _SortInference:
    """
    Unification over sort terms. A node is bound to ('int',), ('bool',) or ('list', element_node); unbound roots
    default to Int.
    """
    def __init__(self):
        self.parent = {}
        self.binding = {}
        self.origin = {}
        self.counter = 0

    def fresh(self, kind: Tuple = None, span: SourceSpan = None):
        self.counter += 1
        node = ('_', self.counter)
        if kind is not None:
            self.binding[node] = kind
            self.origin[node] = span
        return node

    def find(self, node):
        path = []
        while self.parent.get(node, node) != node:
            path.append(node)
            node = self.parent[node]
        for n in path:
            self.parent[n] = node
        return node

    def unify(self, a, b, span: SourceSpan, what: str):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        ta, tb = self.binding.get(ra), self.binding.get(rb)
        if ta is None:
            self.parent[ra] = rb
            return
        if tb is None:
            self.parent[rb] = ra
            return
        if ta[0] != tb[0]:
            raise SortConflictException('{} used as {} and as {}'.format(what, _kind_name(ta), _kind_name(tb)),
                                        self.origin.get(ra), span)
        self.parent[rb] = ra
        if ta[0] == 'list':
            self.unify(ta[1], tb[1], span, what)

    def bind(self, node, kind: Tuple, span: SourceSpan, what: str):
        self.unify(node, self.fresh(kind, span), span, what)

    def from_sort(self, sort: Sort, span: SourceSpan = None):
        if isinstance(sort, IntSort):
            return self.fresh(('int',), span)
        elif isinstance(sort, BoolSort):
            return self.fresh(('bool',), span)
        return self.fresh(('list', self.from_sort(sort.element, span)), span)

    def resolve(self, node) -> Sort:
        kind = self.binding.get(self.find(node))
        if kind is None or kind[0] == 'int':
            return INT
        elif kind[0] == 'bool':
            return BOOL
        return ListSort(self.resolve(kind[1]))


def _kind_name(kind: Tuple) -> str:
    return {'int': 'Int', 'bool': 'Bool', 'list': 'List'}[kind[0]]


class _Typer:
    """
    Turns raw clauses into typed clauses sharing one set of predicate signatures.
    """
    def __init__(self, signatures: Signatures = None):
        self.sorts = _SortInference()
        self.nil_nodes = {}
        self.arity = {}
        self.given = dict(signatures or {})
        for pred, pred_sorts in self.given.items():
            self.arity[pred] = len(pred_sorts)
            for i, sort in enumerate(pred_sorts):
                self.sorts.unify(('p', pred, i), self.sorts.from_sort(sort), None, pred)

    def collect(self, index: int, clause: RawClause):
        for atom in ([clause.head] if clause.head is not None else []) + \
                [item for item in clause.items if isinstance(item, RawAtom)]:
            self.collect_atom(index, atom)
        for item in clause.items:
            if isinstance(item, RawRelation):
                self.collect_relation(index, item)

    def collect_atom(self, index: int, atom: RawAtom):
        expected = self.arity.setdefault(atom.pred, len(atom.args))
        if expected != len(atom.args):
            raise ChcSyntaxException('{} used with {} and {} arguments'.format(atom.pred, expected, len(atom.args)),
                                     atom.span)
        for i, arg in enumerate(atom.args):
            node = self.term_node(index, arg)
            self.sorts.unify(node, ('p', atom.pred, i), arg.span, 'argument {} of {}'.format(i + 1, atom.pred))

    def term_node(self, index: int, term):
        if isinstance(term, RawVar):
            return ('v', index, term.name)
        elif isinstance(term, RawConst):
            kind = ('bool',) if isinstance(term.value, bool) else ('int',)
            return self.sorts.fresh(kind, term.span)
        elif isinstance(term, RawNil):
            if id(term) not in self.nil_nodes:
                self.nil_nodes[id(term)] = self.sorts.fresh(('list', self.sorts.fresh()), term.span)
            return self.nil_nodes[id(term)]
        head = self.term_node(index, term.head)
        tail = self.term_node(index, term.tail)
        self.sorts.bind(tail, ('list', head), term.span, 'list tail')
        return tail

    def collect_relation(self, index: int, relation: RawRelation):
        lhs, rhs = relation.lhs, relation.rhs
        if isinstance(lhs, RawConst) and isinstance(rhs, RawConst):
            raise ChcSyntaxException('Relation between two boolean literals', relation.span)
        if isinstance(lhs, RawConst) or isinstance(rhs, RawConst):
            side = rhs if isinstance(lhs, RawConst) else lhs
            name = side.single_var()
            if name is None or relation.rel not in (REL_EQ, REL_NE):
                raise ChcSyntaxException('A boolean literal can only be compared with a variable', relation.span)
            self.sorts.bind(('v', index, name), ('bool',), side.span, 'variable {}'.format(name))
            return
        names = (lhs.single_var(), rhs.single_var())
        if relation.rel in (REL_EQ, REL_NE) and None not in names:
            # X=Y is integer or boolean depending on the rest of the clause
            self.sorts.unify(('v', index, names[0]), ('v', index, names[1]), relation.span,
                             'variable {}'.format(names[1]))
            return
        for occurrence in lhs.occurrences + rhs.occurrences:
            self.sorts.bind(('v', index, occurrence.name), ('int',), occurrence.span,
                            'variable {}'.format(occurrence.name))

    def build(self, index: int, clause: RawClause, origin: Optional[str]) -> Clause:
        head = self.build_atom(index, clause.head) if clause.head is not None else None
        constraint, body = [], []
        for item in clause.items:
            if isinstance(item, RawAtom):
                body.append(self.build_atom(index, item))
            else:
                constraint.append(self.build_relation(index, item))
        if origin is None:
            origin = GOAL if head is None else PROGRAM
        return Clause(head, tuple(constraint), tuple(body), tag=clause.tag, origin=origin)

    def build_atom(self, index: int, atom: RawAtom) -> Atom:
        return Atom(atom.pred, tuple(self.build_term(index, arg) for arg in atom.args))

    def build_term(self, index: int, term) -> Term:
        if isinstance(term, RawVar):
            return Var(term.name, self.sorts.resolve(('v', index, term.name)))
        elif isinstance(term, RawConst):
            return BoolConst(term.value) if isinstance(term.value, bool) else IntConst(term.value)
        elif isinstance(term, RawNil):
            return Nil(self.sorts.resolve(self.term_node(index, term)).element)
        return Cons(self.build_term(index, term.head), self.build_term(index, term.tail))

    def build_relation(self, index: int, relation: RawRelation):
        lhs, rhs = relation.lhs, relation.rhs
        if isinstance(lhs, RawConst) or isinstance(rhs, RawConst):
            literal, side = (lhs, rhs) if isinstance(lhs, RawConst) else (rhs, lhs)
            value = literal.value if relation.rel == REL_EQ else not literal.value
            return BoolBind(side.single_var(), value)
        names = (lhs.single_var(), rhs.single_var())
        if relation.rel in (REL_EQ, REL_NE) and None not in names and \
                self.sorts.resolve(('v', index, names[0])) == BOOL:
            return BoolEq(names[0], names[1], relation.rel == REL_EQ)
        return LinRel(relation.rel, LinExpr.from_dict(lhs.coeffs, lhs.constant),
                      LinExpr.from_dict(rhs.coeffs, rhs.constant))

    def signatures(self) -> Dict[str, Tuple[Sort, ...]]:
        result = {}
        for pred, arity in self.arity.items():
            result[pred] = tuple(self.sorts.resolve(('p', pred, i)) for i in range(arity))
        return result


def parse_chc(text: str, filename: str = '<string>', signatures: Signatures = None,
              origin: str = None) -> ClauseSet:
    """
    Parses a clause file.
    :param text: the file contents
    :param filename: used in error spans
    :param signatures: predicate sorts known in advance, e.g. those of the program a goal file refers to
    :param origin: origin given to every clause; by default goals are GOAL and everything else PROGRAM
    :return: the clauses with their inferred signatures
    """
    raw = _Parser(tokenize(text, filename)).clauses()
    typer = _Typer(signatures)
    for index, clause in enumerate(raw):
        typer.collect(index, clause)
    clauses = tuple(typer.build(index, clause, origin) for index, clause in enumerate(raw))
    logger.debug('Parsed {} clauses from {}'.format(len(clauses), filename))
    return ClauseSet(merge_signatures(typer.signatures(), signatures or {}), clauses)


def read_chc(path: str, signatures: Signatures = None, origin: str = None) -> ClauseSet:
    with open(path, encoding='utf-8') as f:
        return parse_chc(f.read(), path, signatures, origin)


def parse_clause(text: str, signatures: Signatures = None, origin: str = DERIVED) -> Clause:
    """
    Parses one clause; the final full stop is optional.
    """
    parser = _Parser(tokenize(text))
    raw = parser.clause(require_dot=False)
    if parser.current.kind != 'eof':
        raise ChcSyntaxException('Unexpected {!r} after clause'.format(parser.current.text), parser.current.span)
    typer = _Typer(signatures)
    typer.collect(0, raw)
    return typer.build(0, raw, origin)


def parse_atom(text: str, signatures: Signatures = None) -> Atom:
    parser = _Parser(tokenize(text))
    raw = parser.atom()
    if parser.current.kind != 'eof':
        raise ChcSyntaxException('Unexpected {!r} after atom'.format(parser.current.text), parser.current.span)
    typer = _Typer(signatures)
    typer.collect_atom(0, raw)
    return typer.build_atom(0, raw)


def print_clause(c: Clause) -> str:
    if c.tag is None:
        return str(c)
    return '{} {}\n{}'.format(TAG_PRAGMA, c.tag, c)


def print_chc(cs: Union[ClauseSet, List[Clause]]) -> str:
    """
    Prints clauses one per line, each tagged clause preceded by its tag pragma. The output parses back to the same
    clauses.
    """
    clauses = list(cs)
    if not clauses:
        return ''
    return '\n'.join(print_clause(c) for c in clauses) + '\n'


def write_chc(path: str, cs: Union[ClauseSet, List[Clause]]):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(print_chc(cs))
