"""Expressions of the downward relation algebra.

Expressions are built from relation names with union ``|``, intersection
``&``, difference ``-`` and composition (``.`` or juxtaposition).  Trees are
immutable and hashable, so structurally equal subtrees can be shared and
memoized by evaluators and encoders.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union as _U

__all__ = [
    "Atom", "Union", "Intersection", "Difference", "Composition",
    "Expression", "Vocabulary", "ExprSyntaxError",
    "parse_expression", "render_expression", "difference_degree",
    "relation_names", "uses_intersection", "subexpressions",
    "union_of", "compose", "power", "substitute", "is_name",
]

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def is_name(text) -> bool:
    return isinstance(text, str) and NAME_RE.fullmatch(text) is not None


class _Node:
    __slots__ = ()

    def __hash__(self):
        return self._hash

    def __str__(self):
        return render_expression(self)


@dataclass(frozen=True, eq=True, repr=True)
class Atom(_Node):
    name: str

    def __post_init__(self):
        if not is_name(self.name):
            raise ValueError(f"invalid relation name {self.name!r}")
        object.__setattr__(self, "_hash", hash(("Atom", self.name)))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True, repr=True)
class _Binary(_Node):
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        # children are built first, so this stays O(1) even for deep trees
        object.__setattr__(
            self, "_hash", hash((type(self).__name__, hash(self.left), hash(self.right))))


@dataclass(frozen=True, eq=True, repr=True)
class Union(_Binary):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True, repr=True)
class Intersection(_Binary):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True, repr=True)
class Difference(_Binary):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True, repr=True)
class Composition(_Binary):
    __hash__ = _Node.__hash__


Expression = _U[Atom, Union, Intersection, Difference, Composition]


class Vocabulary:
    """An ordered list of distinct relation names."""

    __slots__ = ("names",)

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for n in names:
            if not is_name(n):
                raise ValueError(f"invalid relation name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in vocabulary {names}")
        self.names = names

    def __iter__(self):
        return iter(self.names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.names

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Vocabulary({list(self.names)!r})"

    def index(self, name: str) -> int:
        return self.names.index(name)


# -- construction helpers ---------------------------------------------------

def union_of(parts: Iterable[Expression]) -> Expression:
    """Left-nested union of one or more expressions."""
    parts = list(parts)
    if not parts:
        raise ValueError("union of no expressions (DA has no empty relation)")
    return reduce(Union, parts)


def compose(parts: Iterable[Expression]) -> Expression:
    """Left-nested composition of one or more expressions."""
    parts = list(parts)
    if not parts:
        raise ValueError("composition of no expressions (DA has no identity)")
    return reduce(Composition, parts)


def power(e: Expression, n: int) -> Expression:
    """``e^n`` as a right-nested composition chain."""
    if n < 1:
        raise ValueError("power must be >= 1; DA has no identity relation")
    out = e
    for _ in range(n - 1):
        out = Composition(e, out)
    return out


# -- concrete syntax --------------------------------------------------------

class ExprSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col = line, col
        super().__init__(f"{message} at line {line}, column {col}")


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<nat>[0-9]+)"
    r"|(?P<op>[|\-&.^()])"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        found = tok[1] if tok[0] != "eof" else "end of input"
        raise ExprSyntaxError(f"{message}, found {found!r}", tok[2], self.text)

    def at_op(self, op):
        return self.tok[0] == "op" and self.tok[1] == op

    def parse(self):
        e = self.union()
        if self.tok[0] != "eof":
            self.error("expected an operator or end of input")
        return e

    def _left_assoc(self, op, sub, node):
        e = sub()
        while self.at_op(op):
            self.i += 1
            e = node(e, sub())
        return e

    def union(self):
        return self._left_assoc("|", self.diff, Union)

    def diff(self):
        return self._left_assoc("-", self.isect, Difference)

    def isect(self):
        return self._left_assoc("&", self.comp, Intersection)

    def starts_power(self):
        return self.tok[0] == "name" or self.at_op("(")

    def comp(self):
        e = self.power()
        while True:
            if self.at_op("."):
                self.i += 1
            elif not self.starts_power():
                return e
            e = Composition(e, self.power())

    def power(self):
        e = self.atom()
        if self.at_op("^"):
            self.i += 1
            tok = self.tok
            if tok[0] != "nat":
                self.error("expected a natural number after '^'")
            n = int(tok[1])
            if n == 0:
                self.error("'^0' is not allowed (there is no identity relation)", tok)
            self.i += 1
            e = power(e, n)
        return e

    def atom(self):
        tok = self.tok
        if tok[0] == "name":
            self.i += 1
            return Atom(tok[1])
        if self.at_op("("):
            self.i += 1
            e = self.union()
            if not self.at_op(")"):
                self.error("expected ')'")
            self.i += 1
            return e
        self.error("expected a relation name or '('")


def parse_expression(text: str) -> Expression:
    """Parse concrete syntax into an expression tree.

    Precedence from tightest to loosest: ``^``, composition, ``&``, ``-``,
    ``|``; all binary operators associate to the left.  ``e^n`` expands to a
    right-nested composition chain.  Raises :class:`ExprSyntaxError`.
    """
    return _Parser(text).parse()


_PREC = {Union: 1, Difference: 2, Intersection: 3, Composition: 4, Atom: 5}
_SYMBOL = {Union: "|", Difference: "-", Intersection: "&", Composition: "."}


def render_expression(e: Expression) -> str:
    if isinstance(e, Atom):
        return e.name
    p = _PREC[type(e)]
    left = render_expression(e.left)
    right = render_expression(e.right)
    if _PREC[type(e.left)] < p:
        left = f"({left})"
    if _PREC[type(e.right)] <= p:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(e)]} {right}"


# -- analyses ---------------------------------------------------------------

def subexpressions(e: Expression) -> Iterator[Expression]:
    """Distinct subexpressions in post-order (children before parents)."""
    seen = set()
    stack = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if node in seen:
            continue
        if expanded or isinstance(node, Atom):
            seen.add(node)
            yield node
            continue
        stack.append((node, True))
        stack.append((node.right, False))
        stack.append((node.left, False))


def difference_degree(e: Expression) -> int:
    degree = {}
    for s in subexpressions(e):
        if isinstance(s, Atom):
            degree[s] = 0
        else:
            d = max(degree[s.left], degree[s.right])
            degree[s] = d + 1 if isinstance(s, Difference) else d
    return degree[e]


def relation_names(e: Expression) -> frozenset:
    return frozenset(s.name for s in subexpressions(e) if isinstance(s, Atom))


def uses_intersection(e: Expression) -> bool:
    return any(isinstance(s, Intersection) for s in subexpressions(e))


def substitute(e: Expression, mapping) -> Expression:
    """Replace every atom whose name is in ``mapping`` by the mapped expression."""
    done = {}
    for s in subexpressions(e):
        if isinstance(s, Atom):
            done[s] = mapping.get(s.name, s)
        else:
            done[s] = type(s)(done[s.left], done[s.right])
    return done[e]
