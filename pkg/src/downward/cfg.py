"""Context-free grammars without empty productions.

Universality here means "every nonempty word over the terminals is
generated"; the empty word is excluded everywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

__all__ = [
    "Grammar", "CnfGrammar", "GrammarSyntaxError", "parse_grammar",
    "render_grammar", "to_cnf", "cyk_membership", "interval_table",
    "find_nonmember_word", "parse_word",
]


class GrammarSyntaxError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Grammar:
    terminals: frozenset
    nonterminals: frozenset
    start: str
    productions: tuple  # of (head, body) with body a nonempty tuple

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        prods = tuple(dict.fromkeys((h, tuple(b)) for h, b in self.productions))
        object.__setattr__(self, "productions", prods)
        if self.terminals & self.nonterminals:
            raise ValueError(f"symbols both terminal and nonterminal: "
                             f"{sorted(self.terminals & self.nonterminals)}")
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start!r} is not a nonterminal")
        symbols = self.terminals | self.nonterminals
        for head, body in prods:
            if head not in self.nonterminals:
                raise ValueError(f"production head {head!r} is not a nonterminal")
            if not body:
                raise ValueError(f"empty production for {head!r}")
            unknown = [s for s in body if s not in symbols]
            if unknown:
                raise ValueError(f"unknown symbols {unknown} in production for {head!r}")

    def sorted_terminals(self):
        return sorted(self.terminals)

    def sorted_nonterminals(self):
        """Start symbol first, then the rest alphabetically."""
        return [self.start] + sorted(self.nonterminals - {self.start})

    def bodies(self, head):
        return [b for h, b in self.productions if h == head]


class CnfGrammar(Grammar):
    """A grammar whose productions are all ``A -> B C`` or ``A -> t``."""

    def __post_init__(self):
        super().__post_init__()
        for head, body in self.productions:
            ok = (len(body) == 1 and body[0] in self.terminals) or (
                len(body) == 2 and all(s in self.nonterminals for s in body))
            if not ok:
                raise ValueError(f"production {head} -> {' '.join(body)} is not in CNF")


# -- text format ------------------------------------------------------------

def parse_grammar(text: str) -> Grammar:
    """Parse ``Head -> body | body`` lines.

    Heads are the nonterminals and the first head is the start symbol; every
    other symbol is a terminal.  An ``@terminals t1 t2`` line adds terminals
    that no production mentions.
    """
    rules = []
    extra_terminals = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@terminals"):
            extra_terminals.extend(line.split()[1:])
            continue
        if "->" not in line:
            raise GrammarSyntaxError(f"expected 'Head -> body', got {raw.strip()!r}", lineno)
        head, _, rhs = line.partition("->")
        head = head.strip()
        if not head or len(head.split()) != 1:
            raise GrammarSyntaxError(f"bad production head {head!r}", lineno)
        for alt in rhs.split("|"):
            body = tuple(alt.split())
            if not body:
                raise GrammarSyntaxError(
                    f"empty production for {head!r} (empty productions are not allowed)", lineno)
            rules.append((head, body, lineno))
    if not rules:
        raise GrammarSyntaxError("grammar has no productions")
    nonterminals = set(h for h, _, _ in rules)
    terminals = {s for _, b, _ in rules for s in b if s not in nonterminals}
    clash = nonterminals.intersection(extra_terminals)
    if clash:
        raise GrammarSyntaxError(f"declared terminals are production heads: {sorted(clash)}")
    terminals.update(extra_terminals)
    return Grammar(terminals, nonterminals, rules[0][0], [(h, b) for h, b, _ in rules])


def render_grammar(g: Grammar) -> str:
    lines = []
    mentioned = {s for _, b in g.productions for s in b}
    unused = sorted(g.terminals - mentioned)
    if unused:
        lines.append("@terminals " + " ".join(unused))
    for head in g.sorted_nonterminals():
        bodies = g.bodies(head)
        if bodies:
            lines.append(f"{head} -> " + " | ".join(" ".join(b) for b in bodies))
    return "\n".join(lines) + "\n"


def parse_word(text: str, g: Optional[Grammar] = None) -> tuple:
    """Split a word: on whitespace, or into characters when that is the only sensible reading."""
    parts = text.split()
    if len(parts) == 1 and g is not None and parts[0] not in g.terminals \
            and all(ch in g.terminals for ch in parts[0]):
        return tuple(parts[0])
    return tuple(parts)


# -- Chomsky normal form ----------------------------------------------------

def _fresh(base, taken):
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def to_cnf(g: Grammar) -> CnfGrammar:
    """Equivalent CNF grammar; each original nonterminal keeps its language.

    Terminals inside long bodies are lifted to fresh nonterminals, long bodies
    are split into chains of fresh nonterminals, and unit productions are
    removed by closing each nonterminal under its unit chains.
    """
    taken = set(g.terminals) | set(g.nonterminals)
    nonterminals = set(g.nonterminals)
    lift = {}
    prods = []
    for head, body in g.productions:
        if len(body) >= 2:
            new_body = []
            for s in body:
                if s in g.terminals:
                    if s not in lift:
                        lift[s] = _fresh(f"T_{s}", taken)
                        nonterminals.add(lift[s])
                        prods.append((lift[s], (s,)))
                    s = lift[s]
                new_body.append(s)
            body = tuple(new_body)
        while len(body) > 2:
            rest = _fresh(f"{head}_{len(prods)}", taken)
            nonterminals.add(rest)
            prods.append((head, (body[0], rest)))
            head, body = rest, body[1:]
        prods.append((head, body))

    units = {a: set() for a in nonterminals}
    for head, body in prods:
        if len(body) == 1 and body[0] in nonterminals:
            units[head].add(body[0])
    closure = {}
    for a in nonterminals:
        reach, todo = {a}, [a]
        while todo:
            for b in units[todo.pop()]:
                if b not in reach:
                    reach.add(b)
                    todo.append(b)
        closure[a] = reach
    proper = [(h, b) for h, b in prods if not (len(b) == 1 and b[0] in nonterminals)]
    by_head = {}
    for h, b in proper:
        by_head.setdefault(h, []).append(b)
    result = []
    for a in sorted(nonterminals):
        for b in sorted(closure[a]):
            for body in by_head.get(b, ()):
                result.append((a, body))
    return CnfGrammar(g.terminals, nonterminals, g.start, result)


# -- CYK --------------------------------------------------------------------

def _cyk_table(g: CnfGrammar, word):
    """``table[i][l]``: nonterminals deriving ``word[i:i+l]`` (``l >= 1``)."""
    n = len(word)
    by_terminal = {}
    pairs = []
    for head, body in g.productions:
        if len(body) == 1:
            by_terminal.setdefault(body[0], set()).add(head)
        else:
            pairs.append((head, body[0], body[1]))
    table = [[None] * (n - i + 1) for i in range(n)]
    for i, sym in enumerate(word):
        table[i][1] = frozenset(by_terminal.get(sym, ()))
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            cell = set()
            for split in range(1, length):
                left = table[i][split]
                right = table[i + split][length - split]
                if not left or not right:
                    continue
                for head, b, c in pairs:
                    if b in left and c in right:
                        cell.add(head)
            table[i][length] = frozenset(cell)
    return table


def _check_word(g, word):
    word = tuple(word)
    if not word:
        raise ValueError("the empty word is excluded (grammars have no empty productions)")
    bad = [s for s in word if s in g.nonterminals]
    if bad:
        raise ValueError(f"word contains nonterminals {bad}")
    return word


def cyk_membership(g: CnfGrammar, word: Iterable, nonterminal: Optional[str] = None) -> bool:
    """Whether the nonempty ``word`` is derivable from ``nonterminal`` (default: start)."""
    if not isinstance(g, CnfGrammar):
        raise TypeError("cyk_membership needs a CnfGrammar; use to_cnf first")
    word = _check_word(g, word)
    nonterminal = g.start if nonterminal is None else nonterminal
    return nonterminal in _cyk_table(g, word)[0][len(word)]


def interval_table(g: Grammar, word: Iterable) -> frozenset:
    """All ``(Y, i, j)`` with ``1 <= i < j <= n+1`` and ``word[i-1:j-1]`` in ``L(g, Y)``.

    Only nonterminals of ``g`` itself are reported, never helpers added by
    the CNF conversion.
    """
    word = _check_word(g, word)
    cnf = g if isinstance(g, CnfGrammar) else to_cnf(g)
    table = _cyk_table(cnf, word)
    n = len(word)
    return frozenset(
        (y, i + 1, i + 1 + length)
        for i in range(n) for length in range(1, n - i + 1)
        for y in table[i][length] if y in g.nonterminals
    )


def find_nonmember_word(g: Grammar, max_length: int) -> Optional[tuple]:
    """Least nonempty word (by length, then lexicographically) outside ``L(g)``."""
    if not g.terminals:
        raise ValueError("grammar has no terminals")
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    cnf = to_cnf(g)
    alphabet = g.sorted_terminals()
    for length in range(1, max_length + 1):
        for word in itertools.product(alphabet, repeat=length):
            if not cyk_membership(cnf, word):
                return word
    return None
