"""Satisfiability-preserving rewrites and the matching model transformations.

* :func:`grammar_to_expression` builds, from a grammar, an expression of
  difference degree two that is finitely satisfiable exactly when the
  grammar misses some nonempty word; :func:`witness_structure` builds the
  model from such a word.
* :func:`reduce_to_two` rewrites an expression over names ``a_1..a_k`` into
  one over two names, with :func:`model_to_two` / :func:`model_from_two`
  moving structures across.
* :func:`reduce_to_one` does the same from two names to one
  (:func:`model_to_one` / :func:`model_from_one`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cfg import Grammar, interval_table, to_cnf, cyk_membership
from .expr import (
    Atom, Difference, Intersection, Vocabulary, compose, difference_degree,
    is_name, power, relation_names, substitute, union_of,
)
from .graph import Structure, evaluate, node_key, active_domain

__all__ = [
    "ReductionOutput", "GadgetNode", "INFINITY",
    "grammar_to_expression", "witness_structure",
    "reduce_to_two", "model_to_two", "model_from_two", "two_name_gadget",
    "reduce_to_one", "model_to_one", "model_from_one", "one_name_gadgets",
    "reduce_full",
]

INFINITY = "inf"


@dataclass
class ReductionOutput:
    vocabulary: Vocabulary
    expression: object
    name_map: dict = field(default_factory=dict)
    # rewritten source name -> replacement expression
    substitution: dict = field(default_factory=dict)
    # grammar reductions: the positive part, then the seven excluded parts
    parts: Optional[tuple] = None

    def map_lines(self):
        lines = [f"# map: {role} -> {name}" for role, name in self.name_map.items()]
        lines += [f"# map: {src} := {rep}" for src, rep in self.substitution.items()]
        return lines


def _fresh(base, taken):
    name = base
    while name in taken:
        name += "'"
    return name


# -- grammar -> expression --------------------------------------------------

def _check_symbols(g):
    bad = [s for s in sorted(g.terminals | g.nonterminals) if not is_name(s)]
    if bad:
        raise ValueError(f"grammar symbols must be valid relation names: {bad}")
    if not g.terminals:
        raise ValueError("grammar has no terminals")


def _grammar_names(g):
    taken = set(g.terminals) | set(g.nonterminals)
    names = {}
    for role in ("alpha", "omega", "X"):
        names[role] = _fresh(role, taken)
        taken.add(names[role])
    return names


def grammar_to_expression(g: Grammar) -> ReductionOutput:
    """The expression ``phi0 - (phi1 | ... | phi7)`` for grammar ``g``.

    The vocabulary is the terminals, the nonterminals, and three fresh
    names playing the roles ``alpha``, ``omega`` and ``X`` (primed when a
    grammar symbol already uses the plain name).  Productions are used as
    written, without CNF conversion.
    """
    _check_symbols(g)
    names = _grammar_names(g)
    alpha, omega, X = (Atom(names[r]) for r in ("alpha", "omega", "X"))
    sigma = union_of(Atom(t) for t in g.sorted_terminals())
    start = Atom(g.start)

    phi0 = compose([alpha, sigma, omega])
    phi1 = compose([alpha, sigma, Difference(omega, alpha)])
    phi2 = compose([alpha, Difference(compose([sigma, alpha]), alpha)])
    phi3 = union_of(
        compose([alpha, Difference(compose(Atom(z) for z in body), Atom(head)), alpha])
        for head, body in g.productions)
    phi4 = compose([Difference(alpha, compose([alpha, sigma])), start, omega])
    phi5 = compose([alpha, Difference(sigma, X), alpha])
    phi6 = compose([alpha, Difference(compose([X, X]), X), alpha])
    phi7 = compose([alpha, Intersection(compose([X, sigma]), sigma), alpha])

    parts = (phi0, phi1, phi2, phi3, phi4, phi5, phi6, phi7)
    e = Difference(phi0, union_of(parts[1:]))
    vocab = Vocabulary(g.sorted_terminals() + g.sorted_nonterminals()
                       + [names["alpha"], names["omega"], names["X"]])
    return ReductionOutput(vocab, e, names, parts=parts)


def witness_structure(g: Grammar, word) -> Structure:
    """Finite model of the grammar expression built from a word outside ``L(g)``.

    Nodes are ``0``, positions ``1..n+1`` and ``INFINITY``.  Raises
    ``ValueError`` when the word is empty, uses non-terminals, or is in the
    language.  The result is checked to contain ``(0, INFINITY)``.
    """
    _check_symbols(g)
    word = tuple(word)
    if not word:
        raise ValueError("witness word must be nonempty")
    foreign = [s for s in word if s not in g.terminals]
    if foreign:
        raise ValueError(f"witness word uses symbols outside the terminals: {foreign}")
    if cyk_membership(to_cnf(g), word):
        raise ValueError(f"word {' '.join(word)!r} is in the language of the grammar")
    n = len(word)
    names = _grammar_names(g)
    positions = range(1, n + 2)
    rels = {t: [(i, i + 1) for i in range(1, n + 1) if word[i - 1] == t]
            for t in g.sorted_terminals()}
    for y in g.sorted_nonterminals():
        rels[y] = []
    for y, i, j in sorted(interval_table(g, word), key=lambda t: (t[0], t[1], t[2])):
        rels[y].append((i, j))
    rels[names["alpha"]] = [(0, i) for i in range(1, n + 1)] + [(i, INFINITY) for i in positions]
    rels[names["omega"]] = [(n + 1, INFINITY)]
    rels[names["X"]] = [(i, j) for i in positions for j in positions if i < j]
    out = grammar_to_expression(g)
    structure = Structure(rels, out.vocabulary)
    if (0, INFINITY) not in evaluate(out.expression, structure):
        raise AssertionError("witness structure does not satisfy the grammar expression")
    return structure


# -- many names -> two names ------------------------------------------------

@dataclass(frozen=True)
class GadgetNode:
    """Fresh node number ``index`` of the gadget standing for edge ``origin``."""

    origin: tuple
    source: str
    index: int
    tag: int = 0

    def sort_key(self):
        return (self.tag, self.source, node_key(self.origin[0]),
                node_key(self.origin[1]), self.index)

    def __str__(self):
        x, y = self.origin
        tag = f".{self.tag}" if self.tag else ""
        return f"u{self.index}{tag}[{x},{y},{self.source}]"


def _fresh_tag(structure):
    used = {n.tag for n in active_domain(structure) if isinstance(n, GadgetNode)}
    tag = 0
    while tag in used:
        tag += 1
    return tag


def _two_names(vocab, b=None, c=None):
    taken = set(vocab)
    b = b or _fresh("b", taken)
    c = c or _fresh("c", taken | {b})
    if b in taken or c in taken or b == c:
        raise ValueError(f"names {b!r}, {c!r} must be distinct and outside {list(vocab)}")
    return b, c


def two_name_gadget(i: int, b: str = "b", c: str = "c"):
    """``b.(c & c^(i+1)).b``, the stand-in for the ``i``-th name (1-based)."""
    return compose([Atom(b), Intersection(Atom(c), power(Atom(c), i + 1)), Atom(b)])


def _vocab(v):
    return v if isinstance(v, Vocabulary) else Vocabulary(v)


def reduce_to_two(e, vocabulary, b: Optional[str] = None, c: Optional[str] = None) -> ReductionOutput:
    """Replace the ``i``-th vocabulary name by :func:`two_name_gadget` ``(i)``."""
    vocabulary = _vocab(vocabulary)
    missing = relation_names(e) - set(vocabulary)
    if missing:
        raise ValueError(f"expression uses names outside the vocabulary: {sorted(missing)}")
    b, c = _two_names(vocabulary, b, c)
    subst = {name: two_name_gadget(i, b, c) for i, name in enumerate(vocabulary, 1)}
    out = substitute(e, subst)
    return ReductionOutput(Vocabulary([b, c]), out, {"b": b, "c": c}, subst)


def model_to_two(K: Structure, vocabulary=None, b: str = "b", c: str = "c") -> Structure:
    """Encode each ``a_i`` edge as a ``b``-entered, ``b``-exited chain of ``i+2`` fresh ``c`` nodes."""
    vocabulary = _vocab(vocabulary) if vocabulary is not None else K.vocabulary
    tag = _fresh_tag(K)
    b_edges, c_edges = [], []
    for i, name in enumerate(vocabulary, 1):
        for x, y in K[name]:
            u = [GadgetNode((x, y), name, k, tag) for k in range(1, i + 3)]
            b_edges += [(x, u[0]), (u[-1], y)]
            c_edges += list(zip(u, u[1:])) + [(u[0], u[-1])]
    return Structure({b: b_edges, c: c_edges}, [b, c])


def _two_view(J, names):
    return Structure({n: J[n] if n in J.vocabulary else () for n in names}, list(names))


def model_from_two(J: Structure, vocabulary, b: str = "b", c: str = "c") -> Structure:
    vocabulary = _vocab(vocabulary)
    J = _two_view(J, (b, c))
    return Structure(
        {name: evaluate(two_name_gadget(i, b, c), J) for i, name in enumerate(vocabulary, 1)},
        vocabulary)


# -- two names -> one name --------------------------------------------------

def one_name_gadgets(a: str = "a"):
    """Stand-ins for the two names: ``a.(a & a^2).a`` and ``a.(a & a^3).a``."""
    atom = Atom(a)
    return (compose([atom, Intersection(atom, power(atom, 2)), atom]),
            compose([atom, Intersection(atom, power(atom, 3)), atom]))


def reduce_to_one(e, b: str = "b", c: str = "c", a: Optional[str] = None) -> ReductionOutput:
    other = relation_names(e) - {b, c}
    if other:
        raise ValueError(f"expression may only use {b!r} and {c!r}; found {sorted(other)}")
    a = a or _fresh("a", {b, c})
    if a in (b, c):
        raise ValueError(f"name {a!r} clashes with {b!r}/{c!r}")
    gb, gc = one_name_gadgets(a)
    subst = {b: gb, c: gc}
    return ReductionOutput(Vocabulary([a]), substitute(e, subst), {"a": a}, subst)


def model_to_one(I: Structure, b: str = "b", c: str = "c", a: str = "a") -> Structure:
    """Each ``b`` edge becomes a 3-node gadget path, each ``c`` edge a 4-node one."""
    I = _two_view(I, (b, c))
    tag = _fresh_tag(I)
    edges = []
    for name, width in ((b, 3), (c, 4)):
        for x, y in I[name]:
            u = [GadgetNode((x, y), name, k, tag) for k in range(1, width + 1)]
            path = [x] + u + [y]
            edges += list(zip(path, path[1:])) + [(u[0], u[-1])]
    return Structure({a: edges}, [a])


def model_from_one(J: Structure, a: str = "a", b: str = "b", c: str = "c") -> Structure:
    gb, gc = one_name_gadgets(a)
    J = _two_view(J, (a,))
    return Structure({b: evaluate(gb, J), c: evaluate(gc, J)}, [b, c])


def reduce_full(e, vocabulary) -> ReductionOutput:
    """Two-name reduction followed by the one-name reduction."""
    two = reduce_to_two(e, vocabulary)
    one = reduce_to_one(two.expression, two.name_map["b"], two.name_map["c"])
    subst = {name: substitute(rep, one.substitution) for name, rep in two.substitution.items()}
    out = ReductionOutput(one.vocabulary, one.expression,
                          {**two.name_map, **one.name_map}, subst)
    assert difference_degree(out.expression) == difference_degree(e)
    return out
