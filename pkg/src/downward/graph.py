"""Finite structures (edge-labeled digraphs) and expression evaluation."""
from __future__ import annotations

import re
from typing import Iterable, Mapping

import numpy as np

from .expr import (
    Atom, Difference, Intersection, Union, Vocabulary,
    is_name, relation_names, subexpressions,
)

__all__ = [
    "Relation", "Structure", "StructureSyntaxError", "UnknownRelationError",
    "node_key", "format_node", "format_pair", "parse_structure",
    "render_structure", "evaluate", "active_domain", "is_satisfied",
]

STRATEGIES = ("pairs", "matrix")


def node_key(node):
    """Total order on node tokens: integers, then strings, then anything else."""
    if isinstance(node, bool):
        return (3, repr(node))
    if isinstance(node, int):
        return (0, node)
    if isinstance(node, str):
        return (1, node)
    sort_key = getattr(node, "sort_key", None)
    if sort_key is not None:
        return (2, sort_key())
    return (3, repr(node))


def pair_key(pair):
    return (node_key(pair[0]), node_key(pair[1]))


def format_node(node) -> str:
    return str(node)


def format_pair(pair, sep=", ") -> str:
    return f"({format_node(pair[0])}{sep}{format_node(pair[1])})"


class Relation:
    """A finite set of node pairs; iterates in canonical order."""

    __slots__ = ("pairs", "_sorted")

    def __init__(self, pairs: Iterable = ()):
        self.pairs = frozenset(pairs)
        self._sorted = None

    def __iter__(self):
        if self._sorted is None:
            self._sorted = tuple(sorted(self.pairs, key=pair_key))
        return iter(self._sorted)

    def __len__(self):
        return len(self.pairs)

    def __bool__(self):
        return bool(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __eq__(self, other):
        if isinstance(other, Relation):
            return self.pairs == other.pairs
        if isinstance(other, (set, frozenset)):
            return self.pairs == other
        return NotImplemented

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return "Relation({" + ", ".join(format_pair(p) for p in self) + "})"

    def __str__(self):
        return "{" + ", ".join(format_pair(p, ",") for p in self) + "}"

    def nodes(self) -> set:
        return {x for x, _ in self.pairs} | {y for _, y in self.pairs}


class UnknownRelationError(KeyError):
    pass


class Structure:
    """Assignment of a finite relation to every name of a vocabulary."""

    def __init__(self, relations: Mapping[str, Iterable], vocabulary=None):
        if vocabulary is None:
            vocabulary = Vocabulary(relations)
        elif not isinstance(vocabulary, Vocabulary):
            vocabulary = Vocabulary(vocabulary)
        extra = set(relations) - set(vocabulary)
        if extra:
            raise ValueError(f"relations outside the vocabulary: {sorted(extra)}")
        self.vocabulary = vocabulary
        self.relations = {
            name: r if isinstance(r, Relation) else Relation(r)
            for name, r in ((n, relations.get(n, ())) for n in vocabulary)
        }
        self._domain = None

    def __getitem__(self, name) -> Relation:
        return self.relations[name]

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.vocabulary == other.vocabulary and self.relations == other.relations

    def __repr__(self):
        body = ", ".join(f"{n}={self.relations[n]}" for n in self.vocabulary)
        return f"Structure({body})"

    def domain(self) -> tuple:
        """Active domain in canonical order; position = interned index."""
        if self._domain is None:
            nodes = set()
            for r in self.relations.values():
                nodes |= r.nodes()
            self._domain = tuple(sorted(nodes, key=node_key))
        return self._domain

    def restrict(self, names) -> "Structure":
        names = list(names)
        return Structure({n: self.relations[n] for n in names}, names)


def active_domain(structure: Structure) -> frozenset:
    return frozenset(structure.domain())


# -- file format ------------------------------------------------------------

class StructureSyntaxError(ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")


_INT_RE = re.compile(r"-?[0-9]+")


def _token(text):
    return int(text) if _INT_RE.fullmatch(text) else text


def parse_structure(text: str) -> Structure:
    """Parse ``<name> <src> <dst>`` edge lines plus an optional ``@names`` header."""
    names = []
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "@names":
            declared = fields[1:]
        elif len(fields) == 3:
            declared = fields[:1]
        else:
            raise StructureSyntaxError(
                f"expected '<relname> <src> <dst>', got {raw.strip()!r}", lineno)
        for n in declared:
            if not is_name(n):
                raise StructureSyntaxError(f"invalid relation name {n!r}", lineno)
            if n not in edges:
                names.append(n)
                edges[n] = set()
        if fields[0] != "@names":
            edges[fields[0]].add((_token(fields[1]), _token(fields[2])))
    return Structure(edges, names)


def render_structure(structure: Structure) -> str:
    lines = ["@names " + " ".join(structure.vocabulary)] if len(structure.vocabulary) else []
    for name in structure.vocabulary:
        for x, y in structure[name]:
            lines.append(f"{name} {format_node(x)} {format_node(y)}")
    return "\n".join(lines) + "\n"


# -- evaluation -------------------------------------------------------------

def _check_names(e, structure):
    missing = relation_names(e) - set(structure.vocabulary)
    if missing:
        raise UnknownRelationError(
            f"relation names not in the structure's vocabulary: {sorted(missing)}")


def _eval_pairs(e, structure):
    memo = {}
    for s in subexpressions(e):
        if isinstance(s, Atom):
            memo[s] = structure[s.name].pairs
            continue
        left, right = memo[s.left], memo[s.right]
        if isinstance(s, Union):
            memo[s] = left | right
        elif isinstance(s, Intersection):
            memo[s] = left & right
        elif isinstance(s, Difference):
            memo[s] = left - right
        else:
            succ = {}
            for z, y in right:
                succ.setdefault(z, []).append(y)
            memo[s] = frozenset(
                (x, y) for x, z in left for y in succ.get(z, ()))
    return memo[e]


def _eval_matrix(e, structure):
    dom = structure.domain()
    index = {node: i for i, node in enumerate(dom)}
    n = len(dom)
    memo = {}
    for s in subexpressions(e):
        if isinstance(s, Atom):
            m = np.zeros((n, n), dtype=bool)
            for x, y in structure[s.name].pairs:
                m[index[x], index[y]] = True
            memo[s] = m
            continue
        left, right = memo[s.left], memo[s.right]
        if isinstance(s, Union):
            memo[s] = left | right
        elif isinstance(s, Intersection):
            memo[s] = left & right
        elif isinstance(s, Difference):
            memo[s] = left & ~right
        else:
            memo[s] = left @ right
    rows, cols = np.nonzero(memo[e])
    return frozenset((dom[i], dom[j]) for i, j in zip(rows.tolist(), cols.tolist()))


def evaluate(e, structure: Structure, strategy: str = "pairs") -> Relation:
    """The relation defined by ``e`` in ``structure``.

    ``strategy`` selects pair-set joins (``"pairs"``) or boolean adjacency
    matrices over the interned active domain (``"matrix"``); both give the
    same result.
    """
    _check_names(e, structure)
    if strategy == "pairs":
        return Relation(_eval_pairs(e, structure))
    if strategy == "matrix":
        return Relation(_eval_matrix(e, structure))
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def is_satisfied(e, structure: Structure, strategy: str = "pairs"):
    """Least pair of ``e(structure)`` in canonical order, or None if empty."""
    result = evaluate(e, structure, strategy)
    return next(iter(result), None)
