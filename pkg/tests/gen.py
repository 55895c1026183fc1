"""Random generators and brute-force oracles shared by the tests.

The oracles deliberately avoid the package's own evaluation, CYK and solver
code paths.
"""
import functools
import itertools
import random

import numpy as np
from hypothesis import strategies as st

from downward.cfg import Grammar
from downward.expr import Atom, Composition, Difference, Intersection, Union
from downward.graph import Structure

BINARY = (Union, Intersection, Difference, Composition)
DIFF_FREE = (Union, Intersection, Composition)


def random_expr(rng, names, depth, ops=BINARY, leaf_p=0.3):
    if depth == 0 or rng.random() < leaf_p:
        return Atom(rng.choice(names))
    op = rng.choice(ops)
    return op(random_expr(rng, names, depth - 1, ops, leaf_p),
              random_expr(rng, names, depth - 1, ops, leaf_p))


def all_exprs(names, max_internal):
    """Every tree with at most ``max_internal`` operator nodes."""
    by_size = {0: [Atom(n) for n in names]}
    for k in range(1, max_internal + 1):
        trees = []
        for left_k in range(k):
            for left in by_size[left_k]:
                for right in by_size[k - 1 - left_k]:
                    trees.extend(op(left, right) for op in BINARY)
        by_size[k] = trees
    return [t for k in range(max_internal + 1) for t in by_size[k]]


def random_structure(rng, names, n_nodes, density=0.3, nodes=None):
    nodes = list(range(n_nodes)) if nodes is None else nodes
    rels = {n: [(x, y) for x in nodes for y in nodes if rng.random() < density] for n in names}
    return Structure(rels, names)


def exprs(names, max_leaves=12):
    leaf = st.sampled_from([Atom(n) for n in names])

    def extend(children):
        return st.builds(lambda op, l, r: op(l, r), st.sampled_from(BINARY), children, children)

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def structures(names, max_nodes=4):
    node = st.integers(0, max_nodes - 1)
    rel = st.frozensets(st.tuples(node, node), max_size=max_nodes * max_nodes)
    return st.fixed_dictionaries({n: rel for n in names}).map(lambda d: Structure(d, names))


# -- evaluation oracle -----------------------------------------------------

def eval_oracle(e, structure):
    """First-order reading of the semantics, quantifying over the whole active domain."""
    dom = structure.domain()

    def holds(s, x, y):
        if isinstance(s, Atom):
            return (x, y) in structure[s.name]
        if isinstance(s, Union):
            return holds(s.left, x, y) or holds(s.right, x, y)
        if isinstance(s, Intersection):
            return holds(s.left, x, y) and holds(s.right, x, y)
        if isinstance(s, Difference):
            return holds(s.left, x, y) and not holds(s.right, x, y)
        return any(holds(s.left, x, z) and holds(s.right, z, y) for z in dom)

    return {(x, y) for x in dom for y in dom if holds(e, x, y)}


# -- grammar oracle --------------------------------------------------------

def derives(g, symbol, word):
    """Leftmost-derivation search from ``symbol``; sound without empty productions."""
    word = tuple(word)
    n = len(word)
    start = (symbol,)
    seen = {start}
    todo = [start]
    while todo:
        form = todo.pop()
        if form == word:
            return True
        k = next((i for i, s in enumerate(form) if s in g.nonterminals), None)
        if k is None or form[:k] != word[:k]:
            continue
        for head, body in g.productions:
            if head != form[k]:
                continue
            new = form[:k] + body + form[k + 1:]
            # sentential forms never shrink, so longer ones are dead
            if len(new) <= n and new not in seen:
                seen.add(new)
                todo.append(new)
    return False


def random_grammar(rng, terminals=("a", "b"), nonterminals=("S", "A", "B"), max_prods=6,
                   max_body=3):
    nts = list(nonterminals[: rng.randint(1, len(nonterminals))])
    symbols = list(terminals) + nts
    prods = set()
    for _ in range(rng.randint(1, max_prods)):
        head = rng.choice(nts)
        body = tuple(rng.choice(symbols) for _ in range(rng.randint(1, max_body)))
        prods.add((head, body))
    # every nonterminal gets a terminal production so languages are rarely empty
    for nt in nts:
        if rng.random() < 0.7:
            prods.add((nt, (rng.choice(terminals),)))
    return Grammar(set(terminals), set(nts), nts[0], sorted(prods))


def words(alphabet, max_len):
    for n in range(1, max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


# -- propositional oracle --------------------------------------------------

@functools.lru_cache(maxsize=None)
def _var_columns(num_vars):
    """Truth-table columns packed 64 assignments per word; bit k of assignment a is var k+1."""
    words = max(1, (1 << num_vars) // 64)
    idx = np.arange(words * 64, dtype=np.uint64).reshape(words, 64)
    weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
    cols = []
    for k in range(num_vars):
        bits = (idx >> np.uint64(k)) & np.uint64(1)
        cols.append((bits * weights).sum(axis=1, dtype=np.uint64))
    mask = np.full(words, ~np.uint64(0), dtype=np.uint64)
    if num_vars < 6:
        mask[:] = np.uint64((1 << (1 << num_vars)) - 1)
    return cols, mask


def truth_table_sat(num_vars, clauses):
    """Exhaustive check over all ``2**num_vars`` assignments, bit-parallel."""
    cols, ok = _var_columns(num_vars)
    for c in clauses:
        sat = np.zeros_like(ok)
        for lit in c:
            col = cols[abs(lit) - 1]
            sat |= col if lit > 0 else ~col
        ok = ok & sat
        if not ok.any():
            return False
    return bool(ok.any())


def random_cnf(rng, num_vars, num_clauses, width=3):
    return [[rng.choice((-1, 1)) * rng.randint(1, num_vars)
             for _ in range(rng.randint(1, width))] for _ in range(num_clauses)]


def seeded(seed):
    return random.Random(seed)
