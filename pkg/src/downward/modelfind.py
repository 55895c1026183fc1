"""Bounded finite-satisfiability search.

Two independent backends look for a structure over ``{0..m-1}`` on which an
expression is nonempty, for ``m = 1..max_domain_size``:

* ``enumeration`` walks every assignment of relations as a bit counter
  (vectorized over batches with numpy);
* ``cnf`` encodes the semantics at a fixed size into CNF and hands it to the
  built-in solver.

Either way a SAT verdict is re-checked with :func:`downward.graph.evaluate`
before it is reported.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .expr import Atom, Difference, Intersection, Union, relation_names, subexpressions
from .graph import Structure, is_satisfied
from .sat import BudgetExceeded, CnfFormula, solve_cnf

__all__ = [
    "Bounds", "SatReport", "ExpressionCnf", "SearchGuardError",
    "ENUMERATION_BIT_LIMIT", "BACKENDS",
    "enumerate_models", "encode_cnf", "decode_assignment", "check_finite_sat",
]

ENUMERATION_BIT_LIMIT = 28
BACKENDS = ("enumeration", "cnf")
_BATCH = 1 << 15

SAT, UNSAT_UP_TO, TIMEOUT = "SAT", "UNSAT_UP_TO", "TIMEOUT"


@dataclass(frozen=True)
class Bounds:
    max_domain_size: int
    budget_ms: int = 0  # per domain size; 0 means unlimited

    def __post_init__(self):
        if self.max_domain_size < 1:
            raise ValueError("max_domain_size must be >= 1")
        if self.budget_ms < 0:
            raise ValueError("budget_ms must be >= 0")


@dataclass
class SatReport:
    """Outcome of a bounded search.

    ``size`` is the domain size where a model was found (SAT), the largest
    size exhausted (UNSAT_UP_TO), or the size being searched when the budget
    or a guard stopped the run (TIMEOUT).
    """

    verdict: str
    size: int
    backend: str
    structure: Optional[Structure] = None
    witness: Optional[tuple] = None
    explored: int = 0
    reason: str = ""
    per_size: list = field(default_factory=list)

    @property
    def is_sat(self):
        return self.verdict == SAT

    def summary(self) -> str:
        if self.verdict == SAT:
            return f"SAT {self.size}"
        return f"{self.verdict} {self.size}"


class SearchGuardError(RuntimeError):
    def __init__(self, size, bits):
        self.size = size
        self.bits = bits
        super().__init__(
            f"enumeration at domain size {size} needs {bits} assignment bits "
            f"(limit {ENUMERATION_BIT_LIMIT}); use the cnf backend")


def _names(e):
    return sorted(relation_names(e))


def _verified(e, structure):
    witness = is_satisfied(e, structure)
    if witness is None:
        raise AssertionError(f"model found by search does not satisfy {e}: {structure}")
    return witness


# -- enumeration ------------------------------------------------------------

def _batch_eval(e, base):
    """Evaluate ``e`` on a batch of structures; ``base[name]`` has shape (B, m, m)."""
    memo = {}
    for s in subexpressions(e):
        if isinstance(s, Atom):
            memo[s] = base[s.name]
            continue
        left, right = memo[s.left], memo[s.right]
        if isinstance(s, Union):
            memo[s] = left | right
        elif isinstance(s, Intersection):
            memo[s] = left & right
        elif isinstance(s, Difference):
            memo[s] = left & ~right
        else:
            memo[s] = np.matmul(left, right)
    return memo[e]


def _structure_from_bits(names, m, code):
    rels = {}
    for r, name in enumerate(names):
        rels[name] = [
            (i, j) for i in range(m) for j in range(m)
            if code >> (r * m * m + i * m + j) & 1
        ]
    return Structure(rels, names)


def enumerate_models(e, bounds: Bounds) -> SatReport:
    """Exhaustive search in bit-counter order, least assignment first.

    Bit ``r*m*m + i*m + j`` of the counter holds ``(i, j)`` in the ``r``-th
    relation name (names sorted).  Assignments whose active domain is not an
    initial segment of ``0..m-1`` are skipped; every structure is isomorphic
    to one that is kept.  Raises :class:`SearchGuardError` when a size would
    need more than ``ENUMERATION_BIT_LIMIT`` bits.
    """
    names = _names(e)
    k = len(names)
    explored = 0
    per_size = []
    for m in range(1, bounds.max_domain_size + 1):
        bits = k * m * m
        if bits > ENUMERATION_BIT_LIMIT:
            raise SearchGuardError(m, bits)
        start_time = time.monotonic()
        shifts = np.arange(bits, dtype=np.int64)
        total = 1 << bits
        seen_here = 0
        for lo in range(0, total, _BATCH):
            if bounds.budget_ms and (time.monotonic() - start_time) * 1000 > bounds.budget_ms:
                return SatReport(TIMEOUT, m, "enumeration", explored=explored + seen_here,
                                 reason=f"budget of {bounds.budget_ms} ms exhausted",
                                 per_size=per_size)
            codes = np.arange(lo, min(total, lo + _BATCH), dtype=np.int64)
            flat = ((codes[:, None] >> shifts) & 1).astype(bool)
            rels = flat.reshape(len(codes), k, m, m)
            active = (rels.any(axis=3) | rels.any(axis=2)).any(axis=1)
            valid = ~(active[:, 1:] & ~active[:, :-1]).any(axis=1)
            base = {name: rels[:, r] for r, name in enumerate(names)}
            hit = _batch_eval(e, base).any(axis=(1, 2)) & valid
            found = np.flatnonzero(hit)
            if found.size:
                first = int(found[0])
                seen_here += int(valid[: first + 1].sum())
                per_size.append((m, seen_here))
                structure = _structure_from_bits(names, m, int(codes[first]))
                return SatReport(SAT, m, "enumeration", structure, _verified(e, structure),
                                 explored + seen_here, per_size=per_size)
            seen_here += int(valid.sum())
        explored += seen_here
        per_size.append((m, seen_here))
    return SatReport(UNSAT_UP_TO, bounds.max_domain_size, "enumeration",
                     explored=explored, per_size=per_size)


# -- CNF encoding -----------------------------------------------------------

class ExpressionCnf(CnfFormula):
    """CNF for "``expression`` is nonempty on some structure over ``{0..size-1}``".

    ``base[(name, i, j)]`` is the variable for ``(i, j)`` in relation
    ``name``; ``defined[(sid, i, j)]`` the one for ``(i, j)`` in
    subexpression ``subexprs[sid]``.
    """

    def __init__(self, expression, size):
        super().__init__()
        self.expression = expression
        self.size = size
        self.names = _names(expression)
        self.subexprs = []
        self.base = {}
        self.defined = {}


def encode_cnf(e, m: int) -> ExpressionCnf:
    if m < 1:
        raise ValueError("domain size must be >= 1")
    f = ExpressionCnf(e, m)
    cells = [(i, j) for i in range(m) for j in range(m)]
    for name in f.names:
        for i, j in cells:
            f.base[(name, i, j)] = f.new_var(("x", name, i, j))
    grid = {}
    for sid, s in enumerate(subexpressions(e)):
        f.subexprs.append(s)
        if isinstance(s, Atom):
            y = {(i, j): f.base[(s.name, i, j)] for i, j in cells}
            for i, j in cells:
                f.defined[(sid, i, j)] = y[(i, j)]
            grid[s] = y
            continue
        left, right = grid[s.left], grid[s.right]
        y = {}
        for i, j in cells:
            y[(i, j)] = v = f.new_var(("y", sid, i, j))
            f.defined[(sid, i, j)] = v
            lv, rv = left[(i, j)], right[(i, j)]
            if isinstance(s, Union):
                f.add_clause([-v, lv, rv])
                f.add_clause([-lv, v])
                f.add_clause([-rv, v])
            elif isinstance(s, Intersection):
                f.add_clause([-v, lv])
                f.add_clause([-v, rv])
                f.add_clause([-lv, -rv, v])
            elif isinstance(s, Difference):
                f.add_clause([-v, lv])
                f.add_clause([-v, -rv])
                f.add_clause([-lv, rv, v])
            else:
                terms = []
                for k in range(m):
                    t = f.new_var(("t", sid, i, k, j))
                    a, b = left[(i, k)], right[(k, j)]
                    f.add_clause([-t, a])
                    f.add_clause([-t, b])
                    f.add_clause([-a, -b, t])
                    f.add_clause([-t, v])
                    terms.append(t)
                f.add_clause([-v] + terms)
        grid[s] = y
    f.add_clause([grid[e][c] for c in cells])
    return f


def decode_assignment(formula: ExpressionCnf, assignment) -> Structure:
    rels = {name: [] for name in formula.names}
    for (name, i, j), var in formula.base.items():
        if assignment[var]:
            rels[name].append((i, j))
    return Structure(rels, formula.names)


def _cnf_search(e, bounds):
    explored = 0
    per_size = []
    for m in range(1, bounds.max_domain_size + 1):
        formula = encode_cnf(e, m)
        stats = {}
        try:
            assignment = solve_cnf(formula, bounds.budget_ms, stats)
        except BudgetExceeded as exc:
            return SatReport(TIMEOUT, m, "cnf", explored=explored + stats.get("decisions", 0),
                             reason=str(exc), per_size=per_size)
        explored += stats["decisions"]
        per_size.append((m, stats["decisions"]))
        if assignment is not None:
            structure = decode_assignment(formula, assignment)
            return SatReport(SAT, m, "cnf", structure, _verified(e, structure),
                             explored, per_size=per_size)
    return SatReport(UNSAT_UP_TO, bounds.max_domain_size, "cnf",
                     explored=explored, per_size=per_size)


def check_finite_sat(e, bounds: Bounds, backend: str = "cnf") -> SatReport:
    """Search sizes ``1..bounds.max_domain_size`` for a finite model of ``e``.

    ``explored`` counts structures for enumeration and solver decisions for
    cnf.  Guards and budgets come back as TIMEOUT reports.
    """
    if backend == "cnf":
        return _cnf_search(e, bounds)
    if backend == "enumeration":
        try:
            return enumerate_models(e, bounds)
        except SearchGuardError as exc:
            return SatReport(TIMEOUT, exc.size, "enumeration", reason=str(exc))
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
