"""CNF formulas, a small clause-learning DPLL solver, and DIMACS I/O.

The solver uses two watched literals per clause, first-UIP conflict
analysis with non-chronological backjumping, and Luby restarts.  Branching
takes the unassigned variable with the highest conflict activity, ties going
to the lowest index, and tries it false first; there is no randomness, so
runs are reproducible.
"""
from __future__ import annotations

import heapq
import time
from typing import Iterable

__all__ = [
    "CnfFormula", "BudgetExceeded", "solve_cnf", "export_dimacs",
    "parse_dimacs", "DimacsSyntaxError", "MAX_VARIABLES",
]

MAX_VARIABLES = 1 << 24


class BudgetExceeded(Exception):
    """The solver ran out of its time budget before reaching a verdict."""

    def __init__(self, budget_ms, conflicts):
        self.budget_ms = budget_ms
        self.conflicts = conflicts
        super().__init__(f"budget of {budget_ms} ms exhausted after {conflicts} conflicts")


class CnfFormula:
    """Clauses over variables ``1..num_vars`` with an optional per-variable annotation."""

    def __init__(self, num_vars: int = 0, clauses: Iterable = (), annotation=None):
        self.num_vars = num_vars
        self.clauses = [list(c) for c in clauses]
        self.annotation = dict(annotation or {})
        for c in self.clauses:
            self._check(c)

    def __repr__(self):
        return f"CnfFormula(num_vars={self.num_vars}, clauses={len(self.clauses)})"

    def new_var(self, note=None) -> int:
        if self.num_vars >= MAX_VARIABLES:
            raise OverflowError(f"more than {MAX_VARIABLES} variables")
        self.num_vars += 1
        if note is not None:
            self.annotation[self.num_vars] = note
        return self.num_vars

    def _check(self, clause):
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")

    def add_clause(self, lits):
        clause = list(lits)
        self._check(clause)
        self.clauses.append(clause)

    def is_satisfied_by(self, assignment) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


def _lit_index(lit):
    return 2 * lit if lit > 0 else -2 * lit + 1


def solve_cnf(formula, budget_ms: int = 0, stats=None):
    """Return a satisfying assignment ``{var: bool}`` or None when unsatisfiable.

    ``formula`` is a :class:`CnfFormula` or an iterable of clauses.  With a
    positive ``budget_ms`` the search raises :class:`BudgetExceeded` once the
    budget is spent.  A ``stats`` dict, if given, receives conflict and
    decision counts.
    """
    if not isinstance(formula, CnfFormula):
        clauses = [list(c) for c in formula]
        n = max((abs(l) for c in clauses for l in c), default=0)
        formula = CnfFormula(n, clauses)
    solver = _Solver(formula.num_vars, formula.clauses, budget_ms)
    try:
        return solver.solve()
    finally:
        if stats is not None:
            stats["conflicts"] = solver.conflicts
            stats["decisions"] = solver.decisions


def _luby(i):
    """The ``i``-th term (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class _Solver:
    RESTART_UNIT = 100
    DECAY = 0.95

    def __init__(self, n, clauses, budget_ms):
        self.n = n
        self.budget_ms = budget_ms
        self.deadline = time.monotonic() + budget_ms / 1000 if budget_ms > 0 else None
        self.value = [0] * (n + 1)      # 1 true, -1 false, 0 unassigned
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.bump = 1.0
        # lazy max-heap of (-activity, var); ties go to the lowest variable
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.clauses = []
        self.watches = [[] for _ in range(2 * n + 2)]
        self.conflicts = 0
        self.decisions = 0
        self.unsat = False
        self.pending_units = []
        for c in clauses:
            lits = list(dict.fromkeys(c))
            if any(-l in lits for l in lits):
                continue
            if not lits:
                self.unsat = True
            elif len(lits) == 1:
                self.pending_units.append(lits[0])
            else:
                self._attach(lits)

    def _attach(self, lits):
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[_lit_index(lits[0])].append(ci)
        self.watches[_lit_index(lits[1])].append(ci)
        return ci

    def lit_value(self, lit):
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def enqueue(self, lit, reason):
        var = abs(lit)
        self.value[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def propagate(self):
        """Unit propagation; returns a conflicting clause index or None."""
        value = self.value
        clauses = self.clauses
        watches = self.watches
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            wl = watches[_lit_index(false_lit)]
            i = j = 0
            while i < len(wl):
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    v = value[abs(lk)]
                    if (v if lk > 0 else -v) != -1:
                        c[1], c[k] = lk, false_lit
                        watches[_lit_index(lk)].append(ci)
                        break
                else:
                    wl[j] = ci
                    j += 1
                    if (fv if first > 0 else -fv) == -1:
                        while i < len(wl):
                            wl[j] = wl[i]
                            i += 1
                            j += 1
                        del wl[j:]
                        return ci
                    self.enqueue(first, ci)
            del wl[j:]
        return None

    def bump_var(self, var):
        act = self.activity[var] + self.bump
        self.activity[var] = act
        if act > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.bump *= 1e-100
            self.heap = [(-self.activity[v], v) for v in range(1, self.n + 1)
                         if self.value[v] == 0]
            heapq.heapify(self.heap)
        elif self.value[var] == 0:
            heapq.heappush(self.heap, (-act, var))

    def analyze(self, conflict):
        """First-UIP learning; returns (learned clause, backjump level)."""
        seen = [False] * (self.n + 1)
        learned = [None]
        counter = 0
        current = len(self.trail_lim)
        idx = len(self.trail) - 1
        lit = None
        clause = self.clauses[conflict]
        while True:
            for q in clause:
                if lit is not None and q == lit:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self.bump_var(v)
                    if self.level[v] == current:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            seen[abs(lit)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[abs(lit)]]
        learned[0] = -lit
        self.bump /= self.DECAY
        if len(learned) == 1:
            return learned, 0
        best = max(range(1, len(learned)), key=lambda k: self.level[abs(learned[k])])
        learned[1], learned[best] = learned[best], learned[1]
        return learned, self.level[abs(learned[1])]

    def backjump(self, level):
        if len(self.trail_lim) <= level:
            return
        stop = self.trail_lim[level]
        heap, activity = self.heap, self.activity
        for lit in self.trail[stop:]:
            var = abs(lit)
            self.value[var] = 0
            self.reason[var] = None
            heapq.heappush(heap, (-activity[var], var))
        del self.trail[stop:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def pick_branch_var(self):
        heap, value, activity = self.heap, self.value, self.activity
        while heap:
            neg, var = heapq.heappop(heap)
            if value[var] == 0 and -neg == activity[var]:
                return var
        return 0

    def check_budget(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded(self.budget_ms, self.conflicts)

    def solve(self):
        if self.unsat:
            return None
        for lit in self.pending_units:
            v = self.lit_value(lit)
            if v == -1:
                return None
            if v == 0:
                self.enqueue(lit, None)
        restarts = 0
        limit = self.RESTART_UNIT * _luby(0)
        since_restart = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return None
                if self.conflicts % 64 == 0:
                    self.check_budget()
                learned, level = self.analyze(conflict)
                self.backjump(level)
                if len(learned) == 1:
                    self.enqueue(learned[0], None)
                else:
                    self.enqueue(learned[0], self._attach(learned))
                continue
            if since_restart >= limit:
                restarts += 1
                since_restart = 0
                limit = self.RESTART_UNIT * _luby(restarts)
                self.backjump(0)
                continue
            var = self.pick_branch_var()
            if var == 0:
                return {v: self.value[v] == 1 for v in range(1, self.n + 1)}
            if self.decisions % 256 == 0:
                self.check_budget()
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self.enqueue(-var, None)


# -- DIMACS -----------------------------------------------------------------

def _format_note(note):
    return " ".join(str(x) for x in note) if isinstance(note, tuple) else str(note)


def export_dimacs(formula: CnfFormula) -> str:
    lines = [f"c var {v} {_format_note(formula.annotation[v])}"
             for v in sorted(formula.annotation)]
    lines.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    lines.extend(" ".join(map(str, c + [0])) for c in formula.clauses)
    return "\n".join(lines) + "\n"


class DimacsSyntaxError(ValueError):
    pass


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; ``c var`` comments come back as string annotations."""
    header = None
    annotation = {}
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split(None, 3)
            if len(parts) >= 3 and parts[1] == "var":
                annotation[int(parts[2])] = parts[3] if len(parts) > 3 else ""
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or header is not None:
                raise DimacsSyntaxError(f"line {lineno}: bad problem line {raw!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsSyntaxError(f"line {lineno}: bad problem line {raw!r}") from None
            continue
        if header is None:
            raise DimacsSyntaxError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise DimacsSyntaxError(f"line {lineno}: non-integer literal in {raw!r}") from None
        for lit in lits:
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if header is None:
        raise DimacsSyntaxError("missing 'p cnf' problem line")
    if current:
        clauses.append(current)
    if len(clauses) != header[1]:
        raise DimacsSyntaxError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], clauses, annotation)
