"""Exact rational linear feasibility by phase-one simplex with Bland's rule.

Arithmetic runs on ``gmpy2.mpq`` internally; everything that crosses the
module boundary is a ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

__all__ = ["Constraint", "LpResult", "lp_feasible", "solve_standard"]

_ZERO = mpq(0)


@dataclass(frozen=True)
class Constraint:
    """``sum(coeffs[v] * v) <op> rhs`` with ``op`` one of ``<=``, ``>=``, ``==``."""

    coeffs: Mapping[str, Fraction]
    op: str
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        if self.op not in ("<=", ">=", "=="):
            raise ValueError(f"unknown constraint operator {self.op!r}")

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        lhs = sum((Fraction(c) * valuation.get(v, 0) for v, c in self.coeffs.items()), Fraction(0))
        if self.op == "<=":
            return lhs <= self.rhs
        if self.op == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    witness: dict[str, Fraction] = field(default_factory=dict)

    def __bool__(self):
        return self.feasible


def solve_standard(rows: Sequence[Sequence], rhs: Sequence, slack_basis: Sequence[int | None] = ()):
    """Find ``x >= 0`` with ``rows @ x == rhs``.

    ``slack_basis[i]``, when not None, names a column that is a unit vector
    in row ``i`` only and may start in the basis (requires ``rhs[i] >= 0``).
    Rows without one receive an artificial variable.  Returns the list of
    values of the original columns, or None when infeasible.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    tab = []
    basis = []
    n_art = 0
    hints = list(slack_basis) + [None] * (m - len(slack_basis))
    for i in range(m):
        row = [mpq(v) for v in rows[i]]
        b = mpq(rhs[i])
        if b < 0:
            if hints[i] is not None:
                raise ValueError("slack basis row needs a non-negative right-hand side")
            row = [-v for v in row]
            b = -b
        tab.append(row)
        basis.append(hints[i] if hints[i] is not None else -1)
        tab[i].append(b)
    art_rows = [i for i in range(m) if basis[i] == -1]
    n_art = len(art_rows)
    width = n + n_art
    # Widen rows: original columns, artificial columns, rhs last.
    for i in range(m):
        b = tab[i].pop()
        tab[i].extend([_ZERO] * n_art)
        tab[i].append(b)
    for k, i in enumerate(art_rows):
        tab[i][n + k] = mpq(1)
        basis[i] = n + k
    # Phase-one objective: minimise the artificial sum.  obj[j] is the rate at
    # which increasing column j decreases it.
    obj = [_ZERO] * (width + 1)
    for i in art_rows:
        row = tab[i]
        for j in range(width + 1):
            if row[j]:
                obj[j] += row[j]
    for k in range(n_art):
        obj[n + k] = _ZERO

    while True:
        enter = -1
        for j in range(n):
            if obj[j] > 0:
                enter = j
                break
        if enter < 0 or obj[width] == 0:
            break
        leave = -1
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:  # unbounded direction cannot happen in phase one
            break
        _pivot(tab, obj, leave, enter, width)
        basis[leave] = enter

    if obj[width] != 0:
        return None
    values = [Fraction(0)] * n
    for i in range(m):
        j = basis[i]
        if j < n:
            values[j] = Fraction(int(tab[i][width].numerator), int(tab[i][width].denominator))
    return values


def _pivot(tab, obj, r, c, width):
    prow = tab[r]
    inv = 1 / prow[c]
    nz = [j for j in range(width + 1) if prow[j]]
    for j in nz:
        prow[j] *= inv
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]


def lp_feasible(constraints: Sequence[Constraint]) -> LpResult:
    """Decide feasibility of linear constraints over free rational variables.

    >>> lp_feasible([Constraint({"x": 1}, ">=", 1), Constraint({"x": 1}, "<=", 0)]).feasible
    False
    """
    names = sorted({v for c in constraints for v in c.coeffs})
    pos = {v: i for i, v in enumerate(names)}
    n_vars = len(names)
    n_slack = sum(1 for c in constraints if c.op != "==")
    n_cols = 2 * n_vars + n_slack
    rows, rhs, hints = [], [], []
    s = 2 * n_vars
    for c in constraints:
        row = [Fraction(0)] * n_cols
        for v, a in c.coeffs.items():
            a = Fraction(a)
            row[2 * pos[v]] += a
            row[2 * pos[v] + 1] -= a
        b = Fraction(c.rhs)
        op = c.op
        if op == ">=":
            row = [-a for a in row]
            b = -b
            op = "<="
        hint = None
        if op == "<=":
            row[s] = Fraction(1)
            if b >= 0:
                hint = s
            s += 1
        rows.append(row)
        rhs.append(b)
        hints.append(hint)
    values = solve_standard(rows, rhs, hints)
    if values is None:
        return LpResult(False)
    witness = {v: values[2 * i] - values[2 * i + 1] for i, v in enumerate(names)}
    return LpResult(True, witness)
