"""Finitely supported formal sums and finitely generated convex sets of them.

An :class:`Expr` is an element of ``M X``: a map from atoms to non-negative
rationals with finite support.  A :class:`ConvexSet` is a non-empty convex
subset of ``M X`` kept as the list of its extreme points, so two sets are
equal exactly when their generator tuples are equal.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .lp import Constraint, LpResult, lp_feasible, solve_standard

__all__ = [
    "Expr",
    "ZERO",
    "weighted_sum",
    "ConvexSet",
    "Constraint",
    "LpResult",
    "lp_feasible",
    "hull",
    "member",
    "combination",
    "minkowski_sum",
    "scale_set",
    "join_sets",
    "linear_image",
    "set_leq",
    "parse_rat",
    "format_rat",
]

Atom = Hashable


def parse_rat(text: str) -> Fraction:
    """Parse ``p/q`` or ``p``; raises ValueError on anything else."""
    text = text.strip()
    if not text or any(ch not in "0123456789/-" for ch in text) or text.count("/") > 1:
        raise ValueError(f"malformed rational {text!r}")
    value = Fraction(text)
    return value


def format_rat(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Expr:
    """Formal sum ``sum(c * a)``; ``terms`` is sorted by atom, zeros dropped."""

    terms: tuple[tuple[Atom, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[Atom, Fraction] | Iterable[tuple[Atom, Fraction]]) -> "Expr":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict = {}
        for atom, c in items:
            c = Fraction(c)
            if c < 0:
                raise ValueError(f"negative coefficient {c} on {atom!r}")
            if c:
                acc[atom] = acc.get(atom, 0) + c
        return cls(tuple(sorted(acc.items())))

    @classmethod
    def unit(cls, atom: Atom) -> "Expr":
        return cls(((atom, Fraction(1)),))

    def __getitem__(self, atom) -> Fraction:
        for a, c in self.terms:
            if a == atom:
                return c
        return Fraction(0)

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def support(self) -> tuple:
        return tuple(a for a, _ in self.terms)

    @property
    def mass(self) -> Fraction:
        return sum((c for _, c in self.terms), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Expr") -> "Expr":
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for a, c in other.terms:
            acc[a] = acc.get(a, 0) + c
        return Expr(tuple(sorted(acc.items())))

    def scale(self, a) -> "Expr":
        a = Fraction(a)
        if a < 0:
            raise ValueError("negative scalar")
        if a == 0:
            return Expr()
        if a == 1:
            return self
        return Expr(tuple((x, c * a) for x, c in self.terms))

    def __rmul__(self, a) -> "Expr":
        return self.scale(a)

    def map_atoms(self, f: Callable[[Atom], Atom | None]) -> "Expr":
        """Push forward along ``f``; atoms sent to None are dropped (sent to 0)."""
        acc: dict = {}
        for x, c in self.terms:
            y = f(x)
            if y is not None:
                acc[y] = acc.get(y, 0) + c
        return Expr(tuple(sorted(acc.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{format_rat(c)}*{_fmt_atom(a)}" for a, c in self.terms)


def _fmt_atom(a) -> str:
    if isinstance(a, tuple) and len(a) == 2:
        return f"({a[0]},{a[1]})"
    return str(a)


ZERO = Expr()


@dataclass(frozen=True)
class ConvexSet:
    """Convex hull of ``generators``; build with :func:`hull`, not directly."""

    generators: tuple[Expr, ...]

    @classmethod
    def point(cls, e: Expr) -> "ConvexSet":
        return cls((e,))

    @classmethod
    def zero(cls) -> "ConvexSet":
        return cls((ZERO,))

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __contains__(self, e: Expr) -> bool:
        return member(e, self)

    def atoms(self) -> set:
        return {a for g in self.generators for a in g.support}

    def __str__(self):
        return "hull{" + ", ".join(str(g) for g in self.generators) + "}"


# ---------------------------------------------------------------- LP layer

def combination(points: Sequence[Expr], equalities: Sequence[tuple[Mapping[Atom, Fraction], Fraction]]):
    """Convex weights ``lam`` with ``sum(lam_i * points_i)`` meeting ``equalities``.

    Each equality is ``(weights, rhs)`` and reads
    ``sum(weights[a] * P(a) for a) == rhs`` where ``P`` is the combined point.
    Returns the weight list, or None when no convex combination qualifies.
    """
    k = len(points)
    if k == 0:
        return None
    rows = []
    rhs = []
    dense = [g.as_dict() for g in points]
    for weights, b in equalities:
        row = []
        for g in dense:
            s = 0
            for a, w in weights.items():
                c = g.get(a)
                if c:
                    s += w * c
            row.append(s)
        if not any(row):
            if b != 0:
                return None
            continue
        rows.append(row)
        rhs.append(b)
    rows.append([1] * k)
    rhs.append(1)
    return solve_standard(rows, rhs)


def _atom_key(a):
    return repr(a)


def member(e: Expr, c: ConvexSet | Sequence[Expr]) -> bool:
    """``e`` lies in the convex hull of the generators of ``c``."""
    gens = c.generators if isinstance(c, ConvexSet) else tuple(c)
    if not gens:
        return False
    if e in gens:
        return True
    ed = e.as_dict()
    dense = [g.as_dict() for g in gens]
    atoms = set(ed)
    for d in dense:
        atoms.update(d)
    rows, rhs = [], []
    for a in sorted(atoms, key=_atom_key):
        col = [mpq(d.get(a, 0)) for d in dense]
        v = mpq(ed.get(a, 0))
        # any convex combination stays inside the generators' bounding box
        if v > max(col) or v < min(col):
            return False
        if any(col):
            rows.append(col)
            rhs.append(v)
    rows.append([1] * len(gens))
    rhs.append(1)
    return solve_standard(rows, rhs) is not None


# ---------------------------------------------------------------- hull

def _certified_extreme(gens: Sequence[Expr]) -> set[int]:
    """Indices of generators that uniquely maximise or minimise some linear functional."""
    atoms = sorted({a for g in gens for a in g.support}, key=_atom_key)
    cols = [[mpq(g[a]) for g in gens] for a in atoms]
    found: set[int] = set()

    def scan(vals):
        hi = max(vals)
        lo = min(vals)
        his = [i for i, v in enumerate(vals) if v == hi]
        los = [i for i, v in enumerate(vals) if v == lo]
        if len(his) == 1:
            found.add(his[0])
        if len(los) == 1:
            found.add(los[0])

    def combine(weights):
        vals = [mpq(0)] * len(gens)
        for w, col in zip(weights, cols):
            if w:
                vals = [v + w * c for v, c in zip(vals, col)]
        return vals

    for col in cols:
        scan(col)
    if atoms:
        scan(combine([1] * len(atoms)))
        rng = random.Random(len(atoms) * 7919 + len(gens))
        for _ in range(2 * len(atoms) + 2):
            scan(combine([rng.randint(-9, 9) for _ in atoms]))
    return found


def hull(gens: Iterable[Expr]) -> ConvexSet:
    """Canonical V-representation of the convex hull of ``gens``.

    Redundant generators (convex combinations of the others) are removed;
    the survivors are sorted.
    """
    pts = sorted(set(gens), key=lambda g: g.terms)
    if not pts:
        raise ValueError("convex hull of an empty family")
    if len(pts) <= 2:
        return ConvexSet(tuple(pts))
    extreme = _certified_extreme(pts)
    alive = list(range(len(pts)))
    for i in range(len(pts)):
        if i in extreme:
            continue
        others = [pts[j] for j in alive if j != i]
        if member(pts[i], others):
            alive.remove(i)
    return ConvexSet(tuple(pts[j] for j in alive))


# ---------------------------------------------------------------- set algebra

def set_leq(c1: ConvexSet, c2: ConvexSet) -> bool:
    """Containment ``c1 ⊆ c2``."""
    if c1 == c2:
        return True
    return all(member(g, c2) for g in c1.generators)


def minkowski_sum(c1: ConvexSet, c2: ConvexSet) -> ConvexSet:
    return hull(a + b for a in c1.generators for b in c2.generators)


def scale_set(a, c: ConvexSet) -> ConvexSet:
    a = Fraction(a)
    if a < 0:
        raise ValueError("negative scalar")
    if a == 0:
        return ConvexSet.zero()
    return ConvexSet(tuple(g.scale(a) for g in c.generators))


def join_sets(*cs: ConvexSet) -> ConvexSet:
    if len(cs) == 1:
        return cs[0]
    return hull(g for c in cs for g in c.generators)


def linear_image(c: ConvexSet, f: Callable[[Atom], Atom | None]) -> ConvexSet:
    """Image of ``c`` under the linear extension of an atom map (None kills the atom)."""
    return hull(g.map_atoms(f) for g in c.generators)


def weighted_sum(terms: Sequence[tuple[Fraction, ConvexSet]]) -> ConvexSet:
    """``sum(a_i * C_i)`` as a Minkowski sum, pruned after every addition."""
    acc = ConvexSet.zero()
    for a, c in terms:
        scaled = [g.scale(a) for g in c.generators]
        if len(scaled) == 1:
            # a translate of a canonical set is canonical up to order
            shift = scaled[0]
            acc = ConvexSet(tuple(sorted((p + shift for p in acc.generators), key=lambda g: g.terms)))
        elif len(acc) == 1:
            base = acc.generators[0]
            acc = ConvexSet(tuple(sorted((base + q for q in scaled), key=lambda g: g.terms)))
        else:
            acc = hull(p + q for p in acc.generators for q in scaled)
    return acc
