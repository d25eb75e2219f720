"""Finite relations as Kleisli arrows of the powerset monad.

A :class:`Relation` from ``X`` to ``Y`` stores, for every source index, the
set of related targets as an ``int`` bitmask.  States are dense indices;
name tables live with the systems that own them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .kernel import SaturationInstance

__all__ = ["Relation", "rel_compose", "rel_rtc", "rel_rtc_warshall", "scc", "RelInstance", "bits", "image"]


def bits(mask: int):
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def image(rows, mask: int) -> int:
    out = 0
    for i in bits(mask):
        out |= rows[i]
    return out


@dataclass(frozen=True)
class Relation:
    n_src: int
    n_dst: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n_src:
            raise ValueError("row count does not match the source carrier")
        limit = 1 << self.n_dst
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("target outside the codomain")

    @classmethod
    def from_pairs(cls, n_src: int, pairs: Iterable[tuple[int, int]], n_dst: int | None = None) -> "Relation":
        n_dst = n_src if n_dst is None else n_dst
        rows = [0] * n_src
        for x, y in pairs:
            if not (0 <= x < n_src and 0 <= y < n_dst):
                raise ValueError(f"pair {(x, y)} outside the carrier")
            rows[x] |= 1 << y
        return cls(n_src, n_dst, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "Relation":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def empty(cls, n_src: int, n_dst: int | None = None) -> "Relation":
        n_dst = n_src if n_dst is None else n_dst
        return cls(n_src, n_dst, (0,) * n_src)

    @classmethod
    def full(cls, n_src: int, n_dst: int | None = None) -> "Relation":
        n_dst = n_src if n_dst is None else n_dst
        return cls(n_src, n_dst, ((1 << n_dst) - 1,) * n_src)

    @classmethod
    def graph(cls, f: tuple[int, ...], n_dst: int) -> "Relation":
        """The relation of a function, i.e. its unit lift ``f#``."""
        return cls(len(f), n_dst, tuple(1 << y for y in f))

    @property
    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((x, y) for x, r in enumerate(self.rows) for y in bits(r))

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.rows[x] >> y & 1)

    def __or__(self, other: "Relation") -> "Relation":
        _check_same(self, other)
        return Relation(self.n_src, self.n_dst, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "Relation") -> bool:
        _check_same(self, other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def inverse(self) -> "Relation":
        rows = [0] * self.n_dst
        for x, r in enumerate(self.rows):
            for y in bits(r):
                rows[y] |= 1 << x
        return Relation(self.n_dst, self.n_src, tuple(rows))

    def is_symmetric(self) -> bool:
        return self.n_src == self.n_dst and self == self.inverse()

    def __len__(self):
        return sum(bin(r).count("1") for r in self.rows)


def _check_same(a: Relation, b: Relation):
    if (a.n_src, a.n_dst) != (b.n_src, b.n_dst):
        raise ValueError("relations over different carriers")


def rel_compose(s: Relation, f: Relation) -> Relation:
    """``s . f``: first ``f`` then ``s``."""
    if f.n_dst != s.n_src:
        raise ValueError(f"cannot compose: codomain {f.n_dst} vs domain {s.n_src}")
    srows = s.rows
    return Relation(f.n_src, s.n_dst, tuple(image(srows, r) for r in f.rows))


def scc(rows) -> tuple[list[list[int]], list[int]]:
    """Strongly connected components of a bitmask graph (iterative Tarjan).

    Components come out in reverse topological order: each one is listed
    after every component it can reach.
    """
    n = len(rows)
    index = [0] * n
    low = [0] * n
    on = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    comp_of = [-1] * n
    counter = 1
    for root in range(n):
        if index[root]:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on[root] = True
        work = [(root, bits(rows[root]))]
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if not index[w]:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on[w] = True
                    work.append((w, bits(rows[w])))
                elif on[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps, comp_of


def rel_rtc(r: Relation) -> Relation:
    """Reflexive-transitive closure.

    Reachability is propagated over the strongly connected components in
    reverse topological order, so each component's row is the union of its
    members and the rows of the components it steps into.
    """
    if r.n_src != r.n_dst:
        raise ValueError("closure needs an endo-relation")
    rows = r.rows
    comps, comp_of = scc(rows)
    reach = [0] * len(comps)
    for c, members in enumerate(comps):
        acc = 0
        out = 0
        for x in members:
            acc |= 1 << x
            out |= rows[x]
        seen = set()
        for y in bits(out & ~acc):
            d = comp_of[y]
            if d not in seen:
                seen.add(d)
                acc |= reach[d]
        reach[c] = acc
    return Relation(r.n_src, r.n_src, tuple(reach[comp_of[x]] for x in range(r.n_src)))


def rel_rtc_warshall(r: Relation) -> Relation:
    """Closure by Warshall's algorithm; quadratic in the carrier, kept as a reference."""
    if r.n_src != r.n_dst:
        raise ValueError("closure needs an endo-relation")
    rows = [row | (1 << i) for i, row in enumerate(r.rows)]
    n = r.n_src
    for k in range(n):
        kb = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & kb:
                rows[i] |= rk
    return Relation(n, n, tuple(rows))


class RelInstance(SaturationInstance):
    """Kleisli category of the powerset monad: relations under composition."""

    name = "rel"
    kleene = True

    def carrier(self, alpha: Relation) -> int:
        return alpha.n_src

    def compose(self, g: Relation, f: Relation) -> Relation:
        return rel_compose(g, f)

    def identity(self, n: int) -> Relation:
        return Relation.identity(n)

    def leq(self, f: Relation, g: Relation) -> bool:
        return f <= g

    def join(self, f: Relation, g: Relation) -> Relation:
        return f | g

    def bottom(self, n: int) -> Relation:
        return Relation.empty(n)

    def lift(self, f: tuple[int, ...], n_dst: int) -> Relation:
        return Relation.graph(f, n_dst)

    def random_on(self, rng: random.Random, n: int) -> Relation:
        density = rng.choice([0.1, 0.25, 0.5])
        return Relation.from_pairs(n, [(x, y) for x in range(n) for y in range(n) if rng.random() < density])

    def shrink(self, alpha: Relation):
        for x, y in sorted(alpha.pairs):
            rows = list(alpha.rows)
            rows[x] &= ~(1 << y)
            yield Relation(alpha.n_src, alpha.n_dst, tuple(rows))

    def describe(self, alpha: Relation) -> str:
        return f"Relation(n={alpha.n_src}, pairs={sorted(alpha.pairs)})"

    def difference(self, f: Relation, g: Relation) -> str:
        missing = sorted(f.pairs - g.pairs)
        return str(missing[0]) if missing else ""
