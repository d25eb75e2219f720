"""Independent reference constructions used to cross-check the library.

Nothing here calls the saturation code: expressions are built directly
from the inductive rules for weak arrows and weak combined transitions.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from weaksat.convex import ZERO, Expr
from weaksat.lts import TAU
from weaksat.segala import SegalaSystem

WEIGHTS = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1))


def rand_frac(rng: random.Random, max_den: int = 6) -> Fraction:
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(0, d), d)


def rand_convex_weights(rng: random.Random, k: int, max_den: int = 6) -> list[Fraction]:
    """``k`` non-negative rationals summing to one."""
    d = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, d) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return [Fraction(p, d) for p in parts]


def beta_step(s: SegalaSystem, atom) -> list[Expr]:
    """Generators of one step of ``(σ, x)`` in the lifted system, written out by hand.

    ``(τ, x)`` may take any step of ``x``; ``(σ, x)`` with σ visible may only
    take τ-steps, which are relabelled σ.  ``0`` is always available.
    """
    lab, x = atom
    gens = [ZERO]
    for step_lab, mu in s.steps[x]:
        if lab == TAU:
            gens.append(Expr.of({(step_lab, y): p for y, p in mu.probs}))
        elif step_lab == TAU:
            gens.append(Expr.of({(lab, y): p for y, p in mu.probs}))
    return gens


def random_weak_arrow(s: SegalaSystem, atom, n: int, rng: random.Random) -> Expr:
    """A random ψ with ``atom ⇒ⁿ ψ`` built from the inductive rules.

    ``a ⇒⁰ 1·a``; ``a ⇒ⁿ⁺¹ p·Σ rᵢψᵢ + (1−p)·ψ'`` where ``Σ rᵢaᵢ`` is a point
    of one lifted step from ``a``, ``aᵢ ⇒ⁿ ψᵢ`` and ``a ⇒ⁿ ψ'``.
    """
    if n == 0:
        return Expr.unit(atom)
    gens = beta_step(s, atom)
    lam = rand_convex_weights(rng, len(gens))
    phi = ZERO
    for c, g in zip(lam, gens):
        phi = phi + g.scale(c)
    p = rand_frac(rng)
    moved = ZERO
    for a_i, r_i in phi.terms:
        moved = moved + random_weak_arrow(s, a_i, n - 1, rng).scale(r_i)
    return moved.scale(p) + random_weak_arrow(s, atom, n - 1, rng).scale(1 - p)


def combined_steps(s: SegalaSystem, x: int, allowed: set[str]):
    """Combined steps of ``x`` (weights from ``WEIGHTS``) using only labels in ``allowed``."""
    row = [(lab, mu) for lab, mu in s.steps[x] if lab in allowed]
    if not row:
        return
    for ws in itertools.product(WEIGHTS, repeat=len(row)):
        if sum(ws) != 1:
            continue
        nu: dict = {}
        for w, (lab, mu) in zip(ws, row):
            for y, p in mu.probs:
                if w:
                    nu[(lab, y)] = nu.get((lab, y), Fraction(0)) + w * p
        yield nu


def random_leadsto(s: SegalaSystem, x: int, sigma: str, n: int, rng: random.Random):
    """A random μ with ``x ⇝σₙ μ`` (as a dict state → mass), or ``None`` if none was found."""
    if n == 0:
        return {x: Fraction(1)} if sigma == TAU else None
    options = list(combined_steps(s, x, {sigma, TAU}))
    rng.shuffle(options)
    for nu in options:
        mu: dict = {}
        ok = True
        for (lab, y), w in nu.items():
            nxt = TAU if lab == sigma else sigma
            sub = random_leadsto(s, y, nxt, n - 1, rng)
            if sub is None:
                ok = False
                break
            for z, q in sub.items():
                mu[z] = mu.get(z, Fraction(0)) + w * q
        if ok:
            return mu
    return None


def all_partitions(n: int):
    """Every set partition of ``range(n)``, as a list of class indices (restricted growth strings)."""
    def rec(i, keys, m):
        if i == n:
            yield list(keys)
            return
        for c in range(m + 1):
            keys.append(c)
            yield from rec(i + 1, keys, max(m, c + 1))
            keys.pop()
    yield from rec(0, [], 0)


def brute_weak_bisim(alpha) -> list[int]:
    """Largest weak bisimulation by naive greatest-fixpoint over pairs, on triples."""
    n = alpha.n
    tau = [set() for _ in range(n)]
    vis: dict = {}
    for x, lab, y in alpha.triples:
        if lab == TAU:
            tau[x].add(y)
        else:
            vis.setdefault(lab, [set() for _ in range(n)])[x].add(y)

    def closure(start):
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for v in tau[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    tc = [closure(x) for x in range(n)]

    def weak(x, lab):
        if lab == TAU:
            return tc[x]
        out = set()
        for u in tc[x]:
            for v in vis[lab][u]:
                out |= tc[v]
        return out

    def strong(x):
        out = [(TAU, y) for y in tau[x]]
        for lab, rows in vis.items():
            out += [(lab, y) for y in rows[x]]
        return out

    rel = {(x, y) for x in range(n) for y in range(n)}
    changed = True
    while changed:
        changed = False
        for x, y in list(rel):
            good = all(any((x2, y2) in rel for y2 in weak(y, lab)) for lab, x2 in strong(x)) and \
                all(any((x2, y2) in rel for x2 in weak(x, lab)) for lab, y2 in strong(y))
            if not good:
                rel.discard((x, y))
                changed = True
    keys = []
    for x in range(n):
        keys.append(min(y for y in range(n) if (x, y) in rel))
    return keys
