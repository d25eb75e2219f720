"""ε-NFAs as Kleisli arrows of ``P(Στ × Id + 1)``.

The extra point ``✓`` marks acceptance.  Composition follows the LTS
rule on transitions; ``✓`` survives from the first arrow, or is picked up
after a leading τ-step.  Weak traces are the visible words accepted when
τ is read as ε.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .kernel import SaturationInstance
from .lts import (
    TAU,
    Lts,
    largest_weak_bisim,
    lts_compose,
    lts_join,
    lts_leq,
    lts_unit,
    saturate_lts_direct,
)
from .rel import bits, rel_rtc

__all__ = [
    "Nfa",
    "Automaton",
    "DeterminizationLimit",
    "NfaInstance",
    "nfa_compose",
    "nfa_unit",
    "saturate_nfa",
    "behaviour_language",
    "weak_traces",
    "wtrace_equiv",
    "wtrace_distinguish",
    "enumerate_weak_traces",
    "nfa_as_lts",
    "random_nfa",
    "language_distinguish",
    "languages_equal",
    "SUBSET_CAP",
]

SUBSET_CAP = 1 << 16


class DeterminizationLimit(RuntimeError):
    pass


@dataclass(frozen=True)
class Nfa:
    """Transitions plus a bitmask of source states carrying ``✓``."""

    trans: Lts
    accepting: int = 0

    def __post_init__(self):
        if self.accepting < 0 or self.accepting >> self.trans.n_src:
            raise ValueError("accepting state outside the carrier")

    @classmethod
    def from_triples(cls, n: int, triples, accepting: Iterable[int] = (), visible: Iterable[str] = (), **meta) -> "Nfa":
        acc = 0
        for x in accepting:
            if not 0 <= x < n:
                raise ValueError(f"accepting state {x} outside the carrier")
            acc |= 1 << x
        return cls(Lts.from_triples(n, triples, visible, **meta), acc)

    @property
    def n(self) -> int:
        return self.trans.n_src

    @property
    def visible(self) -> frozenset[str]:
        return self.trans.visible

    @property
    def accepting_states(self) -> list[int]:
        return list(bits(self.accepting))

    def is_accepting(self, x: int) -> bool:
        return bool(self.accepting >> x & 1)

    @property
    def names(self):
        return self.trans.names

    @property
    def initial(self) -> int:
        return self.trans.initial


def nfa_unit(n: int, visible: Iterable[str] = ()) -> Nfa:
    return Nfa(lts_unit(n, visible), 0)


def nfa_compose(g: Nfa, f: Nfa) -> Nfa:
    """``g · f``: transitions compose as for LTSs; ``✓ ∈ f(x)`` or ``x →τ y`` with ``✓ ∈ g(y)``."""
    trans = lts_compose(g.trans, f.trans)
    acc = f.accepting
    for x, r in enumerate(f.trans.rows(TAU)):
        if r & g.accepting:
            acc |= 1 << x
    return Nfa(trans, acc)


def saturate_nfa(alpha: Nfa) -> Nfa:
    """Closed form: weak steps over all of Στ, and ``✓`` wherever τ* reaches acceptance."""
    trans = alpha.trans
    if trans.n_src != trans.n_dst:
        raise ValueError("expected an endomorphism")
    tstar = rel_rtc(trans.relation(TAU)).rows
    acc = 0
    for x, r in enumerate(tstar):
        if r & alpha.accepting:
            acc |= 1 << x
    return Nfa(saturate_lts_direct(trans), acc)


# ---------------------------------------------------------------- languages

@dataclass(frozen=True)
class Automaton:
    """A finite automaton without ε-moves, started from a set of states.

    ``delta`` maps each letter to one successor bitmask per state.
    """

    n: int
    letters: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    start: int
    accept: int
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def step(self, mask: int, k: int) -> int:
        rows = self.delta[k]
        out = 0
        for x in bits(mask):
            out |= rows[x]
        return out

    def accepts(self, word: Sequence[str]) -> bool:
        index = {a: k for k, a in enumerate(self.letters)}
        cur = self.start
        for a in word:
            if a not in index:
                return False
            cur = self.step(cur, index[a])
            if not cur:
                return False
        return bool(cur & self.accept)

    def restrict(self, letters: Iterable[str]) -> "Automaton":
        """Same automaton with every letter outside ``letters`` removed."""
        keep = [k for k, a in enumerate(self.letters) if a in set(letters)]
        return Automaton(self.n, tuple(self.letters[k] for k in keep), tuple(self.delta[k] for k in keep),
                         self.start, self.accept, self.names)

    def determinize(self, cap: int = SUBSET_CAP) -> "Automaton":
        """Subset construction over reachable subsets; the result has singleton start."""
        index = {self.start: 0}
        order = [self.start]
        rows: list[list[int]] = [[] for _ in self.letters]
        i = 0
        while i < len(order):
            cur = order[i]
            for k in range(len(self.letters)):
                nxt = self.step(cur, k)
                j = index.get(nxt)
                if j is None:
                    if len(order) >= cap:
                        raise DeterminizationLimit(f"more than {cap} subset states")
                    j = index[nxt] = len(order)
                    order.append(nxt)
                rows[k].append(1 << j)
            i += 1
        acc = 0
        for j, s in enumerate(order):
            if s & self.accept:
                acc |= 1 << j
        return Automaton(len(order), self.letters, tuple(tuple(r) for r in rows), 1, acc)

    def words(self, max_len: int) -> set[tuple[str, ...]]:
        """Accepted words of length at most ``max_len``."""
        out = set()
        frontier = [((), self.start)]
        for depth in range(max_len + 1):
            nxt = []
            for w, cur in frontier:
                if cur & self.accept:
                    out.add(w)
                if depth < max_len:
                    for k, a in enumerate(self.letters):
                        s = self.step(cur, k)
                        if s:
                            nxt.append((w + (a,), s))
            frontier = nxt
        return out

    def to_nfa(self) -> Nfa:
        """Plain NFA over the same states; several start states become τ-steps from a fresh one."""
        triples = [(x, a, y) for k, a in enumerate(self.letters) for x in range(self.n) for y in bits(self.delta[k][x])]
        starts = list(bits(self.start))
        letters = [a for a in self.letters if a != TAU]
        if len(starts) == 1:
            return Nfa.from_triples(self.n, triples, bits(self.accept), letters, initial=starts[0], names=self.names)
        fresh = self.n
        triples += [(fresh, TAU, s) for s in starts]
        names = (self.names + ("start",)) if self.names else None
        return Nfa.from_triples(self.n + 1, triples, bits(self.accept), letters, initial=fresh, names=names)


def language_distinguish(a: Automaton, b: Automaton, cap: int = SUBSET_CAP) -> tuple[str, ...] | None:
    """Breadth-first Hopcroft–Karp check on the determinized automata.

    Returns a word accepted by exactly one side, or None when the languages
    coincide.
    """
    letters = tuple(sorted(set(a.letters) | set(b.letters)))
    da = _align(a, letters).determinize(cap)
    db = _align(b, letters).determinize(cap)
    parent: dict = {}

    def find(u):
        root = u
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(u, u) != root:
            parent[u], u = root, parent[u]
        return root

    queue = deque([(0, 0, ())])
    parent[("a", 0)] = ("b", 0)
    while queue:
        p, q, word = queue.popleft()
        if bool(da.accept >> p & 1) != bool(db.accept >> q & 1):
            return word
        for k, letter in enumerate(letters):
            p2 = da.delta[k][p].bit_length() - 1
            q2 = db.delta[k][q].bit_length() - 1
            ra, rb = find(("a", p2)), find(("b", q2))
            if ra != rb:
                parent[ra] = rb
                queue.append((p2, q2, word + (letter,)))
    return None


def _align(a: Automaton, letters: tuple[str, ...]) -> Automaton:
    index = {x: k for k, x in enumerate(a.letters)}
    empty = (0,) * a.n
    delta = tuple(a.delta[index[x]] if x in index else empty for x in letters)
    return Automaton(a.n, letters, delta, a.start, a.accept, a.names)


def languages_equal(a: Automaton, b: Automaton) -> bool:
    return language_distinguish(a, b) is None


def _check_state(alpha: Nfa, x: int):
    if not 0 <= x < alpha.n:
        raise ValueError(f"unknown state {x}")


def behaviour_language(alpha: Nfa, x: int) -> Automaton:
    """Words over Στ (τ an ordinary letter) leading from ``x`` to acceptance."""
    _check_state(alpha, x)
    letters = (TAU,) + tuple(sorted(alpha.visible))
    delta = tuple(alpha.trans.rows(a) for a in letters)
    return Automaton(alpha.n, letters, delta, 1 << x, alpha.accepting, alpha.names)


def weak_traces(alpha: Nfa, x: int) -> Automaton:
    """τ-eliminated automaton for the weak traces of ``x``."""
    _check_state(alpha, x)
    sat = saturate_nfa(alpha)
    letters = tuple(sorted(alpha.visible))
    delta = tuple(sat.trans.rows(a) for a in letters)
    return Automaton(alpha.n, letters, delta, 1 << x, sat.accepting, alpha.names)


def wtrace_distinguish(alpha: Nfa, x: int, y: int) -> tuple[str, ...] | None:
    """A weak trace of exactly one of ``x`` and ``y``, or None."""
    return language_distinguish(weak_traces(alpha, x), weak_traces(alpha, y))


def wtrace_equiv(alpha: Nfa, x: int, y: int) -> bool:
    return wtrace_distinguish(alpha, x, y) is None


def enumerate_weak_traces(alpha: Nfa, x: int, max_len: int) -> set[tuple[str, ...]]:
    """Weak traces of length at most ``max_len`` by explicit path search."""
    _check_state(alpha, x)
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    steps = [alpha.trans.steps(s) for s in range(alpha.n)]
    closure_memo: dict[int, frozenset[int]] = {}

    def closure(s):
        got = closure_memo.get(s)
        if got is None:
            seen = {s}
            todo = [s]
            while todo:
                u = todo.pop()
                for lab, v in steps[u]:
                    if lab == TAU and v not in seen:
                        seen.add(v)
                        todo.append(v)
            got = closure_memo[s] = frozenset(seen)
        return got

    memo: dict[tuple[int, int], frozenset] = {}

    def traces(s, k):
        key = (s, k)
        if key in memo:
            return memo[key]
        out = set()
        reach = closure(s)
        if any(alpha.is_accepting(u) for u in reach):
            out.add(())
        if k > 0:
            for u in reach:
                for lab, v in steps[u]:
                    if lab != TAU:
                        out.update((lab,) + w for w in traces(v, k - 1))
        memo[key] = frozenset(out)
        return memo[key]

    return set(traces(x, max_len))


ACCEPT_LABEL = "accept"


def nfa_as_lts(alpha: Nfa, marker: str = ACCEPT_LABEL) -> Lts:
    """Forget acceptance into a visible self-loop labelled ``marker``."""
    if marker in alpha.visible:
        raise ValueError(f"marker label {marker!r} already used")
    triples = alpha.trans.triples + [(x, marker, x) for x in bits(alpha.accepting)]
    return Lts.from_triples(alpha.n, triples, alpha.visible | {marker})


def weak_bisim_classes(alpha: Nfa):
    return largest_weak_bisim(nfa_as_lts(alpha))


# ---------------------------------------------------------------- kernel instance

class NfaInstance(SaturationInstance):
    name = "nfa"
    kleene = True
    bottom_absorbs = False  # ✓ of f survives 0 . f

    def __init__(self, visible: Iterable[str] = ("a", "b")):
        self.visible = frozenset(visible)

    def carrier(self, alpha: Nfa) -> int:
        return alpha.n

    def compose(self, g, f):
        return nfa_compose(g, f)

    def identity(self, n):
        return nfa_unit(n, self.visible)

    def leq(self, f, g):
        return lts_leq(f.trans, g.trans) and not f.accepting & ~g.accepting

    def join(self, f, g):
        return Nfa(lts_join(f.trans, g.trans), f.accepting | g.accepting)

    def bottom(self, n):
        return Nfa(Lts.make(n, {}, self.visible), 0)

    def lift(self, f, n_dst):
        return Nfa(Lts.make(len(f), {TAU: [1 << y for y in f]}, self.visible, n_dst), 0)

    def random_on(self, rng: random.Random, n: int) -> Nfa:
        return random_nfa(rng, n, self.visible)

    def shrink(self, alpha: Nfa):
        for x in bits(alpha.accepting):
            yield Nfa(alpha.trans, alpha.accepting & ~(1 << x))
        for t in alpha.trans.triples:
            rest = [u for u in alpha.trans.triples if u != t]
            yield Nfa(Lts.from_triples(alpha.n, rest, alpha.visible), alpha.accepting)

    def describe(self, alpha: Nfa) -> str:
        return f"Nfa(n={alpha.n}, {alpha.trans.triples}, accepting={alpha.accepting_states})"

    def difference(self, f, g):
        for x, lab, y in f.trans.triples:
            if not g.trans.rows(lab)[x] >> y & 1:
                return f"({x},{lab},{y})"
        extra = f.accepting & ~g.accepting
        return f"accept {extra.bit_length() - 1}" if extra else ""


def random_nfa(rng: random.Random, n: int, visible: Sequence[str] = ("a", "b"), density: float | None = None) -> Nfa:
    labels = (TAU,) + tuple(sorted(visible))
    if density is None:
        density = rng.choice([0.05, 0.15, 0.3])
    triples = [(x, lab, y) for x in range(n) for lab in labels for y in range(n) if rng.random() < density]
    acc = [x for x in range(n) if rng.random() < 0.3]
    return Nfa.from_triples(n, triples, acc, visible)
