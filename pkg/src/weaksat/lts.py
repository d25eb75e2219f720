"""Labelled transition systems as Kleisli arrows of ``P(Στ × Id)``.

Composition fuses a τ-step with any step and drops visible-visible pairs,
so powers of ``1 ∨ α`` accumulate exactly the weak transitions.  This
module computes saturation both through the monad on ``Στ × X`` and
directly as ``(→τ)* ∘ →σ ∘ (→τ)*``, and decides weak bisimilarity as
strong bisimilarity of the saturated system.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .kernel import SaturationError, SaturationInstance
from .rel import Relation, bits, image, rel_compose, rel_rtc, scc

__all__ = [
    "TAU",
    "Alphabet",
    "Lts",
    "LtsMorphism",
    "Partition",
    "LtsInstance",
    "MilnerResult",
    "lts_compose",
    "lts_unit",
    "saturate_lts",
    "saturate_lts_monadic",
    "saturate_lts_direct",
    "weak_word_step",
    "check_milner_weak_bisim",
    "largest_strong_bisim",
    "largest_weak_bisim",
    "largest_weak_bisim_by_words",
    "quotient_lts",
    "random_lts",
    "disjoint_union",
    "word_relations",
    "check_milner_weak_to_weak",
    "lts_join",
    "lts_leq",
]

TAU = "tau"


@dataclass(frozen=True)
class Alphabet:
    visible: frozenset[str]

    def __post_init__(self):
        if TAU in self.visible:
            raise ValueError("'tau' is reserved for the silent label")

    @property
    def labels(self) -> tuple[str, ...]:
        return (TAU,) + tuple(sorted(self.visible))


def _normalise(succ: Mapping[str, Sequence[int]]) -> tuple[tuple[str, tuple[int, ...]], ...]:
    return tuple(sorted((lab, tuple(rows)) for lab, rows in succ.items() if any(rows)))


@dataclass(frozen=True)
class Lts:
    """A Kleisli arrow ``X -> P(Στ × Y)``; an LTS when ``n_src == n_dst``.

    ``succ`` maps each label with at least one transition to a row of
    target bitmasks, one per source state.  ``names`` and ``initial`` are
    presentation metadata and do not take part in equality.
    """

    n_src: int
    n_dst: int
    visible: frozenset[str]
    succ: tuple[tuple[str, tuple[int, ...]], ...]
    names: tuple[str, ...] | None = field(default=None, compare=False)
    initial: int = field(default=0, compare=False)

    def __post_init__(self):
        Alphabet(self.visible)
        limit = 1 << self.n_dst
        for lab, rows in self.succ:
            if lab != TAU and lab not in self.visible:
                raise ValueError(f"label {lab!r} not in the alphabet")
            if len(rows) != self.n_src:
                raise ValueError("row count does not match the source carrier")
            if any(r < 0 or r >= limit for r in rows):
                raise ValueError("target outside the codomain")

    @classmethod
    def make(cls, n_src: int, succ: Mapping[str, Sequence[int]], visible: Iterable[str] = (),
             n_dst: int | None = None, **meta) -> "Lts":
        visible = frozenset(visible) | {lab for lab in succ if lab != TAU}
        return cls(n_src, n_src if n_dst is None else n_dst, visible, _normalise(succ), **meta)

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[tuple[int, str, int]], visible: Iterable[str] = (),
                     n_dst: int | None = None, **meta) -> "Lts":
        n_dst = n if n_dst is None else n_dst
        succ: dict[str, list[int]] = {}
        for x, lab, y in triples:
            if not (0 <= x < n and 0 <= y < n_dst):
                raise ValueError(f"transition {(x, lab, y)} outside the carrier")
            succ.setdefault(lab, [0] * n)[x] |= 1 << y
        return cls.make(n, succ, visible, n_dst, **meta)

    @property
    def n(self) -> int:
        return self.n_src

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.visible)

    @cached_property
    def _succ(self) -> dict[str, tuple[int, ...]]:
        return dict(self.succ)

    def rows(self, label: str) -> tuple[int, ...]:
        return self._succ.get(label, (0,) * self.n_src)

    def relation(self, label: str) -> Relation:
        return Relation(self.n_src, self.n_dst, self.rows(label))

    def steps(self, x: int) -> list[tuple[str, int]]:
        return [(lab, y) for lab, rows in self.succ for y in bits(rows[x])]

    @property
    def triples(self) -> list[tuple[int, str, int]]:
        return sorted((x, lab, y) for lab, rows in self.succ for x in range(self.n_src) for y in bits(rows[x]))

    def __len__(self):
        return sum(bin(r).count("1") for _, rows in self.succ for r in rows)

    def with_meta(self, names=None, initial=None) -> "Lts":
        return Lts(self.n_src, self.n_dst, self.visible, self.succ,
                   names=self.names if names is None else tuple(names),
                   initial=self.initial if initial is None else initial)

    def name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)


LtsMorphism = Lts


def lts_unit(n: int, visible: Iterable[str] = ()) -> Lts:
    """``e_X(x) = {(τ, x)}``."""
    return Lts.make(n, {TAU: [1 << i for i in range(n)]}, visible)


def lts_compose(g: Lts, f: Lts) -> Lts:
    """Kleisli composite ``g · f`` (``f`` first).

    ``(σ, z)`` is in ``(g·f)(x)`` iff ``x →σ y →τ z`` in f then g, or
    ``x →τ y →σ z``.
    """
    if f.n_dst != g.n_src:
        raise ValueError(f"cannot compose: codomain {f.n_dst} vs domain {g.n_src}")
    if f.visible != g.visible:
        raise ValueError("cannot compose arrows over different alphabets")
    f_tau = f.rows(TAU)
    g_tau = g.rows(TAU)
    out: dict[str, list[int]] = {}
    for lab in set(f._succ) | set(g._succ):
        fl = f.rows(lab)
        gl = g.rows(lab)
        rows = []
        for x in range(f.n_src):
            r = image(g_tau, fl[x])
            if lab != TAU:
                r |= image(gl, f_tau[x])
            rows.append(r)
        out[lab] = rows
    return Lts.make(f.n_src, out, f.visible, g.n_dst)


def lts_join(f: Lts, g: Lts) -> Lts:
    if (f.n_src, f.n_dst, f.visible) != (g.n_src, g.n_dst, g.visible):
        raise ValueError("join of arrows with different types")
    out = {}
    for lab in set(f._succ) | set(g._succ):
        out[lab] = [a | b for a, b in zip(f.rows(lab), g.rows(lab))]
    return Lts.make(f.n_src, out, f.visible, f.n_dst)


def lts_leq(f: Lts, g: Lts) -> bool:
    for lab, rows in f.succ:
        other = g.rows(lab)
        if any(a & ~b for a, b in zip(rows, other)):
            return False
    return True


# ---------------------------------------------------------------- saturation

def saturate_lts_monadic(alpha: Lts) -> Lts:
    """``(m_X · Σ̄τ α)* · e_X``: closure of the label-collapsing relation on ``Στ × X``."""
    _check_endo(alpha)
    labels = alpha.alphabet.labels
    n = alpha.n
    idx = {lab: k for k, lab in enumerate(labels)}
    tau_rows = alpha.rows(TAU)
    rows = [0] * (len(labels) * n)
    for lab, k in idx.items():
        base = k * n
        for x in range(n):
            # (σ, x) → (σ, x') whenever x →τ x'
            r = tau_rows[x] << base
            if lab == TAU:
                # (τ, x) → (σ', x') for every step x →σ' x'
                for lab2, rows2 in alpha.succ:
                    if lab2 != TAU:
                        r |= rows2[x] << (idx[lab2] * n)
            rows[base + x] = r
    beta = Relation(len(rows), len(rows), tuple(rows))
    star = rel_rtc(beta)
    mask = (1 << n) - 1
    out = {}
    for lab, k in idx.items():
        out[lab] = [(star.rows[x] >> (k * n)) & mask for x in range(n)]
    return Lts.make(n, out, alpha.visible, names=alpha.names, initial=alpha.initial)


def saturate_lts_direct(alpha: Lts) -> Lts:
    """``⇒τ = (→τ)*`` and ``⇒σ = (→τ)* ∘ →σ ∘ (→τ)*``."""
    _check_endo(alpha)
    n = alpha.n
    tau = alpha.rows(TAU)
    tstar = rel_rtc(alpha.relation(TAU)).rows
    comps, comp_of = scc(tau)
    out = {TAU: list(tstar)}
    for lab, rows in alpha.succ:
        if lab == TAU:
            continue
        # ⇒σ is constant on a τ-component: its own σ-steps closed under τ*,
        # plus whatever the τ-successor components can already do.
        weak = [0] * len(comps)
        for c, members in enumerate(comps):
            acc = 0
            for x in members:
                acc |= image(tstar, rows[x])
                for y in bits(tau[x]):
                    d = comp_of[y]
                    if d != c:
                        acc |= weak[d]
            weak[c] = acc
        out[lab] = [weak[comp_of[x]] for x in range(n)]
    return Lts.make(n, out, alpha.visible, names=alpha.names, initial=alpha.initial)


def saturate_lts(alpha: Lts) -> Lts:
    """Weak-transition system of ``alpha``, cross-checked along both routes."""
    a = saturate_lts_monadic(alpha)
    b = saturate_lts_direct(alpha)
    if a != b:
        raise SaturationError("monadic and direct saturation disagree")
    return a


def _check_endo(alpha: Lts):
    if alpha.n_src != alpha.n_dst:
        raise ValueError("expected an LTS (an endomorphism)")


def weak_word_step(alpha: Lts, word: Sequence[str]) -> Relation:
    """``⇒s``: τ-closures interleaved with the letters of ``word``."""
    _check_endo(alpha)
    if isinstance(word, str):
        word = [word] if word else []
    tstar = rel_rtc(alpha.relation(TAU))
    rel = tstar
    for lab in word:
        if lab == TAU or lab not in alpha.visible:
            raise ValueError(f"unknown visible label {lab!r}")
        rel = rel_compose(tstar, rel_compose(alpha.relation(lab), rel))
    return rel


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class Partition:
    """An equivalence on ``range(n)`` as a class index per state.

    Class indices are contiguous and numbered by lowest member.
    """

    class_of: tuple[int, ...]

    def __post_init__(self):
        seen = -1
        for c in self.class_of:
            if c > seen + 1:
                raise ValueError("class indices must be assigned by lowest member")
            seen = max(seen, c)

    @classmethod
    def from_keys(cls, keys: Sequence) -> "Partition":
        """States with equal keys share a class."""
        ids: dict = {}
        return cls(tuple(ids.setdefault(k, len(ids)) for k in keys))

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> "Partition":
        key = [None] * n
        for i, cl in enumerate(classes):
            for x in cl:
                if key[x] is not None:
                    raise ValueError(f"state {x} in two classes")
                key[x] = i
        if any(k is None for k in key):
            raise ValueError("classes do not cover the carrier")
        return cls.from_keys(key)

    @classmethod
    def finest(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def coarsest(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.class_of)

    @property
    def num_classes(self) -> int:
        return max(self.class_of) + 1 if self.class_of else 0

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for x, c in enumerate(self.class_of):
            out[c].append(x)
        return out

    def same(self, x: int, y: int) -> bool:
        return self.class_of[x] == self.class_of[y]

    def masks(self) -> list[int]:
        out = [0] * self.num_classes
        for x, c in enumerate(self.class_of):
            out[c] |= 1 << x
        return out

    def as_relation(self) -> Relation:
        masks = self.masks()
        return Relation(self.n, self.n, tuple(masks[c] for c in self.class_of))

    def merge(self, i: int, j: int) -> "Partition":
        return Partition.from_keys([i if c == j else c for c in self.class_of])

    def refines(self, other: "Partition") -> bool:
        """Every class of ``self`` lies inside a class of ``other``."""
        return all(other.same(x, cl[0]) for cl in self.classes() for x in cl)


def _refine(n: int, signature, start: Partition | None = None) -> Partition:
    part = start or Partition.coarsest(n)
    while True:
        keys = [(part.class_of[x], signature(x, part)) for x in range(n)]
        nxt = Partition.from_keys(keys)
        if nxt.num_classes == part.num_classes:
            return part
        part = nxt


def largest_strong_bisim(alpha: Lts) -> Partition:
    """Coarsest strong bisimulation by signature refinement."""
    _check_endo(alpha)
    n = alpha.n
    labelled = alpha.succ
    cache: dict = {}  # per-partition class masks and memoised images

    def signature(x, part):
        masks = cache.get(id(part))
        if masks is None:
            cache.clear()
            masks = cache[id(part)] = (part.masks(), {})
        cmasks, memo = masks
        sig = []
        for lab, rows in labelled:
            r = rows[x]
            if not r:
                continue
            key = (lab, r)
            hit = memo.get(key)
            if hit is None:
                if bin(r).count("1") < len(cmasks):
                    hit = frozenset(part.class_of[y] for y in bits(r))
                else:
                    hit = frozenset(c for c, m in enumerate(cmasks) if m & r)
                memo[key] = hit
            sig.append((lab, hit))
        return tuple(sig)

    return _refine(n, signature)


def largest_weak_bisim(alpha: Lts) -> Partition:
    """Weak bisimilarity: strong bisimilarity of the saturated system."""
    return largest_strong_bisim(saturate_lts(alpha))


def word_relations(alpha: Lts, max_len: int) -> list[Relation]:
    """All distinct ``⇒s`` for words ``s`` of length at most ``max_len``."""
    _check_endo(alpha)
    tstar = rel_rtc(alpha.relation(TAU))
    letters = [rel_compose(tstar, alpha.relation(lab)) for lab in sorted(alpha.visible)]
    seen = {tstar}
    frontier = [tstar]
    for _ in range(max_len):
        nxt = []
        for rel in frontier:
            for step in letters:
                r = rel_compose(step, rel)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
        if not frontier:
            break
    return sorted(seen, key=lambda r: r.rows)


def largest_weak_bisim_by_words(alpha: Lts, max_len: int | None = None) -> Partition:
    """Coarsest partition passing the word-step transfer condition.

    Words range over ``Σ*`` up to ``max_len`` (default: number of states).
    """
    n = alpha.n
    rels = word_relations(alpha, n if max_len is None else max_len)

    def signature(x, part):
        return tuple(frozenset(part.class_of[y] for y in bits(r.rows[x])) for r in rels)

    return _refine(n, signature)


@dataclass(frozen=True)
class MilnerResult:
    ok: bool
    witness: tuple[int, int, str, int] | None = None  # (x, y, label, x')

    def __bool__(self):
        return self.ok


def check_milner_weak_bisim(alpha: Lts, r: Relation | Partition, saturated: Lts | None = None) -> MilnerResult:
    """Single steps of one side matched by weak steps of the other, up to ``r``."""
    if isinstance(r, Partition):
        r = r.as_relation()
    if r.n_src != alpha.n or not r.is_symmetric():
        raise ValueError("relation must be symmetric on the carrier")
    sat = saturated or saturate_lts(alpha)
    for x in range(alpha.n):
        for y in bits(r.rows[x]):
            for lab, rows in alpha.succ:
                weak = sat.rows(lab)[y]
                for x2 in bits(rows[x]):
                    if not weak & r.rows[x2]:
                        return MilnerResult(False, (x, y, lab, x2))
    return MilnerResult(True)


def check_milner_weak_to_weak(alpha: Lts, r: Relation, saturated: Lts | None = None) -> bool:
    """The same transfer condition with weak steps on both sides."""
    if r.n_src != alpha.n or not r.is_symmetric():
        raise ValueError("relation must be symmetric on the carrier")
    sat = saturated or saturate_lts(alpha)
    for x in range(alpha.n):
        for y in bits(r.rows[x]):
            for lab, rows in sat.succ:
                weak = sat.rows(lab)[y]
                for x2 in bits(rows[x]):
                    if not weak & r.rows[x2]:
                        return False
    return True


def quotient_lts(alpha: Lts, p: Partition) -> Lts:
    """Class-level system: ``C →σ C'`` iff some member steps into ``C'``."""
    _check_endo(alpha)
    if p.n != alpha.n:
        raise ValueError("partition over a different carrier")
    k = p.num_classes
    out: dict[str, list[int]] = {}
    for lab, rows in alpha.succ:
        qrows = out.setdefault(lab, [0] * k)
        for x in range(alpha.n):
            for y in bits(rows[x]):
                qrows[p.class_of[x]] |= 1 << p.class_of[y]
    names = None
    if alpha.names:
        names = tuple("{" + ",".join(alpha.names[x] for x in cl) + "}" for cl in p.classes())
    return Lts.make(k, out, alpha.visible, names=names, initial=p.class_of[alpha.initial] if alpha.n else 0)


# ---------------------------------------------------------------- kernel instance

class LtsInstance(SaturationInstance):
    """Kleisli category of ``P(Στ × Id)`` over a fixed visible alphabet."""

    name = "lts"
    kleene = True

    def __init__(self, visible: Iterable[str] = ("a", "b")):
        self.visible = frozenset(visible)

    def carrier(self, alpha: Lts) -> int:
        return alpha.n_src

    def compose(self, g, f):
        return lts_compose(g, f)

    def identity(self, n):
        return lts_unit(n, self.visible)

    def leq(self, f, g):
        return lts_leq(f, g)

    def join(self, f, g):
        return lts_join(f, g)

    def bottom(self, n):
        return Lts.make(n, {}, self.visible)

    def lift(self, f, n_dst):
        return Lts.make(len(f), {TAU: [1 << y for y in f]}, self.visible, n_dst)

    def random_on(self, rng: random.Random, n: int) -> Lts:
        labels = (TAU,) + tuple(sorted(self.visible))
        density = rng.choice([0.05, 0.15, 0.3])
        triples = [(x, lab, y) for x in range(n) for lab in labels for y in range(n) if rng.random() < density]
        return Lts.from_triples(n, triples, self.visible)

    def shrink(self, alpha: Lts):
        for t in alpha.triples:
            yield Lts.from_triples(alpha.n, [u for u in alpha.triples if u != t], alpha.visible)

    def describe(self, alpha: Lts) -> str:
        return f"Lts(n={alpha.n}, {alpha.triples})"

    def difference(self, f, g):
        for x, lab, y in f.triples:
            if not g.rows(lab)[x] >> y & 1:
                return f"({x},{lab},{y})"
        return ""


def random_lts(rng: random.Random, n: int, n_trans: int, visible: Sequence[str] = ("a", "b", "c"),
               tau_weight: float | None = None) -> Lts:
    """``n_trans`` distinct random transitions over ``τ`` plus ``visible``."""
    labels = (TAU,) + tuple(visible)
    weights = None
    if tau_weight is not None:
        rest = (1 - tau_weight) / max(1, len(visible))
        weights = [tau_weight] + [rest] * len(visible)
    triples = set()
    cap = n * n * len(labels)
    while len(triples) < min(n_trans, cap):
        lab = rng.choices(labels, weights)[0] if weights else rng.choice(labels)
        triples.add((rng.randrange(n), lab, rng.randrange(n)))
    return Lts.from_triples(n, triples, visible)


def disjoint_union(*systems: Lts) -> Lts:
    """Side-by-side copy of several LTSs; states are renumbered consecutively."""
    triples = []
    names = []
    visible = set()
    offset = 0
    for s in systems:
        triples += [(x + offset, lab, y + offset) for x, lab, y in s.triples]
        names += [s.name(x) for x in range(s.n)]
        visible |= s.visible
        offset += s.n
    return Lts.from_triples(offset, triples, visible, names=tuple(names),
                            initial=systems[0].initial if systems else 0)
