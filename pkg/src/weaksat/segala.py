"""Simple Segala systems in the Kleisli category of ``CM(Στ × Id)``.

A state's behaviour becomes the convex set spanned by ``0`` and its steps,
each step read as the formal sum ``Σ μ(x')·(σ, x')``.  Composition of
CM-arrows pushes every point through the second arrow and sums the
resulting sets with the point's coefficients.  Weak transitions come from
the bounded chain ``(β ∨ 1)ⁿ`` with ``β = m · Σ̄τ α`` acting on atoms
``(σ, x)``; deciding a weak step is an LP over that chain's last stage.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .convex import (
    ZERO,
    ConvexSet,
    Expr,
    combination,
    hull,
    join_sets,
    linear_image,
    set_leq,
    weighted_sum,
)
from .kernel import SaturationInstance
from .lts import TAU, Alphabet, Partition

__all__ = [
    "Distribution",
    "SegalaSystem",
    "CmMorphism",
    "CmInstance",
    "SaturationStages",
    "WeakPolytope",
    "ProbBisimResult",
    "embed_segala",
    "cm_unit",
    "cm_compose",
    "cm_join",
    "cm_leq",
    "build_beta",
    "sigma_compose",
    "saturate_cm",
    "weak_sigma_polytope",
    "check_prob_weak_bisim",
    "largest_prob_weak_bisim",
    "check_coalgebraic_weak_bisim",
    "random_segala",
    "saturate_segala",
    "default_segala_depth",
]

Atom = Hashable


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class Distribution:
    """Finitely supported probability distribution over state indices."""

    probs: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if not self.probs:
            raise ValueError("empty distribution")
        if any(p <= 0 for _, p in self.probs):
            raise ValueError("probabilities must be positive")
        total = sum(p for _, p in self.probs)
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def of(cls, mapping: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]) -> "Distribution":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[int, Fraction] = {}
        for x, p in items:
            p = Fraction(p)
            if p:
                acc[x] = acc.get(x, Fraction(0)) + p
        return cls(tuple(sorted(acc.items())))

    @classmethod
    def dirac(cls, x: int) -> "Distribution":
        return cls(((x, Fraction(1)),))

    def __getitem__(self, x: int) -> Fraction:
        return dict(self.probs).get(x, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.probs)

    def as_expr(self, label: str) -> Expr:
        return Expr.of(((label, x), p) for x, p in self.probs)

    def class_masses(self, p: Partition) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for x, q in self.probs:
            c = p.class_of[x]
            out[c] = out.get(c, Fraction(0)) + q
        return out


@dataclass(frozen=True)
class SegalaSystem:
    """States ``0..n-1``, each with a finite set of ``(label, distribution)`` steps."""

    n: int
    visible: frozenset[str]
    steps: tuple[tuple[tuple[str, Distribution], ...], ...]
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        Alphabet(self.visible)
        if len(self.steps) != self.n:
            raise ValueError("one step list per state expected")
        for row in self.steps:
            for lab, mu in row:
                if lab != TAU and lab not in self.visible:
                    raise ValueError(f"label {lab!r} not in the alphabet")
                if any(not 0 <= x < self.n for x in mu.support):
                    raise ValueError("distribution leaves the state space")

    @classmethod
    def make(cls, n: int, steps: Mapping[int, Iterable[tuple[str, Distribution]]], visible: Iterable[str] = (),
             names: Sequence[str] | None = None) -> "SegalaSystem":
        rows = []
        labels = set(visible)
        for x in range(n):
            row = sorted(set(steps.get(x, ())), key=lambda s: (s[0], s[1].probs))
            labels.update(lab for lab, _ in row if lab != TAU)
            rows.append(tuple(row))
        return cls(n, frozenset(labels), tuple(rows), tuple(names) if names else None)

    @property
    def labels(self) -> tuple[str, ...]:
        return Alphabet(self.visible).labels

    def name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)

    def index(self, name: str) -> int:
        if self.names and name in self.names:
            return self.names.index(name)
        if name.isdigit() and int(name) < self.n:
            return int(name)
        raise KeyError(name)


def default_segala_depth(s: SegalaSystem) -> int:
    return 2 * s.n + 2


# ---------------------------------------------------------------- CM arrows

@dataclass(frozen=True)
class CmMorphism:
    """A Kleisli arrow of CM: each source atom mapped to a canonical convex set."""

    domain: tuple
    values: tuple[ConvexSet, ...]

    def __post_init__(self):
        if len(self.domain) != len(self.values):
            raise ValueError("one value per source atom expected")

    @cached_property
    def _index(self) -> dict:
        return {a: i for i, a in enumerate(self.domain)}

    def __call__(self, a) -> ConvexSet:
        try:
            return self.values[self._index[a]]
        except KeyError:
            raise KeyError(f"atom {a!r} outside the domain") from None

    def items(self):
        return zip(self.domain, self.values)

    def restrict(self, atoms: Sequence) -> "CmMorphism":
        return CmMorphism(tuple(atoms), tuple(self(a) for a in atoms))


def cm_unit(domain: Sequence) -> CmMorphism:
    return CmMorphism(tuple(domain), tuple(ConvexSet.point(Expr.unit(a)) for a in domain))


def cm_compose(g: CmMorphism, f: CmMorphism) -> CmMorphism:
    """``g · f``: for each point φ of ``f(x)``, the sum ``Σ φ(y)·g(y)``, joined over φ."""
    values = []
    for x, fx in f.items():
        parts = []
        for phi in fx.generators:
            parts.append(weighted_sum([(c, g(y)) for y, c in phi.terms]))
        values.append(join_sets(*parts) if len(parts) > 1 else parts[0])
    return CmMorphism(f.domain, tuple(values))


def cm_join(f: CmMorphism, g: CmMorphism) -> CmMorphism:
    _same_domain(f, g)
    return CmMorphism(f.domain, tuple(join_sets(a, b) for a, b in zip(f.values, g.values)))


def cm_leq(f: CmMorphism, g: CmMorphism) -> bool:
    _same_domain(f, g)
    return all(set_leq(a, b) for a, b in zip(f.values, g.values))


def _same_domain(f, g):
    if f.domain != g.domain:
        raise ValueError("arrows over different domains")


def embed_segala(s: SegalaSystem) -> CmMorphism:
    """``x ↦ hull({0} ∪ {Σ μ(x')·(σ, x') : x →σ μ})``."""
    values = []
    for row in s.steps:
        values.append(hull([ZERO] + [mu.as_expr(lab) for lab, mu in row]))
    return CmMorphism(tuple(range(s.n)), tuple(values))


def _collapse(sigma: str) -> Callable[[tuple], tuple | None]:
    """The multiplication of Σ̄τ, with the outer label fixed to ``sigma``."""
    if sigma == TAU:
        return lambda a: a

    def f(atom):
        lab, x = atom
        return (sigma, x) if lab == TAU else None

    return f


def sigma_compose(g: CmMorphism, f: CmMorphism, labels: Sequence[str] | None = None) -> CmMorphism:
    """Composition in the Kleisli category of ``CM(Στ × Id)``: ``f`` first."""
    if labels is None:
        labels = sorted({a[0] for v in f.values for a in v.atoms()} | {TAU})
    domain, values = [], []
    for lab in labels:
        h = _collapse(lab)
        for y, v in g.items():
            domain.append((lab, y))
            values.append(v if lab == TAU else linear_image(v, h))
    return cm_compose(CmMorphism(tuple(domain), tuple(values)), f)


def build_beta(alpha: CmMorphism, labels: Sequence[str]) -> CmMorphism:
    """``β = m · Σ̄τ α`` on atoms ``(σ, x)``.

    ``β(τ, x) = α(x)``; for visible σ the image of ``α(x)`` relabels τ-atoms to
    σ and sends visible atoms to ``0``.
    """
    labels = list(labels)
    if TAU not in labels:
        labels = [TAU] + labels
    labels = [TAU] + sorted(lab for lab in labels if lab != TAU)
    domain, values = [], []
    for lab in labels:
        f = _collapse(lab)
        for x, v in alpha.items():
            domain.append((lab, x))
            values.append(v if lab == TAU else linear_image(v, f))
    return CmMorphism(tuple(domain), tuple(values))


# ---------------------------------------------------------------- kernel instance

class CmInstance(SaturationInstance):
    """Endomorphisms of CM; joins exist only for non-empty families, so there is no bottom."""

    name = "cm"
    has_bottom = False

    def __init__(self, depth: int | None = None, labels: Sequence[str] = ("a",), max_states: int = 3):
        self.depth = depth
        self.labels = tuple(labels)
        self.max_states = max_states

    def carrier(self, alpha: CmMorphism):
        return alpha.domain

    def compose(self, g, f):
        return cm_compose(g, f)

    def identity(self, domain):
        return cm_unit(domain)

    def leq(self, f, g):
        return cm_leq(f, g)

    def join(self, f, g):
        return cm_join(f, g)

    def lift(self, f, target):
        target = tuple(target)
        return CmMorphism(tuple(range(len(f))), tuple(ConvexSet.point(Expr.unit(target[y])) for y in f))

    def default_depth(self, alpha):
        return self.depth

    def random_carrier(self, rng, size):
        return rng.randint(1, min(size, self.max_states))

    def random_on(self, rng: random.Random, carrier):
        n = carrier if isinstance(carrier, int) else len({a[1] for a in carrier})
        s = random_segala(rng, n, self.labels)
        return build_beta(embed_segala(s), s.labels)

    def describe(self, alpha: CmMorphism) -> str:
        return "; ".join(f"{a} -> {v}" for a, v in alpha.items())

    def difference(self, f, g):
        for (a, u), v in zip(f.items(), g.values):
            for p in u.generators:
                if p not in v:
                    return f"{a}: {p}"
        return ""


# ---------------------------------------------------------------- saturation

@dataclass(frozen=True)
class SaturationStages:
    """The chain ``γ₀ = 1, γₙ₊₁ = γₙ · (1 ∨ β)`` up to convergence or the depth bound."""

    beta: CmMorphism
    stages: tuple[CmMorphism, ...]
    converged: bool

    @property
    def final(self) -> CmMorphism:
        return self.stages[-1]

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    def star(self, n: int | None = None) -> CmMorphism:
        """``α★`` at stage ``n`` (default: last): the chain read at atoms ``(τ, x)``."""
        g = self.stages[-1 if n is None else n]
        states = [a[1] for a in g.domain if a[0] == TAU]
        return CmMorphism(tuple(states), tuple(g((TAU, x)) for x in states))


def saturate_cm(alpha: CmMorphism, depth: int, labels: Sequence[str] = ()) -> SaturationStages:
    """Bounded saturation of a ``CM(Στ × Id)``-coalgebra.

    The chain stops early once two consecutive stages coincide.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not labels:
        labels = sorted({a[0] for v in alpha.values for a in v.atoms()})
    beta = build_beta(alpha, labels)
    one = cm_unit(beta.domain)
    step = cm_join(one, beta)
    stages = [one]
    for _ in range(depth + 1):
        nxt = cm_compose(stages[-1], step)
        if nxt == stages[-1]:
            return SaturationStages(beta, tuple(stages), True)
        if len(stages) > depth:
            break
        stages.append(nxt)
    return SaturationStages(beta, tuple(stages), False)


def saturate_segala(s: SegalaSystem, depth: int | None = None) -> SaturationStages:
    return saturate_cm(embed_segala(s), default_segala_depth(s) if depth is None else depth, s.labels)


@dataclass(frozen=True)
class WeakPolytope:
    """``γₙ(τ, y)`` together with the label whose simple points are wanted."""

    polytope: ConvexSet
    sigma: str
    state: int

    def simple_point(self, class_masses: Mapping[Hashable, Fraction] | None = None,
                     class_of: Sequence[Hashable] | None = None) -> Expr | None:
        """A point with all mass on σ-atoms and the given per-class σ-mass.

        Without class data the only requirement is total σ-mass 1.  Returns
        None when no such point exists.
        """
        gens = self.polytope.generators
        atoms = {a for g in gens for a in g.support}
        off = {a: Fraction(1) for a in atoms if a[0] != self.sigma}
        eqs = []
        if off:
            eqs.append((off, Fraction(0)))
        on = [a for a in atoms if a[0] == self.sigma]
        if class_masses is None:
            eqs.append(({a: Fraction(1) for a in on}, Fraction(1)))
        else:
            groups: dict = {}
            for a in on:
                groups.setdefault(class_of[a[1]], {})[a] = Fraction(1)
            for c, m in class_masses.items():
                w = groups.get(c)
                if w is None:
                    return None
                eqs.append((w, Fraction(m)))
            for c, w in groups.items():
                if c not in class_masses:
                    eqs.append((w, Fraction(0)))
        lam = combination(gens, eqs)
        if lam is None:
            return None
        point = ZERO
        for l, g in zip(lam, gens):
            if l:
                point = point + g.scale(l)
        # the constraints already force this; checked again on the witness
        if any(a[0] != self.sigma for a in point.support) or point.mass != 1:
            raise AssertionError("LP witness is not a simple expression")
        return point

    def contains_simple(self, target: Expr) -> bool:
        """Is ``target`` (a simple σ-expression) reachable as a weak σ-step?"""
        eqs = [({a: Fraction(1)}, target[a]) for a in sorted({a for g in self.polytope for a in g.support} | set(target.support))]
        return combination(self.polytope.generators, eqs) is not None


def weak_sigma_polytope(stages: SaturationStages, y: int, sigma: str) -> WeakPolytope:
    try:
        poly = stages.final((TAU, y))
    except KeyError:
        raise ValueError(f"unknown state {y}") from None
    if sigma != TAU and (sigma, y) not in stages.final._index:
        raise ValueError(f"unknown label {sigma!r}")
    return WeakPolytope(poly, sigma, y)


# ---------------------------------------------------------------- bisimulation

@dataclass(frozen=True)
class ProbBisimResult:
    ok: bool
    violations: tuple[tuple[int, int, str, Distribution], ...] = ()
    depth_limited: bool = False

    def __bool__(self):
        return self.ok


def _check_partition(s: SegalaSystem, p: Partition):
    if p.n != s.n:
        raise ValueError("partition over a different state space")


class _Matcher:
    """Memoised weak-step matching queries against one saturation."""

    def __init__(self, s: SegalaSystem, stages: SaturationStages):
        self.s = s
        self.stages = stages
        self.memo: dict = {}

    def match(self, y: int, sigma: str, mu: Distribution, p: Partition) -> Expr | None:
        masses = mu.class_masses(p)
        key = (y, sigma, tuple(sorted(masses.items())), p.class_of)
        if key not in self.memo:
            poly = weak_sigma_polytope(self.stages, y, sigma)
            self.memo[key] = poly.simple_point(masses, p.class_of)
        return self.memo[key]


def check_prob_weak_bisim(s: SegalaSystem, p: Partition, depth: int | None = None,
                          stages: SaturationStages | None = None) -> ProbBisimResult:
    """Every step of ``x`` matched, up to ``p``, by a weak combined step of each ``y ~ x``."""
    _check_partition(s, p)
    stages = stages or saturate_segala(s, depth)
    m = _Matcher(s, stages)
    bad = []
    for cl in p.classes():
        for x in cl:
            for y in cl:
                if x == y:
                    continue
                for lab, mu in s.steps[x]:
                    if m.match(y, lab, mu, p) is None:
                        bad.append((x, y, lab, mu))
    return ProbBisimResult(not bad, tuple(bad), not stages.converged)


def largest_prob_weak_bisim(s: SegalaSystem, depth: int | None = None,
                            stages: SaturationStages | None = None) -> tuple[Partition, bool]:
    """Refine from one class until every class passes the weak-step check.

    In each round a state's signature is the set of steps, among those of
    its class-mates, that it can match up to the current partition.
    Returns the partition and the depth-limited flag.
    """
    stages = stages or saturate_segala(s, depth)
    m = _Matcher(s, stages)
    part = Partition.coarsest(s.n)
    while True:
        classes = part.classes()
        keys = []
        for x in range(s.n):
            cl = classes[part.class_of[x]]
            sig = []
            for z in cl:
                for i, (lab, mu) in enumerate(s.steps[z]):
                    if z == x or m.match(x, lab, mu, part) is not None:
                        sig.append((z, i))
            keys.append((part.class_of[x], tuple(sig)))
        nxt = Partition.from_keys(keys)
        if nxt.num_classes == part.num_classes:
            return part, not stages.converged
        part = nxt


def _coupling(lab: str, mu: Distribution, nu: Expr, p: Partition) -> Expr:
    """Pair two class-equivalent distributions class by class with product weights."""
    nu_d = {a[1]: c for a, c in nu.terms}
    masses = mu.class_masses(p)
    terms = {}
    for x, px in mu.probs:
        c = p.class_of[x]
        for y, py in nu_d.items():
            if p.class_of[y] == c:
                terms[(lab, (x, y))] = px * py / masses[c]
    return Expr.of(terms)


def check_coalgebraic_weak_bisim(s: SegalaSystem, p: Partition, depth: int | None = None,
                                 stages: SaturationStages | None = None) -> bool:
    """Build a witness ``γ : R → CM(Στ × R)`` and verify both lax squares.

    The squares are ``α · π1♯ ≤ π1♯ · γ`` and ``π2♯ · γ ≤ α★ · π2♯``, each
    evaluated as a composite in the Kleisli category of ``CM(Στ × Id)``.
    """
    _check_partition(s, p)
    stages = stages or saturate_segala(s, depth)
    m = _Matcher(s, stages)
    pairs = [(x, y) for x in range(s.n) for y in range(s.n) if p.same(x, y)]
    values = []
    for x, y in pairs:
        gens = [ZERO]
        for lab, mu in s.steps[x]:
            nu = mu.as_expr(lab) if x == y else m.match(y, lab, mu, p)
            if nu is None:
                return False
            gens.append(_coupling(lab, mu, nu, p))
        values.append(hull(gens))
    gamma = CmMorphism(tuple(pairs), tuple(values))
    alpha = embed_segala(s)
    alpha_star = stages.star()
    labels = s.labels

    def proj(k):
        return CmMorphism(tuple(pairs), tuple(ConvexSet.point(Expr.unit((TAU, r[k]))) for r in pairs))

    pi1, pi2 = proj(0), proj(1)
    if not cm_leq(sigma_compose(alpha, pi1, labels), sigma_compose(pi1, gamma, labels)):
        return False
    return cm_leq(sigma_compose(pi2, gamma, labels), sigma_compose(alpha_star, pi2, labels))


# ---------------------------------------------------------------- random systems

def random_segala(rng: random.Random, n: int, visible: Sequence[str] = ("a", "b"),
                  denominators: Sequence[int] = (1, 2, 3), max_steps: int = 2) -> SegalaSystem:
    """Random simple Segala system whose bounded saturation terminates.

    τ-steps move only to higher-numbered states, apart from Dirac self-loops.
    A τ-cycle through a branching step would make the saturation chain grow
    forever.
    """
    labels = (TAU,) + tuple(visible)
    steps: dict[int, list] = {}
    for x in range(n):
        row = []
        for _ in range(rng.randint(0, max_steps)):
            lab = rng.choice(labels)
            pool = list(range(x + 1, n)) if lab == TAU else list(range(n))
            d = rng.choice(list(denominators))
            if lab == TAU and not pool:
                row.append((lab, Distribution.dirac(x)))
            elif d == 1 or len(pool) < 2:
                row.append((lab, Distribution.dirac(rng.choice(pool + [x] if lab == TAU else pool))))
            else:
                k = rng.randint(1, d - 1)
                a, b = rng.sample(pool, 2)
                row.append((lab, Distribution.of({a: Fraction(k, d), b: Fraction(d - k, d)})))
        steps[x] = row
    return SegalaSystem.make(n, steps, visible)
