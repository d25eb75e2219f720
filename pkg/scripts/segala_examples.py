"""Walk through the probabilistic examples: embedded convex sets, weak steps and verdicts."""
from __future__ import annotations

from fractions import Fraction as F

from weaksat.convex import Expr
from weaksat.lts import TAU, Partition
from weaksat.segala import Distribution as D
from weaksat.segala import (
    SegalaSystem,
    check_coalgebraic_weak_bisim,
    check_prob_weak_bisim,
    embed_segala,
    largest_prob_weak_bisim,
    saturate_segala,
    weak_sigma_polytope,
)


def show_set(s, cs):
    def atom(a):
        return f"({a[0]},{s.name(a[1])})"
    gens = [" + ".join(f"{c}·{atom(a)}" for a, c in g.terms) or "0" for g in cs.generators]
    return "hull{" + ", ".join(gens) + "}"


def section(title):
    print(f"\n== {title}")


def main():
    three = SegalaSystem.make(3, {
        0: [("a", D.of({1: F(1, 3), 2: F(2, 3)})), ("b", D.dirac(2))],
        1: [("a", D.dirac(0))],
    }, names=["x1", "x2", "x3"])
    section("three-state system: one-step convex sets")
    for x, cs in embed_segala(three).items():
        print(f"  {three.name(x)} ↦ {show_set(three, cs)}")
    p, limited = largest_prob_weak_bisim(three, 3)
    print(f"  largest weak bisimulation: {p.classes()} (depth-limited: {limited})")

    stutter = SegalaSystem.make(5, {0: [(TAU, D.dirac(1))], 1: [("a", D.dirac(2))], 3: [("a", D.dirac(4))]},
                                names=["x", "y", "u", "w", "u'"])
    section("τ-stutter: x →τ y →a u against w →a u'")
    st = saturate_segala(stutter, 4)
    print(f"  saturation converged after {st.depth} rounds")
    print(f"  weak steps of x: {show_set(stutter, st.star()(0))}")
    p, _ = largest_prob_weak_bisim(stutter, stages=st)
    print(f"  classes: {[[stutter.name(x) for x in c] for c in p.classes()]}")
    print(f"  coalgebraic check agrees: {check_coalgebraic_weak_bisim(stutter, p, stages=st)}")

    split = SegalaSystem.make(4, {0: [(TAU, D.of({1: F(1, 2), 2: F(1, 2)}))], 2: [("a", D.dirac(2))]},
                              names=["x", "y", "z", "w"])
    section("a ½/½ τ-split cannot be matched by a deadlocked state")
    res = check_prob_weak_bisim(split, Partition.from_keys([0, 0, 1, 0]), 3)
    for x, y, lab, mu in res.violations:
        print(f"  {split.name(x)} -{lab}-> {dict((split.name(z), str(q)) for z, q in mu.probs)}"
              f" unmatched by {split.name(y)}")

    comb = SegalaSystem.make(4, {
        0: [("a", D.dirac(2)), ("a", D.dirac(3))],
        1: [("a", D.dirac(2)), ("a", D.dirac(3)), ("a", D.of({2: F(1, 2), 3: F(1, 2)}))],
        2: [("b", D.dirac(2))], 3: [("c", D.dirac(3))],
    }, names=["x", "v", "y", "z"])
    section("a ½/½ a-step is matched only by combining two Dirac steps")
    st = saturate_segala(comb, 4)
    target = Expr.of({("a", 2): F(1, 2), ("a", 3): F(1, 2)})
    print(f"  x reaches ½(a,y)+½(a,z) weakly: {weak_sigma_polytope(st, 0, 'a').contains_simple(target)}")
    p, _ = largest_prob_weak_bisim(comb, stages=st)
    print(f"  x and v related: {p.same(0, 1)}")


if __name__ == "__main__":
    main()
