"""Ordered Kleisli endomorphisms, saturation, and law checking.

Every concrete monad instance (relations, LTSs, ε-NFAs, convex-set
Segala arrows) subclasses :class:`SaturationInstance` and supplies the
hom-set structure: composition, identity, order, join and, where it
exists, a least morphism.  Saturation is then computed generically,
either as the stabilised power chain of ``1 ∨ α`` or as the Kleene
iteration of ``x ↦ 1 ∨ x·α`` from the bottom element.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

__all__ = [
    "SaturationError",
    "NoJoinError",
    "MissingBottomError",
    "SaturationInstance",
    "SaturationReport",
    "Violation",
    "FuzzReport",
    "saturate_by_powers",
    "saturate_by_lfp",
    "verify_saturation_axioms",
    "verify_condition5",
    "fuzz_laws",
]


class SaturationError(Exception):
    pass


class NoJoinError(SaturationError):
    pass


class MissingBottomError(SaturationError):
    pass


class SaturationInstance:
    """Hom-set structure of one Kleisli category, as used by the saturation engine.

    Morphisms are opaque to the engine.  ``identity``/``bottom`` take the
    carrier descriptor returned by ``carrier``.
    """

    name = "abstract"
    kleene = False  # composition distributes over binary joins on both sides
    has_join = True
    has_bottom = True
    bottom_absorbs = True  # 0 . f = 0 as well as f . 0 = 0

    def carrier(self, alpha) -> Any:
        raise NotImplementedError

    def compose(self, g, f):
        """``g · f``: apply ``f`` first."""
        raise NotImplementedError

    def identity(self, carrier):
        raise NotImplementedError

    def leq(self, f, g) -> bool:
        raise NotImplementedError

    def join(self, f, g):
        raise NoJoinError(f"{self.name} has no join")

    def bottom(self, carrier):
        raise MissingBottomError(f"{self.name} has no least morphism")

    def equals(self, f, g) -> bool:
        return f == g

    def lift(self, f: tuple[int, ...], target):
        """``f#``: a plain carrier map ``X -> Y`` seen as a Kleisli arrow."""
        raise NotImplementedError

    def random_carrier(self, rng: random.Random, size: int):
        return rng.randint(1, size)

    def random_on(self, rng: random.Random, carrier):
        """A random endomorphism on the given carrier."""
        raise NotImplementedError

    def random(self, rng: random.Random, size: int):
        """A random endomorphism with at most ``size`` states."""
        return self.random_on(rng, self.random_carrier(rng, size))

    def default_depth(self, alpha) -> int | None:
        n = self.carrier(alpha)
        n = n if isinstance(n, int) else len(n)
        return 2 * n * n + 2

    def shrink(self, alpha) -> Iterator:
        return iter(())

    def describe(self, alpha) -> str:
        return repr(alpha)

    def difference(self, f, g) -> str:
        """Something in ``f`` that is not in ``g`` (for violation reports)."""
        return ""


@dataclass(frozen=True)
class SaturationReport:
    result: Any
    iterations: int
    converged: bool


def _depth(instance, alpha, max_depth):
    if max_depth is None:
        max_depth = instance.default_depth(alpha)
        if max_depth is None:
            raise ValueError(f"{instance.name} saturation needs an explicit max_depth")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    return max_depth


def saturate_by_powers(instance: SaturationInstance, alpha, max_depth: int | None = None) -> SaturationReport:
    """``α* = ⋁ₙ (1 ∨ α)ⁿ``, stopping once two successive powers coincide.

    The powers form an ascending chain (``1 ≤ 1 ∨ α`` and composition is
    monotone), so the running join is just the latest power.
    """
    if not instance.has_join:
        raise NoJoinError(f"{instance.name} has no join")
    max_depth = _depth(instance, alpha, max_depth)
    one = instance.identity(instance.carrier(alpha))
    step = instance.join(one, alpha)
    power = step  # (1 ∨ α)¹; ``iterations`` is the exponent of the returned power
    for i in range(1, max_depth + 1):
        nxt = instance.compose(power, step)
        if instance.equals(nxt, power):
            return SaturationReport(power, i, True)
        power = nxt
    return SaturationReport(power, max_depth, False)


def saturate_by_lfp(instance: SaturationInstance, alpha, max_depth: int | None = None) -> SaturationReport:
    """Least fixpoint of ``x ↦ 1 ∨ x·α`` by Kleene iteration from ⊥."""
    if not instance.has_join:
        raise NoJoinError(f"{instance.name} has no join")
    if not instance.has_bottom:
        raise MissingBottomError(f"{instance.name} has no least morphism")
    max_depth = _depth(instance, alpha, max_depth)
    carrier = instance.carrier(alpha)
    one = instance.identity(carrier)
    x = instance.bottom(carrier)
    for i in range(1, max_depth + 1):
        nxt = instance.join(one, instance.compose(x, alpha))
        if instance.equals(nxt, x):
            return SaturationReport(x, i, True)
        x = nxt
    return SaturationReport(x, max_depth, False)


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: str = ""


def verify_saturation_axioms(instance: SaturationInstance, alpha, alpha_star, candidates: Sequence = ()) -> list[Violation]:
    """Check axioms (1)–(3) for ``alpha_star`` and minimality (4) against ``candidates``."""
    one = instance.identity(instance.carrier(alpha))
    out = []
    if not instance.leq(one, alpha_star):
        out.append(Violation("(1) 1 <= a*", instance.difference(one, alpha_star)))
    if not instance.leq(alpha, alpha_star):
        out.append(Violation("(2) a <= a*", instance.difference(alpha, alpha_star)))
    sq = instance.compose(alpha_star, alpha_star)
    if not instance.leq(sq, alpha_star):
        out.append(Violation("(3) a*.a* <= a*", instance.difference(sq, alpha_star)))
    for k, beta in enumerate(candidates):
        closed = (
            instance.leq(one, beta)
            and instance.leq(alpha, beta)
            and instance.leq(instance.compose(beta, beta), beta)
        )
        if closed and not instance.leq(alpha_star, beta):
            out.append(Violation(f"(4) a* <= candidate #{k}", instance.difference(alpha_star, beta)))
    return out


def verify_condition5(instance: SaturationInstance, alpha, beta, f: tuple[int, ...], max_depth: int | None = None) -> bool:
    """Lax/oplax homomorphisms ``f#`` between α and β stay so between α* and β*."""
    sa = saturate_by_powers(instance, alpha, max_depth)
    sb = saturate_by_powers(instance, beta, max_depth)
    if not (sa.converged and sb.converged):
        raise SaturationError("condition (5) needs converged saturations")
    fs = instance.lift(f, instance.carrier(beta))
    lhs = instance.compose(fs, alpha)
    rhs = instance.compose(beta, fs)
    lhs_star = instance.compose(fs, sa.result)
    rhs_star = instance.compose(sb.result, fs)
    if instance.leq(lhs, rhs) and not instance.leq(lhs_star, rhs_star):
        return False
    if instance.leq(rhs, lhs) and not instance.leq(rhs_star, lhs_star):
        return False
    return True


# ---------------------------------------------------------------- fuzzing

@dataclass
class FuzzReport:
    instance: str
    seed: int
    trials: int
    ok: bool = True
    law: str | None = None
    witness: str | None = None
    checked: dict[str, int] = field(default_factory=dict)
    skipped: int = 0

    def summary(self) -> str:
        if self.ok:
            laws = ", ".join(f"{k} x{v}" for k, v in self.checked.items())
            return f"{self.instance}: ok ({self.trials} trials, {self.skipped} skipped; {laws})"
        return f"{self.instance}: FAILED {self.law}\n  witness: {self.witness}"


def _shrink(instance, law: Callable[..., bool], args: list) -> list:
    """Greedy one-step shrinking of every argument while the law keeps failing."""
    changed = True
    while changed:
        changed = False
        for i in range(len(args)):
            for smaller in instance.shrink(args[i]):
                trial = args[:i] + [smaller] + args[i + 1:]
                try:
                    still_fails = not law(*trial)
                except SaturationError:
                    continue
                if still_fails:
                    args = trial
                    changed = True
                    break
    return args


def _laws(instance: SaturationInstance):
    """Named laws over (alpha, f, g, h) on one carrier; each returns True when it holds."""
    I = instance
    memo: dict = {}  # one trial reuses the same saturations many times

    def star(a):
        try:
            hit = memo.get(a)
        except TypeError:
            hit = None
        if hit is None:
            rep = saturate_by_powers(I, a)
            if not rep.converged:
                raise SaturationError("saturation did not converge")
            hit = rep.result
            if len(memo) > 64:
                memo.clear()
            try:
                memo[a] = hit
            except TypeError:
                pass
        return hit

    def ax1(a, *_):
        return I.leq(I.identity(I.carrier(a)), star(a))

    def ax2(a, *_):
        return I.leq(a, star(a))

    def ax3(a, *_):
        s = star(a)
        return I.leq(I.compose(s, s), s)

    def idem(a, *_):
        s = star(a)
        return I.equals(star(s), s)

    laws = [
        ("(1) 1 <= a*", ax1, 1),
        ("(2) a <= a*", ax2, 1),
        ("(3) a*.a* <= a*", ax3, 1),
        ("a** = a*", idem, 1),
    ]
    if I.kleene:
        def commute(a, *_):
            s = star(a)
            return I.equals(I.compose(a, s), I.compose(s, a))

        def absorb(a, *_):
            return I.equals(star(I.compose(star(a), a)), star(a))

        def right_dist(f, g, h):
            return I.equals(I.compose(I.join(f, g), h), I.join(I.compose(f, h), I.compose(g, h)))

        def left_dist(f, g, h):
            return I.equals(I.compose(h, I.join(f, g)), I.join(I.compose(h, f), I.compose(h, g)))

        laws += [
            ("a.a* = a*.a", commute, 1),
            ("(a*.a)* = a*", absorb, 1),
            ("(f v g).h = f.h v g.h", right_dist, 3),
            ("h.(f v g) = h.f v h.g", left_dist, 3),
        ]
        if I.has_bottom:
            def zero_right(f, *_):
                b = I.bottom(I.carrier(f))
                return I.equals(I.compose(f, b), b)

            laws.append(("f.0 = 0", zero_right, 1))
            if I.bottom_absorbs:
                def zero_left(f, *_):
                    b = I.bottom(I.carrier(f))
                    return I.equals(I.compose(b, f), b)

                laws.append(("0.f = 0", zero_left, 1))
    return laws


def fuzz_laws(instance: SaturationInstance, seed: int, trials: int, size: int = 5) -> FuzzReport:
    """Check the saturation axioms and algebraic laws on random endomorphisms.

    The first failing law is reported with a shrunk witness.  Trials whose
    saturation does not converge within the default depth are counted as
    skipped.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    laws = _laws(instance)
    report = FuzzReport(instance.name, seed, trials, checked={name: 0 for name, _, _ in laws})
    for _ in range(trials):
        alpha = instance.random(rng, size)
        carrier = instance.carrier(alpha)
        extra = [instance.random_on(rng, carrier) for _ in range(2)]
        for name, law, arity in laws:
            args = [alpha] + extra[: arity - 1] if arity > 1 else [alpha]
            try:
                holds = law(*args)
            except SaturationError:
                report.skipped += 1
                break
            if not holds:
                args = _shrink(instance, law, list(args))
                report.ok = False
                report.law = name
                report.witness = "; ".join(instance.describe(a) for a in args)
                return report
            report.checked[name] += 1
    return report
