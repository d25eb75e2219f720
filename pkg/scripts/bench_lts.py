"""Time LTS saturation (both routes) and weak-bisimulation refinement on random systems.

    python scripts/bench_lts.py --sizes 100 300 1000 3000 --density 10
"""
from __future__ import annotations

import argparse
import random
import statistics
import time
from dataclasses import dataclass

from weaksat.lts import largest_strong_bisim, random_lts, saturate_lts_direct, saturate_lts_monadic


@dataclass
class BenchConfig:
    sizes: tuple[int, ...] = (100, 300, 1000)
    density: int = 10  # transitions per state
    repeats: int = 3
    seed: int = 0


def _clock(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def run(cfg: BenchConfig) -> list[dict]:
    rng = random.Random(cfg.seed)
    rows = []
    for n in cfg.sizes:
        mono, direct, refine = [], [], []
        for _ in range(cfg.repeats):
            alpha = random_lts(rng, n, cfg.density * n)
            sat, dt = _clock(lambda: saturate_lts_direct(alpha))
            direct.append(dt)
            sat2, dt = _clock(lambda: saturate_lts_monadic(alpha))
            mono.append(dt)
            assert sat == sat2
            p, dt = _clock(lambda: largest_strong_bisim(sat))
            refine.append(dt)
        rows.append(dict(n=n, transitions=cfg.density * n, saturated=len(sat.triples), classes=p.num_classes,
                         direct=statistics.median(direct), monadic=statistics.median(mono),
                         refine=statistics.median(refine)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=list(BenchConfig.sizes))
    ap.add_argument("--density", type=int, default=BenchConfig.density)
    ap.add_argument("--repeats", type=int, default=BenchConfig.repeats)
    ap.add_argument("--seed", type=int, default=BenchConfig.seed)
    a = ap.parse_args()
    cfg = BenchConfig(tuple(a.sizes), a.density, a.repeats, a.seed)
    print(f"{'n':>6} {'trans':>7} {'sat trans':>10} {'classes':>8} {'direct s':>9} {'monadic s':>10} {'refine s':>9}")
    for r in run(cfg):
        print(f"{r['n']:>6} {r['transitions']:>7} {r['saturated']:>10} {r['classes']:>8} "
              f"{r['direct']:>9.3f} {r['monadic']:>10.3f} {r['refine']:>9.3f}")


if __name__ == "__main__":
    main()
