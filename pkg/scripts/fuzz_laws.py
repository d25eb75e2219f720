"""Fuzz the saturation laws on every built-in instance and print one summary line each.

    python scripts/fuzz_laws.py --trials 500 --seed 1
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from weaksat.kernel import fuzz_laws
from weaksat.lts import LtsInstance
from weaksat.nfa import NfaInstance
from weaksat.rel import RelInstance
from weaksat.segala import CmInstance


@dataclass
class FuzzConfig:
    trials: int = 300
    seed: int = 0
    size: int = 5
    cm_trials: int = 100  # convex-set arithmetic is much slower than bit relations


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=FuzzConfig.trials)
    ap.add_argument("--cm-trials", type=int, default=FuzzConfig.cm_trials)
    ap.add_argument("--seed", type=int, default=FuzzConfig.seed)
    ap.add_argument("--size", type=int, default=FuzzConfig.size)
    a = ap.parse_args()
    cfg = FuzzConfig(a.trials, a.seed, a.size, a.cm_trials)
    failed = False
    for inst, trials in [(RelInstance(), cfg.trials), (LtsInstance(), cfg.trials),
                         (NfaInstance(), cfg.trials), (CmInstance(depth=12), cfg.cm_trials)]:
        t = time.perf_counter()
        rep = fuzz_laws(inst, cfg.seed, trials, size=cfg.size)
        print(f"{rep.summary()}  [{time.perf_counter() - t:.1f}s]")
        failed |= not rep.ok
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
