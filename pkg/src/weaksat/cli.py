"""Command-line driver.

Exit codes: 0 success/equivalent, 1 inequivalent or law failure, 2 input or
usage error, 3 inconclusive (probabilistic check cut off by the depth bound).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .convex import format_rat
from .kernel import fuzz_laws
from .lts import Lts, LtsInstance, Partition, largest_weak_bisim, quotient_lts, saturate_lts
from .nfa import Nfa, NfaInstance, enumerate_weak_traces, saturate_nfa, weak_traces, wtrace_distinguish
from .rel import RelInstance
from .segala import (
    CmInstance,
    SegalaSystem,
    check_prob_weak_bisim,
    largest_prob_weak_bisim,
    saturate_segala,
)
from .syntax import (
    CcsError,
    FormatError,
    ccs_to_lts,
    parse_ccs,
    read_aut,
    read_nfa,
    read_pa,
    write_aut,
    write_dot,
    write_nfa,
)

SCHEMA = 1


class UsageError(Exception):
    pass


class Output:
    """Collects the verdict; renders either plain text or one JSON object."""

    def __init__(self, args):
        self.json = args.format == "json"
        self.timing = getattr(args, "timing", False)
        self.started = time.perf_counter()
        self.verdict = {"schema": SCHEMA, "command": args.command}
        self.lines: list[str] = []

    def text(self, s: str):
        self.lines.append(s)

    def emit(self):
        if self.json:
            if self.timing:
                self.verdict["seconds"] = round(time.perf_counter() - self.started, 6)
            sys.stdout.write(json.dumps(self.verdict, sort_keys=True) + "\n")
        else:
            out = "".join(line if line.endswith("\n") else line + "\n" for line in self.lines)
            sys.stdout.write(out)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _load(path: str):
    text = _read(path)
    suffix = Path(path).suffix
    try:
        if suffix == ".aut":
            return read_aut(text)
        if suffix == ".nfa":
            return read_nfa(text)
        if suffix == ".pa":
            return read_pa(text)
    except FormatError as e:
        raise FormatError(f"{path}:{e}") from None
    raise UsageError(f"{path}: unknown file type {suffix!r} (expected .aut, .nfa or .pa)")


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        raise UsageError(f"{path}: this command needs a {kind.__name__} file")
    return obj


def _state(system, token: str) -> int:
    # .aut/.nfa states are addressed by index first; .pa states by name first
    names = system.names
    by_index = token.isdigit() and int(token) < system.n
    if by_index and not isinstance(system, SegalaSystem):
        return int(token)
    if names and token in names:
        return names.index(token)
    if by_index:
        return int(token)
    raise UsageError(f"unknown state {token!r}")


def _name(system, x: int) -> str:
    return system.names[x] if system.names else str(x)


def _partition_lines(system, p: Partition) -> list[str]:
    return [f"class {i}: " + " ".join(_name(system, x) for x in cl) for i, cl in enumerate(p.classes())]


def _partition_json(system, p: Partition):
    return [[_name(system, x) for x in cl] for cl in p.classes()]


# ---------------------------------------------------------------- commands

def cmd_saturate(args, out: Output) -> int:
    obj = _load(args.file)
    if isinstance(obj, SegalaSystem):
        if args.depth is None:
            raise UsageError("saturating a .pa file needs --depth N")
        st = saturate_segala(obj, args.depth)
        text = _write_saturated_pa(obj, st)
        out.verdict.update(kind="system", text=text, depth_limited=not st.converged)
        out.text(text)
        return 0
    if isinstance(obj, Nfa):
        text = write_nfa(saturate_nfa(obj), names=bool(obj.names))
    else:
        text = write_aut(saturate_lts(obj), names=bool(obj.names))
    out.verdict.update(kind="system", text=text)
    out.text(text)
    return 0


def _write_saturated_pa(s: SegalaSystem, st) -> str:
    """Weak combined transitions as ``.pa`` lines; other extreme points as comments."""
    names = [s.name(x) for x in range(s.n)]
    lines = []
    if not st.converged:
        lines.append("# depth-limited")
    lines.append("states: " + " ".join(names) + ";")
    star = st.star()
    for x in range(s.n):
        for g in star(x).generators:
            labels = {a[0] for a in g.support}
            if len(labels) == 1 and g.mass == 1:
                (lab,) = labels
                rhs = ", ".join(f"{format_rat(c)} {names[a[1]]}" for a, c in g.terms)
                lines.append(f"{names[x]} -{lab}-> {rhs};")
            else:
                body = " + ".join(f"{format_rat(c)} ({a[0]},{names[a[1]]})" for a, c in g.terms) or "0"
                lines.append(f"# {names[x]} => {body}")
    return "\n".join(lines) + "\n"


def cmd_weakbisim(args, out: Output) -> int:
    lts = _expect(_load(args.file), Lts, args.file)
    p = largest_weak_bisim(lts)
    if args.states:
        x, y = (_state(lts, s) for s in args.states)
        eq = p.same(x, y)
        out.verdict.update(kind="equivalent" if eq else "inequivalent", states=args.states)
        out.text("equivalent" if eq else "inequivalent")
        return 0 if eq else 1
    out.verdict.update(kind="partition", classes=_partition_json(lts, p))
    for line in _partition_lines(lts, p):
        out.text(line)
    return 0


def cmd_probweakbisim(args, out: Output) -> int:
    s = _expect(_load(args.file), SegalaSystem, args.file)
    st = saturate_segala(s, args.depth)
    p, limited = largest_prob_weak_bisim(s, stages=st)
    out.verdict["depth_limited"] = limited
    if args.states:
        x, y = (_state(s, t) for t in args.states)
        eq = p.same(x, y)
        out.verdict.update(kind="equivalent" if eq else "inequivalent", states=args.states)
        if not eq:
            # a violation of the partition with the two classes merged
            res = check_prob_weak_bisim(s, _merge(p, x, y), stages=st)
            if res.violations:
                a, b, lab, mu = res.violations[0]
                out.verdict["witness"] = {"pair": [_name(s, a), _name(s, b)], "label": lab,
                                          "step": {_name(s, z): format_rat(q) for z, q in mu.probs}}
        out.text(("equivalent" if eq else "inequivalent") + (" (depth-limited)" if limited else ""))
        if eq:
            return 0
        return 3 if limited else 1
    out.verdict.update(kind="partition", classes=_partition_json(s, p))
    if limited:
        out.text("# depth-limited")
    for line in _partition_lines(s, p):
        out.text(line)
    return 0


def _merge(p: Partition, x: int, y: int) -> Partition:
    return p.merge(p.class_of[x], p.class_of[y])


def _word(w) -> str:
    return " ".join(w) if w else "ε"


def cmd_wtraces(args, out: Output) -> int:
    nfa = _expect(_load(args.file), Nfa, args.file)
    x = _state(nfa, args.state)
    if args.maxlen is not None:
        if args.maxlen < 0:
            raise UsageError("--maxlen must be non-negative")
        words = sorted(enumerate_weak_traces(nfa, x, args.maxlen), key=lambda w: (len(w), w))
        out.verdict.update(kind="system", words=[list(w) for w in words])
        for w in words:
            out.text(_word(w))
        return 0
    text = write_nfa(weak_traces(nfa, x).to_nfa(), names=bool(nfa.names))
    out.verdict.update(kind="system", text=text)
    out.text(text)
    return 0


def cmd_wtrace_equiv(args, out: Output) -> int:
    nfa = _expect(_load(args.file), Nfa, args.file)
    x, y = (_state(nfa, s) for s in args.states)
    w = wtrace_distinguish(nfa, x, y)
    if w is None:
        out.verdict.update(kind="equivalent", states=args.states)
        out.text("equivalent")
        return 0
    out.verdict.update(kind="inequivalent", states=args.states, witness=list(w))
    out.text(f"inequivalent: {_word(w)}")
    return 1


def cmd_parse_ccs(args, out: Output) -> int:
    prog = parse_ccs(_read(args.file))
    lts = ccs_to_lts(prog, args.limit)
    text = write_aut(lts, names=True)
    out.verdict.update(kind="system", text=text)
    out.text(text)
    return 0


def cmd_quotient(args, out: Output) -> int:
    lts = _expect(_load(args.file), Lts, args.file)
    q = quotient_lts(lts, largest_weak_bisim(lts))
    text = write_aut(q, names=bool(q.names))
    out.verdict.update(kind="system", text=text)
    out.text(text)
    return 0


INSTANCES = {
    "rel": lambda: RelInstance(),
    "lts": lambda: LtsInstance(),
    "nfa": lambda: NfaInstance(),
    "cm": lambda: CmInstance(depth=12),
}


def cmd_laws(args, out: Output) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    rep = fuzz_laws(INSTANCES[args.instance](), args.seed, args.trials, size=args.size)
    out.verdict.update(kind="fuzz-report", ok=rep.ok, law=rep.law, witness=rep.witness,
                       checked=rep.checked, skipped=rep.skipped, trials=rep.trials, seed=rep.seed)
    out.text(rep.summary())
    return 0 if rep.ok else 1


def cmd_dot(args, out: Output) -> int:
    text = write_dot(_load(args.file))
    out.verdict.update(kind="system", text=text)
    out.text(text)
    return 0


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="include wall-clock seconds in JSON output")

    p = _Parser(prog="weaksat", description="Weak bisimulation by saturation.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timing", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("saturate", parents=[common], help="print the saturated system")
    s.add_argument("file")
    s.add_argument("--depth", type=int)
    s.set_defaults(run=cmd_saturate)

    s = sub.add_parser("weakbisim", parents=[common], help="weak bisimilarity on an .aut file")
    s.add_argument("file")
    s.add_argument("--states", nargs=2, metavar=("X", "Y"))
    s.set_defaults(run=cmd_weakbisim)

    s = sub.add_parser("probweakbisim", parents=[common], help="probabilistic weak bisimilarity on a .pa file")
    s.add_argument("file")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--states", nargs=2, metavar=("X", "Y"))
    s.set_defaults(run=cmd_probweakbisim)

    s = sub.add_parser("wtraces", parents=[common], help="weak traces of an NFA state")
    s.add_argument("file")
    s.add_argument("--state", required=True)
    s.add_argument("--maxlen", type=int)
    s.set_defaults(run=cmd_wtraces)

    s = sub.add_parser("wtrace-equiv", parents=[common], help="weak-trace equivalence of two NFA states")
    s.add_argument("file")
    s.add_argument("--states", nargs=2, metavar=("X", "Y"), required=True)
    s.set_defaults(run=cmd_wtrace_equiv)

    s = sub.add_parser("parse-ccs", parents=[common], help="compile a CCS program to .aut")
    s.add_argument("file")
    s.add_argument("--limit", type=int, default=10_000)
    s.set_defaults(run=cmd_parse_ccs)

    s = sub.add_parser("quotient", parents=[common], help="weak-bisimulation quotient of an .aut file")
    s.add_argument("file")
    s.set_defaults(run=cmd_quotient)

    s = sub.add_parser("laws", parents=[common], help="fuzz the saturation laws")
    s.add_argument("--instance", choices=sorted(INSTANCES), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--size", type=int, default=5)
    s.set_defaults(run=cmd_laws)

    s = sub.add_parser("dot", parents=[common], help="Graphviz output")
    s.add_argument("file")
    s.set_defaults(run=cmd_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"weaksat: {e}\n")
        return 2
    if getattr(args, "depth", None) is not None and args.depth < 1:
        sys.stderr.write("weaksat: --depth must be at least 1\n")
        return 2
    out = Output(args)
    try:
        code = args.run(args, out)
    except (UsageError, FormatError, CcsError, ValueError) as e:
        sys.stderr.write(f"weaksat: {e}\n")
        return 2
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
