"""Text formats: Aldebaran ``.aut``, ``.nfa`` (``.aut`` plus acceptance), ``.pa``, and DOT."""
from __future__ import annotations

import re
from fractions import Fraction

from ..convex import format_rat, parse_rat
from ..lts import TAU, Lts
from ..nfa import Nfa
from ..segala import Distribution, SegalaSystem

__all__ = [
    "FormatError",
    "read_aut",
    "write_aut",
    "read_nfa",
    "write_nfa",
    "read_pa",
    "write_pa",
    "write_dot",
]


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


# ---------------------------------------------------------------- .aut / .nfa

_HEADER = re.compile(r"des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_TRANS = re.compile(r'\(\s*(\d+)\s*,\s*"([^"]*)"\s*,\s*(\d+)\s*\)\s*$')
_NAME = re.compile(r"#\s*state\s+(\d+)\s*:\s?(.*)$")
_ACCEPT = re.compile(r"accepting\s*:\s*([\d\s]*);\s*$")


def _col(line: str) -> int:
    return len(line) - len(line.lstrip()) + 1


def _read_aut_lines(text: str, allow_accept: bool):
    lines = text.splitlines()
    header = None
    triples = []
    names: dict[int, str] = {}
    accepting = None
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NAME.match(line)
            if m:
                names[int(m.group(1))] = m.group(2)
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise FormatError("malformed header, expected 'des (<init>,<transitions>,<states>)'", ln, _col(raw))
            header = tuple(int(g) for g in m.groups())
            continue
        if accepting is not None:
            raise FormatError("content after the accepting line", ln, _col(raw))
        if allow_accept and line.startswith("accepting"):
            m = _ACCEPT.match(line)
            if not m:
                raise FormatError("malformed accepting line, expected 'accepting: <idx> ...;'", ln, _col(raw))
            accepting = [int(v) for v in m.group(1).split()]
            acc_line = ln
            continue
        m = _TRANS.match(line)
        if not m:
            raise FormatError('malformed transition, expected (<src>,"<label>",<dst>)', ln, _col(raw))
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if not label or label.strip() != label or '"' in label:
            raise FormatError(f"bad label {label!r}", ln, _col(raw))
        triples.append((src, label, dst, ln, _col(raw)))
    if header is None:
        raise FormatError("missing header", 1, 1)
    init, n_trans, n_states = header
    if n_states < 1:
        raise FormatError("at least one state required", 1, 1)
    if init >= n_states:
        raise FormatError(f"initial state {init} out of range", 1, 1)
    if n_trans != len(triples):
        raise FormatError(f"header announces {n_trans} transitions, found {len(triples)}", 1, 1)
    out = []
    for src, label, dst, ln, col in triples:
        if src >= n_states or dst >= n_states:
            raise FormatError(f"state index out of range in ({src},{label},{dst})", ln, col)
        out.append((src, label, dst))
    if accepting is not None:
        for x in accepting:
            if x >= n_states:
                raise FormatError(f"accepting state {x} out of range", acc_line, 1)
    name_tab = None
    if names:
        name_tab = tuple(names.get(i, str(i)) for i in range(n_states))
    return init, n_states, out, name_tab, accepting


def read_aut(text: str) -> Lts:
    init, n, triples, names, _ = _read_aut_lines(text, False)
    return Lts.from_triples(n, triples, names=names, initial=init)


def write_aut(lts: Lts, names: bool = False) -> str:
    """Header, then transitions sorted by (src, label, dst); optional ``# state`` comments."""
    triples = lts.triples
    out = [f"des ({lts.initial},{len(triples)},{lts.n})"]
    out += [f'({x},"{lab}",{y})' for x, lab, y in triples]
    if names and lts.names:
        out += [f"# state {i}: {nm}" for i, nm in enumerate(lts.names)]
    return "\n".join(out) + "\n"


def read_nfa(text: str) -> Nfa:
    init, n, triples, names, accepting = _read_aut_lines(text, True)
    if accepting is None:
        raise FormatError("missing final 'accepting: ...;' line", len(text.splitlines()) or 1, 1)
    return Nfa.from_triples(n, triples, accepting, names=names, initial=init)


def write_nfa(nfa: Nfa, names: bool = False) -> str:
    body = write_aut(nfa.trans, names=False)
    acc = " ".join(str(x) for x in nfa.accepting_states)
    tail = f"accepting: {acc};" if acc else "accepting: ;"
    if names and nfa.names:
        body += "".join(f"# state {i}: {nm}\n" for i, nm in enumerate(nfa.names))
    return body + tail + "\n"


# ---------------------------------------------------------------- .pa

_STATES = re.compile(r"states\s*:\s*(.*?)\s*;\s*$")
_STEP = re.compile(r"(\S+)\s+-(\S+?)->\s*(.*?)\s*;\s*$")
_IDENT = re.compile(r"[A-Za-z0-9_']+$")


def read_pa(text: str) -> SegalaSystem:
    names = None
    steps: dict[int, list] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = _col(line)
        body = line.strip()
        if names is None:
            m = _STATES.match(body)
            if not m:
                raise FormatError("expected 'states: <name> ...;' first", ln, col)
            names = m.group(1).split()
            if not names:
                raise FormatError("no states declared", ln, col)
            bad = [s for s in names if not _IDENT.match(s)]
            if bad:
                raise FormatError(f"bad state name {bad[0]!r}", ln, col)
            if len(set(names)) != len(names):
                raise FormatError("duplicate state name", ln, col)
            index = {s: i for i, s in enumerate(names)}
            continue
        m = _STEP.match(body)
        if not m:
            raise FormatError("malformed transition, expected '<src> -<label>-> p1 s1, p2 s2;'", ln, col)
        src, label, rhs = m.groups()
        if src not in index:
            raise FormatError(f"unknown state {src!r}", ln, col)
        if not _IDENT.match(label):
            raise FormatError(f"bad label {label!r}", ln, col)
        probs = {}
        for part in rhs.split(","):
            bits_ = part.split()
            if len(bits_) != 2:
                raise FormatError(f"expected '<prob> <state>', found {part.strip()!r}", ln, col + line.strip().find(part.strip()))
            try:
                p = parse_rat(bits_[0])
            except (ValueError, ZeroDivisionError):
                raise FormatError(f"malformed rational {bits_[0]!r}", ln, col + line.strip().find(bits_[0])) from None
            if p <= 0:
                raise FormatError(f"probability must be positive, got {bits_[0]}", ln, col)
            if bits_[1] not in index:
                raise FormatError(f"unknown state {bits_[1]!r}", ln, col + line.strip().find(bits_[1]))
            y = index[bits_[1]]
            probs[y] = probs.get(y, Fraction(0)) + p
        total = sum(probs.values())
        if total != 1:
            raise FormatError(f"probabilities sum to {format_rat(total)}, not 1", ln, col)
        steps.setdefault(index[src], []).append((label, Distribution.of(probs)))
    if names is None:
        raise FormatError("missing 'states:' line", 1, 1)
    return SegalaSystem.make(len(names), steps, names=names)


def write_pa(s: SegalaSystem) -> str:
    names = [s.name(x) for x in range(s.n)]
    out = ["states: " + " ".join(names) + ";"]
    for x, row in enumerate(s.steps):
        for lab, mu in row:
            rhs = ", ".join(f"{format_rat(p)} {names[y]}" for y, p in mu.probs)
            out.append(f"{names[x]} -{lab}-> {rhs};")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- DOT

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _lab(label: str) -> str:
    return "τ" if label == TAU else label


def write_dot(system) -> str:
    """Graphviz rendering of an LTS, NFA (accepting = double circle) or Segala system."""
    out = ["digraph G {", "  rankdir=LR;"]
    if isinstance(system, Nfa):
        lts, acc = system.trans, system.accepting
    elif isinstance(system, Lts):
        lts, acc = system, 0
    elif isinstance(system, SegalaSystem):
        for x in range(system.n):
            out.append(f"  s{x} [label={_q(system.name(x))}, shape=circle];")
        k = 0
        for x, row in enumerate(system.steps):
            for lab, mu in row:
                out.append(f"  d{k} [shape=point];")
                out.append(f"  s{x} -> d{k} [arrowhead=none, label={_q(_lab(lab))}];")
                for y, p in mu.probs:
                    out.append(f"  d{k} -> s{y} [label={_q(_lab(lab) + ':' + format_rat(p))}];")
                k += 1
        out.append("}")
        return "\n".join(out) + "\n"
    else:
        raise TypeError(f"cannot render {type(system).__name__}")
    for x in range(lts.n):
        shape = "doublecircle" if acc >> x & 1 else "circle"
        out.append(f"  s{x} [label={_q(lts.name(x))}, shape={shape}];")
    for x, lab, y in lts.triples:
        out.append(f"  s{x} -> s{y} [label={_q(_lab(lab))}];")
    out.append("}")
    return "\n".join(out) + "\n"
