"""A small CCS fragment: parser, printer, and state-space generation.

Grammar::

    program := def+
    def     := NAME "=" term ";"
    term    := par ("+" par)*
    par     := restr ("|" restr)*
    restr   := prefix ("\\" "{" NAME ("," NAME)* "}")*
    prefix  := act "." prefix | "0" | NAME | "(" term ")"
    act     := NAME | "'" NAME | "tau"

The first definition is the root process.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from ..lts import TAU, Lts

__all__ = [
    "CcsError",
    "Nil",
    "Prefix",
    "Sum",
    "Par",
    "Restrict",
    "Var",
    "CcsProgram",
    "parse_ccs",
    "format_term",
    "format_program",
    "canonical",
    "ccs_to_lts",
    "StateLimitExceeded",
]


class CcsError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


class StateLimitExceeded(CcsError):
    pass


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Prefix:
    label: str  # "a", "'a" or "tau"
    body: "Term"


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Restrict:
    body: "Term"
    names: frozenset[str]


@dataclass(frozen=True)
class Var:
    name: str


Term = Nil | Prefix | Sum | Par | Restrict | Var


@dataclass(frozen=True)
class CcsProgram:
    definitions: tuple[tuple[str, Term], ...]
    root: str

    @property
    def env(self) -> dict[str, Term]:
        return dict(self.definitions)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<zero>0)|(?P<sym>[=;.+|\\{},()']))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(pos):
        ln = max(i for i, s in enumerate(line_starts) if s <= pos)
        return ln + 1, pos - line_starts[ln] + 1

    pos = 0
    # strip comments up front, keeping offsets
    text = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    while True:
        ws = re.match(r"\s*", text[pos:])
        pos += ws.end()
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise CcsError(f"unexpected character {text[pos]!r}", *where(pos))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), *where(start)))
        pos = m.end()
    toks.append(_Tok("eof", "", *where(len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.cur
        return CcsError(msg, tok.line, tok.col)

    def expect(self, text):
        if self.cur.text != text or self.cur.kind == "eof":
            raise self.error(f"expected {text!r}, found {self.cur.text or 'end of input'!r}")
        self.i += 1

    def name(self) -> str:
        if self.cur.kind != "name":
            raise self.error(f"expected a name, found {self.cur.text or 'end of input'!r}")
        t = self.cur.text
        self.i += 1
        return t

    def program(self):
        defs = []
        positions = {}
        while self.cur.kind != "eof":
            tok = self.cur
            n = self.name()
            if n == "tau":
                raise self.error("'tau' cannot name a process", tok)
            if n in positions:
                raise self.error(f"duplicate definition of {n}", tok)
            positions[n] = tok
            self.expect("=")
            body = self.term()
            self.expect(";")
            defs.append((n, body))
        if not defs:
            raise self.error("empty program")
        return defs, positions

    def term(self):
        t = self.par()
        while self.cur.text == "+":
            self.i += 1
            t = Sum(t, self.par())
        return t

    def par(self):
        t = self.restr()
        while self.cur.text == "|":
            self.i += 1
            t = Par(t, self.restr())
        return t

    def restr(self):
        t = self.prefix()
        while self.cur.text == "\\":
            self.i += 1
            self.expect("{")
            names = [self.name()]
            while self.cur.text == ",":
                self.i += 1
                names.append(self.name())
            self.expect("}")
            if "tau" in names:
                raise self.error("tau cannot be restricted")
            t = Restrict(t, frozenset(names))
        return t

    def prefix(self):
        tok = self.cur
        if tok.text == "'":
            self.i += 1
            label = "'" + self.name()
            self.expect(".")
            return Prefix(label, self.prefix())
        if tok.kind == "name" and self.peek().text == ".":
            self.i += 2
            return Prefix(tok.text, self.prefix())
        if tok.kind == "zero":
            self.i += 1
            return Nil()
        if tok.kind == "name":
            if tok.text == "tau":
                raise self.error("tau must be followed by '.'")
            self.i += 1
            return Var(tok.text)
        if tok.text == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


def _vars(t: Term, guarded: bool) -> Iterator[tuple[str, bool]]:
    if isinstance(t, Var):
        yield t.name, guarded
    elif isinstance(t, Prefix):
        yield from _vars(t.body, True)
    elif isinstance(t, (Sum, Par)):
        yield from _vars(t.left, guarded)
        yield from _vars(t.right, guarded)
    elif isinstance(t, Restrict):
        yield from _vars(t.body, guarded)


def parse_ccs(text: str) -> CcsProgram:
    """Parse and check a program: every name defined, no unguarded recursion.

    Recursion is unguarded when a process can reach itself through
    references that sit under no prefix.
    """
    p = _Parser(text)
    defs, positions = p.program()
    env = dict(defs)
    for n, body in defs:
        for v, _ in _vars(body, False):
            if v not in env:
                tok = positions[n]
                raise CcsError(f"undefined process {v} (in {n})", tok.line, tok.col)
    unguarded = {n: {v for v, g in _vars(body, False) if not g} for n, body in defs}
    state = {}

    def visit(n, path):
        state[n] = 1
        for v in sorted(unguarded[n]):
            if state.get(v) == 1:
                cyc = path[path.index(v):] + [v]
                tok = positions[v]
                raise CcsError("unguarded recursion " + " -> ".join(cyc), tok.line, tok.col)
            if v not in state:
                visit(v, path + [v])
        state[n] = 2

    for n, _ in defs:
        if n not in state:
            visit(n, [n])
    return CcsProgram(tuple(defs), defs[0][0])


# ---------------------------------------------------------------- printing

_PREC = {Sum: 1, Par: 2, Restrict: 3, Prefix: 4, Nil: 5, Var: 5}


def format_term(t: Term, prec: int = 0) -> str:
    """Minimal-parenthesis rendering; left operands of ``+``/``|`` associate left."""
    if isinstance(t, Nil):
        s = "0"
    elif isinstance(t, Var):
        s = t.name
    elif isinstance(t, Prefix):
        s = f"{t.label}.{format_term(t.body, 4)}"
    elif isinstance(t, Sum):
        s = f"{format_term(t.left, 1)} + {format_term(t.right, 2)}"
    elif isinstance(t, Par):
        s = f"{format_term(t.left, 2)} | {format_term(t.right, 3)}"
    elif isinstance(t, Restrict):
        s = f"{format_term(t.body, 3)} \\ {{{', '.join(sorted(t.names))}}}"
    else:
        raise TypeError(t)
    return f"({s})" if _PREC[type(t)] < prec else s


def format_program(p: CcsProgram) -> str:
    return "".join(f"{n} = {format_term(t)};\n" for n, t in p.definitions)


# ---------------------------------------------------------------- semantics

def _operands(t: Term, kind) -> list[Term]:
    if isinstance(t, kind):
        return _operands(t.left, kind) + _operands(t.right, kind)
    return [t]


def canonical(t: Term) -> Term:
    """Flatten nested sums and parallels and sort their operands."""
    if isinstance(t, (Sum, Par)):
        kind = type(t)
        ops = sorted((canonical(o) for o in _operands(t, kind)), key=format_term)
        out = ops[0]
        for o in ops[1:]:
            out = kind(out, o)
        return out
    if isinstance(t, Prefix):
        return Prefix(t.label, canonical(t.body))
    if isinstance(t, Restrict):
        return Restrict(canonical(t.body), t.names)
    return t


def _name(label: str) -> str:
    return label[1:] if label.startswith("'") else label


def _co(label: str) -> str:
    return label[1:] if label.startswith("'") else "'" + label


def _steps(t: Term, env: dict[str, Term]) -> set[tuple[str, Term]]:
    if isinstance(t, Nil):
        return set()
    if isinstance(t, Prefix):
        return {(t.label, t.body)}
    if isinstance(t, Var):
        return _steps(env[t.name], env)
    if isinstance(t, Sum):
        return _steps(t.left, env) | _steps(t.right, env)
    if isinstance(t, Restrict):
        return {(a, Restrict(u, t.names)) for a, u in _steps(t.body, env) if a == TAU or _name(a) not in t.names}
    if isinstance(t, Par):
        ls, rs = _steps(t.left, env), _steps(t.right, env)
        out = {(a, Par(u, t.right)) for a, u in ls} | {(a, Par(t.left, u)) for a, u in rs}
        for a, u in ls:
            if a == TAU:
                continue
            for b, v in rs:
                if b == _co(a):
                    out.add((TAU, Par(u, v)))
        return out
    raise TypeError(t)


def ccs_to_lts(p: CcsProgram, state_limit: int = 10_000) -> Lts:
    """Reachable LTS of the root process.

    States are canonical terms numbered in breadth-first order, successors
    visited by (label, printed term); their printed forms become state names.
    """
    if state_limit < 1:
        raise ValueError("state_limit must be at least 1")
    env = p.env
    root = Var(p.root)
    index = {root: 0}
    order = [root]
    triples = []
    labels = set()
    queue = deque([root])
    while queue:
        t = queue.popleft()
        src = index[t]
        succ = sorted({(a, canonical(u)) for a, u in _steps(t, env)}, key=lambda s: (s[0], format_term(s[1])))
        for a, u in succ:
            if u not in index:
                if len(order) >= state_limit:
                    raise StateLimitExceeded(f"more than {state_limit} states")
                index[u] = len(order)
                order.append(u)
                queue.append(u)
            if a != TAU:
                labels.add(a)
            triples.append((src, a, index[u]))
    return Lts.from_triples(len(order), triples, labels, names=tuple(format_term(t) for t in order), initial=0)
