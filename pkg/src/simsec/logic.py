"""Formulas of the knowledge/secrecy language: AST, parser, printer.

Concrete syntax (ASCII)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "K{" agent "}" unary | "S{" agent "}" unary
             | "(" formula ")" | atom | "#t" | "#f"

Atoms are lowercase identifiers. The AST keeps every connective so that
printing is faithful; :func:`desugar` reduces to the core connectives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import TooManyAtoms


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class K(Formula):
    agent: str
    arg: Formula


@dataclass(frozen=True)
class S(Formula):
    agent: str
    arg: Formula


def _cache_hash(cls):
    # generated dataclass hashes recurse through the whole tree on every call
    raw = cls.__hash__

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = raw(self)
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


for _cls in (Atom, Top, Bot, Not, And, Or, Imp, Iff, K, S):
    _cache_hash(_cls)

BINARY = (And, Or, Imp, Iff)
MODAL = (K, S)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, K, S)):
        return (f.arg,)
    return ()


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# --------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, expected):
        self.text = text
        self.offset = len(text[:pos].encode("utf-8"))
        self.expected = frozenset(expected)
        found = repr(text[pos:pos + 8]) if pos < len(text) else "end of input"
        super().__init__(f"at byte {self.offset}: expected one of {sorted(self.expected)}, found {found}")


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<mod>[KS])\{\s*(?P<agent>[A-Za-z0-9_]+)\s*\}
      | (?P<op><->|->|~|&|\||\(|\))
      | (?P<const>\#t|\#f)
      | (?P<atom>[a-z][A-Za-z0-9_]*)
    )""",
    re.VERBOSE,
)

_UNARY_START = {"~", "K{", "S{", "(", "atom", "#t", "#f"}
_AFTER_FORMULA = {"&", "|", "->", "<->"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                if text[pos] in "KS" and text[pos + 1:pos + 2] == "{":
                    raise FormulaSyntaxError(text, pos + 2, {"agent name"})
                raise FormulaSyntaxError(text, pos, _UNARY_START | _AFTER_FORMULA | {")"})
            start = pos
            if m.group("mod"):
                self.tokens.append((m.group("mod") + "{", m.group("agent"), start))
            elif m.group("op"):
                self.tokens.append((m.group("op"), m.group("op"), start))
            elif m.group("const"):
                self.tokens.append((m.group("const"), m.group("const"), start))
            else:
                self.tokens.append(("atom", m.group("atom"), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        raise FormulaSyntaxError(self.text, self.tokens[self.i][2], expected)

    def formula(self) -> Formula:
        left = self.imp()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind in ("K{", "S{"):
            _, agent, _ = self.take()
            cls = K if kind == "K{" else S
            return cls(agent, self.unary())
        if kind == "(":
            self.take()
            inner = self.formula()
            if self.peek() != ")":
                self.fail(_AFTER_FORMULA | {")"})
            self.take()
            return inner
        if kind == "atom":
            return Atom(self.take()[1])
        if kind == "#t":
            self.take()
            return Top()
        if kind == "#f":
            self.take()
            return Bot()
        self.fail(_UNARY_START)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "end":
        p.fail(_AFTER_FORMULA | {"end of input"})
    return f


# --------------------------------------------------------------------------
# printing

_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Imp: "->", Or: "|", And: "&"}
_UNARY_PREC = 5


def _render(f: Formula) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f.name, 6
    if isinstance(f, Top):
        return "#t", 6
    if isinstance(f, Bot):
        return "#f", 6
    if isinstance(f, (Not, K, S)):
        text, prec = _render(f.arg)
        if isinstance(f, Not):
            prefix = "~"
        else:
            prefix = f"{type(f).__name__}{{{f.agent}}}"
        if prec < _UNARY_PREC:
            return f"{prefix}({text})", _UNARY_PREC
        return (prefix + text if isinstance(f, Not) else f"{prefix} {text}"), _UNARY_PREC
    prec = _PREC[type(f)]
    # Imp is right-associative, the others left-associative
    left_min, right_min = (prec + 1, prec) if isinstance(f, Imp) else (prec, prec + 1)
    lt, lp = _render(f.left)
    rt, rp = _render(f.right)
    if lp < left_min:
        lt = f"({lt})"
    if rp < right_min:
        rt = f"({rt})"
    return f"{lt} {_SYMBOL[type(f)]} {rt}", prec


def to_text(f: Formula) -> str:
    """Render with the minimum number of parentheses."""
    return _render(f)[0]


# --------------------------------------------------------------------------
# structure

def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    return list(_subformulas(f))


@lru_cache(maxsize=4096)
def _subformulas(f: Formula) -> tuple[Formula, ...]:
    seen: set[Formula] = set()
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen.add(g)
        out.append(g)

    walk(f)
    return tuple(out)


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def agents(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, MODAL)}


def modal_depth(f: Formula) -> int:
    if isinstance(f, MODAL):
        return 1 + modal_depth(f.arg)
    return max((modal_depth(c) for c in children(f)), default=0)


def desugar(f: Formula) -> Formula:
    """Rewrite into Atom/Top/Not/And/K/S only.

    ``#f`` becomes ``~#t``; the remaining connectives use their textbook
    abbreviations.
    """
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Bot):
        return Not(Top())
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, K):
        return K(f.agent, desugar(f.arg))
    if isinstance(f, S):
        return S(f.agent, desugar(f.arg))
    left, right = desugar(f.left), desugar(f.right)
    if isinstance(f, And):
        return And(left, right)
    if isinstance(f, Or):
        return Not(And(Not(left), Not(right)))
    if isinstance(f, Imp):
        return Not(And(left, Not(right)))
    return And(Not(And(left, Not(right))), Not(And(right, Not(left))))


# --------------------------------------------------------------------------
# propositional skeleton

def skeleton_variables(f: Formula) -> list[Formula]:
    """Atoms and maximal modal subformulas, in first-occurrence order."""
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if isinstance(g, (Atom,) + MODAL):
            if g not in out:
                out.append(g)
            return
        for c in children(g):
            walk(c)

    walk(f)
    return out


def eval_skeleton(f: Formula, value) -> bool:
    """Evaluate ``f`` treating atoms and modal subformulas as opaque; ``value`` maps them to bools."""
    if isinstance(f, (Atom,) + MODAL):
        return value[f]
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not eval_skeleton(f.arg, value)
    left = eval_skeleton(f.left, value)
    right = eval_skeleton(f.right, value)
    if isinstance(f, And):
        return left and right
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Imp):
        return (not left) or right
    return left == right


def propositional_tautology(f: Formula, cap: int = 16) -> bool:
    """Truth-table check with atoms and modal subformulas as independent variables."""
    variables = skeleton_variables(f)
    n = len(variables)
    if n > cap:
        raise TooManyAtoms(f"{n} propositional variables exceed the cap of {cap}")
    # bit-parallel: bit k of each mask is the value under assignment k
    rows = 1 << n
    full = (1 << rows) - 1
    masks = {}
    for i, var in enumerate(variables):
        # variable i is true on the upper half of every block of 2^(i+1) rows
        half = 1 << i
        m = ((1 << half) - 1) << half
        width = 2 * half
        while width < rows:
            m |= m << width
            width *= 2
        masks[var] = m

    def ev(g: Formula) -> int:
        if isinstance(g, (Atom,) + MODAL):
            return masks[g]
        if isinstance(g, Top):
            return full
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Not):
            return full & ~ev(g.arg)
        left, right = ev(g.left), ev(g.right)
        if isinstance(g, And):
            return left & right
        if isinstance(g, Or):
            return left | right
        if isinstance(g, Imp):
            return (full & ~left) | right
        return full & ~(left ^ right)

    return ev(f) == full


def truth_table_tautology(f: Formula) -> bool:
    """Slow reference check: enumerate every assignment explicitly."""
    variables = skeleton_variables(f)
    return all(
        eval_skeleton(f, dict(zip(variables, row)))
        for row in product((False, True), repeat=len(variables))
    )
