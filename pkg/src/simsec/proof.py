"""Hilbert-style derivations for SSL and a library of checked derived principles.

A derivation is a list of steps, each a formula with a justification:
an axiom scheme name (``A1 K T 4 5 S1 S2 S4``), modus ponens ``MP(i, j)``
(step ``j`` is ``step_i -> current``), knowledge necessitation ``Nec(i, a)``
or replacement of equivalents under secrecy ``RE(i, a)`` (step ``i`` is
``phi <-> psi`` and the current step is ``S{a} phi <-> S{a} psi``).
Indices are 0-based and must point backwards.

All comparisons happen on desugared formulas, so ``p -> q`` and
``~(p & ~q)`` are interchangeable everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .logic import (
    And,
    Atom,
    Formula,
    Iff,
    Imp,
    K,
    Not,
    S,
    Top,
    conj,
    desugar,
    parse,
    propositional_tautology,
    to_text,
)

SCHEMES = ("A1", "K", "T", "4", "5", "S1", "S2", "S4")


@dataclass(frozen=True)
class Meta(Atom):
    """Formula metavariable inside a scheme pattern."""


@dataclass(frozen=True)
class MP:
    i: int
    j: int


@dataclass(frozen=True)
class Nec:
    i: int
    agent: str


@dataclass(frozen=True)
class RE:
    i: int
    agent: str


Justification = Union[str, MP, Nec, RE]


@dataclass(frozen=True)
class Step:
    formula: Formula
    by: Justification


@dataclass(frozen=True)
class Derivation:
    name: str
    steps: tuple[Step, ...]

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula


class StepError(Exception):
    def __init__(self, index: int, reason: str, detail: str = ""):
        self.index = index
        self.reason = reason
        self.detail = detail
        super().__init__(f"step {index}: {reason}" + (f" ({detail})" if detail else ""))


# --------------------------------------------------------------------------
# scheme matching

_PHI, _PSI = Meta("phi"), Meta("psi")

_PATTERNS = {
    "K": Imp(K("?a", Imp(_PHI, _PSI)), Imp(K("?a", _PHI), K("?a", _PSI))),
    "T": Imp(K("?a", _PHI), _PHI),
    "4": Imp(K("?a", _PHI), K("?a", K("?a", _PHI))),
    "5": Imp(Not(K("?a", _PHI)), K("?a", Not(K("?a", _PHI)))),
    "S1": Imp(S("?a", _PHI), K("?a", _PHI)),
    "S2": Imp(S("?a", _PHI), Not(K("?b", _PHI))),
    "S4": Imp(S("?a", _PHI), K("?a", S("?a", _PHI))),
}
_DESUGARED = {name: desugar(p) for name, p in _PATTERNS.items()}


def scheme_pattern(scheme: str) -> Formula:
    return _PATTERNS[scheme]


def match(pattern: Formula, target: Formula, binding: dict | None = None) -> dict | None:
    """Extend ``binding`` so that ``pattern`` instantiates to ``target``, or return None.

    Metavariables are :class:`Meta` nodes; agent names starting with ``?``
    are agent metavariables.
    """
    binding = dict(binding or {})
    return binding if _match(pattern, target, binding) else None


def _bind(binding: dict, key, value) -> bool:
    if key in binding:
        return binding[key] == value
    binding[key] = value
    return True


def _match(p: Formula, t: Formula, b: dict) -> bool:
    if type(p) is Meta:
        return _bind(b, p, t)
    if type(p) is not type(t):
        return False
    if isinstance(p, (K, S)):
        if p.agent.startswith("?"):
            if not _bind(b, p.agent, t.agent):
                return False
        elif p.agent != t.agent:
            return False
        return _match(p.arg, t.arg, b)
    if isinstance(p, Not):
        return _match(p.arg, t.arg, b)
    if hasattr(p, "left"):
        return _match(p.left, t.left, b) and _match(p.right, t.right, b)
    return p == t


def instantiate(pattern: Formula, binding: dict) -> Formula:
    """Replace metavariables and ``?``-agents in ``pattern`` by their bindings."""
    if type(pattern) is Meta:
        return binding[pattern]
    if isinstance(pattern, (K, S)):
        agent = binding.get(pattern.agent, pattern.agent)
        return type(pattern)(agent, instantiate(pattern.arg, binding))
    if isinstance(pattern, Not):
        return Not(instantiate(pattern.arg, binding))
    if hasattr(pattern, "left"):
        return type(pattern)(instantiate(pattern.left, binding), instantiate(pattern.right, binding))
    return pattern


def scheme_instance(scheme: str, phi: Formula, psi: Formula | None = None, a: str = "a", b: str = "b") -> Formula:
    return instantiate(_PATTERNS[scheme], {_PHI: phi, _PSI: psi if psi is not None else phi, "?a": a, "?b": b})


def check_axiom_instance(scheme: str, f: Formula) -> bool:
    if scheme == "A1":
        return propositional_tautology(f)
    if scheme not in _DESUGARED:
        raise ValueError(f"unknown axiom scheme {scheme!r}")
    binding = match(_DESUGARED[scheme], desugar(f))
    if binding is None:
        return False
    if scheme == "S2" and binding["?a"] == binding["?b"]:
        return False
    return True


# --------------------------------------------------------------------------
# derivation checking

def _ref(k: int, i: int) -> None:
    if not isinstance(i, int) or i < 0 or i >= k:
        raise StepError(k, "ForwardReference", f"step {i} does not precede step {k}")


def check_derivation(d: Derivation) -> Formula:
    """Check every step; return the conclusion or raise :class:`StepError` at the first bad step."""
    if not d.steps:
        raise StepError(0, "EmptyDerivation")
    core: list[Formula] = []
    for k, step in enumerate(d.steps):
        cur = desugar(step.formula)
        by = step.by
        if isinstance(by, str):
            if by not in SCHEMES:
                raise StepError(k, "UnknownScheme", by)
            if not check_axiom_instance(by, step.formula):
                raise StepError(k, "BadAxiomMatch", f"not an instance of {by}")
        elif isinstance(by, MP):
            _ref(k, by.i)
            _ref(k, by.j)
            if core[by.j] != desugar(Imp(d.steps[by.i].formula, step.formula)):
                raise StepError(k, "BadMP", f"step {by.j} is not step {by.i} -> current")
        elif isinstance(by, Nec):
            _ref(k, by.i)
            if cur != K(by.agent, core[by.i]):
                raise StepError(k, "BadNec", f"current is not K{{{by.agent}}} of step {by.i}")
        elif isinstance(by, RE):
            _ref(k, by.i)
            premise = match(desugar(Iff(_PHI, _PSI)), core[by.i])
            if premise is None:
                raise StepError(k, "BadRE", f"step {by.i} is not a biconditional")
            want = desugar(Iff(S(by.agent, _PHI), S(by.agent, _PSI)))
            if match(want, cur, premise) is None:
                raise StepError(k, "BadRE", f"current is not S{{{by.agent}}} of both sides of step {by.i}")
        else:
            raise StepError(k, "UnknownJustification", repr(by))
        core.append(cur)
    return d.conclusion


# --------------------------------------------------------------------------
# JSON form

class DerivationFormatError(ValueError):
    pass


def _by_to_json(by: Justification):
    if isinstance(by, str):
        return by
    if isinstance(by, MP):
        return {"mp": [by.i, by.j]}
    if isinstance(by, Nec):
        return {"nec": [by.i, by.agent]}
    return {"re": [by.i, by.agent]}


def _by_from_json(raw) -> Justification:
    if isinstance(raw, str):
        return raw
    if isinstance(raw, dict) and len(raw) == 1:
        (kind, args), = raw.items()
        try:
            if kind == "mp":
                i, j = args
                return MP(int(i), int(j))
            if kind in ("nec", "re"):
                i, agent = args
                return (Nec if kind == "nec" else RE)(int(i), str(agent))
        except (TypeError, ValueError):
            pass
    raise DerivationFormatError(f"bad justification {raw!r}")


def derivation_to_json(d: Derivation) -> dict:
    return {"name": d.name, "steps": [{"formula": to_text(s.formula), "by": _by_to_json(s.by)} for s in d.steps]}


def derivation_from_json(doc) -> Derivation:
    if not isinstance(doc, dict) or not isinstance(doc.get("steps"), list):
        raise DerivationFormatError("derivation must be {\"name\": str, \"steps\": [...]}")
    steps = []
    for raw in doc["steps"]:
        if not isinstance(raw, dict) or "formula" not in raw or "by" not in raw:
            raise DerivationFormatError(f"bad step {raw!r}")
        steps.append(Step(parse(raw["formula"]), _by_from_json(raw["by"])))
    return Derivation(str(doc.get("name", "")), tuple(steps))


def load_derivation(path) -> Derivation:
    return derivation_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# --------------------------------------------------------------------------
# fixture library

class Builder:
    """Append-only derivation under construction; every method returns the new step index."""

    def __init__(self, name: str):
        self.name = name
        self.steps: list[Step] = []

    def __getitem__(self, i: int) -> Formula:
        return self.steps[i].formula

    def add(self, f: Formula, by: Justification) -> int:
        self.steps.append(Step(f, by))
        return len(self.steps) - 1

    def axiom(self, scheme: str, f: Formula) -> int:
        return self.add(f, scheme)

    def mp(self, i: int, j: int) -> int:
        imp = self[j]
        assert isinstance(imp, Imp) and imp.left == self[i], "MP premises do not fit"
        return self.add(imp.right, MP(i, j))

    def nec(self, i: int, agent: str) -> int:
        return self.add(K(agent, self[i]), Nec(i, agent))

    def kdist(self, i: int) -> int:
        """From ``K{a}(x -> y)`` at step ``i`` derive ``K{a} x -> K{a} y``."""
        kimp = self[i]
        a, x, y = kimp.agent, kimp.arg.left, kimp.arg.right
        ax = self.axiom("K", Imp(kimp, Imp(K(a, x), K(a, y))))
        return self.mp(i, ax)

    def under_k(self, i: int, agent: str) -> int:
        """From a theorem ``x -> y`` at step ``i`` derive ``K{agent} x -> K{agent} y``."""
        return self.kdist(self.nec(i, agent))

    def taut(self, premises: list[int], conclusion: Formula) -> int:
        """Propositional step: A1 instance ``P1 -> (P2 -> ... -> C)`` discharged by MP."""
        chain = conclusion
        for i in reversed(premises):
            chain = Imp(self[i], chain)
        cur = self.axiom("A1", chain)
        for i in premises:
            cur = self.mp(i, cur)
        return cur

    def build(self) -> Derivation:
        return Derivation(self.name, tuple(self.steps))


# Each helper below appends the steps of one derived principle and returns
# the index of its conclusion, so later principles can inline earlier ones.

def ssl_truth(d: Builder, phi: Formula, a: str) -> int:
    s1 = d.axiom("S1", Imp(S(a, phi), K(a, phi)))
    t = d.axiom("T", Imp(K(a, phi), phi))
    return d.taut([s1, t], Imp(S(a, phi), phi))


def secrecy_consistency(d: Builder, phi: Formula, a: str, b: str) -> int:
    """S{a} phi -> ~K{b} ~phi."""
    truth = ssl_truth(d, phi, a)
    t = d.axiom("T", Imp(K(b, Not(phi)), Not(phi)))
    return d.taut([truth, t], Imp(S(a, phi), Not(K(b, Not(phi)))))


def negative_introspection_of_secrecy(d: Builder, phi: Formula, a: str) -> int:
    """~S{a} phi -> K{a} ~S{a} phi."""
    s = S(a, phi)
    t = d.axiom("T", Imp(K(a, s), s))
    five = d.axiom("5", Imp(Not(K(a, s)), K(a, Not(K(a, s)))))
    s4 = d.axiom("S4", Imp(s, K(a, s)))
    contra = d.taut([s4], Imp(Not(K(a, s)), Not(s)))
    lifted = d.under_k(contra, a)
    return d.taut([t, five, lifted], Imp(Not(s), K(a, Not(s))))


def exact_owner_locality_pos(d: Builder, phi: Formula, a: str) -> int:
    s = S(a, phi)
    s4 = d.axiom("S4", Imp(s, K(a, s)))
    t = d.axiom("T", Imp(K(a, s), s))
    return d.taut([s4, t], Iff(s, K(a, s)))


def exact_owner_locality_neg(d: Builder, phi: Formula, a: str) -> int:
    ns = Not(S(a, phi))
    fwd = negative_introspection_of_secrecy(d, phi, a)
    t = d.axiom("T", Imp(K(a, ns), ns))
    return d.taut([fwd, t], Iff(ns, K(a, ns)))


def ssl_summary(d: Builder, phi: Formula, a: str, b: str) -> int:
    s = S(a, phi)
    s1 = d.axiom("S1", Imp(s, K(a, phi)))
    truth = ssl_truth(d, phi, a)
    s2 = d.axiom("S2", Imp(s, Not(K(b, phi))))
    cons = secrecy_consistency(d, phi, a, b)
    profile = conj(K(a, phi), phi, Not(K(b, phi)), Not(K(b, Not(phi))))
    return d.taut([s1, truth, s2, cons], Imp(s, profile))


def _known_to_owner(d: Builder, base: int, phi: Formula, a: str) -> int:
    """From ``S{a} phi -> X`` at ``base`` derive ``S{a} phi -> K{a} X``."""
    s = S(a, phi)
    lifted = d.under_k(base, a)
    s4 = d.axiom("S4", Imp(s, K(a, s)))
    return d.taut([s4, lifted], Imp(s, d[lifted].right))


def owner_knows_ignorance(d: Builder, phi: Formula, a: str, b: str, negated: bool = False) -> int:
    if negated:
        base = secrecy_consistency(d, phi, a, b)
    else:
        base = d.axiom("S2", Imp(S(a, phi), Not(K(b, phi))))
    return _known_to_owner(d, base, phi, a)


def higher_order_opacity(d: Builder, phi: Formula, a: str, b: str, negated: bool = False) -> int:
    s = S(a, phi)
    if negated:
        t = d.axiom("T", Imp(K(b, Not(s)), Not(s)))
        return d.taut([t], Imp(s, Not(K(b, Not(s)))))
    truth = ssl_truth(d, phi, a)
    lifted = d.under_k(truth, b)
    s2 = d.axiom("S2", Imp(s, Not(K(b, phi))))
    return d.taut([lifted, s2], Imp(s, Not(K(b, s))))


def no_foreign_secret(d: Builder, local: int, a: str, b: str) -> int:
    """From ``chi -> K{b} chi`` at step ``local`` derive ``~S{a} chi``."""
    chi = d[local].left
    truth = ssl_truth(d, chi, a)
    s2 = d.axiom("S2", Imp(S(a, chi), Not(K(b, chi))))
    return d.taut([local, truth, s2], Not(S(a, chi)))


def _local_fact(d: Builder, kind: str, psi: Formula, b: str) -> int:
    if kind == "K":
        return d.axiom("4", Imp(K(b, psi), K(b, K(b, psi))))
    if kind == "notK":
        return d.axiom("5", Imp(Not(K(b, psi)), K(b, Not(K(b, psi)))))
    if kind == "S":
        return d.axiom("S4", Imp(S(b, psi), K(b, S(b, psi))))
    return negative_introspection_of_secrecy(d, psi, b)


def no_secret_top(d: Builder, a: str, b: str) -> int:
    top = d.axiom("A1", Top())
    ktop = d.nec(top, b)
    s2 = d.axiom("S2", Imp(S(a, Top()), Not(K(b, Top()))))
    return d.taut([ktop, s2], Not(S(a, Top())))


def k_conjunction(d: Builder, psi1: Formula, psi2: Formula, a: str) -> int:
    both = And(psi1, psi2)
    t = d.axiom("A1", Imp(psi1, Imp(psi2, both)))
    first = d.under_k(t, a)
    second = d.axiom("K", Imp(K(a, Imp(psi2, both)), Imp(K(a, psi2), K(a, both))))
    return d.taut([first, second], Imp(And(K(a, psi1), K(a, psi2)), K(a, both)))


def replacement_example(d: Builder, phi: Formula, a: str) -> int:
    eq = d.axiom("A1", Iff(phi, Not(Not(phi))))
    return d.add(Iff(S(a, phi), S(a, Not(Not(phi)))), RE(eq, a))


def _derive(name: str, fn, *args) -> Derivation:
    d = Builder(name)
    fn(d, *args)
    return d.build()


def fixture_library(phi: Formula | None = None, psi: Formula | None = None, a: str = "a", b: str = "b") -> list[Derivation]:
    """The derived principles as checked derivations, instantiated at ``phi``/``psi`` (default ``p``/``q``)."""
    phi = phi if phi is not None else Atom("p")
    psi = psi if psi is not None else Atom("q")
    return [
        _derive("ssl-truth", ssl_truth, phi, a),
        _derive("secrecy-consistency", secrecy_consistency, phi, a, b),
        _derive("secrecy-negative-introspection", negative_introspection_of_secrecy, phi, a),
        _derive("exact-owner-locality-pos", exact_owner_locality_pos, phi, a),
        _derive("exact-owner-locality-neg", exact_owner_locality_neg, phi, a),
        _derive("ssl-summary", ssl_summary, phi, a, b),
        _derive("owner-knows-ignorance", owner_knows_ignorance, phi, a, b),
        _derive("owner-knows-ignorance-neg", owner_knows_ignorance, phi, a, b, True),
        _derive("higher-order-opacity", higher_order_opacity, phi, a, b),
        _derive("higher-order-opacity-neg", higher_order_opacity, phi, a, b, True),
        *[
            _derive(f"no-foreign-secret-{kind}", lambda d, k=kind: no_foreign_secret(d, _local_fact(d, k, psi, b), a, b))
            for kind in ("K", "notK", "S", "notS")
        ],
        _derive("no-secret-top", no_secret_top, a, b),
        _derive("k-conj", k_conjunction, phi, psi, a),
        _derive("replacement-of-equivalents", replacement_example, phi, a),
    ]
