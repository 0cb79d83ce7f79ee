"""Bounded model enumeration, random models and countermodel search.

Geometries are drawn from the grid of local states: agent ``i`` is named by
the ``i``-th lowercase letter and owns the vertices ``a0, a1, ...``. Under
the ``full-grid`` policy the facets are every combination of one local state
per agent; under ``all-nonempty-subsets`` any nonempty set of grid facets is
a geometry (unused vertices are dropped).

:func:`check_validity_bounded` does not walk :func:`enumerate_models`
literally. A formula only sees an event at vertex ``v`` when it is the truth
set of the argument of some ``S`` subformula and contains ``St(v)``, so the
search enumerates geometries and valuations of the formula's atoms and then
branches only on those designations, in subformula order. The verdict is the
same as checking every model with at most ``max_events`` arbitrary events per
vertex.
"""

from __future__ import annotations

import random
import string
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

from .checker import satisfies
from .complex import ChromaticComplex, FacetId, validate_complex
from .errors import BoundsTooLarge, UnknownAgent
from .logic import And, Atom, Bot, Formula, Iff, Imp, K, Not, Or, S, Top, agents, atoms, subformulas
from .model import SecrecyModel, sn_holds_at, validate_model

POLICIES = ("full-grid", "all-nonempty-subsets")
DEFAULT_CAP = 10**7
# subset geometries and event masks are enumerated as bitmasks over the grid
_MAX_ENUMERABLE_FACETS = 20


@dataclass(frozen=True)
class SearchBounds:
    agents: int = 2
    states: int = 3
    atoms: tuple[str, ...] = ("p", "r")
    max_events: int = 2
    policy: str = "full-grid"
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.agents < 1 or self.agents > 26:
            raise ValueError("agents must be between 1 and 26")
        if self.states < 1:
            raise ValueError("states must be at least 1")
        if self.max_events < 0:
            raise ValueError("max_events must be nonnegative")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown facet policy {self.policy!r}; expected one of {POLICIES}")
        object.__setattr__(self, "atoms", tuple(dict.fromkeys(self.atoms)))

    @property
    def agent_names(self) -> tuple[str, ...]:
        return tuple(string.ascii_lowercase[: self.agents])


@dataclass
class SearchResult:
    verdict: str  # "ValidUpToBound" or "Countermodel"
    model: SecrecyModel | None = None
    facet: FacetId | None = None
    models_examined: int = 0
    elapsed: float = field(default=0.0, repr=False)

    @property
    def found(self) -> bool:
        return self.verdict == "Countermodel"


# --------------------------------------------------------------------------
# geometries

def _grid(names, counts) -> list[FacetId]:
    rows = [[f"{a}{i}" for i in range(n)] for a, n in zip(names, counts)]
    return [tuple(sorted(f)) for f in product(*rows)]


def _complex_of(names, facets) -> ChromaticComplex:
    colour = {v: v.rstrip(string.digits) for f in facets for v in f}
    return validate_complex(list(names), colour, facets)


def _geometry_sizes(b: SearchBounds) -> list[int]:
    """Facet count of every geometry, in enumeration order."""
    n = b.states ** b.agents
    if b.policy == "full-grid":
        return [n]
    if n > _MAX_ENUMERABLE_FACETS:
        raise BoundsTooLarge(f"{n} grid facets: too many to enumerate facet subsets")
    return [bin(s).count("1") for s in range(1, 1 << n)]


def geometries(b: SearchBounds):
    """Every complex allowed by the bounds, in a fixed order."""
    names = b.agent_names
    grid = _grid(names, [b.states] * b.agents)
    if b.policy == "full-grid":
        yield _complex_of(names, grid)
        return
    _geometry_sizes(b)
    for s in range(1, 1 << len(grid)):
        yield _complex_of(names, [f for i, f in enumerate(grid) if s >> i & 1])


def _count_with_valuations(b: SearchBounds, n_atoms: int) -> int:
    return sum(2 ** (n_atoms * size) for size in _geometry_sizes(b))


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise BoundsTooLarge(f"{what}: {count} exceeds the cap of {cap}")


def _shell(c: ChromaticComplex) -> SecrecyModel:
    # masks and star lookups only; no valuation, no events
    return SecrecyModel(c, {f: frozenset() for f in c.facets}, {})


def _valid_events(shell: SecrecyModel) -> dict[str, list[int]]:
    out = {}
    for a in sorted(shell.agents):
        for v in shell.complex.vertices_of_colour(a):
            out[v] = [U for U in range(1 << len(shell.facets)) if sn_holds_at(shell, v, U)]
    return out


# --------------------------------------------------------------------------
# exhaustive enumeration

def count_models(b: SearchBounds) -> int:
    """Exact length of :func:`enumerate_models` for these bounds (raises if hopeless)."""
    _check_cap(_count_with_valuations(b, len(b.atoms)), b.cap, "geometries x valuations")
    total = 0
    for c in geometries(b):
        if len(c.facets) > _MAX_ENUMERABLE_FACETS:
            raise BoundsTooLarge(f"{len(c.facets)} facets: too many to enumerate events")
        per = 2 ** (len(b.atoms) * len(c.facets))
        for masks in _valid_events(_shell(c)).values():
            per *= sum(comb(len(masks), j) for j in range(b.max_events + 1))
        total += per
        _check_cap(total, b.cap, "model count")
    return total


def enumerate_models(b: SearchBounds):
    """Every valid model within the bounds, in a fixed order.

    Per vertex, the neighborhood is any set of at most ``max_events`` events
    that pass the external-uncertainty check there; events are arbitrary
    facet sets. Raises :class:`BoundsTooLarge` up front if the exact count
    exceeds ``b.cap``.
    """
    count_models(b)
    atom_subsets = [frozenset(c) for k in range(len(b.atoms) + 1) for c in combinations(b.atoms, k)]
    for c in geometries(b):
        shell = _shell(c)
        events = _valid_events(shell)
        # valuation-independent caches can be shared by every model on this geometry
        geometry_cache = {k: getattr(shell, k) for k in ("agents", "index", "full_mask", "star_masks", "class_masks")}
        verts = list(events)
        choices = [
            [frozenset(map(shell.unmask, ch)) for j in range(b.max_events + 1) for ch in combinations(events[v], j)]
            for v in verts
        ]
        for val in product(atom_subsets, repeat=len(c.facets)):
            valuation = dict(zip(c.facets, val))
            for pick in product(*choices):
                nbhd = {v: ch for v, ch in zip(verts, pick) if ch}
                m = SecrecyModel(c, valuation, nbhd)
                m.__dict__.update(geometry_cache)
                yield m


# --------------------------------------------------------------------------
# random models

def random_model(seed: int, b: SearchBounds = SearchBounds(), event_rate: float = 0.7, tries: int = 20) -> SecrecyModel:
    """A valid model drawn deterministically from ``seed``.

    Each agent gets between 1 and ``b.states`` local states. Events are
    proposed from atom truth sets, supersets of the owner's star and
    arbitrary facet sets, and kept only if they pass the external-uncertainty
    check; a vertex that runs out of ``tries`` simply keeps fewer events.
    """
    rng = random.Random(seed)
    names = b.agent_names
    grid = _grid(names, [rng.randint(1, b.states) for _ in names])
    if b.policy == "full-grid":
        facets = grid
    else:
        facets = [f for f in grid if rng.random() < 0.5] or [rng.choice(grid)]
    c = _complex_of(names, facets)
    valuation = {f: frozenset(p for p in b.atoms if rng.random() < 0.5) for f in c.facets}
    shell = SecrecyModel(c, valuation, {})
    full = shell.full_mask
    atom_masks = [shell.atom_masks.get(p, 0) for p in b.atoms] or [0]

    def propose(v: str) -> int:
        kind = rng.randrange(3)
        if kind == 0:
            m = rng.choice(atom_masks)
            if rng.random() < 0.5:
                m = full & ~m
            if rng.random() < 0.4:
                other = rng.choice(atom_masks)
                m = m | other if rng.random() < 0.5 else m & other
            return m
        if kind == 1:
            return shell.star_masks[v] | rng.getrandbits(len(c.facets))
        return rng.getrandbits(len(c.facets))

    neighborhoods = {}
    for a in names:
        for v in c.vertices_of_colour(a):
            if rng.random() >= event_rate:
                continue
            want = rng.randint(1, max(b.max_events, 1)) if b.max_events else 0
            chosen: set[int] = set()
            for _ in range(tries):
                if len(chosen) >= want:
                    break
                U = propose(v)
                if sn_holds_at(shell, v, U):
                    chosen.add(U)
            if chosen:
                neighborhoods[v] = [shell.unmask(U) for U in sorted(chosen)]
    return validate_model(c, valuation, neighborhoods)


# --------------------------------------------------------------------------
# countermodel search

class _Found(Exception):
    def __init__(self, decided, facet_bit):
        self.decided = dict(decided)
        self.facet_bit = facet_bit


def check_validity_bounded(phi: Formula, b: SearchBounds = SearchBounds()) -> SearchResult:
    """Search the bounded class for a model and facet falsifying ``phi``."""
    start = time.perf_counter()
    unknown = sorted(agents(phi) - set(b.agent_names))
    if unknown:
        raise UnknownAgent(unknown[0])
    # atoms outside the formula never change its truth value; atoms of the
    # formula missing from the bounds still need to vary
    names = sorted(atoms(phi))
    _check_cap(_count_with_valuations(b, len(names)), b.cap, "geometries x valuations")

    subs = subformulas(phi)
    pos = {g: i for i, g in enumerate(subs)}
    examined = 0

    for c in geometries(b):
        shell = _shell(c)
        full = shell.full_mask
        classes = shell.class_masks
        sn_cache: dict[tuple[str, int], bool] = {}

        def sn_ok(v: str, U: int) -> bool:
            key = (v, U)
            hit = sn_cache.get(key)
            if hit is None:
                hit = sn_cache[key] = sn_holds_at(shell, v, U)
            return hit

        vals = [0] * len(subs)
        decided: dict[tuple[str, int], bool] = {}
        used: dict[str, int] = {}

        def run(i: int) -> None:
            nonlocal examined
            if i == len(subs):
                examined += 1
                top = vals[-1]
                if top != full:
                    missing = full & ~top
                    raise _Found(decided, (missing & -missing).bit_length() - 1)
                return
            g = subs[i]
            if isinstance(g, S):
                inner = vals[pos[g.arg]]
                pending = [
                    v for v, block in classes[g.agent]
                    if block & ~inner == 0 and (v, inner) not in decided and sn_ok(v, inner)
                ]
                branch(i, g, inner, pending, 0)
                return
            vals[i] = _step(g, vals, pos, full, classes, atom_masks)
            run(i + 1)

        def branch(i: int, g: S, inner: int, pending: list[str], j: int) -> None:
            if j == len(pending):
                out = 0
                for v, block in classes[g.agent]:
                    if block & ~inner == 0 and decided.get((v, inner)):
                        out |= block
                vals[i] = out
                run(i + 1)
                return
            v = pending[j]
            decided[(v, inner)] = False
            branch(i, g, inner, pending, j + 1)
            if used.get(v, 0) < b.max_events:
                decided[(v, inner)] = True
                used[v] = used.get(v, 0) + 1
                branch(i, g, inner, pending, j + 1)
                used[v] -= 1
            del decided[(v, inner)]

        for masks in product(range(1 << len(c.facets)), repeat=len(names)):
            atom_masks = dict(zip(names, masks))
            try:
                run(0)
            except _Found as hit:
                model = _materialize(shell, atom_masks, hit.decided)
                facet = shell.facets[hit.facet_bit]
                if satisfies(model, facet, phi):
                    raise AssertionError(f"search produced a non-countermodel for {phi}")
                return SearchResult("Countermodel", model, facet, examined, time.perf_counter() - start)
    return SearchResult("ValidUpToBound", None, None, examined, time.perf_counter() - start)


def _step(g: Formula, vals, pos, full: int, classes, atom_masks) -> int:
    if isinstance(g, Atom):
        return atom_masks.get(g.name, 0)
    if isinstance(g, Top):
        return full
    if isinstance(g, Bot):
        return 0
    if isinstance(g, Not):
        return full & ~vals[pos[g.arg]]
    if isinstance(g, K):
        inner = vals[pos[g.arg]]
        out = 0
        for _, block in classes[g.agent]:
            if block & ~inner == 0:
                out |= block
        return out
    left, right = vals[pos[g.left]], vals[pos[g.right]]
    if isinstance(g, And):
        return left & right
    if isinstance(g, Or):
        return left | right
    if isinstance(g, Imp):
        return (full & ~left) | right
    if isinstance(g, Iff):
        return full & ~(left ^ right)
    raise TypeError(f"not a formula: {g!r}")


def _materialize(shell: SecrecyModel, atom_masks: dict[str, int], decided) -> SecrecyModel:
    c = shell.complex
    valuation = {f: frozenset(p for p, m in atom_masks.items() if m >> i & 1) for i, f in enumerate(c.facets)}
    neighborhoods: dict[str, list] = {}
    for (v, U), on in sorted(decided.items()):
        if on:
            neighborhoods.setdefault(v, []).append(shell.unmask(U))
    return validate_model(c, valuation, neighborhoods)
