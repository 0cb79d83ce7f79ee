"""Secrecy models: a chromatic complex plus valuation and secrecy neighborhoods.

Events (members of a neighborhood) are stored extensionally as frozensets of
facet ids. A model whose complex carries the reserved colour ``*`` is an
auxiliary-colour model: ``*`` is a colour of the complex but not a modal
agent, so it owns no neighborhoods and never acts as the blocking agent in
the external-uncertainty check.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .complex import AUX_COLOUR, ChromaticComplex, FacetId, facet_id, facet_key
from .errors import InvalidModel, Violation

Event = frozenset[FacetId]


@dataclass(frozen=True)
class SNViolation:
    """A (vertex, event, facet, blocked agent) quadruple with no witness facet."""

    vertex: str
    event: Event
    facet: FacetId
    blocked_agent: str

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "event": sorted(facet_key(f) for f in self.event),
            "facet": facet_key(self.facet),
            "blocked_agent": self.blocked_agent,
        }

    def __str__(self) -> str:
        return (
            f"at {self.vertex}, event {{{', '.join(sorted(facet_key(f) for f in self.event))}}} "
            f"covers the whole {self.blocked_agent}-class of {facet_key(self.facet)}"
        )


@dataclass(frozen=True)
class SNWitness:
    vertex: str
    event: Event
    facet: FacetId
    agent: str
    witness: FacetId


@dataclass(frozen=True)
class SecrecyModel:
    """A validated simplicial secrecy model. Build it with :func:`validate_model`."""

    complex: ChromaticComplex
    valuation: Mapping[FacetId, frozenset[str]]
    neighborhoods: Mapping[str, frozenset[Event]] = field(default_factory=dict)

    @property
    def facets(self) -> tuple[FacetId, ...]:
        return self.complex.facets

    @cached_property
    def agents(self) -> frozenset[str]:
        """The modal agents: every colour except the auxiliary one."""
        return self.complex.agents - {AUX_COLOUR}

    @property
    def is_aux(self) -> bool:
        return AUX_COLOUR in self.complex.agents

    def neighborhood(self, vertex: str) -> frozenset[Event]:
        self.complex.star(vertex)
        return self.neighborhoods.get(vertex, frozenset())

    # Bit-level view used by the bottom-up evaluator and the search.

    @cached_property
    def index(self) -> dict[FacetId, int]:
        return {f: i for i, f in enumerate(self.facets)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.facets)) - 1

    def mask(self, facets: Iterable[FacetId]) -> int:
        m = 0
        for f in facets:
            m |= 1 << self.index[f]
        return m

    def unmask(self, m: int) -> frozenset[FacetId]:
        return frozenset(f for i, f in enumerate(self.facets) if m >> i & 1)

    @cached_property
    def star_masks(self) -> dict[str, int]:
        return {v: self.mask(self.complex.star(v)) for v in self.complex.vertices}

    @cached_property
    def class_masks(self) -> dict[str, list[tuple[str, int]]]:
        """Per agent, the (vertex, star mask) pairs of that agent's vertices."""
        return {
            a: [(v, self.star_masks[v]) for v in self.complex.vertices_of_colour(a)]
            for a in self.complex.agents
        }

    @cached_property
    def neighborhood_masks(self) -> dict[str, frozenset[int]]:
        return {v: frozenset(self.mask(U) for U in events) for v, events in self.neighborhoods.items()}

    @cached_property
    def atom_masks(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f, atoms in self.valuation.items():
            for p in atoms:
                out[p] = out.get(p, 0) | 1 << self.index[f]
        return out


def _sn_gaps(m: SecrecyModel, vertex: str, event: Event):
    """Yield (facet, other agent, uncovered part of its class) for each facet in St(vertex)."""
    owner = m.complex.colour[vertex]
    for x in m.complex.star(vertex):
        for b in sorted(m.agents - {owner}):
            yield x, b, [y for y in m.complex.agent_class(b, x) if y not in event]


def check_SN(m: SecrecyModel) -> list[SNViolation]:
    """Every (vertex, event, facet, agent) quadruple at which external uncertainty fails."""
    out = []
    for v in sorted(m.neighborhoods):
        for U in sorted(m.neighborhoods[v], key=lambda e: sorted(e)):
            for x, b, outside in _sn_gaps(m, v, U):
                if not outside:
                    out.append(SNViolation(v, U, x, b))
    return out


def sn_witnesses(m: SecrecyModel) -> list[SNWitness]:
    """One witness per (vertex, event, facet, agent): the first facet of the class outside the event."""
    out = []
    for v in sorted(m.neighborhoods):
        for U in sorted(m.neighborhoods[v], key=lambda e: sorted(e)):
            for x, b, outside in _sn_gaps(m, v, U):
                if outside:
                    out.append(SNWitness(v, U, x, b, outside[0]))
    return out


def sn_holds_at(m: SecrecyModel, vertex: str, event_mask: int) -> bool:
    """Bitmask form of the external-uncertainty condition for one candidate event."""
    owner = m.complex.colour[vertex]
    others = [b for b in m.agents if b != owner]
    for x in m.complex.star(vertex):
        for b in others:
            if m.star_masks[m.complex.vertex_of_colour(x, b)] & ~event_mask == 0:
                return False
    return True


def validate_model(
    complex: ChromaticComplex,
    valuation: Mapping[FacetId, Iterable[str]] | None = None,
    neighborhoods: Mapping[str, Iterable[Iterable[FacetId]]] | None = None,
) -> SecrecyModel:
    """Attach a valuation and neighborhoods to a validated complex.

    Missing valuation entries are empty; missing neighborhoods are empty.
    Raises :class:`InvalidModel` with every structural problem and every
    SN violation.
    """
    problems: list[Violation] = []
    valuation = dict(valuation or {})
    neighborhoods = dict(neighborhoods or {})

    val: dict[FacetId, frozenset[str]] = {}
    for f, atoms in valuation.items():
        f = facet_id(f)
        if f not in complex.facet_set:
            problems.append(Violation("UnknownFacetInValuation", f"valuation names unknown facet {facet_key(f)}"))
            continue
        val[f] = frozenset(atoms)
    for f in complex.facets:
        val.setdefault(f, frozenset())

    nbhd: dict[str, frozenset[Event]] = {}
    for v, events in neighborhoods.items():
        if v not in complex.colour:
            problems.append(Violation("UnknownNeighborhoodVertex", f"neighborhood at unknown vertex {v!r}"))
            continue
        if complex.colour[v] == AUX_COLOUR:
            events = list(events)
            if events:
                problems.append(Violation("AuxVertexNeighborhood", f"auxiliary vertex {v!r} cannot own events"))
            continue
        good = set()
        for U in events:
            U = frozenset(facet_id(f) for f in U)
            unknown = [facet_key(f) for f in U if f not in complex.facet_set]
            if unknown:
                problems.append(Violation("UnknownFacetInEvent", f"event at {v!r} names unknown facets {sorted(unknown)}"))
                continue
            good.add(U)
        if good:
            nbhd[v] = frozenset(good)

    if not complex.agents - {AUX_COLOUR}:
        problems.append(Violation("NoModalAgents", "the only colour is the auxiliary one"))

    model = SecrecyModel(complex, dict(sorted(val.items())), dict(sorted(nbhd.items())))
    sn = [] if problems else check_SN(model)
    problems.extend(Violation("SNViolated", str(s)) for s in sn)
    if problems:
        raise InvalidModel(problems, sn)
    return model


def normalize_owner_local(m: SecrecyModel) -> SecrecyModel:
    """Keep at each vertex only the events that contain its whole star."""
    kept = {}
    for v, events in m.neighborhoods.items():
        star = frozenset(m.complex.star(v))
        local = frozenset(U for U in events if star <= U)
        if local:
            kept[v] = local
    return SecrecyModel(m.complex, m.valuation, kept)
