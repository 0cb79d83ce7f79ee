"""Pure chromatic simplicial complexes, stored by their facets.

Faces are never materialized: a complex is the agent set, the colouring of
the vertices and the family of facets. Every facet is identified by the
sorted tuple of its vertex names, so the order in which input lists its
vertices is irrelevant.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidComplex, UnknownAgent, UnknownFacet, UnknownVertex, Violation

FacetId = tuple[str, ...]

AUX_COLOUR = "*"

_AGENT_RE = re.compile(r"[A-Za-z0-9_]+")
_VERTEX_RE = re.compile(r"[^\s+]+")


def facet_id(vertices: Iterable[str]) -> FacetId:
    return tuple(sorted(set(vertices)))


def facet_key(facet: FacetId) -> str:
    """Human-writable key: sorted vertex names joined by ``+``."""
    return "+".join(facet)


def parse_facet_key(key: str) -> FacetId:
    return facet_id(part.strip() for part in key.split("+"))


@dataclass(frozen=True)
class ChromaticComplex:
    """A validated pure chromatic complex. Build it with :func:`validate_complex`."""

    agents: frozenset[str]
    colour: Mapping[str, str]
    facets: tuple[FacetId, ...]

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.colour))

    @cached_property
    def facet_set(self) -> frozenset[FacetId]:
        return frozenset(self.facets)

    @cached_property
    def _stars(self) -> dict[str, tuple[FacetId, ...]]:
        stars: dict[str, list[FacetId]] = {v: [] for v in self.colour}
        for facet in self.facets:
            for v in facet:
                stars[v].append(facet)
        return {v: tuple(fs) for v, fs in stars.items()}

    @cached_property
    def _vertex_by_colour(self) -> dict[FacetId, dict[str, str]]:
        return {X: {self.colour[v]: v for v in X} for X in self.facets}

    def vertices_of_colour(self, agent: str) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.colour[v] == agent)

    def check_facet(self, facet: FacetId) -> FacetId:
        facet = tuple(facet)
        if facet not in self.facet_set:
            raise UnknownFacet(facet_key(facet))
        return facet

    def vertex_of_colour(self, facet: FacetId, agent: str) -> str:
        """The unique vertex of colour ``agent`` in ``facet``."""
        facet = self.check_facet(facet)
        if agent not in self.agents:
            raise UnknownAgent(agent)
        return self._vertex_by_colour[facet][agent]

    def star(self, vertex: str) -> tuple[FacetId, ...]:
        """All facets containing ``vertex``, in canonical order."""
        try:
            return self._stars[vertex]
        except KeyError:
            raise UnknownVertex(vertex) from None

    def indistinguishable(self, agent: str, x: FacetId, y: FacetId) -> bool:
        return self.vertex_of_colour(x, agent) == self.vertex_of_colour(y, agent)

    def equivalence_classes(self, agent: str) -> list[tuple[FacetId, ...]]:
        """Partition of the facets by their ``agent``-vertex, ordered by vertex name."""
        if agent not in self.agents:
            raise UnknownAgent(agent)
        return [self._stars[v] for v in self.vertices_of_colour(agent)]

    def agent_class(self, agent: str, facet: FacetId) -> tuple[FacetId, ...]:
        return self._stars[self.vertex_of_colour(facet, agent)]


def validate_complex(
    agents: Iterable[str],
    vertices: Mapping[str, str] | Iterable[tuple[str, str]],
    facets: Iterable[Iterable[str]],
) -> ChromaticComplex:
    """Check every invariant of a pure chromatic complex.

    ``vertices`` maps vertex name to colour (a mapping or ``(name, colour)``
    pairs). Raises :class:`InvalidComplex` listing every problem found.
    """
    problems: list[Violation] = []
    agent_list = list(agents)
    agent_set = frozenset(agent_list)
    if not agent_set:
        problems.append(Violation("NoAgents", "the agent set must be nonempty"))
    if len(agent_set) != len(agent_list):
        problems.append(Violation("DuplicateAgent", f"agents {sorted(agent_list)} repeat a name"))
    for a in sorted(agent_set):
        if a != AUX_COLOUR and not _AGENT_RE.fullmatch(a):
            problems.append(Violation("BadName", f"agent name {a!r} is not a token"))

    pairs = list(vertices.items()) if isinstance(vertices, Mapping) else list(vertices)
    colour: dict[str, str] = {}
    for v, c in pairs:
        if v in colour:
            problems.append(Violation("DuplicateVertex", f"vertex {v!r} declared twice"))
        colour[v] = c
        if not _VERTEX_RE.fullmatch(v):
            problems.append(Violation("BadName", f"vertex name {v!r} is empty or contains '+'/whitespace"))
        if c not in agent_set:
            problems.append(Violation("UnknownColour", f"vertex {v!r} has colour {c!r} outside the agent set"))

    facet_list: list[FacetId] = []
    seen: set[FacetId] = set()
    for raw in facets:
        raw = list(raw)
        if not raw:
            problems.append(Violation("EmptyFacet", "a facet has no vertices"))
            continue
        fid = facet_id(raw)
        if fid in seen:
            continue
        seen.add(fid)
        facet_list.append(fid)
        unknown = [v for v in fid if v not in colour]
        if unknown:
            problems.append(Violation("UnknownVertex", f"facet {facet_key(fid)} uses undeclared {unknown}"))
            continue
        colours = [colour[v] for v in fid]
        dupes = sorted({c for c in colours if colours.count(c) > 1})
        if dupes:
            problems.append(
                Violation("DuplicateColourInFacet", f"facet {facet_key(fid)} has two vertices of colour {dupes}")
            )
        missing = sorted(agent_set - set(colours))
        if missing:
            problems.append(Violation("ImpureFacet", f"facet {facet_key(fid)} lacks colours {missing}"))
    if not facet_list:
        problems.append(Violation("NoFacets", "the complex has no facets"))

    covered = {v for fid in facet_list for v in fid}
    for v in sorted(set(colour) - covered):
        problems.append(Violation("OrphanVertex", f"vertex {v!r} lies in no facet"))

    # only facets of different sizes can be nested
    sizes = sorted({len(f) for f in facet_list})
    if len(sizes) > 1:
        as_sets = [(f, frozenset(f)) for f in facet_list]
        for f, fs in as_sets:
            for g, gs in as_sets:
                if len(f) < len(g) and fs < gs:
                    problems.append(
                        Violation("NonMaximalFacet", f"facet {facet_key(f)} is contained in {facet_key(g)}")
                    )

    if problems:
        raise InvalidComplex(problems)
    return ChromaticComplex(agent_set, dict(sorted(colour.items())), tuple(sorted(facet_list)))
