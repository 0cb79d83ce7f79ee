"""Auxiliary-colour models and their share models over a cyclic group.

The share construction splits the identity of each auxiliary facet ``X`` into
per-agent shares ``sigma(a)`` in ``Z_m`` that sum to the facet's code
``code(X)``. Facet codes are the enumeration indices of the auxiliary facets
in canonical order, so they are injective whenever ``m >= |Fac|``; that and
subtraction in the group are all the construction relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .checker import Evaluator
from .complex import AUX_COLOUR, FacetId, facet_id, facet_key, validate_complex
from .errors import ModulusTooSmall, NotIndistinguishable, ReservedColourInUse, SingleAgent
from .logic import Formula, to_text
from .model import SecrecyModel, validate_model


def to_aux(m: SecrecyModel) -> SecrecyModel:
    """Give every facet its own fresh ``*``-coloured vertex."""
    if m.is_aux:
        raise ReservedColourInUse(f"colour {AUX_COLOUR!r} is already used by this model")
    colour = dict(m.complex.colour)
    new_facet: dict[FacetId, FacetId] = {}
    for f in m.facets:
        star = AUX_COLOUR + ".".join(f)
        if star in colour:
            raise ReservedColourInUse(f"vertex name {star!r} is taken")
        colour[star] = AUX_COLOUR
        new_facet[f] = facet_id(f + (star,))
    complex_ = validate_complex(sorted(m.complex.agents | {AUX_COLOUR}), colour, new_facet.values())
    valuation = {new_facet[f]: atoms for f, atoms in m.valuation.items()}
    neighborhoods = {v: [[new_facet[f] for f in U] for U in events] for v, events in m.neighborhoods.items()}
    return validate_model(complex_, valuation, neighborhoods)


def share_vertex(agent: str, vertex: str, g: int) -> str:
    return f"{agent}@{vertex}#{g}"


@dataclass(frozen=True)
class ShareModel:
    """The share model of an auxiliary model, with the bookkeeping to move between the two."""

    model: SecrecyModel
    aux: SecrecyModel
    modulus: int
    agents: tuple[str, ...]
    codes: dict[FacetId, int]
    origin: dict[FacetId, tuple[FacetId, tuple[int, ...]]] = field(repr=False)

    @cached_property
    def _by_pair(self) -> dict[tuple[FacetId, tuple[int, ...]], FacetId]:
        return {pair: f for f, pair in self.origin.items()}

    def facet(self, x: FacetId, sigma) -> FacetId:
        """The share facet ``X^sigma``; ``sigma`` is a dict or a tuple ordered like :attr:`agents`."""
        if isinstance(sigma, dict):
            sigma = tuple(sigma[a] for a in self.agents)
        return self._by_pair[(tuple(x), tuple(g % self.modulus for g in sigma))]

    def sigma(self, share_facet: FacetId) -> dict[str, int]:
        return dict(zip(self.agents, self.origin[share_facet][1]))

    def lift(self, event) -> frozenset[FacetId]:
        event = set(event)
        return frozenset(f for f, (x, _) in self.origin.items() if x in event)

    @cached_property
    def _by_aux(self) -> dict[FacetId, list[FacetId]]:
        out: dict[FacetId, list[FacetId]] = {x: [] for x in self.aux.facets}
        for f, (x, _) in self.origin.items():
            out[x].append(f)
        return out


def facet_codes(aux: SecrecyModel) -> dict[FacetId, int]:
    return {x: i for i, x in enumerate(aux.facets)}


def _assignments(code: int, n: int, m: int):
    """All sigma in Z_m^n summing to ``code``: free choice for all but the last agent."""
    for head in product(range(m), repeat=n - 1):
        yield head + ((code - sum(head)) % m,)


def build_share_model(aux: SecrecyModel, modulus: int | None = None) -> ShareModel:
    agents = tuple(sorted(aux.agents))
    if len(agents) < 2:
        raise SingleAgent("the share construction needs at least two agents")
    codes = facet_codes(aux)
    m = len(codes) if modulus is None else modulus
    if m < len(codes):
        raise ModulusTooSmall(f"modulus {m} cannot encode {len(codes)} facets injectively")

    colour: dict[str, str] = {}
    base: dict[str, str] = {}
    facets: list[FacetId] = []
    origin: dict[FacetId, tuple[FacetId, tuple[int, ...]]] = {}
    valuation: dict[FacetId, frozenset[str]] = {}
    for x, code in codes.items():
        local = [aux.complex.vertex_of_colour(x, a) for a in agents]
        for sigma in _assignments(code, len(agents), m):
            names = [share_vertex(a, v, g) for a, v, g in zip(agents, local, sigma)]
            for a, v, name in zip(agents, local, names):
                colour[name] = a
                base[name] = v
            f = facet_id(names)
            facets.append(f)
            origin[f] = (x, sigma)
            valuation[f] = aux.valuation[x]

    complex_ = validate_complex(agents, colour, facets)
    by_aux: dict[FacetId, list[FacetId]] = {}
    for f, (x, _) in origin.items():
        by_aux.setdefault(x, []).append(f)

    def lift(U):
        return [f for x in U for f in by_aux[x]]

    neighborhoods = {}
    for name in colour:
        events = aux.neighborhoods.get(base[name], ())
        if events:
            neighborhoods[name] = [lift(U) for U in events]
    model = validate_model(complex_, valuation, neighborhoods)
    return ShareModel(model, aux, m, agents, codes, origin)


@dataclass(frozen=True)
class Disagreement:
    formula: Formula
    aux_facet: FacetId
    sigma: tuple[int, ...]
    aux_value: bool
    share_value: bool

    def __str__(self) -> str:
        return (
            f"{to_text(self.formula)} at {facet_key(self.aux_facet)} sigma={list(self.sigma)}: "
            f"aux={self.aux_value} share={self.share_value}"
        )


@dataclass
class RepresentationReport:
    checks: int = 0
    disagreements: list[Disagreement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def check_representation(aux: SecrecyModel, sh: ShareModel, pool) -> RepresentationReport:
    """Compare every formula of ``pool`` at every aux facet against all of its share facets."""
    aux_eval, sh_eval = Evaluator(aux), Evaluator(sh.model)
    report = RepresentationReport()
    for phi in pool:
        aux_mask, sh_mask = aux_eval.mask(phi), sh_eval.mask(phi)
        for f, (x, sigma) in sh.origin.items():
            want = bool(aux_mask >> aux.index[x] & 1)
            got = bool(sh_mask >> sh.model.index[f] & 1)
            report.checks += 1
            if want != got:
                report.disagreements.append(Disagreement(phi, x, sigma, want, got))
    return report


def share_completion_witness(sh: ShareModel, share_facet: FacetId, agent: str, y: FacetId) -> dict[str, int]:
    """Shares for ``y`` agreeing with ``share_facet`` on ``agent``'s share.

    The partner agent absorbs the difference; every other agent gets 0.
    """
    if len(sh.agents) < 2:
        raise SingleAgent("share completion needs a second agent")
    x, sigma = sh.origin[share_facet]
    if not sh.aux.complex.indistinguishable(agent, x, y):
        raise NotIndistinguishable(f"{facet_key(x)} and {facet_key(y)} differ for {agent}")
    own = dict(zip(sh.agents, sigma))[agent]
    partner = next(b for b in sh.agents if b != agent)
    tau = {c: 0 for c in sh.agents}
    tau[agent] = own
    tau[partner] = (sh.codes[y] - own) % sh.modulus
    return tau


def share_uniqueness_holds(sh: ShareModel) -> bool:
    """(X, sigma) -> X^sigma is injective, and each X^sigma decodes back to its own pair."""
    seen: dict[FacetId, tuple] = {}
    for x, code in sh.codes.items():
        for sigma in _assignments(code, len(sh.agents), sh.modulus):
            names = facet_id(
                share_vertex(a, sh.aux.complex.vertex_of_colour(x, a), g) for a, g in zip(sh.agents, sigma)
            )
            if names in seen:
                return False
            seen[names] = (x, sigma)
    return seen == dict(sh.origin)

