"""Satisfaction at facets, truth sets and model validity.

Two independent routes are provided. :func:`satisfies` follows the inductive
truth clauses literally on sets of facets; :class:`Evaluator` computes truth
sets bottom-up as bitmasks, once per subformula, and backs
:func:`truth_set` and :func:`valid_on`.
"""

from __future__ import annotations

from .complex import FacetId
from .errors import UnknownAgent
from .logic import And, Atom, Bot, Formula, Iff, Imp, K, Not, Or, S, Top, agents, subformulas
from .model import SecrecyModel


def _check_agents(m: SecrecyModel, f: Formula) -> None:
    unknown = sorted(agents(f) - m.agents)
    if unknown:
        raise UnknownAgent(unknown[0])


def satisfies(m: SecrecyModel, facet: FacetId, f: Formula) -> bool:
    """M, X |= f, computed straight from the truth clauses."""
    facet = m.complex.check_facet(facet)
    _check_agents(m, f)
    return _sat(m, facet, f)


def _sat(m: SecrecyModel, x: FacetId, f: Formula) -> bool:
    if isinstance(f, Atom):
        return f.name in m.valuation[x]
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not _sat(m, x, f.arg)
    if isinstance(f, And):
        return _sat(m, x, f.left) and _sat(m, x, f.right)
    if isinstance(f, Or):
        return _sat(m, x, f.left) or _sat(m, x, f.right)
    if isinstance(f, Imp):
        return not _sat(m, x, f.left) or _sat(m, x, f.right)
    if isinstance(f, Iff):
        return _sat(m, x, f.left) == _sat(m, x, f.right)
    if isinstance(f, K):
        v = m.complex.vertex_of_colour(x, f.agent)
        return all(_sat(m, y, f.arg) for y in m.complex.star(v))
    if isinstance(f, S):
        if not _sat(m, x, K(f.agent, f.arg)):
            return False
        extension = frozenset(y for y in m.facets if _sat(m, y, f.arg))
        return extension in m.neighborhood(m.complex.vertex_of_colour(x, f.agent))
    raise TypeError(f"not a formula: {f!r}")


class Evaluator:
    """Bottom-up truth sets for one model, memoized per subformula.

    Models are immutable, so the cache never goes stale; an evaluator may be
    reused across many formulas on the same model.
    """

    def __init__(self, model: SecrecyModel):
        self.model = model
        self.full = model.full_mask
        self._cache: dict[Formula, int] = {}

    def mask(self, f: Formula) -> int:
        cache = self._cache
        hit = cache.get(f)
        if hit is not None:
            return hit
        _check_agents(self.model, f)
        for g in subformulas(f):
            if g not in cache:
                cache[g] = self._step(g)
        return cache[f]

    def _step(self, g: Formula) -> int:
        m, c, full = self.model, self._cache, self.full
        if isinstance(g, Atom):
            return m.atom_masks.get(g.name, 0)
        if isinstance(g, Top):
            return full
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Not):
            return full & ~c[g.arg]
        if isinstance(g, And):
            return c[g.left] & c[g.right]
        if isinstance(g, Or):
            return c[g.left] | c[g.right]
        if isinstance(g, Imp):
            return (full & ~c[g.left]) | c[g.right]
        if isinstance(g, Iff):
            return full & ~(c[g.left] ^ c[g.right])
        inner = c[g.arg]
        out = 0
        if isinstance(g, K):
            for _, block in m.class_masks[g.agent]:
                if block & ~inner == 0:
                    out |= block
            return out
        nbhd = m.neighborhood_masks
        for v, block in m.class_masks[g.agent]:
            if block & ~inner == 0 and inner in nbhd.get(v, ()):
                out |= block
        return out

    def truth_set(self, f: Formula) -> frozenset[FacetId]:
        return self.model.unmask(self.mask(f))

    def valid(self, f: Formula) -> bool:
        return self.mask(f) == self.full

    def holds(self, facet: FacetId, f: Formula) -> bool:
        return bool(self.mask(f) >> self.model.index[self.model.complex.check_facet(facet)] & 1)


def truth_set(m: SecrecyModel, f: Formula) -> frozenset[FacetId]:
    """The set of facets satisfying ``f``."""
    return Evaluator(m).truth_set(f)


def valid_on(m: SecrecyModel, f: Formula) -> bool:
    return Evaluator(m).valid(f)
