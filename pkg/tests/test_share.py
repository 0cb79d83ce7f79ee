import dataclasses
import random
from itertools import chain, combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import AUX_FIXTURES, load_fixture, pool
from simsec.checker import satisfies
from simsec.complex import AUX_COLOUR, validate_complex
from simsec.documents import dumps_model, loads_model
from simsec.errors import ModulusTooSmall, NotIndistinguishable, ReservedColourInUse, SingleAgent
from simsec.logic import Top, parse
from simsec.model import check_SN, validate_model
from simsec.search import SearchBounds, random_model
from simsec.share import (
    build_share_model,
    check_representation,
    share_completion_witness,
    share_uniqueness_holds,
    to_aux,
)

POOL10 = pool("pool10")
SECRECY_POOL = [parse(t) for t in ("p", "r", "K{a} p", "S{a} p", "S{a} S{a} p", "S{a}(p | r)", "S{a} p & S{a} r",
                                 "S{a}(p & r)", "K{b} ~S{a} p", "~K{b} p & ~K{b} ~p")]


def subsets(xs):
    return chain.from_iterable(combinations(xs, k) for k in range(len(xs) + 1))


def test_to_aux_running_example(running):
    aux = to_aux(running)
    assert len(aux.facets) == 9
    assert aux.agents == {"a", "b"}
    assert aux.complex.agents == {"a", "b", AUX_COLOUR}
    for x in aux.facets:
        assert len(x) == 3
        assert {aux.complex.colour[v] for v in x} == {"a", "b", AUX_COLOUR}
    # ~* is the identity on facets
    for block in aux.complex.equivalence_classes(AUX_COLOUR):
        assert len(block) == 1
    for f in SECRECY_POOL:
        got = sorted(tuple(v for v in x if not v.startswith("*")) for x in aux.facets if satisfies(aux, x, f))
        want = sorted(x for x in running.facets if satisfies(running, x, f))
        assert got == want


def test_to_aux_single_facet_and_reserved_colour():
    c = validate_complex(["a"], {"v": "a"}, [["v"]])
    aux = to_aux(validate_model(c))
    assert len(aux.facets) == 1
    with pytest.raises(ReservedColourInUse):
        to_aux(aux)


def test_two_facet_share_model():
    aux = load_fixture("aux-line")
    sh = build_share_model(aux, 2)
    assert len(sh.model.facets) == 4
    assert sh.lift([]) == frozenset()


@pytest.mark.parametrize("name", AUX_FIXTURES)
def test_facet_count_and_validity(name):
    aux = load_fixture(name)
    n = len(aux.facets)
    for m in (n, n + 1):
        sh = build_share_model(aux, m)
        assert len(sh.model.facets) == n * m ** (len(aux.agents) - 1)
        assert check_SN(sh.model) == []
        assert loads_model(dumps_model(sh.model)) == sh.model
        assert share_uniqueness_holds(sh)


def test_share_vertex_names():
    sh = build_share_model(load_fixture("aux-line"))
    assert all("@" in v and "#" in v for v in sh.model.complex.vertices)
    x = sh.aux.facets[0]
    assert sh.facet(x, {"a": 0, "b": 0}) == ("a@a0#0", "b@b0#0")
    assert sh.sigma(("a@a0#0", "b@b0#0")) == {"a": 0, "b": 0}


def test_modulus_and_agent_preconditions():
    aux = load_fixture("aux-grid")
    with pytest.raises(ModulusTooSmall):
        build_share_model(aux, 3)
    c = validate_complex(["a"], {"v": "a", "w": "a"}, [["v"], ["w"]])
    with pytest.raises(SingleAgent):
        build_share_model(to_aux(validate_model(c)))


def test_lift_is_injective_on_all_events():
    aux = load_fixture("aux-path")
    sh = build_share_model(aux)
    lifts = {}
    for event in subsets(aux.facets):
        lifted = sh.lift(event)
        assert lifted not in lifts
        lifts[lifted] = event
    assert len(lifts) == 2 ** len(aux.facets)


def test_lift_is_injective_on_random_pairs():
    rng = random.Random(3)
    aux = to_aux(random_model(11, SearchBounds(agents=2, states=3)))
    sh = build_share_model(aux)
    for _ in range(100):
        u = frozenset(x for x in aux.facets if rng.random() < 0.5)
        w = frozenset(x for x in aux.facets if rng.random() < 0.5)
        assert (sh.lift(u) == sh.lift(w)) == (u == w)


@pytest.mark.parametrize("name", AUX_FIXTURES)
def test_representation_on_fixtures(name):
    aux = load_fixture(name)
    sh = build_share_model(aux)
    report = check_representation(aux, sh, POOL10 + [Top()])
    assert report.ok, [str(d) for d in report.disagreements]
    assert report.checks == len(sh.model.facets) * (len(POOL10) + 1)


def test_representation_on_running_example(running):
    aux = to_aux(running)
    sh = build_share_model(aux, 9)
    assert len(sh.model.facets) == 81
    assert check_representation(aux, sh, SECRECY_POOL).ok


def test_corrupted_share_model_is_caught():
    aux = load_fixture("aux-grid")
    sh = build_share_model(aux)
    owner = next(v for v, events in sh.model.neighborhoods.items() if events)
    nbhd = {v: list(e) for v, e in sh.model.neighborhoods.items() if v != owner}
    broken = validate_model(sh.model.complex, sh.model.valuation, nbhd)
    report = check_representation(aux, dataclasses.replace(sh, model=broken), POOL10)
    assert not report.ok
    assert all("S{" in str(d.formula) for d in report.disagreements)


def test_completion_two_agents():
    aux = load_fixture("aux-grid")
    sh = build_share_model(aux)
    x = aux.facets[0]
    for y in aux.complex.agent_class("a", x):
        for share in sh._by_aux[x]:
            sigma = sh.sigma(share)
            tau = share_completion_witness(sh, share, "a", y)
            assert tau["a"] == sigma["a"]
            assert tau["b"] == (sh.codes[y] - sigma["a"]) % sh.modulus
            assert sh.model.complex.indistinguishable("a", share, sh.facet(y, tau))


def test_completion_reflexive_and_errors():
    aux = load_fixture("aux-path")
    sh = build_share_model(aux)
    share = sh.model.facets[0]
    x = sh.origin[share][0]
    tau = share_completion_witness(sh, share, "b", x)
    assert tau["b"] == sh.sigma(share)["b"]
    assert sh.model.complex.indistinguishable("b", share, sh.facet(x, tau))
    stranger = next(y for y in aux.facets if not aux.complex.indistinguishable("a", x, y))
    with pytest.raises(NotIndistinguishable):
        share_completion_witness(sh, share, "a", stranger)


def test_completion_random_draws_three_agents():
    rng = random.Random(5)
    aux = load_fixture("aux-three")
    sh = build_share_model(aux)
    for _ in range(50):
        share = rng.choice(sh.model.facets)
        a = rng.choice(sh.agents)
        x = sh.origin[share][0]
        y = rng.choice(aux.complex.agent_class(a, x))
        tau = share_completion_witness(sh, share, a, y)
        assert sum(tau.values()) % sh.modulus == sh.codes[y]
        assert sh.model.complex.indistinguishable(a, share, sh.facet(y, tau))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_representation_on_random_aux_models(seed):
    m = random_model(seed, SearchBounds(agents=2, states=2))
    aux = to_aux(m)
    sh = build_share_model(aux)
    assert share_uniqueness_holds(sh)
    assert check_representation(aux, sh, POOL10).ok
