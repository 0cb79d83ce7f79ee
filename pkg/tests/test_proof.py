import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DERIVATION_NAMES, FIXTURES, formulas, load_fixture, mutate
from simsec.checker import Evaluator, valid_on
from simsec.logic import Atom, Imp, K, S, agents, desugar, parse, subformulas
from simsec.proof import (
    MP,
    RE,
    SCHEMES,
    Derivation,
    DerivationFormatError,
    Meta,
    Nec,
    Step,
    StepError,
    check_axiom_instance,
    check_derivation,
    derivation_from_json,
    derivation_to_json,
    fixture_library,
    instantiate,
    load_derivation,
    scheme_instance,
    scheme_pattern,
)
from simsec.search import SearchBounds, random_model

MODAL_SCHEMES = [s for s in SCHEMES if s != "A1"]


@pytest.mark.parametrize(
    "scheme, text, expected",
    [
        ("S1", "S{a} p -> K{a} p", True),
        ("S2", "S{a} p -> ~K{a} p", False),
        ("S2", "S{a} p -> ~K{b} p", True),
        ("A1", "S{a} p -> S{a} p", True),
        ("K", "K{a}(p -> q) -> K{a} p -> K{a} q", True),
        ("K", "K{a}(p -> q) -> K{b} p -> K{b} q", False),
        ("T", "K{b}(p & q) -> p & q", True),
        ("4", "K{a} p -> K{a} K{b} p", False),
        ("5", "~K{a} p -> K{a} ~K{a} p", True),
        ("S4", "S{a} p -> K{a} S{a} p", True),
        ("S4", "S{a} p -> K{b} S{a} p", False),
        ("T", "~(K{a} p & ~p)", True),
    ],
)
def test_axiom_instances(scheme, text, expected):
    assert check_axiom_instance(scheme, parse(text)) is expected


def test_unknown_scheme_is_an_error():
    with pytest.raises(ValueError):
        check_axiom_instance("S3", parse("p"))


# --------------------------------------------------------------------------
# brute-force matcher oracle

PHI, PSI = Meta("phi"), Meta("psi")


def brute_force_instance(scheme, f):
    """Try every assignment of target subformulas and agents to the metavariables."""
    target = desugar(f)
    pattern = desugar(scheme_pattern(scheme))
    subs = subformulas(target)
    names = sorted(agents(target)) or ["a"]
    for phi in subs:
        for psi in subs:
            for a in names:
                for b in names:
                    if scheme == "S2" and a == b:
                        continue
                    if instantiate(pattern, {PHI: phi, PSI: psi, "?a": a, "?b": b}) == target:
                        return True
    return False


small = formulas(depth=2, agent_names=("a", "b"), atom_names=("p", "q"))


@st.composite
def scheme_candidates(draw):
    scheme = draw(st.sampled_from(MODAL_SCHEMES))
    if draw(st.booleans()):
        f = draw(formulas(depth=4, agent_names=("a", "b"), atom_names=("p", "q")))
    else:
        f = scheme_instance(scheme, draw(small), draw(small), draw(st.sampled_from("ab")), draw(st.sampled_from("ab")))
    return scheme, f


@settings(max_examples=400, deadline=None)
@given(scheme_candidates())
def test_matcher_agrees_with_brute_force(case):
    scheme, f = case
    assert check_axiom_instance(scheme, f) == brute_force_instance(scheme, f)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(MODAL_SCHEMES), small, small)
def test_generated_instances_match(scheme, phi, psi):
    assert check_axiom_instance(scheme, scheme_instance(scheme, phi, psi, "a", "b"))


# --------------------------------------------------------------------------
# derivations

def test_library_checks():
    lib = fixture_library()
    assert len(lib) >= 12
    assert [d.name for d in lib] == DERIVATION_NAMES
    for d in lib:
        assert check_derivation(d) == d.conclusion


@pytest.mark.parametrize("name", DERIVATION_NAMES)
def test_fixture_files_match_library(name):
    d = load_derivation(FIXTURES / f"{name}.json")
    assert check_derivation(d) == d.conclusion
    built = {x.name: x for x in fixture_library()}[name]
    assert derivation_to_json(built) == derivation_to_json(d)


def test_named_conclusions():
    concl = {d.name: d.conclusion for d in fixture_library()}
    assert desugar(concl["ssl-truth"]) == desugar(parse("S{a} p -> p"))
    assert desugar(concl["no-secret-top"]) == desugar(parse("~S{a} #t"))
    assert desugar(concl["k-conj"]) == desugar(parse("K{a} p & K{a} q -> K{a}(p & q)"))
    assert desugar(concl["secrecy-consistency"]) == desugar(parse("S{a} p -> ~K{b} ~p"))
    assert desugar(concl["secrecy-negative-introspection"]) == desugar(parse("~S{a} p -> K{a} ~S{a} p"))


def test_library_instantiates_at_other_formulas():
    for d in fixture_library(parse("K{b} r"), parse("p | S{b} q"), "b", "a"):
        check_derivation(d)


def test_k_conj_valid_on_running_example():
    m = load_fixture("running")
    conclusion = {d.name: d.conclusion for d in fixture_library()}["k-conj"]
    assert valid_on(m, conclusion)


@pytest.mark.parametrize("d", fixture_library(), ids=lambda d: d.name)
def test_every_prefix_checks(d):
    for n in range(1, len(d.steps) + 1):
        check_derivation(Derivation(d.name, d.steps[:n]))


def test_swapped_mp_operands_are_rejected():
    d = {x.name: x for x in fixture_library()}["ssl-truth"]
    k = next(i for i, s in enumerate(d.steps) if isinstance(s.by, MP))
    steps = list(d.steps)
    steps[k] = Step(steps[k].formula, MP(steps[k].by.j, steps[k].by.i))
    with pytest.raises(StepError) as err:
        check_derivation(Derivation("bad", tuple(steps)))
    assert (err.value.index, err.value.reason) == (k, "BadMP")


@pytest.mark.parametrize(
    "steps, index, reason",
    [
        ([], 0, "EmptyDerivation"),
        ([Step(parse("p"), "A1")], 0, "BadAxiomMatch"),
        ([Step(parse("p"), "S9")], 0, "UnknownScheme"),
        ([Step(parse("p -> p"), MP(0, 1))], 0, "ForwardReference"),
        ([Step(parse("p -> p"), "A1"), Step(parse("K{a} q"), Nec(0, "a"))], 1, "BadNec"),
        ([Step(parse("p -> p"), "A1"), Step(parse("S{a} p <-> S{a} p"), RE(0, "a"))], 1, "BadRE"),
        ([Step(parse("p <-> ~~p"), "A1"), Step(parse("S{a} p <-> S{b} ~~p"), RE(0, "a"))], 1, "BadRE"),
        ([Step(parse("p -> p"), object())], 0, "UnknownJustification"),
    ],
)
def test_step_errors(steps, index, reason):
    with pytest.raises(StepError) as err:
        check_derivation(Derivation("t", tuple(steps)))
    assert (err.value.index, err.value.reason) == (index, reason)


def test_replacement_and_necessitation():
    d = Derivation(
        "re",
        (
            Step(parse("p & q <-> q & p"), "A1"),
            Step(parse("S{a}(p & q) <-> S{a}(q & p)"), RE(0, "a")),
            Step(parse("K{b}(S{a}(p & q) <-> S{a}(q & p))"), Nec(1, "b")),
        ),
    )
    assert check_derivation(d) == d.conclusion


def test_sugar_is_transparent_to_mp():
    d = Derivation(
        "mp",
        (
            Step(parse("K{a} p -> p"), "T"),
            Step(parse("(K{a} p -> p) -> ~p -> ~K{a} p"), "A1"),
            Step(parse("~(~p & ~~K{a} p)"), MP(0, 1)),
        ),
    )
    assert check_derivation(d)


def test_seeded_mutations_are_rejected_at_their_step():
    rng = random.Random(7)
    lib = fixture_library()
    for _ in range(60):
        d = rng.choice(lib)
        broken, k = mutate(d, rng)
        with pytest.raises(StepError) as err:
            check_derivation(broken)
        assert err.value.index == k


def test_json_round_trip(tmp_path):
    for d in fixture_library():
        doc = json.loads(json.dumps(derivation_to_json(d)))
        again = derivation_from_json(doc)
        assert [desugar(s.formula) for s in again.steps] == [desugar(s.formula) for s in d.steps]
        assert [s.by for s in again.steps] == [s.by for s in d.steps]
    path = tmp_path / "x.json"
    path.write_text(json.dumps(derivation_to_json(fixture_library()[0])))
    assert check_derivation(load_derivation(path))


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"name": "x"},
        {"steps": [{"formula": "p"}]},
        {"steps": [{"formula": "p", "by": {"mp": [0]}}]},
        {"steps": [{"formula": "p", "by": {"zz": [0, 1]}}]},
    ],
)
def test_bad_derivation_documents(doc):
    with pytest.raises(DerivationFormatError):
        derivation_from_json(doc)


# --------------------------------------------------------------------------
# soundness cross-check

def test_conclusions_valid_on_random_models():
    lib = [d.conclusion for d in fixture_library()]
    lib += [d.conclusion for d in fixture_library(parse("p & K{b} r"), parse("S{a} p"))]
    for seed in range(100):
        ev = Evaluator(random_model(seed, SearchBounds(agents=2, states=3, atoms=("p", "q", "r"))))
        for f in lib:
            assert ev.valid(f), (seed, str(f))


def test_scheme_instances_valid_on_random_models():
    atoms_ = [Atom("p"), parse("S{b} r"), parse("K{a} p | r")]
    insts = [scheme_instance(s, x, y, a, b) for s in MODAL_SCHEMES for x in atoms_ for y in atoms_ for a, b in ("ab", "ba")]
    for seed in range(100):
        ev = Evaluator(random_model(seed, SearchBounds(agents=2, states=3)))
        for f in insts:
            assert ev.valid(f) and ev.valid(K("a", f))


def test_s_distribution_is_not_derivable_by_matching():
    # the schemes must not accidentally include K-style distribution for S
    f = Imp(S("a", Imp(Atom("p"), Atom("q"))), Imp(S("a", Atom("p")), S("a", Atom("q"))))
    assert not any(check_axiom_instance(s, f) for s in SCHEMES)
