from __future__ import annotations


import pytest
from hypothesis import strategies as st

from simsec.cli import fixture_path, read_pool
from simsec.complex import facet_id
from simsec.documents import load_model
from simsec.logic import And, Atom, Bot, Iff, Imp, K, Not, Or, S, Top
from simsec.proof import MP, RE, SCHEMES, Derivation, Nec, Step, check_axiom_instance

FIXTURES = fixture_path("")

AUX_FIXTURES = ["aux-line", "aux-path", "aux-grid", "aux-shared-star", "aux-three"]


def load_fixture(name: str):
    return load_model(fixture_path(f"{name}.json"))


def pool(name: str = "pool12"):
    return read_pool(str(fixture_path(f"{name}.txt")))


# Running-example facet names: x_i = {u0, w_i}, y_i = {u1, w_i}, z_i = {u2, w_i}.
def grid_facet(name: str):
    row = {"x": "u0", "y": "u1", "z": "u2"}[name[0]]
    return facet_id([row, f"w{name[1]}"])


def grid_facets(*names):
    return {grid_facet(n) for n in names}


@pytest.fixture
def running():
    return load_fixture("running")


def formulas(depth=6, agent_names=("a", "b", "c"), atom_names=("p", "q", "r", "s")):
    """Random formulas over every constructor, at most ``depth`` levels deep."""
    leaves = st.one_of(
        st.sampled_from(atom_names).map(Atom),
        st.just(Top()),
        st.just(Bot()),
    )
    if depth == 0:
        return leaves
    inner = formulas(depth - 1, agent_names, atom_names)
    return st.one_of(
        leaves,
        inner.map(Not),
        st.builds(lambda c, l, r: c(l, r), st.sampled_from([And, Or, Imp, Iff]), inner, inner),
        st.builds(lambda c, a, f: c(a, f), st.sampled_from([K, S]), st.sampled_from(agent_names), inner),
    )


DERIVATION_NAMES = [
    "ssl-truth",
    "secrecy-consistency",
    "secrecy-negative-introspection",
    "exact-owner-locality-pos",
    "exact-owner-locality-neg",
    "ssl-summary",
    "owner-knows-ignorance",
    "owner-knows-ignorance-neg",
    "higher-order-opacity",
    "higher-order-opacity-neg",
    "no-foreign-secret-K",
    "no-foreign-secret-notK",
    "no-foreign-secret-S",
    "no-foreign-secret-notS",
    "no-secret-top",
    "k-conj",
    "replacement-of-equivalents",
]


def mutate(d: Derivation, rng) -> tuple[Derivation, int]:
    """Break exactly one step of ``d``; return the broken derivation and the step index."""
    k = rng.randrange(len(d.steps))
    step = d.steps[k]
    if rng.random() < 0.5:
        broken = Step(Not(step.formula), step.by)
    elif isinstance(step.by, MP):
        broken = Step(step.formula, MP(step.by.j, step.by.i))
    elif isinstance(step.by, (Nec, RE)):
        broken = Step(step.formula, type(step.by)(k, step.by.agent))
    else:
        wrong = [s for s in SCHEMES if not check_axiom_instance(s, step.formula)]
        broken = Step(step.formula, rng.choice(wrong))
    steps = list(d.steps)
    steps[k] = broken
    return Derivation(d.name, tuple(steps)), k


# --------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary

_criteria: dict[int, tuple[str, bool, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _criteria[number] = (title, rep.passed, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, seconds = _criteria[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {title} ({seconds:.2f}s)")
