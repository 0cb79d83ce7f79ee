"""Command-line front end: ``simsec <command> ...``.

Exit status: 0 ok/true, 1 false/invalid/countermodel found, 2 input error,
3 internal limit hit (search bounds, truth-table size).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .checker import Evaluator, satisfies
from .complex import facet_key, parse_facet_key
from .documents import DocumentError, dumps_model, loads_model
from .errors import (
    BoundsTooLarge,
    InvalidComplex,
    InvalidModel,
    ModulusTooSmall,
    ReservedColourInUse,
    SingleAgent,
    TooManyAtoms,
    UnknownAgent,
    UnknownFacet,
    UnknownVertex,
)
from .logic import FormulaSyntaxError, parse
from .model import check_SN, normalize_owner_local, sn_witnesses
from .proof import DerivationFormatError, StepError, check_derivation, load_derivation
from .search import POLICIES, SearchBounds, check_validity_bounded, random_model

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

OK, FALSE, INPUT_ERROR, LIMIT = 0, 1, 2, 3


class InputError(Exception):
    pass


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("simsec") / "fixtures" / name))


def resolve(path: str) -> Path:
    """Use ``path`` as given, falling back to the packaged fixtures for ``fixtures/NAME``."""
    p = Path(path)
    if p.exists():
        return p
    if p.parts[:1] == ("fixtures",):
        packaged = fixture_path(str(Path(*p.parts[1:])))
        if packaged.exists():
            return packaged
    raise InputError(f"no such file: {path}")


def _read(path: str) -> str:
    try:
        return resolve(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(str(e)) from None


def _load(path: str):
    text = _read(path)
    try:
        return loads_model(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON: {e}") from None
    except DocumentError as e:
        raise InputError(f"{path}: {e}") from None


def _formula(text: str):
    try:
        return parse(text)
    except FormulaSyntaxError as e:
        raise InputError(f"syntax error {e}") from None


def read_pool(path: str):
    out = []
    for n, line in enumerate(_read(path).splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("#"):
            try:
                out.append(parse(line))
            except FormulaSyntaxError as e:
                raise InputError(f"{path}:{n}: syntax error {e}") from None
    return out


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _print_invalid(e) -> None:
    for v in e.violations:
        print(f"{v.kind}: {v.message}")


# --------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    try:
        m = _load(args.model)
    except (InvalidComplex, InvalidModel) as e:
        _print_invalid(e)
        return FALSE
    print("valid")
    if args.witnesses:
        _print_witnesses(m)
    return OK


def _print_witnesses(m) -> None:
    for w in sn_witnesses(m):
        event = ", ".join(sorted(facet_key(f) for f in w.event))
        print(f"at {w.vertex}, event {{{event}}}: {w.agent}-witness for {facet_key(w.facet)} is {facet_key(w.witness)}")


def cmd_check(args) -> int:
    m = _load(args.model)
    value = satisfies(m, parse_facet_key(args.facet), _formula(args.formula))
    print("true" if value else "false")
    return OK if value else FALSE


def cmd_truthset(args) -> int:
    m = _load(args.model)
    facets = Evaluator(m).truth_set(_formula(args.formula))
    print(" ".join(sorted(facet_key(f) for f in facets)))
    return OK


def cmd_normalize(args) -> int:
    _write(dumps_model(normalize_owner_local(_load(args.model))), args.output)
    return OK


def cmd_sn_check(args) -> int:
    try:
        m = _load(args.model)
    except InvalidModel as e:
        if not e.sn_violations:
            _print_invalid(e)
            return INPUT_ERROR
        for s in e.sn_violations:
            print(f"SNViolated: {s}")
        print(f"{len(e.sn_violations)} violation(s)")
        return FALSE
    except InvalidComplex as e:
        _print_invalid(e)
        return INPUT_ERROR
    violations = check_SN(m)
    print(f"{len(violations)} violation(s)")
    if args.witnesses:
        _print_witnesses(m)
    return OK if not violations else FALSE


def cmd_share(args) -> int:
    from .share import build_share_model, check_representation, share_uniqueness_holds, to_aux

    m = _load(args.model)
    aux = m if m.is_aux else to_aux(m)
    sh = build_share_model(aux, args.modulus)
    pool = read_pool(args.pool) if args.pool else read_pool(str(fixture_path("pool10.txt")))
    report = check_representation(aux, sh, pool)
    _write(dumps_model(sh.model), args.output)
    log = sys.stdout if args.output else sys.stderr
    print(f"modulus {sh.modulus}, {len(aux.facets)} aux facets, {len(sh.model.facets)} share facets", file=log)
    print(f"share uniqueness: {'ok' if share_uniqueness_holds(sh) else 'FAILED'}", file=log)
    print(f"{report.checks} checks, {len(report.disagreements)} disagreement(s)", file=log)
    for d in report.disagreements:
        print(f"  {d}", file=log)
    return OK if report.ok else FALSE


def cmd_prove(args) -> int:
    try:
        d = load_derivation(resolve(args.derivation))
    except json.JSONDecodeError as e:
        raise InputError(f"{args.derivation}: malformed JSON: {e}") from None
    except (DerivationFormatError, FormulaSyntaxError) as e:
        raise InputError(f"{args.derivation}: {e}") from None
    try:
        conclusion = check_derivation(d)
    except StepError as e:
        print(f"rejected: {e}")
        return FALSE
    print(f"ok: {conclusion}")
    return OK


def _search_bounds(args) -> tuple[SearchBounds, int, int | None]:
    conf = {}
    if args.config:
        try:
            conf = tomllib.loads(_read(args.config))
        except tomllib.TOMLDecodeError as e:
            raise InputError(f"{args.config}: {e}") from None
        conf = conf.get("search", conf)

    def pick(name, default):
        value = getattr(args, name)
        return value if value is not None else conf.get(name, default)

    atoms = pick("atoms", "p,r")
    if isinstance(atoms, str):
        atoms = [a.strip() for a in atoms.split(",") if a.strip()]
    try:
        bounds = SearchBounds(
            agents=int(pick("agents", 2)),
            states=int(pick("states", 3)),
            atoms=tuple(atoms),
            max_events=int(pick("max_events", 2)),
            policy=pick("policy", "full-grid"),
            cap=int(pick("cap", 10**7)),
        )
    except (TypeError, ValueError) as e:
        raise InputError(f"bad search bounds: {e}") from None
    sample = pick("sample", None)
    return bounds, int(pick("seed", 0)), None if sample is None else int(sample)


def cmd_search(args) -> int:
    phi = _formula(args.formula)
    bounds, seed, sample = _search_bounds(args)
    if sample is None:
        result = check_validity_bounded(phi, bounds)
        model, facet = result.model, result.facet
        summary = f"{result.models_examined} models examined in {result.elapsed:.2f}s"
    else:
        model = facet = None
        for s in range(seed, seed + sample):
            m = random_model(s, bounds)
            bad = Evaluator(m).truth_set(phi)
            if len(bad) < len(m.facets):
                model, facet = m, min(set(m.facets) - bad)
                break
        summary = f"{sample} random models from seed {seed}"
    if model is None:
        print(f"ValidUpToBound ({summary})")
        return OK
    print(f"Countermodel at {facet_key(facet)} ({summary})")
    sys.stdout.write(dumps_model(model))
    return FALSE


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="simsec", description="Simplicial secrecy models: checking, proofs, search.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a model document")
    p.add_argument("model")
    p.add_argument("--witnesses", action="store_true", help="list one external-uncertainty witness per (facet, agent)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="evaluate a formula at a facet")
    p.add_argument("model")
    p.add_argument("facet", help="facet key, e.g. u0+w1")
    p.add_argument("formula")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("truthset", help="print the facets where a formula holds")
    p.add_argument("model")
    p.add_argument("formula")
    p.set_defaults(func=cmd_truthset)

    p = sub.add_parser("normalize", help="owner-local normalization of the neighborhoods")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("sn-check", help="report external-uncertainty violations")
    p.add_argument("model")
    p.add_argument("--witnesses", action="store_true")
    p.set_defaults(func=cmd_sn_check)

    p = sub.add_parser("share", help="build the share model of an auxiliary-colour model")
    p.add_argument("model")
    p.add_argument("--modulus", type=int)
    p.add_argument("--pool", help="formula pool, one per line (default: packaged pool10.txt)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_share)

    p = sub.add_parser("prove", help="check a derivation file")
    p.add_argument("derivation")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("search", help="bounded countermodel search")
    p.add_argument("formula")
    p.add_argument("--agents", type=int)
    p.add_argument("--states", type=int)
    p.add_argument("--atoms", help="comma-separated atom names")
    p.add_argument("--max-events", dest="max_events", type=int)
    p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--cap", type=int)
    p.add_argument("--seed", type=int, help="first seed for --sample")
    p.add_argument("--sample", type=int, help="check N random models instead of the exhaustive search")
    p.add_argument("--config", help="TOML file with search bounds (flags override it)")
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except (InvalidComplex, InvalidModel) as e:
        print(f"error: invalid model: {e}", file=sys.stderr)
        return INPUT_ERROR
    except (UnknownAgent, UnknownFacet, UnknownVertex) as e:
        print(f"error: {type(e).__name__}: {e.args[0] if e.args else e}", file=sys.stderr)
        return INPUT_ERROR
    except (SingleAgent, ModulusTooSmall, ReservedColourInUse) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return INPUT_ERROR
    except (BoundsTooLarge, TooManyAtoms) as e:
        print(f"limit: {type(e).__name__}: {e}", file=sys.stderr)
        return LIMIT


if __name__ == "__main__":
    sys.exit(main())
