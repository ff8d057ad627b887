"""Command-line front end: ``ambilogic validate|eval|analyze|transform|sweep|gen``.

Exit codes: 0 success or true, 1 analysis-negative, 2 usage, IO or semantic error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .agreement import (
    agreement_scan, ambiguity_measure, aumann_check, check_agreement_bound, classify_signal,
    compare_posteriors_events, compare_posteriors_formulas,
)
from .families import formula_family
from .semantics import ConditioningUndefined, Mode, truth_table
from .structure import (
    MissingDataError, ModelFormatError, Structure, check_cpa, check_prior_generated, dumps_model,
    format_rational, generate_priors, load_model, loads_model, parse_rational, reachable, validate,
    validate_ai,
)
from .suites import SUITES, parse_seeds, run_suite
from .syntax import EB, ParseError, parse, subformulas
from .transforms import (
    GeneratorConfig, add_cell_labels, check_equivalent, disjoint_copies, identity_pairing, pairing_to_json,
    project_outermost, random_structure,
)

MAX_DEPTH = 3
MAX_EB = 8
MODES = [m.value for m in Mode]
GLOBAL_DEFAULTS = {"json": False, "seed": 0, "depth": 2}


class UsageError(Exception):
    """Bad arguments detected after argparse accepted them."""


# ---------------------------------------------------------------- helpers


def bundled_models() -> list:
    return sorted(p.name[:-5] for p in resources.files("ambilogic.models").iterdir() if p.name.endswith(".json"))


def open_model(ref: str) -> Structure:
    """Load a model file; a missing path falls back to the bundled fixture of the same stem."""
    path = Path(ref)
    if path.exists():
        return load_model(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in bundled_models():
        text = resources.files("ambilogic.models").joinpath(stem + ".json").read_text()
        return loads_model(text, name=stem)
    raise ModelFormatError(f"cannot read {ref}: no such file (bundled models: {', '.join(bundled_models())})")


def _formula(text: str):
    f = parse(text)
    for g in subformulas(f):
        if isinstance(g, EB) and g.m > MAX_EB:
            raise UsageError(f"EB^{g.m} exceeds the cap of {MAX_EB}")
    return f


def _state(m: Structure, w: Optional[str]) -> str:
    if w is None:
        raise UsageError("--state is required")
    if w not in m.index:
        raise UsageError(f"unknown state {w!r}; states are {', '.join(m.states)}")
    return w


def _player(m: Structure, i: Optional[int], flag: str) -> int:
    if i is None:
        raise UsageError(f"{flag} is required")
    if not 1 <= i <= m.players:
        raise UsageError(f"{flag} {i} out of range 1..{m.players}")
    return i


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    m = open_model(args.model)
    reports = [validate(m)]
    if args.ai_mode:
        reports.append(validate_ai(m, args.ai_mode))
    ok = all(r.ok for r in reports)
    _emit(args, {"model": m.name, "ok": ok, "reports": [r.to_dict() for r in reports]},
          "\n".join(str(r) for r in reports))
    return 0 if ok else 1


def cmd_eval(args) -> int:
    m = open_model(args.model)
    f = _formula(args.formula)
    states = [_state(m, args.state)] if args.state else []
    views = [_player(m, args.viewpoint, "--viewpoint")] if args.viewpoint is not None else []
    rows = truth_table(m, f, args.mode, states, views)
    ok = all(t for _, _, t in rows)
    payload = {"model": m.name, "formula": args.formula, "mode": args.mode, "all_true": ok,
               "rows": [{"state": w, "viewpoint": v, "value": t} for w, v, t in rows]}
    width = max(len("state"), *(len(w) for w, _, _ in rows))
    lines = [f"{'state':<{width}}  viewpoint  value"]
    lines += [f"{w:<{width}}  {v:<9}  {str(t).lower()}" for w, v, t in rows]
    _emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def _analyze_cpa(args, m):
    rep = check_cpa(m)
    return rep.ok, rep.to_dict(), str(rep)


def _analyze_priors(args, m):
    priors = generate_priors(m)
    rep = check_prior_generated(m, priors)
    table = [{w: format_rational(nu[w]) for w in m.states} for nu in priors]
    lines = [f"prior of player {i}: " + ", ".join(f"{w}={q}" for w, q in row.items())
             for i, row in enumerate(table, 1)]
    return rep.ok, {"priors": table, "check": rep.to_dict()}, "\n".join(lines + [str(rep)])


def _analyze_ambiguity(args, m):
    if not args.formula:
        raise UsageError("ambiguity needs --formula")
    rep = ambiguity_measure(m, _formula(args.formula))
    d = rep.to_dict(m)
    return True, d, f"epsilon = {d['epsilon']} (disagreement on {{{', '.join(d['disagreement_event'])}}})"


def _analyze_agreement(args, m):
    group = args.group or list(m.player_ids)
    if args.formula:
        if args.b is None or args.b2 is None:
            raise UsageError("agreement with --formula needs --b and --b2")
        rep = check_agreement_bound(m, group, _formula(args.formula), args.b, args.b2)
    else:
        rep = agreement_scan(m, group, depth=args.depth)
    text = f"{rep.status}: {rep.detail}"
    if rep.epsilon is not None:
        text += f" [epsilon = {rep.epsilon}]"
    for w in rep.witnesses[:5]:
        text += f"\n  witness {json.dumps(w)}"
    return rep.status in ("consistent", "vacuous"), rep.to_dict(), text


def _analyze_signals(args, m):
    w = _state(m, args.state)
    if m.signals is None:
        raise MissingDataError("structure has no signal map")
    signal = args.signal or next((s for s in m.signals[w] if s is not None), None)
    if signal is None:
        raise UsageError(f"no player receives a signal at {w}; pass --signal")
    view = _player(m, args.viewpoint, "--viewpoint") if args.viewpoint is not None else None
    flags = classify_signal(m, signal, w, args.mode, viewpoint=view)
    return True, flags.to_dict(), str(flags)


def _analyze_posteriors(args, m):
    w = _state(m, args.state)
    i, j = args.players or (1, 2)
    _player(m, i, "--players")
    _player(m, j, "--players")
    view = _player(m, args.viewpoint, "--viewpoint") if args.viewpoint is not None else None
    events = compare_posteriors_events(m, w, i, j)
    formulas = compare_posteriors_formulas(m, w, i, j, args.mode, args.depth, viewpoint=view)
    lines = []
    for label, rep in (("events", events), ("formulas", formulas)):
        line = f"{label}: {'equal' if rep.equal else 'differ'} ({rep.detail})"
        if rep.witness:
            line += f" witness {json.dumps(rep.witness)}"
        lines.append(line)
    return events.equal and formulas.equal, {"events": events.to_dict(), "formulas": formulas.to_dict()}, \
        "\n".join(lines)


def _analyze_aumann(args, m):
    rep = aumann_check(m, args.group, depth=args.depth, force=args.force)
    text = f"preconditions: {'hold' if rep.preconditions_ok else 'fail'} ({rep.detail})\n"
    text += f"violations: {len(rep.violations)}, escapes: {len(rep.escapes)}, checked: {rep.checked}"
    for e in (rep.violations + rep.escapes)[:5]:
        text += f"\n  {json.dumps(e)}"
    ok = rep.ok and (rep.preconditions_ok or args.force)
    return ok, rep.to_dict(), text


ANALYSES = {
    "cpa": _analyze_cpa, "priors": _analyze_priors, "ambiguity": _analyze_ambiguity,
    "agreement": _analyze_agreement, "signals": _analyze_signals, "posteriors": _analyze_posteriors,
    "aumann": _analyze_aumann,
}


def cmd_analyze(args) -> int:
    m = open_model(args.model)
    ok, payload, text = ANALYSES[args.analysis](args, m)
    _emit(args, {"model": m.name, "analysis": args.analysis, "ok": ok, "report": payload}, text)
    return 0 if ok else 1


def cmd_transform(args) -> int:
    m = open_model(args.model)
    fam = None
    if args.verify:
        fam = formula_family(m.vocabulary, m.players, args.depth, knowledge=args.kind == "project")
    verdict = None
    if args.kind == "project":
        i = _player(m, args.player, "--player")
        out = project_outermost(m, i)
        pairing = identity_pairing(m, [i])
        if fam is not None:
            verdict = check_equivalent(m, out, pairing, Mode.OUT, Mode.IN, fam)
    elif args.kind == "copies":
        out, pairing = disjoint_copies(m)
        if fam is not None:
            verdict = check_equivalent(m, out, pairing, Mode.IN, Mode.IN, fam)
    else:
        w = _state(m, args.state)
        out = add_cell_labels(m, w)
        pairing = {(x, v): (x, v) for x in sorted(reachable(m, m.player_ids, w), key=m.index.get)
                   for v in m.player_ids}
        if fam is not None:
            verdict = check_equivalent(m, out, pairing, Mode.IN, Mode.IN_AI, fam)
    target = Path(args.out or f"{m.name or 'model'}-{args.kind}.json")
    pairing_path = Path(args.pairing or target.with_suffix(".pairing.json"))
    target.write_text(dumps_model(out))
    pairing_path.write_text(json.dumps(pairing_to_json(pairing), indent=2) + "\n")
    payload = {"model": str(target), "pairing": str(pairing_path)}
    lines = [f"wrote {target}", f"wrote {pairing_path}"]
    ok = True
    if args.kind == "labels":
        rep = validate_ai(out, Mode.OUT_AI)
        payload["validate_ai"] = rep.to_dict()
        lines.append(str(rep))
        ok = rep.ok
    if verdict is not None:
        payload["verdict"] = verdict.to_dict()
        lines.append(str(verdict))
        ok = ok and verdict.equivalent
    _emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    names = list(SUITES) if args.suite == ["all"] else args.suite
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    seeds = parse_seeds(args.seeds)
    results = [run_suite(name, seeds, depth=args.depth) for name in names]
    _emit(args, {"results": [r.to_dict() for r in results]}, "\n".join(str(r) for r in results))
    return 0 if all(r.ok for r in results) else 1


def cmd_gen(args) -> int:
    def span(text):
        lo, _, hi = text.partition("..")
        return (int(lo), int(hi or lo))

    cfg = GeneratorConfig(states=span(args.states), players=span(args.players),
                          propositions=span(args.propositions), ambiguity_probability=args.ambiguity,
                          common_prior=not args.heterogeneous, with_signals=args.signals,
                          ai_assumption=args.ai_assumption, degenerate=args.degenerate, seed=args.seed)
    text = dumps_model(random_structure(cfg))
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- parser


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _depth(text: str) -> int:
    d = int(text)
    if not 0 <= d <= MAX_DEPTH:
        raise argparse.ArgumentTypeError(f"depth must lie in 0..{MAX_DEPTH}")
    return d


def _players(text: str) -> list:
    try:
        return sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated players, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="generator seed (gen)")
    common.add_argument("--depth", type=_depth, default=argparse.SUPPRESS,
                        help=f"formula-family depth, 0..{MAX_DEPTH} (default 2)")

    p = argparse.ArgumentParser(prog="ambilogic", parents=[common],
                                description="Model checker for epistemic probability logic with ambiguity.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    v = sub.add_parser("validate", parents=[common], help="check A1-A4 (and A5/A6/A6' with --ai-mode)")
    v.add_argument("model")
    v.add_argument("--ai-mode", choices=["out-ai", "in-ai"])
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("eval", parents=[common], help="truth table of a formula")
    e.add_argument("model")
    e.add_argument("formula")
    e.add_argument("--mode", choices=MODES, default="in")
    e.add_argument("--state")
    e.add_argument("--viewpoint", type=int)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("analyze", parents=[common], help="priors, CPA, ambiguity, agreement, signals")
    a.add_argument("model")
    a.add_argument("analysis", choices=list(ANALYSES))
    a.add_argument("--formula")
    a.add_argument("--b", type=_rational)
    a.add_argument("--b2", type=_rational)
    a.add_argument("--group", type=_players)
    a.add_argument("--state")
    a.add_argument("--signal")
    a.add_argument("--mode", choices=MODES, default="in")
    a.add_argument("--viewpoint", type=int)
    a.add_argument("--players", type=int, nargs=2, metavar=("I", "J"))
    a.add_argument("--force", action="store_true", help="aumann: scan even when preconditions fail")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("transform", parents=[common], help="project, copies or labels")
    t.add_argument("model")
    t.add_argument("kind", choices=["project", "copies", "labels"])
    t.add_argument("--player", type=int)
    t.add_argument("--state")
    t.add_argument("--out")
    t.add_argument("--pairing")
    t.add_argument("--verify", action="store_true")
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("sweep", parents=[common], help="run invariant suites over seeded structures")
    s.add_argument("--suite", action="append", required=True, help=f"'all' or one of: {', '.join(SUITES)}")
    s.add_argument("--seeds", default="1..200")
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("gen", parents=[common], help="write a seeded random structure")
    g.add_argument("--states", default="1..4")
    g.add_argument("--players", default="1..3")
    g.add_argument("--propositions", default="1..2")
    g.add_argument("--ambiguity", type=_rational, default=Fraction(1, 3))
    g.add_argument("--heterogeneous", action="store_true", help="independent priors per player")
    g.add_argument("--signals", action="store_true")
    g.add_argument("--ai-assumption", choices=["A6", "A6'"], default="A6'")
    g.add_argument("--degenerate", action="store_true")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return args.func(args)
    except (ModelFormatError, MissingDataError, ParseError, UsageError, ConditioningUndefined,
            KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        if getattr(args, "json", False):
            print(json.dumps({"error": type(exc).__name__, "message": msg}))
        else:
            print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
