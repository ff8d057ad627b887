"""Invariant suites over seeded random structures.

Each suite maps a seed to a generator config and checks one structure,
returning a list of violation witnesses (empty when the invariant holds).
The ``sweep`` command and the property tests both run these.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

from .agreement import (
    agreement_scan, aumann_check, classify_signal, compare_posteriors_events, compare_posteriors_formulas,
)
from .families import formula_family
from .semantics import Mode, session
from .structure import (
    Structure, check_cpa, check_prior_generated, generate_priors, is_common_interpretation, validate_ai,
)
from .syntax import CB, EB, B, Formula, Implies, K, ProbGE, conj, disj, to_text
from .transforms import (
    GeneratorConfig, check_equivalent, disjoint_copies, identity_pairing, project_outermost, random_structure,
)

__all__ = ["SUITES", "Suite", "SweepResult", "run_suite", "parse_seeds", "structure_for", "family_for"]


@lru_cache(maxsize=4096)
def structure_for(cfg: GeneratorConfig) -> Structure:
    """Memoized generator, so suites sharing a config share evaluation caches."""
    return random_structure(cfg)


@lru_cache(maxsize=64)
def family_for(props: tuple, players: int, depth: int, knowledge: bool = True) -> tuple:
    return tuple(formula_family(props, players, depth, knowledge=knowledge))


def _base(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed)


def _common(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed, ambiguity_probability=Fraction(0))


def _hetero(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed, common_prior=False)


def _sig_common(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed, states=(1, 4), players=(2, 3), propositions=(1, 1),
                           ambiguity_probability=Fraction(0), with_signals=True)


def _sig_a6(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed, states=(1, 4), players=(2, 3), propositions=(1, 1),
                           ambiguity_probability=Fraction(1, 2), with_signals=True, ai_assumption="A6")


def _sig_a6p(seed: int) -> GeneratorConfig:
    return GeneratorConfig(seed=seed, states=(1, 4), players=(2, 3), propositions=(1, 1),
                           ambiguity_probability=Fraction(1, 4), with_signals=True, ai_assumption="A6'")


# ---------------------------------------------------------------- checks


def check_prior_roundtrip(m: Structure, depth: int) -> list:
    priors = generate_priors(m)
    rep = check_prior_generated(m, priors)
    out = []
    if not rep.ok:
        out.append({"check": "prior_generated", "detail": str(rep)})
    if rep.unconstrained:
        out.append({"check": "unconstrained", "cells": rep.unconstrained})
    for i in m.player_ids:
        share = Fraction(1, len(m.partitions[i - 1]))
        for cell in m.partitions[i - 1]:
            mass = sum((priors[i - 1][w] for w in cell), Fraction(0))
            if mass != share:
                out.append({"check": "cell_mass", "player": i, "cell": list(cell), "mass": str(mass)})
    return out


def check_projection(m: Structure, depth: int) -> list:
    fam = family_for(m.vocabulary, m.players, depth)
    out = []
    for i in m.player_ids:
        v = check_equivalent(m, project_outermost(m, i), identity_pairing(m, [i]), Mode.OUT, Mode.IN, fam)
        if not v.equivalent:
            out.append({"player": i, **v.witness})
    return out


def check_copies(m: Structure, depth: int) -> list:
    # knowledge is excluded: it does not survive the construction
    fam = family_for(m.vocabulary, m.players, depth, False)
    copies, pairing = disjoint_copies(m)
    v = check_equivalent(m, copies, pairing, Mode.IN, Mode.IN, fam)
    return [] if v.equivalent else [v.witness]


def _nondegenerate(m: Structure) -> bool:
    return any(len([q for q in mu.values() if q != 0]) > 1 for row in m.posteriors for mu in row)


def check_copies_cpa(m: Structure, depth: int) -> list:
    if m.players < 2 or not _nondegenerate(m) or not check_cpa(m).ok:
        return []
    copies, _ = disjoint_copies(m)
    rep = check_cpa(copies)
    return [{"detail": "copies satisfy the CPA"}] if rep.ok else []


def check_aumann(m: Structure, depth: int) -> list:
    rep = aumann_check(m, depth=depth)
    if not rep.preconditions_ok:
        return [{"precondition": rep.detail}]
    return rep.violations


def check_agreement(m: Structure, depth: int) -> list:
    rep = agreement_scan(m, depth=depth)
    if rep.status == "precondition":
        return [{"precondition": rep.detail}]
    return rep.witnesses


def _is_prob_or_cb(f: Formula) -> bool:
    return isinstance(f, (ProbGE, CB, B))


def check_in_viewpoints(m: Structure, depth: int) -> list:
    ev = session(m, Mode.IN)
    for f in family_for(m.vocabulary, m.players, depth):
        if not _is_prob_or_cb(f):
            continue
        masks = [ev.extension_mask(f, i) for i in m.player_ids]
        if len(set(masks)) > 1:
            return [{"formula": to_text(f), "extensions": [m.ordered(x) for x in masks]}]
    return []


def check_out_cells(m: Structure, depth: int) -> list:
    ev = session(m, Mode.OUT)
    for f in family_for(m.vocabulary, m.players, depth):
        if not isinstance(f, ProbGE):
            continue
        players = {t.player for t in f.terms}
        if len(players) != 1:
            continue
        cells = m.cell_masks[players.pop() - 1]
        for i in m.player_ids:
            x = ev.extension_mask(f, i)
            if any(x & c and x & c != c for c in cells):
                return [{"formula": to_text(f), "viewpoint": i, "extension": m.ordered(x)}]
    return []


def check_collapse(m: Structure, depth: int) -> list:
    if not is_common_interpretation(m):
        return [{"precondition": "not a common-interpretation structure"}]
    out_ev, in_ev = session(m, Mode.OUT), session(m, Mode.IN)
    for f in family_for(m.vocabulary, m.players, depth):
        for i in m.player_ids:
            if out_ev.extension_mask(f, i) != in_ev.extension_mask(f, i):
                return [{"formula": to_text(f), "viewpoint": i}]
    return []


def check_cb_unrolling(m: Structure, depth: int) -> list:
    group = tuple(m.player_ids)
    k = len(m.states) + 2
    for mode in Mode:
        if mode.ai:
            continue
        ev = session(m, mode)
        # both sides depend on the argument only through its extensions, so
        # one argument per extension profile covers the family
        seen = set()
        for f in family_for(m.vocabulary, m.players, max(depth - 1, 0)):
            profile = tuple(ev.extension_mask(f, i) for i in m.player_ids)
            if profile in seen:
                continue
            seen.add(profile)
            # EB^r built from EB^(r-1) so the iterates share subterms
            level, layers = f, []
            for _ in range(k):
                level = EB(1, group, level)
                layers.append(level)
            unrolled = conj(layers)
            for i in m.player_ids:
                a = ev.extension_mask(CB(group, f), i)
                b = ev.extension_mask(unrolled, i)
                if a != b:
                    return [{"mode": mode.value, "formula": to_text(f), "viewpoint": i,
                             "gfp": m.ordered(a), "unrolled": m.ordered(b)}]
    return []


def _common_signal_states(m: Structure):
    for w in m.states:
        row = m.signals[w]
        if row[0] is not None and all(s == row[0] for s in row):
            yield w, row[0]


def check_signals_common(m: Structure, depth: int) -> list:
    out = []
    cpa = check_cpa(m).ok
    for w, s in _common_signal_states(m):
        flags = classify_signal(m, s, w, Mode.IN)
        if flags.public != flags.shared:
            out.append({"state": w, "signal": s, "public": flags.public, "shared": flags.shared})
        if flags.public and cpa:
            for i in m.player_ids:
                for j in m.player_ids:
                    if i < j and not compare_posteriors_events(m, w, i, j).equal:
                        out.append({"state": w, "signal": s, "posteriors": [i, j]})
    return out


def check_signals_out_ai(m: Structure, depth: int) -> list:
    # truth under outermost scope is relative to the evaluating player, so
    # both clauses are checked one viewpoint at a time
    if not validate_ai(m, Mode.OUT_AI).ok:
        return [{"precondition": "A5/A6 fail"}]
    out = []
    cpa = check_cpa(m).ok
    for w, s in _common_signal_states(m):
        for v in m.player_ids:
            flags = classify_signal(m, s, w, Mode.OUT_AI, viewpoint=v)
            if flags.public != flags.shared:
                out.append({"state": w, "signal": s, "viewpoint": v,
                            "public": flags.public, "shared": flags.shared})
            if not (flags.public and cpa):
                continue
            for i in m.player_ids:
                for j in m.player_ids:
                    if i < j:
                        rep = compare_posteriors_formulas(m, w, i, j, Mode.OUT_AI, depth, viewpoint=v)
                        if not rep.equal:
                            out.append({"state": w, "signal": s, "formulas": [i, j], **rep.witness})
    return out


def check_signals_in_ai(m: Structure, depth: int) -> list:
    if not validate_ai(m, Mode.IN_AI).ok:
        return [{"precondition": "A5/A6' fail"}]
    out = []
    cpa = check_cpa(m).ok
    for w, s in _common_signal_states(m):
        flags = classify_signal(m, s, w, Mode.IN_AI)
        if flags.public != flags.strongly_shared:
            out.append({"state": w, "signal": s, "public": flags.public,
                        "strongly_shared": flags.strongly_shared})
        if flags.public and cpa:
            for i in m.player_ids:
                for j in m.player_ids:
                    if i < j and not compare_posteriors_events(m, w, i, j).equal:
                        out.append({"state": w, "signal": s, "posteriors": [i, j]})
    return out


def check_knowledge_truth(m: Structure, depth: int) -> list:
    if not is_common_interpretation(m):
        return [{"precondition": "not a common-interpretation structure"}]
    for mode in (Mode.IN, Mode.OUT):
        ev = session(m, mode)
        for f in family_for(m.vocabulary, m.players, max(depth - 1, 0)):
            for i in m.player_ids:
                g = Implies(K(i, f), f)
                if not ev.valid(g):
                    return [{"mode": mode.value, "formula": to_text(g)}]
    return []


def check_knowledge_disjunction(m: Structure, depth: int) -> list:
    ev = session(m, Mode.IN)
    for f in family_for(m.vocabulary, m.players, max(depth - 1, 0)):
        g = disj(Implies(K(i, f), f) for i in m.player_ids)
        if not ev.valid(g):
            return [{"formula": to_text(g)}]
    return []


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class Suite:
    name: str
    config: Callable[[int], GeneratorConfig]
    check: Callable[[Structure, int], list]
    about: str


SUITES = {s.name: s for s in (
    Suite("prior-roundtrip", _hetero, check_prior_roundtrip,
          "generated priors reproduce posteriors and give every cell mass 1/N_i"),
    Suite("projection", _base, check_projection,
          "outermost truth for player i equals truth after projecting onto i's interpretation"),
    Suite("copies-equivalence", _base, check_copies,
          "innermost truth at (w, j) equals truth at copy w#j of the disjoint-copies structure"),
    Suite("copies-cpa", _base, check_copies_cpa,
          "the disjoint-copies structure of a CPA input never satisfies the CPA"),
    Suite("aumann", _common, check_aumann,
          "no common belief of differing posteriors with common interpretation and CPA"),
    Suite("agreement", _base, check_agreement,
          "no agreement-bound witness with b' > b + eps under the CPA"),
    Suite("in-viewpoint-independence", _base, check_in_viewpoints,
          "probability and common-belief formulas do not depend on the viewpoint under In"),
    Suite("out-cell-unions", _base, check_out_cells,
          "outermost probability atoms for player j are unions of j's cells"),
    Suite("common-collapse", _common, check_collapse,
          "Out and In agree on common-interpretation structures"),
    Suite("cb-unrolling", _base, check_cb_unrolling,
          "common belief equals the conjunction of EB^k for k up to |states|+2"),
    Suite("signals-common", _sig_common, check_signals_common,
          "public iff shared, and equal posteriors, for common-interpretation signals"),
    Suite("signals-out-ai", _sig_a6, check_signals_out_ai,
          "public iff shared, and equal formula posteriors, under out-ai with A5/A6"),
    Suite("signals-in-ai", _sig_a6p, check_signals_in_ai,
          "public iff strongly shared, and equal event posteriors, under in-ai with A5/A6'"),
    Suite("knowledge-truth", _common, check_knowledge_truth,
          "K_i f -> f is valid on common-interpretation structures"),
    Suite("knowledge-disjunction", _base, check_knowledge_disjunction,
          "(K_1 f -> f) | ... | (K_n f -> f) is valid under In"),
)}


@dataclass
class SweepResult:
    suite: str
    seeds: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def minimal(self) -> Optional[dict]:
        """The violation found on the smallest structure (fewest states, then seed)."""
        if not self.violations:
            return None
        return min(self.violations, key=lambda v: (v["states"], v["seed"]))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seeds": self.seeds, "violations": len(self.violations),
                "witness": self.minimal()}

    def __str__(self) -> str:
        head = f"{self.suite}: {len(self.violations)} violations over {self.seeds} seeds"
        if self.violations:
            head += f"\n  minimal witness: {self.minimal()}"
        return head


def run_suite(name: str, seeds: Iterable[int], depth: int = 2) -> SweepResult:
    suite = SUITES[name]
    res = SweepResult(name)
    for seed in seeds:
        m = structure_for(suite.config(seed))
        res.seeds += 1
        for w in suite.check(m, depth):
            res.violations.append({"seed": seed, "states": len(m.states), **w})
    return res


def parse_seeds(text: str) -> list:
    """``"1..200"``, ``"5"`` or ``"1,3,7..9"`` to a list of seeds."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("no seeds given")
    return out
