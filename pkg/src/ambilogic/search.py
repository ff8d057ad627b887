"""Bounded searches for structures equivalent to the three-player heterogeneous-prior model.

The model ``M`` (fixture ``no_equiv``) has player 1 fully informed about
``p`` and players 2 and 3 uninformed with priors 2/3 and 3/4 on ``p``.
:func:`cpa_search` looks for a CPA structure over ``{p}`` that validates the
same probe formulas; :func:`interpretation_search` checks that every
structure validating the ``p <-> (Pr_1(p)=1)`` probes reads ``p`` the same
way for all players.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional

from .semantics import Mode, session
from .structure import Structure, is_common_interpretation, reachable_mask
from .syntax import parse
from .transforms import check_equivalent

__all__ = [
    "CPA_PROBES", "INTERPRETATION_PROBES", "SearchReport", "prior_grid", "set_partitions",
    "cpa_search", "interpretation_search", "prior_contradiction",
]

CPA_PROBES = tuple(parse(t) for t in (
    "Pr_2(p) = 2/3",
    "Pr_3(p) = 3/4",
    "B_2(p <-> B_1(p))",
    "B_3(p <-> B_1(p))",
))
INTERPRETATION_PROBES = tuple(parse(t) for t in ("p <-> (Pr_1(p) = 1)", "!p <-> (Pr_1(!p) = 1)"))


@dataclass
class SearchReport:
    found: list = field(default_factory=list)
    examined: dict = field(default_factory=dict)
    seconds: float = 0.0
    bounds: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.found

    def to_dict(self) -> dict:
        return {"found": self.found, "examined": self.examined, "bounds": self.bounds,
                "seconds": round(self.seconds, 3)}


@lru_cache(maxsize=None)
def prior_grid(k: int, max_den: int) -> tuple:
    """Probability vectors on ``k`` points whose entries share a denominator <= ``max_den``."""
    out = set()

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for x in range(total + 1):
            for rest in compositions(total - x, parts - 1):
                yield (x,) + rest

    for d in range(1, max_den + 1):
        for c in compositions(d, k):
            out.add(tuple(Fraction(x, d) for x in c))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def set_partitions(k: int) -> tuple:
    """All partitions of ``range(k)`` as tuples of index tuples."""
    if k == 0:
        return ((),)
    out = []
    for part in set_partitions(k - 1):
        out.append(part + ((k - 1,),))
        for n in range(len(part)):
            grown = list(part)
            grown[n] = part[n] + (k - 1,)
            out.append(tuple(grown))
    return tuple(out)


def _posteriors(states, cells, nu) -> tuple:
    # zero-mass cells get the uniform posterior; the CPA leaves them unconstrained
    out = []
    for cell in cells:
        mass = sum((nu[s] for s in cell), Fraction(0))
        if mass == 0:
            out.append({states[s]: Fraction(1, len(cell)) for s in cell})
        else:
            out.append({states[s]: nu[s] / mass for s in cell})
    return tuple(out)


def _build(states, roles, nu=None, posteriors=None) -> Structure:
    """``roles``: per player ``(cells, p_mask)``."""
    partitions, posts, interps = [], [], []
    for k, (cells, pmask) in enumerate(roles):
        partitions.append(tuple(tuple(states[s] for s in c) for c in cells))
        posts.append(posteriors[k] if posteriors else _posteriors(states, cells, nu))
        interps.append({w: frozenset({"p"}) if pmask >> s & 1 else frozenset() for s, w in enumerate(states)})
    priors = None
    if nu is not None:
        prior = {w: nu[s] for s, w in enumerate(states)}
        priors = tuple(prior for _ in roles)
    return Structure(states=states, players=len(roles), partitions=tuple(partitions),
                     posteriors=tuple(posts), interpretations=tuple(interps), propositions=("p",),
                     priors=priors)


def _valid_at(m: Structure, f, views: Iterable[int]) -> bool:
    ev = session(m, Mode.IN)
    return all(ev.extension_mask(f, v) == m.full_mask for v in views)


def _reachable_mass_ok(m: Structure) -> bool:
    vec = m.prior_vectors[0]
    for s in range(len(m.states)):
        r = reachable_mask(m, m.player_ids, s)
        if sum((q for t, q in enumerate(vec) if r >> t & 1), Fraction(0)) == 0:
            return False
    return True


def cpa_search(target: Structure, max_states: int = 3, max_den: int = 12) -> SearchReport:
    """Search CPA structures over ``{p}`` with at most ``max_states`` states
    and a common prior on the grid for one that agrees with ``target`` on
    the validity of every probe in :data:`CPA_PROBES`.

    Stage A keeps the (prior, partition, reading) triples that validate
    ``Pr_j(p) = 2/3`` (resp. 3/4) for a single player; stage B assembles
    three-player structures from the survivors and runs the full
    equivalence check.
    """
    start = time.perf_counter()
    rep = SearchReport(bounds={"max_states": max_states, "max_den": max_den})
    wanted = [session(target, Mode.IN).valid(f) for f in CPA_PROBES]
    n_priors = n_a = n_full = 0
    for k in range(1, max_states + 1):
        states = tuple(f"v{s}" for s in range(1, k + 1))
        roles = [(cells, pm) for cells in set_partitions(k) for pm in range(1 << k)]
        # the probability probes, restated for a one-player structure
        single = {2: (parse("Pr_1(p) = 2/3"), wanted[0]), 3: (parse("Pr_1(p) = 3/4"), wanted[1])}
        for nu in prior_grid(k, max_den):
            n_priors += 1
            keep = {}
            for j, (f, want) in single.items():
                keep[j] = []
                for role in roles:
                    n_a += 1
                    if _valid_at(_build(states, [role], nu), f, [1]) == want:
                        keep[j].append(role)
            for r2 in keep[2]:
                for r3 in keep[3]:
                    for r1 in roles:
                        m = _build(states, [r1, r2, r3], nu)
                        if not _reachable_mass_ok(m):
                            continue
                        n_full += 1
                        v = check_equivalent(target, m, None, Mode.IN, Mode.IN, CPA_PROBES)
                        if v.equivalent:
                            rep.found.append({"states": list(states), "prior": [str(q) for q in nu],
                                              "roles": [r1, r2, r3]})
    rep.examined = {"priors": n_priors, "single_player": n_a, "full": n_full}
    rep.seconds = time.perf_counter() - start
    return rep


def prior_contradiction(m: Structure) -> dict:
    """The masses a common prior would need for the proof's event ``E``.

    With ``E = [[B_1 p]]`` and ``B_j(p <-> B_1 p)`` valid, player ``j``'s
    prior gives ``E`` the same mass as ``[[p]]_j``; players 2 and 3 then
    need different values for ``nu(E)``.
    """
    if m.priors is None:
        raise ValueError("structure has no priors")
    ev = session(m, Mode.IN)
    e = ev.extension_mask(parse("B_1(p)"), 1)
    out = {"E": m.ordered(e)}
    for j in (2, 3):
        vec = m.prior_vectors[j - 1]
        pj = ev.extension_mask(parse("p"), j)
        out[f"nu_{j}(p)"] = sum((q for s, q in enumerate(vec) if pj >> s & 1), Fraction(0))
        out[f"nu_{j}(E)"] = sum((q for s, q in enumerate(vec) if e >> s & 1), Fraction(0))
    out["contradiction"] = out["nu_2(E)"] != out["nu_3(E)"]
    return out


def _posterior_grid(k: int, max_den: int) -> tuple:
    return prior_grid(k, max_den)


def interpretation_search(target: Structure, max_states: int = 3, max_den: int = 4) -> SearchReport:
    """Every structure (three players, ``{p}``, at most ``max_states`` states,
    player-1 posteriors on the grid) that agrees with ``target`` on
    :data:`INTERPRETATION_PROBES` is recorded; ``found`` lists those that are
    not common-interpretation.
    """
    start = time.perf_counter()
    rep = SearchReport(bounds={"max_states": max_states, "max_den": max_den})
    wanted = [session(target, Mode.IN).valid(f) for f in INTERPRETATION_PROBES]
    equivalent = examined = 0
    for k in range(1, max_states + 1):
        states = tuple(f"v{s}" for s in range(1, k + 1))
        full = (tuple(range(k)),)
        uniform = ({states[s]: Fraction(1, k) for s in range(k)},)
        for cells in set_partitions(k):
            grids = [_posterior_grid(len(c), max_den) for c in cells]
            for choice in product(*grids):
                post1 = tuple({states[s]: q for s, q in zip(c, vec)} for c, vec in zip(cells, choice))
                for p1 in range(1 << k):
                    # viewpoint 1 only involves player 1's reading
                    base = _build(states, [(cells, p1), (full, p1), (full, p1)],
                                  posteriors=[post1, uniform, uniform])
                    examined += 1
                    if [_valid_at(base, f, [1]) for f in INTERPRETATION_PROBES] != wanted:
                        continue
                    admissible = []
                    for pj in range(1 << k):
                        m = _build(states, [(cells, p1), (full, pj), (full, p1)],
                                   posteriors=[post1, uniform, uniform])
                        examined += 1
                        if [_valid_at(m, f, [2]) for f in INTERPRETATION_PROBES] == wanted:
                            admissible.append(pj)
                    for p2, p3 in product(admissible, admissible):
                        m = _build(states, [(cells, p1), (full, p2), (full, p3)],
                                   posteriors=[post1, uniform, uniform])
                        examined += 1
                        v = check_equivalent(target, m, None, Mode.IN, Mode.IN, INTERPRETATION_PROBES)
                        if not v.equivalent:
                            continue
                        equivalent += 1
                        if not is_common_interpretation(m):
                            rep.found.append({"states": list(states), "cells": cells,
                                              "readings": [p1, p2, p3]})
    rep.examined = {"structures": examined, "equivalent": equivalent}
    rep.seconds = time.perf_counter() - start
    return rep


def signal_witness(kind: str, seeds: Iterable[int], depth: int = 2,
                   states: tuple = (2, 4), players: tuple = (2, 2)) -> Optional[dict]:
    """First generated structure showing that public signals leave room for
    differing posteriors.

    ``kind="out-ai"``: A5/A6, CPA, a signal public at w for some viewpoint
    v, equal posteriors on formulas as v reads them under out-ai but unequal
    posteriors on events.  ``kind="in-ai"``: A5/A6', CPA, a public signal, equal posteriors
    on events but unequal posteriors on formulas under in-ai.
    """
    from .agreement import classify_signal, compare_posteriors_events, compare_posteriors_formulas
    from .structure import check_cpa, validate_ai
    from .transforms import GeneratorConfig, random_structure

    if kind not in ("out-ai", "in-ai"):
        raise ValueError("kind must be 'out-ai' or 'in-ai'")
    mode = Mode.coerce(kind)
    for seed in seeds:
        cfg = GeneratorConfig(seed=seed, states=states, players=players, propositions=(1, 1),
                              ambiguity_probability=Fraction(1, 2), with_signals=True,
                              ai_assumption="A6" if kind == "out-ai" else "A6'")
        m = random_structure(cfg)
        if not validate_ai(m, mode).ok or not check_cpa(m).ok:
            continue
        for w in m.states:
            row = m.signals[w]
            if row[0] is None or any(s != row[0] for s in row):
                continue
            views = list(m.player_ids) if kind == "out-ai" else [None]
            for v in views:
                if not classify_signal(m, row[0], w, mode, viewpoint=v).public:
                    continue
                for i in m.player_ids:
                    for j in m.player_ids:
                        if i >= j:
                            continue
                        events = compare_posteriors_events(m, w, i, j)
                        formulas = compare_posteriors_formulas(m, w, i, j, mode, depth, viewpoint=v)
                        if events.equal != (kind == "out-ai") and formulas.equal == (kind == "out-ai"):
                            return {"seed": seed, "structure": m, "state": w, "signal": row[0],
                                    "players": (i, j), "viewpoint": v, "events": events, "formulas": formulas}
    return None
