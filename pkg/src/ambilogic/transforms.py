"""Structure transformations, the equivalence harness and a seeded generator."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .semantics import ConditioningUndefined, Mode, session
from .structure import (
    Structure, generate_priors, is_common_interpretation, reachable_mask,
)
from .syntax import Formula, Prim, normalize, parse, to_text

__all__ = [
    "project_outermost", "disjoint_copies", "add_cell_labels", "GeneratorConfig", "random_structure",
    "EquivalenceVerdict", "check_equivalent", "identity_pairing", "pairing_to_json", "pairing_from_json",
]


# ---------------------------------------------------------------- projection


def project_outermost(m: Structure, i: int) -> Structure:
    """Give every player player ``i``'s interpretation."""
    if not 1 <= i <= m.players:
        raise ValueError(f"player {i} out of range 1..{m.players}")
    interp = m.interpretations[i - 1]
    return m.replace(interpretations=tuple(interp for _ in m.player_ids),
                     name=f"{m.name}-project{i}" if m.name else "")


def identity_pairing(m: Structure, viewpoints: Optional[Iterable[int]] = None) -> dict:
    views = list(m.player_ids) if viewpoints is None else list(viewpoints)
    return {(w, v): (w, v) for w in m.states for v in views}


# ---------------------------------------------------------------- disjoint copies


def copy_name(w: str, j: int) -> str:
    return f"{w}#{j}"


def disjoint_copies(m: Structure) -> tuple:
    """Common-interpretation structure with one copy of the states per player.

    Copy ``j`` of a state carries player ``j``'s interpretation, and player
    ``i``'s beliefs live on the ``i``-copies only.  Returns the new structure
    and the pairing ``(w, j) -> (w#j, j)``.
    """
    n = m.players
    states = tuple(copy_name(w, j) for j in m.player_ids for w in m.states)
    partitions = tuple(
        tuple(tuple(copy_name(w, j) for j in m.player_ids for w in cell) for cell in m.partitions[i - 1])
        for i in m.player_ids
    )
    posteriors = tuple(
        tuple({copy_name(w, i): q for w, q in mu.items()} for mu in m.posteriors[i - 1])
        for i in m.player_ids
    )
    row = {copy_name(w, j): m.interpretations[j - 1][w] for j in m.player_ids for w in m.states}
    base = m.priors if m.priors is not None else generate_priors(m)
    priors = tuple(
        {copy_name(w, j): (base[i - 1].get(w, Fraction(0)) if j == i else Fraction(0))
         for j in m.player_ids for w in m.states}
        for i in m.player_ids
    )
    out = Structure(
        states=states, players=n, partitions=partitions, posteriors=posteriors,
        interpretations=tuple(row for _ in m.player_ids), propositions=m.vocabulary,
        priors=priors, name=f"{m.name}-copies" if m.name else "",
    )
    pairing = {(w, j): (copy_name(w, j), j) for w in m.states for j in m.player_ids}
    return out, pairing


# ---------------------------------------------------------------- fresh cell labels


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def add_cell_labels(m: Structure, w: str) -> Structure:
    """Restrict to the states reachable from ``w`` and name every cell.

    Each cell ``k`` (1-based) of player ``i`` gets a fresh proposition
    ``cell_i_k`` that everyone reads as exactly that cell; those become the
    cell labels, so the result satisfies A5 and A6.
    """
    if w not in m.index:
        raise KeyError(f"unknown state {w!r}")
    if not is_common_interpretation(m):
        raise ValueError("add_cell_labels needs a common-interpretation structure")
    keep = reachable_mask(m, m.player_ids, m.index[w])
    states = tuple(m.ordered(keep))
    kept = set(states)
    taken = set(m.vocabulary)
    partitions, posteriors, labels = [], [], []
    extra: dict = {x: set() for x in states}
    for i in m.player_ids:
        cells, mus, labs = [], [], []
        k = 0
        for cell, mu in zip(m.partitions[i - 1], m.posteriors[i - 1]):
            if cell[0] not in kept:
                continue
            k += 1
            name = _fresh(f"cell_{i}_{k}", taken)
            for x in cell:
                extra[x].add(name)
            cells.append(cell)
            mus.append(dict(mu))
            labs.append(Prim(name))
        partitions.append(tuple(cells))
        posteriors.append(tuple(mus))
        labels.append(tuple(labs))
    row = {x: m.interpretations[0][x] | frozenset(extra[x]) for x in states}
    signals = None
    if m.signals is not None:
        signals = {x: m.signals[x] for x in states}
    out = Structure(
        states=states, players=m.players, partitions=tuple(partitions), posteriors=tuple(posteriors),
        interpretations=tuple(row for _ in m.player_ids),
        propositions=tuple(sorted(set(m.vocabulary) | taken)),
        cell_labels=tuple(labels), signals=signals,
        name=f"{m.name}-labels" if m.name else "",
    )
    priors = None
    if m.priors is not None:
        priors = []
        for nu in m.priors:
            total = sum((nu.get(x, Fraction(0)) for x in states), Fraction(0))
            if total == 0:
                priors = None
                break
            priors.append({x: nu.get(x, Fraction(0)) / total for x in states})
    if priors is None:
        priors = generate_priors(out)
    return out.replace(priors=tuple(priors))


# ---------------------------------------------------------------- equivalence


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    checked: int = 0
    family_size: int = 0
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"equivalent": self.equivalent, "family_size": self.family_size,
                "checked": self.checked, "witness": self.witness}

    def __str__(self) -> str:
        if self.equivalent:
            return f"equivalent (family size {self.family_size})"
        w = self.witness or {}
        return f"not equivalent: {w.get('formula')} at {w.get('left')} vs {w.get('right')}"


def _masks(ev, f: Formula, views: Iterable[int]) -> dict:
    out = {}
    for v in views:
        try:
            out[v] = ev.mask(f, v)
        except ConditioningUndefined as exc:
            out[v] = exc
    return out


def _bit(masks: dict, v: int, s: int):
    got = masks[v]
    if isinstance(got, ConditioningUndefined):
        return f"undefined ({got})"
    return bool(got >> s & 1)


def check_equivalent(m: Structure, m2: Structure, pairing: Optional[Mapping], mode: Union[Mode, str],
                     mode2: Union[Mode, str], family: Sequence[Union[Formula, str]]) -> EquivalenceVerdict:
    """Compare truth values over ``family``.

    ``pairing`` maps ``(state, viewpoint)`` of ``m`` to ``(state, viewpoint)``
    of ``m2``.  With ``pairing=None`` the comparison is of validity: each
    formula must be valid in both structures or in neither.
    """
    ev = session(m, mode)
    ev2 = session(m2, mode2)
    family = [parse(f) if isinstance(f, str) else f for f in family]
    verdict = EquivalenceVerdict(True, family_size=len(family))
    if pairing is None:
        for f in family:
            verdict.checked += 1
            a, b = ev.valid(f), ev2.valid(f)
            if a != b:
                verdict.equivalent = False
                verdict.witness = {"formula": to_text(f), "left": {"valid": a}, "right": {"valid": b}}
                return verdict
        return verdict
    pairs = []
    for (w, v), (w2, v2) in pairing.items():
        ev._check_player(v)
        ev2._check_player(v2)
        pairs.append((w, v, m.index[w], w2, v2, m2.index[w2]))
    views = sorted({p[1] for p in pairs})
    views2 = sorted({p[4] for p in pairs})
    for f in family:
        nf = normalize(f)
        left, right = _masks(ev, nf, views), _masks(ev2, nf, views2)
        for w, v, s, w2, v2, s2 in pairs:
            verdict.checked += 1
            a, b = _bit(left, v, s), _bit(right, v2, s2)
            if a != b:
                verdict.equivalent = False
                verdict.witness = {
                    "formula": to_text(f),
                    "left": {"state": w, "viewpoint": v, "value": a},
                    "right": {"state": w2, "viewpoint": v2, "value": b},
                }
                return verdict
    return verdict


def pairing_to_json(pairing: Mapping) -> list:
    return [{"state": w, "viewpoint": v, "to_state": w2, "to_viewpoint": v2}
            for (w, v), (w2, v2) in pairing.items()]


def pairing_from_json(rows: Iterable[Mapping]) -> dict:
    return {(r["state"], r["viewpoint"]): (r["to_state"], r["to_viewpoint"]) for r in rows}


# ---------------------------------------------------------------- generator

_PROP_NAMES = ("p", "q", "r", "t", "u", "v")


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`random_structure`; ranges are inclusive."""

    states: tuple = (1, 4)
    players: tuple = (1, 3)
    propositions: tuple = (1, 2)
    ambiguity_probability: Fraction = Fraction(1, 3)
    common_prior: bool = True
    with_signals: bool = False
    ai_assumption: str = "A6'"
    degenerate: bool = False
    seed: int = 0

    def __post_init__(self):
        for key in ("states", "players", "propositions"):
            lo, hi = getattr(self, key)
            if not 0 <= lo <= hi:
                raise ValueError(f"{key}: empty or negative range {lo}..{hi}")
        if self.states[0] < 1 or self.players[0] < 1:
            raise ValueError("states and players need at least 1")
        if not 0 <= Fraction(self.ambiguity_probability) <= 1:
            raise ValueError("ambiguity_probability must lie in [0, 1]")
        if self.ai_assumption not in ("A6", "A6'"):
            raise ValueError("ai_assumption must be 'A6' or \"A6'\"")


def _chance(rng: random.Random, q: Fraction) -> bool:
    q = Fraction(q)
    return rng.randrange(q.denominator) < q.numerator


def _random_partition(rng: random.Random, states: Sequence[str]) -> tuple:
    k = rng.randint(1, len(states))
    tags = [rng.randrange(k) for _ in states]
    order: dict = {}
    for w, t in zip(states, tags):
        order.setdefault(t, []).append(w)
    return tuple(tuple(c) for c in order.values())


def _weights(rng: random.Random, states: Sequence[str], partition, degenerate: bool) -> dict:
    lo = 0 if degenerate else 1
    wt = {w: rng.randint(lo, 6) for w in states}
    if partition is not None:
        for cell in partition:
            if all(wt[w] == 0 for w in cell):
                wt[cell[0]] = rng.randint(1, 6)
    total = sum(wt.values())
    return {w: Fraction(x, total) for w, x in wt.items()}


def _condition(nu: Mapping[str, Fraction], cell: Sequence[str]) -> dict:
    mass = sum((nu[w] for w in cell), Fraction(0))
    return {w: nu[w] / mass for w in cell}


def random_structure(cfg: GeneratorConfig) -> Structure:
    """A structure drawn deterministically from ``cfg.seed``.

    Posteriors always come from conditioning the priors; with
    ``common_prior`` all players share one prior.  Player 1's truth
    assignment is the reference and every other player's bit flips with
    ``ambiguity_probability``.  With ``with_signals`` every cell receives a
    signal and the ``recv`` propositions label the cells (A5); other players'
    readings of a label coarsen the cell under ``"A6"`` and are flipped per
    state under ``"A6'"``.
    """
    rng = random.Random(cfg.seed)
    amb = Fraction(cfg.ambiguity_probability)
    states = tuple(f"w{k}" for k in range(1, rng.randint(*cfg.states) + 1))
    n = rng.randint(*cfg.players)
    nprops = rng.randint(*cfg.propositions)
    props = tuple(_PROP_NAMES[k] if k < len(_PROP_NAMES) else f"p{k}" for k in range(nprops))
    partitions = tuple(_random_partition(rng, states) for _ in range(n))

    if cfg.common_prior:
        # a common prior must give every cell of every player positive mass
        nu = _weights(rng, states, None, cfg.degenerate)
        if cfg.degenerate:
            for cells in partitions:
                for cell in cells:
                    if all(nu[w] == 0 for w in cell):
                        nu = _weights(rng, states, None, False)
                        break
        priors = tuple(nu for _ in range(n))
    else:
        priors = tuple(_weights(rng, states, partitions[i], cfg.degenerate) for i in range(n))
    posteriors = tuple(tuple(_condition(priors[i], c) for c in partitions[i]) for i in range(n))

    base = {w: {p for p in props if rng.randrange(2)} for w in states}
    interps = [{w: set(base[w]) for w in states}]
    for _ in range(1, n):
        interps.append({w: {p for p in props if (p in base[w]) != _chance(rng, amb)} for w in states})

    cell_labels = None
    signals = None
    vocab = set(props)
    if cfg.with_signals:
        most = max(len(c) for c in partitions)
        pool = [f"s{k}" for k in range(most)]
        sig = {w: [None] * n for w in states}
        labels = []
        for i in range(n):
            names = rng.sample(pool, len(partitions[i]))
            labs = []
            for cell, s in zip(partitions[i], names):
                for w in cell:
                    sig[w][i] = s
                labs.append(Prim(f"recv_{i + 1}_{s}"))
            labels.append(tuple(labs))
            for s in pool:
                vocab.add(f"recv_{i + 1}_{s}")
            # owner's reading: exactly the cell
            for cell, s in zip(partitions[i], names):
                for w in states:
                    if w in cell:
                        interps[i][w].add(f"recv_{i + 1}_{s}")
            for j in range(n):
                if j == i:
                    continue
                if cfg.ai_assumption == "A6":
                    groups = list(range(len(partitions[i])))
                    for k in range(1, len(groups)):
                        if _chance(rng, amb):
                            groups[k] = groups[rng.randrange(k)]
                    for k, (cell, s) in enumerate(zip(partitions[i], names)):
                        merged = {w for kk, c in enumerate(partitions[i]) if groups[kk] == groups[k] for w in c}
                        for w in merged:
                            interps[j][w].add(f"recv_{i + 1}_{s}")
                else:
                    for cell, s in zip(partitions[i], names):
                        for w in states:
                            if (w in cell) != _chance(rng, amb):
                                interps[j][w].add(f"recv_{i + 1}_{s}")
        cell_labels = tuple(labels)
        signals = {w: tuple(sig[w]) for w in states}

    return Structure(
        states=states, players=n, partitions=partitions, posteriors=posteriors,
        interpretations=tuple({w: frozenset(x[w]) for w in states} for x in interps),
        propositions=tuple(sorted(vocab)), priors=priors, cell_labels=cell_labels,
        signals=signals, name=f"seed{cfg.seed}",
    )
