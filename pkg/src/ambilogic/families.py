"""Deterministic finite formula families used as probes for validity and equivalence."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .syntax import CB, TRUE, And, B, Formula, K, Not, Or, Prim, ProbGE, Term, intern

__all__ = ["THRESHOLDS", "propositional_family", "formula_family", "dedupe"]

THRESHOLDS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def dedupe(formulas: Iterable[Formula]) -> list:
    seen = set()
    out = []
    for f in formulas:
        f = intern(f)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def _literals(props: Iterable[str]) -> list:
    out = [TRUE]
    for p in sorted(set(props)):
        out += [Prim(p), Not(Prim(p))]
    return out


def propositional_family(props: Iterable[str], depth: int) -> list:
    """``true`` and the literals, then each round conjoins/disjoins the previous
    round's formulas with a literal."""
    return list(_propositional_family(tuple(sorted(set(props))), depth))


@lru_cache(maxsize=64)
def _propositional_family(props: tuple, depth: int) -> tuple:
    base = _literals(props)
    fam = list(base)
    for _ in range(depth):
        new = []
        for f in fam:
            for g in base:
                if f != g:
                    new += [And(f, g), Or(f, g)]
        fam = dedupe(fam + new)
    return tuple(fam)


def formula_family(props: Iterable[str], players: int, depth: int, *,
                   thresholds: Iterable[Fraction] = THRESHOLDS, knowledge: bool = True) -> list:
    """Probe formulas up to ``depth`` modal/propositional rounds.

    Round ``d`` adds the depth-``d`` propositional formulas and wraps every
    formula of round ``d-1`` in B_i, K_i (unless ``knowledge`` is false),
    ``Pr_i(f) >= t`` for each threshold, and common belief of the full group.
    """
    props = sorted(set(props))
    thresholds = tuple(thresholds)
    group = tuple(range(1, players + 1))
    fam = propositional_family(props, 0)
    for d in range(1, depth + 1):
        new = list(propositional_family(props, d))
        for f in fam:
            for i in group:
                new.append(B(i, f))
                if knowledge:
                    new.append(K(i, f))
                for t in thresholds:
                    new.append(ProbGE((Term(Fraction(1), i, f),), t))
            new.append(CB(group, f))
        fam = dedupe(fam + new)
    return fam
