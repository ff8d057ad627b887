"""Truth of formulas at (structure, state, player) under the four scope rules.

``Mode.OUT``     arguments of another player's probability are read with the
                 evaluating player's interpretation.
``Mode.IN``      they are read with the interpretation of the player whose
                 probability it is.
``Mode.OUT_AI``  like OUT, but player j's belief at w is the prior of j
                 conditioned on the evaluator's reading of j's cell label.
``Mode.IN_AI``   like IN, conditioning on j's own reading of the label.

Events are bitmasks over the structure's state order internally and
frozensets of state names at the public boundary.
"""
from __future__ import annotations

import enum
from functools import lru_cache
import weakref
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .structure import MissingDataError, Structure
from .syntax import (
    CB, K, And, Formula, Iff, Implies, Not, Or, Prim, ProbGE, Top, Term, normalize, parse,
)

__all__ = [
    "Mode", "ConditioningUndefined", "Evaluator", "session", "extension", "evaluate",
    "belief_event", "common_belief", "prob_value", "prop_extension", "label_extension",
    "truth_table", "valid",
]


class Mode(enum.Enum):
    OUT = "out"
    IN = "in"
    OUT_AI = "out-ai"
    IN_AI = "in-ai"

    @classmethod
    def coerce(cls, value: Union["Mode", str]) -> "Mode":
        if isinstance(value, Mode):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"outai": "out-ai", "inai": "in-ai"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown mode {value!r}; expected one of out, in, out-ai, in-ai") from None

    @property
    def innermost(self) -> bool:
        return self in (Mode.IN, Mode.IN_AI)

    @property
    def ai(self) -> bool:
        return self in (Mode.OUT_AI, Mode.IN_AI)


class ConditioningUndefined(ArithmeticError):
    """A prior had to be conditioned on an event of prior mass zero."""

    def __init__(self, player: int, state: str, viewpoint: int):
        self.player = player
        self.state = state
        self.viewpoint = viewpoint
        super().__init__(
            f"cannot condition the prior of player {player} at state {state!r} "
            f"(viewpoint {viewpoint}): the label event has prior mass 0"
        )


def prop_extension(m: Structure, p: str, i: int) -> int:
    return m.prop_masks[i - 1].get(p, 0)


def _propositional_mask(m: Structure, f: Formula, i: int) -> int:
    if isinstance(f, Prim):
        return prop_extension(m, f.name, i)
    if isinstance(f, Top):
        return m.full_mask
    if isinstance(f, Not):
        return m.full_mask & ~_propositional_mask(m, f.arg, i)
    if isinstance(f, And):
        return _propositional_mask(m, f.left, i) & _propositional_mask(m, f.right, i)
    if isinstance(f, Or):
        return _propositional_mask(m, f.left, i) | _propositional_mask(m, f.right, i)
    if isinstance(f, Implies):
        return (m.full_mask & ~_propositional_mask(m, f.left, i)) | _propositional_mask(m, f.right, i)
    if isinstance(f, Iff):
        a = _propositional_mask(m, f.left, i)
        b = _propositional_mask(m, f.right, i)
        return m.full_mask & ~(a ^ b)
    raise ValueError(f"not a propositional formula: {f}")


def label_extension(m: Structure, owner: int, cell: int, reader: int) -> int:
    """``[[label of owner's cell]]_reader`` as a bitmask."""
    if m.cell_labels is None:
        raise MissingDataError("structure has no cell_labels")
    return _propositional_mask(m, m.cell_labels[owner - 1][cell], reader)


def _mass(vec, mask: int) -> Fraction:
    total = Fraction(0)
    s = 0
    while mask:
        if mask & 1:
            total += vec[s]
        mask >>= 1
        s += 1
    return total


@lru_cache(maxsize=1 << 16)
def _threshold(f: ProbGE) -> tuple:
    """(sign of coeff, numerator, denominator) of bound/coeff for a one-term atom."""
    coeff, bound = f.terms[0].coeff, Fraction(f.bound)
    if coeff == 0:
        return (0, bound.numerator, 1)
    c = bound / coeff
    return (1 if coeff > 0 else -1, c.numerator, c.denominator)


_VIEW_FREE = frozenset((ProbGE, CB, K))


class Evaluator:
    """Evaluation session for one structure and mode, with a private memo table."""

    def __init__(self, m: Structure, mode: Union[Mode, str]):
        self.m = m
        self.mode = Mode.coerce(mode)
        if self.mode.ai:
            if m.priors is None:
                raise MissingDataError(f"mode {self.mode.value} needs explicit priors")
            if m.cell_labels is None:
                raise MissingDataError(f"mode {self.mode.value} needs cell_labels")
        self._inner = self.mode.innermost
        self._ai = self.mode.ai
        self._ext: dict = {}
        self._labels: dict = {}
        self._atoms: dict = {}
        self._cb: dict = {}

    # -- helpers

    def arg_view(self, i: int, j: int) -> int:
        """Whose interpretation reads an argument of player j's operator, evaluator i."""
        return j if self._inner else i

    def _check_player(self, j: int):
        if not 1 <= j <= self.m.players:
            raise ValueError(f"player {j} out of range 1..{self.m.players}")

    def _label(self, j: int, cell: int, v: int) -> int:
        key = (j, cell, v)
        got = self._labels.get(key)
        if got is None:
            got = self._labels[key] = label_extension(self.m, j, cell, v)
        return got

    def cell_prob(self, j: int, cell: int, event: int, i: int) -> Fraction:
        """Probability player j assigns to ``event`` on ``cell`` of Pi_j, evaluator i."""
        m = self.m
        if not self.mode.ai:
            total = Fraction(0)
            for s, q in m.posterior_vectors[j - 1][cell]:
                if event >> s & 1:
                    total += q
            return total
        v = self.arg_view(i, j)
        given = self._label(j, cell, v)
        vec = m.prior_vectors[j - 1]
        den = _mass(vec, given)
        if den == 0:
            first = m.partitions[j - 1][cell][0]
            raise ConditioningUndefined(j, first, i)
        return _mass(vec, event & given) / den

    def belief_mask(self, j: int, event: int, i: int) -> int:
        """States where player j gives ``event`` probability 1 (evaluator i)."""
        m = self.m
        out = 0
        for cell, cmask in enumerate(m.cell_masks[j - 1]):
            if self.cell_prob(j, cell, event, i) == 1:
                out |= cmask
        return out

    def common_belief_mask(self, group: Iterable[int], targets: Mapping[int, int], i: int) -> int:
        """Greatest fixpoint of X -> AND_j B_j(Y_j & X) over j in ``group``.

        Iterating from the full event gives X_k = EB^1 & ... & EB^k, because a
        probability-1 belief operator on a finite space commutes with finite
        intersections: B_j(A & A') = B_j(A) & B_j(A').  The sequence decreases
        and stabilizes within |states| + 1 rounds, at the infinite conjunction
        of the EB^k events.
        """
        group = tuple(group)
        key = (group, tuple(targets[j] for j in group), i if self._ai else 0)
        got = self._cb.get(key)
        if got is not None:
            return got
        x = self.m.full_mask
        for _ in range(len(self.m.states) + 2):
            nxt = self.m.full_mask
            for j in group:
                nxt &= self.belief_mask(j, targets[j] & x, i)
            if nxt == x:
                self._cb[key] = x
                return x
            x = nxt
        raise AssertionError("common belief iteration did not stabilize")

    # -- core recursion over normalized formulas

    def mask(self, f: Formula, i: int) -> int:
        key = (f, i)
        got = self._ext.get(key)
        if got is not None:
            return got
        if self._inner and type(f) in _VIEW_FREE:
            # innermost scope reads these arguments with the operator owner's
            # interpretation, so the evaluator does not matter
            shared = (f, 0)
            got = self._ext.get(shared)
            if got is None:
                got = self._ext[shared] = self._compute(f, i)
        else:
            got = self._compute(f, i)
        self._ext[key] = got
        return got

    def _compute(self, f: Formula, i: int) -> int:
        m = self.m
        kind = type(f)
        if kind is And:
            # no short circuit: an undefined conjunct makes the conjunction undefined
            return self.mask(f.left, i) & self.mask(f.right, i)
        if kind is Not:
            return m.full_mask & ~self.mask(f.arg, i)
        if kind is ProbGE:
            return self._prob_atom(f, i)
        if kind is Prim:
            return prop_extension(m, f.name, i)
        if kind is Top:
            return m.full_mask
        if kind is CB:
            for j in f.group:
                self._check_player(j)
            targets = {j: self.mask(f.arg, self.arg_view(i, j)) for j in f.group}
            return self.common_belief_mask(f.group, targets, i)
        if kind is K:
            self._check_player(f.player)
            arg = self.mask(f.arg, self.arg_view(i, f.player))
            out = 0
            for cmask in m.cell_masks[f.player - 1]:
                if cmask & arg == cmask:
                    out |= cmask
            return out
        raise TypeError(f"not a normalized formula node: {kind.__name__}")

    def distribution(self, j: int, event: int, i: int) -> tuple:
        """Player j's probability of ``event`` on each of her cells (evaluator i).

        Memoized by event, so formulas with equal extensions share the work.
        """
        key = (j, event, i if self._ai else 0)
        got = self._atoms.get(key)
        if got is None:
            got = self._atoms[key] = tuple(
                self.cell_prob(j, cell, event, i) for cell in range(len(self.m.cell_masks[j - 1]))
            )
        return got

    def term_value(self, t: Term, cell: int, i: int) -> Fraction:
        event = self.mask(t.arg, self.arg_view(i, t.player))
        return self.distribution(t.player, event, i)[cell]

    def _prob_atom(self, f: ProbGE, i: int) -> int:
        m = self.m
        for t in f.terms:
            self._check_player(t.player)
        if len(f.terms) == 1:
            t = f.terms[0]
            probs = self.distribution(t.player, self.mask(t.arg, self.arg_view(i, t.player)), i)
            sign, bn, bd = _threshold(f)
            out = 0
            for cmask, q in zip(m.cell_masks[t.player - 1], probs):
                # coeff * q >= bound, compared on integers
                d = q.numerator * bd - bn * q.denominator
                if (d >= 0) if sign > 0 else (d <= 0) if sign < 0 else bn <= 0:
                    out |= cmask
            return out
        # the truth value only depends on the tuple of cells the terms look at
        dists = [self.distribution(t.player, self.mask(t.arg, self.arg_view(i, t.player)), i)
                 for t in f.terms]
        seen: dict = {}
        out = 0
        for s in range(len(m.states)):
            key = tuple(m.cell_index[t.player - 1][s] for t in f.terms)
            hit = seen.get(key)
            if hit is None:
                total = Fraction(0)
                for t, d, cell in zip(f.terms, dists, key):
                    total += t.coeff * d[cell]
                hit = seen[key] = total >= f.bound
            if hit:
                out |= 1 << s
        return out

    # -- public conveniences

    def extension_mask(self, f: Union[Formula, str], i: int) -> int:
        if isinstance(f, str):
            f = parse(f)
        self._check_player(i)
        return self.mask(normalize(f), i)

    def holds(self, w: str, i: int, f: Union[Formula, str]) -> bool:
        return bool(self.extension_mask(f, i) >> self.m.index[w] & 1)

    def probability(self, w: str, i: int, j: int, f: Union[Formula, str]) -> Fraction:
        if isinstance(f, str):
            f = parse(f)
        self._check_player(i)
        self._check_player(j)
        cell = self.m.cell_id(j, w)
        event = self.mask(normalize(f), self.arg_view(i, j))
        return self.cell_prob(j, cell, event, i)

    def valid(self, f: Union[Formula, str]) -> bool:
        """True at every state for every viewpoint."""
        return all(self.extension_mask(f, i) == self.m.full_mask for i in self.m.player_ids)


_SESSIONS: "weakref.WeakKeyDictionary[Structure, dict]" = weakref.WeakKeyDictionary()


def session(m: Structure, mode: Union[Mode, str]) -> Evaluator:
    """A memoizing evaluator shared by calls on the same structure and mode."""
    mode = Mode.coerce(mode)
    per = _SESSIONS.setdefault(m, {})
    ev = per.get(mode)
    if ev is None:
        ev = per[mode] = Evaluator(m, mode)
    return ev


def _as_formula(f: Union[Formula, str]) -> Formula:
    return parse(f) if isinstance(f, str) else f


def extension(m: Structure, f: Union[Formula, str], i: int, mode: Union[Mode, str]) -> frozenset:
    """States where ``f`` holds according to player ``i``."""
    return m.event(session(m, mode).extension_mask(_as_formula(f), i))


def evaluate(m: Structure, w: str, i: int, f: Union[Formula, str], mode: Union[Mode, str]) -> bool:
    """Truth of ``f`` at state ``w`` according to player ``i``."""
    if w not in m.index:
        raise KeyError(f"unknown state {w!r}")
    return session(m, mode).holds(w, i, _as_formula(f))


def valid(m: Structure, f: Union[Formula, str], mode: Union[Mode, str]) -> bool:
    return session(m, mode).valid(_as_formula(f))


def belief_event(m: Structure, j: int, event: Iterable[str], i: int, mode: Union[Mode, str]) -> frozenset:
    """States where player ``j`` gives ``event`` probability 1, according to ``i``."""
    ev = session(m, mode)
    return m.event(ev.belief_mask(j, m.mask(event), i))


def common_belief(m: Structure, group: Iterable[int], target, i: int, mode: Union[Mode, str]) -> frozenset:
    """Common belief among ``group`` of ``target`` (an event, or a map player -> event)."""
    ev = session(m, mode)
    group = tuple(sorted(set(group)))
    if not group:
        raise ValueError("common_belief: group must be nonempty")
    if isinstance(target, Mapping):
        targets = {j: m.mask(target[j]) for j in group}
    else:
        mask = m.mask(target)
        targets = {j: mask for j in group}
    return m.event(ev.common_belief_mask(group, targets, i))


def prob_value(m: Structure, w: str, i: int, j: int, f: Union[Formula, str], mode: Union[Mode, str]) -> Fraction:
    """Exact probability of ``Pr_j(f)`` at ``w`` according to player ``i``."""
    return session(m, mode).probability(w, i, j, _as_formula(f))


def truth_table(m: Structure, f: Union[Formula, str], mode: Union[Mode, str],
                states: Iterable[str] = (), viewpoints: Iterable[int] = ()) -> list:
    """Rows of (state, viewpoint, truth) in state-then-player order."""
    ev = session(m, mode)
    f = _as_formula(f)
    states = list(states) or list(m.states)
    viewpoints = list(viewpoints) or list(m.player_ids)
    for w in states:
        if w not in m.index:
            raise KeyError(f"unknown state {w!r}")
    masks = {i: ev.extension_mask(f, i) for i in viewpoints}
    return [(w, i, bool(masks[i] >> m.index[w] & 1)) for w in states for i in viewpoints]

