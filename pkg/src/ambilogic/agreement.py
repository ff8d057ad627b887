"""Ambiguity measures, agreement-theorem scans and signal classification."""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence, Union

from .families import THRESHOLDS, propositional_family
from .semantics import Mode, _propositional_mask, session
from .structure import (
    MissingDataError, Structure, check_cpa, is_common_interpretation, reachable_mask,
)
from .syntax import (
    CB, And, B, Formula, Iff, Prim, ProbCmp, Term, conj, is_propositional, parse,
    to_text,
)

__all__ = [
    "AmbiguityReport", "ambiguity_measure", "AgreementReport", "check_agreement_bound",
    "agreement_scan", "SignalFlags", "classify_signal", "recv", "PosteriorComparison",
    "compare_posteriors_events", "compare_posteriors_formulas", "AumannReport", "aumann_check",
    "common_prior",
]


_DISTINCT: "weakref.WeakKeyDictionary[Structure, dict]" = weakref.WeakKeyDictionary()


def _distinct_propositional(m: Structure, depth: int) -> tuple:
    """Propositional formulas up to ``depth``, one per tuple of per-player extensions."""
    per = _DISTINCT.setdefault(m, {})
    if depth not in per:
        seen = set()
        out = []
        for f in propositional_family(m.vocabulary, depth):
            key = tuple(_propositional_mask(m, f, i) for i in m.player_ids)
            if key not in seen:
                seen.add(key)
                out.append(f)
        per[depth] = tuple(out)
    return per[depth]


def _formula(f: Union[Formula, str]) -> Formula:
    return parse(f) if isinstance(f, str) else f


def common_prior(m: Structure) -> tuple:
    """The structure's prior vector when every player has the same one."""
    if m.priors is None:
        raise MissingDataError("structure has no priors")
    vecs = m.prior_vectors
    if any(v != vecs[0] for v in vecs[1:]):
        raise MissingDataError("players' priors differ; no common prior to use")
    return vecs[0]


def _mass(vec: Sequence[Fraction], mask: int) -> Fraction:
    return sum((q for s, q in enumerate(vec) if mask >> s & 1), Fraction(0))


# ---------------------------------------------------------------- ambiguity


@dataclass
class AmbiguityReport:
    formula: Formula
    epsilon: Fraction
    disagreement_event: frozenset

    def to_dict(self, m: Optional[Structure] = None) -> dict:
        states = m.ordered(m.mask(self.disagreement_event)) if m else sorted(self.disagreement_event)
        return {"formula": to_text(self.formula), "epsilon": str(self.epsilon), "disagreement_event": states}


def _disagreement_mask(m: Structure, f: Formula) -> int:
    masks = [_propositional_mask(m, f, i) for i in m.player_ids]
    union = 0
    inter = m.full_mask
    for x in masks:
        union |= x
        inter &= x
    return union & ~inter


def ambiguity_measure(m: Structure, f: Union[Formula, str],
                      prior: Optional[Mapping[str, Fraction]] = None) -> AmbiguityReport:
    """Prior mass of the states where some two players disagree about ``f``."""
    f = _formula(f)
    if not is_propositional(f):
        raise ValueError(f"ambiguity_measure needs a propositional formula, got {to_text(f)}")
    vec = common_prior(m) if prior is None else tuple(prior.get(w, Fraction(0)) for w in m.states)
    dis = _disagreement_mask(m, f)
    return AmbiguityReport(f, _mass(vec, dis), m.event(dis))


# ---------------------------------------------------------------- agreement bound


def _strict_lt(i: int, f: Formula, b: Fraction) -> Formula:
    return ProbCmp("<", (Term(Fraction(1), i, f),), b)


def _strict_gt(j: int, f: Formula, b: Fraction) -> Formula:
    return ProbCmp(">", (Term(Fraction(1), j, f),), b)


@dataclass
class AgreementReport:
    status: str  # "consistent", "violated", "vacuous" or "precondition"
    epsilon: Optional[Fraction] = None
    detail: str = ""
    witnesses: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return self.status != "violated"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "detail": self.detail,
            "checked": self.checked,
            "witnesses": self.witnesses,
        }


def _cpa_failure(m: Structure) -> Optional[str]:
    if m.priors is None:
        return "structure has no priors"
    rep = check_cpa(m)
    if not rep.ok:
        return "CPA fails: " + "; ".join(c.detail for c in rep.failed())
    return None


def check_agreement_bound(m: Structure, group: Iterable[int], f: Union[Formula, str],
                          b: Fraction, b2: Fraction) -> AgreementReport:
    """Search for players i, j and a state w from which every state is
    group-reachable with CB_G(Pr_i(f) < b & Pr_j(f) > b2) under innermost scope.

    With a common prior and ``b2 > b + eps`` such a witness cannot exist; one
    turning up means the evaluator is wrong.
    """
    f = _formula(f)
    group = tuple(sorted(set(group)))
    b, b2 = Fraction(b), Fraction(b2)
    if not is_propositional(f):
        return AgreementReport("precondition", detail="formula is not propositional")
    why = _cpa_failure(m)
    if why:
        return AgreementReport("precondition", detail=why)
    eps = ambiguity_measure(m, f).epsilon
    if not b2 > b + eps:
        return AgreementReport("vacuous", eps,
                               f"premise b' > b + eps fails ({b2} <= {b} + {eps}); the bound cannot be violated")
    ev = session(m, Mode.IN)
    roots = [s for s in range(len(m.states)) if reachable_mask(m, group, s) == m.full_mask]
    rep = AgreementReport("consistent", eps, "no witness: consistent with the agreement bound")
    for i in m.player_ids:
        for j in m.player_ids:
            target = CB(group, And(_strict_lt(i, f, b), _strict_gt(j, f, b2)))
            mask = ev.extension_mask(target, i)
            for s in roots:
                rep.checked += 1
                if mask >> s & 1:
                    rep.witnesses.append({"i": i, "j": j, "state": m.states[s], "formula": to_text(f),
                                          "b": str(b), "b2": str(b2)})
    if rep.witnesses:
        rep.status = "violated"
        rep.detail = "witness found: the evaluator contradicts the agreement bound"
    return rep


def agreement_scan(m: Structure, group: Optional[Iterable[int]] = None, depth: int = 2,
                   grid: Sequence[Fraction] = THRESHOLDS) -> AgreementReport:
    """Run :func:`check_agreement_bound` over propositional formulas up to
    ``depth`` (deduplicated by extension) and every admissible grid pair."""
    group = tuple(m.player_ids) if group is None else tuple(group)
    why = _cpa_failure(m)
    if why:
        return AgreementReport("precondition", detail=why)
    total = AgreementReport("consistent", detail="no witness over the scanned formulas and thresholds")
    for f in _distinct_propositional(m, depth):
        for b, b2 in product(grid, grid):
            r = check_agreement_bound(m, group, f, b, b2)
            total.checked += r.checked
            if r.status == "violated":
                total.witnesses.extend(r.witnesses)
    if total.witnesses:
        total.status = "violated"
        total.detail = "witness found: the evaluator contradicts the agreement bound"
    return total


# ---------------------------------------------------------------- signals


def recv(i: int, signal: str) -> Prim:
    """The proposition "player i received ``signal``"."""
    return Prim(f"recv_{i}_{signal}")


@dataclass
class SignalFlags:
    signal: str
    state: str
    mode: Mode
    received_by_all: bool
    common: bool
    public: bool
    shared: bool
    strongly_shared: bool

    def to_dict(self) -> dict:
        return {
            "signal": self.signal, "state": self.state, "mode": self.mode.value,
            "received_by_all": self.received_by_all, "common": self.common, "public": self.public,
            "shared": self.shared, "strongly_shared": self.strongly_shared,
        }

    def __str__(self) -> str:
        yn = lambda b: "yes" if b else "no"  # noqa: E731
        return (f"common: {yn(self.common)}, public: {yn(self.public)}, shared: {yn(self.shared)}, "
                f"strongly shared: {yn(self.strongly_shared)}")


def signal_formulas(n: int, signal: str) -> dict:
    group = tuple(range(1, n + 1))
    players = range(1, n + 1)
    public = CB(group, conj(recv(i, signal) for i in players))
    shared = conj(CB(group, Iff(recv(i, signal), recv(j, signal))) for i in players for j in players)
    believed = conj(CB(group, Iff(B(i, recv(i, signal)), B(j, recv(j, signal))))
                    for i in players for j in players)
    return {"public": public, "shared": shared, "believed": believed}


def classify_signal(m: Structure, signal: str, w: str, mode: Union[Mode, str],
                    viewpoint: Optional[int] = None) -> SignalFlags:
    """Evaluate the common/public/shared/strongly-shared definitions at ``w``.

    Under the outermost modes truth depends on the evaluating player; with
    ``viewpoint=None`` a flag is set only if it holds for every player.
    """
    mode = Mode.coerce(mode)
    if m.signals is None:
        raise MissingDataError("structure has no signal map")
    if w not in m.index:
        raise KeyError(f"unknown state {w!r}")
    if not any(signal in row for row in m.signals.values()):
        raise KeyError(f"unknown signal {signal!r}")
    row = m.signals[w]
    views = list(m.player_ids) if viewpoint is None else [viewpoint]
    ev = session(m, mode)
    s = m.index[w]
    forms = signal_formulas(m.players, signal)

    def holds(f):
        return all(ev.extension_mask(f, v) >> s & 1 for v in views)

    shared = holds(forms["shared"])
    return SignalFlags(
        signal=signal, state=w, mode=mode,
        received_by_all=all(x == signal for x in row),
        common=all(x == signal for x in row),
        public=holds(forms["public"]),
        shared=shared,
        strongly_shared=shared and holds(forms["believed"]),
    )


# ---------------------------------------------------------------- posteriors


@dataclass
class PosteriorComparison:
    equal: bool
    detail: str = ""
    witness: Optional[dict] = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {"equal": self.equal, "detail": self.detail, "witness": self.witness, "checked": self.checked}


def compare_posteriors_events(m: Structure, w: str, i: int, j: int) -> PosteriorComparison:
    """Compare mu_{i,w} and mu_{j,w} as measures on all states (zero off-cell).

    Unequal measures always differ on some singleton; the first one in state
    order is reported.
    """
    mu_i = m.posterior(i, w)
    mu_j = m.posterior(j, w)
    zero = Fraction(0)
    for x in m.states:
        a, c = mu_i.get(x, zero), mu_j.get(x, zero)
        if a != c:
            return PosteriorComparison(False, "posteriors over events differ",
                                       {"event": [x], "values": [str(a), str(c)]}, len(m.states))
    return PosteriorComparison(True, "posteriors over events are identical", None, len(m.states))


def compare_posteriors_formulas(m: Structure, w: str, i: int, j: int, mode: Union[Mode, str],
                                depth: int = 2, viewpoint: Optional[int] = None) -> PosteriorComparison:
    """Compare the two players' probabilities of propositional formulas at ``w``.

    Innermost modes compare each player's probability of her own reading of
    the formula.  Outermost modes compare the probabilities an evaluating
    player v attributes to i and to j, both read with v's interpretation, for
    ``v = viewpoint`` or for every player when it is None.  Formulas with
    identical extensions are checked once.
    """
    mode = Mode.coerce(mode)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ev = session(m, mode)
    if mode.innermost:
        pairs = [(i, i, j, j)]
    else:
        views = m.player_ids if viewpoint is None else [viewpoint]
        pairs = [(v, i, v, j) for v in views]
    checked = 0
    for f in _distinct_propositional(m, depth):
        for vi, pi, vj, pj in pairs:
            checked += 1
            a = ev.probability(w, vi, pi, f)
            c = ev.probability(w, vj, pj, f)
            if a != c:
                wit = {"formula": to_text(f), "values": [str(a), str(c)]}
                if not mode.innermost:
                    wit["viewpoint"] = vi
                return PosteriorComparison(False, "posteriors over formulas differ", wit, checked)
    return PosteriorComparison(True, f"posteriors over formulas equal up to depth {depth}", None, checked)


# ---------------------------------------------------------------- Aumann


@dataclass
class AumannReport:
    preconditions_ok: bool
    detail: str = ""
    violations: list = field(default_factory=list)
    escapes: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"preconditions_ok": self.preconditions_ok, "detail": self.detail,
                "violations": self.violations, "escapes": self.escapes, "checked": self.checked}


def aumann_check(m: Structure, group: Optional[Iterable[int]] = None, depth: int = 2,
                 force: bool = False) -> AumannReport:
    """Look for common belief among ``group`` of two different point beliefs.

    The scan needs a common interpretation and the CPA; otherwise it reports
    the failed precondition and, with ``force``, runs anyway under innermost
    scope, listing any common belief of differing posteriors as an escape.
    """
    group = tuple(m.player_ids) if group is None else tuple(sorted(set(group)))
    problems = []
    if not is_common_interpretation(m):
        problems.append("not a common-interpretation structure")
    why = _cpa_failure(m)
    if why:
        problems.append(why)
    rep = AumannReport(not problems, "; ".join(problems) or "common interpretation and CPA hold")
    if problems and not force:
        return rep
    ev = session(m, Mode.IN)
    seen = set()
    for f in propositional_family(m.vocabulary, depth):
        key = tuple(ev.extension_mask(f, v) for v in m.player_ids)
        if key in seen:
            continue
        seen.add(key)
        for s, w in enumerate(m.states):
            for i in group:
                for j in group:
                    if j <= i:
                        continue
                    a = ev.probability(w, i, i, f)
                    c = ev.probability(w, j, j, f)
                    target = CB(group, And(ProbCmp("=", (Term(Fraction(1), i, f),), a),
                                           ProbCmp("=", (Term(Fraction(1), j, f),), c)))
                    rep.checked += 1
                    if ev.extension_mask(target, i) >> s & 1 and a != c:
                        item = {"state": w, "i": i, "j": j, "formula": to_text(f),
                                "values": [str(a), str(c)]}
                        (rep.violations if not problems else rep.escapes).append(item)
    if rep.escapes:
        rep.detail += "; ambiguity escape hatch: common belief of differing posteriors"
    return rep
