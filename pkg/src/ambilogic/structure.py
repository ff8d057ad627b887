"""Finite epistemic probability structures and the checks that apply to them.

A structure carries, for each player ``i`` in ``1..n``, an information
partition of the states, one posterior measure per partition cell, and an
interpretation of the primitive propositions.  Optional extras are per-player
priors, propositional labels describing each cell, and per-state signals.

Posteriors are stored per cell, so a player's probability space is the same
at every state of a cell by construction.  All algebras are powersets.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from .syntax import PROP_NAME, Formula, ParseError, is_propositional, parse, to_text

__all__ = [
    "Structure", "ModelFormatError", "MissingDataError", "Check", "Report",
    "load_model", "loads_model", "dump_model", "dumps_model",
    "model_from_dict", "model_to_dict", "parse_rational", "format_rational",
    "validate", "validate_ai", "reachable", "reachable_mask", "generate_priors",
    "check_prior_generated", "check_cpa", "is_common_interpretation",
    "conditional", "MAX_STATES",
]

MAX_STATES = 64


class ModelFormatError(ValueError):
    """A model file or dict does not describe a structure."""


class MissingDataError(ValueError):
    """An operation needs optional structure data (priors, labels, signals) that is absent."""


def parse_rational(value: Any, where: str = "") -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ModelFormatError(f"{where}: rational must be a string 'n' or 'n/d', got {value!r}")
    try:
        text = str(value).strip()
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ModelFormatError(f"{where}: zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except ValueError as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"{where}: bad rational {value!r}") from None


def format_rational(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True, eq=True)
class Structure:
    """An immutable finite structure; players are numbered from 1.

    ``partitions[i-1]`` lists player ``i``'s cells as tuples of state names in
    state order; ``posteriors[i-1][k]`` maps the states of cell ``k`` to
    probabilities.  ``interpretations[i-1][w]`` is the set of propositions
    player ``i`` takes to be true at ``w``.
    """

    states: tuple
    players: int
    partitions: tuple
    posteriors: tuple
    interpretations: tuple
    propositions: tuple = ()
    priors: Optional[tuple] = None
    cell_labels: Optional[tuple] = None
    signals: Optional[Mapping[str, tuple]] = None
    name: str = field(default="", compare=False)

    __hash__ = object.__hash__

    def __post_init__(self):
        if not self.states:
            raise ModelFormatError("structure needs at least one state")
        if len(self.states) > MAX_STATES:
            raise ModelFormatError(f"at most {MAX_STATES} states are supported, got {len(self.states)}")
        if len(set(self.states)) != len(self.states):
            raise ModelFormatError("state names must be unique")
        if self.players < 1:
            raise ModelFormatError("players must be >= 1")
        for key in ("partitions", "posteriors", "interpretations"):
            if len(getattr(self, key)) != self.players:
                raise ModelFormatError(f"{key}: expected one entry per player ({self.players})")
        known = set(self.states)
        for i, cells in enumerate(self.partitions, 1):
            seen: list = []
            for cell in cells:
                if not cell:
                    raise ModelFormatError(f"partitions[{i}]: empty cell")
                for w in cell:
                    if w not in known:
                        raise ModelFormatError(f"partitions[{i}]: unknown state {w!r}")
                seen.extend(cell)
            if sorted(seen) != sorted(self.states):
                raise ModelFormatError(f"partitions[{i}]: cells must cover every state exactly once")
            if len(self.posteriors[i - 1]) != len(cells):
                raise ModelFormatError(f"posteriors[{i}]: expected one measure per cell")
            for k, mu in enumerate(self.posteriors[i - 1]):
                for w in mu:
                    if w not in known:
                        raise ModelFormatError(f"posteriors[{i}][{k}]: unknown state {w!r}")
        if self.priors is not None:
            if len(self.priors) != self.players:
                raise ModelFormatError("priors: expected one map per player")
            for i, nu in enumerate(self.priors, 1):
                for w in nu:
                    if w not in known:
                        raise ModelFormatError(f"priors[{i}]: unknown state {w!r}")
        if self.cell_labels is not None:
            if len(self.cell_labels) != self.players:
                raise ModelFormatError("cell_labels: expected one list per player")
            for i, labels in enumerate(self.cell_labels, 1):
                if len(labels) != len(self.partitions[i - 1]):
                    raise ModelFormatError(f"cell_labels[{i}]: expected one label per cell")
        if self.signals is not None:
            for w, row in self.signals.items():
                if w not in known:
                    raise ModelFormatError(f"signals: unknown state {w!r}")
                if len(row) != self.players:
                    raise ModelFormatError(f"signals[{w!r}]: expected one entry per player")

    # -- indexing helpers (computed once; the structure is immutable)

    @cached_property
    def index(self) -> dict:
        return {w: k for k, w in enumerate(self.states)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.states)) - 1

    @cached_property
    def cell_masks(self) -> tuple:
        """``cell_masks[i-1][k]``: bitmask of player ``i``'s ``k``-th cell."""
        return tuple(tuple(self.mask(c) for c in cells) for cells in self.partitions)

    @cached_property
    def cell_index(self) -> tuple:
        """``cell_index[i-1][s]``: which cell of player ``i`` holds state index ``s``."""
        out = []
        for cells in self.partitions:
            row = [0] * len(self.states)
            for k, cell in enumerate(cells):
                for w in cell:
                    row[self.index[w]] = k
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def posterior_vectors(self) -> tuple:
        """``posterior_vectors[i-1][k]``: tuple of (state index, mass) with nonzero mass."""
        return tuple(
            tuple(tuple((self.index[w], q) for w, q in mu.items() if q != 0) for mu in cells)
            for cells in self.posteriors
        )

    @cached_property
    def prior_vectors(self) -> Optional[tuple]:
        if self.priors is None:
            return None
        return tuple(
            tuple(nu.get(w, Fraction(0)) for w in self.states) for nu in self.priors
        )

    @cached_property
    def vocabulary(self) -> tuple:
        props = set(self.propositions)
        for interp in self.interpretations:
            for true_props in interp.values():
                props.update(true_props)
        return tuple(sorted(props))

    @cached_property
    def prop_masks(self) -> tuple:
        """``prop_masks[i-1][p]``: states where player ``i`` takes ``p`` to be true."""
        out = []
        for interp in self.interpretations:
            masks: dict = {}
            for w, true_props in interp.items():
                bit = 1 << self.index[w]
                for p in true_props:
                    masks[p] = masks.get(p, 0) | bit
            out.append(masks)
        return tuple(out)

    def mask(self, states: Iterable[str]) -> int:
        m = 0
        for w in states:
            m |= 1 << self.index[w]
        return m

    def event(self, mask: int) -> frozenset:
        return frozenset(w for k, w in enumerate(self.states) if mask >> k & 1)

    def ordered(self, mask: int) -> list:
        return [w for k, w in enumerate(self.states) if mask >> k & 1]

    def cell(self, i: int, w: str) -> tuple:
        """The cell of player ``i``'s partition containing ``w``."""
        return self.partitions[i - 1][self.cell_index[i - 1][self.index[w]]]

    def cell_id(self, i: int, w: str) -> int:
        return self.cell_index[i - 1][self.index[w]]

    def posterior(self, i: int, w: str) -> dict:
        return self.posteriors[i - 1][self.cell_id(i, w)]

    def holds(self, i: int, w: str, p: str) -> bool:
        return p in self.interpretations[i - 1].get(w, frozenset())

    def label(self, i: int, w: str) -> Formula:
        if self.cell_labels is None:
            raise MissingDataError("structure has no cell_labels")
        return self.cell_labels[i - 1][self.cell_id(i, w)]

    @property
    def player_ids(self) -> range:
        return range(1, self.players + 1)

    def replace(self, **changes) -> "Structure":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return Structure(**data)


def is_common_interpretation(m: Structure) -> bool:
    first = m.interpretations[0]
    return all(
        all(interp.get(w, frozenset()) == first.get(w, frozenset()) for w in m.states)
        for interp in m.interpretations[1:]
    )


# ---------------------------------------------------------------- model files


def _expect(cond: bool, msg: str):
    if not cond:
        raise ModelFormatError(msg)


def model_from_dict(data: Mapping[str, Any], name: str = "") -> Structure:
    """Build a :class:`Structure` from the model-file JSON object."""
    _expect(isinstance(data, Mapping), "model must be a JSON object")
    for key in ("states", "players", "partitions", "posteriors", "interpretations"):
        _expect(key in data, f"missing required field {key!r}")
    states = data["states"]
    _expect(isinstance(states, list) and all(isinstance(w, str) and w for w in states),
            "states: expected an array of nonempty strings")
    n = data["players"]
    _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 1, "players: expected an integer >= 1")

    def per_player(key):
        val = data[key]
        _expect(isinstance(val, list) and len(val) == n, f"{key}: expected an array with one entry per player")
        return val

    partitions = []
    for i, cells in enumerate(per_player("partitions"), 1):
        _expect(isinstance(cells, list) and all(isinstance(c, list) for c in cells),
                f"partitions[{i}]: expected an array of arrays of state names")
        order = {w: k for k, w in enumerate(states)}
        norm = []
        for c in cells:
            for w in c:
                _expect(isinstance(w, str) and w in order, f"partitions[{i}]: unknown state {w!r}")
            norm.append(tuple(sorted(c, key=order.__getitem__)))
        partitions.append(tuple(norm))

    posteriors = []
    for i, cells in enumerate(per_player("posteriors"), 1):
        _expect(isinstance(cells, list) and all(isinstance(c, Mapping) for c in cells),
                f"posteriors[{i}]: expected an array of objects (one per cell)")
        posteriors.append(tuple(
            {w: parse_rational(q, f"posteriors[{i}][{k}][{w}]") for w, q in c.items()}
            for k, c in enumerate(cells)
        ))

    interpretations = []
    for i, interp in enumerate(per_player("interpretations"), 1):
        _expect(isinstance(interp, Mapping), f"interpretations[{i}]: expected an object state -> [props]")
        row = {}
        for w in states:
            props = interp.get(w, [])
            _expect(isinstance(props, list) and all(isinstance(p, str) and PROP_NAME.match(p) for p in props),
                    f"interpretations[{i}][{w}]: expected an array of proposition names")
            row[w] = frozenset(props)
        for w in interp:
            _expect(w in states, f"interpretations[{i}]: unknown state {w!r}")
        interpretations.append(row)

    propositions = data.get("propositions", [])
    _expect(isinstance(propositions, list) and all(isinstance(p, str) for p in propositions),
            "propositions: expected an array of names")
    for prop in propositions:
        _expect(bool(PROP_NAME.match(prop)), f"propositions: {prop!r} is not a valid proposition name")

    priors = None
    if data.get("priors") is not None:
        priors = tuple(
            {w: parse_rational(q, f"priors[{i}][{w}]") for w, q in nu.items()}
            for i, nu in enumerate(per_player("priors"), 1)
        )
        for i, nu in enumerate(data["priors"], 1):
            _expect(isinstance(nu, Mapping), f"priors[{i}]: expected an object state -> rational")

    cell_labels = None
    if data.get("cell_labels") is not None:
        rows = []
        for i, labels in enumerate(per_player("cell_labels"), 1):
            _expect(isinstance(labels, list), f"cell_labels[{i}]: expected an array of formula strings")
            parsed = []
            for k, text in enumerate(labels):
                _expect(isinstance(text, str), f"cell_labels[{i}][{k}]: expected a formula string")
                try:
                    parsed.append(parse(text))
                except ParseError as exc:
                    raise ModelFormatError(f"cell_labels[{i}][{k}]: {exc}") from None
            rows.append(tuple(parsed))
        cell_labels = tuple(rows)

    signals = None
    if data.get("signals") is not None:
        sig = data["signals"]
        _expect(isinstance(sig, Mapping), "signals: expected an object state -> [signal or null]")
        signals = {}
        for w in states:
            row = sig.get(w, [None] * n)
            _expect(isinstance(row, list) and len(row) == n
                    and all(s is None or isinstance(s, str) for s in row),
                    f"signals[{w}]: expected an array of signal names or null, one per player")
            signals[w] = tuple(row)

    return Structure(
        states=tuple(states), players=n, partitions=tuple(partitions),
        posteriors=tuple(posteriors), interpretations=tuple(interpretations),
        propositions=tuple(sorted(set(propositions))), priors=priors,
        cell_labels=cell_labels, signals=signals, name=name,
    )


def model_to_dict(m: Structure) -> dict:
    out: dict = {
        "states": list(m.states),
        "players": m.players,
        "propositions": list(m.vocabulary),
        "partitions": [[list(c) for c in cells] for cells in m.partitions],
        "posteriors": [
            [{w: format_rational(mu[w]) for w in m.states if w in mu} for mu in cells]
            for cells in m.posteriors
        ],
        "interpretations": [
            {w: sorted(interp.get(w, ())) for w in m.states} for interp in m.interpretations
        ],
    }
    if m.priors is not None:
        out["priors"] = [{w: format_rational(nu[w]) for w in m.states if w in nu} for nu in m.priors]
    if m.cell_labels is not None:
        out["cell_labels"] = [[to_text(f) for f in labels] for labels in m.cell_labels]
    if m.signals is not None:
        out["signals"] = {w: list(m.signals[w]) for w in m.states if w in m.signals}
    return out


def loads_model(text: str, name: str = "") -> Structure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from None
    return model_from_dict(data, name=name)


def load_model(path) -> Structure:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads_model(text, name=path.stem)


def dumps_model(m: Structure) -> str:
    return json.dumps(model_to_dict(m), indent=2) + "\n"


def dump_model(m: Structure, path) -> None:
    Path(path).write_text(dumps_model(m))


# ---------------------------------------------------------------- reports


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    """An ordered list of named checks; ``ok`` iff every check passed."""

    title: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", witness: Optional[dict] = None) -> Check:
        c = Check(name, passed, detail, witness)
        self.checks.append(c)
        return c

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}

    def __str__(self) -> str:
        lines = [f"{self.title}: {'pass' if self.ok else 'fail'}"]
        for c in self.checks:
            line = f"  {c.name}: {'pass' if c.passed else 'FAIL'}"
            if c.detail:
                line += f" ({c.detail})"
            if c.witness and not c.passed:
                line += f" witness={json.dumps(c.witness)}"
            lines.append(line)
        return "\n".join(lines)


# ---------------------------------------------------------------- validation


def validate(m: Structure) -> Report:
    """Check the standing assumptions A1-A4 plus well-formedness of optional data."""
    rep = Report("validate")
    bad = None
    for i in m.player_ids:
        for k, mu in enumerate(m.posteriors[i - 1]):
            total = sum(mu.values(), Fraction(0))
            neg = [w for w, q in mu.items() if q < 0]
            if neg or total != 1:
                bad = {"player": i, "cell": list(m.partitions[i - 1][k]), "mass": str(total)}
                break
        if bad:
            break
    rep.add("measure", bad is None,
            "every cell posterior is a probability measure" if bad is None
            else "posterior not a probability measure", bad)

    bad = None
    for i in m.player_ids:
        for k, mu in enumerate(m.posteriors[i - 1]):
            cell = set(m.partitions[i - 1][k])
            outside = [w for w in m.states if w in mu and mu[w] != 0 and w not in cell]
            if outside:
                bad = {"player": i, "cell": list(m.partitions[i - 1][k]), "state": outside[0]}
                break
        if bad:
            break
    rep.add("A1", bad is None,
            "posterior support lies inside the player's own cell" if bad is None
            else "posterior puts mass outside its cell", bad)
    rep.add("A2", True, "satisfied by construction: posteriors are stored per cell")
    rep.add("A3", True, "satisfied by construction: every algebra is the powerset of its cell")
    rep.add("A4", True, "satisfied by construction: every algebra is the powerset of its cell")

    if m.priors is not None:
        bad = None
        for i, nu in enumerate(m.priors, 1):
            total = sum(nu.values(), Fraction(0))
            if total != 1 or any(q < 0 for q in nu.values()):
                bad = {"player": i, "mass": str(total)}
                break
        rep.add("priors", bad is None,
                "priors are probability measures" if bad is None else "prior not a probability measure", bad)
    if m.cell_labels is not None:
        bad = None
        for i, labels in enumerate(m.cell_labels, 1):
            for k, f in enumerate(labels):
                if not is_propositional(f):
                    bad = {"player": i, "cell": list(m.partitions[i - 1][k]), "label": to_text(f)}
                    break
            if bad:
                break
        rep.add("cell_labels", bad is None,
                "cell labels are propositional" if bad is None else "cell label is not propositional", bad)
    if m.signals is not None:
        from .semantics import prop_extension  # local: semantics imports this module

        bad = None
        for w in m.states:
            for i in m.player_ids:
                sig = m.signals[w][i - 1]
                if sig is None:
                    continue
                ext = prop_extension(m, f"recv_{i}_{sig}", i)
                if ext != m.cell_masks[i - 1][m.cell_id(i, w)]:
                    bad = {"player": i, "state": w, "signal": sig}
                    break
            if bad:
                break
        rep.add("signals", bad is None,
                "each received signal describes the receiver's cell" if bad is None
                else "cell differs from the receiver's reading of recv_i_sigma", bad)
    return rep


def validate_ai(m: Structure, mode) -> Report:
    """Check A5 and, depending on ``mode``, A6 (OutAi) or A6' (InAi).

    OutAi reports A6' too, since A6 implies it.
    """
    from .semantics import Mode, label_extension

    mode = Mode.coerce(mode)
    if mode not in (Mode.OUT_AI, Mode.IN_AI):
        raise ValueError(f"validate_ai needs an ai mode, got {mode.value}")
    if m.cell_labels is None:
        raise MissingDataError("validate_ai: structure has no cell_labels")
    rep = Report(f"validate_ai[{mode.value}]")

    bad = None
    for i in m.player_ids:
        for k, cell in enumerate(m.cell_masks[i - 1]):
            if label_extension(m, i, k, i) != cell:
                bad = {"i": i, "cell": list(m.partitions[i - 1][k]),
                       "label": to_text(m.cell_labels[i - 1][k])}
                break
        if bad:
            break
    rep.add("A5", bad is None,
            "each cell is its owner's reading of its label" if bad is None
            else "cell differs from its owner's reading of its label", bad)

    def partition_check(pairs):
        for i, j in pairs:
            exts = [label_extension(m, i, m.cell_index[i - 1][s], j) for s in range(len(m.states))]
            for s, w in enumerate(m.states):
                e = exts[s]
                if not e >> s & 1:
                    return {"i": i, "j": j, "state": w, "reason": f"{w} not in [[label]]_{j}"}
                for t in range(len(m.states)):
                    other = exts[t]
                    if other != e and other & e:
                        return {"i": i, "j": j, "state": w,
                                "reason": f"[[label]]_{j} at {w} overlaps the one at {m.states[t]}"}
        return None

    bad = partition_check((i, i) for i in m.player_ids)
    rep.add("A6'", bad is None,
            "each player's reading of her own labels is a partition" if bad is None
            else "own-label readings do not form a partition", bad)
    if mode is Mode.OUT_AI:
        bad = partition_check((i, j) for i in m.player_ids for j in m.player_ids)
        rep.add("A6", bad is None,
                "every player's reading of every player's labels is a partition" if bad is None
                else "some reading of labels is not a partition containing the state", bad)
    return rep


# ---------------------------------------------------------------- reachability


def reachable_mask(m: Structure, group: Iterable[int], s: int) -> int:
    group = tuple(group)
    if not group:
        raise ValueError("reachable: group must be nonempty")
    seen = 1 << s
    queue = deque([s])
    while queue:
        t = queue.popleft()
        for i in group:
            cell = m.cell_masks[i - 1][m.cell_index[i - 1][t]]
            new = cell & ~seen
            if new:
                seen |= new
                queue.extend(u for u in range(len(m.states)) if new >> u & 1)
    return seen


def reachable(m: Structure, group: Iterable[int], w: str) -> frozenset:
    """States reachable from ``w`` through cells of the players in ``group``."""
    return m.event(reachable_mask(m, group, m.index[w]))


# ---------------------------------------------------------------- priors


def _mass(vec: Sequence[Fraction], mask: int) -> Fraction:
    total = Fraction(0)
    for s, q in enumerate(vec):
        if mask >> s & 1:
            total += q
    return total


def conditional(vec: Sequence[Fraction], event: int, given: int) -> Optional[Fraction]:
    """``nu(event | given)`` for a prior vector, or None when ``nu(given) == 0``."""
    den = _mass(vec, given)
    if den == 0:
        return None
    return _mass(vec, event & given) / den


def generate_priors(m: Structure) -> tuple:
    """Per-player priors that generate the stored posteriors.

    Each of player ``i``'s ``N_i`` cells gets prior mass ``1/N_i``, spread
    according to the cell's posterior.
    """
    out = []
    for i in m.player_ids:
        cells = m.posteriors[i - 1]
        weight = Fraction(1, len(cells))
        nu = {w: Fraction(0) for w in m.states}
        for mu in cells:
            for w, q in mu.items():
                nu[w] += weight * q
        out.append(nu)
    return tuple(out)


def _prior_vector(m: Structure, nu: Mapping[str, Fraction]) -> tuple:
    return tuple(nu.get(w, Fraction(0)) for w in m.states)


def check_prior_generated(m: Structure, priors: Sequence[Mapping[str, Fraction]]) -> Report:
    """Does conditioning each prior on each cell reproduce the stored posterior?

    Cells with zero prior mass are reported as unconstrained rather than failed.
    """
    rep = Report("prior_generated")
    if len(priors) != m.players:
        raise ValueError("one prior per player expected")
    unconstrained = []
    bad = None
    for i in m.player_ids:
        vec = _prior_vector(m, priors[i - 1])
        for k, cell in enumerate(m.cell_masks[i - 1]):
            den = _mass(vec, cell)
            names = list(m.partitions[i - 1][k])
            if den == 0:
                unconstrained.append({"player": i, "cell": names})
                continue
            mu = m.posteriors[i - 1][k]
            for s, w in enumerate(m.states):
                if cell >> s & 1:
                    cond = vec[s] / den
                    if cond != mu.get(w, Fraction(0)):
                        if bad is None:
                            bad = {"player": i, "cell": names, "state": w,
                                   "conditional": str(cond), "posterior": str(mu.get(w, Fraction(0)))}
    rep.add("conditioning", bad is None,
            "conditioning reproduces every constrained posterior" if bad is None
            else "conditioned prior differs from stored posterior", bad)
    rep.add("unconstrained", True, f"{len(unconstrained)} zero-mass cell(s)",
            {"cells": unconstrained} if unconstrained else None)
    rep.unconstrained = unconstrained  # type: ignore[attr-defined]
    return rep


def check_cpa(m: Structure) -> Report:
    """Common-prior assumption for the structure's own priors."""
    if m.priors is None:
        raise MissingDataError("check_cpa: structure has no priors")
    rep = Report("cpa")
    vecs = m.prior_vectors
    diff = next((i for i in range(1, m.players) if vecs[i] != vecs[0]), None)
    if diff is None:
        rep.add("common", True, "all players share one prior")
    else:
        s = next(s for s in range(len(m.states)) if vecs[diff][s] != vecs[0][s])
        rep.add("common", False, "priors differ",
                {"players": [1, diff + 1], "state": m.states[s],
                 "values": [str(vecs[0][s]), str(vecs[diff][s])]})
    gen = check_prior_generated(m, m.priors)
    c = gen.get("conditioning")
    rep.add("prior_generated", c.passed, c.detail, c.witness)
    bad = None
    for s, w in enumerate(m.states):
        for i in m.player_ids:
            if _mass(vecs[i - 1], reachable_mask(m, m.player_ids, s)) == 0:
                bad = {"player": i, "state": w}
                break
        if bad:
            break
    rep.add("reachable_mass", bad is None,
            "every reachable component has positive prior mass" if bad is None
            else "nu(R_N(w))=0", bad)
    return rep
