"""Formulas of the multi-agent probability logic: AST, parser, printer, normalizer.

Concrete syntax::

    phi  ::= "true" | ident | "!" phi | phi "&" phi | phi "|" phi
           | phi "->" phi | phi "<->" phi | "(" phi ")"
           | probsum cmp rat
           | "B_" int "(" phi ")" | "K_" int "(" phi ")"
           | "EB^" int "_{" intlist "}" "(" phi ")"
           | "CB_{" intlist "}" "(" phi ")"
    probsum ::= term ("+" term)*
    term    ::= [rat "*"] "Pr_" int "(" phi ")"
    cmp     ::= ">=" | "<=" | ">" | "<" | "="
    rat     ::= ["-"] int ["/" int]

Binary precedence, tightest first: ``&``, ``|``, ``->``, ``<->``.
``->`` associates to the right, the others to the left.
"""
from __future__ import annotations

import re
import weakref
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from operator import attrgetter
from typing import Iterable, NamedTuple, Optional, Union

__all__ = [
    "Formula", "Prim", "Top", "Not", "And", "Or", "Implies", "Iff",
    "ProbGE", "ProbCmp", "B", "EB", "CB", "K", "Term", "TRUE",
    "ParseError", "parse", "to_text", "normalize", "is_propositional",
    "is_core", "propositions", "players_mentioned", "conj", "disj",
    "PROP_NAME", "intern", "subformulas",
]

PROP_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
CMP_OPS = (">=", "<=", ">", "<", "=")


def _node(cls):
    """Frozen dataclass with a hash that is computed once per instance.

    Normalized formulas share subtrees heavily and are used as memo keys, so
    recomputing a deep structural hash on every lookup is the dominant cost.
    """
    cls = dataclass(frozen=True)(cls)
    field_names = tuple(cls.__dataclass_fields__)

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in field_names))
            object.__setattr__(self, "_hash", h)
            return h

    fields_of = attrgetter(*field_names) if field_names else (lambda _: ())

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return fields_of(self) == fields_of(other)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@_node
class Prim(Formula):
    name: str


@_node
class Top(Formula):
    pass


@_node
class Not(Formula):
    arg: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


class Term(NamedTuple):
    coeff: Fraction
    player: int
    arg: Formula


@_node
class ProbGE(Formula):
    """``sum(coeff * Pr_player(arg)) >= bound``."""

    terms: tuple
    bound: Fraction


@_node
class ProbCmp(Formula):
    """Comparison sugar over a probability sum; ``op`` is one of ``<= < > =``."""

    op: str
    terms: tuple
    bound: Fraction


@_node
class B(Formula):
    player: int
    arg: Formula


@_node
class K(Formula):
    player: int
    arg: Formula


@_node
class EB(Formula):
    m: int
    group: tuple
    arg: Formula


@_node
class CB(Formula):
    group: tuple
    arg: Formula


TRUE = Top()

_BINARY = (And, Or, Implies, Iff)
_PROB = (ProbGE, ProbCmp)
_CORE = (Prim, Top, Not, And, ProbGE, CB, K)
_PROPOSITIONAL = (Prim, Top, Not, And, Or, Implies, Iff)


def _group(players: Iterable[int]) -> tuple:
    g = tuple(sorted(set(players)))
    if not g:
        raise ValueError("player group must be nonempty")
    return g


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; the empty conjunction is ``true``."""
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return Not(TRUE) if out is None else out


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int, expected: Iterable[str] = ()):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {self.line}, column {self.column}"
        if self.expected:
            detail += f"; expected one of: {', '.join(self.expected)}"
        super().__init__(detail)


class _Tok(NamedTuple):
    kind: str
    value: Union[str, int, None]
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op><->|->|>=|<=|[!&|()<>=+\-*/{},^])
    """,
    re.VERBOSE,
)
_PLAYER_IDENT = re.compile(r"(B|K|Pr)_(\d+)\Z")
_EB_TAIL = re.compile(r"\^(\d+)_\{")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "ws":
            pass
        elif kind == "num":
            toks.append(_Tok("num", int(val), pos))
        elif kind == "ident":
            pm = _PLAYER_IDENT.match(val)
            if val == "true":
                toks.append(_Tok("true", None, pos))
            elif pm:
                toks.append(_Tok(pm.group(1), int(pm.group(2)), pos))
            elif val == "CB_" and text.startswith("{", m.end()):
                toks.append(_Tok("CB", None, pos))
                pos = m.end() + 1
                continue
            elif val == "EB":
                tail = _EB_TAIL.match(text, m.end())
                if tail is None:
                    raise ParseError("malformed EB operator", text, m.end(), ["^m_{"])
                toks.append(_Tok("EB", int(tail.group(1)), pos))
                pos = tail.end()
                continue
            else:
                toks.append(_Tok("ident", val, pos))
        else:
            toks.append(_Tok(val, None, pos))
        pos = m.end()
    toks.append(_Tok("eof", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str, expected: Iterable[str] = ()):
        raise ParseError(msg, self.text, self.tok.pos, expected)

    def take(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            self.fail(f"unexpected {self._describe(t)}", [kind])
        self.i += 1
        return t

    @staticmethod
    def _describe(t: _Tok) -> str:
        if t.kind == "eof":
            return "end of input"
        if t.kind in ("ident", "num"):
            return f"{t.kind} {t.value!r}"
        return f"token {t.kind!r}"

    def parse(self) -> Formula:
        f = self.iff()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self._describe(self.tok)}", ["&", "|", "->", "<->", "end of input"])
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.tok.kind == "<->":
            self.i += 1
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.tok.kind == "->":
            self.i += 1
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.tok.kind == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.tok.kind == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.tok.kind == "!":
            self.i += 1
            return Not(self.unary())
        return self.primary()

    def paren_arg(self) -> Formula:
        self.take("(")
        f = self.iff()
        self.take(")")
        return f

    def player(self, t: _Tok) -> int:
        if t.value < 1:
            raise ParseError("player index must be >= 1", self.text, t.pos)
        return t.value

    def intlist(self) -> tuple:
        players = [self.player(self.take("num"))]
        while self.tok.kind == ",":
            self.i += 1
            players.append(self.player(self.take("num")))
        self.take("}")
        return _group(players)

    def primary(self) -> Formula:
        t = self.tok
        k = t.kind
        if k == "true":
            self.i += 1
            return TRUE
        if k == "ident":
            self.i += 1
            return Prim(t.value)
        if k == "(":
            return self.paren_arg()
        if k in ("B", "K"):
            self.i += 1
            node = B if k == "B" else K
            return node(self.player(t), self.paren_arg())
        if k == "CB":
            self.i += 1
            group = self.intlist()
            return CB(group, self.paren_arg())
        if k == "EB":
            self.i += 1
            if t.value < 1:
                raise ParseError("EB exponent must be >= 1", self.text, t.pos)
            group = self.intlist()
            return EB(t.value, group, self.paren_arg())
        if k in ("num", "-", "Pr"):
            return self.probability_formula()
        self.fail(
            f"unexpected {self._describe(t)}",
            ["true", "identifier", "!", "(", "B_i", "K_i", "CB_{", "EB^m_{", "Pr_i", "rational"],
        )

    def rational(self) -> Fraction:
        neg = False
        if self.tok.kind == "-":
            neg = True
            self.i += 1
        num = self.take("num").value
        den = 1
        if self.tok.kind == "/":
            self.i += 1
            dt = self.take("num")
            if dt.value == 0:
                raise ParseError("zero denominator in rational literal", self.text, dt.pos)
            den = dt.value
        q = Fraction(num, den)
        return -q if neg else q

    def term(self) -> Term:
        coeff = Fraction(1)
        if self.tok.kind != "Pr":
            coeff = self.rational()
            self.take("*")
        t = self.take("Pr")
        return Term(coeff, self.player(t), self.paren_arg())

    def probability_formula(self) -> Formula:
        terms = [self.term()]
        while self.tok.kind == "+":
            self.i += 1
            terms.append(self.term())
        op = self.tok.kind
        if op not in CMP_OPS:
            self.fail(f"unknown comparison operator {self._describe(self.tok)}", CMP_OPS + ("+",))
        self.i += 1
        bound = self.rational()
        if op == ">=":
            return ProbGE(tuple(terms), bound)
        return ProbCmp(op, tuple(terms), bound)


def parse(text: str) -> Formula:
    """Parse formula text into an AST; raises :class:`ParseError`."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing


def _wrap(f: Formula) -> str:
    s = to_text(f)
    return f"({s})" if isinstance(f, _BINARY + _PROB) else s


def _group_text(g: tuple) -> str:
    return ",".join(str(i) for i in g)


def _sum_text(terms: tuple) -> str:
    return " + ".join(f"{t.coeff}*Pr_{t.player}({to_text(t.arg)})" for t in terms)


def to_text(f: Formula) -> str:
    """Canonical text of a formula; ``parse(to_text(f)) == f``."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Prim):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.arg)
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left)} <-> {_wrap(f.right)}"
    if isinstance(f, ProbGE):
        return f"{_sum_text(f.terms)} >= {f.bound}"
    if isinstance(f, ProbCmp):
        return f"{_sum_text(f.terms)} {f.op} {f.bound}"
    if isinstance(f, B):
        return f"B_{f.player}({to_text(f.arg)})"
    if isinstance(f, K):
        return f"K_{f.player}({to_text(f.arg)})"
    if isinstance(f, CB):
        return f"CB_{{{_group_text(f.group)}}}({to_text(f.arg)})"
    if isinstance(f, EB):
        return f"EB^{f.m}_{{{_group_text(f.group)}}}({to_text(f.arg)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- normalizing


def _neg_terms(terms: tuple) -> tuple:
    return tuple(Term(-t.coeff, t.player, t.arg) for t in terms)


def _belief(player: int, arg: Formula) -> Formula:
    # Pr_i(arg) = 1 as a pair of >= atoms
    return And(
        ProbGE((Term(Fraction(1), player, arg),), Fraction(1)),
        ProbGE((Term(Fraction(-1), player, arg),), Fraction(-1)),
    )


_INTERN: "weakref.WeakValueDictionary[Formula, Formula]" = weakref.WeakValueDictionary()


def intern(f: Formula) -> Formula:
    """The canonical instance of ``f``.

    Equal formulas passed through here become the same object, so memo tables
    keyed by formulas hit on identity instead of comparing trees.
    """
    got = _INTERN.get(f)
    if got is not None:
        return got
    changes = {}
    for name in f.__dataclass_fields__:
        val = getattr(f, name)
        if isinstance(val, Formula):
            changes[name] = intern(val)
        elif name == "terms":
            changes[name] = tuple(Term(t.coeff, t.player, intern(t.arg)) for t in val)
    if changes:
        f = replace(f, **changes)
    return _INTERN.setdefault(f, f)


@lru_cache(maxsize=1 << 16)
def normalize(f: Formula) -> Formula:
    """Rewrite sugar into the core nodes Prim, Top, Not, And, ProbGE, CB, K."""
    return intern(_normalize(f))


def _normalize(f: Formula) -> Formula:
    if isinstance(f, (Prim, Top)):
        return f
    if isinstance(f, Not):
        return Not(normalize(f.arg))
    if isinstance(f, And):
        return And(normalize(f.left), normalize(f.right))
    if isinstance(f, Or):
        return Not(And(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Implies):
        return Not(And(normalize(f.left), Not(normalize(f.right))))
    if isinstance(f, Iff):
        a, b = normalize(f.left), normalize(f.right)
        return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
    if isinstance(f, (ProbGE, ProbCmp)):
        terms = tuple(Term(t.coeff, t.player, normalize(t.arg)) for t in f.terms)
        if isinstance(f, ProbGE) or f.op == ">=":
            return ProbGE(terms, f.bound)
        ge = ProbGE(terms, f.bound)
        le = ProbGE(_neg_terms(terms), -f.bound)
        return {"<=": le, "<": Not(ge), ">": Not(le), "=": And(ge, le)}[f.op]
    if isinstance(f, B):
        return _belief(f.player, normalize(f.arg))
    if isinstance(f, EB):
        x = normalize(f.arg)
        for _ in range(f.m):
            x = conj(_belief(j, x) for j in f.group)
        return x
    if isinstance(f, CB):
        return CB(f.group, normalize(f.arg))
    if isinstance(f, K):
        return K(f.player, normalize(f.arg))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- queries


def _children(f: Formula):
    if isinstance(f, (Not, B, K, CB, EB)):
        yield f.arg
    elif isinstance(f, _BINARY):
        yield f.left
        yield f.right
    elif isinstance(f, _PROB):
        for t in f.terms:
            yield t.arg


def _walk(f: Formula):
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(_children(g))


def subformulas(f: Formula):
    """Every distinct subformula of ``f``, ``f`` itself included."""
    return _walk(f)


def is_propositional(f: Formula) -> bool:
    """True iff ``f`` uses only Prim/true/!/&/|/->/<->."""
    return all(isinstance(g, _PROPOSITIONAL) for g in _walk(f))


def is_core(f: Formula) -> bool:
    """True iff ``f`` contains no sugar nodes (the output shape of :func:`normalize`)."""
    return all(isinstance(g, _CORE) for g in _walk(f))


def propositions(f: Formula) -> frozenset:
    return frozenset(g.name for g in _walk(f) if isinstance(g, Prim))


def players_mentioned(f: Formula) -> frozenset:
    out = set()
    for g in _walk(f):
        if isinstance(g, (B, K)):
            out.add(g.player)
        elif isinstance(g, (CB, EB)):
            out.update(g.group)
        elif isinstance(g, _PROB):
            out.update(t.player for t in g.terms)
    return frozenset(out)
