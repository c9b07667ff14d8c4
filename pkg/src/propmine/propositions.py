"""Categorical propositions over triplet datasets.

Two forms are supported:

* quantified, ``Q S are P`` with ``Q`` one of All, Some, No;
* thresholded, ``x S are y P`` where ``x`` bounds the fraction of the
  subject's triplets inside the predicate block and ``y`` bounds the block
  density.

``S`` is a subset of one dimension (the subject dimension).  ``P`` is a
boolean tree over membership atoms on the two other dimensions.

Text grammar
------------
::

    proposition := quantifier set "are" expr
                 | fraction set "are" fraction expr
    quantifier  := "All" | "Some" | "No"
    fraction    := decimal | integer "/" integer | number "%"
    expr        := xor_expr { "or" xor_expr }
    xor_expr    := and_expr { "xor" and_expr }
    and_expr    := unary { "and" unary }
    unary       := "not" unary | "(" expr ")" | set
    set         := ("A" | "B" | "C") "{" [ element { "," element } ] "}" [ "^c" ]
    element     := bare-token | json-string

Sets print their elements sorted by index.  A compound operand inside a
compound node is always parenthesised, so formatting then parsing returns an
identical tree.  ``^c`` on the subject is expanded against the dataset
universe when parsing.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .dataset import (
    DensityOptions,
    Dim,
    Selection,
    TripletDataset,
    coverage_x,
    density_y,
)
from .errors import MalformedPredicate, PropositionSyntaxError, UnsupportedThresholdForm

__all__ = [
    "Quantifier",
    "Atom",
    "And",
    "Or",
    "Xor",
    "Not",
    "PredicateExpr",
    "Quantified",
    "Thresholded",
    "Proposition",
    "EvalReport",
    "as_fraction",
    "block",
    "satisfies_predicate",
    "predicate_dims",
    "evaluate_quantified",
    "evaluate_thresholded",
    "evaluate",
    "format_proposition",
    "parse_proposition",
]


class Quantifier(enum.Enum):
    ALL = "All"
    SOME = "Some"
    NO = "No"


def as_fraction(value) -> Fraction:
    """Exact rational for a threshold; floats go through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str) and value.endswith("%"):
        return Fraction(value[:-1].strip()) / 100
    return Fraction(value)


@dataclass(frozen=True)
class Atom:
    """``coordinate in elements`` (or its complement when ``negated``)."""

    dim: Dim
    elements: frozenset
    negated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dim", Dim.parse(self.dim))
        object.__setattr__(self, "elements", frozenset(int(e) for e in self.elements))


@dataclass(frozen=True)
class And:
    children: tuple

    def __init__(self, *children):
        if len(children) < 2:
            raise MalformedPredicate("boolean nodes need at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Or:
    children: tuple

    def __init__(self, *children):
        if len(children) < 2:
            raise MalformedPredicate("boolean nodes need at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Xor:
    """True when an odd number of children hold."""

    children: tuple

    def __init__(self, *children):
        if len(children) < 2:
            raise MalformedPredicate("boolean nodes need at least two operands")
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Not:
    child: "PredicateExpr"


PredicateExpr = Union[Atom, And, Or, Xor, Not]


def block(subject_dim, first, second) -> And:
    """Positive block predicate on the two non-subject dimensions, in axis order."""
    p, q = Dim.parse(subject_dim).others()
    return And(Atom(p, first), Atom(q, second))


@dataclass(frozen=True)
class Quantified:
    quantifier: Quantifier


@dataclass(frozen=True)
class Thresholded:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        x, y = as_fraction(self.x), as_fraction(self.y)
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise ValueError("thresholds must lie in [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class Proposition:
    subject_dim: Dim
    subject: frozenset
    predicate: PredicateExpr
    form: Union[Quantified, Thresholded]

    def __post_init__(self):
        object.__setattr__(self, "subject_dim", Dim.parse(self.subject_dim))
        object.__setattr__(self, "subject", frozenset(int(e) for e in self.subject))
        if isinstance(self.form, Quantifier):
            object.__setattr__(self, "form", Quantified(self.form))
        if not self.subject and (
            isinstance(self.form, Thresholded) or self.form.quantifier is Quantifier.SOME
        ):
            raise ValueError("Some and thresholded propositions need a non-empty subject")
        for dim in predicate_dims(self.predicate):
            if dim == self.subject_dim:
                raise MalformedPredicate(
                    f"predicate constrains the subject dimension {dim.letter}"
                )


@dataclass(frozen=True)
class EvalReport:
    x_actual: Fraction
    y_actual: Fraction
    holds: bool


def predicate_dims(expr: PredicateExpr) -> set:
    if isinstance(expr, Atom):
        return {expr.dim}
    if isinstance(expr, Not):
        return predicate_dims(expr.child)
    out = set()
    for child in expr.children:
        out |= predicate_dims(child)
    return out


def satisfies_predicate(triplet, predicate: PredicateExpr, subject_dim=None) -> bool:
    """Evaluate ``predicate`` on one triplet.

    When ``subject_dim`` is given, atoms on that dimension are rejected.
    """
    if subject_dim is not None:
        subject_dim = Dim.parse(subject_dim)
        if subject_dim in predicate_dims(predicate):
            raise MalformedPredicate(
                f"predicate constrains the subject dimension {subject_dim.letter}"
            )
    return _holds(triplet, predicate)


def _holds(t, expr) -> bool:
    if isinstance(expr, Atom):
        return (t[expr.dim] in expr.elements) != expr.negated
    if isinstance(expr, And):
        return all(_holds(t, c) for c in expr.children)
    if isinstance(expr, Or):
        return any(_holds(t, c) for c in expr.children)
    if isinstance(expr, Xor):
        return sum(_holds(t, c) for c in expr.children) % 2 == 1
    if isinstance(expr, Not):
        return not _holds(t, expr.child)
    raise MalformedPredicate(f"unknown predicate node {expr!r}")


def _subject_triplets(d: TripletDataset, p: Proposition):
    slices = d.slices[p.subject_dim]
    for e in sorted(p.subject):
        yield from slices.get(e, ())


def evaluate_quantified(d: TripletDataset, p: Proposition) -> bool:
    """Truth value of ``Q S are P``; All and No are vacuously true on an empty slice."""
    if not isinstance(p.form, Quantified):
        raise TypeError("expected a quantified proposition")
    q = p.form.quantifier
    hits = (_holds(t, p.predicate) for t in _subject_triplets(d, p))
    if q is Quantifier.ALL:
        return all(hits)
    if q is Quantifier.SOME:
        return any(hits)
    return not any(hits)


def _block_selection(d: TripletDataset, p: Proposition) -> Selection:
    """Selection named by a positive block predicate; missing dims span the universe."""
    expr = p.predicate
    atoms = expr.children if isinstance(expr, And) else (expr,)
    parts = {}
    for atom in atoms:
        if not isinstance(atom, Atom) or atom.negated or atom.dim in parts:
            raise UnsupportedThresholdForm(
                "thresholded propositions need a positive block predicate"
            )
        parts[atom.dim] = atom.elements
    sel = Selection.full(d).replace(p.subject_dim, p.subject)
    for dim, elements in parts.items():
        sel = sel.replace(dim, elements)
    return sel


def evaluate_thresholded(
    d: TripletDataset, p: Proposition, opts: DensityOptions = DensityOptions()
) -> EvalReport:
    if not isinstance(p.form, Thresholded):
        raise TypeError("expected a thresholded proposition")
    sel = _block_selection(d, p)
    x = coverage_x(d, sel, p.subject_dim)
    y = density_y(d, sel, opts)
    return EvalReport(x, y, x >= p.form.x and y >= p.form.y)


def evaluate(d: TripletDataset, p: Proposition, opts: DensityOptions = DensityOptions()):
    """Dispatch on the proposition form; returns a bool or an :class:`EvalReport`."""
    if isinstance(p.form, Quantified):
        return evaluate_quantified(d, p)
    return evaluate_thresholded(d, p, opts)


# -- text form -----------------------------------------------------------------

_BARE = re.compile(r"[^\s,{}()\"^%]+")


def _format_fraction(f: Fraction) -> str:
    den = f.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{f.numerator}/{f.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(f.numerator)
    scaled = f * 10**digits
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


def _format_element(d, dim, e) -> str:
    if d is None:
        return str(e)
    text = str(d.labels[dim][e])
    if _BARE.fullmatch(text) and text.lower() not in _KEYWORDS:
        return text
    return json.dumps(text)


def _format_set(d, dim, elements, negated=False) -> str:
    body = ",".join(_format_element(d, dim, e) for e in sorted(elements))
    return f"{dim.name}{{{body}}}" + ("^c" if negated else "")


def _format_expr(d, expr, nested=False) -> str:
    if isinstance(expr, Atom):
        return _format_set(d, expr.dim, expr.elements, expr.negated)
    if isinstance(expr, Not):
        return "not " + _format_expr(d, expr.child, nested=True)
    word = {And: "and", Or: "or", Xor: "xor"}[type(expr)]
    text = f" {word} ".join(_format_expr(d, c, nested=True) for c in expr.children)
    return f"({text})" if nested else text


def format_proposition(p: Proposition, d: TripletDataset | None = None) -> str:
    """Canonical text of ``p``; elements print as labels when ``d`` is given."""
    subject = _format_set(d, p.subject_dim, p.subject)
    predicate = _format_expr(d, p.predicate)
    if isinstance(p.form, Quantified):
        return f"{p.form.quantifier.value} {subject} are {predicate}"
    return f"{_format_fraction(p.form.x)} {subject} are {_format_fraction(p.form.y)} {predicate}"


_KEYWORDS = {"and", "or", "xor", "not", "are"}
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<setopen>[ABCabc]\{)
  | (?P<punct>[{}(),])
  | (?P<comp>\^c)
  | (?P<word>[^\s,{}()"^]+)
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text, d):
        self.text = text
        self.d = d
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise PropositionSyntaxError("unexpected character", text, pos)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1].lower() != value):
            want = value or kind
            raise PropositionSyntaxError(f"expected {want!r}, found {tok[1]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def error(self, message):
        raise PropositionSyntaxError(message, self.text, self.peek()[2])

    def element(self, dim):
        kind, value, pos = self.peek()
        if kind == "string":
            label = json.loads(value)
        elif kind == "word":
            label = value
        else:
            self.error("expected an element")
        self.i += 1
        if self.d is None:
            try:
                return int(label)
            except ValueError:
                raise PropositionSyntaxError(
                    "labels need a dataset to resolve", self.text, pos
                ) from None
        try:
            return self.d.index_of(dim, label)
        except KeyError:
            raise PropositionSyntaxError(
                f"unknown element {label!r} in dimension {dim.letter}", self.text, pos
            ) from None

    def set_literal(self):
        _, value, _ = self.take("setopen")
        dim = Dim.parse(value[0])
        elements = set()
        if self.peek()[1] != "}":
            elements.add(self.element(dim))
            while self.peek()[1] == ",":
                self.take()
                elements.add(self.element(dim))
        self.take("punct", "}")
        negated = False
        if self.peek()[0] == "comp":
            self.take()
            negated = True
        return dim, frozenset(elements), negated

    def fraction(self):
        kind, value, pos = self.peek()
        if kind != "word":
            self.error("expected a fraction")
        self.i += 1
        try:
            return as_fraction(value)
        except (ValueError, ZeroDivisionError):
            raise PropositionSyntaxError(f"bad fraction {value!r}", self.text, pos) from None

    def expr(self):
        return self._chain(Or, "or", lambda: self._chain(Xor, "xor", lambda: self._chain(And, "and", self.unary)))

    def _chain(self, node, word, operand):
        items = [operand()]
        while self.peek()[0] == "word" and self.peek()[1].lower() == word:
            self.take()
            items.append(operand())
        return items[0] if len(items) == 1 else node(*items)

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "word" and value.lower() == "not":
            self.take()
            return Not(self.unary())
        if value == "(":
            self.take()
            inner = self.expr()
            self.take("punct", ")")
            return inner
        if kind == "setopen":
            dim, elements, negated = self.set_literal()
            return Atom(dim, elements, negated)
        self.error("expected a set, 'not' or '('")

    def proposition(self):
        kind, value, pos = self.peek()
        form = None
        if kind == "word" and value.capitalize() in {q.value for q in Quantifier}:
            self.take()
            form = Quantified(Quantifier(value.capitalize()))
        else:
            x = self.fraction()
        dim, subject, negated = self.set_literal()
        if negated:
            if self.d is None:
                raise PropositionSyntaxError("subject complement needs a dataset", self.text, pos)
            subject = self.d.universes[dim] - subject
        self.take("word", "are")
        if form is None:
            form = Thresholded(x, self.fraction())
        predicate = self.expr()
        if self.peek()[0] != "eof":
            self.error("trailing input")
        try:
            return Proposition(dim, subject, predicate, form)
        except (MalformedPredicate, ValueError) as exc:
            raise PropositionSyntaxError(str(exc), self.text, 0) from None


def parse_proposition(text: str, d: TripletDataset | None = None) -> Proposition:
    """Inverse of :func:`format_proposition`.

    Without a dataset, elements must be integer indices.
    """
    return _Parser(text, d).proposition()
