"""Graph concepts restated as categorical propositions.

Each verifier builds the propositions that define a concept, evaluates them
with :mod:`propmine.propositions` and returns a :class:`Verdict` listing
every proposition it checked.  Two forms exist for each concept:

* graph form, on a :class:`PairDataset` (``A = B = V`` and a single-element
  ``C``), where the selection is a vertex set;
* triplet form, on a :class:`~propmine.dataset.TripletDataset` with a full
  ``(alpha, beta, gamma)`` selection.

Connectivity of a triplet dataset is taken over the incidence structure that
links every triplet to its three elements: two triplets are connected when a
chain of triplets sharing elements joins them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dataset import (
    DensityOptions,
    Dim,
    Selection,
    TripletDataset,
    induced_subdataset,
)
from .errors import InvalidCut, InvalidPartition, InvalidSelection
from .propositions import (
    And,
    Atom,
    EvalReport,
    Or,
    Proposition,
    Quantifier,
    Thresholded,
    block,
    evaluate_quantified,
    evaluate_thresholded,
)

__all__ = [
    "PairDataset",
    "Partitioning",
    "Check",
    "Verdict",
    "is_disconnected",
    "find_disconnection",
    "is_vertex_cover",
    "is_dominating_set",
    "is_separating_set",
    "is_k_coloring",
    "is_clique",
    "is_cluster",
]

A, B, C = Dim.A, Dim.B, Dim.C


@dataclass(frozen=True)
class PairDataset:
    """A graph stored as triplets ``(u, v, *)`` with a single-element ``C``.

    Undirected graphs are stored with both ordered pairs (``symmetric``).
    ``loopless`` graphs have no ``(v, v)`` pair and measure clique density
    over ordered pairs of distinct vertices.
    """

    data: TripletDataset
    symmetric: bool = True
    loopless: bool = True

    def __post_init__(self):
        d = self.data
        if len(d.universes[C]) != 1 or not d.shared_ab:
            raise ValueError("a pair dataset has one C element and a shared A/B universe")
        pairs = {(a, b) for a, b, _ in d.triplets}
        if self.symmetric and any((b, a) not in pairs for a, b in pairs):
            raise ValueError("symmetric pair dataset is missing reversed pairs")
        if self.loopless and any(a == b for a, b in pairs):
            raise ValueError("loopless pair dataset contains self-pairs")

    @classmethod
    def from_edges(cls, n_vertices: int, edges, symmetric: bool = True, loopless: bool | None = None,
                   labels: Sequence | None = None) -> "PairDataset":
        """Graph on vertices ``0..n-1``; ``loopless`` defaults to "no self-loop present"."""
        pairs = set()
        for u, v in edges:
            pairs.add((int(u), int(v)))
            if symmetric:
                pairs.add((int(v), int(u)))
        if loopless is None:
            loopless = all(u != v for u, v in pairs)
        vertices = tuple(labels) if labels is not None else tuple(range(n_vertices))
        d = TripletDataset.from_triplets(
            [(u, v, 0) for u, v in pairs],
            sizes=(n_vertices, n_vertices, 1),
            labels=(vertices, vertices, ("*",)),
            shared_ab=True,
        )
        return cls(d, symmetric, loopless)

    @property
    def vertices(self) -> frozenset:
        return self.data.universes[A] | self.data.universes[B]

    @property
    def edges(self) -> set:
        return {(a, b) for a, b, _ in self.data.triplets}

    @property
    def density_options(self) -> DensityOptions:
        return DensityOptions(loopless=self.loopless)

    def induced(self, vertices) -> "PairDataset":
        vertices = frozenset(vertices)
        c = self.data.universes[C]
        sub = induced_subdataset(self.data, Selection(vertices, vertices, c))
        return PairDataset(sub, self.symmetric, self.loopless)


@dataclass(frozen=True)
class Partitioning:
    """``k`` color classes per dimension (one list per dimension used)."""

    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(tuple(frozenset(p) for p in dim) for dim in parts))

    @property
    def k(self) -> int:
        return len(self.parts[0])


@dataclass
class Check:
    """One proposition and its outcome.  ``report`` is set for thresholded ones."""

    proposition: Proposition
    holds: bool
    report: EvalReport | None = None


@dataclass
class Verdict:
    holds: bool
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


def _quantified(d, subject_dim, subject, predicate, q=Quantifier.NO) -> Check:
    prop = Proposition(subject_dim, subject, predicate, q)
    return Check(prop, evaluate_quantified(d, prop))


def _thresholded(d, prop: Proposition, opts) -> Check:
    report = evaluate_thresholded(d, prop, opts)
    return Check(prop, report.holds, report)


def _verdict(checks, **details) -> Verdict:
    return Verdict(all(c.holds for c in checks), checks, details)


def _vertex_set(d: PairDataset, s) -> frozenset:
    alpha = s.alpha if isinstance(s, Selection) else frozenset(int(v) for v in s)
    extra = alpha - d.vertices
    if extra:
        raise InvalidSelection(f"vertices {sorted(extra)} are not in the graph")
    return alpha


def _proper(name, subset, universe):
    if not subset or subset == universe:
        raise InvalidCut(f"{name} must be a proper non-empty subset")


# -- disconnection -------------------------------------------------------------


def is_disconnected(d, s) -> Verdict:
    """Whether the cut ``s`` separates the data in two non-interacting parts.

    Graph form checks ``No alpha are alpha^c`` (and the reverse direction for
    directed graphs).  Triplet form checks the six ``No`` propositions that
    confine every triplet to ``alpha x beta x gamma`` or to its complement.
    """
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        _proper("alpha", alpha, d.vertices)
        rest = d.vertices - alpha
        data = d.data
        checks = [_quantified(data, A, alpha, Atom(B, alpha, negated=True))]
        if not d.symmetric:
            checks.append(_quantified(data, A, rest, Atom(B, alpha)))
        return _verdict(checks)
    s.validate(d)
    for k, name in enumerate(("alpha", "beta", "gamma")):
        _proper(name, s[k], d.universes[k])
    comp = s.complement(d)
    checks = []
    for dim in Dim:
        p, q = dim.others()
        checks.append(_quantified(
            d, dim, s[dim], Or(Atom(p, s[p], negated=True), Atom(q, s[q], negated=True))
        ))
        checks.append(_quantified(d, dim, comp[dim], Or(Atom(p, s[p]), Atom(q, s[q]))))
    return _verdict(checks)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def _graph_components(d: PairDataset) -> list[frozenset]:
    uf = _UnionFind()
    for v in sorted(d.vertices):
        uf.find(v)
    for a, b in sorted(d.edges):
        uf.union(a, b)
    comps = {}
    for v in sorted(d.vertices):
        comps.setdefault(uf.find(v), set()).add(v)
    return [frozenset(c) for _, c in sorted(comps.items())]


def find_disconnection(d):
    """A cut that passes :func:`is_disconnected`, or ``None`` if none exists.

    Graphs use connected components.  For triplets, elements are grouped by
    the components of the element/triplet incidence structure; elements that
    occur in no triplet go to the complement side.
    """
    if isinstance(d, PairDataset):
        comps = _graph_components(d)
        if len(comps) < 2:
            return None
        first = comps[0]
        return Selection(first, first, d.data.universes[C])
    uf = _UnionFind()
    for a, b, c in d.sorted_triplets:
        uf.union((A, a), (B, b))
        uf.union((A, a), (C, c))
    roots = sorted({uf.find((A, t[0])) for t in d.triplets})
    universes = d.universes
    if roots:
        root = roots[0]
        parts = [
            frozenset(e for e in universes[k] if (Dim(k), e) in uf.parent and uf.find((Dim(k), e)) == root)
            for k in range(3)
        ]
    else:
        # no triplet at all: any proper split of every universe works
        parts = [frozenset(sorted(u)[:1]) for u in universes]
    if any(not p or p == u for p, u in zip(parts, universes)):
        return None
    return Selection(*parts)


# -- covers and domination -----------------------------------------------------


def is_vertex_cover(d, s, literal_table: bool = False) -> Verdict:
    """Whether ``s`` touches every pair / triplet.

    Triplet form checks ``No alpha^c are beta^c and gamma^c`` and its two
    rotations.  With ``literal_table`` the second rotation reads
    ``No beta^c are alpha^c and beta^c``, which reduces to
    ``No beta^c are alpha^c`` because the subject already fixes ``beta^c``.
    """
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        rest = d.vertices - alpha
        return _verdict([_quantified(d.data, A, rest, Atom(B, rest))])
    s.validate(d)
    comp = s.complement(d)
    checks = [
        _quantified(d, A, comp.alpha, And(Atom(B, comp.beta), Atom(C, comp.gamma))),
        _quantified(
            d, B, comp.beta,
            Atom(A, comp.alpha) if literal_table else And(Atom(A, comp.alpha), Atom(C, comp.gamma)),
        ),
        _quantified(d, C, comp.gamma, And(Atom(A, comp.alpha), Atom(B, comp.beta))),
    ]
    return _verdict(checks, literal_table=literal_table)


def is_dominating_set(d, s) -> Verdict:
    """Whether every element outside the selection interacts with it."""
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        checks = [
            _quantified(d.data, A, {v}, Atom(B, alpha), Quantifier.SOME)
            for v in sorted(d.vertices - alpha)
        ]
        return _verdict(checks)
    s.validate(d)
    comp = s.complement(d)
    checks = []
    for dim in Dim:
        p, q = dim.others()
        for e in sorted(comp[dim]):
            checks.append(_quantified(d, dim, {e}, Or(Atom(p, s[p]), Atom(q, s[q])), Quantifier.SOME))
    return _verdict(checks)


def is_separating_set(d, s) -> Verdict:
    """Whether removing the selection leaves disconnected data.

    ``details["disconnected_before"]`` reports whether ``d`` was already
    disconnected; an empty remainder never counts as separated.
    """
    before = find_disconnection(d) is not None
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        rest = d.vertices - alpha
        if len(rest) < 2:
            return Verdict(False, [], {"disconnected_before": before, "remainder_empty": not rest})
        remainder = d.induced(rest)
    else:
        s.validate(d)
        remainder = induced_subdataset(d, s.complement(d))
        if not remainder.triplets:
            return Verdict(False, [], {"disconnected_before": before, "remainder_empty": True})
    cut = find_disconnection(remainder)
    if cut is None:
        return Verdict(False, [], {"disconnected_before": before, "remainder_empty": False})
    witness = is_disconnected(remainder, cut)
    return Verdict(witness.holds, witness.checks,
                   {"disconnected_before": before, "remainder_empty": False, "cut": cut})


# -- coloring ------------------------------------------------------------------


def _check_partition(parts, universe, name):
    seen = set()
    for p in parts:
        if seen & p:
            raise InvalidPartition(f"{name} color classes overlap")
        seen |= p
    if seen != set(universe):
        raise InvalidPartition(f"{name} color classes do not cover the universe")


def is_k_coloring(d, parts) -> Verdict:
    """Whether no color class interacts with itself.

    Graph form takes one list of vertex classes.  Triplet form takes a
    :class:`Partitioning` with ``k`` classes for each of A, B and C and
    checks ``No alpha_i are beta_i and gamma_i`` with its rotations.
    """
    if isinstance(d, PairDataset):
        classes = parts.parts[0] if isinstance(parts, Partitioning) else [frozenset(p) for p in parts]
        if not classes:
            raise InvalidPartition("k must be at least 1")
        _check_partition(classes, d.vertices, "vertex")
        checks = [_quantified(d.data, A, p, Atom(B, p)) for p in classes]
        return _verdict(checks, k=len(classes))
    if not isinstance(parts, Partitioning) or len(parts.parts) != 3:
        raise InvalidPartition("triplet colorings need a partitioning of A, B and C")
    k = parts.k
    if k < 1 or any(len(p) != k for p in parts.parts):
        raise InvalidPartition("each dimension needs the same number k >= 1 of classes")
    for dim in Dim:
        _check_partition(parts.parts[dim], d.universes[dim], dim.letter)
    checks = []
    for i in range(k):
        sel = Selection(*(parts.parts[dim][i] for dim in Dim))
        for dim in Dim:
            p, q = dim.others()
            checks.append(_quantified(d, dim, sel[dim], And(Atom(p, sel[p]), Atom(q, sel[q]))))
    return _verdict(checks, k=k)


# -- dense blocks --------------------------------------------------------------


def is_clique(d, s, opts: DensityOptions | None = None) -> Verdict:
    """``Some alpha are 100% beta and gamma`` (graph: ``Some alpha are 100% alpha``).

    Graph density counts ordered pairs of distinct vertices when the graph is
    loopless.  A subset without any internal pair is not a clique.
    """
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        opts = opts or d.density_options
        data = d.data
        sel = Selection(alpha, alpha, data.universes[C])
        predicate = block(A, alpha, data.universes[C])
    else:
        opts = opts or DensityOptions()
        data = d
        sel = s
        s.validate(d)
        predicate = block(A, s.beta, s.gamma)
    if not sel.alpha:
        raise InvalidSelection("clique subsets must be non-empty")
    some = _quantified(data, A, sel.alpha, predicate, Quantifier.SOME)
    full = Proposition(A, sel.alpha, predicate, Thresholded(0, 1))
    if not some.holds:
        return Verdict(False, [some, Check(full, False)], {})
    return _verdict([some, _thresholded(data, full, opts)])


def is_cluster(d, s, x_threshold, opts: DensityOptions | None = None) -> Verdict:
    """``Large x% alpha are beta and gamma`` and its two rotations.

    ``x_threshold`` has no default: what counts as "large" is the caller's
    call.  Thresholds above 1 can never hold.  Density is unconstrained here,
    so it is reported over the plain cross product unless ``opts`` says
    otherwise.
    """
    threshold = Fraction(repr(x_threshold)) if isinstance(x_threshold, float) else Fraction(x_threshold)
    opts = opts or DensityOptions()
    if isinstance(d, PairDataset):
        alpha = _vertex_set(d, s)
        data = d.data
        blocks = [(A, alpha, block(A, alpha, data.universes[C]))]
    else:
        s.validate(d)
        data = d
        blocks = [(dim, s[dim], block(dim, *(s[o] for o in dim.others()))) for dim in Dim]
    if threshold > 1:
        return Verdict(False, [], {"reason": "threshold above 1"})
    props = [Proposition(dim, subject, pred, Thresholded(threshold, 0)) for dim, subject, pred in blocks]
    return _verdict([_thresholded(data, p, opts) for p in props])
