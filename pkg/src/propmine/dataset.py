"""Triplet datasets and the counting primitives built on them.

A dataset is a finite set of triplets ``(a, b, c)`` drawn from three element
universes.  Elements are interned to dense integer indices; every set
operation in the package works on index sets, and ``labels`` maps an index
back to the original identifier.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidSelection, UndefinedCoverage, UndefinedDensity

logger = logging.getLogger(__name__)

__all__ = [
    "Dim",
    "TripletDataset",
    "Selection",
    "BinHistogram",
    "DensityOptions",
    "induced_subdataset",
    "bin_histogram",
    "coverage_x",
    "density_y",
    "block_cells",
    "project",
    "natural_key",
]


class Dim(IntEnum):
    """Position of a coordinate inside a triplet."""

    A = 0
    B = 1
    C = 2

    @classmethod
    def parse(cls, value) -> "Dim":
        if isinstance(value, Dim):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        if isinstance(value, str) and value.upper() in cls.__members__:
            return cls[value.upper()]
        raise ValueError(f"unknown dimension {value!r}; expected a, b or c")

    def others(self) -> tuple["Dim", "Dim"]:
        """The two non-subject dimensions, in axis order."""
        return tuple(d for d in Dim if d != self)

    @property
    def letter(self) -> str:
        return self.name.lower()


def natural_key(label):
    """Sort key placing integer-like labels in numeric order before the rest."""
    text = str(label)
    try:
        return (0, int(text), "")
    except ValueError:
        return (1, 0, text)


@dataclass(frozen=True)
class TripletDataset:
    """Immutable set of index triplets over three universes.

    Parameters
    ----------
    universes
        Index set of each dimension.  Indices refer to positions in ``labels``.
    triplets
        The observed triplets, as index tuples.
    labels
        Per-dimension label tables (index -> identifier).
    metadata
        Per-dimension ``{index: tag}`` maps, e.g. the role of a person.
    shared_ab
        True when dimensions A and B index the same label table, as in
        contact networks where both endpoints are persons.
    """

    universes: tuple[frozenset, frozenset, frozenset]
    triplets: frozenset
    labels: tuple[tuple, tuple, tuple]
    metadata: tuple[Mapping, Mapping, Mapping] = field(
        default=({}, {}, {}), compare=True
    )
    shared_ab: bool = False

    def __post_init__(self):
        universes = tuple(frozenset(int(i) for i in u) for u in self.universes)
        triplets = frozenset(tuple(int(x) for x in t) for t in self.triplets)
        labels = tuple(tuple(t) for t in self.labels)
        metadata = tuple(dict(m) for m in self.metadata)
        object.__setattr__(self, "universes", universes)
        object.__setattr__(self, "triplets", triplets)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "metadata", metadata)
        if len(universes) != 3 or len(labels) != 3 or len(metadata) != 3:
            raise ValueError("a triplet dataset has exactly three dimensions")
        for dim, (u, lab) in enumerate(zip(universes, labels)):
            if u and (min(u) < 0 or max(u) >= len(lab)):
                raise ValueError(f"universe {Dim(dim).letter} references unknown labels")
        for t in triplets:
            if len(t) != 3 or any(t[k] not in universes[k] for k in range(3)):
                raise InvalidSelection(f"triplet {t} lies outside the universes")
        if self.shared_ab and labels[0] != labels[1]:
            raise ValueError("shared_ab requires identical label tables for A and B")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_triplets(
        cls,
        triplets: Iterable[Sequence[int]],
        sizes: Sequence[int] | None = None,
        labels: Sequence[Sequence] | None = None,
        shared_ab: bool = False,
        metadata=None,
    ) -> "TripletDataset":
        """Build a dataset from index triplets.

        Universes default to ``range(size)`` per dimension.  Without sizes or
        labels they are the smallest ranges containing every index.
        """
        triplets = [tuple(int(x) for x in t) for t in triplets]
        if sizes is None:
            if labels is not None:
                sizes = [len(lab) for lab in labels]
            else:
                sizes = [max((t[k] for t in triplets), default=-1) + 1 for k in range(3)]
                if shared_ab:
                    sizes[0] = sizes[1] = max(sizes[0], sizes[1])
        if labels is None:
            labels = [tuple(range(n)) for n in sizes]
        return cls(
            universes=tuple(frozenset(range(n)) for n in sizes),
            triplets=frozenset(triplets),
            labels=tuple(tuple(lab) for lab in labels),
            metadata=tuple(metadata) if metadata is not None else ({}, {}, {}),
            shared_ab=shared_ab,
        )

    @classmethod
    def from_records(
        cls,
        rows: Iterable[Sequence[Hashable]],
        shared_ab: bool = False,
        metadata: Sequence[Mapping] | None = None,
    ) -> "TripletDataset":
        """Intern labeled ``(a, b, c)`` rows into a dataset.

        Labels are interned in natural sort order, so the result does not
        depend on row order.  Duplicate rows are collapsed with a warning.
        """
        rows = [tuple(r) for r in rows]
        unique = set(rows)
        if len(unique) < len(rows):
            logger.warning("collapsed %d duplicate triplet rows", len(rows) - len(unique))
        seen = [set(), set(), set()]
        for r in unique:
            for k in range(3):
                seen[k].add(r[k])
        if shared_ab:
            seen[0] = seen[1] = seen[0] | seen[1]
        labels = [tuple(sorted(s, key=natural_key)) for s in seen]
        index = [{lab: i for i, lab in enumerate(tab)} for tab in labels]
        triplets = [(index[0][a], index[1][b], index[2][c]) for a, b, c in unique]
        universes = [frozenset(range(len(tab))) for tab in labels]
        if shared_ab:
            universes[0] = frozenset(index[0][r[0]] for r in unique)
            universes[1] = frozenset(index[1][r[1]] for r in unique)
        meta = ({}, {}, {})
        if metadata is not None:
            meta = tuple(
                {index[k][lab]: tag for lab, tag in m.items() if lab in index[k]}
                for k, m in enumerate(metadata)
            )
        return cls(tuple(universes), frozenset(triplets), tuple(labels), meta, shared_ab)

    # -- views --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.triplets)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return tuple(len(u) for u in self.universes)

    def universe(self, dim) -> frozenset:
        return self.universes[Dim.parse(dim)]

    def label(self, dim, index: int):
        return self.labels[Dim.parse(dim)][index]

    def index_of(self, dim, label) -> int:
        """Index of ``label`` in dimension ``dim``; raises ``KeyError``."""
        dim = Dim.parse(dim)
        lookup = self._label_index[dim]
        if label in lookup:
            return lookup[label]
        text = self._text_index[dim]
        if str(label) in text:
            return text[str(label)]
        raise KeyError(f"unknown element {label!r} in dimension {dim.letter}")

    @cached_property
    def _label_index(self):
        return tuple({lab: i for i, lab in enumerate(tab)} for tab in self.labels)

    @cached_property
    def _text_index(self):
        # labels as printed; exact matches above take precedence
        return tuple({str(lab): i for i, lab in enumerate(tab)} for tab in self.labels)

    @cached_property
    def sorted_triplets(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(sorted(self.triplets))

    @cached_property
    def array(self) -> np.ndarray:
        """Triplets as a sorted ``(n, 3)`` integer array."""
        return np.array(self.sorted_triplets, dtype=np.int64).reshape(-1, 3)

    @cached_property
    def slices(self) -> tuple[dict, dict, dict]:
        """Per dimension, ``element -> list of triplets`` with that coordinate."""
        out = (defaultdict(list), defaultdict(list), defaultdict(list))
        for t in self.sorted_triplets:
            for k in range(3):
                out[k][t[k]].append(t)
        return tuple(dict(o) for o in out)

    def degree(self, dim, element: int) -> int:
        return len(self.slices[Dim.parse(dim)].get(element, ()))

    def has_diagonal(self) -> bool:
        """Whether any triplet has the same person in A and B."""
        return self.shared_ab and any(a == b for a, b, _ in self.triplets)


@dataclass(frozen=True)
class Selection:
    """Three subsets ``(alpha, beta, gamma)`` naming a region of the triplet space."""

    alpha: frozenset = frozenset()
    beta: frozenset = frozenset()
    gamma: frozenset = frozenset()

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, frozenset(int(i) for i in getattr(self, name)))

    @classmethod
    def full(cls, d: TripletDataset) -> "Selection":
        return cls(*d.universes)

    @classmethod
    def from_labels(cls, d: TripletDataset, alpha=(), beta=(), gamma=()) -> "Selection":
        return cls(*(
            frozenset(d.index_of(k, lab) for lab in group)
            for k, group in enumerate((alpha, beta, gamma))
        ))

    def __getitem__(self, dim) -> frozenset:
        return (self.alpha, self.beta, self.gamma)[Dim.parse(dim)]

    def as_tuple(self) -> tuple[frozenset, frozenset, frozenset]:
        return (self.alpha, self.beta, self.gamma)

    def replace(self, dim, subset) -> "Selection":
        parts = list(self.as_tuple())
        parts[Dim.parse(dim)] = frozenset(subset)
        return Selection(*parts)

    def complement(self, d: TripletDataset) -> "Selection":
        return Selection(*(u - s for u, s in zip(d.universes, self.as_tuple())))

    def validate(self, d: TripletDataset) -> None:
        for k, (sub, u) in enumerate(zip(self.as_tuple(), d.universes)):
            extra = sub - u
            if extra:
                raise InvalidSelection(
                    f"elements {sorted(extra)} are not in universe {Dim(k).letter}"
                )

    def contains(self, triplet) -> bool:
        return triplet[0] in self.alpha and triplet[1] in self.beta and triplet[2] in self.gamma


@dataclass(frozen=True)
class BinHistogram:
    """Triplet counts of the eight membership bins of a selection.

    Keys are ``(in_alpha, in_beta, in_gamma)`` boolean signatures.
    """

    counts: Mapping[tuple[bool, bool, bool], int]
    total: int

    def __getitem__(self, signature) -> int:
        return self.counts[tuple(bool(s) for s in signature)]


@dataclass(frozen=True)
class DensityOptions:
    """How block cells are counted.

    With ``loopless`` set on a dataset whose A and B share a universe, cells
    with ``a == b`` are excluded from the denominator.  Such datasets must
    not contain diagonal triplets inside the measured block.
    """

    loopless: bool = False


def induced_subdataset(d: TripletDataset, s: Selection) -> TripletDataset:
    """Triplets whose three coordinates fall in ``s``; universes shrink to ``s``."""
    s.validate(d)
    kept = frozenset(t for t in d.triplets if s.contains(t))
    return TripletDataset(s.as_tuple(), kept, d.labels, d.metadata, d.shared_ab)


def bin_histogram(d: TripletDataset, s: Selection) -> BinHistogram:
    s.validate(d)
    counts = {sig: 0 for sig in product((False, True), repeat=3)}
    for a, b, c in d.triplets:
        counts[(a in s.alpha, b in s.beta, c in s.gamma)] += 1
    return BinHistogram(counts, len(d.triplets))


def _count_in(d: TripletDataset, s: Selection, pivot: Dim | None = None) -> int:
    # scan the smallest slice family available for the pivot dimension
    if pivot is None:
        pivot = min(Dim, key=lambda k: len(s[k]))
    slices = d.slices[pivot]
    return sum(
        1
        for e in s[pivot]
        for t in slices.get(e, ())
        if s.contains(t)
    )


def coverage_x(d: TripletDataset, s: Selection, subject) -> Fraction:
    """Fraction of the subject's triplets that fall inside the selection.

    The denominator counts triplets whose subject coordinate lies in the
    subject subset, other coordinates unrestricted.
    """
    subject = Dim.parse(subject)
    s.validate(d)
    slices = d.slices[subject]
    denominator = sum(len(slices.get(e, ())) for e in s[subject])
    if denominator == 0:
        raise UndefinedCoverage(
            f"subject subset on {subject.letter} owns no triplet"
        )
    return Fraction(_count_in(d, s, subject), denominator)


def block_cells(
    sizes: Sequence[int], ab_overlap: int = 0, loopless: bool = False
) -> int:
    """Number of cells of an ``alpha x beta x gamma`` block.

    ``ab_overlap`` is ``|alpha & beta|``; it only matters when ``loopless``.
    """
    na, nb, nc = sizes
    cells = na * nb * nc
    if loopless:
        cells -= ab_overlap * nc
    return cells


def _check_loopless(d: TripletDataset, opts: DensityOptions) -> bool:
    if not opts.loopless:
        return False
    if not d.shared_ab:
        raise ValueError("loopless density needs A and B to share a universe")
    return True


def density_y(
    d: TripletDataset, s: Selection, opts: DensityOptions = DensityOptions()
) -> Fraction:
    """Filled fraction of the ``alpha x beta x gamma`` block."""
    s.validate(d)
    if not (s.alpha and s.beta and s.gamma):
        raise UndefinedDensity("density needs non-empty alpha, beta and gamma")
    loopless = _check_loopless(d, opts)
    cells = block_cells(
        (len(s.alpha), len(s.beta), len(s.gamma)), len(s.alpha & s.beta), loopless
    )
    if cells == 0:
        raise UndefinedDensity("the block has no off-diagonal cell")
    inside = _count_in(d, s)
    if loopless and any(a == b for a, b, _ in (t for t in d.triplets if s.contains(t))):
        raise UndefinedDensity("diagonal triplets inside a loopless block")
    return Fraction(inside, cells)


def project(d: TripletDataset, dim, fixed: int) -> TripletDataset:
    """The slice of ``d`` with coordinate ``dim`` fixed to ``fixed``."""
    dim = Dim.parse(dim)
    if fixed not in d.universes[dim]:
        raise InvalidSelection(f"element {fixed} is not in universe {dim.letter}")
    return induced_subdataset(d, Selection.full(d).replace(dim, {fixed}))
