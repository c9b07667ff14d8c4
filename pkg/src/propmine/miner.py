"""Region-growing miner for thresholded propositions.

For every element ``e`` of the subject dimension the miner looks at the slice
of triplets carrying ``e``.  Each triplet of the slice seeds a region (one
element on each predicate dimension).  Regions then grow one element at a
time toward the highest resulting density; regions whose density falls
below ``y_min`` are dropped, and regions holding at least ``x_min`` of the
slice are recorded.  Finally, subjects that recorded the same region are
merged into one proposition.

Element sets are handled as Python integer bitmasks inside the growth loop.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from functools import partial
from typing import Iterable, Mapping, Sequence

from .dataset import (
    DensityOptions,
    Dim,
    Selection,
    TripletDataset,
    block_cells,
    coverage_x,
    density_y,
)
from .errors import InternalInvariantError
from .propositions import Proposition, Thresholded, as_fraction, block

logger = logging.getLogger(__name__)

__all__ = [
    "MinerConfig",
    "Region",
    "MinedProposition",
    "MiningResult",
    "get_predicates",
    "grow_region",
    "merge_subjects",
    "get_propositions",
    "mine",
]

GROWTH_POLICIES = ("co-occurring", "all")
TIE_BREAKS = ("lowest-index", "largest-gain")


@dataclass(frozen=True)
class MinerConfig:
    """Thresholds and policies of a mining run.

    ``x_min`` and ``y_min`` are stored as exact fractions; floats are read
    through their shortest decimal form, so ``0.7`` means ``7/10``.
    """

    x_min: Fraction = Fraction(7, 10)
    y_min: Fraction = Fraction(1, 2)
    subject_dim: Dim = Dim.A
    growth_candidates: str = "co-occurring"
    tie_break: str = "lowest-index"
    dedupe_regions: bool = True
    max_region_size: int | None = None
    loopless: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x_min", as_fraction(self.x_min))
        object.__setattr__(self, "y_min", as_fraction(self.y_min))
        object.__setattr__(self, "subject_dim", Dim.parse(self.subject_dim))
        if not (0 < self.x_min <= 1 and 0 < self.y_min <= 1):
            raise ValueError("x_min and y_min must lie in (0, 1]")
        if self.growth_candidates not in GROWTH_POLICIES:
            raise ValueError(f"growth_candidates must be one of {GROWTH_POLICIES}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        if self.max_region_size is not None and self.max_region_size < 2:
            raise ValueError("max_region_size must be at least 2")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be positive")

    @property
    def density_options(self) -> DensityOptions:
        return DensityOptions(loopless=self.loopless)

    def to_mapping(self) -> dict:
        """Plain ``{key: str}`` view, the inverse of :meth:`from_mapping`."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Dim):
                value = value.letter
            elif isinstance(value, bool):
                value = "true" if value else "false"
            elif value is None:
                value = "none"
            out[f.name] = str(value)
        return out

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "MinerConfig":
        kwargs = {}
        names = {f.name: f for f in fields(cls)}
        for key, value in mapping.items():
            key = key.replace("-", "_")
            if key not in names:
                raise ValueError(f"unknown miner option {key!r}")
            if isinstance(value, str):
                low = value.strip().lower()
                if key in ("dedupe_regions", "loopless"):
                    if low not in ("true", "false", "1", "0", "yes", "no"):
                        raise ValueError(f"{key} expects a boolean, got {value!r}")
                    value = low in ("true", "1", "yes")
                elif key == "max_region_size":
                    value = None if low in ("none", "") else int(low)
                elif key == "n_jobs":
                    value = int(low)
                elif key in ("x_min", "y_min"):
                    value = as_fraction(value.strip())
                else:
                    value = value.strip()
            kwargs[key] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class Region:
    """Candidate predicate block for one subject element.

    ``beta`` and ``gamma`` hold the elements of the two non-subject
    dimensions in axis order (``B, C`` for subject ``A``; ``A, C`` for ``B``;
    ``A, B`` for ``C``).
    """

    beta: frozenset
    gamma: frozenset
    triplet_count: int = 0
    cells: int = 1

    @property
    def density(self) -> Fraction:
        return Fraction(self.triplet_count, self.cells)

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (tuple(sorted(self.beta)), tuple(sorted(self.gamma)))


@dataclass(frozen=True)
class MinedProposition:
    """A merged subject together with the region all its members recorded.

    ``per_subject`` maps each contributing singleton to its own ``(x, y)``.
    """

    subject_dim: Dim
    subject: frozenset
    region: Region
    x_actual: Fraction
    y_actual: Fraction
    per_subject: Mapping[int, tuple[Fraction, Fraction]] = field(default_factory=dict)

    @property
    def provenance(self) -> tuple[int, ...]:
        return tuple(sorted(self.per_subject))

    def selection(self) -> Selection:
        parts = [None, None, None]
        parts[self.subject_dim] = self.subject
        p, q = self.subject_dim.others()
        parts[p] = self.region.beta
        parts[q] = self.region.gamma
        return Selection(*parts)

    def to_proposition(self, cfg: "MinerConfig | None" = None) -> Proposition:
        """``x_min S are y_min P`` (or the actual values without ``cfg``)."""
        x, y = (cfg.x_min, cfg.y_min) if cfg else (self.x_actual, self.y_actual)
        return Proposition(
            self.subject_dim,
            self.subject,
            block(self.subject_dim, self.region.beta, self.region.gamma),
            Thresholded(x, y),
        )


@dataclass
class MiningResult:
    """Output of :func:`mine`: the propositions plus run counters.

    ``predicate_count`` counts (subject element, region) pairs before merging.
    """

    propositions: list
    predicate_count: int
    config: MinerConfig


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


class _Slice:
    """Bitmask index of one subject element's slice."""

    def __init__(self, element, pairs, d: TripletDataset, cfg: MinerConfig):
        self.element = element
        self.cfg = cfg
        self.subject = cfg.subject_dim
        self.pairs = sorted(pairs)
        self.total = len(self.pairs)
        self.rows = {}
        self.cols = {}
        for u, v in self.pairs:
            self.rows[u] = self.rows.get(u, 0) | (1 << v)
            self.cols[v] = self.cols.get(v, 0) | (1 << u)
        p, q = self.subject.others()
        if cfg.growth_candidates == "all":
            self.pool_p = _mask(d.universes[p])
            self.pool_q = _mask(d.universes[q])
        else:
            self.pool_p = _mask(self.rows)
            self.pool_q = _mask(self.cols)
        self.loopless = cfg.loopless
        self.x_num, self.x_den = cfg.x_min.numerator, cfg.x_min.denominator
        self.y_num, self.y_den = cfg.y_min.numerator, cfg.y_min.denominator
        self.bit = 1 << element

    def cells(self, pm: int, qm: int) -> int:
        np_, nq = pm.bit_count(), qm.bit_count()
        if not self.loopless:
            return np_ * nq
        if self.subject == Dim.C:
            return np_ * nq - (pm & qm).bit_count()
        # subject A or B: the singleton subject overlaps the other person axis
        overlap = 1 if pm & self.bit else 0
        return block_cells((1, np_, nq), overlap, True)

    def passes_x(self, cnt: int) -> bool:
        return cnt * self.x_den >= self.x_num * self.total

    def passes_y(self, cnt: int, cells: int) -> bool:
        return cells > 0 and cnt * self.y_den >= self.y_num * cells

    def grow(self, state):
        """Best single-element growth of ``state`` or ``None`` when exhausted."""
        pm, qm, cnt = state
        cap = self.cfg.max_region_size
        if cap is not None and pm.bit_count() + qm.bit_count() >= cap:
            return None
        largest_gain = self.cfg.tie_break == "largest-gain"
        best = None
        best_key = None
        for side, pool in ((0, self.pool_p & ~pm), (1, self.pool_q & ~qm)):
            for idx in _bits(pool):
                if side == 0:
                    npm, nqm = pm | (1 << idx), qm
                    gain = (self.rows.get(idx, 0) & qm).bit_count()
                else:
                    npm, nqm = pm, qm | (1 << idx)
                    gain = (self.cols.get(idx, 0) & pm).bit_count()
                cells = self.cells(npm, nqm)
                if cells == 0:
                    continue
                ncnt = cnt + gain
                if best is None:
                    better = True
                else:
                    lhs, rhs = ncnt * best_key[1], best_key[0] * cells
                    if lhs != rhs:
                        better = lhs > rhs
                    elif largest_gain and ncnt != best_key[0]:
                        better = ncnt > best_key[0]
                    else:
                        # pools are scanned in (side, index) order
                        better = False
                if better:
                    best = (npm, nqm, ncnt)
                    best_key = (ncnt, cells)
        return best

    def seeds(self):
        out = []
        seen = set()
        for u, v in self.pairs:
            state = (1 << u, 1 << v, 1)
            if self.cells(state[0], state[1]) == 0:
                continue
            if self.cfg.dedupe_regions:
                if state in seen:
                    continue
                seen.add(state)
            out.append(state)
        return out

    def run(self) -> list[tuple[int, int, int]]:
        recorded = {}
        regions = self.seeds()
        while regions:
            survivors = []
            for state in regions:
                grown = self.grow(state)
                if grown is None:
                    if self.passes_x(state[2]):
                        recorded.setdefault((state[0], state[1]), state)
                    continue
                if not self.passes_y(grown[2], self.cells(grown[0], grown[1])):
                    continue
                if self.passes_x(grown[2]):
                    recorded.setdefault((grown[0], grown[1]), grown)
                survivors.append(grown)
            if self.cfg.dedupe_regions:
                survivors = list(dict.fromkeys(survivors))
            regions = survivors
        return list(recorded.values())

    def to_region(self, state) -> Region:
        pm, qm, cnt = state
        return Region(
            frozenset(_bits(pm)), frozenset(_bits(qm)), cnt, self.cells(pm, qm)
        )

    def from_region(self, r: Region):
        pm, qm = _mask(r.beta), _mask(r.gamma)
        cnt = sum(
            (self.rows.get(u, 0) & qm).bit_count() for u in r.beta
        )
        return (pm, qm, cnt)


def _check_dataset(d: TripletDataset, cfg: MinerConfig) -> None:
    if cfg.loopless:
        if not d.shared_ab:
            raise ValueError("loopless mining needs A and B to share a universe")
        if d.has_diagonal():
            raise ValueError("loopless mining needs a dataset without (p, p, t) triplets")


def _slice_for(d: TripletDataset, element: int, cfg: MinerConfig) -> _Slice:
    s = cfg.subject_dim
    p, q = s.others()
    pairs = [(t[p], t[q]) for t in d.slices[s].get(element, ())]
    return _Slice(element, pairs, d, cfg)


def _slice_from_dataset(slice_ds: TripletDataset, cfg: MinerConfig) -> _Slice:
    subject = slice_ds.universes[cfg.subject_dim]
    elements = {t[cfg.subject_dim] for t in slice_ds.triplets} | set(subject)
    if len(elements) != 1:
        raise ValueError("a slice has exactly one subject element")
    (element,) = elements
    return _slice_for(slice_ds, element, cfg)


def get_predicates(slice_ds: TripletDataset, cfg: MinerConfig) -> list[Region]:
    """Regions recorded for the single subject element of ``slice_ds``.

    ``slice_ds`` is typically ``project(d, cfg.subject_dim, element)``.
    """
    _check_dataset(slice_ds, cfg)
    if not slice_ds.triplets:
        return []
    sl = _slice_from_dataset(slice_ds, cfg)
    return sorted((sl.to_region(s) for s in sl.run()), key=lambda r: r.key)


def grow_region(slice_ds: TripletDataset, region: Region, cfg: MinerConfig) -> Region | None:
    """One growth step of ``region``; ``None`` when the candidate pool is exhausted."""
    sl = _slice_from_dataset(slice_ds, cfg)
    grown = sl.grow(sl.from_region(region))
    return None if grown is None else sl.to_region(grown)


def _predicates_for(d: TripletDataset, cfg: MinerConfig, element: int):
    sl = _slice_for(d, element, cfg)
    if sl.total == 0:
        return element, sl.total, []
    return element, sl.total, [sl.to_region(s) for s in sl.run()]


def _sort_key(m: MinedProposition):
    return (-len(m.subject), -m.x_actual, -m.y_actual, m.region.key, tuple(sorted(m.subject)))


def merge_subjects(
    d: TripletDataset,
    predicates: Mapping[int, Sequence[Region]],
    cfg: MinerConfig,
) -> list[MinedProposition]:
    """Group subjects that recorded identical regions and merge them.

    Merged coverage and density are recomputed on ``d``; a merged subject
    that misses a threshold raises :class:`InternalInvariantError`.
    """
    groups: dict = {}
    for element in sorted(predicates):
        for region in predicates[element]:
            groups.setdefault(region.key, []).append((element, region))
    opts = cfg.density_options
    out = []
    for key, members in groups.items():
        subject = frozenset(e for e, _ in members)
        region = members[0][1]
        per_subject = {}
        for e, r in members:
            total = d.degree(cfg.subject_dim, e)
            per_subject[e] = (Fraction(r.triplet_count, total), r.density)
        mp = MinedProposition(cfg.subject_dim, subject, region, Fraction(0), Fraction(0), per_subject)
        sel = mp.selection()
        x = coverage_x(d, sel, cfg.subject_dim)
        y = density_y(d, sel, opts)
        if x < cfg.x_min or y < cfg.y_min:
            raise InternalInvariantError(
                f"merged subject {sorted(subject)} breaks thresholds (x={x}, y={y})"
            )
        count = sum(r.triplet_count for _, r in members)
        cells = sum(r.cells for _, r in members)
        merged_region = Region(region.beta, region.gamma, count, cells)
        out.append(MinedProposition(cfg.subject_dim, subject, merged_region, x, y, per_subject))
    out.sort(key=_sort_key)
    return out


def mine(d: TripletDataset, cfg: MinerConfig = MinerConfig()) -> MiningResult:
    """Run the miner over every subject element and merge shared regions."""
    _check_dataset(d, cfg)
    elements = sorted(d.universes[cfg.subject_dim])
    work = partial(_predicates_for, d, cfg)
    if cfg.n_jobs > 1 and len(elements) > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(work, elements, chunksize=max(1, len(elements) // (4 * cfg.n_jobs))))
    else:
        results = [work(e) for e in elements]
    predicates = {e: regions for e, _, regions in results if regions}
    count = sum(len(r) for r in predicates.values())
    logger.info("recorded %d (subject, region) predicates", count)
    return MiningResult(merge_subjects(d, predicates, cfg), count, cfg)


def get_propositions(d: TripletDataset, cfg: MinerConfig = MinerConfig()) -> list[MinedProposition]:
    """Merged propositions ``x >= x_min S are y >= y_min P``, canonically sorted."""
    return mine(d, cfg).propositions
