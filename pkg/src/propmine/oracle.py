"""Ground truth for the miner.

* :func:`enumerate_all` lists every (subject element, block) pair that meets
  the thresholds, by brute force over all predicate subsets.  Block counts
  for all subsets come from one matrix product per subject element,
  ``I_p @ M @ I_q.T``, where ``I_p`` and ``I_q`` enumerate subset indicator
  vectors and ``M`` is the slice's incidence matrix.
* :func:`generate` plants blocks in noise with exact cell counts.
* :func:`recall_report` scores mined blocks against planted ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dataset import Dim, Selection, TripletDataset
from .errors import BudgetExceeded
from .miner import MinedProposition, MinerConfig

__all__ = [
    "OracleEntry",
    "OracleResult",
    "PlantedBlock",
    "PlantSpec",
    "RecallReport",
    "enumerate_all",
    "generate",
    "random_dataset",
    "recall_report",
    "DEFAULT_BUDGET",
    "HOSPITAL_ROLES",
    "synthetic_contacts",
    "write_contacts",
]

DEFAULT_BUDGET = 2**24


@dataclass(frozen=True)
class OracleEntry:
    selection: Selection
    x: Fraction
    y: Fraction


@dataclass
class OracleResult:
    entries: list
    subject_dim: Dim
    bounds: dict = field(default_factory=dict)

    def pairs(self) -> set:
        """``(subject element, beta, gamma)`` triples for containment checks."""
        p, q = self.subject_dim.others()
        return {
            (next(iter(e.selection[self.subject_dim])), e.selection[p], e.selection[q])
            for e in self.entries
        }


def _subset_matrix(n: int) -> np.ndarray:
    """Row ``m`` is the indicator vector of bitmask ``m`` over ``n`` items."""
    masks = np.arange(2**n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def _has_valid_strict_superset(valid: np.ndarray, np_: int, nq: int) -> np.ndarray:
    # up[m] = some superset of m (m included) is valid, by superset-sum over bits
    up = valid.copy()
    for axis, n in ((0, np_), (1, nq)):
        for i in range(n):
            bit = 1 << i
            idx = np.arange(2**n)
            lower = idx[(idx & bit) == 0]
            if axis == 0:
                up[lower, :] |= up[lower | bit, :]
            else:
                up[:, lower] |= up[:, lower | bit]
    strict = np.zeros_like(valid)
    for axis, n in ((0, np_), (1, nq)):
        idx = np.arange(2**n)
        for i in range(n):
            bit = 1 << i
            lower = idx[(idx & bit) == 0]
            if axis == 0:
                strict[lower, :] |= up[lower | bit, :]
            else:
                strict[:, lower] |= up[:, lower | bit]
    return strict


def enumerate_all(
    d: TripletDataset,
    cfg: MinerConfig,
    budget: int = DEFAULT_BUDGET,
    maximal_only: bool = False,
) -> OracleResult:
    """Every ``(e, beta, gamma)`` with ``x >= x_min`` and ``y >= y_min``.

    Subsets range over the full universes of the two predicate dimensions.
    Raises :class:`BudgetExceeded` when ``2**|P| * 2**|Q|`` exceeds ``budget``.
    """
    s = cfg.subject_dim
    p, q = s.others()
    up = sorted(d.universes[p])
    uq = sorted(d.universes[q])
    space = 2 ** len(up) * 2 ** len(uq)
    if space > budget:
        raise BudgetExceeded(
            f"{len(up)} x {len(uq)} predicate universes need {space} subsets per subject "
            f"(budget {budget}); shrink them to |P| + |Q| <= {budget.bit_length() - 1}"
        )
    loopless = cfg.loopless
    if loopless and not d.shared_ab:
        raise ValueError("loopless enumeration needs A and B to share a universe")
    ip = _subset_matrix(len(up))
    iq = _subset_matrix(len(uq))
    size_p = ip.sum(axis=1)
    size_q = iq.sum(axis=1)
    base_cells = np.outer(size_p, size_q)
    pos_p = {e: i for i, e in enumerate(up)}
    pos_q = {e: i for i, e in enumerate(uq)}
    same = np.array([[int(a == b) for b in uq] for a in up], dtype=np.int64).reshape(len(up), len(uq))
    pair_overlap = ip @ same @ iq.T if s == Dim.C else None
    xn, xd = cfg.x_min.numerator, cfg.x_min.denominator
    yn, yd = cfg.y_min.numerator, cfg.y_min.denominator

    entries = []
    for e in sorted(d.universes[s]):
        triplets = d.slices[s].get(e, ())
        if not triplets:
            continue
        m = np.zeros((len(up), len(uq)), dtype=np.int64)
        for t in triplets:
            m[pos_p[t[p]], pos_q[t[q]]] = 1
        total = int(m.sum())
        counts = ip @ m @ iq.T
        cells = base_cells
        if loopless:
            if s == Dim.C:
                cells = base_cells - pair_overlap
            elif e in pos_p:
                cells = base_cells - np.outer(ip[:, pos_p[e]], size_q)
        valid = (
            (counts * xd >= xn * total)
            & (cells > 0)
            & (counts * yd >= yn * cells)
        )
        valid[0, :] = False
        valid[:, 0] = False
        if maximal_only:
            valid &= ~_has_valid_strict_superset(valid, len(up), len(uq))
        for pm, qm in zip(*np.nonzero(valid)):
            beta = frozenset(up[i] for i in range(len(up)) if pm >> i & 1)
            gamma = frozenset(uq[i] for i in range(len(uq)) if qm >> i & 1)
            parts = [None, None, None]
            parts[s], parts[p], parts[q] = {e}, beta, gamma
            entries.append(
                OracleEntry(
                    Selection(*parts),
                    Fraction(int(counts[pm, qm]), total),
                    Fraction(int(counts[pm, qm]), int(cells[pm, qm])),
                )
            )
    return OracleResult(
        entries,
        s,
        {"predicate_sizes": (len(up), len(uq)), "subsets_per_subject": space, "budget": budget},
    )


# -- synthetic data ------------------------------------------------------------


@dataclass(frozen=True)
class PlantedBlock:
    alpha: frozenset
    beta: frozenset
    gamma: frozenset
    fill_rate: float = 1.0

    def selection(self) -> Selection:
        return Selection(self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class PlantSpec:
    """Universe sizes, planted blocks and the share of off-block cells to fill."""

    sizes: tuple[int, int, int]
    blocks: tuple = ()
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        blocks = tuple(
            b if isinstance(b, PlantedBlock) else PlantedBlock(*b) for b in self.blocks
        )
        object.__setattr__(self, "blocks", blocks)
        if not 0 <= self.noise_rate <= 1:
            raise ValueError("noise_rate must lie in [0, 1]")
        for b in blocks:
            if not 0 <= b.fill_rate <= 1:
                raise ValueError("fill_rate must lie in [0, 1]")
            for k, part in enumerate((b.alpha, b.beta, b.gamma)):
                if not part or min(part) < 0 or max(part) >= self.sizes[k]:
                    raise ValueError("planted blocks must be non-empty and inside the universes")


def _pick(rng, cells: np.ndarray, count: int) -> np.ndarray:
    if count <= 0 or len(cells) == 0:
        return cells[:0]
    order = rng.permutation(len(cells))
    return cells[np.sort(order[:count])]


def generate(spec: PlantSpec) -> tuple[TripletDataset, list[Selection]]:
    """Dataset with exactly ``floor(rate * cells)`` filled cells per block and in the noise."""
    rng = np.random.default_rng(spec.seed)
    na, nb, nc = spec.sizes
    in_block = np.zeros(spec.sizes, dtype=bool)
    chosen = []
    for b in spec.blocks:
        grid = np.array(
            [(a, bb, c) for a in sorted(b.alpha) for bb in sorted(b.beta) for c in sorted(b.gamma)],
            dtype=np.int64,
        )
        k = int(np.floor(b.fill_rate * len(grid) + 1e-9))
        chosen.append(_pick(rng, grid, k))
        in_block[grid[:, 0], grid[:, 1], grid[:, 2]] = True
    off = np.argwhere(~in_block)
    k = int(np.floor(spec.noise_rate * len(off) + 1e-9))
    chosen.append(_pick(rng, off, k))
    triplets = {tuple(int(x) for x in row) for part in chosen for row in part}
    d = TripletDataset.from_triplets(triplets, sizes=spec.sizes)
    return d, [b.selection() for b in spec.blocks]


def random_dataset(sizes: Sequence[int], density: float, rng) -> TripletDataset:
    """Independent coin flips over the full ``A x B x C`` cube."""
    cube = rng.random(tuple(sizes)) < density
    return TripletDataset.from_triplets(
        (tuple(int(x) for x in t) for t in np.argwhere(cube)), sizes=sizes
    )


# -- scoring -------------------------------------------------------------------


@dataclass
class RecallReport:
    recall: float
    precision: float
    matches: list


def _as_selection(item) -> Selection:
    if isinstance(item, MinedProposition):
        return item.selection()
    if isinstance(item, PlantedBlock):
        return item.selection()
    return item


def _jaccard(s: Selection, t: Selection) -> float:
    inter = 1
    size_s = size_t = 1
    for a, b in zip(s.as_tuple(), t.as_tuple()):
        inter *= len(a & b)
        size_s *= len(a)
        size_t *= len(b)
    union = size_s + size_t - inter
    return inter / union if union else 1.0


def recall_report(mined, ground_truth, matching: str = "exact", tau: float = 1.0) -> RecallReport:
    """Share of planted blocks matched by some mined block, and vice versa.

    ``matching`` is ``"exact"`` (identical selections) or ``"jaccard"``
    (cell-set Jaccard index at least ``tau``).  ``matches`` lists, per planted
    block, the best mined index (or ``None``) and its score.
    """
    mined = [_as_selection(m) for m in mined]
    truth = [_as_selection(g) for g in ground_truth]
    if matching == "exact":
        score = lambda a, b: 1.0 if a == b else 0.0  # noqa: E731
        threshold = 1.0
    elif matching == "jaccard":
        score, threshold = _jaccard, tau
    else:
        raise ValueError("matching must be 'exact' or 'jaccard'")
    matches = []
    hit_mined = set()
    for gi, g in enumerate(truth):
        best, best_score = None, 0.0
        for mi, m in enumerate(mined):
            sc = score(m, g)
            if sc >= threshold:
                hit_mined.add(mi)
            if sc > best_score:
                best, best_score = mi, sc
        matches.append((gi, best if best_score >= threshold else None, best_score))
    found = sum(1 for _, mi, _ in matches if mi is not None)
    recall = found / len(truth) if truth else 1.0
    precision = len(hit_mined) / len(mined) if mined else 0.0
    return RecallReport(recall, precision, matches)


# -- synthetic contact lists ---------------------------------------------------

HOSPITAL_ROLES = {"PAT": 29, "NUR": 27, "MED": 11, "ADM": 8}


def synthetic_contacts(
    seed: int = 0,
    roles: dict = HOSPITAL_ROLES,
    active_minutes: int = 1890,
    resolution: int = 20,
) -> list[tuple[int, int, int, str, str]]:
    """Ward-like contact rows ``(t, i, j, Si, Sj)`` in SocioPatterns layout.

    Staff work in small recurring teams (nurse teams, doctor rounds, desk
    staff); activity comes in episodes of a few minutes during which the
    members of one or two groups meet, with some background contacts.  The
    stream stops once ``active_minutes`` distinct minutes carry a contact.
    """
    rng = np.random.default_rng(seed)
    people = []
    next_id = 1000 + int(rng.integers(0, 100))
    for role, count in roles.items():
        for _ in range(count):
            next_id += int(rng.integers(1, 40))
            people.append((next_id, role))
    by_role = {r: [p for p, role in people if role == r] for r in roles}
    role_of = dict(people)

    def teams(members, size):
        members = list(rng.permutation(members))
        return [members[i:i + size] for i in range(0, len(members), size)]

    nurse_teams = teams(by_role.get("NUR", []), 3)
    doctor_teams = teams(by_role.get("MED", []), 4)
    admin_teams = teams(by_role.get("ADM", []), 2)
    patients = by_role.get("PAT", [])

    def pick_group():
        kind = rng.choice(["nurses", "nurses+admin", "doctors", "care", "admin"], p=[0.3, 0.15, 0.2, 0.25, 0.1])
        if kind == "nurses" and nurse_teams:
            return list(nurse_teams[rng.integers(len(nurse_teams))])
        if kind == "nurses+admin" and nurse_teams and admin_teams:
            team = nurse_teams[rng.integers(len(nurse_teams))]
            return list(team) + [admin_teams[rng.integers(len(admin_teams))][0]]
        if kind == "doctors" and doctor_teams:
            return list(doctor_teams[rng.integers(len(doctor_teams))])
        if kind == "care" and nurse_teams and patients:
            team = nurse_teams[rng.integers(len(nurse_teams))]
            nurse = team[rng.integers(len(team))]
            return [nurse] + list(rng.choice(patients, size=min(2, len(patients)), replace=False))
        pool = [p for p, _ in people]
        return list(rng.choice(pool, size=min(3, len(pool)), replace=False))

    rows = set()
    minutes = set()
    minute = 7 * 60
    slots = 60 // resolution
    while len(minutes) < active_minutes:
        length = int(rng.integers(2, 11))
        groups = [pick_group() for _ in range(1 + int(rng.random() < 0.3))]
        rate = float(rng.uniform(0.35, 0.9))
        for m in range(minute, minute + length):
            if len(minutes) >= active_minutes:
                break
            for group in groups:
                pairs = [(u, v) for k, u in enumerate(group) for v in group[k + 1:]]
                for s in range(slots):
                    t = m * 60 + s * resolution
                    for u, v in pairs:
                        if rng.random() < rate:
                            i, j = (u, v) if u < v else (v, u)
                            rows.add((t, int(i), int(j)))
                            minutes.add(m)
            if rng.random() < 0.2:
                u, v = rng.choice([p for p, _ in people], size=2, replace=False)
                i, j = (int(u), int(v)) if u < v else (int(v), int(u))
                rows.add((m * 60, i, j))
                minutes.add(m)
        minute += length + int(rng.integers(0, 6))
    return [(t, i, j, role_of[i], role_of[j]) for t, i, j in sorted(rows)]


def write_contacts(rows, path) -> None:
    """Write contact rows as whitespace-separated ``t i j Si Sj`` lines."""
    with open(path, "w") as fh:
        for row in rows:
            fh.write("\t".join(str(x) for x in row) + "\n")
