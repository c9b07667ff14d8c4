"""Workloads behind the acceptance criteria.

Each ``criterion_N`` function runs one workload from fixed seeds and returns
an :class:`Outcome` whose ``digest`` hashes every output it produced.  The
determinism criterion reruns the workloads in a fresh interpreter and
compares digests, so this module is also runnable::

    python -m tests.acceptance_runs 1 2 3
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from propmine.concepts import (
    PairDataset,
    is_clique,
    is_disconnected,
    is_dominating_set,
    is_k_coloring,
    is_vertex_cover,
)
from propmine.dataset import Dim, TripletDataset
from propmine.errors import InternalInvariantError
from propmine.io import IngestSpec, ingest, result_record
from propmine.miner import MinerConfig, Region, merge_subjects, mine
from propmine.oracle import (
    PlantedBlock,
    PlantSpec,
    enumerate_all,
    generate,
    random_dataset,
    recall_report,
    synthetic_contacts,
    write_contacts,
)
from propmine.propositions import evaluate_thresholded, format_proposition

from . import graph_reference as ref

REFERENCE_PREDICATES = 1456
HOSPITAL_ENV = "PROPMINE_HOSPITAL_FILE"


@dataclass
class Outcome:
    ok: bool
    detail: str
    digest: str
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)


class _Hasher:
    def __init__(self):
        self._h = hashlib.sha256()

    def add(self, *parts):
        self._h.update(("\t".join(str(p) for p in parts) + "\n").encode())

    def hexdigest(self):
        return self._h.hexdigest()


def _threshold(rng) -> Fraction:
    # two-decimal thresholds in (0, 1]
    return Fraction(int(rng.integers(1, 101)), 100)


def _record_lines(result, d, h: _Hasher):
    for m in result.propositions:
        h.add(format_proposition(m.to_proposition(result.config), d), m.x_actual, m.y_actual,
              sorted(m.per_subject.items()))


# -- 1. soundness --------------------------------------------------------------

def criterion_1(n=1000, seed=1):
    rng = np.random.default_rng(seed)
    h = _Hasher()
    checked = 0
    bad = []
    start = time.perf_counter()
    for i in range(n):
        sizes = tuple(int(s) for s in rng.integers(1, 13, 3))
        d = random_dataset(sizes, float(rng.random()), rng)
        cfg = MinerConfig(x_min=_threshold(rng), y_min=_threshold(rng), subject_dim=int(rng.integers(3)))
        result = mine(d, cfg)
        _record_lines(result, d, h)
        for m in result.propositions:
            rep = evaluate_thresholded(d, m.to_proposition(cfg), cfg.density_options)
            checked += 1
            if not (rep.holds and rep.x_actual == m.x_actual and rep.y_actual == m.y_actual
                    and rep.x_actual >= cfg.x_min and rep.y_actual >= cfg.y_min):
                bad.append((i, format_proposition(m.to_proposition(cfg))))
    secs = time.perf_counter() - start
    ok = not bad and secs < 120
    detail = f"{n} datasets, {checked} propositions re-validated, {len(bad)} unsound, {secs:.1f}s (limit 120s)"
    return Outcome(ok, detail, h.hexdigest(), secs, {"unsound": bad[:5]})


# -- 2. oracle containment ------------------------------------------------------

def criterion_2(n=200, seed=2):
    rng = np.random.default_rng(seed)
    h = _Hasher()
    mined_pairs = 0
    misses = []
    start = time.perf_counter()
    for i in range(n):
        sizes = tuple(int(s) for s in rng.integers(1, 9, 3))
        d = random_dataset(sizes, float(rng.random()), rng)
        cfg = MinerConfig(x_min=_threshold(rng), y_min=_threshold(rng), subject_dim=int(rng.integers(3)))
        oracle = enumerate_all(d, cfg).pairs()
        result = mine(d, cfg)
        _record_lines(result, d, h)
        h.add("oracle", len(oracle))
        for m in result.propositions:
            for e in sorted(m.subject):
                mined_pairs += 1
                if (e, m.region.beta, m.region.gamma) not in oracle:
                    misses.append((i, e))
    secs = time.perf_counter() - start
    ok = not misses and secs < 300
    detail = f"{n} datasets, {mined_pairs} mined (subject, block) pairs, {len(misses)} outside oracle, {secs:.1f}s (limit 300s)"
    return Outcome(ok, detail, h.hexdigest(), secs, {"misses": misses[:5]})


# -- 3. merge preservation ------------------------------------------------------

def _merge_trial(rng):
    """Subjects sharing one block, each passing thresholds on its own."""
    p, q = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    cells = p * q
    x_min, y_min = _threshold(rng), _threshold(rng)
    k = int(rng.integers(2, 6))
    block_cells = [(b, c) for b in range(p) for c in range(q)]
    triplets = []
    regions = {}
    for a in range(k):
        need_in = -(-y_min.numerator * cells // y_min.denominator)
        inside = int(rng.integers(max(need_in, 1), cells + 1))
        # outside triplets allowed while inside / (inside + outside) >= x_min
        max_out = (inside * x_min.denominator - inside * x_min.numerator) // x_min.numerator
        outside = int(rng.integers(0, min(max_out, 6) + 1))
        order = rng.permutation(cells)[:inside]
        for idx in sorted(order):
            b, c = block_cells[idx]
            triplets.append((a, b, c))
        for j in range(outside):
            triplets.append((a, p + j, q + j))
        regions[a] = [Region(frozenset(range(p)), frozenset(range(q)), inside, cells)]
    d = TripletDataset.from_triplets(triplets, sizes=(k, p + 6, q + 6))
    cfg = MinerConfig(x_min=x_min, y_min=y_min)
    return d, regions, cfg


def criterion_3(n=100_000, seed=3):
    rng = np.random.default_rng(seed)
    h = _Hasher()
    failures = 0
    start = time.perf_counter()
    for _ in range(n):
        d, regions, cfg = _merge_trial(rng)
        try:
            (merged,) = merge_subjects(d, regions, cfg)
        except InternalInvariantError:
            failures += 1
            continue
        if merged.x_actual < cfg.x_min or merged.y_actual < cfg.y_min or len(merged.subject) != len(regions):
            failures += 1
        h.add(merged.x_actual, merged.y_actual)
    secs = time.perf_counter() - start
    detail = f"{n} trials, {failures} counterexamples, {secs:.1f}s"
    return Outcome(failures == 0, detail, h.hexdigest(), secs)


# -- 4. planted recovery ---------------------------------------------------------

def _planted_spec(rng, fill, noise, seed):
    sizes = tuple(int(s) for s in rng.integers(10, 21, 3))
    n_blocks = int(rng.integers(1, 4))
    # blocks draw from disjoint shares of each universe
    orders = [rng.permutation(n) for n in sizes]
    blocks = []
    for i in range(n_blocks):
        parts = []
        for k in range(3):
            share = orders[k][i::n_blocks]
            width = int(rng.integers(2, min(5, len(share)) + 1))
            parts.append(frozenset(int(e) for e in share[:width]))
        blocks.append(PlantedBlock(*parts, fill_rate=fill))
    return PlantSpec(sizes, tuple(blocks), noise, seed)


def criterion_4(n=100, n_noisy=100, seed=4):
    rng = np.random.default_rng(seed)
    h = _Hasher()
    clean = []
    start = time.perf_counter()
    for i in range(n):
        spec = _planted_spec(rng, 1.0, 0.0, seed * 1000 + i)
        d, truth = generate(spec)
        result = mine(d, MinerConfig())
        _record_lines(result, d, h)
        clean.append(recall_report(result.propositions, truth).recall)
    # noisy regime: default thresholds, then a looser coverage bound
    noisy = {("exact", 0.7): [], ("jaccard", 0.7): [], ("exact", 0.3): [], ("jaccard", 0.3): []}
    for i in range(n_noisy):
        spec = _planted_spec(rng, 0.8, 0.05, seed * 1000 + n + i)
        d, truth = generate(spec)
        for x_min in (0.7, 0.3):
            result = mine(d, MinerConfig(x_min=x_min))
            _record_lines(result, d, h)
            noisy[("exact", x_min)].append(recall_report(result.propositions, truth).recall)
            noisy[("jaccard", x_min)].append(recall_report(result.propositions, truth, "jaccard", 0.5).recall)
    means = {f"{m}@x_min={x}": round(float(np.mean(v)), 3) for (m, x), v in noisy.items()}
    secs = time.perf_counter() - start
    worst = min(clean)
    detail = (f"noiseless recall min {worst:.3f} over {n} instances; noisy mean recall "
              + ", ".join(f"{k} {v:.3f}" for k, v in means.items()) + f"; {secs:.1f}s")
    return Outcome(worst == 1.0, detail, h.hexdigest(), secs, means)


# -- 5. graph concepts -------------------------------------------------------------

def _greedy_clique(adj, rng):
    order = sorted(adj)
    rng.shuffle(order)
    clique = set()
    for v in order:
        if all(v in adj[u] for u in clique):
            clique.add(v)
    return clique


def _two_clique_fixture():
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    g = PairDataset.from_edges(6, edges)
    left, right = {0, 1, 2}, {3, 4, 5}
    return bool(is_disconnected(g, left) and is_disconnected(g, right)
                and is_clique(g, left) and is_clique(g, right))


def criterion_5(n=500, seed=5):
    rng = random.Random(seed)
    h = _Hasher()
    mismatches = []
    checks = 0
    start = time.perf_counter()
    for i in range(n):
        nv, edges = ref.random_graph(rng, max_n=50)
        g = PairDataset.from_edges(nv, edges)
        adj = ref.adjacency(nv, edges)
        subsets = [ref.random_subset(rng, nv) for _ in range(3)]
        comps = ref.components(adj)
        if len(comps) > 1:
            subsets.append(set().union(*comps[: len(comps) // 2 or 1]))
        subsets.append(_greedy_clique(adj, rng))
        cover = {v for v in adj if adj[v]} - {rng.randrange(nv)}
        subsets.append(cover)
        for s in subsets:
            pairs = [
                ("vertex_cover", bool(is_vertex_cover(g, s)), ref.is_vertex_cover(adj, s)),
                ("dominating", bool(is_dominating_set(g, s)), ref.is_dominating(adj, s)),
            ]
            if s:
                pairs.append(("clique", bool(is_clique(g, s)), ref.is_clique(adj, s)))
            if 0 < len(s) < nv:
                pairs.append(("disconnected", bool(is_disconnected(g, s)), ref.is_cut(adj, s)))
            for name, got, want in pairs:
                checks += 1
                h.add(i, name, got)
                if got != want:
                    mismatches.append((i, name, sorted(s)))
        k = rng.randint(1, 4)
        classes = [set() for _ in range(k)]
        for v in range(nv):
            classes[rng.randrange(k)].add(v)
        classes = [c for c in classes if c]
        # also a proper greedy coloring, so positive cases occur
        greedy = {}
        for v in range(nv):
            used = {greedy[u] for u in adj[v] if u in greedy}
            greedy[v] = min(set(range(nv)) - used)
        proper = [set(v for v in greedy if greedy[v] == c) for c in sorted(set(greedy.values()))]
        for parts in (classes, proper):
            checks += 1
            got, want = bool(is_k_coloring(g, parts)), ref.is_proper_coloring(adj, parts)
            h.add(i, "coloring", got)
            if got != want:
                mismatches.append((i, "coloring", len(parts)))
    fixture = _two_clique_fixture()
    secs = time.perf_counter() - start
    detail = f"{n} graphs, {checks} verdicts, {len(mismatches)} mismatches, two-clique fixture {'ok' if fixture else 'FAILED'}, {secs:.1f}s"
    return Outcome(not mismatches and fixture, detail, h.hexdigest(), secs, {"mismatches": mismatches[:5]})


# -- 6. hospital-scale run -----------------------------------------------------------

def _hospital_file(workdir: Path) -> tuple[Path, bool]:
    real = os.environ.get(HOSPITAL_ENV)
    if real and Path(real).exists():
        return Path(real), True
    path = workdir / "synthetic_hospital.dat"
    write_contacts(synthetic_contacts(seed=0), path)
    return path, False


def hospital_run(path: Path):
    d = ingest(path, IngestSpec(format="tij", time_bin_seconds=60))
    cfg = MinerConfig(x_min=Fraction(7, 10), y_min=Fraction(1, 2), subject_dim=Dim.C, loopless=True)
    start = time.perf_counter()
    result = mine(d, cfg)
    secs = time.perf_counter() - start
    return d, cfg, result, secs


def criterion_6(seed=6):
    with tempfile.TemporaryDirectory() as tmp:
        path, real = _hospital_file(Path(tmp))
        d, cfg, result, secs = hospital_run(path)
    h = _Hasher()
    unsound = 0
    for m in result.propositions:
        rep = evaluate_thresholded(d, m.to_proposition(cfg), cfg.density_options)
        if not rep.holds or rep.x_actual != m.x_actual or rep.y_actual != m.y_actual:
            unsound += 1
        h.add(json.dumps(result_record(m, d), sort_keys=False))
    ok = bool(result.propositions) and unsound == 0 and secs < 600
    source = "real file" if real else "synthetic SocioPatterns-format file"
    detail = (f"{source}: {len(d.universes[0])} persons, {len(d.universes[2])} minute bins, {len(d)} triplets; "
              f"{result.predicate_count} predicates pre-merge, {len(result.propositions)} propositions post-merge "
              f"(reference figure {REFERENCE_PREDICATES}); {unsound} unsound; {secs:.1f}s (limit 600s)")
    return Outcome(ok, detail, h.hexdigest(), secs,
                   {"real": real, "pre_merge": result.predicate_count, "post_merge": len(result.propositions)})


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6}


def main(argv):
    numbers = [int(a) for a in argv] or sorted(CRITERIA)
    print(json.dumps({str(k): CRITERIA[k]().digest for k in numbers}))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
