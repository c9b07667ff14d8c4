import itertools

import pytest
from hypothesis import strategies as st

from propmine.concepts import PairDataset
from propmine.dataset import Selection, TripletDataset

ACCEPTANCE_LINES = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = marker.args
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        detail = getattr(item, "acceptance_detail", "")
        ACCEPTANCE_LINES.append((number, f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else "")))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES, key=lambda item: str(item[0])):
        terminalreporter.write_line(line)


@st.composite
def datasets(draw, max_size=4, min_size=1, shared_ab=False):
    """Small random datasets over ``range`` universes."""
    if shared_ab:
        n = draw(st.integers(min_size, max_size))
        sizes = (n, n, draw(st.integers(min_size, max_size)))
    else:
        sizes = tuple(draw(st.integers(min_size, max_size)) for _ in range(3))
    cube = list(itertools.product(*(range(n) for n in sizes)))
    triplets = draw(st.sets(st.sampled_from(cube), max_size=len(cube)))
    return TripletDataset.from_triplets(triplets, sizes=sizes, shared_ab=shared_ab)


@st.composite
def dataset_and_selection(draw, max_size=4):
    d = draw(datasets(max_size=max_size))
    parts = [draw(st.sets(st.sampled_from(sorted(u)))) for u in d.universes]
    return d, Selection(*parts)


@pytest.fixture
def confined_block():
    """Every alpha-triplet lies in beta x gamma; the rest spread over other bins.

    Universes: A = {0,1,2}, B = {0,1,2}, C = {0,1}; alpha = {0}, beta = {0,1},
    gamma = {0}.
    """
    triplets = [
        (0, 0, 0), (0, 1, 0),            # alpha, beta, gamma
        (1, 0, 0), (2, 1, 0),            # not alpha, beta, gamma
        (1, 2, 0),                       # not alpha, not beta, gamma
        (1, 2, 1), (2, 2, 1),            # not alpha, not beta, not gamma
        (2, 0, 1),                       # not alpha, beta, not gamma
    ]
    d = TripletDataset.from_triplets(triplets, sizes=(3, 3, 2))
    return d, Selection({0}, {0, 1}, {0})


@pytest.fixture
def two_cliques():
    """Two disjoint triangles {0,1,2} and {3,4,5}."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    return PairDataset.from_edges(6, edges)
