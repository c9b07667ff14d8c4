"""
Graph concepts as propositions
==============================

Disconnection, covers, domination, coloring and cliques, each checked by
evaluating the propositions that define it.  Every verdict lists the
propositions behind it.
"""

from propmine import (
    PairDataset,
    Partitioning,
    Selection,
    TripletDataset,
    find_disconnection,
    format_proposition,
    is_clique,
    is_disconnected,
    is_dominating_set,
    is_k_coloring,
    is_vertex_cover,
)

# two triangles with no edge between them
g = PairDataset.from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])

verdict = is_disconnected(g, {0, 1, 2})
for check in verdict.checks:
    print(format_proposition(check.proposition), "->", check.holds)
print("a disconnecting cut:", sorted(find_disconnection(g).alpha))

print("clique {0,1,2}:", bool(is_clique(g, {0, 1, 2})))
print("clique {0,1,3}:", bool(is_clique(g, {0, 1, 3})))
print("vertex cover {0,1,3,4}:", bool(is_vertex_cover(g, {0, 1, 3, 4})))
print("dominating {0,3}:", bool(is_dominating_set(g, {0, 3})))
print("3-coloring:", bool(is_k_coloring(g, [{0, 3}, {1, 4}, {2, 5}])))

# the triplet forms work on (a, b, c) data directly
cube = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
far = [(a, b, c) for a in (2, 3) for b in (2, 3) for c in (2, 3)]
d = TripletDataset.from_triplets(cube + far, sizes=(4, 4, 4))
s = Selection({0, 1}, {0, 1}, {0, 1})
print("triplet disconnection:", bool(is_disconnected(d, s)), "with", len(is_disconnected(d, s).checks), "checks")
print("triplet clique:", bool(is_clique(d, s)))
colors = Partitioning([{0, 1}, {2, 3}], [{2, 3}, {0, 1}], [{0, 1}, {2, 3}])
print("triplet 2-coloring:", bool(is_k_coloring(d, colors)))
