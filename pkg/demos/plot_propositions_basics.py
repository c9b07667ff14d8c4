"""
Categorical propositions on a toy dataset
=========================================

Build a tiny triplet dataset, state a few propositions about it and check
them, first with quantifiers, then with coverage and density thresholds.
"""

from propmine import (
    And,
    Atom,
    Proposition,
    Quantifier,
    Selection,
    Thresholded,
    TripletDataset,
    Xor,
    bin_histogram,
    block,
    evaluate,
    format_proposition,
    parse_proposition,
)

# who talked to whom, and on which channel
rows = [
    ("ann", "bob", "mail"), ("ann", "bob", "chat"),
    ("ann", "cid", "mail"), ("ann", "cid", "chat"),
    ("bob", "cid", "mail"), ("dan", "eve", "phone"),
]
d = TripletDataset.from_records(rows)
print(d.sizes, "universes,", len(d), "triplets")

# selections are index sets; from_labels resolves names
s = Selection.from_labels(d, ["ann"], ["bob", "cid"], ["mail", "chat"])

# the 8-bin histogram shows where triplets fall relative to the selection
for key, count in sorted(bin_histogram(d, s).counts.items(), reverse=True):
    print("in (alpha, beta, gamma) =", key, "->", count)

# quantified statements
everything = Proposition("a", s.alpha, block("a", s.beta, s.gamma), Quantifier.ALL)
print(format_proposition(everything, d), "=>", evaluate(d, everything))

dan = Selection.from_labels(d, ["dan"], [], []).alpha
nothing = Proposition("a", dan, block("a", s.beta, s.gamma), Quantifier.NO)
print(format_proposition(nothing, d), "=>", evaluate(d, nothing))

# xor holds when exactly one side does
odd = Proposition("a", s.alpha, Xor(Atom("b", s.beta), Atom("c", s.gamma)), Quantifier.SOME)
print(format_proposition(odd, d), "=>", evaluate(d, odd))

# thresholded form reports exact coverage x and density y
senders = Selection.from_labels(d, ["ann", "bob"], [], []).alpha
loose = Proposition("a", senders, block("a", s.beta, s.gamma), Thresholded(0.7, 0.5))
report = evaluate(d, loose)
print(format_proposition(loose, d), "=> x =", report.x_actual, "y =", report.y_actual, "holds:", report.holds)

# text round trip, labels resolved against the dataset
p = parse_proposition("All A{ann} are B{bob,cid} and not C{phone}", d)
assert isinstance(p.predicate, And)
print(format_proposition(p, d), "=>", evaluate(d, p))
