"""
Time-resolved contacts in a ward
================================

Generate a ward-like contact list in SocioPatterns layout, ingest it with
one-minute bins and mine who meets whom, minute by minute.  Point the
script at a real ``t i j Si Sj`` file to run it on recorded data.
"""

import collections
import sys
import tempfile
import time
from pathlib import Path

from propmine import IngestSpec, MinerConfig, ingest, mine, result_record, synthetic_contacts
from propmine.oracle import write_contacts

if len(sys.argv) > 1:
    path = Path(sys.argv[1])
else:
    path = Path(tempfile.mkdtemp()) / "ward.dat"
    write_contacts(synthetic_contacts(seed=0), path)

d = ingest(path, IngestSpec(format="tij", time_bin_seconds=60))
print(len(d.universes[0]), "persons,", len(d.universes[2]), "active minutes,", len(d), "triplets")

# subject = time; persons share a universe, so self pairs leave the density
cfg = MinerConfig(x_min=0.7, y_min=0.5, subject_dim="c", loopless=True)
start = time.perf_counter()
result = mine(d, cfg)
print(f"{result.predicate_count} predicates, {len(result.propositions)} propositions "
      f"in {time.perf_counter() - start:.1f}s")

# the longest-lasting groups and who is in them
for m in result.propositions[:5]:
    rec = result_record(m, d)
    roles = collections.Counter(rec["predicate_roles"][0])
    print(f"{rec['subject_size']:3d} minutes, x={rec['x']:.2f} y={rec['y']:.2f}:",
          ", ".join(f"{n} {r}" for r, n in sorted(roles.items())))
