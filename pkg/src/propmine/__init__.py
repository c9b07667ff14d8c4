"""Categorical propositions over (a, b, c) triplet datasets.

The package answers questions of the form "do the triplets of subject S
fall in predicate P?" in two ways: classical quantifiers (All / Some / No)
and thresholded statements "x of S are y-dense in P".  On top of that it
provides graph-concept verifiers restated as propositions, a region-growing
miner, and a brute-force oracle for small instances.
"""

from .concepts import (
    PairDataset,
    Partitioning,
    Verdict,
    find_disconnection,
    is_clique,
    is_cluster,
    is_disconnected,
    is_dominating_set,
    is_k_coloring,
    is_separating_set,
    is_vertex_cover,
)
from .dataset import (
    BinHistogram,
    DensityOptions,
    Dim,
    Selection,
    TripletDataset,
    bin_histogram,
    coverage_x,
    density_y,
    induced_subdataset,
    project,
)
from .errors import *  # noqa: F401,F403
from .io import IngestSpec, ingest, read_results, result_record, write_results
from .miner import (
    MinedProposition,
    MinerConfig,
    Region,
    get_predicates,
    get_propositions,
    grow_region,
    merge_subjects,
    mine,
)
from .oracle import (
    PlantSpec,
    PlantedBlock,
    enumerate_all,
    generate,
    random_dataset,
    recall_report,
    synthetic_contacts,
)
from .propositions import (
    And,
    Atom,
    Not,
    Or,
    Proposition,
    Quantified,
    Quantifier,
    Thresholded,
    Xor,
    block,
    evaluate,
    evaluate_quantified,
    evaluate_thresholded,
    format_proposition,
    parse_proposition,
    satisfies_predicate,
)

__version__ = "0.1.0"
