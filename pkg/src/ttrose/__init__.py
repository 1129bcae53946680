"""Train track calculus on rose graphs.

Edge-path combinatorics, rose self-maps with Perron-Frobenius analysis,
Whitehead graphs and rotationless index, Nielsen-path certification,
Stallings fold decompositions with unmarked-representative sets, and the
lone-axis family with its counting experiments.
"""

from .words import parse_path, path_str, reverse_path, tighten, turns_of
from .rosemap import RoseMap, MapParseError, compose, compose_all, parse_map, power
from .spectral import (
    SpectralResult,
    char_poly,
    is_primitive,
    pf_eigenvalue,
    pf_root_oracle,
)
from .whitehead import (
    WhiteheadGraph,
    combined_taken_turns,
    ideal_whitehead_graph,
    is_legal,
    local_whitehead_graph,
    periodic_directions,
    prenull_turns,
    rotationless_index,
    stable_whitehead_graph,
    t_infinity,
    taken_turns,
)
from .nielsen import (
    INPCandidate,
    PNPFreeCertificate,
    certify_pnp_free,
    eigen_lengths,
    factorization_pnp_certifier,
    unfolding_inp_search,
)
from .folds import (
    FoldSequence,
    UnmarkedRep,
    canonical_form,
    fold_count_report,
    stallings_decomposition,
    unmarked_equivalent,
    unmarked_representatives,
)
from .family import (
    Certificate,
    FullWord,
    build_family_map,
    certify,
    certify_map,
    enumerate_full_words,
    gen_elementary,
    gen_g12_1,
    gen_gw,
    is_full,
    sample_full_words,
    wrap_word,
)

__version__ = "0.1.0"
