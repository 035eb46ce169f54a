"""Partial network decomposition of multiplex shortest-path efficiency."""

from .errors import PNDError, PNDWarning
from .graph import (
    UNREACHABLE,
    Graph,
    all_pairs_distances,
    build_graph,
    characteristic_path_length,
    clustering_coefficient,
    delta_efficiency,
    efficiency_matrix,
    global_efficiency,
    union_graphs,
)
from .io import (
    consensus_network,
    density_match_threshold,
    load_coordinates,
    load_multiplex,
    load_weighted_matrix,
    merge_layers,
    save_multiplex,
    split_by_distance,
    write_result_bundle,
)
from .lattice import (
    Antichain,
    AntichainLattice,
    AtomVector,
    Character,
    Multiplex,
    PNDResult,
    atoms_closed_form,
    build_lattice,
    classify_pair,
    decompose_network,
    decompose_pair_two_layer,
    dominant_character_general,
    moebius_atoms,
    redundancy_profile,
)
from .nullmodels import (
    SWPReport,
    SweepRecord,
    er_sweep,
    erdos_renyi,
    maslov_sneppen_rewire,
    partial_rewire,
    rewire_sweep,
    ring_lattice,
    small_world_propensity,
)
from .pathstats import (
    LengthProfile,
    ModeNetworks,
    ModeProportions,
    character_keys,
    edgewise_networks,
    mode_proportions,
    proportions_by_length,
)
from .stats import (
    PairedSample,
    StatReport,
    empirical_p_vs_population,
    hedges_g,
    null_decompositions,
    permutation_paired_test,
)

__version__ = "0.1.0"
