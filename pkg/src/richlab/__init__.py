"""richlab: a reproducible simulation lab for one- and two-type Richardson growth.

Growth is realized as first-passage percolation with exponential passage times
on finite windows of the integer lattice.  All randomness is counter-based and
keyed by (master_seed, replication_index, edge, clock), so every run is a pure
function of its parameters and pathwise couplings across domains, source sets,
restrictions and rates are exactly checkable.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    ContractViolation,
    DomainError,
    RichlabError,
    UnsupportedError,
)
from .lattice import (
    Cone,
    Domain,
    Edge,
    Empty,
    Explicit,
    HalfAxisMinusOrigin,
    HyperplaneMinusOrigin,
    Origin,
    Region,
    SeedConfig,
    SignedPermutation,
    apply_symmetry,
    axis_point,
    canonical_edge,
    dihedral_symmetries,
    enumerate_seeds,
    neighbors,
    parse_region,
    region_to_text,
)
from .weights import SINGLE_CLOCK, TWO_CLOCK, WeightField, uniform01
from .fpp import (
    DescentCounts,
    PassageResult,
    RecordTrace,
    descent_counts,
    first_hit_time,
    hampered_front,
    passage_time_to_set,
    passage_times,
    record_trace,
    restricted_passage_times,
)
from .competition import (
    CouplingReport,
    EventLog,
    InfectionMap,
    RunOutcome,
    StopRule,
    coupled_pair,
    run_two_type,
    run_two_type_markov,
)
from .estimators import (
    Estimate,
    ShapeSnapshot,
    coexistence_scan,
    convex_hull,
    estimate_mu,
    estimate_mu_hampered,
    estimate_mu_hyperplane,
    ks_two_sample,
    mean_estimate,
    record_probability,
    record_rates,
    shape_check,
    shape_snapshot,
    survival_curve,
    wilson_estimate,
)
