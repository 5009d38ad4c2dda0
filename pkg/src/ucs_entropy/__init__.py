"""Invariance entropy and invariance feedback entropy of finite uncertain control systems."""

from .cover import (
    CoverDigraph,
    CoverRinvResult,
    Cycle,
    EntropyBounds,
    IfeResult,
    InvariantCover,
    MmcwResult,
    QuasiCheck,
    RefinementResult,
    WmRow,
    atom_refinement,
    build_cover,
    coarse_cover,
    cover_digraph,
    cover_rinv,
    derived_partition,
    entropy_bounds,
    ife,
    is_quasi_invariant_partition,
    mmcw,
    refinement_search,
    wm_entropy_terms,
)
from .errors import *  # noqa: F401,F403
from .graphnum import (
    CountMatrix,
    Interval,
    RadiusEnclosure,
    mat_mul,
    mat_pow,
    norm_l1,
    norm_linf,
    radius_is_one,
    scc,
    simple_cycles,
    spectral_radius,
)
from .logvalue import LogValue
from .spanning import (
    AdmissibleTree,
    CoverReport,
    EntropyReport,
    FamilySet,
    HinvExact,
    IdentityCheck,
    RinvResult,
    SpanningCertificate,
    admissible_matrix,
    check_admissible,
    check_conditions,
    entropy_report,
    enumerate_families,
    finite_n_identity_check,
    h_inv_exact,
    is_admissible,
    r_inv,
    verify_certificate,
)
from .system import (
    ConjugacyPair,
    InvarianceCheck,
    UncertainSystem,
    is_controlled_invariant,
    is_semi_conjugacy,
    q_u,
)
from .textio import (
    ParsedCover,
    SourceDiagnostic,
    Table,
    emit_tsv,
    fixture_path,
    load_cover,
    load_system,
    parse_cover,
    parse_system,
    serialize_cover,
    serialize_system,
)

__version__ = "0.1.0"
