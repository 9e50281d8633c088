"""wellconn: audit and repair the edge-connectivity of graph clusterings.

The package loads tab-separated edgelists and clustering files, classifies
clusters as well connected, poorly connected, or disconnected against a
configurable minimum-cut bound, repairs clusterings by splitting along
connected components (cc), minimum cuts (wcc), or cuts plus re-clustering
(cm), scores clusterings against ground truth (NMI, ARI, AGRI, RMI), and
accounts for the blockmodel description-length term that penalizes block
counts.
"""

__version__ = "0.1.0"

from .audit import (
    AuditDelta,
    ClusterAudit,
    ConnectivityReport,
    audit_delta,
    connectivity_audit,
)
from .clustering import (
    Clustering,
    ClusteringLoadResult,
    ClusterStats,
    ThresholdSpec,
    DEFAULT_THRESHOLD,
    cluster_stats,
    is_refinement,
    is_well_connected,
    load_clustering,
    node_coverage,
    read_membership,
    write_clustering,
)
from .dl import (
    DLComponents,
    DLDiffReport,
    compose_dl,
    dl_diff,
    edge_count_prior_cost,
    load_components,
    pe_for_clustering,
    save_components,
)
from .errors import (
    ClusteringParseError,
    ContractViolation,
    EdgelistParseError,
    ExternalClustererError,
    TreatmentError,
    UnitMismatch,
    UniverseMismatch,
    WellconnError,
)
from .gadgets import GadgetSpec, generate, parse_sizes
from .graph import (
    Graph,
    IngestReport,
    connected_components,
    induced_subgraph,
    load_edgelist,
    write_edgelist,
)
from .metrics import ContingencyTable, agri, ari, contingency, nmi, rmi
from .mincut import CutResult, brute_force_min_cut, global_min_cut
from .treatments import (
    ComponentsClusterer,
    ExternalClusterer,
    IdentityClusterer,
    TreatmentTrace,
    cc_treatment,
    cc_treatment_with_trace,
    cm_treatment,
    parse_clusterer,
    wcc_treatment,
)

__all__ = [
    "__version__",
    "AuditDelta",
    "ClusterAudit",
    "ClusterStats",
    "Clustering",
    "ClusteringLoadResult",
    "ClusteringParseError",
    "ComponentsClusterer",
    "ConnectivityReport",
    "ContingencyTable",
    "ContractViolation",
    "CutResult",
    "DEFAULT_THRESHOLD",
    "DLComponents",
    "DLDiffReport",
    "EdgelistParseError",
    "ExternalClusterer",
    "ExternalClustererError",
    "GadgetSpec",
    "Graph",
    "IdentityClusterer",
    "IngestReport",
    "ThresholdSpec",
    "TreatmentError",
    "TreatmentTrace",
    "UnitMismatch",
    "UniverseMismatch",
    "WellconnError",
    "agri",
    "ari",
    "audit_delta",
    "brute_force_min_cut",
    "cc_treatment",
    "cc_treatment_with_trace",
    "cluster_stats",
    "cm_treatment",
    "compose_dl",
    "connected_components",
    "connectivity_audit",
    "contingency",
    "dl_diff",
    "edge_count_prior_cost",
    "generate",
    "global_min_cut",
    "induced_subgraph",
    "is_refinement",
    "is_well_connected",
    "load_clustering",
    "load_components",
    "load_edgelist",
    "nmi",
    "node_coverage",
    "parse_clusterer",
    "parse_sizes",
    "pe_for_clustering",
    "read_membership",
    "rmi",
    "save_components",
    "wcc_treatment",
    "write_clustering",
    "write_edgelist",
]
