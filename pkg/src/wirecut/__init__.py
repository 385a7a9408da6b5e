"""Cut gate circuits into small subcircuits, run the pieces, reassemble.

The workflow is: find a cheap set of wire cuts (cutsearch), split the
circuit and enumerate per-cut variants (variants), simulate the variants
(sim), then rebuild the output distribution in full (reconstruct) or
recursively in bins (dd). pipeline wires the stages together and cli puts
a command line on top.
"""

from . import errors
from .bench import (
    adder_wires,
    default_aqft_degree,
    gen_adder,
    gen_aqft,
    gen_bv,
    gen_supremacy,
)
from .circuit import (
    Circuit,
    CircuitDag,
    DagEdge,
    Gate,
    build_dag,
    expand_ccx,
    is_fully_connected,
    parse_circuit,
    serialize_circuit,
)
from .cutsearch import (
    DEFAULT_NODE_BUDGET,
    CutConstraints,
    CutSolution,
    clustering_objective,
    enumerate_all_cuts,
    find_cuts,
    solution_from_assignment,
)
from .dd import (
    DdBin,
    DdConfig,
    DdRecursion,
    DdResult,
    bin_lookup,
    dd_run,
    select_active,
)
from .metrics import ComparisonReport, chi_square, compare, oracle_compare
from .pipeline import (
    RunConfig,
    config_from_mapping,
    load_config,
    run_pipeline,
    scaling_report,
)
from .reconstruct import (
    FD_QUBIT_LIMIT,
    FdResult,
    ReconstructionPlan,
    build_plan,
    build_tensors,
    contract_all,
    estimate_cost,
    reconstruct_fd,
    sub_roles,
)
from .sim import (
    DEFAULT_QUBIT_LIMIT,
    ExactBackend,
    RandomBackend,
    ShotsBackend,
    bin_vector,
    make_backend,
    probabilities,
    sample_counts,
    statevector,
)
from .variants import (
    BASIS_LETTERS,
    INIT_LABELS,
    MEAS_LABELS,
    AttributedTensor,
    Port,
    SplitCircuit,
    Subcircuit,
    SubcircuitVariant,
    WireCut,
    attribute,
    basis_assignments,
    enumerate_variants,
    port_resolved_tensor,
    split,
    variant_index,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Circuit",
    "Gate",
    "CircuitDag",
    "DagEdge",
    "parse_circuit",
    "serialize_circuit",
    "build_dag",
    "expand_ccx",
    "is_fully_connected",
    "gen_bv",
    "gen_adder",
    "adder_wires",
    "gen_aqft",
    "default_aqft_degree",
    "gen_supremacy",
    "CutConstraints",
    "CutSolution",
    "clustering_objective",
    "find_cuts",
    "enumerate_all_cuts",
    "solution_from_assignment",
    "DEFAULT_NODE_BUDGET",
    "Port",
    "WireCut",
    "Subcircuit",
    "SubcircuitVariant",
    "SplitCircuit",
    "AttributedTensor",
    "split",
    "enumerate_variants",
    "variant_index",
    "attribute",
    "port_resolved_tensor",
    "basis_assignments",
    "INIT_LABELS",
    "MEAS_LABELS",
    "BASIS_LETTERS",
    "statevector",
    "probabilities",
    "sample_counts",
    "bin_vector",
    "ExactBackend",
    "ShotsBackend",
    "RandomBackend",
    "make_backend",
    "DEFAULT_QUBIT_LIMIT",
    "ReconstructionPlan",
    "FdResult",
    "build_plan",
    "build_tensors",
    "estimate_cost",
    "reconstruct_fd",
    "contract_all",
    "sub_roles",
    "FD_QUBIT_LIMIT",
    "DdConfig",
    "DdBin",
    "DdRecursion",
    "DdResult",
    "dd_run",
    "bin_lookup",
    "select_active",
    "chi_square",
    "compare",
    "oracle_compare",
    "ComparisonReport",
    "RunConfig",
    "run_pipeline",
    "scaling_report",
    "load_config",
    "config_from_mapping",
    "__version__",
]
