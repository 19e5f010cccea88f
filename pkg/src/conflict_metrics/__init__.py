"""Inconsistency metrics for propositional knowledge bases.

Pipeline: parse a KB, translate it to group-tagged CNF, enumerate its
MUSes and MSSes with an assumption-based SAT oracle, decompose it along
the MUS graph, and compute the measure suite (MUS count, MSS-based scores,
minimum hitting set, distribution index), with the distribution index
solved as a maximum closed set packing by exact solvers or exported as 0/1
ILP / weighted-CNF encodings.
"""

from .errors import (
    ConflictMetricsError,
    FormulaParseError,
    GcnfFormatError,
    KbParseError,
    MusImportError,
    ResourceLimitError,
)
from .formulas import (
    FALSE,
    TRUE,
    And,
    Const,
    Formula,
    Implies,
    IndexSet,
    KnowledgeBase,
    Not,
    Or,
    Var,
    eval_formula,
    format_formula,
    kb_to_text,
    parse_formula,
    parse_kb,
)
from .clauses import ClauseDB, read_gcnf, to_clause_db, write_dimacs, write_gcnf
from .sat import (
    ConsistencyOracle,
    DpllSolver,
    SatResult,
    export_query_dimacs,
    is_satisfiable,
    is_subset_consistent,
    parse_solver_output,
)
from .mus import (
    FormulaClassification,
    MssSet,
    MusSet,
    classify_formulas,
    enumerate_all,
    enumerate_msses,
    enumerate_muses,
    grow_to_mss,
    import_mus_list,
    muses_to_text,
    shrink_to_mus,
)
from .musgraph import (
    Decomposition,
    DecompositionComponent,
    MusGraph,
    build_mus_graph,
    connected_components,
    graph_to_text,
    mus_decomposition,
)
from .packing import (
    IlpConstraint,
    IlpModel,
    PackingSolution,
    SetFamily,
    WcnfInstance,
    encode_ilp,
    encode_mincost_sat,
    family_to_text,
    import_packing_solution,
    is_closed_packing,
    mcsp_branch_bound,
    mcsp_bruteforce,
    msp_bruteforce,
    packing_to_assignment,
    check_wcnf_assignment,
    parse_family,
    reduce_msp_to_mcsp,
    solve_encoding_exhaustive,
    write_lp,
    write_wcnf,
)
from .generate import GenParams, SplitMix64, generate_random_kb, generate_set_family, mfsp_name
from .measures import (
    MEASURE_IDS,
    MeasureReport,
    PartialMusDecomposition,
    PostulateReport,
    RepairReport,
    all_minimum_hitting_sets,
    check_postulates,
    compute_report,
    delta_hs,
    distributable_decomposition,
    i_d,
    i_m,
    i_m_prime,
    i_mi,
    minimum_hitting_set,
    repair_merge_check,
    self_contradictory,
    validate_partial_decomposition,
)

__version__ = "0.1.0"
