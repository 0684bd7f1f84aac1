"""Heat-exchange cooling ansatz toolkit: statevector simulation, variational
MaxCut baselines, the frozen-impurity chain workflow, and exact classical
references."""

from .ansatz import (
    AnsatzSpec,
    build_ansatz,
    circuit_to_text,
    hardware_efficient_ansatz,
    he_cooling_block,
    he_dvqe_ansatz,
    he_maxcut_ansatz,
    qaoa_ansatz,
)
from .driver import (
    ChainSpec,
    DvqeResult,
    EvalMode,
    RunConfig,
    RunRecord,
    approximation_ratio,
    config_digest,
    energy_objective,
    prob_best_cut,
    run_dvqe,
    run_vqe,
)
from .hamiltonians import (
    ImpuritySpec,
    WeightedGraph,
    constrained_impurity_hamiltonian,
    cut_value,
    graph_from_text,
    graph_to_text,
    heisenberg_hamiltonian,
    magnetization_observable,
    maxcut_hamiltonian,
    random_complete_graph,
)
from .optimize import (
    GPFitError,
    Objective,
    OptTrace,
    gp_fit,
    gp_global_search,
    imfil_minimize,
    rotation_descent,
    surrogate_then_local,
)
from .oracles import (
    LindbladSpec,
    OracleError,
    brute_force_maxcut,
    exact_ground,
    lindblad_evolve,
    verify_decay,
)
from .pauli import PauliSum
from .sim import (
    GateOp,
    ParamCircuit,
    Statevector,
    apply_circuit,
    apply_gate,
    bind_param,
    bitstring_to_index,
    expectation,
    index_to_bitstring,
    new_basis_state,
    sample_bitstrings,
)

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "ChainSpec",
    "DvqeResult",
    "EvalMode",
    "GPFitError",
    "GateOp",
    "ImpuritySpec",
    "LindbladSpec",
    "Objective",
    "OptTrace",
    "OracleError",
    "ParamCircuit",
    "PauliSum",
    "RunConfig",
    "RunRecord",
    "Statevector",
    "WeightedGraph",
    "apply_circuit",
    "apply_gate",
    "approximation_ratio",
    "bind_param",
    "bitstring_to_index",
    "brute_force_maxcut",
    "build_ansatz",
    "circuit_to_text",
    "config_digest",
    "constrained_impurity_hamiltonian",
    "cut_value",
    "energy_objective",
    "exact_ground",
    "expectation",
    "gp_fit",
    "gp_global_search",
    "graph_from_text",
    "graph_to_text",
    "hardware_efficient_ansatz",
    "he_cooling_block",
    "he_dvqe_ansatz",
    "he_maxcut_ansatz",
    "heisenberg_hamiltonian",
    "imfil_minimize",
    "rotation_descent",
    "index_to_bitstring",
    "lindblad_evolve",
    "magnetization_observable",
    "maxcut_hamiltonian",
    "new_basis_state",
    "prob_best_cut",
    "qaoa_ansatz",
    "random_complete_graph",
    "run_dvqe",
    "run_vqe",
    "sample_bitstrings",
    "surrogate_then_local",
    "verify_decay",
]
