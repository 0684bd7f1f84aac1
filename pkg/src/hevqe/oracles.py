"""Independent classical references: brute-force MaxCut enumeration, dense
exact diagonalization, and a fixed-step RK4 Lindblad integrator.

These paths share no code with the variational pipeline beyond the PauliSum
dense assembly, so agreement between them and the simulator is evidence, not
tautology.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .hamiltonians import (
    ImpuritySpec,
    WeightedGraph,
    constrained_impurity_hamiltonian,
    heisenberg_hamiltonian,
    random_complete_graph,
)
from .pauli import PauliSum
from .sim import index_to_bitstring

BRUTE_FORCE_LIMIT = 24
DIAG_QUBIT_LIMIT = 12


class OracleError(Exception):
    """An oracle was asked for something outside its feasible range."""


def brute_force_maxcut(graph: WeightedGraph):
    """Exhaustive maximum cut: (C_opt, set of every maximizing assignment).

    Complement pairs always appear together; ties within 1e-12 of the max are
    included (exact complements are bit-identical in float arithmetic).
    """
    n = graph.n_nodes
    if n > BRUTE_FORCE_LIMIT:
        raise OracleError(f"brute force limited to {BRUTE_FORCE_LIMIT} nodes, got {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n)
    for (i, j), w in graph.edges():
        crossing = ((idx >> i) ^ (idx >> j)) & 1
        cut += w * crossing
    c_opt = float(cut.max())
    best = np.flatnonzero(cut >= c_opt - 1e-12)
    return c_opt, {index_to_bitstring(int(b), n) for b in best}


def exact_ground(H: PauliSum):
    """Smallest eigenvalue and unit eigenvector of the dense Hermitian matrix."""
    if H.n_qubits > DIAG_QUBIT_LIMIT:
        raise OracleError(
            f"dense diagonalization limited to {DIAG_QUBIT_LIMIT} qubits, "
            f"got {H.n_qubits}"
        )
    evals, evecs = np.linalg.eigh(H.to_dense())
    return float(evals[0]), evecs[:, 0]


# --- Lindblad integrator ---

def _embed_single(op2: np.ndarray, site: int, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    ident = np.eye(2, dtype=complex)
    for q in range(n - 1, -1, -1):
        out = np.kron(out, op2 if q == site else ident)
    return out


@dataclass
class LindbladSpec:
    """System Hamiltonian, one sigma^- jump at a site, decay rate gamma, and
    the initial density matrix (Hermitian, unit trace, PSD)."""

    h_system: PauliSum
    jump_site: int
    gamma: float
    rho0: np.ndarray

    def __post_init__(self):
        n = self.h_system.n_qubits
        if not 0 <= self.jump_site < n:
            raise ValueError(f"jump site {self.jump_site} outside {n}-qubit register")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        rho = np.asarray(self.rho0, dtype=complex)
        dim = 1 << n
        if rho.shape != (dim, dim):
            raise ValueError(f"rho0 must be {dim}x{dim}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("rho0 is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError("rho0 trace != 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("rho0 is not positive semidefinite")
        self.rho0 = rho


def lindblad_evolve(spec: LindbladSpec, dt: float, t_final: float):
    """Fixed-step RK4 integration of
        drho/dt = -i[H, rho] + gamma (2 s- rho s+ - {s+ s-, rho}).

    Populations at the jump site then decay at 2*gamma and coherences at
    gamma.  Hermiticity is restored by symmetrization each step; a trace
    drift above 1e-6 aborts with a diagnostic.
    Returns a list of (t, rho) pairs including t=0.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    n = spec.h_system.n_qubits
    H = spec.h_system.to_dense()
    h_scale = float(np.max(np.abs(np.linalg.eigvalsh(H)))) if H.any() else 0.0
    rate_scale = max(spec.gamma, h_scale)
    if rate_scale > 0 and dt > 0.01 / rate_scale:
        raise ValueError(
            f"dt={dt} too large for stability; need dt <= {0.01 / rate_scale:.3g}"
        )
    sm = _embed_single(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                       spec.jump_site, n)
    sp = sm.conj().T
    sp_sm = sp @ sm
    gamma = spec.gamma

    def rhs(rho):
        out = -1j * (H @ rho - rho @ H)
        if gamma > 0:
            out = out + gamma * (2.0 * (sm @ rho @ sp) - (sp_sm @ rho + rho @ sp_sm))
        return out

    n_steps = int(np.ceil(t_final / dt - 1e-12))
    rho = spec.rho0.copy()
    trajectory = [(0.0, rho.copy())]
    for step in range(1, n_steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > 1e-6:
            raise RuntimeError(
                f"integrator instability at t={step * dt:.6g}: "
                f"trace drift {drift:.3e} exceeds 1e-6"
            )
        trajectory.append((step * dt, rho.copy()))
    return trajectory


def verify_decay(trajectory, site: int):
    """Least-squares exponential fits at a site: (population rate, coherence
    rate), to compare against 2*gamma and gamma."""
    if len(trajectory) < 10:
        raise ValueError(f"need >= 10 samples, got {len(trajectory)}")
    dim = trajectory[0][1].shape[0]
    n = int(np.log2(dim))
    sm = _embed_single(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex), site, n)
    sp = sm.conj().T
    sp_sm = sp @ sm
    ts = np.array([t for t, _ in trajectory])
    pops = np.array([np.trace(rho @ sp_sm).real for _, rho in trajectory])
    cohs = np.array([abs(np.trace(rho @ sp)) for _, rho in trajectory])
    if np.any(pops <= 0) or np.any(cohs <= 0):
        raise ValueError("non-positive observables: exponential log-fit impossible")
    pop_rate = -np.polyfit(ts, np.log(pops), 1)[0]
    coh_rate = -np.polyfit(ts, np.log(cohs), 1)[0]
    return float(pop_rate), float(coh_rate)


# --- CSV fixtures consumed by the test suite as ground truth ---

def fixture_graph_cases():
    """The standard 20-graph regression suite: sizes cycling 4..10, one fixed
    seed per case.  Returns (case_id, graph) pairs."""
    cases = []
    for k in range(20):
        n = 4 + (k % 7)
        seed = 100 + k
        cases.append((f"n{n}_s{seed}", random_complete_graph(n, seed)))
    return cases


def fixture_chain_cases():
    """Chain Hamiltonians with recorded ground energies: clean open chains
    over a small (n, h) grid plus the frozen-impurity n=6 grid.  Returns
    (case_id, PauliSum) pairs."""
    cases = []
    for n in range(2, 9):
        for h in range(5):
            cases.append((f"chain_n{n}_J1_h{h}", heisenberg_hamiltonian(n, 1.0, float(h))))
    for d in (0, 1, 2):
        for h in range(5):
            for frozen in ("zero", "one"):
                ham = constrained_impurity_hamiltonian(
                    6, 1.0, float(h), ImpuritySpec(d, frozen)
                )
                cases.append((f"constr_n6_J1_h{h}_d{d}_{frozen}", ham))
    return cases


def write_chain_fixture_csv(path, rows):
    """rows: iterable of (case_id, E0)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "E0"])
        for case_id, e0 in rows:
            writer.writerow([case_id, repr(float(e0))])


def read_chain_fixture_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return {row["case_id"]: float(row["E0"]) for row in reader}


def write_maxcut_fixture_csv(path, rows):
    """rows: iterable of (graph_id, C_opt, assignments set)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph_id", "C_opt", "assignments"])
        for graph_id, c_opt, assignments in rows:
            writer.writerow([graph_id, repr(float(c_opt)), ";".join(sorted(assignments))])


def read_maxcut_fixture_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return {
            row["graph_id"]: (float(row["C_opt"]), set(row["assignments"].split(";")))
            for row in reader
        }
