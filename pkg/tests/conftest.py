"""Shared fixtures and an independent dense-matrix circuit oracle.

The oracle builds full 2^n x 2^n unitaries by explicit bit bookkeeping (no
axis reshuffling), so agreement with the simulator kernel is a genuine
cross-check rather than the same code path twice.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from hevqe import WeightedGraph
from hevqe.pauli import PAULI_MATRICES
from hevqe.sim import gate_matrix, new_basis_state

# Triangle with distinct weights; optimum isolates node 2 (cut 0.5 + 0.9).
TRIANGLE_WEIGHTS = {(0, 1): 0.2, (0, 2): 0.5, (1, 2): 0.9}
TRIANGLE_C_OPT = 1.4
TRIANGLE_BEST = {"001", "110"}


@pytest.fixture
def triangle():
    return WeightedGraph(3, dict(TRIANGLE_WEIGHTS))


def embed_unitary(mat: np.ndarray, qubits, n: int) -> np.ndarray:
    """Lift a 2^k x 2^k gate matrix to the full register.

    qubits[0] is the gate matrix's high bit; qubit 0 is the least-significant
    bit of the register index.
    """
    k = len(qubits)
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        loc_col = 0
        for q in qubits:
            loc_col = (loc_col << 1) | ((col >> q) & 1)
        base = col
        for q in qubits:
            base &= ~(1 << q)
        for loc_row in range(1 << k):
            row = base
            for pos, q in enumerate(qubits):
                row |= ((loc_row >> (k - 1 - pos)) & 1) << q
            full[row, col] = mat[loc_row, loc_col]
    return full


def dense_circuit_state(circuit, params) -> np.ndarray:
    """Reference statevector: multiply embedded dense gate unitaries."""
    params = np.asarray(params, dtype=float)
    state = new_basis_state(circuit.n_qubits, circuit.initial_layer).amplitudes
    for gate in circuit.gates:
        if gate.slot is not None:
            angle = gate.scale * params[gate.slot]
        else:
            angle = gate.angle
        mat = gate_matrix(gate.kind, angle)
        state = embed_unitary(mat, gate.qubits, circuit.n_qubits) @ state
    return state


def xy_generator_matrix(theta: float) -> np.ndarray:
    """expm(-i (theta/4) (XX + YY)) on two qubits, qubit order (high, low)."""
    xx = np.kron(PAULI_MATRICES["X"], PAULI_MATRICES["X"])
    yy = np.kron(PAULI_MATRICES["Y"], PAULI_MATRICES["Y"])
    return expm(-0.25j * theta * (xx + yy))


def random_pauli_sum(n: int, n_terms: int, rng, diagonal=False):
    """Random observable for cross-checks; coefficients in [-1, 1]."""
    from hevqe.pauli import PauliSum

    axes = "Z" if diagonal else "XYZ"
    terms = []
    for _ in range(n_terms):
        support = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        paulis = {int(q): axes[rng.integers(len(axes))] for q in support}
        terms.append((float(rng.uniform(-1, 1)), paulis))
    return PauliSum(n, terms, constant_offset=float(rng.uniform(-1, 1)))


def random_circuit(n: int, depth: int, rng):
    """Random fixed-angle circuit over the full gate set."""
    from hevqe.sim import GateOp, ParamCircuit

    kinds_1q = ["X", "H", "RX", "RY", "RZ"]
    kinds_2q = ["CX", "RZZ", "XY"]
    gates = []
    for _ in range(depth):
        if n >= 2 and rng.random() < 0.4:
            kind = kinds_2q[rng.integers(3)]
            q = rng.choice(n, size=2, replace=False)
            angle = float(rng.uniform(-np.pi, np.pi)) if kind != "CX" else None
            gates.append(GateOp(kind, (int(q[0]), int(q[1])), angle=angle))
        else:
            kind = kinds_1q[rng.integers(5)]
            q = int(rng.integers(n))
            angle = float(rng.uniform(-np.pi, np.pi)) if kind not in ("X", "H") else None
            gates.append(GateOp(kind, (q,), angle=angle))
    initial = tuple(int(q) for q in range(n) if rng.random() < 0.3)
    return ParamCircuit(n, initial_layer=initial, gates=tuple(gates))
