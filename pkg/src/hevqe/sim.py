"""Dense statevector simulator: basis states, gate application, expectation
values, and measurement sampling.

Conventions (fixed for the whole package):
  * qubit 0 is the least-significant bit of the basis index;
  * bitstrings are written qubit-0 first, so ``s[i]`` is the value of qubit i;
  * XY(theta) acts on the {|01>, |10>} subspace as
        |01> -> cos(theta/2)|01> - i sin(theta/2)|10>
        |10> -> -i sin(theta/2)|01> + cos(theta/2)|10>
    with |00> and |11> untouched; theta = pi is the complete population swap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PAULI_MATRICES, PauliSum

ONE_QUBIT_KINDS = frozenset({"X", "H", "RX", "RY", "RZ"})
TWO_QUBIT_KINDS = frozenset({"CX", "RZZ", "XY"})
GATE_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS
PARAMETERIZED_KINDS = frozenset({"RX", "RY", "RZ", "RZZ", "XY"})

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def index_to_bitstring(index: int, n_qubits: int) -> str:
    """Basis index -> qubit-0-first bitstring."""
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n_qubits))


def bitstring_to_index(bits: str) -> int:
    """Qubit-0-first bitstring -> basis index."""
    index = 0
    for q, ch in enumerate(bits):
        if ch == "1":
            index |= 1 << q
        elif ch != "0":
            raise ValueError(f"bitstring must contain only 0/1, got {bits!r}")
    return index


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def new_basis_state(n_qubits: int, ones=()) -> Statevector:
    """Computational basis state with |1> exactly at the listed qubits."""
    n_qubits = int(n_qubits)
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    index = 0
    for q in set(ones):
        q = int(q)
        if not 0 <= q < n_qubits:
            raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
        index |= 1 << q
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[index] = 1.0
    return Statevector(n_qubits, amps)


@dataclass(frozen=True)
class GateOp:
    """One gate: either a fixed angle or a reference to a parameter slot.

    For slot-referencing gates the applied angle is ``scale * params[slot]``;
    the scale carries structure constants such as edge weights in QAOA cost
    layers.
    """

    kind: str
    qubits: tuple
    angle: float | None = None
    slot: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        expected = 1 if self.kind in ONE_QUBIT_KINDS else 2
        if len(qubits) != expected:
            raise ValueError(f"{self.kind} takes {expected} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind} qubits must be distinct, got {qubits}")
        parameterized = self.kind in PARAMETERIZED_KINDS
        has_angle = self.angle is not None
        has_slot = self.slot is not None
        if parameterized and has_angle == has_slot:
            raise ValueError(
                f"{self.kind} needs exactly one of a fixed angle or a slot"
            )
        if not parameterized and (has_angle or has_slot):
            raise ValueError(f"{self.kind} carries no angle")


@dataclass(frozen=True)
class ParamCircuit:
    """Immutable gate list over a fixed register with bounded parameter slots.

    ``initial_layer`` lists the qubits prepared in |1> (all others start |0>);
    ``bounds[k]`` is the (lo, hi) box for slot k, so the slot count is
    ``len(bounds)``.
    """

    n_qubits: int
    initial_layer: tuple = ()
    gates: tuple = ()
    bounds: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "initial_layer", tuple(self.initial_layer))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(
            self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        )
        for q in self.initial_layer:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"initial-layer qubit {q} out of range")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"slot bounds need lo < hi, got ({lo}, {hi})")
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate qubit {q} out of range")
            if gate.slot is not None and not 0 <= gate.slot < len(self.bounds):
                raise ValueError(f"gate references missing slot {gate.slot}")

    @property
    def n_params(self) -> int:
        return len(self.bounds)


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Dense 2x2 / 4x4 unitary for one gate.

    Two-qubit matrices are indexed with the first listed qubit as the high
    bit: row/column index = 2*bit(qubits[0]) + bit(qubits[1]).  CX uses
    qubits[0] as control.
    """
    if kind == "X":
        return PAULI_MATRICES["X"].copy()
    if kind == "H":
        return _SQRT_HALF * np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)
    if kind == "CX":
        return np.array(
            [
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 0, 1],
                [0, 0, 1, 0],
            ],
            dtype=complex,
        )
    if angle is None:
        raise ValueError(f"{kind} requires an angle")
    half = 0.5 * angle
    c, s = np.cos(half), np.sin(half)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-1j * half), np.exp(1j * half)]).astype(complex)
    if kind == "RZZ":
        e_m, e_p = np.exp(-1j * half), np.exp(1j * half)
        return np.diag([e_m, e_p, e_p, e_m]).astype(complex)
    if kind == "XY":
        return np.array(
            [
                [1, 0, 0, 0],
                [0, c, -1j * s, 0],
                [0, -1j * s, c, 0],
                [0, 0, 0, 1],
            ],
            dtype=complex,
        )
    raise ValueError(f"unknown gate kind {kind!r}")


def _apply_matrix(amps: np.ndarray, n: int, mat: np.ndarray, qubits) -> np.ndarray:
    k = len(qubits)
    axes = tuple(n - 1 - q for q in qubits)
    t = np.moveaxis(amps.reshape((2,) * n), axes, range(k))
    shape = t.shape
    out = mat @ t.reshape(1 << k, -1)
    return np.moveaxis(out.reshape(shape), range(k), axes).reshape(-1)


def _resolve_angle(gate: GateOp, binding: float | None) -> float | None:
    if gate.kind not in PARAMETERIZED_KINDS:
        return None
    if gate.slot is not None:
        if binding is None:
            raise ValueError(f"{gate.kind} slot {gate.slot} is unbound")
        return gate.scale * float(binding)
    return float(gate.angle)


def apply_gate(state: Statevector, gate: GateOp, angle_binding=None) -> Statevector:
    """Apply one gate, binding a slot-referencing angle if provided."""
    for q in gate.qubits:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"gate qubit {q} out of range")
    angle = _resolve_angle(gate, angle_binding)
    mat = gate_matrix(gate.kind, angle)
    return Statevector(
        state.n_qubits, _apply_matrix(state.amplitudes, state.n_qubits, mat, gate.qubits)
    )


def apply_circuit(circuit: ParamCircuit, params) -> Statevector:
    """Prepare the initial layer and apply all gates with bound parameters.

    Out-of-bounds parameters are rejected, not clamped.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(
            f"expected {circuit.n_params} parameters, got shape {params.shape}"
        )
    for k, (value, (lo, hi)) in enumerate(zip(params, circuit.bounds)):
        if value < lo or value > hi:
            raise ValueError(
                f"parameter {k} = {value} outside bounds [{lo}, {hi}]"
            )
    state = new_basis_state(circuit.n_qubits, circuit.initial_layer)
    amps = state.amplitudes
    for gate in circuit.gates:
        binding = params[gate.slot] if gate.slot is not None else None
        mat = gate_matrix(gate.kind, _resolve_angle(gate, binding))
        amps = _apply_matrix(amps, circuit.n_qubits, mat, gate.qubits)
    return Statevector(circuit.n_qubits, amps)


def bind_param(circuit: ParamCircuit, slot: int, value: float) -> ParamCircuit:
    """Freeze one slot at a fixed value and renumber the remaining slots.

    The bound value must respect the slot's bounds; gates that referenced the
    slot keep their scale baked into the now-fixed angle.
    """
    if not 0 <= slot < circuit.n_params:
        raise ValueError(f"slot {slot} out of range")
    lo, hi = circuit.bounds[slot]
    if value < lo or value > hi:
        raise ValueError(f"bound value {value} outside slot bounds [{lo}, {hi}]")
    gates = []
    for gate in circuit.gates:
        if gate.slot is None:
            gates.append(gate)
        elif gate.slot == slot:
            gates.append(
                GateOp(gate.kind, gate.qubits, angle=gate.scale * float(value))
            )
        else:
            new_slot = gate.slot - 1 if gate.slot > slot else gate.slot
            gates.append(
                GateOp(gate.kind, gate.qubits, slot=new_slot, scale=gate.scale)
            )
    bounds = circuit.bounds[:slot] + circuit.bounds[slot + 1 :]
    return ParamCircuit(circuit.n_qubits, circuit.initial_layer, tuple(gates), bounds)


def expectation(state: Statevector, observable: PauliSum) -> float:
    """<psi|O|psi> for a Pauli sum acting on the low-index qubits.

    The observable may cover fewer qubits than the state (identity padding on
    the high-index bath qubits).  The value is real up to numerical residue,
    which is discarded.
    """
    if observable.n_qubits > state.n_qubits:
        raise ValueError(
            f"observable on {observable.n_qubits} qubits does not fit a "
            f"{state.n_qubits}-qubit state"
        )
    n = state.n_qubits
    amps = state.amplitudes
    total = observable.constant_offset
    probs = None
    idx = None
    for coeff, paulis in observable.terms:
        if all(axis == "Z" for axis in paulis.values()):
            # Diagonal term: a signed sum of probabilities.
            if probs is None:
                probs = np.abs(amps) ** 2
                idx = np.arange(amps.size)
            sign = np.ones(amps.size)
            for q in paulis:
                sign *= 1.0 - 2.0 * ((idx >> q) & 1)
            total += coeff * float(probs @ sign)
        else:
            phi = amps
            for q, axis in paulis.items():
                phi = _apply_matrix(phi, n, PAULI_MATRICES[axis], (q,))
            total += coeff * float(np.vdot(amps, phi).real)
    return float(total)


def sample_bitstrings(state: Statevector, shots: int, seed: int) -> dict:
    """Multinomial measurement counts keyed by qubit-0-first bitstring."""
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return {
        index_to_bitstring(int(i), state.n_qubits): int(counts[i])
        for i in np.flatnonzero(counts)
    }
