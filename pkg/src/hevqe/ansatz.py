"""Parameterized circuit builders: heat-exchange cooling block, HE MaxCut
ansatz, QAOA, the hardware-efficient RY/CX ladder, and the HE-dVQE composite.

Register layout: problem/system qubits first (indices 0..n-1), bath qubits
after them.  HE angles are bounded [0, pi] (theta = pi is a complete swap
against the pre-polarized bath); all plain rotation angles are bounded
[-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import ImpuritySpec, WeightedGraph
from .sim import GateOp, ParamCircuit

HE_BOUNDS = (0.0, float(np.pi))
ROTATION_BOUNDS = (-float(np.pi), float(np.pi))

ANSATZ_KINDS = ("HE_MAXCUT", "QAOA", "HARDWARE_EFFICIENT", "HE_DVQE")


@dataclass(frozen=True)
class AnsatzSpec:
    """Which circuit family to build, for which problem size.

    ``reps_or_p`` is the QAOA depth p or the hardware-efficient repetition
    count; the HE MaxCut ansatz ignores it.  QAOA needs the graph (edge
    weights enter the cost layer); HE_DVQE needs the impurity spec.
    """

    kind: str
    n_problem: int
    reps_or_p: int = 1
    graph: WeightedGraph | None = None
    impurity: ImpuritySpec | None = None

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.n_problem < 2:
            raise ValueError(f"n_problem must be >= 2, got {self.n_problem}")
        if self.reps_or_p < 1:
            raise ValueError(f"reps_or_p must be >= 1, got {self.reps_or_p}")
        if self.kind == "QAOA" and self.graph is None:
            raise ValueError("QAOA requires a graph")
        if self.kind == "HE_DVQE" and self.impurity is None:
            raise ValueError("HE_DVQE requires an impurity spec")


def he_cooling_block(n_problem: int) -> ParamCircuit:
    """Cooling block on 2n qubits: bath qubits n..2n-1 prepared in |1>, one
    XY(theta_j) per (j, n+j) pair, each theta bounded [0, pi]."""
    if n_problem < 1:
        raise ValueError(f"n_problem must be >= 1, got {n_problem}")
    n = n_problem
    gates = tuple(GateOp("XY", (j, n + j), slot=j) for j in range(n))
    return ParamCircuit(
        n_qubits=2 * n,
        initial_layer=tuple(range(n, 2 * n)),
        gates=gates,
        bounds=(HE_BOUNDS,) * n,
    )


def he_maxcut_ansatz(n: int) -> ParamCircuit:
    """The MaxCut ansatz is the cooling block alone; observables act on the
    problem half with identity on the bath."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return he_cooling_block(n)


def qaoa_ansatz(graph: WeightedGraph, p: int) -> ParamCircuit:
    """H on all qubits, then p layers of cost RZZ(2*gamma_k*w_ij) over the
    edges and mixer RX(2*beta_k); slots interleaved (gamma_0, beta_0, ...)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    n = graph.n_nodes
    gates = [GateOp("H", (q,)) for q in range(n)]
    for k in range(p):
        gamma_slot, beta_slot = 2 * k, 2 * k + 1
        for (i, j), w in graph.edges():
            gates.append(GateOp("RZZ", (i, j), slot=gamma_slot, scale=2.0 * w))
        for q in range(n):
            gates.append(GateOp("RX", (q,), slot=beta_slot, scale=2.0))
    return ParamCircuit(n, (), tuple(gates), (ROTATION_BOUNDS,) * (2 * p))


def hardware_efficient_ansatz(n: int, reps: int) -> ParamCircuit:
    """RY on every qubit, then reps blocks of [linear CX ladder, RY layer];
    n*(reps+1) parameters, real amplitudes for all parameter values."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    gates = [GateOp("RY", (q,), slot=q) for q in range(n)]
    for r in range(1, reps + 1):
        for i in range(n - 1):
            gates.append(GateOp("CX", (i, i + 1)))
        for q in range(n):
            gates.append(GateOp("RY", (q,), slot=r * n + q))
    return ParamCircuit(n, (), tuple(gates), (ROTATION_BOUNDS,) * (n * (reps + 1)))


def he_dvqe_ansatz(n_system: int, imp: ImpuritySpec, reps: int) -> ParamCircuit:
    """Hardware-efficient U block on the system, then one XY(theta_HE)
    between the impurity site and a single bath qubit (index n_system)
    prepared in the frozen state.  The last slot is theta_HE, bounds [0, pi].
    """
    if not 0 <= imp.site < n_system:
        raise ValueError(f"impurity site {imp.site} outside system of {n_system}")
    u_block = hardware_efficient_ansatz(n_system, reps)
    bath = n_system
    gates = u_block.gates + (GateOp("XY", (imp.site, bath), slot=u_block.n_params),)
    initial = (bath,) if imp.frozen_state == "one" else ()
    return ParamCircuit(
        n_qubits=n_system + 1,
        initial_layer=initial,
        gates=gates,
        bounds=u_block.bounds + (HE_BOUNDS,),
    )


def build_ansatz(spec: AnsatzSpec) -> ParamCircuit:
    if spec.kind == "HE_MAXCUT":
        return he_maxcut_ansatz(spec.n_problem)
    if spec.kind == "QAOA":
        return qaoa_ansatz(spec.graph, spec.reps_or_p)
    if spec.kind == "HARDWARE_EFFICIENT":
        return hardware_efficient_ansatz(spec.n_problem, spec.reps_or_p)
    if spec.kind == "HE_DVQE":
        return he_dvqe_ansatz(spec.n_problem, spec.impurity, spec.reps_or_p)
    raise ValueError(f"unknown ansatz kind {spec.kind!r}")


def circuit_to_text(circuit: ParamCircuit) -> str:
    """Line-oriented dump `GATE q0 [q1] [sK[*scale] | angle]` for debugging
    and cross-implementation diffing."""
    lines = [f"qubits {circuit.n_qubits}"]
    if circuit.initial_layer:
        lines.append("init " + " ".join(str(q) for q in circuit.initial_layer))
    lines.append(f"slots {circuit.n_params}")
    for k, (lo, hi) in enumerate(circuit.bounds):
        lines.append(f"bound {k} {lo!r} {hi!r}")
    for gate in circuit.gates:
        parts = [gate.kind] + [str(q) for q in gate.qubits]
        if gate.slot is not None:
            ref = f"s{gate.slot}"
            if gate.scale != 1.0:
                ref += f"*{gate.scale!r}"
            parts.append(ref)
        elif gate.angle is not None:
            parts.append(repr(gate.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
