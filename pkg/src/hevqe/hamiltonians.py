"""Hamiltonian and observable builders: weighted MaxCut, open XXX chain with
a uniform field, the frozen-impurity effective chain, and magnetization.

The cut objective is the standard weighted MaxCut

    C(z) = sum_{i<j} w_ij (1 - z_i z_j) / 2,   z in {+1, -1}^n,

so the weight multiplies the whole edge term.  The matching operator is
H = sum (w_ij/2) Z_i Z_j with constant offset -sum w_ij/2, which makes
<z|H|z> = -C(z): minimizing the energy maximizes the cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum


@dataclass(frozen=True)
class WeightedGraph:
    """Complete graph with edge weights in [0, 1], keyed by (i, j) with i<j."""

    n_nodes: int
    weights: dict

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n_nodes}")
        normalized = {}
        for (i, j), w in self.weights.items():
            i, j = int(i), int(j)
            if i == j or not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"bad edge ({i}, {j})")
            if i > j:
                i, j = j, i
            w = float(w)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} for edge ({i}, {j}) outside [0, 1]")
            normalized[(i, j)] = w
        expected = self.n_nodes * (self.n_nodes - 1) // 2
        if len(normalized) != expected:
            raise ValueError(
                f"graph must be complete: expected {expected} edges, "
                f"got {len(normalized)}"
            )
        object.__setattr__(self, "weights", normalized)

    def weight(self, i: int, j: int) -> float:
        return self.weights[(i, j) if i < j else (j, i)]

    def edges(self):
        """Edges in lexicographic (i, j) order."""
        return sorted(self.weights.items())

    def total_weight(self) -> float:
        return float(sum(self.weights.values()))


@dataclass(frozen=True)
class ImpuritySpec:
    """A chain site pinned to a basis state: site index d counted from the
    left (open) edge, frozen_state in {"zero", "one"}."""

    site: int
    frozen_state: str

    def __post_init__(self):
        if self.site < 0:
            raise ValueError(f"impurity site must be >= 0, got {self.site}")
        if self.frozen_state not in ("zero", "one"):
            raise ValueError(
                f'frozen_state must be "zero" or "one", got {self.frozen_state!r}'
            )

    @property
    def sign(self) -> int:
        """Z eigenvalue s of the frozen state: +1 for |0>, -1 for |1>."""
        return 1 if self.frozen_state == "zero" else -1


def random_complete_graph(n: int, seed: int) -> WeightedGraph:
    """Complete graph on n nodes with i.i.d. uniform[0,1] weights."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    rng = np.random.default_rng(seed)
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            weights[(i, j)] = float(rng.random())
    return WeightedGraph(n, weights)


def cut_value(graph: WeightedGraph, assignment: str) -> float:
    """Total weight of edges crossing the partition given by the bitstring."""
    if len(assignment) != graph.n_nodes:
        raise ValueError(
            f"assignment length {len(assignment)} != n_nodes {graph.n_nodes}"
        )
    if set(assignment) - {"0", "1"}:
        raise ValueError(f"assignment must be a bitstring, got {assignment!r}")
    return float(
        sum(w for (i, j), w in graph.weights.items() if assignment[i] != assignment[j])
    )


def maxcut_hamiltonian(graph: WeightedGraph) -> PauliSum:
    """H = sum (w_ij/2) Z_i Z_j - (sum w_ij)/2, so <z|H|z> = -cut_value(z)."""
    terms = [
        (0.5 * w, {i: "Z", j: "Z"}) for (i, j), w in graph.edges()
    ]
    return PauliSum(graph.n_nodes, terms, constant_offset=-0.5 * graph.total_weight())


def heisenberg_hamiltonian(n: int, J: float, h: float) -> PauliSum:
    """Open-boundary XXX chain: J sum_i (XX+YY+ZZ)_{i,i+1} + h sum_i Z_i."""
    if n < 2:
        raise ValueError(f"chain needs n >= 2, got {n}")
    terms = []
    for i in range(n - 1):
        for axis in ("X", "Y", "Z"):
            terms.append((J, {i: axis, i + 1: axis}))
    for i in range(n):
        terms.append((h, {i: "Z"}))
    return PauliSum(n, terms)


def constrained_impurity_hamiltonian(
    n: int, J: float, h: float, imp: ImpuritySpec
) -> PauliSum:
    """Effective chain Hamiltonian with the impurity site frozen.

    Substitutes Z -> s (s = +1 for frozen |0>, -1 for |1>) and X, Y -> 0 at
    the impurity site of the full chain Hamiltonian, then reindexes the n-1
    surviving qubits.  The impurity's own field energy h*s and any fully
    substituted terms land in constant_offset; its neighbors acquire a local
    J*s*Z field.
    """
    if not 0 <= imp.site < n:
        raise ValueError(f"impurity site {imp.site} outside chain of length {n}")
    full = heisenberg_hamiltonian(n, J, h)
    s = imp.sign
    terms = []
    for coeff, paulis in full.terms:
        if imp.site in paulis:
            axis = paulis[imp.site]
            if axis in ("X", "Y"):
                continue
            coeff = coeff * s
            paulis = {q: a for q, a in paulis.items() if q != imp.site}
        remapped = {(q - 1 if q > imp.site else q): a for q, a in paulis.items()}
        terms.append((coeff, remapped))
    return PauliSum(n - 1, terms, constant_offset=full.constant_offset)


def magnetization_observable(n: int) -> PauliSum:
    """(1/n) sum_i Z_i."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return PauliSum(n, [(1.0 / n, {i: "Z"}) for i in range(n)])


# --- plain-text graph serialization (bit-exact round trip) ---

def graph_to_text(graph: WeightedGraph) -> str:
    """Edge-list text: header ``n=<count>`` then ``i j w_ij`` lines.

    Weights are written with repr, which round-trips float64 exactly.
    """
    lines = [f"n={graph.n_nodes}"]
    for (i, j), w in graph.edges():
        lines.append(f"{i} {j} {w!r}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> WeightedGraph:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("graph text must start with an n=<count> header")
    n = int(lines[0][2:])
    weights = {}
    for line in lines[1:]:
        i_s, j_s, w_s = line.split()
        weights[(int(i_s), int(j_s))] = float(w_s)
    return WeightedGraph(n, weights)
