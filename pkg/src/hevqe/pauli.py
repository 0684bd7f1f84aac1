"""Pauli-sum observables with real coefficients on a fixed qubit register.

Qubit 0 is the least-significant bit of the basis index everywhere in this
package; a bitstring's character ``i`` is the value of qubit ``i``.
"""

from __future__ import annotations

import numpy as np

PAULI_MATRICES = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_AXES = frozenset(PAULI_MATRICES)

# Dense assembly is quadratic in 2^n; past this it is no longer an "oracle in
# seconds" and callers should not be using a dense path at all.
DENSE_QUBIT_LIMIT = 12


class PauliSum:
    """Sum of weighted Pauli strings plus a constant energy offset.

    Terms are ``(coefficient, {qubit: axis})`` pairs with real coefficients.
    Construction merges terms with identical Pauli maps, folds identity
    (empty-map) terms into ``constant_offset``, and drops zero coefficients.
    Term order is canonical (sorted by Pauli map), so equal sums compare equal
    structurally and serialize identically.
    """

    def __init__(self, n_qubits, terms=(), constant_offset=0.0):
        n_qubits = int(n_qubits)
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
        self.n_qubits = n_qubits

        offset = float(constant_offset)
        merged: dict[tuple, float] = {}
        for coeff, paulis in terms:
            try:
                coeff = float(coeff)
            except TypeError as exc:
                raise ValueError(f"coefficients must be real, got {coeff!r}") from exc
            key = tuple(sorted(paulis.items()))
            for q, axis in key:
                if not 0 <= int(q) < n_qubits:
                    raise ValueError(f"qubit {q} outside register of {n_qubits}")
                if axis not in _AXES:
                    raise ValueError(f"unknown Pauli axis {axis!r}")
            if not key:
                offset += coeff
                continue
            merged[key] = merged.get(key, 0.0) + coeff

        self.terms: list[tuple[float, dict[int, str]]] = [
            (c, dict(k)) for k, c in sorted(merged.items()) if c != 0.0
        ]
        self.constant_offset = offset

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def is_diagonal(self) -> bool:
        """True when every term is a product of Z operators."""
        return all(
            axis == "Z" for _, paulis in self.terms for axis in paulis.values()
        )

    def diagonal(self) -> np.ndarray:
        """Dense diagonal (length 2^n, offset included) of an all-Z sum."""
        if not self.is_diagonal():
            raise ValueError("observable has off-diagonal (X/Y) terms")
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        diag = np.full(dim, self.constant_offset)
        for coeff, paulis in self.terms:
            sign = np.ones(dim)
            for q in paulis:
                sign *= 1.0 - 2.0 * ((idx >> q) & 1)
            diag += coeff * sign
        return diag

    def to_dense(self) -> np.ndarray:
        """Assemble the full 2^n x 2^n Hermitian matrix, offset included."""
        if self.n_qubits > DENSE_QUBIT_LIMIT:
            raise ValueError(
                f"dense assembly limited to {DENSE_QUBIT_LIMIT} qubits, "
                f"got {self.n_qubits}"
            )
        dim = 1 << self.n_qubits
        ident = np.eye(2, dtype=complex)
        mat = self.constant_offset * np.eye(dim, dtype=complex)
        for coeff, paulis in self.terms:
            term = np.ones((1, 1), dtype=complex)
            # qubit 0 is the least-significant bit, so kron runs high-to-low
            for q in range(self.n_qubits - 1, -1, -1):
                factor = PAULI_MATRICES[paulis[q]] if q in paulis else ident
                term = np.kron(term, factor)
            mat += coeff * term
        return mat

    def __repr__(self) -> str:
        return (
            f"PauliSum(n_qubits={self.n_qubits}, n_terms={self.n_terms}, "
            f"constant_offset={self.constant_offset!r})"
        )
