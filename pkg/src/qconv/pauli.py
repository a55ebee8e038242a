"""Pauli-string expansion of dense operators and the reflected-shift support check.

Pauli words are written with character ``j`` acting on qubit ``j``, so the
most significant qubit is the *last* character.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from qconv.shift_algebra import num_qubits, reflected_shift, symmetrized_operator

PRUNE = 1e-12
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    string: str
    coefficient: complex


def _word(xm: int, zm: int, n: int) -> str:
    return "".join(_LETTER[((xm >> j) & 1, (zm >> j) & 1)] for j in range(n))


def pauli_matrix(word: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for letter in reversed(word):  # qubit n-1 is the leftmost kron factor
        out = np.kron(out, _SINGLE[letter])
    return out


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """All ``Tr(P^dag M) / 2**n`` as a ``(2**n, 2**n)`` array indexed by (x-mask, z-mask).

    For a fixed x-mask the Pauli matrices share one permutation pattern, so
    the z-mask dependence is a Walsh-Hadamard transform of the gathered entries.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    num_qubits(dim)
    k = np.arange(dim)
    wht = hadamard(dim).astype(float)
    out = np.empty((dim, dim), dtype=complex)
    for xm in range(dim):
        gathered = m[k ^ xm, k]
        n_y = np.array([bin(xm & zm).count("1") for zm in range(dim)])
        out[xm] = (wht @ gathered) * (-1j) ** n_y / dim
    return out


def pauli_decompose(m: np.ndarray, prune: float = PRUNE) -> list[PauliTerm]:
    """Nonzero Pauli terms of ``m`` in lexicographic order of their words."""
    m = np.asarray(m, dtype=complex)
    n = num_qubits(m.shape[0])
    coeffs = pauli_coefficients(m)
    terms = [
        PauliTerm(_word(xm, zm, n), complex(coeffs[xm, zm]))
        for xm in range(2**n)
        for zm in range(2**n)
        if abs(coeffs[xm, zm]) > prune
    ]
    return sorted(terms, key=lambda t: t.string)


def reconstruct(terms: list[PauliTerm], n: int) -> np.ndarray:
    out = np.zeros((2**n, 2**n), dtype=complex)
    for t in terms:
        out += t.coefficient * pauli_matrix(t.string)
    return out


@dataclass(frozen=True)
class SupportReport:
    y_weight: float
    term_count: int
    bound: int
    leading_factor_ok: bool

    @property
    def ok(self) -> bool:
        return self.y_weight <= PRUNE and self.term_count <= self.bound and self.leading_factor_ok


def support_report(m: np.ndarray) -> SupportReport:
    n = num_qubits(np.asarray(m).shape[0])
    coeffs = pauli_coefficients(m)
    y_weight = 0.0
    count = 0
    leading_ok = True
    for xm in range(2**n):
        for zm in range(2**n):
            c = abs(coeffs[xm, zm])
            if xm & zm:
                y_weight += c
            if c > PRUNE:
                count += 1
                if _word(xm, zm, n)[-1] not in "IX":
                    leading_ok = False
    return SupportReport(y_weight, count, 2 * 3 ** (n - 1), leading_ok)


def verify_support(target, n: int) -> SupportReport:
    """Support report for a reflected shift (integer target) or ``H(b)`` (vector target)."""
    if np.ndim(target) == 0:
        return support_report(reflected_shift(int(target), n))
    return support_report(symmetrized_operator(target, n))
