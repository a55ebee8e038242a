"""Dense-matrix oracles for the cyclic shift family and its reflected variants.

Everything here is built from explicit permutations and literal sums, so it
can serve as ground truth for the gate-level constructions. Bit order is
little-endian: basis index bit ``j`` is qubit ``j``.
"""

from __future__ import annotations

import numpy as np

from qconv.errors import InvalidDimensionError, ZeroVectorError

MAX_QUBITS = 6
TOL = 1e-12


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidDimensionError(f"qubit count must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise InvalidDimensionError(f"dense oracles support n <= {MAX_QUBITS}, got {n}")


def num_qubits(dim: int) -> int:
    """Return n with 2**n == dim, raising for anything else."""
    if dim < 2 or dim & (dim - 1):
        raise InvalidDimensionError(f"dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def as_vector(v, n: int | None = None) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    m = num_qubits(arr.size)
    if n is not None and m != n:
        raise InvalidDimensionError(f"expected dimension {2**n}, got {arr.size}")
    return arr


def normalize(v) -> tuple[np.ndarray, float]:
    arr = np.asarray(v, dtype=complex)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ZeroVectorError("zero vector cannot be amplitude encoded")
    return arr / norm, norm


def is_permutation(m: np.ndarray, tol: float = TOL) -> bool:
    m = np.asarray(m)
    ones = np.abs(m - 1) <= tol
    zeros = np.abs(m) <= tol
    if not np.all(ones | zeros):
        return False
    return bool(np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1))


def is_unitary(m: np.ndarray, tol: float = TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def is_hermitian(m: np.ndarray, tol: float = TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def _permutation(images: np.ndarray) -> np.ndarray:
    # column k carries a 1 in row images[k]
    dim = images.size
    out = np.zeros((dim, dim), dtype=complex)
    out[images, np.arange(dim)] = 1.0
    return out


def shift_matrix(i: int, n: int) -> np.ndarray:
    """Cyclic shift ``|k> -> |k + i mod 2**n>``; ``i`` is reduced mod 2**n."""
    _check_n(n)
    dim = 2**n
    return _permutation((np.arange(dim) + i) % dim)


def reversal_matrix(n: int) -> np.ndarray:
    """Anti-identity ``|s> -> |2**n - 1 - s>``, i.e. X on every wire."""
    _check_n(n)
    dim = 2**n
    return _permutation(dim - 1 - np.arange(dim))


def reflected_shift(i: int, n: int) -> np.ndarray:
    return shift_matrix(i, n) @ reversal_matrix(n)


def reflected_generator(n: int) -> np.ndarray:
    """``|k> -> |2**n - k mod 2**n>``, evaluated from its basis action."""
    _check_n(n)
    dim = 2**n
    return _permutation((dim - np.arange(dim)) % dim)


def _proj(bit: int) -> np.ndarray:
    p = np.zeros((2, 2), dtype=complex)
    p[bit, bit] = 1.0
    return p


def reflected_generator_recursive(n: int) -> np.ndarray:
    """Build the reflected generator from the block recursion on the LSB.

    ``U_{k+1} = U_k (x) |0><0| + J_k (x) |1><1|`` with ``U_1 = I``; the
    right-hand tensor factor is the least significant qubit.
    """
    _check_n(n)
    u = np.eye(2, dtype=complex)
    for k in range(1, n):
        u = np.kron(u, _proj(0)) + np.kron(reversal_matrix(k), _proj(1))
    return u


def reflected_generator_expanded(n: int) -> np.ndarray:
    """Projector-sum form: one pattern-controlled reversal layer per position.

    Term ``i`` applies ``J_i`` to the top ``i`` qubits when the qubit just
    below them is 1 and all lower qubits are 0.
    """
    _check_n(n)
    zeros = lambda count: _kron_all([_proj(0)] * count)  # noqa: E731
    out = np.kron(np.eye(2, dtype=complex), zeros(n - 1))
    for i in range(1, n):
        out = out + _kron_all([reversal_matrix(i), _proj(1), zeros(n - i - 1)])
    return out


def _kron_all(factors: list[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def convolution_matrix(b, n: int) -> np.ndarray:
    """Circulant ``sum_i b_i L_i``."""
    b = as_vector(b, n)
    return sum(b[i] * shift_matrix(i, n) for i in range(b.size))


def symmetrized_operator(b, n: int) -> np.ndarray:
    """``sum_i b_i L_i J``; Hermitian whenever ``b`` is real."""
    b = as_vector(b, n)
    return sum(b[i] * reflected_shift(i, n) for i in range(b.size))


def select_matrix(n: int, reflect: bool = True) -> np.ndarray:
    """Block-diagonal ``sum_i |i><i|_A (x) L_i`` (or the reflected shifts).

    The index register A sits above the data register, so block ``i`` of the
    returned matrix is the shift applied when A holds ``i``.
    """
    _check_n(n)
    dim = 2**n
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        block = reflected_shift(i, n) if reflect else shift_matrix(i, n)
        out[i * dim : (i + 1) * dim, i * dim : (i + 1) * dim] = block
    return out


def circular_convolve(a, b) -> np.ndarray:
    """Literal O(N^2) double loop ``c_k = sum_j a_j b_{(k-j) mod N}``."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.size != b.size:
        raise InvalidDimensionError(f"dimension mismatch: a has {a.size}, b has {b.size}")
    dim = a.size
    c = np.zeros(dim, dtype=complex)
    for k in range(dim):
        acc = 0j
        for j in range(dim):
            acc += a[j] * b[(k - j) % dim]
        c[k] = acc
    return c


def success_probability(a, b) -> float:
    """Ancilla-zero probability ``|C(b) a|^2 / (N |a|^2 |b|^2)``."""
    a = as_vector(a)
    n = num_qubits(a.size)
    b = as_vector(b, n)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("success probability undefined for a zero input")
    c = convolution_matrix(b, n) @ a
    return float(np.vdot(c, c).real / (a.size * na**2 * nb**2))
