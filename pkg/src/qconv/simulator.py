"""Exact statevector execution, ancilla postselection, and block-encoding checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from qconv.circuit import Circuit, apply_circuit
from qconv.errors import CapacityError, InvalidDimensionError, PostselectionError
from qconv.shift_algebra import as_vector, convolution_matrix, normalize, num_qubits, symmetrized_operator
from qconv.synthesis import (
    PipelineMode,
    SelectVariant,
    build_lcu_pipeline,
    build_symmetric_control,
    width_of,
)

MAX_STATE_WIDTH = 24
MIN_PROBABILITY = 1e-14


@dataclass(frozen=True)
class StateVector:
    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.width:
            raise InvalidDimensionError(f"{amps.size} amplitudes for width {self.width}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, width: int) -> StateVector:
        amps = np.zeros(2**width, dtype=complex)
        amps[0] = 1.0
        return cls(width, amps)

    @classmethod
    def basis(cls, width: int, index: int) -> StateVector:
        amps = np.zeros(2**width, dtype=complex)
        amps[index] = 1.0
        return cls(width, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def run(circuit: Circuit, initial: StateVector) -> StateVector:
    if circuit.width != initial.width:
        raise InvalidDimensionError(f"circuit width {circuit.width} != state width {initial.width}")
    if circuit.width > MAX_STATE_WIDTH:
        raise CapacityError(f"statevector limited to {MAX_STATE_WIDTH} qubits")
    out = apply_circuit(circuit, initial.amplitudes.reshape(-1, 1))
    return StateVector(circuit.width, out[:, 0])


def _split(state: StateVector, span: tuple[int, int]) -> np.ndarray:
    lo, hi = span
    if not 0 <= lo < hi <= state.width:
        raise InvalidDimensionError(f"register span {span} outside width {state.width}")
    return state.amplitudes.reshape(2 ** (state.width - hi), 2 ** (hi - lo), 2**lo)


def inject_register(state: StateVector, register: tuple[int, int], amplitudes) -> StateVector:
    """Load normalized amplitudes into a register that currently holds ``|0...0>``."""
    t = _split(state, register)
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size != t.shape[1]:
        raise InvalidDimensionError(f"register holds {t.shape[1]} amplitudes, got {v.size}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("injected amplitudes must be normalized")
    if np.linalg.norm(t[:, 1:, :]) > 1e-12:
        raise ValueError(f"register {register} is not in the zero state")
    out = t[:, :1, :] * v[None, :, None]
    return StateVector(state.width, out.reshape(-1))


def postselect_zero(state: StateVector, register: tuple[int, int]) -> tuple[StateVector, float]:
    """Project ``register`` onto zero and drop it; returns the renormalized rest and its probability."""
    t = _split(state, register)
    kept = t[:, 0, :]
    p = float(np.vdot(kept, kept).real)
    if p < MIN_PROBABILITY:
        raise PostselectionError(f"ancilla-zero outcome has probability {p:.3e}")
    lo, hi = register
    return StateVector(state.width - (hi - lo), kept.reshape(-1) / math.sqrt(p)), p


@lru_cache(maxsize=None)
def _supplied_pipeline(variant: SelectVariant, n: int) -> Circuit:
    return build_lcu_pipeline(variant, n, PipelineMode.SUPPLIED_STATE)


def run_pipeline(
    a_hat: np.ndarray,
    b_hat: np.ndarray,
    variant: SelectVariant | str,
    mode: PipelineMode | str = PipelineMode.SUPPLIED_STATE,
) -> tuple[StateVector, float]:
    """Run the pipeline on normalized inputs; D ends up proportional to ``H(b) a``."""
    variant, mode = SelectVariant(variant), PipelineMode(mode)
    n = num_qubits(a_hat.size)
    w = width_of(n, variant)
    state = inject_register(StateVector.zero(w), (0, n), a_hat)
    if mode is PipelineMode.SUPPLIED_STATE:
        circuit = _supplied_pipeline(variant, n)
        state = inject_register(state, (n, 2 * n), b_hat)
    else:
        circuit = build_lcu_pipeline(variant, n, mode, kernel=b_hat)
    out, p = postselect_zero(run(circuit, state), (n, 2 * n))
    if variant is SelectVariant.RIPPLE:
        out, p_carry = postselect_zero(out, (n, n + 1))
        p *= p_carry
    return out, p


def convolve_quantum(
    a,
    b,
    variant: SelectVariant | str = SelectVariant.COMPILED,
    mode: PipelineMode | str = PipelineMode.SUPPLIED_STATE,
) -> tuple[np.ndarray, float]:
    """Circular convolution ``C(b) a`` read off the postselected data register.

    The data register is loaded with the reversed input so the reflected
    SELECT yields the standard convolution, and the output is rescaled by
    ``sqrt(N) |a| |b| sqrt(p)`` to undo amplitude normalization.
    """
    a = as_vector(a)
    n = num_qubits(a.size)
    b = as_vector(b, n)
    a_hat, na = normalize(a)
    b_hat, nb = normalize(b)
    out, p = run_pipeline(a_hat[::-1].copy(), b_hat, variant, mode)
    scale = math.sqrt(a.size) * na * nb * math.sqrt(p)
    return scale * out.amplitudes, p


def ancilla_zero_block(circuit: Circuit, n: int) -> np.ndarray:
    """Top-left ``N x N`` block: columns and rows with every non-data qubit at zero."""
    dim = 2**n
    cols = np.zeros((2**circuit.width, dim), dtype=complex)
    cols[np.arange(dim), np.arange(dim)] = 1.0
    return apply_circuit(circuit, cols)[:dim, :]


def _check_block_capacity(n: int) -> None:
    if n > 4:
        raise CapacityError(f"block extraction supports n <= 4, got {n}")


def verify_block_encoding(variant: SelectVariant | str, b, n: int) -> float:
    """Max-entry distance between the ancilla-zero block and ``H(b_hat) / sqrt(N)``, ``b_hat = b / |b|``."""
    _check_block_capacity(n)
    b, _ = normalize(as_vector(b, n))
    circuit = build_lcu_pipeline(variant, n, PipelineMode.ORACLE_KERNEL, kernel=b)
    block = ancilla_zero_block(circuit, n)
    return float(np.max(np.abs(block - symmetrized_operator(b, n) / math.sqrt(2**n))))


def symmetric_overlap_block(variant: SelectVariant | str, b, n: int) -> np.ndarray:
    _check_block_capacity(n)
    b, _ = normalize(as_vector(b, n))
    return ancilla_zero_block(build_symmetric_control(variant, b), n)


def symmetric_overlap_defect(variant: SelectVariant | str, b, n: int) -> float:
    """Distance between the symmetric-overlap block and ``sum_i |b_hat_i|^2 L_i``."""
    block = symmetric_overlap_block(variant, b, n)
    target = convolution_matrix(np.abs(normalize(as_vector(b, n))[0]) ** 2, n)
    return float(np.max(np.abs(block - target)))
