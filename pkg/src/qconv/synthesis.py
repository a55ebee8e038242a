"""Gate-level SELECT realizations, state preparation, and the full convolution pipeline.

Register layout for every circuit built here: data D = [0, n), index
register A = [n, 2n), and for the ripple-carry adder one carry qubit at 2n.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np

from qconv.circuit import Circuit, CircuitBuilder, cphase, h, is_identity_angle, mcx, phase, swap, x
from qconv.errors import InvalidDimensionError
from qconv.shift_algebra import MAX_QUBITS, as_vector


class SelectVariant(str, enum.Enum):
    DIRECT = "direct"
    COMPILED = "compiled"
    QFT = "qft"
    RIPPLE = "ripple"


class PipelineMode(str, enum.Enum):
    ORACLE_KERNEL = "oracle"
    SUPPLIED_STATE = "supplied"


def layout(n: int, variant: SelectVariant | str = SelectVariant.DIRECT) -> dict[str, tuple[int, int]]:
    regs = {"data": (0, n), "ancilla_index": (n, 2 * n)}
    if SelectVariant(variant) is SelectVariant.RIPPLE:
        regs["carry"] = (2 * n, 2 * n + 1)
    return regs


def width_of(n: int, variant: SelectVariant | str) -> int:
    return 2 * n + (1 if SelectVariant(variant) is SelectVariant.RIPPLE else 0)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidDimensionError(f"n must lie in [1, {MAX_QUBITS}], got {n}")


def _data(n):
    return list(range(n))


def _index(n):
    return list(range(n, 2 * n))


def _reversal_layer(bld: CircuitBuilder, qubits) -> None:
    bld.begin("J", interior=False)
    bld.add(*(x(q) for q in qubits))
    bld.end()


# --- direct structural recursion --------------------------------------------


def synthesize_u(bld: CircuitBuilder, controls: list[int], qs: list[int]) -> None:
    """Controlled reflected generator on ``qs`` (``qs[0]`` least significant).

    The |0>-branch of the LSB recurses with the LSB appended as an
    X-conjugated control; the |1>-branch is a controlled reversal fan.
    """
    if len(qs) == 1:
        return
    q0, rest = qs[0], qs[1:]
    bld.add(x(q0))
    synthesize_u(bld, controls + [q0], rest)
    bld.add(x(q0))
    for q in rest:
        bld.add(mcx(controls + [q0], q))


def direct_block(bld: CircuitBuilder, control: int, qs: list[int]) -> None:
    """Controlled unit increment of ``qs`` as reversal layer then reflected generator."""
    for q in qs:
        bld.add(mcx([control], q))
    synthesize_u(bld, [control], qs)


# --- compiled carry chain ---------------------------------------------------


def compiled_increment(bld: CircuitBuilder, control: int, qs: list[int]) -> None:
    """Descending multi-controlled-X carry chain incrementing ``qs`` when ``control`` is set."""
    for k in range(len(qs) - 1, 0, -1):
        bld.add(mcx([control, *qs[:k]], qs[k]))
    bld.add(mcx([control], qs[0]))


def _shift_blocks(n: int, reflect: bool, block) -> Circuit:
    _check_n(n)
    bld = CircuitBuilder(2 * n, layout(n))
    d, a = _data(n), _index(n)
    if reflect:
        _reversal_layer(bld, d)
    for m in range(n):
        bld.begin(f"m={m}")
        block(bld, a[m], d[m:])
        bld.end()
    return bld.build()


@lru_cache(maxsize=None)
def build_select_direct(n: int, reflect: bool = True) -> Circuit:
    return _shift_blocks(n, reflect, direct_block)


@lru_cache(maxsize=None)
def build_select_compiled(n: int, reflect: bool = True) -> Circuit:
    return _shift_blocks(n, reflect, compiled_increment)


# --- QFT adder --------------------------------------------------------------


def qft_gates(qs: list[int]) -> list:
    """QFT with the final reversal swaps, matching ``F[t, k] = w^{kt} / sqrt(N)``."""
    n = len(qs)
    gates = []
    for j in range(n - 1, -1, -1):
        gates.append(h(qs[j]))
        for l in range(j - 1, -1, -1):
            gates.append(cphase(qs[l], qs[j], math.pi / 2 ** (j - l)))
    for i in range(n // 2):
        gates.append(swap(qs[i], qs[n - 1 - i]))
    return gates


def build_qft(n: int) -> Circuit:
    _check_n(n)
    return Circuit(n, tuple(qft_gates(list(range(n)))))


def phase_network(a: list[int], d: list[int]) -> list:
    """Controlled phases ``w^{i t}`` between index bit j and Fourier bit s."""
    n = len(d)
    gates = []
    for j in range(n):
        for s in range(n):
            theta = 2 * math.pi * 2 ** (j + s) / 2**n
            if not is_identity_angle(theta):
                gates.append(cphase(a[j], d[s], theta))
    return gates


@lru_cache(maxsize=None)
def build_select_qft(n: int, reflect: bool = True) -> Circuit:
    _check_n(n)
    bld = CircuitBuilder(2 * n, layout(n))
    d, a = _data(n), _index(n)
    if reflect:
        _reversal_layer(bld, d)
    fwd = qft_gates(d)
    bld.begin("qft")
    bld.add(*fwd)
    bld.end()
    bld.begin("phi")
    bld.add(*phase_network(a, d))
    bld.end()
    bld.begin("iqft")
    bld.add(*(g.inverse() for g in reversed(fwd)))
    bld.end()
    return bld.build()


# --- ripple-carry adder -----------------------------------------------------


def _maj(cin: int, b: int, a: int) -> list:
    return [mcx([a], b), mcx([a], cin), mcx([cin, b], a)]


def _uma(cin: int, b: int, a: int) -> list:
    return [mcx([cin, b], a), mcx([a], cin), mcx([cin], b)]


def ripple_adder_gates(a: list[int], d: list[int], carry: int) -> list:
    """In-place ``d <- d + a mod 2**n`` using MAJ/UMA with one clean carry qubit.

    The top sum bit is formed directly from the carry held in ``a[n-2]``,
    so no carry-out is produced.
    """
    n = len(d)
    if n == 1:
        return [mcx([a[0]], d[0])]
    carries = [carry] + a[:-1]
    gates = []
    for i in range(n - 1):
        gates += _maj(carries[i], d[i], a[i])
    gates += [mcx([a[n - 1]], d[n - 1]), mcx([a[n - 2]], d[n - 1])]
    for i in range(n - 2, -1, -1):
        gates += _uma(carries[i], d[i], a[i])
    return gates


@lru_cache(maxsize=None)
def build_select_ripple(n: int, reflect: bool = True) -> Circuit:
    _check_n(n)
    bld = CircuitBuilder(2 * n + 1, layout(n, SelectVariant.RIPPLE))
    d, a = _data(n), _index(n)
    if reflect:
        _reversal_layer(bld, d)
    bld.begin("adder")
    bld.add(*ripple_adder_gates(a, d, 2 * n))
    bld.end()
    return bld.build()


SELECT_BUILDERS = {
    SelectVariant.DIRECT: build_select_direct,
    SelectVariant.COMPILED: build_select_compiled,
    SelectVariant.QFT: build_select_qft,
    SelectVariant.RIPPLE: build_select_ripple,
}


def build_select(variant: SelectVariant | str, n: int, reflect: bool = True) -> Circuit:
    return SELECT_BUILDERS[SelectVariant(variant)](n, reflect)


# --- state preparation ------------------------------------------------------


def build_prep_uniform(n: int) -> Circuit:
    """Hadamard on every qubit; self-inverse."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    return Circuit(n, tuple(h(q) for q in range(n)))


def _ry_half(q: int, theta: float) -> list:
    # S H P(theta) H S^dag = e^{i theta/2} Ry(theta)
    return [phase(q, -math.pi / 2), h(q), phase(q, theta), h(q), phase(q, math.pi / 2)]


def _pattern_ry(controls: list[int], pattern: int, q: int, theta: float) -> list:
    """Ry(theta) on ``q`` when ``controls`` read ``pattern`` (bit k <-> controls[k]).

    Uses Ry(t) = Ry(t/2) X Ry(-t/2) X; the e^{+-i t/4} factors of the two
    half rotations cancel, so the off branch is exactly the identity.
    """
    flips = [x(c) for k, c in enumerate(controls) if not (pattern >> k) & 1]
    body = [mcx(controls, q), *_ry_half(q, -theta / 2), mcx(controls, q), *_ry_half(q, theta / 2)]
    return flips + body + flips


def _diagonal_phase(n: int, phases: np.ndarray) -> list:
    """Exact ``diag(exp(i*phases))`` from parity phase gadgets plus a global-phase pair."""
    dim = 2**n
    idx = np.arange(dim)
    gates = []
    total = 0.0
    for s in range(dim):
        signs = np.where(np.array([bin(v).count("1") % 2 for v in idx & s]) == 1, -1.0, 1.0)
        alpha = float(np.dot(phases, signs) / dim)
        if abs(alpha) < 1e-15:
            continue
        total += alpha
        if s == 0:
            continue
        qubits = [q for q in range(n) if (s >> q) & 1]
        pivot, others = qubits[-1], qubits[:-1]
        fan = [mcx([o], pivot) for o in others]
        # exp(i alpha Z) = e^{i alpha} P(-2 alpha)
        gates += fan + [phase(pivot, -2 * alpha)] + fan[::-1]
    if not is_identity_angle(total):
        # P(g) then X P(g) X multiplies the whole state by e^{ig}
        gates += [phase(0, total), x(0), phase(0, total), x(0)]
    return gates


def build_prep_state(b) -> Circuit:
    """Binary-tree preparation of ``sum_i b_i |i>`` from ``|0...0>``.

    Magnitudes come from pattern-controlled Y rotations, most significant
    qubit first; phases from a diagonal layer. The result is phase-exact.
    """
    b = as_vector(b)
    n = b.size.bit_length() - 1
    if n > MAX_QUBITS:
        raise InvalidDimensionError(f"state preparation supports n <= {MAX_QUBITS}")
    if abs(np.linalg.norm(b) - 1.0) > 1e-10:
        raise ValueError(f"kernel must be normalized, got norm {np.linalg.norm(b):.6g}")
    weights = np.abs(b) ** 2
    gates = []
    for level in range(n):
        q = n - 1 - level
        higher = list(range(q + 1, n))
        for pattern in range(2**level):
            # indices whose bits above q equal pattern, split by bit q
            block = weights.reshape(2**level, 2, 2**q)[pattern]
            w0, w1 = math.sqrt(block[0].sum()), math.sqrt(block[1].sum())
            if w1 <= 1e-15:
                continue
            theta = 2 * math.atan2(w1, w0)
            gates += _pattern_ry(higher, pattern, q, theta)
    phases = np.where(np.abs(b) > 1e-15, np.angle(b), 0.0)
    if np.any(np.abs(phases) > 1e-15):
        gates += _diagonal_phase(n, phases)
    return Circuit(n, tuple(gates))


# --- pipeline ---------------------------------------------------------------


def embed(circuit: Circuit, qubits: list[int], width: int) -> Circuit:
    mapping = dict(enumerate(qubits))
    return Circuit(width, tuple(g.relabel(mapping) for g in circuit.gates))


def build_lcu_pipeline(
    variant: SelectVariant | str,
    n: int,
    mode: PipelineMode | str = PipelineMode.SUPPLIED_STATE,
    kernel=None,
) -> Circuit:
    """PREP_b on A (oracle mode only), SELECT of reflected shifts, PREP_u^dag on A.

    Postselecting A on zero leaves ``H(b) a / sqrt(N)`` on D for a
    normalized kernel. In supplied-state mode the kernel amplitudes are
    injected into A by the caller and no kernel-dependent block appears.
    """
    variant, mode = SelectVariant(variant), PipelineMode(mode)
    _check_n(n)
    w = width_of(n, variant)
    a = _index(n)
    bld = CircuitBuilder(w, layout(n, variant))
    if mode is PipelineMode.ORACLE_KERNEL:
        if kernel is None:
            raise ValueError("oracle-kernel mode needs the kernel vector")
        bld.extend(embed(build_prep_state(as_vector(kernel, n)), a, w), label="prep_b", interior=False)
    elif kernel is not None:
        raise ValueError("supplied-state mode takes no kernel; inject it into A instead")
    bld.extend(build_select(variant, n))
    bld.extend(embed(build_prep_uniform(n).inverse(), a, w), label="prep_u_dag", interior=False)
    return bld.build()


def build_symmetric_control(variant: SelectVariant | str, kernel) -> Circuit:
    """Negative control: PREP_b on both sides of the unreflected SELECT.

    Its ancilla-zero block is ``sum_i |b_i|^2 L_i``, so kernel phases are lost.
    """
    variant = SelectVariant(variant)
    b = as_vector(kernel)
    n = b.size.bit_length() - 1
    w = width_of(n, variant)
    a = _index(n)
    prep = embed(build_prep_state(b), a, w)
    bld = CircuitBuilder(w, layout(n, variant))
    bld.extend(prep, label="prep_b", interior=False)
    bld.extend(build_select(variant, n, reflect=False))
    bld.extend(prep.inverse(), label="prep_b_dag", interior=False)
    return bld.build()
