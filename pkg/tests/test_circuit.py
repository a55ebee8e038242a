import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qconv.circuit import (
    Circuit,
    CircuitBuilder,
    CostModel,
    Gate,
    GateKind,
    count_resources,
    cphase,
    from_text,
    h,
    mcx,
    phase,
    swap,
    to_text,
    unitary_of,
    wrap_angle,
    x,
)
from qconv.errors import CapacityError, DataError


def dense_gate(g: Gate, w: int) -> np.ndarray:
    """Basis-by-basis oracle for a single gate, independent of the tensor kernel."""
    dim = 2**w
    m = np.zeros((dim, dim), dtype=complex)
    bit = lambda s, q: (s >> q) & 1
    for s in range(dim):
        ctrl = all(bit(s, c) for c in g.controls)
        if g.kind in (GateKind.X, GateKind.MCX):
            m[s ^ (1 << g.target) if ctrl else s, s] = 1
        elif g.kind is GateKind.H:
            s0, s1 = s & ~(1 << g.target), s | (1 << g.target)
            m[s0, s] = 1 / math.sqrt(2)
            m[s1, s] = (-1) ** bit(s, g.target) / math.sqrt(2)
        elif g.kind in (GateKind.PHASE, GateKind.CPHASE):
            m[s, s] = np.exp(1j * g.param) if ctrl and bit(s, g.target) else 1
        elif g.kind is GateKind.SWAP:
            o = g.controls[0]
            t = s
            if bit(s, g.target) != bit(s, o):
                t = s ^ (1 << g.target) ^ (1 << o)
            m[t, s] = 1
    return m


@st.composite
def gates(draw, w):
    kind = draw(st.sampled_from(list(GateKind)))
    qs = draw(st.permutations(range(w)))
    theta = draw(st.floats(-6.0, 6.0))
    if kind is GateKind.X:
        return x(qs[0])
    if kind is GateKind.H:
        return h(qs[0])
    if kind is GateKind.PHASE:
        return phase(qs[0], theta)
    if kind is GateKind.CPHASE:
        return cphase(qs[1], qs[0], theta)
    if kind is GateKind.SWAP:
        return swap(qs[0], qs[1])
    r = draw(st.integers(1, w - 1))
    return mcx(qs[1 : 1 + r], qs[0])


@st.composite
def circuits(draw, max_w=4, max_len=12):
    w = draw(st.integers(2, max_w))
    gs = draw(st.lists(gates(w), max_size=max_len))
    return Circuit(w, tuple(gs))


def test_append_examples():
    c = Circuit(2).append(x(0))
    assert len(c) == 1
    with pytest.raises(ValueError):
        Gate(GateKind.MCX, 1, (1,))
    c2 = Circuit(2).append(cphase(0, 1, math.pi))
    assert c2.gates[0].param == pytest.approx(math.pi)
    with pytest.raises(IndexError):
        Circuit(2).append(x(2))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate(GateKind.PHASE, 0)
    with pytest.raises(ValueError):
        Gate(GateKind.PHASE, 0, (), 7.0)
    with pytest.raises(ValueError):
        Gate(GateKind.X, 0, (), 1.0)
    with pytest.raises(ValueError):
        Gate(GateKind.SWAP, 0)
    assert mcx([], 3) == x(3)


@given(st.floats(-50, 50))
def test_wrap_angle_range(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi + 1e-12
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)


def test_unitary_examples():
    assert np.array_equal(unitary_of(Circuit(1, (x(0),))), [[0, 1], [1, 0]])
    cx = unitary_of(Circuit(2, (mcx([0], 1),)))
    expected = np.eye(4)[:, [0, 3, 2, 1]]
    assert np.array_equal(cx, expected)
    hh = unitary_of(Circuit(2, (h(0), h(1))))
    assert np.allclose(np.abs(hh), 0.5)
    assert np.allclose(hh, np.kron([[1, 1], [1, -1]], [[1, 1], [1, -1]]) / 2)


def test_unitary_capacity():
    with pytest.raises(CapacityError):
        unitary_of(Circuit(13))


@given(circuits())
def test_unitary_matches_gatewise_oracle(c):
    oracle = np.eye(2**c.width, dtype=complex)
    for g in c.gates:
        oracle = dense_gate(g, c.width) @ oracle
    assert np.allclose(unitary_of(c), oracle, atol=1e-12)


@given(circuits(), st.data())
def test_compose_is_application_order(c1, data):
    gs = data.draw(st.lists(gates(c1.width), max_size=8))
    c2 = Circuit(c1.width, tuple(gs))
    assert np.allclose(unitary_of(c1.compose(c2)), unitary_of(c2) @ unitary_of(c1), atol=1e-12)


@given(circuits())
def test_inverse_cancels(c):
    assert np.allclose(unitary_of(c.compose(c.inverse())), np.eye(2**c.width), atol=1e-12)


def test_compose_rejects_mismatch():
    with pytest.raises(ValueError):
        Circuit(2).compose(Circuit(3))
    with pytest.raises(ValueError):
        Circuit(2, registers={"a": (0, 1)}).compose(Circuit(2, registers={"a": (1, 2)}))
    with pytest.raises(ValueError):
        Circuit(2, registers={"a": (0, 2), "b": (1, 2)})


def test_cost_model():
    m = CostModel()
    assert [m.cost(r) for r in (0, 1, 2, 5)] == [0, 1, 6, 24]
    assert CostModel(alpha=4, beta=-2).cost(2) == 6
    with pytest.raises(ValueError):
        m.cost(-1)


def test_count_resources_examples():
    rep = count_resources(Circuit(3, (mcx([0], 1),)))
    assert (rep.macro_blocks, rep.primitive_cnots) == (1, 1)
    rep = count_resources(Circuit(3, (mcx([0, 1], 2),)))
    assert rep.primitive_cnots == 6
    rep = count_resources(Circuit(3, tuple(x(q) for q in (0, 1, 2, 0))))
    assert (rep.macro_blocks, rep.primitive_cnots) == (4, 0)
    rep = count_resources(Circuit(2, (h(0), cphase(0, 1, 1.0), swap(0, 1))))
    assert (rep.macro_blocks, rep.phase_gates) == (0, 1)


def test_count_resources_segments():
    bld = CircuitBuilder(3)
    bld.begin("J", interior=False)
    bld.add(x(0), x(1))
    bld.end()
    bld.begin("m=0")
    bld.add(mcx([2], 0), mcx([2, 0], 1))
    bld.end()
    rep = count_resources(bld.build())
    assert rep.interior_macro == 2 and rep.interior_cnots == 7
    assert rep.macro_blocks == 4
    assert rep.macro_blocks == sum(b.macro for b in [*rep.per_block.values(), *rep.global_layers.values()])


@given(circuits(), st.randoms(use_true_random=False))
def test_counts_invariant_under_relabeling(c, rnd):
    perm = list(range(c.width))
    rnd.shuffle(perm)
    relabeled = Circuit(c.width, tuple(g.relabel(perm) for g in c.gates))
    a, b = count_resources(c), count_resources(relabeled)
    assert (a.macro_blocks, a.primitive_cnots, a.phase_gates) == (b.macro_blocks, b.primitive_cnots, b.phase_gates)


@given(circuits())
def test_text_round_trip(c):
    c = Circuit(c.width, c.gates, {"data": (0, 1), "rest": (1, c.width)})
    back = from_text(to_text(c))
    assert back.gates == c.gates and back.registers == c.registers and back.width == c.width


def test_text_format_literal():
    c = Circuit(2, (mcx([1], 0), cphase(0, 1, 0.5)), {"data": (0, 1)})
    assert to_text(c) == "QUBITS 2\nREG data 0 1\nGATE MCX t=0 c=[1] p=-\nGATE CPHASE t=1 c=[0] p=0.5\n"


@pytest.mark.parametrize(
    "text, line",
    [
        ("QUBITS 2\nGATE MCX t=0 c=[1] p=-\nGATE FOO t=0 c=[] p=-\n", 3),
        ("QUBITS 2\nREG data 0\n", 2),
        ("QUBITS 2\nGATE X t=0 c=[] p=1.0\n", 2),
        ("QUBITS x\n", 1),
    ],
)
def test_text_errors_name_line(text, line):
    with pytest.raises(DataError, match=f"line {line}"):
        from_text(text)


def test_text_requires_header():
    with pytest.raises(DataError):
        from_text("GATE X t=0 c=[] p=-\n")
