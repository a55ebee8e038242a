"""Minimal gate-level IR: gates, circuits with register spans, dense unitaries, cost counts.

Gate order is application order: ``gates[0]`` acts on the state first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from qconv.errors import CapacityError, DataError

MAX_UNITARY_WIDTH = 12
TWO_PI = 2 * math.pi


class GateKind(str, enum.Enum):
    X = "X"
    H = "H"
    SWAP = "SWAP"
    PHASE = "PHASE"
    CPHASE = "CPHASE"
    MCX = "MCX"


def wrap_angle(theta: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    t = math.remainder(theta, TWO_PI)
    return math.pi if t == -math.pi else t


def is_identity_angle(theta: float, tol: float = 1e-14) -> bool:
    return abs(wrap_angle(theta)) <= tol


@dataclass(frozen=True)
class Gate:
    """One primitive operation.

    ``SWAP`` exchanges ``target`` with its single partner stored in
    ``controls``; the text format has no other slot for a second qubit.
    """

    kind: GateKind
    target: int
    controls: tuple[int, ...] = ()
    param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        qubits = (self.target, *self.controls)
        if min(qubits) < 0:
            raise ValueError(f"negative qubit index in {self}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"target and controls must be distinct: {self}")
        k = self.kind
        expected_controls = {GateKind.X: 0, GateKind.H: 0, GateKind.PHASE: 0, GateKind.SWAP: 1, GateKind.CPHASE: 1}
        if k in expected_controls and len(self.controls) != expected_controls[k]:
            raise ValueError(f"{k.value} takes {expected_controls[k]} control(s), got {len(self.controls)}")
        if k in (GateKind.PHASE, GateKind.CPHASE):
            if self.param is None or not (-TWO_PI < self.param <= TWO_PI):
                raise ValueError(f"{k.value} angle must lie in (-2pi, 2pi], got {self.param}")
        elif self.param is not None:
            raise ValueError(f"{k.value} carries no parameter")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target, *self.controls)

    def inverse(self) -> Gate:
        if self.kind in (GateKind.PHASE, GateKind.CPHASE):
            return replace(self, param=wrap_angle(-self.param))
        return self

    def relabel(self, mapping) -> Gate:
        return replace(self, target=mapping[self.target], controls=tuple(mapping[c] for c in self.controls))


def x(t: int) -> Gate:
    return Gate(GateKind.X, t)


def h(t: int) -> Gate:
    return Gate(GateKind.H, t)


def mcx(controls, t: int) -> Gate:
    controls = tuple(controls)
    return Gate(GateKind.MCX, t, controls) if controls else Gate(GateKind.X, t)


def phase(t: int, theta: float) -> Gate:
    return Gate(GateKind.PHASE, t, (), wrap_angle(theta))


def cphase(c: int, t: int, theta: float) -> Gate:
    return Gate(GateKind.CPHASE, t, (c,), wrap_angle(theta))


def swap(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, a, (b,))


@dataclass(frozen=True)
class Segment:
    """A labelled slice ``gates[start:stop]``; ``interior`` marks SELECT sub-blocks."""

    label: str
    start: int
    stop: int
    interior: bool = True


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    registers: dict = field(default_factory=dict)
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        regs = {name: (int(lo), int(hi)) for name, (lo, hi) in self.registers.items()}
        object.__setattr__(self, "registers", regs)
        spans = sorted(regs.values())
        for lo, hi in spans:
            if not (0 <= lo <= hi <= self.width):
                raise ValueError(f"register span [{lo}, {hi}) outside width {self.width}")
        for (_, hi), (lo, _) in zip(spans, spans[1:]):
            if lo < hi:
                raise ValueError("register spans overlap")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if max(g.qubits) >= self.width:
            raise IndexError(f"gate {g} touches a qubit outside width {self.width}")

    def __len__(self) -> int:
        return len(self.gates)

    def register(self, name: str) -> range:
        lo, hi = self.registers[name]
        return range(lo, hi)

    def append(self, gate: Gate) -> Circuit:
        self._check(gate)
        return replace(self, gates=self.gates + (gate,))

    def compose(self, other: Circuit) -> Circuit:
        """``self`` then ``other``; register maps must agree where both define a name."""
        if other.width != self.width:
            raise ValueError(f"width mismatch: {self.width} vs {other.width}")
        for name, span in other.registers.items():
            if name in self.registers and self.registers[name] != span:
                raise ValueError(f"register {name!r} differs between circuits")
        shift = len(self.gates)
        segs = self.segments + tuple(replace(s, start=s.start + shift, stop=s.stop + shift) for s in other.segments)
        return Circuit(self.width, self.gates + other.gates, {**self.registers, **other.registers}, segs)

    def inverse(self) -> Circuit:
        total = len(self.gates)
        segs = tuple(replace(s, start=total - s.stop, stop=total - s.start) for s in reversed(self.segments))
        return replace(self, gates=tuple(g.inverse() for g in reversed(self.gates)), segments=segs)

    def segment(self, label: str) -> Circuit:
        for s in self.segments:
            if s.label == label:
                return Circuit(self.width, self.gates[s.start : s.stop], self.registers)
        raise KeyError(label)


class CircuitBuilder:
    """Mutable accumulator used by the synthesis routines."""

    def __init__(self, width: int, registers: dict | None = None):
        self.width = width
        self.registers = dict(registers or {})
        self.gates: list[Gate] = []
        self.segments: list[Segment] = []
        self._open: tuple[str, int, bool] | None = None

    def add(self, *gates: Gate) -> CircuitBuilder:
        self.gates.extend(gates)
        return self

    def extend(self, circuit: Circuit, label: str | None = None, interior: bool = True) -> CircuitBuilder:
        start = len(self.gates)
        self.gates.extend(circuit.gates)
        if label is not None:
            self.segments.append(Segment(label, start, len(self.gates), interior))
        else:
            for s in circuit.segments:
                self.segments.append(replace(s, start=s.start + start, stop=s.stop + start))
        return self

    def begin(self, label: str, interior: bool = True) -> None:
        self._open = (label, len(self.gates), interior)

    def end(self) -> None:
        label, start, interior = self._open
        self.segments.append(Segment(label, start, len(self.gates), interior))
        self._open = None

    def build(self) -> Circuit:
        return Circuit(self.width, tuple(self.gates), self.registers, tuple(self.segments))


# --- dense action -----------------------------------------------------------


def _index(width: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * (width + 1)
    for q, bit in fixed.items():
        idx[width - 1 - q] = bit
    return tuple(idx)


def apply_gate(tensor: np.ndarray, gate: Gate, width: int) -> None:
    """Apply ``gate`` in place to amplitudes shaped ``(2,)*width + (batch,)``.

    Axis ``width - 1 - q`` holds qubit ``q`` so that a C-order reshape of the
    little-endian flat index lines up with the tensor axes.
    """
    k = gate.kind
    t = gate.target
    on = {c: 1 for c in gate.controls}
    if k in (GateKind.X, GateKind.MCX):
        i0, i1 = _index(width, {**on, t: 0}), _index(width, {**on, t: 1})
        tmp = tensor[i0].copy()
        tensor[i0] = tensor[i1]
        tensor[i1] = tmp
    elif k is GateKind.H:
        i0, i1 = _index(width, {t: 0}), _index(width, {t: 1})
        a0, a1 = tensor[i0].copy(), tensor[i1].copy()
        s = 1 / math.sqrt(2)
        tensor[i0] = s * (a0 + a1)
        tensor[i1] = s * (a0 - a1)
    elif k in (GateKind.PHASE, GateKind.CPHASE):
        tensor[_index(width, {**on, t: 1})] *= np.exp(1j * gate.param)
    elif k is GateKind.SWAP:
        (other,) = gate.controls
        i01, i10 = _index(width, {t: 0, other: 1}), _index(width, {t: 1, other: 0})
        tmp = tensor[i01].copy()
        tensor[i01] = tensor[i10]
        tensor[i10] = tmp
    else:  # pragma: no cover
        raise ValueError(f"unknown gate kind {k}")


def apply_circuit(circuit: Circuit, columns: np.ndarray) -> np.ndarray:
    """Apply ``circuit`` to every column of a ``(2**width, batch)`` array."""
    w = circuit.width
    tensor = np.array(columns, dtype=complex).reshape((2,) * w + (-1,))
    for g in circuit.gates:
        apply_gate(tensor, g, w)
    return tensor.reshape(2**w, -1)


def unitary_of(circuit: Circuit) -> np.ndarray:
    if circuit.width > MAX_UNITARY_WIDTH:
        raise CapacityError(f"dense unitary limited to {MAX_UNITARY_WIDTH} qubits, got {circuit.width}")
    return apply_circuit(circuit, np.eye(2**circuit.width, dtype=complex))


# --- cost accounting --------------------------------------------------------


@dataclass(frozen=True)
class CostModel:
    """Linear CNOT cost of an r-controlled X: 0, 1, then ``alpha*r + beta``."""

    alpha: int = 6
    beta: int = -6

    def cost(self, r: int) -> int:
        if r < 0:
            raise ValueError("control count must be non-negative")
        if r <= 1:
            return r
        return self.alpha * r + self.beta


@dataclass
class BlockCounts:
    macro: int = 0
    cnot: int = 0
    phase: int = 0
    other: int = 0

    def add(self, kind: GateKind, r: int, model: CostModel) -> None:
        if kind in (GateKind.X, GateKind.MCX):
            self.macro += 1
            self.cnot += model.cost(r)
        elif kind in (GateKind.PHASE, GateKind.CPHASE):
            self.phase += 1
        else:
            self.other += 1

    def __iadd__(self, o: BlockCounts) -> BlockCounts:
        self.macro += o.macro
        self.cnot += o.cnot
        self.phase += o.phase
        self.other += o.other
        return self


@dataclass
class ResourceReport:
    """Counts split into interior SELECT sub-blocks and global layers.

    ``macro_blocks`` and ``primitive_cnots`` are whole-circuit totals; the
    ``interior_*`` properties exclude global layers and feed scaling fits.
    """

    per_block: dict[str, BlockCounts]
    global_layers: dict[str, BlockCounts]
    model_params: CostModel

    def _total(self, attr: str, blocks) -> int:
        return sum(getattr(b, attr) for b in blocks)

    @property
    def macro_blocks(self) -> int:
        return self._total("macro", [*self.per_block.values(), *self.global_layers.values()])

    @property
    def primitive_cnots(self) -> int:
        return self._total("cnot", [*self.per_block.values(), *self.global_layers.values()])

    @property
    def phase_gates(self) -> int:
        return self._total("phase", [*self.per_block.values(), *self.global_layers.values()])

    @property
    def interior_macro(self) -> int:
        return self._total("macro", self.per_block.values())

    @property
    def interior_cnots(self) -> int:
        return self._total("cnot", self.per_block.values())

    @property
    def interior_phases(self) -> int:
        return self._total("phase", self.per_block.values())


def tally(items, model: CostModel = CostModel()) -> ResourceReport:
    """Build a report from ``(label, interior, kind, control_count)`` tuples."""
    per_block: dict[str, BlockCounts] = {}
    global_layers: dict[str, BlockCounts] = {}
    for label, interior, kind, r in items:
        bucket = per_block if interior else global_layers
        bucket.setdefault(label, BlockCounts()).add(GateKind(kind), r, model)
    return ResourceReport(per_block, global_layers, model)


def count_resources(circuit: Circuit, model: CostModel = CostModel()) -> ResourceReport:
    owner: list[tuple[str, bool]] = [("other", False)] * len(circuit.gates)
    for s in circuit.segments:
        for k in range(s.start, s.stop):
            owner[k] = (s.label, s.interior)

    def items():
        for (label, interior), g in zip(owner, circuit.gates):
            r = len(g.controls) if g.kind in (GateKind.X, GateKind.MCX) else 0
            yield label, interior, g.kind, r

    return tally(items(), model)


# --- text format ------------------------------------------------------------


def _fmt_param(p: float | None) -> str:
    return "-" if p is None else repr(float(p))


def to_text(circuit: Circuit) -> str:
    lines = [f"QUBITS {circuit.width}"]
    for name, (lo, hi) in circuit.registers.items():
        lines.append(f"REG {name} {lo} {hi}")
    for g in circuit.gates:
        ctrl = ",".join(str(c) for c in g.controls)
        lines.append(f"GATE {g.kind.value} t={g.target} c=[{ctrl}] p={_fmt_param(g.param)}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    width = None
    registers: dict[str, tuple[int, int]] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "QUBITS":
                width = int(rest[0])
            elif head == "REG":
                registers[rest[0]] = (int(rest[1]), int(rest[2]))
            elif head == "GATE":
                kind, t, c, p = rest
                assert t.startswith("t=") and c.startswith("c=[") and c.endswith("]") and p.startswith("p=")
                ctrl = tuple(int(v) for v in c[3:-1].split(",") if v)
                param = None if p[2:] == "-" else float(p[2:])
                gates.append(Gate(GateKind(kind), int(t[2:]), ctrl, param))
            else:
                raise ValueError(f"unknown record {head!r}")
        except (ValueError, IndexError, AssertionError) as exc:
            raise DataError(f"line {lineno}: cannot parse {raw!r} ({exc})") from exc
    if width is None:
        raise DataError("missing QUBITS header")
    return Circuit(width, tuple(gates), registers)
