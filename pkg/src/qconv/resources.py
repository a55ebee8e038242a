"""Structural gate counts for the SELECT realizations and log-log scaling fits.

Counts here come from closed-form per-block gate tallies rather than from
built circuits, so they reach n = 64; the tests check that both paths agree
wherever the builders run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qconv.circuit import CostModel, GateKind, ResourceReport, tally
from qconv.errors import DataError
from qconv.synthesis import SelectVariant

MODELS = ("macro", "cnot", "phase", "gates")
MAX_STRUCTURAL_N = 64

X, MCX, H, CPHASE, SWAP = GateKind.X, GateKind.MCX, GateKind.H, GateKind.CPHASE, GateKind.SWAP


def mcx_cnot_cost(r: int, model: CostModel = CostModel()) -> int:
    return model.cost(r)


def _direct_block(k: int):
    # reversal fan, then per recursion level two X conjugations and a fan of
    # (k - level - 1) gates carrying level + 2 controls
    yield MCX, 1, k
    for level in range(k - 1):
        yield X, 0, 2
        yield MCX, level + 2, k - level - 1


def _compiled_block(k: int):
    yield MCX, 1, 1
    for r in range(2, k + 1):
        yield MCX, r, 1


def _structure(variant: SelectVariant, n: int):
    """Yield ``(label, interior, kind, controls, multiplicity)`` for SELECT of reflected shifts."""
    yield "J", False, X, 0, n
    if variant in (SelectVariant.DIRECT, SelectVariant.COMPILED):
        block = _direct_block if variant is SelectVariant.DIRECT else _compiled_block
        for m in range(n):
            for kind, r, mult in block(n - m):
                yield f"m={m}", True, kind, r, mult
    elif variant is SelectVariant.QFT:
        for label in ("qft", "iqft"):
            yield label, True, H, 0, n
            yield label, True, CPHASE, 0, n * (n - 1) // 2
            yield label, True, SWAP, 0, n // 2
        yield "phi", True, CPHASE, 0, n * (n + 1) // 2
    elif variant is SelectVariant.RIPPLE:
        if n == 1:
            yield "adder", True, MCX, 1, 1
        else:
            # n-1 MAJ and n-1 UMA, each two CX and one Toffoli, plus the top sum bit
            yield "adder", True, MCX, 1, 4 * (n - 1) + 2
            yield "adder", True, MCX, 2, 2 * (n - 1)


def count_variant(variant: SelectVariant | str, n: int, model: CostModel = CostModel()) -> ResourceReport:
    variant = SelectVariant(variant)
    if not 1 <= n <= MAX_STRUCTURAL_N:
        raise ValueError(f"structural counting supports 1 <= n <= {MAX_STRUCTURAL_N}")

    def items():
        for label, interior, kind, r, mult in _structure(variant, n):
            for _ in range(mult):
                yield label, interior, kind, r

    return tally(items(), model)


def interior_count(report: ResourceReport, model: str) -> int:
    if model == "macro":
        return report.interior_macro
    if model == "cnot":
        return report.interior_cnots
    if model == "phase":
        return report.interior_phases
    if model == "gates":
        return sum(b.macro + b.phase + b.other for b in report.per_block.values())
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


@dataclass(frozen=True)
class ScalingStudy:
    variant: str | None
    model: str | None
    n_values: tuple[int, ...]
    counts: tuple[int, ...]
    fitted_slope: float
    r_squared: float


def fit_scaling(n_values, counts, variant: str | None = None, model: str | None = None) -> ScalingStudy:
    """Least-squares slope of log(count) against log(n) over the larger-n half."""
    ns = np.asarray(n_values, dtype=float)
    cs = np.asarray(counts, dtype=float)
    if ns.size < 4 or ns.size != cs.size:
        raise DataError("need at least four (n, count) pairs")
    if np.any(np.diff(ns) <= 0):
        raise DataError("n values must be strictly increasing")
    if np.any(cs <= 0) or np.any(np.diff(cs) <= 0):
        raise DataError(f"counts must be positive and strictly increasing in n: {list(counts)}")
    half = ns.size // 2
    lx, ly = np.log(ns[half:]), np.log(cs[half:])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingStudy(variant, model, tuple(int(v) for v in ns), tuple(int(c) for c in cs), float(slope), r2)


def scaling_study(
    variant: SelectVariant | str, model: str, n_values, cost_model: CostModel = CostModel()
) -> ScalingStudy:
    variant = SelectVariant(variant)
    counts = [interior_count(count_variant(variant, int(n), cost_model), model) for n in n_values]
    return fit_scaling(list(n_values), counts, variant.value, model)


def amplified_runtime(p_succ: float, block_cost: float) -> float:
    """Expected cost with amplitude amplification, ``block_cost / sqrt(p_succ)``."""
    if not 0.0 < p_succ <= 1.0:
        raise ValueError(f"success probability must lie in (0, 1], got {p_succ}")
    return block_cost / math.sqrt(p_succ)


def study_table(variant: SelectVariant | str, n_values, cost_model: CostModel = CostModel()) -> str:
    """Comma-separated table with columns ``n,macro,cnot,variant``."""
    variant = SelectVariant(variant)
    rows = ["n,macro,cnot,variant"]
    for n in n_values:
        rep = count_variant(variant, int(n), cost_model)
        rows.append(f"{int(n)},{rep.interior_macro},{rep.interior_cnots},{variant.value}")
    return "\n".join(rows) + "\n"
