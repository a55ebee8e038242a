"""Command-line entry point: ``qconv <subcommand> ...``.

Exit codes: 0 success, 2 usage or input error, 3 verification or numerical
failure, 4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from qconv.circuit import Circuit, count_resources, to_text, unitary_of
from qconv.errors import (
    CapacityError,
    DataError,
    NotInvertibleError,
    PostselectionError,
    PromiseViolationError,
)
from qconv.pauli import pauli_decompose, reconstruct, verify_support
from qconv.resources import MODELS, MAX_STRUCTURAL_N, amplified_runtime, scaling_study, study_table
from qconv.shift_algebra import (
    as_vector,
    circular_convolve,
    convolution_matrix,
    normalize,
    num_qubits,
    reflected_generator,
    reflected_generator_expanded,
    reflected_generator_recursive,
    reflected_shift,
    reversal_matrix,
    select_matrix,
    shift_matrix,
    success_probability,
    symmetrized_operator,
)
from qconv.simulator import convolve_quantum, verify_block_encoding
from qconv.spectral import deconvolve_exact, deconvolve_polynomial, hermiticity_defect, spectrum
from qconv.synthesis import PipelineMode, SelectVariant, build_select

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAPACITY = 0, 2, 3, 4
VERIFY_MAX_N = 4
PAULI_MAX_N = 5


def fmt(x: float) -> str:
    return f"{x:.12g}"


# --- vector files -----------------------------------------------------------


def format_vector(v: np.ndarray) -> str:
    v = np.asarray(v, dtype=complex).reshape(-1)
    lines = [f"dim={v.size}"] + [f"{float(z.real)!r} {float(z.imag)!r}" for z in v]
    return "\n".join(lines) + "\n"


def parse_vector(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("dim="):
        raise DataError("line 1: expected header 'dim=<N>'")
    try:
        dim = int(lines[0][4:])
    except ValueError as exc:
        raise DataError(f"line 1: bad dimension {lines[0][4:]!r}") from exc
    body = [(i, ln) for i, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != dim:
        raise DataError(f"header declares dim={dim} but {len(body)} value lines follow")
    out = np.empty(dim, dtype=complex)
    for k, (lineno, ln) in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise DataError(f"line {lineno}: expected '<re> <im>', got {ln!r}")
        try:
            out[k] = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
    num_qubits(dim)
    return out


def read_vector(path) -> np.ndarray:
    return parse_vector(Path(path).read_text())


def write_vector(path, v) -> None:
    Path(path).write_text(format_vector(v))


def listing(v: np.ndarray) -> list[str]:
    """Twelve-digit rendering; entries far below the vector scale print as zero."""
    v = np.asarray(v, dtype=complex)
    floor = 1e-12 * max(float(np.max(np.abs(v))), 1e-300)

    def clean(x: float) -> float:
        return 0.0 if abs(x) < floor else x

    return [f"{k} {fmt(clean(z.real))} {fmt(clean(z.imag))}" for k, z in enumerate(v)]


# --- manifests --------------------------------------------------------------


@dataclass
class Manifest:
    subcommand: str
    entries: list[tuple[str, str]] = field(default_factory=list)

    def put(self, key: str, value) -> None:
        self.entries.append((key, value if isinstance(value, str) else str(value)))

    def render(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in [("subcommand", self.subcommand), *self.entries])


def _emit_manifest(manifest: Manifest, path) -> None:
    if path:
        Path(path).write_text(manifest.render())


def _random_complex(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


# --- verification suite -----------------------------------------------------


@dataclass
class Check:
    name: str
    tolerance: float
    defect: float = 0.0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.defect <= self.tolerance


def _select_block(circuit: Circuit, n: int) -> np.ndarray:
    # carry ancilla (if any) sits above index and data, so the zero sector is the leading block
    return unitary_of(circuit)[: 4**n, : 4**n]


def run_verify_suite(
    n_max: int,
    seed: int = 0,
    builders: dict[SelectVariant, Callable[[int], Circuit]] | None = None,
    trials: int = 5,
) -> list[Check]:
    """Equivalence, bridge, Hermiticity, support, block-encoding, and probability checks for n <= n_max."""
    if not 1 <= n_max <= VERIFY_MAX_N:
        raise CapacityError(f"verify supports 1 <= n-max <= {VERIFY_MAX_N}")
    builders = {v: (lambda n, v=v: build_select(v, n)) for v in SelectVariant} | dict(builders or {})
    rng = np.random.default_rng(seed)
    ns = range(1, n_max + 1)
    checks: list[Check] = []

    def timed(check: Check, fn) -> None:
        t0 = time.perf_counter()
        check.defect = float(fn())
        check.seconds = time.perf_counter() - t0
        checks.append(check)

    def equivalence():
        worst = 0.0
        for n in ns:
            blocks = [_select_block(builders[v](n), n) for v in SelectVariant]
            blocks.append(select_matrix(n))
            for i in range(len(blocks)):
                for j in range(i + 1, len(blocks)):
                    worst = max(worst, float(np.max(np.abs(blocks[i] - blocks[j]))))
        return worst

    def bridge():
        worst = 0.0
        for n in ns:
            u = reflected_generator(n)
            worst = max(worst, np.max(np.abs(u - reflected_generator_recursive(n))))
            worst = max(worst, np.max(np.abs(u - reflected_generator_expanded(n))))
            for i in range(2**n):
                worst = max(worst, np.max(np.abs(reflected_shift(i, n) - shift_matrix(i, n) @ reversal_matrix(n))))
            # adder variants: SELECT_L followed by the data-side reversal gives SELECT_L~
            bridge_j = np.kron(np.eye(2**n), reversal_matrix(n))
            for v in (SelectVariant.QFT, SelectVariant.RIPPLE):
                plain = _select_block(build_select(v, n, reflect=False), n)
                worst = max(worst, np.max(np.abs(plain @ bridge_j - select_matrix(n))))
            for _ in range(trials):
                b = _random_complex(rng, 2**n)
                diff = convolution_matrix(b, n) - symmetrized_operator(b, n) @ reversal_matrix(n)
                worst = max(worst, np.max(np.abs(diff)))
        return worst

    def hermiticity():
        return max(
            hermiticity_defect(symmetrized_operator(rng.normal(size=2**n), n)) for n in ns for _ in range(trials)
        )

    def support():
        ok = all(verify_support(i, n).ok for n in ns for i in range(2**n))
        ok = ok and all(verify_support(rng.normal(size=2**n), n).ok for n in ns for _ in range(trials))
        return 0.0 if ok else 1.0

    def block_encoding():
        return max(
            verify_block_encoding(SelectVariant.DIRECT, _random_complex(rng, 2**n), n) for n in ns for _ in range(trials)
        )

    def probability():
        worst = 0.0
        for n in ns:
            dim = 2**n
            delta = np.zeros(dim)
            delta[0] = 1.0
            _, p = convolve_quantum(_random_complex(rng, dim), delta, SelectVariant.DIRECT)
            worst = max(worst, abs(p - 1.0 / dim))
            for _ in range(trials):
                a, b = _random_complex(rng, dim), _random_complex(rng, dim)
                _, p = convolve_quantum(a, b, SelectVariant.DIRECT)
                worst = max(worst, abs(p - success_probability(a, b)))
        return worst

    timed(Check("equivalence", 1e-10), equivalence)
    timed(Check("bridge", 1e-12), bridge)
    timed(Check("hermiticity", 1e-12), hermiticity)
    timed(Check("support", 0.0), support)
    timed(Check("block_encoding", 1e-10), block_encoding)
    timed(Check("probability", 1e-10), probability)
    return checks


# --- subcommands ------------------------------------------------------------


def cmd_synthesize(args, out) -> int:
    circuit = build_select(args.variant, args.n)
    Path(args.out).write_text(to_text(circuit))
    rep = count_resources(circuit)
    print(f"variant: {SelectVariant(args.variant).value}", file=out)
    print(f"qubits: {circuit.width}", file=out)
    print(f"gates: {len(circuit.gates)}", file=out)
    print(f"macro_blocks: {rep.macro_blocks}", file=out)
    print(f"primitive_cnots: {rep.primitive_cnots}", file=out)
    print(f"phase_gates: {rep.phase_gates}", file=out)
    m = Manifest("synthesize")
    for k in ("variant", "n", "seed", "out"):
        m.put(k, getattr(args, k))
    m.put("gates", len(circuit.gates))
    _emit_manifest(m, args.manifest)
    return EXIT_OK


def _load_or_random(path, n, rng, name: str) -> np.ndarray:
    if path:
        return read_vector(path)
    if n is None:
        raise DataError(f"--{name} not given; pass --n to draw a random instance")
    return _random_complex(rng, 2**n)


def cmd_convolve(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    a = _load_or_random(args.a, args.n, rng, "a")
    b = _load_or_random(args.b, args.n, rng, "b")
    if a.size != b.size:
        raise DataError(f"dimension mismatch: a has dim {a.size}, b has dim {b.size}")
    n = num_qubits(a.size)
    _, na = normalize(a)
    _, nb = normalize(b)
    scale = math.sqrt(a.size) * na * nb
    if args.oracle:
        c = circular_convolve(a, b)
        p = success_probability(a, b)
    else:
        c, p = convolve_quantum(a, b, args.variant, args.mode)
    if args.out:
        write_vector(args.out, c)
    print(f"p_succ: {fmt(p)}", file=out)
    print(f"rescale: {fmt(scale)}", file=out)
    for line in listing(c):
        print(line, file=out)
    m = Manifest("convolve")
    m.put("variant", SelectVariant(args.variant).value)
    m.put("mode", "oracle-classical" if args.oracle else PipelineMode(args.mode).value)
    m.put("n", n)
    m.put("seed", args.seed)
    m.put("p_succ", fmt(p))
    m.put("rescale", fmt(scale))
    _emit_manifest(m, args.manifest)
    return EXIT_OK


def cmd_verify(args, out, builders=None) -> int:
    t0 = time.perf_counter()
    checks = run_verify_suite(args.n_max, args.seed, builders)
    m = Manifest("verify")
    m.put("n_max", args.n_max)
    m.put("seed", args.seed)
    for c in checks:
        m.put(f"check.{c.name}.tolerance", repr(c.tolerance))
        m.put(f"check.{c.name}.defect", fmt(c.defect))
        m.put(f"check.{c.name}.status", "pass" if c.passed else "fail")
        m.put(f"check.{c.name}.seconds", f"{c.seconds:.3f}")
    failed = [c.name for c in checks if not c.passed]
    m.put("failed", ",".join(failed) if failed else "none")
    m.put("seconds", f"{time.perf_counter() - t0:.3f}")
    text = m.render()
    out.write(text)
    _emit_manifest(m, args.manifest)
    return EXIT_VERIFY if failed else EXIT_OK


def _parse_range(text: str) -> list[int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise DataError(f"bad n-range {text!r}; expected LO:HI") from exc
    if lo < 1 or hi < lo:
        raise DataError(f"bad n-range {text!r}")
    if hi > MAX_STRUCTURAL_N:
        raise CapacityError(f"structural counting supports n <= {MAX_STRUCTURAL_N}")
    return list(range(lo, hi + 1))


def cmd_estimate(args, out) -> int:
    ns = _parse_range(args.n_range)
    table = study_table(args.variant, ns)
    if args.csv:
        Path(args.csv).write_text(table)
    out.write(table)
    s = scaling_study(args.variant, args.model, ns)
    print(f"model: {args.model}", file=out)
    print(f"fitted_slope: {fmt(s.fitted_slope)}", file=out)
    print(f"r_squared: {fmt(s.r_squared)}", file=out)
    if args.p_succ is not None:
        cost = s.counts[-1]
        print(f"amplified_runtime_at_n={ns[-1]}: {fmt(amplified_runtime(args.p_succ, cost))}", file=out)
    m = Manifest("estimate")
    for k in ("variant", "model", "n_range", "seed"):
        m.put(k, getattr(args, k))
    m.put("fitted_slope", fmt(s.fitted_slope))
    _emit_manifest(m, args.manifest)
    return EXIT_OK


def cmd_pauli(args, out) -> int:
    if args.b:
        b = read_vector(args.b)
        n = num_qubits(b.size)
        if args.n is not None and args.n != n:
            raise DataError(f"--n {args.n} disagrees with kernel dim {b.size}")
    else:
        if args.n is None:
            raise DataError("pass --n with --shift or for a random kernel")
        n = args.n
    if n > PAULI_MAX_N:
        raise CapacityError(f"pauli supports n <= {PAULI_MAX_N}")
    if args.b:
        target = as_vector(b, n)
    elif args.shift is not None:
        target = args.shift % 2**n
    else:
        target = np.random.default_rng(args.seed).normal(size=2**n)
    matrix = reflected_shift(target, n) if np.ndim(target) == 0 else symmetrized_operator(target, n)
    terms = pauli_decompose(matrix)
    for t in terms:
        print(f"{t.string} {fmt(t.coefficient.real)} {fmt(t.coefficient.imag)}", file=out)
    rep = verify_support(target, n)
    err = float(np.max(np.abs(reconstruct(terms, n) - matrix)))
    print(f"term_count: {rep.term_count}", file=out)
    print(f"bound: {rep.bound}", file=out)
    print(f"y_weight: {fmt(rep.y_weight)}", file=out)
    print(f"leading_factor_ok: {rep.leading_factor_ok}", file=out)
    print(f"reconstruction_error: {fmt(err)}", file=out)
    print(f"support: {'ok' if rep.ok else 'violated'}", file=out)
    m = Manifest("pauli")
    m.put("n", n)
    m.put("seed", args.seed)
    m.put("support", "ok" if rep.ok else "violated")
    _emit_manifest(m, args.manifest)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_deconvolve(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    if args.b:
        b = read_vector(args.b)
    elif args.n is None:
        raise DataError("--b not given; pass --n to draw a random real kernel")
    else:
        b = rng.normal(size=2**args.n)
    c = read_vector(args.c) if args.c else circular_convolve(rng.normal(size=b.size), b)
    if b.size != c.size:
        raise DataError(f"dimension mismatch: b has dim {b.size}, c has dim {c.size}")
    n = num_qubits(b.size)
    rep = spectrum(b, n)
    print(f"kappa: {fmt(rep.kappa)}", file=out)
    if args.route == "exact":
        a = deconvolve_exact(b, c, pseudo_inverse=args.pseudo_inverse)
    else:
        a, poly = deconvolve_polynomial(b, c, args.eps, args.route)
        print(f"degree: {poly.degree}", file=out)
        print(f"poly_sup_error: {fmt(poly.achieved_sup_error)}", file=out)
    residual = float(np.linalg.norm(circular_convolve(a, b) - c) / np.linalg.norm(c))
    print(f"relative_residual: {fmt(residual)}", file=out)
    if args.out:
        write_vector(args.out, a)
    for line in listing(a):
        print(line, file=out)
    m = Manifest("deconvolve")
    for k in ("route", "eps", "seed", "pseudo_inverse"):
        m.put(k, getattr(args, k))
    m.put("kappa", fmt(rep.kappa))
    m.put("relative_residual", fmt(residual))
    _emit_manifest(m, args.manifest)
    return EXIT_OK


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    variants = [v.value for v in SelectVariant]

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for random instances")
        p.add_argument("--manifest", help="write a key: value manifest here")

    p = sub.add_parser("synthesize", help="write a SELECT circuit in text form")
    p.add_argument("--variant", choices=variants, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)

    p = sub.add_parser("convolve", help="circular convolution through the simulated pipeline")
    p.add_argument("--a", help="input vector file (random if omitted)")
    p.add_argument("--b", help="kernel vector file (random if omitted)")
    p.add_argument("--n", type=int, help="qubit count for random inputs")
    p.add_argument("--variant", choices=variants, default=SelectVariant.COMPILED.value)
    p.add_argument("--mode", choices=[m.value for m in PipelineMode], default=PipelineMode.SUPPLIED_STATE.value)
    p.add_argument("--oracle", action="store_true", help="use the classical O(N^2) oracle instead")
    p.add_argument("--out")
    common(p)

    p = sub.add_parser("verify", help="run the equivalence and identity suites")
    p.add_argument("--n-max", type=int, default=3)
    common(p)

    p = sub.add_parser("estimate", help="structural gate counts and scaling fit")
    p.add_argument("--variant", choices=variants, required=True)
    p.add_argument("--n-range", default="8:32")
    p.add_argument("--model", choices=MODELS, default="macro")
    p.add_argument("--csv")
    p.add_argument("--p-succ", type=float, help="report amplified runtime at the largest n")
    common(p)

    p = sub.add_parser("pauli", help="Pauli expansion and support report")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--b", help="kernel vector file")
    src.add_argument("--shift", type=int, help="reflected shift index")
    p.add_argument("--n", type=int)
    common(p)

    p = sub.add_parser("deconvolve", help="recover a from c = a * b")
    p.add_argument("--b", help="kernel vector file (random real if omitted)")
    p.add_argument("--c", help="convolved vector file (synthesized if omitted)")
    p.add_argument("--n", type=int)
    p.add_argument("--route", choices=["exact", "hermitian", "normal"], default="exact")
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--pseudo-inverse", action="store_true")
    p.add_argument("--out")
    common(p)
    return parser


COMMANDS = {
    "synthesize": cmd_synthesize,
    "convolve": cmd_convolve,
    "verify": cmd_verify,
    "estimate": cmd_estimate,
    "pauli": cmd_pauli,
    "deconvolve": cmd_deconvolve,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NotInvertibleError, PromiseViolationError, PostselectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
