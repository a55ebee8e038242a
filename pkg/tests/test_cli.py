import argparse
import io
import math

import numpy as np
import pytest

from qconv.circuit import Circuit, GateKind, from_text, x
from qconv.cli import (
    EXIT_CAPACITY,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    cmd_verify,
    format_vector,
    main,
    parse_vector,
    read_vector,
    run_verify_suite,
    write_vector,
)
from qconv.shift_algebra import circular_convolve
from qconv.spectral import spectrum
from qconv.synthesis import SelectVariant, build_select_compiled


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_vector_round_trip(tmp_path, rng):
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    write_vector(tmp_path / "v.txt", v)
    assert np.array_equal(read_vector(tmp_path / "v.txt"), v)
    assert format_vector([1, 2j]).splitlines() == ["dim=2", "1.0 0.0", "0.0 2.0"]


@pytest.mark.parametrize(
    "text, msg",
    [
        ("dim=2\n1 0\n", "dim=2 but 1"),
        ("dim=2\n1 0\n0 x\n", "line 3"),
        ("dim=2\n1 0 0\n0 0\n", "line 2"),
        ("2\n1 0\n0 0\n", "line 1"),
        ("dim=3\n1 0\n0 0\n1 1\n", "power of two"),
    ],
)
def test_vector_parse_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_vector(text)


def test_synthesize_widths(tmp_path):
    code, out = cli("synthesize", "--variant", "compiled", "--n", "3", "--out", str(tmp_path / "c.txt"))
    assert code == EXIT_OK and "qubits: 6" in out
    assert (tmp_path / "c.txt").read_text().startswith("QUBITS 6\n")
    cli("synthesize", "--variant", "ripple", "--n", "3", "--out", str(tmp_path / "r.txt"))
    assert (tmp_path / "r.txt").read_text().startswith("QUBITS 7\n")


def test_synthesize_qft_phases_outside_reversal_layer(tmp_path):
    path = tmp_path / "q.txt"
    cli("synthesize", "--variant", "qft", "--n", "2", "--out", str(path))
    c = from_text(path.read_text())
    kinds = [g.kind for g in c.gates]
    # leading reversal layer holds only X gates; all controlled phases follow it
    assert kinds[:2] == [GateKind.X, GateKind.X]
    assert GateKind.CPHASE in kinds[2:]


def test_synthesize_capacity(tmp_path):
    code, _ = cli("synthesize", "--variant", "direct", "--n", "9", "--out", str(tmp_path / "x"))
    assert code == EXIT_USAGE


def test_convolve_delta_kernel(tmp_path):
    a = np.array([1, -2, 0.5j, 4])
    write_vector(tmp_path / "a.txt", a)
    write_vector(tmp_path / "b.txt", [1, 0, 0, 0])
    code, out = cli("convolve", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt"), "--out", str(tmp_path / "c.txt"))
    assert code == EXIT_OK
    assert np.max(np.abs(read_vector(tmp_path / "c.txt") - a)) <= 1e-12
    assert float(fields(out)["p_succ"]) == pytest.approx(0.25)


@pytest.mark.parametrize("variant", [v.value for v in SelectVariant])
def test_convolve_matches_oracle_listing(variant):
    base = ("convolve", "--n", "3", "--seed", "11", "--variant", variant)
    q_code, quantum = cli(*base)
    o_code, oracle = cli(*base, "--oracle")
    assert q_code == o_code == EXIT_OK
    assert quantum == oracle


def test_convolve_oracle_mode_matches(tmp_path):
    code, out = cli("convolve", "--n", "2", "--seed", "3", "--mode", "oracle", "--out", str(tmp_path / "c.txt"))
    rng = np.random.default_rng(3)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert code == EXIT_OK
    assert np.max(np.abs(read_vector(tmp_path / "c.txt") - circular_convolve(a, b))) <= 1e-10


def test_convolve_dimension_mismatch(tmp_path, capsys):
    write_vector(tmp_path / "a.txt", np.ones(4))
    write_vector(tmp_path / "b.txt", np.ones(8))
    code, _ = cli("convolve", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt"))
    assert code == EXIT_USAGE
    err = capsys.readouterr().err
    assert "4" in err and "8" in err


def test_convolve_zero_vector(tmp_path):
    write_vector(tmp_path / "a.txt", np.zeros(4))
    code, _ = cli("convolve", "--a", str(tmp_path / "a.txt"), "--n", "2")
    assert code == EXIT_USAGE


def test_convolve_postselection_impossible(tmp_path):
    write_vector(tmp_path / "a.txt", [1, 1])
    write_vector(tmp_path / "b.txt", [1, -1])
    code, _ = cli("convolve", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt"))
    assert code == EXIT_VERIFY


def test_convolve_deterministic(tmp_path):
    runs = []
    for k in range(2):
        path = tmp_path / f"c{k}.txt"
        cli("convolve", "--n", "3", "--seed", "5", "--out", str(path))
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]


def test_verify_default_passes(tmp_path):
    code, out = cli("verify", "--manifest", str(tmp_path / "m.txt"))
    m = fields(out)
    assert code == EXIT_OK and m["failed"] == "none" and m["n_max"] == "3" and m["seed"] == "0"
    for check in ("equivalence", "bridge", "hermiticity", "support", "block_encoding", "probability"):
        assert m[f"check.{check}.status"] == "pass"
        assert f"check.{check}.tolerance" in m
    assert (tmp_path / "m.txt").read_text() == out


def test_verify_capacity():
    assert cli("verify", "--n-max", "5")[0] == EXIT_CAPACITY


def flipped_control_compiled(n):
    """Compiled SELECT with the first carry gate's control negated."""
    good = build_select_compiled(n)
    seg = next(s for s in good.segments if s.label == "m=0")
    g = good.gates[seg.start]
    c0 = g.controls[0]
    gates = good.gates[: seg.start] + (x(c0), g, x(c0)) + good.gates[seg.start + 1 :]
    return Circuit(good.width, gates, good.registers)


def test_verify_mutation_reports_only_equivalence():
    checks = run_verify_suite(3, builders={SelectVariant.COMPILED: flipped_control_compiled})
    assert [c.name for c in checks if not c.passed] == ["equivalence"]
    out = io.StringIO()
    args = argparse.Namespace(n_max=3, seed=0, manifest=None)
    assert cmd_verify(args, out, builders={SelectVariant.COMPILED: flipped_control_compiled}) == EXIT_VERIFY
    m = fields(out.getvalue())
    assert m["failed"] == "equivalence"
    assert m["check.equivalence.status"] == "fail"


def test_estimate_slopes(tmp_path):
    for variant, model, target in [("compiled", "macro", 2), ("direct", "macro", 3), ("qft", "phase", 2)]:
        code, out = cli("estimate", "--variant", variant, "--model", model, "--n-range", "8:32")
        assert code == EXIT_OK
        assert abs(float(fields(out)["fitted_slope"]) - target) <= 0.3
    code, out = cli("estimate", "--variant", "ripple", "--n-range", "4:9", "--csv", str(tmp_path / "t.csv"))
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0] == "n,macro,cnot,variant" and len(rows) == 7


def test_estimate_amplified_runtime():
    code, out = cli("estimate", "--variant", "compiled", "--model", "cnot", "--n-range", "2:5", "--p-succ", "0.25")
    assert code == EXIT_OK
    assert "amplified_runtime_at_n=5" in out


@pytest.mark.parametrize("n_range, code", [("9", EXIT_USAGE), ("5:2", EXIT_USAGE), ("a:b", EXIT_USAGE), ("8:80", EXIT_CAPACITY)])
def test_estimate_bad_range(n_range, code):
    assert cli("estimate", "--variant", "direct", "--n-range", n_range)[0] == code


def test_pauli_shift_listing():
    code, out = cli("pauli", "--shift", "0", "--n", "1")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "X 1 0"
    assert fields(out)["support"] == "ok"


def test_pauli_kernel_file(tmp_path):
    write_vector(tmp_path / "b.txt", [0.25, 1.5])
    code, out = cli("pauli", "--b", str(tmp_path / "b.txt"))
    assert code == EXIT_OK
    assert out.splitlines()[:2] == ["I 1.5 0", "X 0.25 0"]


def test_pauli_random_and_capacity():
    code, out = cli("pauli", "--n", "4", "--seed", "2")
    assert code == EXIT_OK and float(fields(out)["y_weight"]) <= 1e-12
    assert cli("pauli", "--shift", "1", "--n", "6")[0] == EXIT_CAPACITY


def test_deconvolve_round_trip(tmp_path, rng):
    b = np.array([2.0, 0.3, -0.4, 0.1])
    a0 = rng.normal(size=4)
    write_vector(tmp_path / "b.txt", b)
    write_vector(tmp_path / "c.txt", circular_convolve(a0, b))
    code, out = cli("deconvolve", "--b", str(tmp_path / "b.txt"), "--c", str(tmp_path / "c.txt"), "--out", str(tmp_path / "a.txt"))
    assert code == EXIT_OK
    assert np.max(np.abs(read_vector(tmp_path / "a.txt") - a0)) <= 1e-10
    assert "kappa" in fields(out)


def kernel_with_kappa(kappa, n=3):
    """Random real kernel whose condition number is closest to ``kappa``."""
    rng = np.random.default_rng(0)
    candidates = [rng.normal(size=2**n) for _ in range(200)]
    return min(candidates, key=lambda b: abs(spectrum(b, n).kappa - kappa))


def test_deconvolve_route_degrees(tmp_path):
    write_vector(tmp_path / "b.txt", kernel_with_kappa(8.0))
    degrees = {}
    for route in ("hermitian", "normal"):
        code, out = cli("deconvolve", "--b", str(tmp_path / "b.txt"), "--n", "3", "--route", route, "--eps", "1e-3")
        assert code == EXIT_OK
        degrees[route] = int(fields(out)["degree"])
    assert degrees["hermitian"] < degrees["normal"]


def test_deconvolve_singular(tmp_path):
    write_vector(tmp_path / "b.txt", np.array([1, 1]) / math.sqrt(2))
    write_vector(tmp_path / "c.txt", [1, 1])
    base = ("deconvolve", "--b", str(tmp_path / "b.txt"), "--c", str(tmp_path / "c.txt"))
    assert cli(*base)[0] == EXIT_VERIFY
    assert cli(*base, "--pseudo-inverse")[0] == EXIT_OK


def test_usage_errors():
    assert cli()[0] == EXIT_USAGE
    assert cli("synthesize", "--variant", "nope", "--n", "2", "--out", "x")[0] == EXIT_USAGE
    assert cli("convolve")[0] == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["synthesize", "--variant", "direct", "--n", "2", "--out", "{tmp}/s.txt"],
        ["convolve", "--n", "2"],
        ["estimate", "--variant", "direct", "--n-range", "2:6"],
        ["pauli", "--n", "2"],
        ["deconvolve", "--n", "2"],
    ],
)
def test_seed_recorded_in_manifest(argv, tmp_path):
    argv = [a.replace("{tmp}", str(tmp_path)) for a in argv]
    manifest = tmp_path / "m.txt"
    code, _ = cli(*argv, "--seed", "42", "--manifest", str(manifest))
    assert code == EXIT_OK
    m = fields(manifest.read_text())
    assert m["seed"] == "42" and m["subcommand"] == argv[0]
