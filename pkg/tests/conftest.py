import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def complex_vectors(draw, n=None, min_n=1, max_n=4, nonzero=True):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    re = draw(arrays(np.float64, 2**n, elements=finite))
    im = draw(arrays(np.float64, 2**n, elements=finite))
    v = re + 1j * im
    if nonzero and np.linalg.norm(v) < 1e-3:
        v[0] += 1.0
    return v


@st.composite
def real_vectors(draw, n=None, min_n=1, max_n=4):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    v = draw(arrays(np.float64, 2**n, elements=finite))
    if np.linalg.norm(v) < 1e-3:
        v[0] += 1.0
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_complex(rng, dim):
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


def fft_convolve(a, b):
    """Independent oracle: convolution theorem via numpy's FFT."""
    return np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
