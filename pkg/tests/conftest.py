import numpy as np
import pytest


def random_hermitian(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (A + A.conj().T)


def random_pd(rng, n, floor=0.1):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X @ X.conj().T + floor * np.eye(n)


def random_phases(rng, n):
    return rng.uniform(0.0, 2.0 * np.pi, n)


def align(phases, ref):
    """Remove the global phase offset of ``phases`` relative to ``ref``; wrapped errors."""
    d = np.angle(np.exp(1j * (np.asarray(phases) - np.asarray(ref))))
    shift = np.angle(np.mean(np.exp(1j * d)))
    return np.angle(np.exp(1j * (d - shift)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES: dict = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str) -> None:
    """Store one PASS/FAIL line; printed in the terminal summary and echoed now."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
