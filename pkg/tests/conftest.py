import sys

import numpy as np
import pytest

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def site_op(P, i, n):
    """Pauli P on site i of n, qubit 0 as least significant bit, built by kron."""
    out = np.eye(1, dtype=complex)
    for k in reversed(range(n)):
        out = np.kron(out, P if k == i else I2)
    return out


def kron_hamiltonian(n, J, w, hx, hz):
    """Textbook construction of the disordered Heisenberg chain, used as an oracle."""
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n - 1):
        for P in (X, Y, Z):
            H += J * site_op(P, i, n) @ site_op(P, i + 1, n)
    for i in range(n):
        H += w * (hx[i] * site_op(X, i, n) + hz[i] * site_op(Z, i, n))
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(20210215)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
