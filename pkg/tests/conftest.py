import numpy as np
import pytest

from losr.linalg import omega, proj

PHI_PLUS = omega(2) / np.sqrt(2)
SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
Z_POVM = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
X_POVM = [proj(np.array([1, 1]) / np.sqrt(2)), proj(np.array([1, -1]) / np.sqrt(2))]


@pytest.fixture
def phi_plus_rho():
    return proj(PHI_PLUS)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in RESULTS:
            terminalreporter.write_line(r.line())
