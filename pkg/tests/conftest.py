import numpy as np
import pytest
from hypothesis import settings

from qubit_decoherence.bath import BathSpectrum
from qubit_decoherence.models import SIGMA_Z_COUPLING

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def table1_bath():
    """Reference bath of the adiabatic table: J=1e-6, omega_c=30, kT=0."""
    def make(n=1, **kw):
        return BathSpectrum(J=kw.get("J", 1e-6), n=n, omega_c=kw.get("omega_c", 30.0),
                            temperature=kw.get("temperature", 0.0))
    return make


@pytest.fixture
def sz():
    return SIGMA_Z_COUPLING


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record and print one status line per acceptance criterion."""
    def report(tag, ok, detail):
        line = f"{tag} {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
