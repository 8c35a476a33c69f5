import numpy as np
import pytest

from qfeedback import _kernels_numpy, kernels

# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


BACKENDS = [pytest.param(_kernels_numpy, id="numpy")]
if kernels.numba_kernels is not None:
    BACKENDS.append(pytest.param(kernels.numba_kernels, id="numba"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {n}. {title}: {detail}")
