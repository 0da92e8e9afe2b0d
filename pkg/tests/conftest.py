import numpy as np
import pytest

from hermricci.forms import PQForm, antisymmetrize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hpd(rng, n, batch=()):
    a = rng.standard_normal(batch + (n, n)) + 1j * rng.standard_normal(batch + (n, n))
    return a @ np.conj(np.swapaxes(a, -1, -2)) + n * np.eye(n)


def random_form(rng, p, q, n, batch=()):
    c = rng.standard_normal(batch + (n,) * (p + q)) + 1j * rng.standard_normal(batch + (n,) * (p + q))
    nd = c.ndim
    c = antisymmetrize(c, tuple(range(nd - p - q, nd - q)))
    c = antisymmetrize(c, tuple(range(nd - q, nd)))
    return PQForm(p, q, n, c)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
