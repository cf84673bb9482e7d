import math

import numpy as np
import pytest


def fock_coeffs(alpha, D):
    """Direct number-basis expansion e^{-|a|^2/2} a^n / sqrt(n!), independent of the package."""
    alpha = complex(alpha)
    n = np.arange(D)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        out = np.zeros(D, complex)
        out[0] = 1
        return out
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_fact)
    return mag * np.exp(1j * n * np.angle(alpha))


def fock_state(terms, D=60):
    return sum(c * fock_coeffs(a, D) for c, a in terms)


def fock_inner(a_terms, b_terms, D=60):
    return complex(np.vdot(fock_state(a_terms, D), fock_state(b_terms, D)))


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def assert_same_terms(a, b, atol=1e-14):
    assert len(a) == len(b), (a, b)
    np.testing.assert_allclose(a.coeffs, b.coeffs, rtol=0, atol=atol)
    np.testing.assert_allclose(a.amps, b.amps, rtol=0, atol=atol)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.VERDICTS):
            terminalreporter.write_line(test_acceptance.VERDICTS[n])
