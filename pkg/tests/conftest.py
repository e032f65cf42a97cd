import numpy as np
import pytest
from scipy import integrate, special

_ACCEPTANCE = []


def record_acceptance(criterion, description, passed, detail=""):
    _ACCEPTANCE.append((criterion, description, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, description, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {criterion}: {description}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def exact_complex_mse(eta, gain, breakpoints=()):
    """E|z h(|z|) - eta|^2 for z ~ CN(eta, 1), eta >= 0, by radial quadrature.

    The angular integral is done analytically with modified Bessel functions,
    leaving one integral over |z|. Independent of any Monte Carlo path.
    """
    def f(r):
        h = gain(r)
        if h == 0.0:
            return 0.0
        return 2 * r * np.exp(-(r - eta) ** 2) * (
            r * r * h * h * special.ive(0, 2 * eta * r)
            - 2 * eta * r * h * special.ive(1, 2 * eta * r))

    hi = eta + 40.0
    pts = [p for p in breakpoints if 0 < p < hi]
    val, _ = integrate.quad(f, 0.0, hi, points=pts or None, limit=1000,
                            epsabs=1e-14, epsrel=1e-12)
    return eta * eta + val
