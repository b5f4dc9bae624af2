import math

import mpmath
import numpy as np
import pytest

from modsurf import config as config_module
from modsurf import maass
from modsurf.hypgeom import fundamental_domain_area
from modsurf.schemas import FourierCoefficients, LengthSpectrumEntry, Symmetry
from modsurf.traceform import make_bump_pair, make_gaussian_pair

FIRST_ODD_R = 9.5336952613
FIRST_EVEN_R = 13.7797513519


@pytest.fixture(autouse=True)
def reset_config(monkeypatch):
    for key in list(config_module.RunConfig.model_fields):
        monkeypatch.delenv(f"MODSURF_{key.upper()}", raising=False)
    config_module.get_config.cache_clear()
    yield
    config_module.get_config.cache_clear()


@pytest.fixture(scope="session")
def unit_bump():
    return make_bump_pair(1.0).normalized()


@pytest.fixture(scope="session")
def narrow_gaussian():
    return make_gaussian_pair(0.2)


def synthetic_hecke_coefficients(size: int, symmetry=Symmetry.EVEN, r: float = 7.0, seed: int = 3):
    """Coefficients that satisfy the Hecke relations exactly.

    a(p) is drawn in [-2, 2]; prime powers follow a(p^{k+1}) = a(p)a(p^k) - a(p^{k-1})
    and composite indices are multiplicative.
    """

    rng = np.random.default_rng(seed)
    a = np.zeros(size + 1)
    a[1] = 1.0
    for n in range(2, size + 1):
        p = next(d for d in range(2, n + 1) if n % d == 0)
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            a[n] = a[m] * a[p**k]
        elif k == 1:
            a[n] = rng.uniform(-2.0, 2.0)
        else:
            a[n] = a[p] * a[p ** (k - 1)] - (a[p ** (k - 2)] if k >= 2 else 0.0)
    return FourierCoefficients(symmetry, r, a[1:])


@pytest.fixture
def hecke_coefficients():
    return synthetic_hecke_coefficients(64)


def _found(interval, symmetry):
    points = maass.eigenvalue_search(interval, symmetry, 0.02)
    assert len(points) == 1
    return points[0]


@pytest.fixture(scope="session")
def first_odd_form():
    return _found((9.45, 9.65), Symmetry.ODD)


@pytest.fixture(scope="session")
def first_even_form():
    return _found((13.7, 13.86), Symmetry.EVEN)


@pytest.fixture(scope="session")
def spectrum_to_25():
    """All cusp-form r below 25, both symmetries."""

    rs = []
    for symmetry in Symmetry:
        rs.extend(p.r for p in maass.eigenvalue_search((1.0, 25.0), symmetry, 0.02))
    return np.sort(np.array(rs))


@pytest.fixture(scope="session")
def domain_area():
    """Area of SL(2, Z)\\H computed by quadrature."""

    return fundamental_domain_area()


@pytest.fixture(scope="session")
def closed_trace_data(domain_area):
    """Gaussian pair, lengths and spectrum for which the torsion-free identity
    holds at the area of SL(2, Z)\\H, with both sides computed independently."""

    sigma = 1.5
    pair = make_gaussian_pair(sigma)
    lengths = [LengthSpectrumEntry(ell=1.5, ell0=1.5, mult=1), LengthSpectrumEntry(ell=3.0, ell0=1.5, mult=2)]
    with mpmath.workdps(30):
        integral = mpmath.quad(
            lambda r: mpmath.exp(-((r / sigma) ** 2)) * r * mpmath.tanh(mpmath.pi * r),
            [0, 2 * sigma, mpmath.inf],
        )
    identity = domain_area / (2.0 * math.pi) * float(integral)
    amplitude = sigma / (2.0 * math.sqrt(math.pi))
    hyperbolic = sum(
        e.mult * e.ell0 * amplitude * math.exp(-((sigma * e.ell) ** 2) / 4.0) / (2.0 * math.sinh(e.ell / 2.0))
        for e in lengths
    )
    first = 2.5
    remainder = identity + hyperbolic - math.exp(-((first / sigma) ** 2))
    assert 0.0 < remainder < 1.0
    return pair, [first, sigma * math.sqrt(-math.log(remainder))], lengths
