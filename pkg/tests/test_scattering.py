import math

import mpmath
import numpy as np
import pytest

from modsurf import scattering
from modsurf.errors import ConvergenceError, DomainError, NearZetaZeroWarning, PoleError
from modsurf.hypgeom import HPoint, S, T, mobius_act


def _phi_mp(s):
    s = mpmath.mpmathify(s)
    return mpmath.sqrt(mpmath.pi) * mpmath.gamma(s - 0.5) * mpmath.zeta(2 * s - 1) / (mpmath.gamma(s) * mpmath.zeta(2 * s))


def _winding_oracle(lam: float) -> float:
    """1/2 + (arg Gamma(1/2 + i lam) - lam log pi + arg zeta(1 + 2i lam)) / pi,
    with arg zeta followed continuously from -pi/2 at lam = 0+."""

    grid = np.linspace(1e-4, lam, int(lam * 100) + 2)
    args = np.array([float(mpmath.arg(mpmath.zeta(mpmath.mpc(1, 2 * t)))) for t in grid])
    unwrapped = np.unwrap(args)
    unwrapped += -math.pi / 2 - round((unwrapped[0] + math.pi / 2) / (2 * math.pi)) * 2 * math.pi
    gamma_arg = float(mpmath.im(mpmath.loggamma(mpmath.mpc(0.5, lam))))
    return 0.5 + (gamma_arg - lam * math.log(math.pi) + unwrapped[-1]) / math.pi


def test_phi_at_two():
    assert scattering.phi_gamma1(2.0) == pytest.approx(complex(_phi_mp(2.0)), rel=1e-10)
    assert scattering.phi_gamma1(2.0).real == pytest.approx(1.7445, abs=1e-4)


def test_phi_at_half_is_minus_one():
    assert scattering.phi_at_half() == pytest.approx(-1.0, abs=1e-12)
    assert scattering.phi_gamma1(0.5) == pytest.approx(-1.0, abs=1e-12)


def test_numerical_limit_agrees_with_closed_form():
    coarse = scattering.phi_numeric_limit(1e-3)
    fine = scattering.phi_numeric_limit(1e-4)
    assert abs(coarse - fine) < 1e-6
    assert fine == pytest.approx(-1.0, abs=1e-6)


def test_phi_pole_at_one():
    with pytest.raises(PoleError):
        scattering.phi_gamma1(1.0)


@pytest.mark.parametrize("r", [0.3, 1.0, 5.0, 10.0, 50.0, 100.0, 200.0])
def test_phi_is_unitary_on_critical_line(r):
    assert abs(scattering.phi_gamma1(complex(0.5, r))) == pytest.approx(1.0, abs=1e-10)


def test_phi_functional_equation_and_conjugation():
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = complex(rng.uniform(-1.5, 2.5), rng.uniform(0.5, 30.0))
        product = scattering.phi_gamma1(s) * scattering.phi_gamma1(1 - s)
        assert abs(product - 1.0) < 1e-8
        assert scattering.phi_gamma1(s.conjugate()) == pytest.approx(scattering.phi_gamma1(s).conjugate(), rel=1e-12)


def test_log_derivative_matches_mpmath():
    s = complex(0.5, 7.0)
    expected = complex(mpmath.diff(_phi_mp, mpmath.mpc(s.real, s.imag)) / _phi_mp(mpmath.mpc(s.real, s.imag)))
    assert scattering.phi_log_derivative(s) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("r", [0.4, 3.0, 17.0])
def test_log_derivative_line_is_even(r):
    assert scattering.phi_log_derivative_line(-r) == pytest.approx(scattering.phi_log_derivative_line(r), abs=1e-9)


def test_log_derivative_line_is_continuous_at_zero():
    at_zero = scattering.phi_log_derivative_line(0.0)
    assert math.isfinite(at_zero)
    assert at_zero == pytest.approx(scattering.phi_log_derivative_line(0.002), abs=1e-3)


def test_log_derivative_warns_near_zero_of_zeta_2s():
    s = complex(0.25, 14.134725141734693 / 2.0)
    with pytest.warns(NearZetaZeroWarning):
        value = scattering.phi_log_derivative(s)
    assert isinstance(value, complex)


@pytest.mark.filterwarnings("error::modsurf.errors.NearZetaZeroWarning")
@pytest.mark.parametrize("r", [7.0673625708673465, 10.5, 24.0])
def test_log_derivative_line_never_warns(r):
    assert math.isfinite(scattering.phi_log_derivative_line(r))


@pytest.mark.parametrize("r", [10.0, 50.0, 100.0, 200.0])
def test_log_derivative_grows_logarithmically(r):
    assert abs(scattering.phi_log_derivative_line(r)) / math.log(r) <= 12.0


def test_scattering_value_bundle():
    value = scattering.scattering_value(complex(0.5, 3.0))
    assert abs(value.phi) == pytest.approx(1.0, abs=1e-10)
    assert value.log_deriv.real == pytest.approx(scattering.phi_log_derivative_line(3.0), abs=1e-9)


def test_winding_vanishes_at_zero():
    assert scattering.winding_number(0.0).M == 0.0
    with pytest.raises(DomainError):
        scattering.winding_number(-1.0)


def test_winding_matches_argument_oracle():
    record = scattering.winding_number(10.0)
    assert record.M == pytest.approx(_winding_oracle(10.0), abs=1e-6)


def test_winding_at_twenty_five():
    record = scattering.winding_number(25.0)
    assert record.M > 0
    assert abs(record.M) / (25.0 * math.log(25.0)) < 1.0
    assert record.M == pytest.approx(_winding_oracle(25.0), abs=1e-6)


def test_winding_stable_under_higher_order():
    base = scattering.winding_number(6.0)
    refined = scattering.winding_number(6.0, order=32)
    assert abs(base.M - refined.M) <= base.quadrature_error + 1e-9


def test_winding_table_accumulates():
    grid = np.arange(0.0, 6.01, 1.0)
    table = scattering.winding_table(grid)
    assert table[0].M == 0.0
    assert table[-1].M == pytest.approx(scattering.winding_number(6.0).M, abs=1e-8)
    with pytest.raises(DomainError):
        scattering.winding_table([2.0, 1.0])


def test_eisenstein_requires_convergent_region():
    with pytest.raises(ConvergenceError):
        scattering.eisenstein_eval(HPoint(0.0, 1.0), 1.0)


def test_eisenstein_is_invariant():
    z = HPoint(0.2, 1.3)
    base = scattering.eisenstein_eval(z, 2.0)
    for gamma in (S, T):
        moved = scattering.eisenstein_eval(mobius_act(gamma, z), 2.0)
        assert abs(moved.value - base.value) <= base.tail_estimate + moved.tail_estimate
    assert abs(base.value.imag) < 1e-12


@pytest.mark.parametrize("y", [2.0, 3.0, 5.0])
def test_eisenstein_constant_term(y):
    term = scattering.eisenstein_constant_term(y, 2.0)
    assert abs(term.value - term.expected) <= term.budget
    assert abs(term.value - term.expected) <= 1e-4 * abs(term.expected)
