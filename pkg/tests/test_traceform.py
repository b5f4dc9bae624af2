import math

import numpy as np
import pytest

from modsurf import traceform
from modsurf.errors import DomainError, TruncatedSpectrumWarning
from modsurf.quadrature import integrate, integrate_semi_infinite
from modsurf.schemas import LengthSpectrumEntry
from modsurf.traceform import make_bump_pair, make_gaussian_pair



def test_bump_transform_basics(unit_bump):
    raw = make_bump_pair(1.0)
    assert raw.h(0.0) == pytest.approx(1.0, abs=1e-12)
    r = np.linspace(0.0, 100.0, 501)
    assert np.allclose(raw.h(r), raw.h(-r), rtol=0, atol=1e-15)
    assert np.all(np.abs(raw.h(r)) * (1.0 + r) ** 2 < 10.0)
    assert unit_bump.h_mass == pytest.approx(1.0, abs=1e-12)


def test_bump_mass_matches_integral_of_h():
    pair = make_bump_pair(1.0)
    mass = 2.0 * float(integrate_semi_infinite(pair.h, 0.0, abs_tol=1e-11, rel_tol=1e-11, min_width=1e-3))
    assert mass == pytest.approx(pair.h_mass, abs=1e-8)


def test_bump_cumulative_runs_from_zero_to_mass():
    pair = make_bump_pair(2.0)
    assert pair.h_cumulative(0.0) == pytest.approx(0.5 * pair.h_mass, abs=1e-14)
    assert pair.h_cumulative(pair.tail_radius) == pytest.approx(pair.h_mass, abs=1e-8)
    assert pair.h_cumulative(-pair.tail_radius) == pytest.approx(0.0, abs=1e-8)


def test_bump_vanishes_outside_support():
    pair = make_bump_pair(0.5)
    assert np.all(pair.g(np.array([0.5, 0.7, -3.0])) == 0.0)
    assert pair.g(0.0) == pytest.approx(pair.g_at_zero(), rel=1e-12)


def test_pair_parameters_must_be_positive():
    with pytest.raises(DomainError):
        make_bump_pair(0.0)
    with pytest.raises(DomainError):
        make_gaussian_pair(-1.0)


def test_gaussian_pair_is_consistent():
    pair = make_gaussian_pair(0.7)
    u = np.array([0.0, 0.4, 2.0])
    transform = np.array(
        [float(integrate(lambda v: 2.0 * pair.g(v) * np.cos(r * v), 0.0, 60.0, abs_tol=1e-13)) for r in (0.0, 1.0, 2.5)]
    )
    assert transform == pytest.approx(pair.h(np.array([0.0, 1.0, 2.5])), abs=1e-10)
    assert pair.g_at_zero() == pytest.approx(float(pair.g(u)[0]), rel=1e-12)


def test_plancherel_term_is_linear_and_accurate(narrow_gaussian, domain_area):
    single = traceform.plancherel_term(narrow_gaussian, domain_area)
    doubled = traceform.plancherel_term(narrow_gaussian.scaled(2.0), domain_area)
    assert doubled == pytest.approx(2.0 * single, rel=1e-10)
    refined = traceform.plancherel_term(narrow_gaussian, domain_area, order=32)
    assert refined == pytest.approx(single, abs=1e-10)
    direct = domain_area / (2 * math.pi) * float(
        integrate(lambda r: narrow_gaussian.h(r) * r * np.tanh(math.pi * r), 0.0, 3.0, abs_tol=1e-14, rel_tol=1e-14)
    )
    assert single == pytest.approx(direct, abs=1e-10)


def test_geometric_side_zero_beyond_support():
    pair = make_bump_pair(0.5)
    lengths = [LengthSpectrumEntry(ell=1.9248473002, ell0=1.9248473002, mult=1)]
    assert traceform.geometric_side(pair, lengths) == 0.0


def test_geometric_side_single_length():
    pair = make_bump_pair(3.0)
    entry = LengthSpectrumEntry(ell=2.0, ell0=1.0, mult=2)
    expected = 2 * 1.0 * float(pair.g(2.0)) / (2.0 * math.sinh(1.0))
    assert traceform.geometric_side(pair, [entry]) == pytest.approx(expected, rel=1e-12)
    assert traceform.geometric_side(pair, []) == 0.0


def test_spectral_side():
    pair = make_gaussian_pair(1.0)
    assert traceform.spectral_side(pair, []) == 0.0
    assert traceform.spectral_side(pair, [0.0]) == pytest.approx(1.0)
    rs = [0.5, 1.5]
    one = traceform.spectral_side(pair, rs)
    assert traceform.spectral_side(pair, rs, include_symmetrized=True) == pytest.approx(2.0 * one)


def test_cusp_terms_vanish_for_zero_pair():
    zero = make_gaussian_pair(1.0).scaled(0.0)
    assert traceform.cusp_terms(zero).total == 0.0


def test_cusp_terms_scale_with_number_of_cusps():
    pair = make_gaussian_pair(1.0)
    one = traceform.cusp_terms(pair, m=1)
    two = traceform.cusp_terms(pair, m=2)
    assert two.digamma_integral == pytest.approx(2.0 * one.digamma_integral, rel=1e-12)
    assert two.constant_term == pytest.approx(2.0 * one.constant_term, rel=1e-12)
    assert two.scattering_integral == one.scattering_integral
    assert one.phi_half_term == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(DomainError):
        traceform.cusp_terms(pair, m=0)


def test_scattering_term_grows_like_log_of_shift():
    pair = make_gaussian_pair(1.0)
    ratios = [abs(traceform.scattering_line_integral(pair, t)) / math.log(t) for t in (20.0, 50.0, 100.0)]
    assert max(ratios) <= 2.0 * min(ratios)


def test_asymptotic_shift_residual_decays_exponentially(narrow_gaussian, domain_area):
    scaled = []
    for t in (1.5, 2.0, 2.5):
        check = traceform.shifted_plancherel_check(narrow_gaussian, t, domain_area)
        assert abs(check.lhs - check.rhs - check.residual) < 1e-12
        scaled.append(abs(check.residual) * math.exp(2.0 * math.pi * t))
    assert max(scaled) <= 3.0 * min(scaled)


def test_asymptotic_check_is_symmetric_in_shift(narrow_gaussian, domain_area):
    plus = traceform.shifted_plancherel_check(narrow_gaussian, 2.0, domain_area)
    minus = traceform.shifted_plancherel_check(narrow_gaussian, -2.0, domain_area)
    assert minus.lhs == pytest.approx(plus.lhs, abs=1e-12)
    assert minus.rhs == pytest.approx(plus.rhs, abs=1e-12)
    with pytest.raises(DomainError):
        traceform.shifted_plancherel_check(narrow_gaussian, 0.0, domain_area)


def test_local_weyl_deviation_settles(unit_bump):
    checks = [traceform.local_weyl_check(unit_bump, lam) for lam in (50.0, 100.0, 200.0)]
    limit = checks[0].limit
    assert limit == pytest.approx(abs(2.0 - 1.0 / 12.0), abs=1e-9)
    for check in checks:
        assert check.deviation == pytest.approx(limit, abs=1e-3)
    ratio = checks[1].deviation / checks[0].deviation
    assert 0.9 <= ratio <= 2.4


def test_local_weyl_is_linear_in_weight(unit_bump):
    base = traceform.local_weyl_check(unit_bump, 30.0)
    doubled = traceform.local_weyl_check(unit_bump, 30.0, p=lambda r: 2.0 * r * np.tanh(math.pi * r))
    assert doubled.value == pytest.approx(2.0 * base.value, rel=1e-9)


def test_local_weyl_requires_unit_mass():
    with pytest.raises(DomainError):
        traceform.local_weyl_check(make_bump_pair(1.0), 10.0)


def test_eigenvalue_local_count():
    rs = [9.53, 12.17, 13.78]
    assert traceform.eigenvalue_local_count(rs, 13.0, 1.0) == 2
    assert traceform.eigenvalue_local_count(rs, 0.0, 10.0) == 2
    assert traceform.eigenvalue_local_count([], 5.0, 1.0) == 0
    with pytest.raises(DomainError):
        traceform.eigenvalue_local_count(rs, 5.0, 0.0)


def test_heat_trace_large_time_is_constant_eigenvalue(domain_area):
    trace = traceform.heat_trace_expansion(50.0, [9.5336952613, 12.1730083246, 13.7797513519])
    assert trace.lhs == pytest.approx(1.0, abs=1e-3)
    assert trace.leading == pytest.approx(domain_area / (4.0 * math.pi * 50.0))


def test_heat_trace_area_can_be_overridden():
    trace = traceform.heat_trace_expansion(50.0, [], area=2.0, include_constant=False)
    assert trace.leading == pytest.approx(2.0 / (4.0 * math.pi * 50.0))


def test_heat_trace_warns_when_spectrum_truncated():
    with pytest.warns(TruncatedSpectrumWarning):
        traceform.heat_trace_expansion(0.01, [9.5336952613])


def test_heat_trace_fit_needs_four_times():
    with pytest.raises(DomainError):
        traceform.heat_trace_leading_term([0.1, 0.2, 0.3], [])


def test_counting_curve_empty_spectrum(domain_area):
    grid = np.arange(0.0, 26.0, 1.0)
    curve = traceform.weyl_counting_curve([], grid, domain_area, include_constant=False)
    assert np.all(curve.N == 0)
    assert curve.main[10] == pytest.approx(8.333, abs=1e-3)


def test_counting_curve_counts_and_validates(domain_area):
    grid = np.arange(0.0, 16.0, 1.0)
    curve = traceform.weyl_counting_curve([9.53, 12.17, 13.78], grid, domain_area)
    assert curve.N[0] == 1
    assert curve.N[10] == 2
    assert curve.N[-1] == 4
    with pytest.raises(DomainError):
        traceform.weyl_counting_curve([], grid, domain_area, winding=np.zeros(3))
    with pytest.raises(DomainError):
        traceform.weyl_counting_curve([], grid[::-1], domain_area)


def test_identity_closes_on_independently_built_data(closed_trace_data, domain_area):
    pair, rs, lengths = closed_trace_data
    assert abs(traceform.trace_formula_residual(pair, rs, lengths, domain_area)) < 1e-9
    assert traceform.calibrate_area(pair, rs, lengths) == pytest.approx(domain_area, rel=1e-9)


def test_identity_residual_detects_perturbed_data(closed_trace_data, domain_area):
    pair, rs, lengths = closed_trace_data
    longer = [LengthSpectrumEntry(ell=1.6, ell0=1.6, mult=1), *lengths[1:]]
    shifted = [rs[0], rs[1] + 0.05]
    assert abs(traceform.trace_formula_residual(pair, rs, longer, domain_area)) > 1e-3
    assert abs(traceform.trace_formula_residual(pair, shifted, lengths, domain_area)) > 1e-3
    assert abs(traceform.trace_formula_residual(pair, rs, lengths, 1.1 * domain_area)) > 1e-3


@pytest.mark.slow
def test_heat_trace_recovers_area(spectrum_to_25):
    fit = traceform.heat_trace_leading_term([0.05, 0.07, 0.1, 0.14, 0.2, 0.3], spectrum_to_25)
    assert fit.relative_error < 0.05


@pytest.mark.slow
def test_heat_trace_decreasing_at_small_time(spectrum_to_25):
    values = [traceform.heat_trace_expansion(t, spectrum_to_25).lhs for t in (0.05, 0.1, 0.2, 0.4)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.slow
def test_weyl_law_deviation_is_linear(spectrum_to_25, domain_area):
    from modsurf.scattering import winding_table

    grid = np.arange(0.0, 25.01, 0.5)
    winding = np.array([rec.M for rec in winding_table(grid)])
    curve = traceform.weyl_counting_curve(spectrum_to_25, grid, domain_area, winding=winding)
    assert curve.fit_residual <= 2.5
