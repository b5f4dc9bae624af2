import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modsurf import hypgeom
from modsurf.errors import DomainError, NonHyperbolicError
from modsurf.hypgeom import HPoint, S, T, UnimodularMatrix

points = st.builds(
    HPoint,
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
    st.floats(min_value=1e-3, max_value=50.0, allow_nan=False),
)

_GENERATORS = (T, T.inverse(), S)
matrices = st.lists(st.sampled_from(_GENERATORS), min_size=0, max_size=6).map(
    lambda word: _product(word)
)


def _product(word):
    gamma = UnimodularMatrix.identity()
    for letter in word:
        gamma = gamma @ letter
    return gamma


def _distance(z: HPoint, w: HPoint) -> float:
    return abs(z.as_complex() - w.as_complex())


def test_determinant_must_be_one():
    with pytest.raises(DomainError):
        UnimodularMatrix(2, 0, 0, 1)


def test_upper_half_plane_required():
    with pytest.raises(DomainError):
        HPoint(0.0, 0.0)


def test_generators_act_as_expected():
    z = HPoint(0.3, 1.7)
    assert hypgeom.mobius_act(T, z).as_complex() == pytest.approx(complex(1.3, 1.7))
    assert hypgeom.mobius_act(S, HPoint(0.0, 2.0)).as_complex() == pytest.approx(complex(0.0, 0.5))
    assert (S @ S).is_projective_identity()


def test_reduce_i_is_fixed():
    z, gamma = hypgeom.reduce_to_fundamental_domain(HPoint(0.0, 1.0))
    assert z == HPoint(0.0, 1.0)
    assert gamma.is_projective_identity()


def test_reduce_deep_point_returns_consistent_matrix():
    start = HPoint(5.3, 0.8)
    z, gamma = hypgeom.reduce_to_fundamental_domain(start)
    assert -0.5 <= z.x < 0.5
    assert z.x * z.x + z.y * z.y >= 1.0 - 1e-12
    assert _distance(hypgeom.mobius_act(gamma, start), z) < 1e-12


def test_reduce_right_edge_maps_to_left_edge():
    z, _ = hypgeom.reduce_to_fundamental_domain(HPoint(0.5, 2.0))
    assert z.as_complex() == pytest.approx(complex(-0.5, 2.0))


def test_reduce_unit_circle_prefers_left_half():
    x = 0.3
    z, _ = hypgeom.reduce_to_fundamental_domain(HPoint(x, math.sqrt(1.0 - x * x)))
    assert z.x == pytest.approx(-x)


def test_geodesic_length_of_trace_three():
    assert hypgeom.geodesic_length(UnimodularMatrix(2, 1, 1, 1)) == pytest.approx(1.9248473002, abs=1e-10)


@pytest.mark.parametrize("gamma", [UnimodularMatrix(1, 1, 0, 1), UnimodularMatrix(0, -1, 1, 1), S])
def test_geodesic_length_rejects_non_hyperbolic(gamma):
    with pytest.raises(NonHyperbolicError):
        hypgeom.geodesic_length(gamma)


def test_geodesic_length_ignores_sign_of_trace():
    assert hypgeom.geodesic_length(UnimodularMatrix(-2, -1, -1, -1)) == hypgeom.geodesic_length(
        UnimodularMatrix(2, 1, 1, 1)
    )


def test_fundamental_domain_area():
    assert hypgeom.fundamental_domain_area() == pytest.approx(math.pi / 3.0, abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(points, matrices, matrices)
def test_action_is_a_group_action(z, g1, g2):
    composed = hypgeom.mobius_act(g1 @ g2, z)
    stepwise = hypgeom.mobius_act(g1, hypgeom.mobius_act(g2, z))
    assert _distance(composed, stepwise) <= 1e-9 * (1.0 + abs(composed.as_complex()))


@settings(max_examples=200, deadline=None)
@given(points, matrices)
def test_imaginary_part_transforms_by_denominator(z, gamma):
    image = hypgeom.mobius_act(gamma, z)
    expected = z.y / abs(gamma.c * z.as_complex() + gamma.d) ** 2
    assert image.y == pytest.approx(expected, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(points)
def test_reduction_lands_in_domain_and_is_idempotent(z):
    reduced, gamma = hypgeom.reduce_to_fundamental_domain(z)
    assert -0.5 <= reduced.x < 0.5
    assert reduced.x**2 + reduced.y**2 >= 1.0 - 1e-12
    again, second = hypgeom.reduce_to_fundamental_domain(reduced)
    assert again == reduced
    assert second.is_projective_identity()
    mapped = hypgeom.mobius_act(gamma, z)
    assert _distance(mapped, reduced) <= 1e-7 * (1.0 + abs(reduced.as_complex()))


@settings(max_examples=50, deadline=None)
@given(st.lists(points, min_size=1, max_size=20))
def test_vectorised_pullback_matches_scalar(zs):
    x, y = hypgeom.pullback_points(np.array([z.x for z in zs]), np.array([z.y for z in zs]))
    for z, xs, ys in zip(zs, x, y):
        reduced, _ = hypgeom.reduce_to_fundamental_domain(z)
        assert xs == pytest.approx(reduced.x, abs=1e-12)
        assert ys == pytest.approx(reduced.y, rel=1e-12)
