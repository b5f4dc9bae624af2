"""Upper half-plane geometry for SL(2, Z).

Mobius action, reduction to the standard fundamental domain
{|Re z| <= 1/2, |z| >= 1} and closed-geodesic lengths from traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IterationLimitError, NonHyperbolicError
from .quadrature import integrate

REDUCTION_STEP_LIMIT = 1000
_CIRCLE_TOL = 1e-13


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of ({self.a}, {self.b}; {self.c}, {self.d}) is not 1")

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, n: int = 1) -> "UnimodularMatrix":
        return cls(1, n, 0, 1)

    @classmethod
    def inversion(cls) -> "UnimodularMatrix":
        return cls(0, -1, 1, 0)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def is_projective_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d


T = UnimodularMatrix.translation(1)
S = UnimodularMatrix.inversion()


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0:
            raise DomainError(f"point must lie in the upper half-plane, got y = {self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


def mobius_act(gamma: UnimodularMatrix, z: HPoint) -> HPoint:
    """(az + b) / (cz + d)."""

    w = z.as_complex()
    denom = gamma.c * w + gamma.d
    num = gamma.a * w + gamma.b
    image = num / denom
    return HPoint(image.real, z.y / abs(denom) ** 2)


def reduce_to_fundamental_domain(z: HPoint) -> tuple[HPoint, UnimodularMatrix]:
    """Return (z*, gamma) with z* = gamma z in the fundamental domain.

    Representatives are unique: Re z* lies in [-1/2, 1/2) and points on the
    unit circle with Re z* > 0 are inverted to the left half.
    """

    x, y = z.x, z.y
    gamma = UnimodularMatrix.identity()
    for _ in range(REDUCTION_STEP_LIMIT):
        n = math.floor(x + 0.5)
        if n:
            x -= n
            gamma = UnimodularMatrix.translation(-n) @ gamma
        norm = x * x + y * y
        if norm < 1.0 - _CIRCLE_TOL or (norm <= 1.0 + _CIRCLE_TOL and x > 0.0):
            x, y = -x / norm, y / norm
            gamma = S @ gamma
            continue
        return HPoint(x, y), gamma
    raise IterationLimitError(f"reduction of {z} did not terminate in {REDUCTION_STEP_LIMIT} steps")


def pullback_points(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`reduce_to_fundamental_domain` returning only z*."""

    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    if np.any(y <= 0):
        raise DomainError("all points must lie in the upper half-plane")
    active = np.ones(x.shape, dtype=bool)
    for _ in range(REDUCTION_STEP_LIMIT):
        x[active] -= np.floor(x[active] + 0.5)
        norm = x * x + y * y
        invert = active & ((norm < 1.0 - _CIRCLE_TOL) | ((norm <= 1.0 + _CIRCLE_TOL) & (x > 0.0)))
        if not invert.any():
            return x, y
        x[invert] = -x[invert] / norm[invert]
        y[invert] = y[invert] / norm[invert]
        active = invert
    raise IterationLimitError(f"vectorised reduction did not terminate in {REDUCTION_STEP_LIMIT} steps")


def geodesic_length(gamma: UnimodularMatrix) -> float:
    """Length 2 arccosh(|tr|/2) of the closed geodesic of a hyperbolic gamma."""

    trace = abs(gamma.trace)
    if trace <= 2:
        raise NonHyperbolicError(f"|trace| = {trace} is not hyperbolic")
    return 2.0 * math.acosh(trace / 2.0)


def fundamental_domain_area(tol: float = 1e-12) -> float:
    """Hyperbolic area of SL(2, Z)\\H by quadrature, pi/3 expected.

    The inner integral over y in [sqrt(1 - x^2), inf) of dy/y^2 is exact,
    leaving the x-integral of 1/sqrt(1 - x^2) over [-1/2, 1/2].
    """

    result = integrate(lambda x: 1.0 / np.sqrt(1.0 - x * x), -0.5, 0.5, abs_tol=tol, rel_tol=tol)
    return float(result)
