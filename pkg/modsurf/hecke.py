"""Hecke operators, multiplicative relations and L-functions of Maass forms."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import CoefficientRangeError, ConvergenceError, DomainError
from .hypgeom import HPoint
from .maass import expansion_eval, expansion_values
from .quadrature import integrate_semi_infinite
from .schemas import FourierCoefficients, SpectralPoint, Symmetry
from .specfun import loggamma_complex

SERIES_ABSCISSA = 1.6
THEORETICAL_KAPPA = 4.0


def hecke_operator_eval(n: int, f: FourierCoefficients, z: HPoint) -> float:
    """T_n f(z) = n^{-1/2} sum_{ad = n, 0 <= b < d} f((az + b)/d)."""

    if n < 1:
        raise DomainError("Hecke index must be positive")
    total = 0.0
    for d in range(1, n + 1):
        if n % d:
            continue
        a = n // d
        for b in range(d):
            total += expansion_eval(f, HPoint((a * z.x + b) / d, a * z.y / d), pullback=True)
    return total / math.sqrt(n)


def hecke_relation_residual(c: FourierCoefficients, m: int, n: int) -> float:
    """|a(m)a(n) - sum_{d | (m, n)} a(mn/d^2)|."""

    if m * n > c.truncation:
        raise CoefficientRangeError(f"a({m * n}) needed but only a(1..{c.truncation}) are stored")
    return c.relation_residual(m, n)


def p_power_residual(c: FourierCoefficients, p: int, k: int) -> float:
    """|a(p^{k+1}) - a(p)a(p^k) + a(p^{k-1})|."""

    if k < 1:
        raise DomainError("k must be at least 1")
    return abs(c(p ** (k + 1)) - c(p) * c(p**k) + c(p ** (k - 1)))


@dataclass(frozen=True)
class SatakePair:
    alpha: complex
    beta: complex


def satake_pair(a_p: float) -> SatakePair:
    """Roots of X^2 - a(p) X + 1, larger one first."""

    disc = cmath.sqrt(a_p * a_p - 4.0)
    alpha = 0.5 * (a_p + disc) if a_p >= 0 else 0.5 * (a_p - disc)
    return SatakePair(alpha, 1.0 / alpha)


@dataclass(frozen=True)
class RepresentationSpec:
    kind: Literal["standard", "symmetric_power"]
    power: int = 1

    def __post_init__(self) -> None:
        if self.kind == "standard" and self.power != 1:
            raise DomainError("the standard representation has power 1")
        if not 1 <= self.power <= 4:
            raise DomainError("symmetric powers are supported for k = 1..4")

    @classmethod
    def standard(cls) -> "RepresentationSpec":
        return cls("standard", 1)

    @classmethod
    def symmetric_power(cls, k: int) -> "RepresentationSpec":
        return cls("symmetric_power", k)

    @property
    def dimension(self) -> int:
        return self.power + 1

    @property
    def safe_abscissa(self) -> float:
        return 1.1 + self.power / 2.0

    def local_eigenvalues(self, pair: SatakePair) -> list[complex]:
        k = self.power
        return [pair.alpha ** (k - j) * pair.beta**j for j in range(k + 1)]


@dataclass(frozen=True)
class LSeriesValue:
    value: complex
    tail_bound: float
    terms: int

    def __complex__(self) -> complex:
        return complex(self.value)


def l_series(s: complex, c: FourierCoefficients) -> LSeriesValue:
    """Truncated Dirichlet series sum a(n) n^{-s} with a tail bound.

    The bound assumes |a(n)| <= C sqrt(n), C measured on the stored range.
    """

    s = complex(s)
    if s.real < SERIES_ABSCISSA:
        raise ConvergenceError(f"Dirichlet series needs Re s >= {SERIES_ABSCISSA}, got {s.real}")
    n = np.arange(1, c.truncation + 1, dtype=float)
    value = complex(np.sum(c.a * np.exp(-s * np.log(n))))
    growth = float(np.max(np.abs(c.a) / np.sqrt(n)))
    big_n = float(c.truncation)
    tail = growth * big_n ** (1.5 - s.real) / (s.real - 1.5)
    return LSeriesValue(value, tail, c.truncation)


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def euler_product(
    s: complex,
    c: FourierCoefficients,
    rho: RepresentationSpec | None = None,
    p_max: int = 1000,
) -> complex:
    """Partial product of det(I - rho(A_p) p^{-s})^{-1} over primes p <= p_max."""

    rho = rho or RepresentationSpec.standard()
    s = complex(s)
    if s.real <= rho.safe_abscissa:
        raise ConvergenceError(f"Euler product for power {rho.power} needs Re s > {rho.safe_abscissa}")
    product = 1.0 + 0j
    for p in primes_up_to(p_max):
        x = cmath.exp(-s * math.log(p))
        local = 1.0 + 0j
        for eig in rho.local_eigenvalues(satake_pair(c(p))):
            local *= 1.0 - eig * x
        product /= local
    return product


def _gamma_factor(s: complex, r: float) -> complex:
    return cmath.exp(
        -s * math.log(math.pi) + loggamma_complex((s + 1j * r) / 2.0) + loggamma_complex((s - 1j * r) / 2.0)
    )


def _require_even(point: SpectralPoint) -> None:
    if point.symmetry is not Symmetry.EVEN:
        raise DomainError("completed L-functions are provided for even forms only")


def _axis_values(c: FourierCoefficients):
    """y -> exp(pi r/2) f(iy), without pullback."""

    def values(y: np.ndarray) -> np.ndarray:
        return expansion_values(c, np.zeros_like(y), y, scaled=True)

    return values


def _mellin_half(c: FourierCoefficients, start: float, exponent: complex, tol: float) -> complex:
    """exp(-pi r/2) * integral_start^inf f(iy) y^exponent dy/y."""

    values = _axis_values(c)
    result = integrate_semi_infinite(
        lambda y: values(y) * np.exp((exponent - 1.0) * np.log(y)),
        start,
        step=0.5,
        abs_tol=tol,
        rel_tol=tol,
    )
    return complex(result.value) * math.exp(-math.pi * abs(c.r) / 2.0)


def _mellin_raw(s: complex, c: FourierCoefficients, split: float = 1.0, tol: float = 1e-13) -> complex:
    return _mellin_half(c, split, s - 0.5, tol) + _mellin_half(c, 1.0 / split, 0.5 - s, tol)


def lambda_direct(s: complex, point: SpectralPoint) -> LSeriesValue:
    """pi^{-s} Gamma((s+ir)/2) Gamma((s-ir)/2) L(s, f) from the Dirichlet series."""

    _require_even(point)
    series = l_series(s, point.coefficients)
    factor = _gamma_factor(complex(s), point.r)
    return LSeriesValue(factor * series.value, abs(factor) * series.tail_bound, series.terms)


def mellin_normalization(point: SpectralPoint, anchor: float = 5.0) -> float:
    """kappa with Lambda(s) = kappa * integral_0^inf f(iy) y^{s-1/2} dy/y,
    measured against the Dirichlet series at a real anchor."""

    _require_even(point)
    direct = lambda_direct(anchor, point).value
    return float((direct / _mellin_raw(complex(anchor), point.coefficients)).real)


def lambda_completed(
    s: complex,
    point: SpectralPoint,
    *,
    method: Literal["auto", "direct", "mellin"] = "auto",
    kappa: float | None = None,
    anchor: float = 5.0,
) -> complex:
    """Completed L-function of an even form.

    ``direct`` uses the Dirichlet series (Re s >= 1.6); ``mellin`` the
    symmetric integral kappa * int_1^inf f(iy)(y^{s-1/2} + y^{1/2-s}) dy/y,
    which continues Lambda to all s. ``auto`` takes the direct value when
    its tail bound is below 1e-10 and the integral otherwise.
    """

    _require_even(point)
    s = complex(s)
    if method != "mellin" and s.real >= SERIES_ABSCISSA:
        direct = lambda_direct(s, point)
        if method == "direct" or direct.tail_bound < 1e-10:
            return direct.value
    elif method == "direct":
        raise ConvergenceError(f"direct evaluation needs Re s >= {SERIES_ABSCISSA}")
    if kappa is None:
        kappa = mellin_normalization(point, anchor)
    return kappa * _mellin_raw(s, point.coefficients)


def functional_equation_residual(
    s: complex,
    point: SpectralPoint,
    *,
    split: float = 1.25,
    kappa: float | None = None,
    anchor: float = 5.0,
) -> float:
    """|Lambda_A(s) - Lambda_A(1 - s)| with the Mellin integral split at A.

    The split integral is symmetric only if f(i/y) = f(iy) on [1/A, A],
    so a non-zero residual measures the failure of modularity of the
    computed form.
    """

    _require_even(point)
    if split <= 0:
        raise DomainError("split point must be positive")
    if kappa is None:
        kappa = mellin_normalization(point, anchor)
    s = complex(s)
    left = _mellin_raw(s, point.coefficients, split)
    right = _mellin_raw(1.0 - s, point.coefficients, split)
    return abs(kappa * (left - right))


def modularity_defect(point: SpectralPoint, split: float = 1.25) -> float:
    """max |f(iy) - f(i/y)| for y in [1, A], relative to max |f|."""

    ys = np.linspace(1.0, split, 41)
    c = point.coefficients
    direct = expansion_values(c, np.zeros_like(ys), ys, scaled=True)
    inverted = expansion_values(c, np.zeros_like(ys), 1.0 / ys, scaled=True)
    scale = max(float(np.max(np.abs(direct))), 1e-300)
    return float(np.max(np.abs(direct - inverted)) / scale)
