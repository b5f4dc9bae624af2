"""Eisenstein series and the scattering determinant of SL(2, Z).

phi(s) = sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s)),
its logarithmic derivative on the critical line and the winding number
M(lambda) = -(1/2 pi) int_0^lambda phi'/phi(1/2 + ir) dr.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConvergenceError, DomainError, NearZetaZeroWarning, PoleError
from .hypgeom import HPoint
from .quadrature import integrate
from .specfun import digamma, gamma_complex, loggamma_complex, zeta

ZETA_DIFF_STEP = 1e-5
NEAR_ZERO = 1e-6
_SMALL_R = 1e-3


@dataclass(frozen=True)
class ScatteringValue:
    s: complex
    phi: complex
    log_deriv: complex


@dataclass(frozen=True)
class WindingRecord:
    lambda_: float
    M: float
    quadrature_error: float


@dataclass(frozen=True)
class EisensteinValue:
    value: complex
    tail_estimate: float


@dataclass(frozen=True)
class ConstantTerm:
    y: float
    s: complex
    value: complex
    expected: complex
    quadrature_error: float
    tail_estimate: float

    @property
    def budget(self) -> float:
        return self.quadrature_error + self.tail_estimate


def _smallest_form_eigenvalue(z: HPoint) -> float:
    form = np.array([[z.x * z.x + z.y * z.y, z.x], [z.x, 1.0]])
    return float(np.linalg.eigvalsh(form)[0])


def eisenstein_eval(z: HPoint, s: complex, cutoff: int = 200) -> EisensteinValue:
    """E(z, s) = 1/2 sum over coprime (m, n), max(|m|, |n|) <= cutoff, of
    y^s / |mz + n|^{2s}, with an estimate of the omitted tail."""

    s = complex(s)
    if s.real <= 1.0:
        raise ConvergenceError(f"Eisenstein series diverges for Re s <= 1, got {s.real}")
    if cutoff < 1:
        raise DomainError("cutoff must be positive")
    k = np.arange(-cutoff, cutoff + 1)
    m, n = np.meshgrid(k, k, indexing="ij")
    coprime = np.gcd(m, n) == 1
    m = m[coprime].astype(float)
    n = n[coprime].astype(float)
    norm = (m * z.x + n) ** 2 + (m * z.y) ** 2
    value = 0.5 * complex(np.sum(np.exp(s * (math.log(z.y) - np.log(norm)))))

    sigma = s.real
    floor = _smallest_form_eigenvalue(z) * cutoff * cutoff
    tail = (6.0 / math.pi**2) * z.y**sigma * (math.pi / z.y) * floor ** (1.0 - sigma) / (sigma - 1.0)
    return EisensteinValue(value, tail)


def eisenstein_constant_term(y: float, s: complex, cutoff: int = 200, points: int = 64) -> ConstantTerm:
    """int_0^1 E(x + iy, s) dx by the periodic trapezoidal rule.

    The quadrature error is the difference between ``points`` and
    ``points // 2`` nodes.
    """

    s = complex(s)
    values = []
    tail = 0.0
    for j in range(points):
        ev = eisenstein_eval(HPoint(j / points, y), s, cutoff)
        values.append(ev.value)
        tail = max(tail, ev.tail_estimate)
    values = np.array(values)
    fine = complex(np.mean(values))
    coarse = complex(np.mean(values[::2]))
    expected = cmath.exp(s * math.log(y)) + phi_gamma1(s) * cmath.exp((1.0 - s) * math.log(y))
    return ConstantTerm(y, s, fine, expected, abs(fine - coarse), tail)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def phi_gamma1(s: complex) -> complex:
    """Scattering determinant of SL(2, Z)."""

    s = complex(s)
    if s == 0.5:
        return complex(phi_at_half())
    if s == 1.0:
        raise PoleError("phi has a pole at s = 1")
    if _is_nonpositive_integer(s - 0.5):
        raise PoleError(f"Gamma(s - 1/2) has a pole at s = {s.real:g}")
    denominator = zeta(2.0 * s)
    if denominator == 0:
        raise PoleError(f"zeta(2s) vanishes at s = {s}")
    ratio = cmath.exp(loggamma_complex(s - 0.5) - loggamma_complex(s))
    return math.sqrt(math.pi) * ratio * zeta(2.0 * s - 1.0) / denominator


def phi_at_half() -> float:
    """lim phi(s) as s -> 1/2.

    Gamma(s - 1/2) ~ 1/(s - 1/2) and zeta(2s) ~ 1/(2(s - 1/2)), leaving
    sqrt(pi) * 2 * zeta(0) / Gamma(1/2).
    """

    return math.sqrt(math.pi) * 2.0 * zeta(0.0).real / gamma_complex(0.5).real


def phi_numeric_limit(eps: float) -> float:
    """(phi(1/2 + eps) + phi(1/2 - eps)) / 2, which approaches phi(1/2) as eps^2."""

    if eps == 0:
        raise DomainError("eps must be non-zero")
    return 0.5 * (phi_gamma1(0.5 + eps).real + phi_gamma1(0.5 - eps).real)


def zeta_log_derivative(s: complex, h: float = ZETA_DIFF_STEP) -> complex:
    """zeta'/zeta(s) by Richardson-extrapolated central differences of log zeta."""

    s = complex(s)

    def central(step: float) -> complex:
        return cmath.log(zeta(s + step) / zeta(s - step)) / (2.0 * step)

    return (4.0 * central(h) - central(2.0 * h)) / 3.0


def phi_log_derivative(s: complex) -> complex:
    """phi'/phi(s) = psi(s - 1/2) - psi(s) + 2 zeta'/zeta(2s - 1) - 2 zeta'/zeta(2s).

    Off the critical line zeta(2s) can vanish; within NEAR_ZERO of a zero
    a NearZetaZeroWarning is issued and the value is returned as computed.
    """

    s = complex(s)
    if abs(zeta(2.0 * s)) < NEAR_ZERO:
        warnings.warn(
            f"zeta(2s) is within {NEAR_ZERO} of zero at s = {s}; phi'/phi loses accuracy",
            NearZetaZeroWarning,
            stacklevel=2,
        )
    return (
        digamma(s - 0.5)
        - digamma(s)
        + 2.0 * zeta_log_derivative(2.0 * s - 1.0)
        - 2.0 * zeta_log_derivative(2.0 * s)
    )


def phi_log_derivative_line(r: float) -> float:
    """phi'/phi(1/2 + ir), real and even in r.

    Near r = 0 the poles of the digamma and zeta terms cancel; there the
    value is extrapolated from r = h and r = 2h (even in r).
    """

    r = float(r)
    if abs(r) < _SMALL_R:
        near = phi_log_derivative_line(_SMALL_R)
        far = phi_log_derivative_line(2.0 * _SMALL_R)
        return (4.0 * near - far) / 3.0
    return phi_log_derivative(complex(0.5, r)).real


def scattering_value(s: complex) -> ScatteringValue:
    s = complex(s)
    if s == 0.5:
        return ScatteringValue(s, complex(phi_at_half()), complex(phi_log_derivative_line(0.0)))
    return ScatteringValue(s, phi_gamma1(s), phi_log_derivative(s))


def _line_integrand(r: np.ndarray) -> np.ndarray:
    return np.array([phi_log_derivative_line(v) for v in np.atleast_1d(r)])


def _winding_increment(a: float, b: float, tol: float, rel_tol: float, min_width: float, order: int):
    result = integrate(
        _line_integrand, a, b, abs_tol=tol, rel_tol=rel_tol, order=order, min_width=min_width
    )
    return -float(result) / (2.0 * math.pi), result.error / (2.0 * math.pi)


def winding_number(
    lam: float,
    *,
    tol: float = 1e-9,
    rel_tol: float | None = None,
    min_width: float = 1e-4,
    order: int = 16,
) -> WindingRecord:
    """M(lambda) = -(1/4 pi) int_{-lambda}^{lambda} phi'/phi(1/2 + ir) dr.

    ``tol`` is the absolute quadrature tolerance; ``rel_tol`` defaults to it.
    """

    if lam < 0:
        raise DomainError("lambda must be non-negative")
    if lam == 0:
        return WindingRecord(0.0, 0.0, 0.0)
    value, error = _winding_increment(0.0, lam, tol, tol if rel_tol is None else rel_tol, min_width, order)
    return WindingRecord(float(lam), value, error)


def winding_table(
    grid: Iterable[float],
    *,
    tol: float = 1e-9,
    rel_tol: float | None = None,
    min_width: float = 1e-4,
    order: int = 16,
) -> list[WindingRecord]:
    """M on an increasing grid, accumulating one panel per grid interval."""

    rel_tol = tol if rel_tol is None else rel_tol
    records = []
    total = 0.0
    error = 0.0
    previous = 0.0
    for lam in grid:
        lam = float(lam)
        if lam < previous:
            raise DomainError("winding grid must be non-negative and increasing")
        if lam > previous:
            value, err = _winding_increment(previous, lam, tol, rel_tol, min_width, order)
            total += value
            error += err
        records.append(WindingRecord(lam, total, error))
        previous = lam
    return records
