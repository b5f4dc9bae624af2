"""Special functions of complex argument in double precision.

Gamma and digamma (Lanczos with reflection, asymptotic series), Riemann and
Hurwitz zeta (Euler-Maclaurin), Dirichlet L-functions, and the modified
Bessel function K_{ir}(y) of imaginary order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import DomainError, PoleError

ComplexValue = complex

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    numbers = [Fraction(1)]
    for m in range(1, count + 1):
        acc = sum(math.comb(m + 1, k) * numbers[k] for k in range(m))
        numbers.append(-acc / (m + 1))
    return tuple(numbers)


_BERNOULLI = _bernoulli_numbers(30)
# B_{2k} / (2k)!, k = 1..15: Euler-Maclaurin correction weights.
_EM_WEIGHTS = tuple(float(_BERNOULLI[2 * k] / math.factorial(2 * k)) for k in range(1, 16))
# B_{2k} / (2k), k = 1..10: digamma asymptotic series.
_DIGAMMA_WEIGHTS = tuple(float(_BERNOULLI[2 * k] / (2 * k)) for k in range(1, 11))


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z) on some branch, without overflow for large |Im z|."""

    w = math.pi * z
    if abs(w.imag) < 20.0:
        return cmath.log(cmath.sin(w))
    if w.imag > 0:
        return -1j * w + cmath.log(0.5j * (1.0 - cmath.exp(2j * w)))
    return 1j * w + cmath.log(-0.5j * (1.0 - cmath.exp(-2j * w)))


def loggamma_complex(z: ComplexValue) -> complex:
    """log Gamma(z) up to a multiple of 2*pi*i (exp of it is exact)."""

    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma_complex(1.0 - z)
    z -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma_complex(z: ComplexValue) -> complex:
    """Gamma(z) for complex z; relative error about 1e-13 for |z| <= 100."""

    return cmath.exp(loggamma_complex(z))


def digamma(z: ComplexValue) -> complex:
    """Gamma'/Gamma(z) by upward recurrence and the asymptotic series."""

    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"digamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    shift = 0.0
    while abs(z) < 15.0:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    power = inv2
    series = 0.0
    for weight in _DIGAMMA_WEIGHTS:
        series += weight * power
        power *= inv2
    return cmath.log(z) - 0.5 / z - series + shift


def _euler_maclaurin(s: complex, a: float) -> complex:
    """sum_{n>=0} (n+a)^{-s} continued by Euler-Maclaurin."""

    cutoff = max(20, int(math.ceil(2.0 * abs(s.imag))), int(math.ceil(abs(s))))
    nodes = np.arange(cutoff, dtype=float) + a
    head = complex(np.sum(np.exp(-s * np.log(nodes))))
    x = cutoff + a
    log_x = math.log(x)
    x_pow = cmath.exp(-s * log_x)
    tail = x * x_pow / (s - 1.0) + 0.5 * x_pow
    term = s * x_pow / x
    inv_x2 = 1.0 / (x * x)
    correction = 0.0
    for k, weight in enumerate(_EM_WEIGHTS, start=1):
        correction += weight * term
        term *= (s + 2 * k - 1) * (s + 2 * k) * inv_x2
    return head + tail + correction


def zeta(s: ComplexValue) -> complex:
    """Riemann zeta function, analytically continued."""

    s = complex(s)
    if s == 1.0:
        raise PoleError("zeta has a pole at s = 1")
    return _euler_maclaurin(s, 1.0)


def hurwitz_zeta(s: ComplexValue, a: float) -> complex:
    """Hurwitz zeta sum_{n>=0} (n+a)^{-s} for a in (0, 1]."""

    s = complex(s)
    if not 0.0 < a <= 1.0:
        raise DomainError(f"Hurwitz parameter must lie in (0, 1], got {a}")
    if s == 1.0:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    return _euler_maclaurin(s, float(a))


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character given by its value table on residues 0..q-1."""

    modulus: int
    values: tuple[complex, ...]

    def __post_init__(self) -> None:
        q = self.modulus
        if q < 1 or len(self.values) != q:
            raise DomainError("character table must have one entry per residue")
        if abs(self.values[1 % q] - 1.0) > 1e-12:
            raise DomainError("character must satisfy chi(1) = 1")
        for a in range(q):
            coprime = math.gcd(a, q) == 1
            value = self.values[a]
            if coprime and abs(abs(value) - 1.0) > 1e-12:
                raise DomainError(f"chi({a}) must be a root of unity")
            if not coprime and value != 0:
                raise DomainError(f"chi({a}) must vanish, gcd({a}, {q}) > 1")
        for a in range(q):
            for b in range(q):
                if abs(self.values[(a * b) % q] - self.values[a] * self.values[b]) > 1e-12:
                    raise DomainError("character table is not multiplicative")

    @classmethod
    def principal(cls, modulus: int) -> "DirichletCharacter":
        return cls(modulus, tuple(1.0 + 0j if math.gcd(a, modulus) == 1 else 0j for a in range(modulus)))

    @classmethod
    def from_values(cls, values) -> "DirichletCharacter":
        table = tuple(complex(v) for v in values)
        return cls(len(table), table)

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    @property
    def is_principal(self) -> bool:
        return all(v == 0 or abs(v - 1.0) < 1e-12 for v in self.values)


def _primitive_root(p: int) -> int:
    order = p - 1
    factors = {d for d in range(2, order + 1) if order % d == 0 and all(d % e for e in range(2, int(d**0.5) + 1))}
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    return 1


def characters_mod_prime(p: int) -> Iterator[DirichletCharacter]:
    """All p-1 characters modulo the prime p, principal first."""

    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise DomainError(f"{p} is not prime")
    g = _primitive_root(p)
    log_table = {}
    value = 1
    for k in range(p - 1):
        log_table[value] = k
        value = (value * g) % p
    for j in range(p - 1):
        table = [0j] * p
        for a, k in log_table.items():
            table[a] = cmath.exp(2j * math.pi * j * k / (p - 1))
        yield DirichletCharacter(p, tuple(table))


def dirichlet_l(s: ComplexValue, chi: DirichletCharacter) -> complex:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""

    s = complex(s)
    q = chi.modulus
    if s == 1.0:
        if chi.is_principal:
            raise PoleError("L(s, chi) has a pole at s = 1 for principal chi")
        return -sum(chi(a) * digamma(a / q) for a in range(1, q + 1) if chi(a) != 0) / q
    total = sum(chi(a) * hurwitz_zeta(s, a / q) for a in range(1, q + 1) if chi(a) != 0)
    return cmath.exp(-s * math.log(q)) * total


_BESSEL_CUTOFF = 41.5  # exp(-41.5) < 1e-18
_BESSEL_BLOCK = 2_000_000


def _bessel_contour(r: float, y: np.ndarray, step_scale: float):
    """Contour offset, trapezoid step and node count for each argument."""

    floor = math.pi / 2 if r * math.pi / 2 <= 1.0 else 1.0 / r
    saddle = np.arccos(np.minimum(1.0, r / y))
    delta = np.maximum(floor, saddle)
    height = y * np.sin(delta)
    step = step_scale * np.minimum(delta / 12.0, 0.5 / np.sqrt(height))
    u_max = np.arccosh(1.0 + _BESSEL_CUTOFF / height)
    count = np.ceil(u_max / step).astype(int) + 1
    return delta, step, count


def bessel_k_imag_scaled(r: float, y, *, step_scale: float = 1.0):
    """exp(pi r / 2) K_{ir}(y), vectorised over ``y``.

    The defining integral is moved to the line Im t = pi/2 - delta. For
    y <= r, delta = min(pi/2, 1/r); there the integrand carries the
    exp(-pi r/2) scale explicitly. For y > r the line passes through the
    saddle point, delta = arccos(r/y), so the result keeps its relative
    accuracy as y grows. The trapezoidal rule uses step delta/12, narrowed
    to the saddle width, times ``step_scale``; the tail is cut where it
    falls below exp(-41.5) of the peak.
    """

    r = abs(float(r))
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y_arr <= 0.0):
        raise DomainError("K_{ir}(y) requires y > 0")

    flat = y_arr.ravel()
    delta, step, count = _bessel_contour(r, flat, step_scale)
    result = np.empty_like(flat)
    chunk = max(1, int(_BESSEL_BLOCK / int(count.max())))
    for start in range(0, flat.size, chunk):
        rows = slice(start, start + chunk)
        ys = flat[rows][:, None]
        d = delta[rows][:, None]
        h = step[rows][:, None]
        nodes = np.arange(int(count[rows].max()))[None, :]
        inside = nodes < count[rows][:, None]
        u = np.where(inside, h * nodes, 0.0)
        weights = np.where(inside, h, 0.0)
        weights[:, 0] *= 0.5
        phase = r * u - ys * np.cos(d) * np.sinh(u)
        integrand = np.exp(r * d - ys * np.sin(d) * np.cosh(u)) * np.cos(phase)
        result[rows] = np.sum(integrand * weights, axis=1)
    out = result.reshape(y_arr.shape)
    if np.ndim(y) == 0:
        return float(out[0])
    return out


def bessel_k_imag(r: float, y, *, step_scale: float = 1.0):
    """K_{ir}(y) for real r and y > 0."""

    return bessel_k_imag_scaled(r, y, step_scale=step_scale) * math.exp(-math.pi * abs(r) / 2)


@dataclass(frozen=True)
class BesselOdeResiduals:
    standard: float
    alternate_form: float


def bessel_ode_residuals(r: float, y: float, h: float = 1e-3) -> BesselOdeResiduals:
    """Relative residuals of both Bessel ODE forms at (r, y).

    standard:       K'' + K'/y - (1 - r^2/y^2) K   (modified equation, nu = ir)
    alternate_form: K'' + K'/y + (1 + r^2/y^2) K   (ordinary Bessel signs, not satisfied)
    """

    if y - 2 * h <= 0:
        raise DomainError("y must exceed twice the differencing step")
    pts = y + h * np.arange(-2, 3)
    k = bessel_k_imag_scaled(r, pts)
    k0 = k[2]
    k1 = (k[0] - 8 * k[1] + 8 * k[3] - k[4]) / (12 * h)
    k2 = (-k[0] + 16 * k[1] - 30 * k[2] + 16 * k[3] - k[4]) / (12 * h * h)
    scale = max(abs(k0), abs(k1), abs(k2), 1e-300)
    standard = k2 + k1 / y - (1.0 - r * r / (y * y)) * k0
    alternate = k2 + k1 / y + (1.0 + r * r / (y * y)) * k0
    return BesselOdeResiduals(abs(standard) / scale, abs(alternate) / scale)
