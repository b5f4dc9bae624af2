"""Test-function calculus and trace-formula evaluators.

A :class:`TestFunctionPair` carries an even g and its Fourier transform
h(r) = int g(u) exp(-iru) du. The evaluators here assemble the identity,
hyperbolic and cusp contributions of the trace formula, the heat-trace
expansion and the Weyl counting curve N + M.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf

from .errors import DomainError, IterationLimitError, TruncatedSpectrumWarning
from .hypgeom import fundamental_domain_area
from .quadrature import gauss_legendre, integrate, integrate_semi_infinite
from .scattering import phi_at_half, phi_log_derivative_line
from .schemas import LengthSpectrumEntry
from .specfun import digamma

__all__ = [
    "TestFunctionPair",
    "LengthSpectrumEntry",
    "CountingCurve",
    "CuspTerms",
    "make_bump_pair",
    "make_gaussian_pair",
    "plancherel_term",
    "geometric_side",
    "spectral_side",
    "cusp_terms",
    "shifted_plancherel_check",
    "local_weyl_check",
    "eigenvalue_local_count",
    "heat_trace_expansion",
    "heat_trace_leading_term",
    "weyl_counting_curve",
    "trace_formula_residual",
    "calibrate_area",
]

RealFunction = Callable[[np.ndarray], np.ndarray]
_QUAD_ORDER = 16
_PANEL_FLOOR = 1e-3


@dataclass(frozen=True)
class TestFunctionPair:
    """An admissible pair (g, h).

    ``ghat0`` is int g = h(0); ``h_mass`` is int h = 2 pi g(0);
    ``h_second_moment`` is int r^2 h(r) dr = -2 pi g''(0).
    ``cumulative`` is x -> int_{-inf}^x h. ``tail_radius`` bounds the
    region where |h| exceeds 1e-12 h(0).
    """

    __test__ = False

    g: RealFunction
    h: RealFunction
    cumulative: RealFunction
    epsilon: float
    ghat0: float
    h_mass: float
    h_second_moment: float
    tail_radius: float
    label: str = field(default="pair", compare=False)

    def g_at_zero(self) -> float:
        return self.h_mass / (2.0 * math.pi)

    def h_cumulative(self, x):
        return self.cumulative(np.asarray(x, dtype=float))

    def scaled(self, factor: float) -> "TestFunctionPair":
        g, h, cumulative = self.g, self.h, self.cumulative
        return replace(
            self,
            g=lambda u: factor * g(u),
            h=lambda r: factor * h(r),
            cumulative=lambda x: factor * cumulative(x),
            ghat0=factor * self.ghat0,
            h_mass=factor * self.h_mass,
            h_second_moment=factor * self.h_second_moment,
        )

    def normalized(self) -> "TestFunctionPair":
        """Rescaled so that int h = 1."""

        return self.scaled(1.0 / self.h_mass)


def _bump_profile(sharpness: float, epsilon: float) -> RealFunction:
    def profile(u):
        t = np.asarray(u, dtype=float) / epsilon
        out = np.zeros(np.shape(t))
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(-sharpness / (1.0 - t[inside] ** 2))
        return out

    return profile


def _composite_nodes(epsilon: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = gauss_legendre(_QUAD_ORDER)
    width = epsilon / panels
    left = np.arange(panels) * width
    v = (left[:, None] + 0.5 * width * (nodes + 1.0)).ravel()
    w = np.tile(0.5 * width * weights, panels)
    return v, w


def _cosine_transform(v: np.ndarray, weights: np.ndarray):
    def transform(r):
        r = np.asarray(r)
        flat = np.atleast_1d(r).ravel()
        out = np.empty(flat.shape, dtype=np.result_type(flat, float))
        block = max(1, 2_000_000 // v.size)
        for start in range(0, flat.size, block):
            out[start:start + block] = np.cos(np.outer(flat[start:start + block], v)) @ weights
        return out.reshape(np.shape(r)) if np.ndim(r) else out[0]

    return transform


def make_bump_pair(
    epsilon: float,
    sharpness: float = 1.0,
    *,
    check_radius: float = 1000.0,
    tol: float = 1e-13,
    max_panels: int = 8192,
) -> TestFunctionPair:
    """g(u) = C exp(-a / (1 - (u/eps)^2)) on (-eps, eps), with int g = 1.

    h(r) = 2 int_0^eps g(v) cos(rv) dv on a composite Gauss-Legendre grid;
    panels double until h agrees at check points up to ``check_radius``.
    """

    if epsilon <= 0 or sharpness <= 0:
        raise DomainError("support radius and sharpness must be positive")
    profile = _bump_profile(sharpness, epsilon)
    checkpoints = np.array([0.0, 0.25, 0.5, 1.0]) * check_radius

    panels = 8
    v, w = _composite_nodes(epsilon, panels)
    previous = _cosine_transform(v, 2.0 * w * profile(v))(checkpoints)
    while True:
        panels *= 2
        if panels > max_panels:
            raise IterationLimitError("bump transform did not converge on the check grid")
        v, w = _composite_nodes(epsilon, panels)
        current = _cosine_transform(v, 2.0 * w * profile(v))(checkpoints)
        if np.max(np.abs(current - previous)) < tol * max(1.0, abs(current[0])):
            break
        previous = current

    raw_mass = float(np.sum(2.0 * w * profile(v)))
    scale = 1.0 / raw_mass
    weights = 2.0 * w * profile(v) * scale
    h = _cosine_transform(v, weights)
    sine_weights = weights / v

    def g(u):
        return scale * profile(u)

    def cumulative(x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = 0.5 * h_mass + np.sin(np.outer(flat, v)) @ sine_weights
        return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])

    g0 = scale * math.exp(-sharpness)
    h_mass = 2.0 * math.pi * g0
    # g''(0) = -2 a g(0) / eps^2
    second_moment = 4.0 * math.pi * sharpness * g0 / epsilon**2

    # h is only verified up to check_radius
    radius = 1.0
    h0 = float(h(0.0))
    while radius < check_radius:
        sample = np.linspace(radius, 2.0 * radius, 257)
        if np.max(np.abs(h(sample))) < 1e-12 * h0:
            break
        radius *= 2.0
    return TestFunctionPair(
        g=g,
        h=h,
        cumulative=cumulative,
        epsilon=float(epsilon),
        ghat0=1.0,
        h_mass=h_mass,
        h_second_moment=second_moment,
        tail_radius=radius,
        label=f"bump(eps={epsilon:g}, a={sharpness:g})",
    )


def make_gaussian_pair(width: float) -> TestFunctionPair:
    """h(r) = exp(-(r/sigma)^2), g(u) = sigma/(2 sqrt(pi)) exp(-sigma^2 u^2/4).

    g is not compactly supported; ``epsilon`` is infinite.
    """

    if width <= 0:
        raise DomainError("width must be positive")
    sigma = float(width)
    amplitude = sigma / (2.0 * math.sqrt(math.pi))

    def g(u):
        u = np.asarray(u, dtype=float)
        return amplitude * np.exp(-(sigma * u) ** 2 / 4.0)

    def h(r):
        r = np.asarray(r)
        return np.exp(-((r / sigma) ** 2))

    def cumulative(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * sigma * math.sqrt(math.pi) * (1.0 + erf(x / sigma))

    return TestFunctionPair(
        g=g,
        h=h,
        cumulative=cumulative,
        epsilon=math.inf,
        ghat0=1.0,
        h_mass=sigma * math.sqrt(math.pi),
        h_second_moment=0.5 * sigma**3 * math.sqrt(math.pi),
        tail_radius=6.5 * sigma,
        label=f"gaussian(sigma={sigma:g})",
    )


def _h_of(pair_or_h) -> RealFunction:
    return pair_or_h.h if isinstance(pair_or_h, TestFunctionPair) else pair_or_h


def _g_of(pair_or_g) -> RealFunction:
    return pair_or_g.g if isinstance(pair_or_g, TestFunctionPair) else pair_or_g


def plancherel_term(h, area: float, *, tol: float = 1e-11, order: int = _QUAD_ORDER) -> float:
    """(area / 4 pi) int h(r) r tanh(pi r) dr as twice the half-line integral.

    A pair is integrated up to its tail radius, a bare h over [0, inf).
    """

    fn = _h_of(h)

    def integrand(r):
        return np.real(fn(r)) * r * np.tanh(math.pi * r)

    if isinstance(h, TestFunctionPair):
        result = integrate(
            integrand, 0.0, h.tail_radius, abs_tol=tol, rel_tol=tol, order=order, min_width=_PANEL_FLOOR
        )
    else:
        result = integrate_semi_infinite(integrand, 0.0, abs_tol=tol, rel_tol=tol, order=order)
    return area / (2.0 * math.pi) * float(result)


def geometric_side(g, lengths: Sequence[LengthSpectrumEntry]) -> float:
    """sum mult * ell0 * g(ell) / (2 sinh(ell / 2))."""

    g = _g_of(g)
    if not lengths:
        return 0.0
    ell = np.array([e.ell for e in lengths])
    ell0 = np.array([e.ell0 for e in lengths])
    mult = np.array([e.mult for e in lengths], dtype=float)
    return float(np.sum(mult * ell0 * g(ell) / (2.0 * np.sinh(ell / 2.0))))


def spectral_side(h, rs: Sequence[complex], include_symmetrized: bool = False) -> float:
    """sum h(r_j); with ``include_symmetrized`` over r_j and -r_j."""

    h = _h_of(h)
    if len(rs) == 0:
        return 0.0
    values = np.asarray(rs)
    total = np.sum(h(values))
    if include_symmetrized:
        total = total + np.sum(h(-values))
    return float(np.real(total))


@dataclass(frozen=True)
class CuspTerms:
    scattering_integral: float
    phi_half_term: float
    digamma_integral: float
    constant_term: float

    @property
    def total(self) -> float:
        return self.scattering_integral + self.phi_half_term + self.digamma_integral + self.constant_term


def _shifted(h: RealFunction, t_shift: float | None) -> RealFunction:
    if t_shift is None:
        return h
    return lambda r: h(t_shift - r) + h(t_shift + r)


def _even_line_integral(f: RealFunction, t_shift: float | None, radius: float, tol: float) -> float:
    """int_0^inf f, splitting off [0, |t| + radius] where h_t is not negligible."""

    shift = 0.0 if t_shift is None else abs(t_shift)
    edge = shift + radius
    head = integrate(f, 0.0, edge, abs_tol=tol, rel_tol=tol, breakpoints=(shift,), min_width=_PANEL_FLOOR)
    tail = integrate_semi_infinite(f, edge, abs_tol=tol, rel_tol=tol)
    return float(head) + float(tail)


def _vector(fn: Callable[[float], float]) -> RealFunction:
    return lambda r: np.array([fn(float(v)) for v in np.atleast_1d(r)])


def scattering_line_integral(pair: TestFunctionPair, t_shift: float | None = None, *, tol: float = 1e-9) -> float:
    """(1/4 pi) int h_t(r) phi'/phi(1/2 + ir) dr."""

    h = _shifted(pair.h, t_shift)
    log_deriv = _vector(phi_log_derivative_line)
    value = _even_line_integral(lambda r: np.real(h(r)) * log_deriv(r), t_shift, pair.tail_radius, tol)
    return value / (2.0 * math.pi)


def cusp_terms(
    pair: TestFunctionPair,
    t_shift: float | None = None,
    m: int = 1,
    phi_half: float | None = None,
    *,
    tol: float = 1e-9,
) -> CuspTerms:
    """Non-compact contributions of the trace formula for h_t.

    h_t = h when ``t_shift`` is None, else h(t - .) + h(t + .), whose
    g-transform at 0 is 2 g(0). The four pieces are
        (1/4 pi) int h_t phi'/phi(1/2 + ir) dr,
        -(1/4) phi(1/2) h_t(0),
        -(m/2 pi) int h_t(r) psi(1 + ir) dr,
        (m/4) h_t(0) - m ln 2 g_t(0).
    """

    if m < 1:
        raise DomainError("number of cusps must be positive")
    phi_half = phi_at_half() if phi_half is None else phi_half
    h = _shifted(pair.h, t_shift)
    h0 = float(np.real(h(np.array([0.0]))[0]))
    g0 = pair.g_at_zero() * (1.0 if t_shift is None else 2.0)

    scattering = scattering_line_integral(pair, t_shift, tol=tol)
    psi = _vector(lambda r: digamma(complex(1.0, r)).real)
    digamma_part = _even_line_integral(lambda r: np.real(h(r)) * psi(r), t_shift, pair.tail_radius, tol)
    return CuspTerms(
        scattering_integral=scattering,
        phi_half_term=-0.25 * phi_half * h0,
        digamma_integral=-(m / math.pi) * digamma_part,
        constant_term=0.25 * m * h0 - m * math.log(2.0) * g0,
    )


@dataclass(frozen=True)
class AsymptoticCheck:
    lhs: float
    rhs: float
    residual: float


def shifted_plancherel_check(pair: TestFunctionPair, t: float, area: float, *, tol: float = 1e-15) -> AsymptoticCheck:
    """(area/2pi) int h(t - r) r tanh(pi r) dr against (area/2pi)(|t| int h - sign t int h(r) r dr).

    The residual is integrated directly as
    (area/2pi) int h(u)(t - u)(tanh(pi(t - u)) - sign t) du.
    """

    if t == 0:
        raise DomainError("t must be non-zero")
    h = pair.h
    radius = pair.tail_radius
    lo, hi = -radius, radius
    kw = dict(abs_tol=tol, rel_tol=1e-12, breakpoints=(0.0, t))
    lhs = integrate(lambda u: np.real(h(u)) * (t - u) * np.tanh(math.pi * (t - u)), lo, hi, **kw)
    first_moment = integrate(lambda u: np.real(h(u)) * u, lo, hi, **kw)
    sign = math.copysign(1.0, t)
    residual = integrate(
        lambda u: np.real(h(u)) * (t - u) * (np.tanh(math.pi * (t - u)) - sign), lo, hi, **kw
    )
    factor = area / (2.0 * math.pi)
    rhs = factor * (abs(t) * pair.h_mass - sign * float(first_moment))
    return AsymptoticCheck(factor * float(lhs), rhs, factor * float(residual))


@dataclass(frozen=True)
class LocalWeylCheck:
    value: float
    deviation: float
    limit: float


def _default_weight(r):
    return r * np.tanh(math.pi * r)


def local_weyl_check(
    pair: TestFunctionPair,
    lam: float,
    p: RealFunction | None = None,
    *,
    tol: float = 1e-10,
) -> LocalWeylCheck:
    """int_{-lam}^{lam} int h(t - r) p(r) dr dt with p(r) = r tanh(pi r).

    The t-integral is int h over [-lam - r, lam - r]; the r-integral uses
    evenness of both factors. ``deviation`` is |value - lam^2| and
    ``limit`` the large-lam value of the deviation, |int r^2 h - 1/12|.
    """

    if abs(pair.h_mass - 1.0) > 1e-9:
        raise DomainError("the pair must satisfy int h = 1; use pair.normalized()")
    if lam <= 0:
        raise DomainError("lambda must be positive")
    weight = p or _default_weight
    cumulative = pair.cumulative

    def integrand(r):
        return weight(r) * (cumulative(lam - r) - cumulative(-lam - r))

    edge = lam + pair.tail_radius
    head = integrate(integrand, 0.0, edge, abs_tol=tol, rel_tol=tol, breakpoints=(lam,), min_width=_PANEL_FLOOR)
    value = 2.0 * float(head)
    return LocalWeylCheck(value, abs(value - lam * lam), abs(pair.h_second_moment - 1.0 / 12.0))


def eigenvalue_local_count(rs: Sequence[float], mu: float, a: float) -> int:
    """#{j : |r_j - mu| <= a} over the symmetrised list r_j, -r_j."""

    if a <= 0:
        raise DomainError("window half-width must be positive")
    if len(rs) == 0:
        return 0
    values = np.asarray(rs, dtype=float)
    both = np.concatenate([values, -values])
    return int(np.count_nonzero(np.abs(both - mu) <= a))


@dataclass(frozen=True)
class HeatTrace:
    t: float
    lhs: float
    leading: float
    discrete: float
    continuous: float


def heat_trace_expansion(
    t: float,
    rs: Sequence[float],
    winding_integrand: Callable[[float], float] | None = None,
    *,
    area: float | None = None,
    include_constant: bool = True,
    tol: float = 1e-10,
) -> HeatTrace:
    """sum exp(-t lambda_j) - (1/4 pi) int exp(-t(1/4 + r^2)) phi'/phi(1/2 + ir) dr.

    ``leading`` is area / (4 pi t); the area defaults to the computed
    area of the fundamental domain.
    """

    if not 0 < t:
        raise DomainError("t must be positive")
    area = fundamental_domain_area() if area is None else area
    values = np.asarray(rs, dtype=float)
    eigen = 0.25 + values**2
    discrete = float(np.sum(np.exp(-t * eigen))) + (1.0 if include_constant else 0.0)
    if values.size and math.exp(-t * float(eigen.max())) > 1e-8:
        warnings.warn(
            f"spectrum truncated at lambda = {eigen.max():.3f} is not negligible at t = {t}",
            TruncatedSpectrumWarning,
            stacklevel=2,
        )
    log_deriv = _vector(winding_integrand or phi_log_derivative_line)
    continuous = integrate_semi_infinite(
        lambda r: np.exp(-t * (0.25 + r * r)) * log_deriv(r),
        0.0,
        step=min(1.0, 1.0 / math.sqrt(t)),
        abs_tol=tol,
        rel_tol=tol,
    )
    cont = float(continuous) / (2.0 * math.pi)
    return HeatTrace(t, discrete - cont, area / (4.0 * math.pi * t), discrete, cont)


@dataclass(frozen=True)
class HeatTraceFit:
    c0: float
    log_coefficient: float
    sqrt_coefficient: float
    linear: float
    expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.c0 - self.expected) / abs(self.expected)


def heat_trace_leading_term(
    ts: Sequence[float],
    rs: Sequence[float],
    winding_integrand: Callable[[float], float] | None = None,
    *,
    area: float | None = None,
    include_constant: bool = True,
) -> HeatTraceFit:
    """Fit t * lhs = c0 + sqrt(t)(a log t + b) + c1 t and return c0.

    c0 estimates area / (4 pi).
    """

    area = fundamental_domain_area() if area is None else area
    ts = np.asarray(ts, dtype=float)
    if ts.size < 4:
        raise DomainError("the fit needs at least four values of t")
    rows = []
    rhs = []
    for t in ts:
        trace = heat_trace_expansion(t, rs, winding_integrand, area=area, include_constant=include_constant)
        root = math.sqrt(t)
        rows.append([1.0, root * math.log(t), root, t])
        rhs.append(t * trace.lhs)
    solution, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    c0, a, b, c1 = (float(v) for v in solution)
    return HeatTraceFit(c0, a, b, c1, area / (4.0 * math.pi))


@dataclass(frozen=True)
class CountingCurve:
    grid: np.ndarray
    N: np.ndarray
    M: np.ndarray
    main: np.ndarray
    D: np.ndarray
    fit_c: float
    fit_residual: float


def weyl_counting_curve(
    rs: Sequence[float],
    lambda_grid: Sequence[float],
    area: float,
    m: int = 1,
    winding: Sequence[float] | None = None,
    *,
    include_constant: bool = True,
    fit_range: tuple[float, float] = (10.0, 25.0),
) -> CountingCurve:
    """N, M and the main term (area/4pi) lambda^2 on a grid, with a fit
    D = N + M - main + (m/pi) lambda log lambda ~ c lambda."""

    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty sequence")
    if np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise DomainError("grid must be non-negative and increasing")
    values = np.sort(np.asarray(rs, dtype=float))
    winding_values = np.zeros_like(grid) if winding is None else np.asarray(winding, dtype=float)
    if winding_values.shape != grid.shape:
        raise DomainError("winding numbers must be given on the same grid")

    counts = np.searchsorted(values, grid, side="right") + (1 if include_constant else 0)
    main = area / (4.0 * math.pi) * grid**2
    log_term = np.where(grid > 0, grid * np.log(np.where(grid > 0, grid, 1.0)), 0.0)
    deviation = counts + winding_values - main + (m / math.pi) * log_term

    window = (grid >= fit_range[0]) & (grid <= fit_range[1])
    if not window.any():
        window = grid > 0
    if window.any():
        x = grid[window]
        fit_c = float(np.dot(deviation[window], x) / np.dot(x, x))
        fit_residual = float(np.max(np.abs(deviation[window] - fit_c * x)))
    else:
        fit_c, fit_residual = 0.0, 0.0
    return CountingCurve(grid, counts.astype(int), winding_values, main, deviation, fit_c, fit_residual)


def trace_formula_residual(
    pair: TestFunctionPair,
    rs: Sequence[complex],
    lengths: Sequence[LengthSpectrumEntry],
    area: float,
) -> float:
    """sum h(r_j) - (area/4pi) int h r tanh(pi r) - hyperbolic sum,
    for a cocompact torsion-free surface."""

    return spectral_side(pair, rs) - plancherel_term(pair, area) - geometric_side(pair, lengths)


def calibrate_area(
    pair: TestFunctionPair,
    rs: Sequence[complex],
    lengths: Sequence[LengthSpectrumEntry],
) -> float:
    """Area for which the torsion-free identity holds exactly for ``pair``."""

    unit = plancherel_term(pair, 1.0)
    if unit == 0:
        raise DomainError("identity term vanishes for this pair")
    return (spectral_side(pair, rs) - geometric_side(pair, lengths)) / unit
