"""Maass cusp forms on SL(2, Z)\\H.

Coefficients come from a Hejhal-type collocation: values at points of
height y0 below the fundamental domain are equated with values at their
pullbacks, and the Fourier projection of that identity is solved for
a(2..M) with a(1) = 1. Eigenvalues are the r where two heights agree.

All internal values are in units of exp(pi r / 2) so the Bessel factors
neither underflow nor cancel.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.fft import dct, dst
from scipy.optimize import newton

from .config import RunConfig, get_config
from .errors import ConditioningWarning, DomainError, SingularSystemError, TruncationWarning
from .hypgeom import HPoint, pullback_points
from .schemas import FourierCoefficients, SpectralPoint, Symmetry
from .specfun import bessel_k_imag_scaled

LOWEST_FD_HEIGHT = math.sqrt(3.0) / 2.0
CONDITION_LIMIT = 1e12
# scaled K_{ir}(x) is below exp(-45) of its peak past this offset
_NEGLIGIBLE_OFFSET = 45.0
_COMPARED_COEFFICIENTS = 12


def truncation_for(r: float, y0: float, margin: float = 12.0) -> int:
    """Terms needed at height y0: past n ~ r/(2 pi y0) the Bessel factor decays."""

    if y0 <= 0:
        raise DomainError("height must be positive")
    return max(1, math.ceil((abs(r) + margin * math.sqrt(abs(r) + 4.0)) / (2.0 * math.pi * y0)))


def _trig(symmetry: Symmetry):
    return np.cos if Symmetry(symmetry) is Symmetry.EVEN else np.sin


def _scaled_expansion(a: np.ndarray, r: float, symmetry: Symmetry, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """exp(pi r/2) f at the points (x, y), truncated to a.size terms."""

    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = np.arange(1, a.size + 1, dtype=float)
    arg = 2.0 * math.pi * np.outer(y, n)
    keep = arg <= math.pi * abs(r) / 2.0 + _NEGLIGIBLE_OFFSET
    kernel = np.zeros_like(arg)
    if keep.any():
        kernel[keep] = bessel_k_imag_scaled(r, arg[keep])
    kernel *= _trig(symmetry)(2.0 * math.pi * np.outer(x, n))
    return np.sqrt(y) * (kernel @ a)


def expansion_eval(c: FourierCoefficients, z: HPoint, *, pullback: bool = False) -> float:
    """f(z) = sum a(n) sqrt(y) K_{ir}(2 pi n y) cs(2 pi n x), cs = cos or sin.

    With ``pullback`` the point is first moved into the fundamental domain,
    where the truncated sum converges fastest.
    """

    x, y = np.array([z.x]), np.array([z.y])
    if pullback:
        x, y = pullback_points(x, y)
    value = _scaled_expansion(c.a, c.r, c.symmetry, x, y)[0]
    return float(value * math.exp(-math.pi * abs(c.r) / 2.0))


def expansion_values(
    c: FourierCoefficients,
    x,
    y,
    *,
    pullback: bool = False,
    scaled: bool = False,
) -> np.ndarray:
    """Vectorised :func:`expansion_eval`; ``scaled`` keeps the exp(pi r/2) factor."""

    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if pullback:
        x, y = pullback_points(x, y)
    values = _scaled_expansion(c.a, c.r, c.symmetry, x, y)
    if scaled:
        return values
    return values * math.exp(-math.pi * abs(c.r) / 2.0)


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    """Dense system ``matrix @ a = rhs``; row 0 pins a(1) = 1."""

    matrix: np.ndarray
    rhs: np.ndarray
    column_scale: np.ndarray
    condition: float
    r: float
    symmetry: Symmetry
    y0: float


def _check_height(y0: float) -> None:
    if not 0.0 < y0 < LOWEST_FD_HEIGHT:
        raise DomainError(f"collocation height must lie in (0, sqrt(3)/2), got {y0}")


def build_collocation_system(
    r: float,
    symmetry: Symmetry,
    y0: float,
    M: int,
    *,
    oversampling: int = 8,
    margin: float = 12.0,
) -> CollocationSystem:
    """Project f(z_m) = f(z_m*) onto the first M Fourier modes.

    z_m = x_m + i y0 with x_m = (m - 1/2)/(2Q), m = 1..Q, Q = M + oversampling.
    Row n (n >= 2) reads
        sum_l a(l) [(2/Q) sum_m sqrt(Y_m) K(2 pi l Y_m) cs(2 pi l X_m) cs(2 pi n x_m)]
        - a(n) sqrt(y0) K(2 pi n y0) = 0
    and columns are equilibrated before factorisation.
    """

    _check_height(y0)
    if M < 1:
        raise DomainError("truncation must be at least 1")
    symmetry = Symmetry(symmetry)
    needed = truncation_for(r, y0, margin)
    if M < needed:
        warnings.warn(
            f"M = {M} is below the truncation rule ({needed}) at r = {r:.6f}, y0 = {y0}",
            TruncationWarning,
            stacklevel=2,
        )
    if M == 1:
        one = np.ones((1, 1))
        return CollocationSystem(one, np.ones(1), np.ones(1), 1.0, r, symmetry, y0)

    q = M + oversampling
    x = (np.arange(1, q + 1) - 0.5) / (2.0 * q)
    xs, ys = pullback_points(x, np.full(q, y0))
    n = np.arange(1, M + 1, dtype=float)
    trig = _trig(symmetry)

    arg = 2.0 * math.pi * np.outer(ys, n)
    pulled = np.zeros_like(arg)
    keep = arg <= math.pi * abs(r) / 2.0 + _NEGLIGIBLE_OFFSET
    pulled[keep] = bessel_k_imag_scaled(r, arg[keep])
    pulled *= np.sqrt(ys)[:, None] * trig(2.0 * math.pi * np.outer(xs, n))
    projector = trig(2.0 * math.pi * np.outer(n, x))
    system = (2.0 / q) * projector @ pulled
    diagonal = math.sqrt(y0) * bessel_k_imag_scaled(r, 2.0 * math.pi * n * y0)
    system -= np.diag(diagonal)

    matrix = system.copy()
    matrix[0, :] = 0.0
    matrix[0, 0] = 1.0
    rhs = np.zeros(M)
    rhs[0] = 1.0

    scale = np.max(np.abs(matrix), axis=0)
    scale[scale == 0.0] = 1.0
    matrix /= scale
    condition = float(np.linalg.cond(matrix))
    if not math.isfinite(condition) or condition > CONDITION_LIMIT:
        warnings.warn(
            f"collocation system at r = {r:.6f}, y0 = {y0} has condition {condition:.3e}",
            ConditioningWarning,
            stacklevel=2,
        )
    return CollocationSystem(matrix, rhs, scale, condition, r, symmetry, y0)


def solve_coefficients(
    r: float,
    symmetry: Symmetry,
    y0: float,
    M: int,
    *,
    oversampling: int = 8,
    margin: float = 12.0,
) -> FourierCoefficients:
    """Solve the collocation system by LU factorisation."""

    system = build_collocation_system(r, symmetry, y0, M, oversampling=oversampling, margin=margin)
    lu, piv = scipy.linalg.lu_factor(system.matrix, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystemError(f"collocation matrix is singular at r = {r}")
    scaled = scipy.linalg.lu_solve((lu, piv), system.rhs, check_finite=False)
    a = scaled / system.column_scale
    if not np.all(np.isfinite(a)):
        raise SingularSystemError(f"non-finite coefficients at r = {r}")
    a[0] = 1.0
    return FourierCoefficients(system.symmetry, float(r), a)


def _compared_range(M: int) -> int:
    return min(M, max(2, min(M // 2, _COMPARED_COEFFICIENTS)))


def coefficient_difference(
    r: float,
    symmetry: Symmetry,
    M: int,
    heights: Sequence[float] = (0.55, 0.50),
    *,
    oversampling: int = 8,
    margin: float = 12.0,
) -> np.ndarray:
    """a(2..K) at the first height minus a(2..K) at the second."""

    if M < 2:
        raise DomainError("two-height comparison needs M >= 2")
    upper, lower = heights
    first = solve_coefficients(r, symmetry, upper, M, oversampling=oversampling, margin=margin)
    second = solve_coefficients(r, symmetry, lower, M, oversampling=oversampling, margin=margin)
    k = _compared_range(M)
    return first.a[1:k] - second.a[1:k]


def consistency_residual(
    r: float,
    symmetry: Symmetry,
    M: int | None = None,
    *,
    heights: Sequence[float] = (0.55, 0.50),
    oversampling: int = 8,
    margin: float = 12.0,
) -> float:
    """Max-norm difference of coefficients solved at two heights.

    Vanishes (up to truncation error) exactly when r is a cusp-form
    eigenvalue of the given symmetry.
    """

    if M is None:
        M = truncation_for(r, min(heights), margin)
    diff = coefficient_difference(r, symmetry, M, heights, oversampling=oversampling, margin=margin)
    return float(np.max(np.abs(diff)))


def extend_coefficients(
    coeffs: FourierCoefficients,
    n_max: int,
    *,
    y_cap: float = 0.55,
    levels: int = 4,
    margin: float = 12.0,
) -> FourierCoefficients:
    """Recover a(1..n_max) from the form itself by Fourier inversion.

    f is sampled (through the pullback, using the given coefficients) on
    horizontal rows at low heights Y rho^j; a discrete cosine (sine)
    transform returns a(n) sqrt(Y) K(2 pi n Y), and each a(n) is read off
    at the height where its Bessel factor is largest.
    """

    if n_max <= coeffs.truncation:
        return coeffs.truncated(n_max)
    r = abs(coeffs.r)
    base = min(y_cap, 0.9 * max(r, 1.0) / (2.0 * math.pi * n_max))
    rho = math.exp(-min(math.pi / (4.0 * max(r, 1e-9)), 0.7))
    heights = [base * rho**j for j in range(levels)]
    q = truncation_for(r, heights[-1], margin) + n_max + 4
    x = (np.arange(1, q + 1) - 0.5) / (2.0 * q)
    n = np.arange(1, n_max + 1, dtype=float)

    best = np.zeros(n_max)
    values = np.zeros(n_max)
    for height in heights:
        xs, ys = pullback_points(x, np.full(q, height))
        samples = _scaled_expansion(coeffs.a, r, coeffs.symmetry, xs, ys)
        if coeffs.symmetry is Symmetry.EVEN:
            projected = dct(samples, type=2)[1:n_max + 1] / q
        else:
            projected = dst(samples, type=2)[:n_max] / q
        factor = math.sqrt(height) * bessel_k_imag_scaled(r, 2.0 * math.pi * n * height)
        better = np.abs(factor) > best
        best[better] = np.abs(factor[better])
        values[better] = projected[better] / factor[better]
    values[0] = 1.0
    return FourierCoefficients(coeffs.symmetry, coeffs.r, values)


def _scan_point(args: tuple) -> float:
    r, symmetry, M, heights, oversampling, margin = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        try:
            return consistency_residual(r, symmetry, M, heights=heights, oversampling=oversampling, margin=margin)
        except SingularSystemError:
            return math.inf


def _local_minima(values: np.ndarray) -> list[int]:
    picks = []
    for i, value in enumerate(values):
        left = values[i - 1] if i > 0 else math.inf
        right = values[i + 1] if i + 1 < values.size else math.inf
        if value <= left and value <= right and math.isfinite(value):
            picks.append(i)
    return picks


@dataclass(frozen=True)
class Candidate:
    r: float
    M: int
    residual: float


def eigenvalue_search(
    interval: tuple[float, float],
    symmetry: Symmetry,
    grid_step: float,
    *,
    config: RunConfig | None = None,
    workers: int | None = None,
) -> list[SpectralPoint]:
    """Locate cusp-form eigenvalues r in ``interval``.

    The two-height residual is scanned on the grid; every local minimum
    is refined by the secant method on its most sensitive coefficient
    difference (truncation fixed per minimum). Refined points must pass
    the residual threshold and the Hecke relations for mn up to the
    configured coefficient count.
    """

    cfg = config or get_config()
    r_lo, r_hi = interval
    if not 0 < r_lo < r_hi:
        raise DomainError(f"invalid interval [{r_lo}, {r_hi}]")
    if not 0 < grid_step <= 0.05:
        raise DomainError("grid step must lie in (0, 0.05]")
    symmetry = Symmetry(symmetry)
    heights = (cfg.y0, cfg.y0_secondary)
    y_low = min(heights)

    grid = np.arange(r_lo, r_hi + 0.5 * grid_step, grid_step)
    grid = grid[grid <= r_hi + 1e-12]
    # one truncation per unit window keeps the residual continuous in r
    truncations = np.array([truncation_for(math.floor(r) + 1.0, y_low, cfg.truncation_margin) for r in grid])
    tasks = [
        (float(r), symmetry, int(m), heights, cfg.collocation_oversampling, cfg.truncation_margin)
        for r, m in zip(grid, truncations)
    ]
    pool_size = workers if workers is not None else cfg.scan_workers
    if pool_size > 1:
        with ProcessPoolExecutor(max_workers=pool_size) as pool:
            residuals = np.array(list(pool.map(_scan_point, tasks, chunksize=8)))
    else:
        residuals = np.array([_scan_point(task) for task in tasks])

    candidates: list[Candidate] = []
    for i in _local_minima(residuals):
        refined = refine_eigenvalue(float(grid[i]), symmetry, int(truncations[i]), step=grid_step, heights=heights, config=cfg)
        if refined is None:
            continue
        if refined.residual > cfg.candidate_threshold:
            continue
        if any(abs(refined.r - c.r) < 1e-6 for c in candidates):
            continue
        candidates.append(refined)

    points = []
    for cand in candidates:
        if cand.residual >= cfg.acceptance_threshold:
            continue
        point = _spectral_point(cand, symmetry, cfg)
        if point.residual_hecke < cfg.hecke_threshold:
            points.append(point)
    return sorted(points, key=lambda p: p.r)


def refine_eigenvalue(
    r0: float,
    symmetry: Symmetry,
    M: int,
    *,
    step: float = 0.02,
    heights: Sequence[float] | None = None,
    config: RunConfig | None = None,
) -> Candidate | None:
    """Secant refinement of a scan minimum at fixed truncation M.

    Returns None when the iteration fails or leaves [r0 - step, r0 + step].
    """

    cfg = config or get_config()
    heights = tuple(heights) if heights is not None else (cfg.y0, cfg.y0_secondary)
    opts = dict(oversampling=cfg.collocation_oversampling, margin=cfg.truncation_margin)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        try:
            component = int(np.argmax(np.abs(coefficient_difference(r0, symmetry, M, heights, **opts))))
            root = newton(
                lambda r: coefficient_difference(r, symmetry, M, heights, **opts)[component],
                x0=r0 - step / 4.0,
                x1=r0 + step / 4.0,
                tol=cfg.secant_tolerance,
                maxiter=50,
            )
            root = float(root)
            if not abs(root - r0) <= step:
                return None
            residual = consistency_residual(root, symmetry, M, heights=heights, **opts)
        except (RuntimeError, SingularSystemError, DomainError):
            return None
    return Candidate(root, M, residual)


def _spectral_point(cand: Candidate, symmetry: Symmetry, cfg: RunConfig) -> SpectralPoint:
    base = solve_coefficients(
        cand.r, symmetry, cfg.y0, cand.M, oversampling=cfg.collocation_oversampling, margin=cfg.truncation_margin
    )
    extended = extend_coefficients(base, cfg.hecke_coefficients, y_cap=cfg.y0, margin=cfg.truncation_margin)
    return SpectralPoint(
        r=cand.r,
        symmetry=symmetry,
        coefficients=extended,
        residual_two_height=cand.residual,
        residual_hecke=extended.max_relation_residual(cfg.hecke_coefficients),
        truncation=cand.M,
    )
