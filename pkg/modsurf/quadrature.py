"""Adaptive Gauss-Legendre panel integration with an error report.

Every integral in the package goes through :func:`integrate` or
:func:`integrate_semi_infinite`. Integrands are vectorised: they receive a
1-d ``numpy`` array of nodes and return an array of real or complex values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import IterationLimitError

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    error: float
    panels: int

    def __float__(self) -> float:
        return float(np.real(self.value))


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], computed once per order."""

    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel(f: Integrand, a: float, b: float, order: int):
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    values = np.asarray(f(mid + half * nodes))
    return half * np.dot(weights, values)


def integrate(
    f: Integrand,
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    order: int = 16,
    breakpoints: Sequence[float] = (),
    min_width: float = 0.0,
    max_panels: int = 200_000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by bisecting panels until the
    whole-vs-halves difference meets the tolerance.

    Panels narrower than ``min_width`` are accepted as they are; their
    difference is still added to the reported error.
    """

    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    stack = []
    coarse = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        value = _panel(f, left, right, order)
        coarse += value
        stack.append((left, right, value))
    target = max(abs_tol, rel_tol * abs(coarse))
    length = b - a

    total = 0.0
    error = 0.0
    accepted = 0
    evaluated = len(stack)
    while stack:
        left, right, whole = stack.pop()
        mid = 0.5 * (left + right)
        lower = _panel(f, left, mid, order)
        upper = _panel(f, mid, right, order)
        evaluated += 2
        diff = abs(lower + upper - whole)
        share = target * (right - left) / length
        if diff <= share or (right - left) <= min_width:
            total += lower + upper
            error += diff
            accepted += 1
            continue
        if evaluated > max_panels:
            raise IterationLimitError(
                f"adaptive quadrature exceeded {max_panels} panels on [{a}, {b}]"
            )
        stack.append((left, mid, lower))
        stack.append((mid, right, upper))

    return QuadratureResult(sign * total, error, accepted)


def integrate_semi_infinite(
    f: Integrand,
    a: float,
    *,
    step: float = 1.0,
    growth: float = 1.5,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    order: int = 16,
    min_width: float = 0.0,
    max_chunks: int = 400,
) -> QuadratureResult:
    """Integrate a decaying ``f`` over ``[a, inf)`` in growing chunks.

    Stops after two consecutive chunks contribute less than a tenth of the
    absolute tolerance.
    """

    total = 0.0
    error = 0.0
    panels = 0
    quiet = 0
    left = a
    width = step
    for _ in range(max_chunks):
        chunk = integrate(
            f,
            left,
            left + width,
            abs_tol=abs_tol,
            rel_tol=rel_tol,
            order=order,
            min_width=min_width,
        )
        total += chunk.value
        error += chunk.error
        panels += chunk.panels
        if abs(chunk.value) + chunk.error < 0.1 * max(abs_tol, rel_tol * abs(total)):
            quiet += 1
            if quiet == 2:
                return QuadratureResult(total, error + abs(chunk.value), panels)
        else:
            quiet = 0
        left += width
        width *= growth
    raise IterationLimitError(f"integrand did not decay on [{a}, inf) within {max_chunks} chunks")
