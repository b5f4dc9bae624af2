"""Data types shared between modules and the pydantic row models of the
versioned CSV formats."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import CoefficientRangeError, DomainError


class Symmetry(str, Enum):
    EVEN = "even"
    ODD = "odd"


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """a(1..M) of a Maass cusp form with a(1) = 1."""

    symmetry: Symmetry
    r: float
    a: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.a, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise DomainError("coefficient vector must be one-dimensional and non-empty")
        if not np.all(np.isfinite(values)):
            raise DomainError("coefficients must be finite")
        if abs(values[0] - 1.0) > 1e-12:
            raise DomainError(f"coefficients must be normalised to a(1) = 1, got {values[0]}")
        values[0] = 1.0
        values.setflags(write=False)
        object.__setattr__(self, "symmetry", Symmetry(self.symmetry))
        object.__setattr__(self, "a", values)

    @property
    def truncation(self) -> int:
        return int(self.a.size)

    def __call__(self, n: int) -> float:
        if not 1 <= n <= self.truncation:
            raise CoefficientRangeError(f"a({n}) requested but only a(1..{self.truncation}) are stored")
        return float(self.a[n - 1])

    def relation_residual(self, m: int, n: int) -> float:
        """|a(m)a(n) - sum_{d | (m, n)} a(mn/d^2)|."""

        if m < 1 or n < 1:
            raise DomainError("Hecke indices must be positive")
        rhs = sum(self(m * n // (d * d)) for d in divisors(math.gcd(m, n)))
        return abs(self(m) * self(n) - rhs)

    def max_relation_residual(self, bound: int) -> float:
        """Largest relation residual over all m, n >= 2 with mn <= bound."""

        worst = 0.0
        for m in range(2, bound + 1):
            for n in range(m, bound // m + 1):
                worst = max(worst, self.relation_residual(m, n))
        return worst

    def truncated(self, size: int) -> "FourierCoefficients":
        return FourierCoefficients(self.symmetry, self.r, self.a[:size])


@dataclass(frozen=True)
class SpectralPoint:
    r: float
    symmetry: Symmetry
    coefficients: FourierCoefficients
    residual_two_height: float
    residual_hecke: float
    truncation: int = 0

    def __post_init__(self) -> None:
        if self.residual_two_height < 0 or self.residual_hecke < 0:
            raise DomainError("residuals are non-negative")
        if not self.truncation:
            object.__setattr__(self, "truncation", self.coefficients.truncation)

    @property
    def eigenvalue(self) -> float:
        return 0.25 + self.r * self.r


class EigenvalueRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    r: float
    lambda_: float = Field(alias="lambda")
    symmetry: Symmetry
    M: int = Field(ge=1)
    residual_two_height: float = Field(ge=0)
    residual_hecke: float = Field(ge=0)

    @model_validator(mode="after")
    def _eigenvalue_matches(self) -> "EigenvalueRow":
        if abs(self.lambda_ - (0.25 + self.r * self.r)) > 1e-9 * max(1.0, self.lambda_):
            raise ValueError("lambda must equal 1/4 + r^2")
        return self

    @classmethod
    def from_point(cls, point: SpectralPoint) -> "EigenvalueRow":
        return cls(
            r=point.r,
            lambda_=point.eigenvalue,
            symmetry=point.symmetry,
            M=point.truncation,
            residual_two_height=point.residual_two_height,
            residual_hecke=point.residual_hecke,
        )


class CoefficientRow(BaseModel):
    n: int = Field(ge=1)
    a_n: float


class LengthSpectrumEntry(BaseModel):
    """One hyperbolic conjugacy class: its length, primitive length and
    multiplicity."""

    model_config = ConfigDict(frozen=True)

    ell: float = Field(gt=0)
    ell0: float = Field(gt=0)
    mult: int = Field(ge=1)

    @model_validator(mode="after")
    def _multiple_of_primitive(self) -> "LengthSpectrumEntry":
        if self.ell0 > self.ell * (1 + 1e-12):
            raise ValueError("primitive length exceeds length")
        ratio = self.ell / self.ell0
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError("length must be an integer multiple of the primitive length")
        return self


class WindingRow(BaseModel):
    lambda_: float = Field(alias="lambda", ge=0)
    M: float
    error: float = Field(ge=0)

    model_config = ConfigDict(populate_by_name=True)


class CountingRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lambda_: float = Field(alias="lambda")
    N: int = Field(ge=0)
    M: float
    main: float
    D: float
    fit_c: float
    fit_residual: float


class LValueRow(BaseModel):
    s_re: float
    s_im: float
    L_re: float
    L_im: float
    Lambda_re: float | None = None
    Lambda_im: float | None = None
    tail_bound: float = Field(ge=0)
