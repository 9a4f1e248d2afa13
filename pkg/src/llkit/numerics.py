"""Numerically stable scalar primitives and the finite-difference oracle.

Everything else in the package is checked against ``central_difference``
with the mixed absolute/relative acceptance rule of ``FdConfig``:
a candidate derivative ``a`` agrees with the oracle value ``fd`` when
``|a - fd| <= abs_tol + rel_tol * |a|``. A single rule keeps the
acceptance criterion uniform across losses of wildly different scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "FdConfig",
    "GradCheckReport",
    "central_difference",
    "check_gradient",
    "log_gamma",
    "log_sum_exp",
    "stable_softplus",
]

_LN_SQRT_2PI = 0.9189385332046727  # log(sqrt(2*pi))

# Lanczos approximation, g = 7, nine coefficients. Accurate for small
# arguments, which the Gamma likelihood needs; Stirling alone is not.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
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


@dataclass(frozen=True)
class FdConfig:
    """Step and tolerances for central-difference gradient checks."""

    step: float = 1e-5
    abs_tol: float = 1e-6
    rel_tol: float = 1e-4

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")

    def agrees(self, analytic: float, fd: float) -> bool:
        return abs(analytic - fd) <= self.abs_tol + self.rel_tol * abs(analytic)

    def excess(self, analytic: float, fd: float) -> float:
        """Amount by which the deviation exceeds the allowance (<= 0 passes)."""
        return abs(analytic - fd) - (self.abs_tol + self.rel_tol * abs(analytic))


def log_sum_exp(xs: Sequence[float]) -> float:
    """log(sum(exp(x_k))), computed with a max shift so it never overflows."""
    arr = np.asarray(xs, dtype=float)
    if arr.size == 0:
        raise ValueError("log_sum_exp requires a non-empty input")
    m = float(np.max(arr))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(arr - m))))


def stable_softplus(z: float) -> float:
    """log(1 + exp(z)) as max(z, 0) + log1p(exp(-|z|)); overflow-proof."""
    z = float(z)
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


def log_gamma(x):
    """log of the Gamma function for positive arguments.

    Lanczos approximation (g=7, 9 coefficients) with the reflection
    formula below 0.5. Accepts scalars or arrays; relative error is
    below 1e-10 across [1e-3, 1e6].
    """
    arr = np.asarray(x, dtype=float)
    if arr.size and (np.any(arr <= 0.0) or not np.all(np.isfinite(arr))):
        raise ValueError("log_gamma requires x > 0")
    small = arr < 0.5
    z = np.where(small, 1.0 - arr, arr) - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for i, coef in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + coef / (z + i)
    t = z + _LANCZOS_G + 0.5
    direct = _LN_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)
    if np.any(small):
        # log Gamma(x) = log(pi / sin(pi x)) - log Gamma(1 - x) for x < 1/2
        with np.errstate(divide="ignore", invalid="ignore"):
            reflected = (np.log(np.pi) - np.log(np.sin(np.pi * arr)) - direct)
        result = np.where(small, reflected, direct)
    else:
        result = direct
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(result)
    return result


def central_difference(f: Callable[[float], float], z: float,
                       cfg: FdConfig = FdConfig()) -> float:
    """(f(z+h) - f(z-h)) / 2h with h scaled by max(1, |z|).

    The scaling balances truncation against round-off over wide
    argument ranges. Non-finite function values are an oracle failure
    and raise instead of propagating NaN.
    """
    h = cfg.step * max(1.0, abs(z))
    hi = f(z + h)
    lo = f(z - h)
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise ValueError(f"central_difference: f not finite near z={z!r}")
    return (hi - lo) / (2.0 * h)


@dataclass
class GradCheckReport:
    """Outcome of comparing an analytic derivative against the oracle."""

    n_points: int
    worst_excess: float
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.worst_excess <= 0.0 and not any(
            kind == "oracle" for kind, *_ in self.failures)


def check_gradient(f: Callable[[float], float],
                   df: Callable[[float], float],
                   points: Sequence[float],
                   cfg: FdConfig = FdConfig()) -> GradCheckReport:
    """Check df against central differences of f at every point."""
    report = GradCheckReport(n_points=0, worst_excess=-math.inf)
    for z in points:
        z = float(z)
        try:
            fd = central_difference(f, z, cfg)
        except ValueError:
            report.failures.append(("oracle", z, math.nan, math.nan))
            report.n_points += 1
            continue
        analytic = df(z)
        gap = cfg.excess(analytic, fd)
        report.worst_excess = max(report.worst_excess, gap)
        if gap > 0.0:
            report.failures.append(("mismatch", z, analytic, fd))
        report.n_points += 1
    return report
