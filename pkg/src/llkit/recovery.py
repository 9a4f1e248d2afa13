"""Monte Carlo checks that losses recover their claimed estimators.

The machinery is deliberately dumb: draw samples, grid-search the
empirical risk, and compare the minimizer against the analytic target
(mean / median / mode of the shifted noise). Grid search is the
independent oracle here, so no gradient code is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .losses_regression import RegLossSpec, _check_domain, _value
from .samplers import NoiseSpec, sample

__all__ = [
    "Grid",
    "RecoveryReport",
    "RobustnessRow",
    "brute_force_risk_minimizer",
    "estimator_recovery",
    "outlier_robustness_sweep",
]

_ESTIMATOR_FOR_LOSS = {
    "mse": "mean",
    "mae": "median",
    "log_pareto": "mode",
    "pinball": "quantile",
}


@dataclass(frozen=True)
class Grid:
    """Inclusive search grid lo, lo+step, ..., hi."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if self.hi < self.lo:
            raise ValueError("grid hi must be >= lo")

    def points(self) -> np.ndarray:
        count = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(count)


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of one estimator-recovery experiment."""

    estimator_kind: str
    target_value: float
    recovered_value: float
    tolerance: float
    n_samples: int
    seed: int
    passed: bool = False

    def __post_init__(self):
        ok = abs(self.recovered_value - self.target_value) <= self.tolerance
        object.__setattr__(self, "passed", ok)


@dataclass(frozen=True)
class RobustnessRow:
    kind: str
    clean_minimizer: float
    contaminated_minimizer: float
    shift: float


def brute_force_risk_minimizer(loss: RegLossSpec, samples: Sequence[float],
                               grid: Grid) -> float:
    """Grid point minimizing the empirical mean loss; ties go low.

    The returned point is only the global minimizer if the grid spans
    it; callers pick grids around the expected estimator.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("samples must be non-empty")
    points = grid.points()
    _check_domain(loss, arr, points[:1])
    best_idx, best_val = 0, np.inf
    for i, point in enumerate(points):
        val = float(np.mean(_value(loss, arr, point)))
        if val < best_val:
            best_idx, best_val = i, val
    return float(points[best_idx])


def estimator_recovery(dist: NoiseSpec, loss: RegLossSpec, n: int, seed: int,
                       center: float = 0.5, grid: Grid | None = None,
                       tolerance: float = 0.02) -> RecoveryReport:
    """Check that minimizing ``loss`` over center + noise finds the center.

    Assumes noise symmetric and unimodal about zero, so mean, median
    and mode all sit at ``center`` and one target serves every loss.
    """
    if grid is None:
        grid = Grid(center - 2.0, center + 2.0, 0.01)
    noise = sample(dist, n, seed)
    recovered = brute_force_risk_minimizer(loss, center + noise, grid)
    kind = _ESTIMATOR_FOR_LOSS.get(loss.kind, "mean")
    return RecoveryReport(estimator_kind=kind, target_value=center,
                          recovered_value=recovered, tolerance=tolerance,
                          n_samples=n, seed=seed)


def outlier_robustness_sweep(losses: Sequence[RegLossSpec],
                             contamination: float, n: int, seed: int,
                             outlier_value: float = 100.0,
                             grid: Grid | None = None) -> list[RobustnessRow]:
    """Minimizer shift per loss when a fraction of samples are outliers.

    Clean data is standard Gaussian around zero; the final
    ``round(contamination * n)`` entries are replaced by
    ``outlier_value``. The shift is |contaminated - clean| minimizer.
    """
    if not 0.0 <= contamination < 0.5:
        raise ValueError("contamination must lie in [0, 0.5)")
    if grid is None:
        grid = Grid(-5.0, max(15.0, outlier_value * 0.15), 0.01)
    clean = sample(NoiseSpec("gaussian", {"sigma": 1.0}), n, seed)
    dirty = clean.copy()
    k = int(round(contamination * n))
    if k:
        dirty[-k:] = outlier_value
    rows = []
    for spec in losses:
        lo = brute_force_risk_minimizer(spec, clean, grid)
        hi = brute_force_risk_minimizer(spec, dirty, grid)
        rows.append(RobustnessRow(kind=spec.kind, clean_minimizer=lo,
                                  contaminated_minimizer=hi,
                                  shift=abs(hi - lo)))
    return rows
