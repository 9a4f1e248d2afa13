"""Regression losses and their gradients with respect to the prediction.

All kinds accept scalars or numpy arrays (broadcast) and return the
per-example loss; reductions are left to callers. Gradients use the
subgradient value 0 exactly at non-differentiable points, so descent is
stationary at kinks.

Kinds: mse, mae, huber, log_cosh, eps_insensitive,
eps_insensitive_squared, huberized_eps, pinball, log_pareto, cauchy,
student_t, fair, tukey, gamma_deviance, poisson,
poisson_deviance_paper, tweedie_paper, tweedie_full.

``poisson`` is the mean-scale negative log-likelihood with constants
dropped (yhat - y*log(yhat)); ``poisson_deviance_paper`` is exactly
twice that. ``tweedie_paper`` keeps only the two target-dependent terms
of the Tweedie unit deviance, so it has no interior minimum in yhat;
``tweedie_full`` is the standard three-term unit deviance, whose p -> 2
limit is the gamma deviance. Both variants are provided on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "REGRESSION_KINDS",
    "RegLossSpec",
    "log_scale_predict",
    "reg_kink_residuals",
    "reg_loss",
    "reg_loss_grad",
]

REGRESSION_KINDS = (
    "mse", "mae", "huber", "log_cosh", "eps_insensitive",
    "eps_insensitive_squared", "huberized_eps", "pinball", "log_pareto",
    "cauchy", "student_t", "fair", "tukey", "gamma_deviance", "poisson",
    "poisson_deviance_paper", "tweedie_paper", "tweedie_full",
)

_POSITIVE_PRED_KINDS = ("gamma_deviance", "poisson",
                        "poisson_deviance_paper", "tweedie_paper",
                        "tweedie_full")
_TWEEDIE_KINDS = ("tweedie_paper", "tweedie_full")


@dataclass(frozen=True)
class RegLossSpec:
    """A regression loss kind plus its hyperparameters."""

    kind: str
    delta: float = 1.0      # huber / huberized_eps transition
    c: float = 1.0          # cauchy / fair / tukey scale
    nu: float = 3.0         # student_t degrees of freedom
    sigma: float = 1.0      # student_t scale
    eps: float = 0.1        # insensitive tube half-width
    tau: float = 0.5        # pinball quantile
    p: float = 1.5          # tweedie power

    def __post_init__(self):
        if self.kind not in REGRESSION_KINDS:
            raise ValueError(f"unknown regression loss kind: {self.kind!r}")
        for name in ("delta", "c", "nu", "sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.kind in _TWEEDIE_KINDS and not 1.0 < self.p < 2.0:
            raise ValueError("tweedie power p must lie in (1, 2)")


def _check_domain(spec, y, yhat):
    if spec.kind not in _POSITIVE_PRED_KINDS:
        return
    if np.any(yhat <= 0.0):
        raise ValueError(f"yhat must be positive for kind={spec.kind!r}")
    if spec.kind == "gamma_deviance":
        if np.any(y <= 0.0):
            raise ValueError("y must be positive for kind='gamma_deviance'")
    elif np.any(y < 0.0):
        raise ValueError(f"y must be non-negative for kind={spec.kind!r}")


def _value(spec, y, yhat):
    k = spec.kind
    r = y - yhat
    if k == "mse":
        return r * r
    if k == "mae":
        return np.abs(r)
    if k == "huber":
        d = spec.delta
        a = np.abs(r)
        return np.where(a <= d, 0.5 * r * r, d * (a - 0.5 * d))
    if k == "log_cosh":
        a = np.abs(r)
        return a - np.log(2.0) + np.log1p(np.exp(-2.0 * a))
    if k == "eps_insensitive":
        return np.maximum(0.0, np.abs(r) - spec.eps)
    if k == "eps_insensitive_squared":
        t = np.maximum(0.0, np.abs(r) - spec.eps)
        return t * t
    if k == "huberized_eps":
        e = np.abs(r) - spec.eps
        d = spec.delta
        return np.where(e <= 0.0, 0.0,
                        np.where(e <= d, e * e / (2.0 * d), e - 0.5 * d))
    if k == "pinball":
        return np.where(r >= 0.0, spec.tau * r, (1.0 - spec.tau) * (-r))
    if k == "log_pareto":
        return np.log1p(np.abs(r))
    if k == "cauchy":
        return np.log1p(r * r / (spec.c * spec.c))
    if k == "student_t":
        return 0.5 * (spec.nu + 1.0) * np.log1p(
            r * r / (spec.nu * spec.sigma * spec.sigma))
    if k == "fair":
        a = np.abs(r) / spec.c
        return spec.c * spec.c * (a - np.log1p(a))
    if k == "tukey":
        c = spec.c
        u = 1.0 - np.minimum(np.abs(r) / c, 1.0) ** 2
        return (c * c / 6.0) * (1.0 - u ** 3)
    if k == "gamma_deviance":
        return 2.0 * ((y - yhat) / yhat - np.log(y / yhat))
    if k == "poisson":
        return yhat - _xlogy(y, yhat)
    if k == "poisson_deviance_paper":
        return 2.0 * (yhat - _xlogy(y, yhat))
    if k == "tweedie_paper":
        p = spec.p
        return (2.0 / (1.0 - p)) * (y * yhat ** (1.0 - p)
                                    - _pow0(y, 2.0 - p) / (2.0 - p))
    if k == "tweedie_full":
        p = spec.p
        return 2.0 * (_pow0(y, 2.0 - p) / ((1.0 - p) * (2.0 - p))
                      - y * yhat ** (1.0 - p) / (1.0 - p)
                      + yhat ** (2.0 - p) / (2.0 - p))
    raise AssertionError(k)


def _grad(spec, y, yhat):
    k = spec.kind
    r = y - yhat
    if k == "mse":
        return -2.0 * r
    if k == "mae":
        return -np.sign(r)
    if k == "huber":
        d = spec.delta
        return np.where(np.abs(r) <= d, -r, -d * np.sign(r))
    if k == "log_cosh":
        return -np.tanh(r)
    if k == "eps_insensitive":
        return np.where(np.abs(r) > spec.eps, -np.sign(r), 0.0)
    if k == "eps_insensitive_squared":
        return -2.0 * np.maximum(0.0, np.abs(r) - spec.eps) * np.sign(r)
    if k == "huberized_eps":
        e = np.abs(r) - spec.eps
        d = spec.delta
        return np.where(e <= 0.0, 0.0,
                        np.where(e <= d, -e * np.sign(r) / d, -np.sign(r)))
    if k == "pinball":
        return np.where(r > 0.0, -spec.tau,
                        np.where(r < 0.0, 1.0 - spec.tau, 0.0))
    if k == "log_pareto":
        return -np.sign(r) / (1.0 + np.abs(r))
    if k == "cauchy":
        return -2.0 * r / (spec.c * spec.c + r * r)
    if k == "student_t":
        return -(spec.nu + 1.0) * r / (r * r + spec.sigma * spec.sigma * spec.nu)
    if k == "fair":
        return -r / (1.0 + np.abs(r) / spec.c)
    if k == "tukey":
        c = spec.c
        u = 1.0 - (r / c) ** 2
        return np.where(np.abs(r) <= c, -r * u * u, 0.0)
    if k == "gamma_deviance":
        return 2.0 * (yhat - y) / (yhat * yhat)
    if k == "poisson":
        return 1.0 - y / yhat
    if k == "poisson_deviance_paper":
        return 2.0 * (1.0 - y / yhat)
    if k == "tweedie_paper":
        return 2.0 * y * yhat ** (-spec.p)
    if k == "tweedie_full":
        return 2.0 * yhat ** (-spec.p) * (yhat - y)
    raise AssertionError(k)


def _xlogy(x, y):
    # 0 * log(0) == 0 by the limit convention
    x = np.asarray(x, dtype=float)
    out = np.where(x == 0.0, 0.0, x * np.log(np.where(x == 0.0, 1.0, y)))
    return out


def _pow0(x, e):
    # x**e with 0**e == 0 for e > 0 even when x carries a float -0.0
    return np.where(np.asarray(x, dtype=float) == 0.0, 0.0,
                    np.asarray(x, dtype=float) ** e)


def _dispatch(fn, spec, y, yhat):
    scalar = np.isscalar(y) and np.isscalar(yhat)
    ya = np.asarray(y, dtype=float)
    pa = np.asarray(yhat, dtype=float)
    if not (np.all(np.isfinite(ya)) and np.all(np.isfinite(pa))):
        raise ValueError("y and yhat must be finite")
    _check_domain(spec, ya, pa)
    out = fn(spec, ya, pa)
    return float(out) if scalar else out


def reg_loss(spec: RegLossSpec, y, yhat):
    """Per-example loss of ``yhat`` against target ``y``."""
    return _dispatch(_value, spec, y, yhat)


def reg_loss_grad(spec: RegLossSpec, y, yhat):
    """d(loss)/d(yhat), with the kink convention documented above."""
    return _dispatch(_grad, spec, y, yhat)


def reg_kink_residuals(spec: RegLossSpec) -> tuple[float, ...]:
    """Residual values y - yhat where the loss is not smooth."""
    k = spec.kind
    if k in ("mae", "pinball", "log_pareto"):
        return (0.0,)
    if k == "huber":
        return (-spec.delta, spec.delta)
    if k in ("eps_insensitive", "eps_insensitive_squared"):
        return (-spec.eps, 0.0, spec.eps) if spec.eps == 0 else (-spec.eps, spec.eps)
    if k == "huberized_eps":
        outer = spec.eps + spec.delta
        return (-outer, -spec.eps, spec.eps, outer)
    if k == "tukey":
        return (-spec.c, spec.c)
    return ()


def log_scale_predict(nu_hat: float, sigma2: float) -> float:
    """Mean-scale prediction exp(nu_hat + sigma2/2) from a log-scale fit.

    ``sigma2`` is the residual variance on the log scale; passing 0
    reduces to plain exponentiation. Overflow yields +inf.
    """
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    with np.errstate(over="ignore"):
        return float(np.exp(nu_hat + 0.5 * sigma2))
