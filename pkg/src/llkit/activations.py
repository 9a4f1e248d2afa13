"""Scalar activation functions as (value, derivative) pairs.

Supported kinds: identity, logistic, tanh, softplus, relu, leaky_relu,
prelu, shifted_relu, elu, gelu, swish, mish, squareplus, delu,
softsign, arctan, heaviside, crelu.

Derivative conventions at non-differentiable points: relu'(0) = 0,
leaky_relu'(0) = prelu'(0) = alpha (the subgradient on the closed lower
branch). The Heaviside step has no usable derivative (a Dirac impulse),
so ``act_deriv`` refuses it. crelu is vector-valued and lives in its
own function rather than the scalar API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .numerics import log_sum_exp, stable_softplus

__all__ = [
    "ACTIVATION_KINDS",
    "DIFFERENTIABLE_KINDS",
    "ActivationSpec",
    "act_deriv",
    "act_value",
    "crelu",
    "kink_points",
    "softmax",
    "softmax_jacobian",
]

ACTIVATION_KINDS = (
    "identity", "logistic", "tanh", "softplus", "relu", "leaky_relu",
    "prelu", "shifted_relu", "elu", "gelu", "swish", "mish",
    "squareplus", "delu", "softsign", "arctan", "heaviside", "crelu",
)

# Every kind with a scalar derivative; heaviside and crelu are out.
DIFFERENTIABLE_KINDS = tuple(
    k for k in ACTIVATION_KINDS if k not in ("heaviside", "crelu"))

_ALPHA_DEFAULTS = {"leaky_relu": 0.01, "prelu": 0.01, "elu": 1.0,
                   "delu": 1.0, "shifted_relu": 1.0}


@dataclass(frozen=True)
class ActivationSpec:
    """An activation kind plus its hyperparameters.

    ``alpha`` is the leaky/PReLU/ELU/DELU slope, ``beta`` the swish
    temperature (or the DELU denominator), ``b`` the squareplus bend,
    ``x_c`` the DELU switch point. Defaults follow common usage:
    alpha 0.01 for the leaky family, 1.0 for ELU/DELU; beta 1 for
    swish and 2 for DELU; b = 1; x_c = 1.25643.
    """

    kind: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    b: float = 1.0
    x_c: float = 1.25643

    def __post_init__(self):
        if self.kind not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation kind: {self.kind!r}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", _ALPHA_DEFAULTS.get(self.kind, 1.0))
        if self.beta is None:
            object.__setattr__(self, "beta", 2.0 if self.kind == "delu" else 1.0)
        if self.b < 0:
            raise ValueError("squareplus b must be >= 0")
        if self.kind == "delu":
            residual = abs(self.x_c - (math.exp(self.alpha * self.x_c) - 1.0) / self.beta)
            if residual > 1e-4:
                raise ValueError(
                    "delu hyperparameters break continuity: "
                    f"|x_c - (e^(alpha*x_c)-1)/beta| = {residual:.3g} > 1e-4")


def _logistic(z: float) -> float:
    # exp(-softplus(-z)) is exact and stable at both tails.
    return math.exp(-stable_softplus(-z))


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def act_value(spec: ActivationSpec, z: float) -> float:
    """Evaluate the activation at pre-activation ``z``."""
    if not math.isfinite(z):
        raise ValueError("pre-activation must be finite")
    k = spec.kind
    if k == "identity":
        return float(z)
    if k == "logistic":
        return _logistic(z)
    if k == "tanh":
        return math.tanh(z)
    if k == "softplus":
        return stable_softplus(z)
    if k == "relu":
        return max(0.0, z)
    if k in ("leaky_relu", "prelu"):
        return z if z > 0 else spec.alpha * z
    if k == "shifted_relu":
        return max(-spec.alpha, z)
    if k == "elu":
        return z if z > 0 else spec.alpha * math.expm1(z)
    if k == "gelu":
        return z * _normal_cdf(z)
    if k == "swish":
        return z * _logistic(spec.beta * z)
    if k == "mish":
        return z * math.tanh(stable_softplus(z))
    if k == "squareplus":
        return 0.5 * (z + math.sqrt(z * z + spec.b))
    if k == "delu":
        return z if z > spec.x_c else math.expm1(spec.alpha * z) / spec.beta
    if k == "softsign":
        return z / (1.0 + abs(z))
    if k == "arctan":
        return math.atan(z)
    if k == "heaviside":
        return 1.0 if z > 0 else 0.0
    raise ValueError(f"{k} is vector-valued; use crelu()")


def act_deriv(spec: ActivationSpec, z: float) -> float:
    """Analytic derivative of the activation at ``z``."""
    if not math.isfinite(z):
        raise ValueError("pre-activation must be finite")
    k = spec.kind
    if k == "identity":
        return 1.0
    if k == "logistic":
        s = _logistic(z)
        return s * (1.0 - s)
    if k == "tanh":
        t = math.tanh(z)
        return 1.0 - t * t
    if k == "softplus":
        return _logistic(z)
    if k == "relu":
        return 1.0 if z > 0 else 0.0
    if k in ("leaky_relu", "prelu"):
        return 1.0 if z > 0 else spec.alpha
    if k == "shifted_relu":
        return 1.0 if z > -spec.alpha else 0.0
    if k == "elu":
        return 1.0 if z > 0 else spec.alpha * math.exp(z)
    if k == "gelu":
        return _normal_cdf(z) + z * _normal_pdf(z)
    if k == "swish":
        s = _logistic(spec.beta * z)
        return s + spec.beta * z * s * (1.0 - s)
    if k == "mish":
        sp = stable_softplus(z)
        t = math.tanh(sp)
        return t + z * (1.0 - t * t) * _logistic(z)
    if k == "squareplus":
        root = math.sqrt(z * z + spec.b)
        if root == 0.0:
            return 0.5
        return 0.5 * (z / root + 1.0)
    if k == "delu":
        return 1.0 if z > spec.x_c else (spec.alpha / spec.beta) * math.exp(spec.alpha * z)
    if k == "softsign":
        d = 1.0 + abs(z)
        return 1.0 / (d * d)
    if k == "arctan":
        return 1.0 / (1.0 + z * z)
    if k == "heaviside":
        raise ValueError(
            "heaviside has no usable derivative (Dirac impulse); "
            "it is excluded from gradient-based use")
    raise ValueError(f"{k} is vector-valued; use crelu()")


def crelu(z: float) -> tuple[float, float]:
    """Concatenated ReLU: the pair (relu(z), relu(-z))."""
    return (max(0.0, z), max(0.0, -z))


def kink_points(spec: ActivationSpec) -> tuple[float, ...]:
    """Arguments where the activation is not differentiable."""
    k = spec.kind
    if k in ("relu", "leaky_relu", "prelu", "elu"):
        return (0.0,)
    if k == "shifted_relu":
        return (-spec.alpha,)
    if k == "delu":
        return (spec.x_c,)
    return ()


def softmax(xs: Sequence[float]) -> np.ndarray:
    """Probability vector exp(x_i) / sum_j exp(x_j), max-shifted."""
    arr = np.asarray(xs, dtype=float)
    if arr.size == 0:
        raise ValueError("softmax requires a non-empty input")
    if not np.all(np.isfinite(arr)):
        raise ValueError("softmax entries must be finite")
    return np.exp(arr - log_sum_exp(arr))


def softmax_jacobian(xs: Sequence[float]) -> np.ndarray:
    """J[i][j] = y_i (delta_ij - y_j) with y = softmax(xs)."""
    y = softmax(xs)
    return np.diag(y) - np.outer(y, y)
