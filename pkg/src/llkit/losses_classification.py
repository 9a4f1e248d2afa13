"""Classification losses: cross-entropy family, focal loss, hinges.

Per-example losses with paired gradients taken with respect to the
prediction (the probability, the logit, or the score vector). The
probability forms clamp their inputs to [1e-12, 1 - 1e-12] before any
logarithm; the logit forms exist precisely so that extreme confidence
never needs clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .activations import softmax
from .numerics import log_sum_exp, stable_softplus

__all__ = [
    "HINGE_KINDS",
    "OneHot",
    "ProbVector",
    "bce",
    "bce_from_logits",
    "bce_from_logits_grad",
    "bce_grad",
    "bipolar_bce",
    "bipolar_bce_grad",
    "cce",
    "cce_from_logits",
    "cce_from_logits_grad",
    "cce_grad",
    "focal",
    "focal_grad",
    "hinge",
    "hinge_grad",
]

P_FLOOR = 1e-12
HINGE_KINDS = ("binary", "squared", "crammer_singer", "weston_watkins")


@dataclass(frozen=True)
class OneHot:
    """A class target as (index, number of classes)."""

    index: int
    length: int

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("OneHot length must be >= 2")
        if not 0 <= self.index < self.length:
            raise ValueError("OneHot index out of range")

    def vector(self) -> np.ndarray:
        out = np.zeros(self.length)
        out[self.index] = 1.0
        return out


@dataclass(frozen=True)
class ProbVector:
    """A distribution over >= 2 classes; must sum to 1 within 1e-9."""

    entries: tuple

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("ProbVector needs >= 2 entries")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("ProbVector entries must lie in [0, 1]")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise ValueError("ProbVector entries must sum to 1 within 1e-9")
        object.__setattr__(self, "entries", tuple(float(v) for v in arr))

    def array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)


def _as_probs(probs) -> np.ndarray:
    if isinstance(probs, ProbVector):
        return probs.array()
    return ProbVector(tuple(np.asarray(probs, dtype=float))).array()


def _as_onehot(target, length: int) -> OneHot:
    if isinstance(target, OneHot):
        if target.length != length:
            raise ValueError(
                f"target length {target.length} != prediction length {length}")
        return target
    return OneHot(int(target), length)


def _check_binary(y) -> float:
    if y not in (0, 1, 0.0, 1.0):
        raise ValueError("binary target must be 0 or 1")
    return float(y)


def _check_bipolar(y) -> float:
    if y not in (-1, 1, -1.0, 1.0):
        raise ValueError("bipolar target must be -1 or +1")
    return float(y)


def _clamp01(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    return min(max(p, P_FLOOR), 1.0 - P_FLOOR)


def bce(y, p: float) -> float:
    """Binary cross-entropy -[y log p + (1-y) log(1-p)]."""
    y = _check_binary(y)
    p = _clamp01(p)
    return -(y * math.log(p) + (1.0 - y) * math.log1p(-p))


def bce_grad(y, p: float) -> float:
    y = _check_binary(y)
    p = _clamp01(p)
    return -y / p + (1.0 - y) / (1.0 - p)


def bce_from_logits(y, z: float) -> float:
    """BCE of the logistic of ``z``, computed as softplus(z) - y*z."""
    y = _check_binary(y)
    return stable_softplus(z) - y * float(z)


def bce_from_logits_grad(y, z: float) -> float:
    """d/dz of bce_from_logits: logistic(z) - y."""
    y = _check_binary(y)
    return math.exp(-stable_softplus(-z)) - y


def bipolar_bce(y, yhat: float) -> float:
    """Cross-entropy for targets in {-1, +1} and predictions in (-1, 1).

    Equals bce((y+1)/2, (yhat+1)/2) exactly, including the log 2 offset.
    """
    y = _check_bipolar(y)
    yhat = min(max(float(yhat), -1.0 + P_FLOOR), 1.0 - P_FLOOR)
    return (-0.5 * ((y + 1.0) * math.log1p(yhat)
                    + (1.0 - y) * math.log1p(-yhat))
            + math.log(2.0))


def bipolar_bce_grad(y, yhat: float) -> float:
    y = _check_bipolar(y)
    yhat = min(max(float(yhat), -1.0 + P_FLOOR), 1.0 - P_FLOOR)
    return -0.5 * ((y + 1.0) / (1.0 + yhat) - (1.0 - y) / (1.0 - yhat))


def _cce_raw(index: int, probs: np.ndarray) -> float:
    return -math.log(max(float(probs[index]), P_FLOOR))


def cce(target, probs) -> float:
    """Categorical cross-entropy -log(probs[target])."""
    arr = _as_probs(probs)
    t = _as_onehot(target, arr.size)
    return _cce_raw(t.index, arr)


def cce_grad(target, probs) -> np.ndarray:
    arr = _as_probs(probs)
    t = _as_onehot(target, arr.size)
    out = np.zeros(arr.size)
    out[t.index] = -1.0 / max(float(arr[t.index]), P_FLOOR)
    return out


def cce_from_logits(target, zs: Sequence[float]) -> float:
    """Cross-entropy of softmax(zs): log_sum_exp(zs) - zs[target]."""
    arr = np.asarray(zs, dtype=float)
    t = _as_onehot(target, arr.size)
    return log_sum_exp(arr) - float(arr[t.index])


def cce_from_logits_grad(target, zs: Sequence[float]) -> np.ndarray:
    """d/dzs of cce_from_logits: softmax(zs) - onehot(target)."""
    arr = np.asarray(zs, dtype=float)
    t = _as_onehot(target, arr.size)
    return softmax(arr) - t.vector()


def _focal_raw(index: int, probs: np.ndarray, gamma: float) -> float:
    p = max(float(probs[index]), P_FLOOR)
    return -((1.0 - p) ** gamma) * math.log(p)


def focal(target, probs, gamma: float) -> float:
    """Cross-entropy down-weighted by the modulating factor (1-p)^gamma."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    arr = _as_probs(probs)
    t = _as_onehot(target, arr.size)
    return _focal_raw(t.index, arr, gamma)


def focal_grad(target, probs, gamma: float) -> np.ndarray:
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    arr = _as_probs(probs)
    t = _as_onehot(target, arr.size)
    p = min(max(float(arr[t.index]), P_FLOOR), 1.0 - P_FLOOR)
    out = np.zeros(arr.size)
    out[t.index] = (gamma * (1.0 - p) ** (gamma - 1.0) * math.log(p)
                    - (1.0 - p) ** gamma / p)
    return out


def hinge(kind: str, target, scores) -> float:
    """Margin losses: binary, squared, crammer_singer, weston_watkins.

    The binary kinds take a bipolar target and a scalar score; the
    multiclass kinds take a class target and a score vector, with the
    usual margin of the true score over the others.
    """
    if kind in ("binary", "squared"):
        y = _check_bipolar(target)
        s = float(scores)
        m = max(0.0, 1.0 - y * s)
        return m if kind == "binary" else m * m
    arr = np.asarray(scores, dtype=float)
    t = _as_onehot(target, arr.size)
    others = np.delete(arr, t.index)
    if kind == "crammer_singer":
        return max(0.0, 1.0 + float(others.max()) - float(arr[t.index]))
    if kind == "weston_watkins":
        return float(np.sum(np.maximum(0.0, 1.0 + others - arr[t.index])))
    raise ValueError(f"unknown hinge kind: {kind!r}")


def hinge_grad(kind: str, target, scores) -> Union[float, np.ndarray]:
    """Gradient of ``hinge`` with respect to the score(s); 0 at margins."""
    if kind in ("binary", "squared"):
        y = _check_bipolar(target)
        s = float(scores)
        m = 1.0 - y * s
        if kind == "binary":
            return -y if m > 0 else 0.0
        return -2.0 * y * max(0.0, m)
    arr = np.asarray(scores, dtype=float)
    t = _as_onehot(target, arr.size)
    out = np.zeros(arr.size)
    if kind == "crammer_singer":
        masked = arr.copy()
        masked[t.index] = -np.inf
        j = int(np.argmax(masked))
        if 1.0 + arr[j] - arr[t.index] > 0.0:
            out[j] += 1.0
            out[t.index] -= 1.0
        return out
    if kind == "weston_watkins":
        for j in range(arr.size):
            if j != t.index and 1.0 + arr[j] - arr[t.index] > 0.0:
                out[j] += 1.0
                out[t.index] -= 1.0
        return out
    raise ValueError(f"unknown hinge kind: {kind!r}")
