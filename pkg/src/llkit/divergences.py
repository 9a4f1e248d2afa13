"""Divergences and distances between finite discrete distributions.

Conventions: natural logarithms throughout; 0*log(0) = 0 and
0*log(0/0) = 0; the Kullback-Leibler and cross-entropy values are +inf
(not an error) when the second argument has a zero where the first has
mass. Total variation uses the half-L1 normalization, which is the one
under which the Pinsker and Hellinger inequalities hold; the raw
absolute sum is simply twice the returned value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "DIVERGENCE_KINDS",
    "DiscreteDist",
    "divergence",
    "entropy",
    "renyi",
    "wasserstein",
]

DIVERGENCE_KINDS = ("kl", "cross_entropy", "hellinger", "total_variation",
                    "jensen_shannon", "bhattacharyya")


@dataclass(frozen=True)
class DiscreteDist:
    """A probability vector: entries >= 0 summing to 1 within 1e-9."""

    probs: tuple

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("DiscreteDist needs a non-empty 1-D vector")
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise ValueError("DiscreteDist entries must be finite and >= 0")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise ValueError("DiscreteDist entries must sum to 1 within 1e-9")
        object.__setattr__(self, "probs", tuple(float(v) for v in arr))

    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


DistLike = Union[DiscreteDist, Sequence[float], np.ndarray]


def _pair(p: DistLike, q: DistLike) -> tuple[np.ndarray, np.ndarray]:
    pa = p.array() if isinstance(p, DiscreteDist) else DiscreteDist(tuple(p)).array()
    qa = q.array() if isinstance(q, DiscreteDist) else DiscreteDist(tuple(q)).array()
    if pa.size != qa.size:
        raise ValueError(f"length mismatch: {pa.size} vs {qa.size}")
    return pa, qa


def entropy(p: DistLike) -> float:
    """Shannon entropy -sum(p log p) in nats."""
    pa, _ = _pair(p, p)
    mask = pa > 0.0
    return float(-np.sum(pa[mask] * np.log(pa[mask])))


def _kl(pa: np.ndarray, qa: np.ndarray) -> float:
    mask = pa > 0.0
    if np.any(qa[mask] == 0.0):
        return math.inf
    return float(np.sum(pa[mask] * np.log(pa[mask] / qa[mask])))


def divergence(kind: str, p: DistLike, q: DistLike) -> float:
    """Evaluate a named divergence between two distributions."""
    pa, qa = _pair(p, q)
    if kind == "kl":
        return _kl(pa, qa)
    if kind == "cross_entropy":
        mask = pa > 0.0
        if np.any(qa[mask] == 0.0):
            return math.inf
        return float(-np.sum(pa[mask] * np.log(qa[mask])))
    if kind == "hellinger":
        return float(np.sqrt(0.5 * np.sum((np.sqrt(pa) - np.sqrt(qa)) ** 2)))
    if kind == "total_variation":
        return float(0.5 * np.sum(np.abs(pa - qa)))
    if kind == "jensen_shannon":
        m = 0.5 * (pa + qa)
        return 0.5 * (_kl(pa, m) + _kl(qa, m))
    if kind == "bhattacharyya":
        bc = float(np.sum(np.sqrt(pa * qa)))
        return math.inf if bc == 0.0 else -math.log(min(bc, 1.0))
    raise ValueError(f"unknown divergence kind: {kind!r}")


def renyi(alpha: float, p: DistLike, q: DistLike) -> float:
    """Renyi divergence of order ``alpha`` (limits at 0, 1 and inf).

    General order: log(sum p^alpha / q^(alpha-1)) / (alpha - 1);
    alpha=0 gives -log of the q-mass of p's support, alpha=1 the
    Kullback-Leibler divergence, alpha=inf the max log ratio, and
    alpha=1/2 twice the Bhattacharyya divergence.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    pa, qa = _pair(p, q)
    support = pa > 0.0
    if alpha == 0.0:
        return float(-np.log(np.sum(qa[support])))
    if alpha == 1.0:
        return _kl(pa, qa)
    if math.isinf(alpha):
        if np.any(qa[support] == 0.0):
            return math.inf
        return float(np.log(np.max(pa[support] / qa[support])))
    ps, qs = pa[support], qa[support]
    if alpha > 1.0 and np.any(qs == 0.0):
        return math.inf
    with np.errstate(divide="ignore"):
        total = float(np.sum(ps ** alpha * qs ** (1.0 - alpha)))
    if total == 0.0:
        return math.inf
    return math.log(total) / (alpha - 1.0)


def wasserstein(p_order: float, y: DistLike, q: DistLike) -> float:
    """Order-p transport distance on unit-spaced ordered categories.

    Built from the running mass imbalance delta_{k+1} = delta_k +
    y_k - q_k (delta_0 = 0): order 1 sums |delta_k|, order p takes the
    p-norm of the imbalance sequence.
    """
    if p_order < 1.0:
        raise ValueError("p_order must be >= 1")
    ya, qa = _pair(y, q)
    deltas = np.cumsum(ya - qa)
    if p_order == 1.0:
        return float(np.sum(np.abs(deltas)))
    return float(np.sum(np.abs(deltas) ** p_order) ** (1.0 / p_order))
