"""Single-layer generalized linear models.

A family bundles a response distribution with its mean-scale activation
(the inverse link) and the matching per-example negative log-likelihood.
For the canonical pairings the gradient of the mean NLL collapses to
X^T (yhat - y) / (s * n), which is what the fitter uses.

Fitting is plain full-batch gradient descent from zero weights, with
optional backtracking (step halving until the NLL decreases). Zero
initialization is deterministic and loses nothing: with canonical links
the NLL is convex in the weights, so there is no symmetry to break.

Model files are JSON text documents holding the family name, link,
tweedie power, dispersion, feature/class counts, and the row-major
weight matrix at full precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .losses_regression import RegLossSpec, reg_loss

__all__ = [
    "CANONICAL_LINKS",
    "Dataset",
    "FAMILIES",
    "FitConfig",
    "FitDivergedError",
    "FitReport",
    "GlmFamily",
    "fit",
    "inverse_link",
    "link",
    "load_model",
    "nll",
    "nll_grad",
    "predict",
    "save_model",
]

FAMILIES = ("gaussian", "laplace", "bernoulli", "bernoulli_bipolar",
            "multinomial", "poisson", "gamma", "tweedie")

CANONICAL_LINKS = {
    "gaussian": "identity",
    "laplace": "identity",
    "bernoulli": "logit",
    "bernoulli_bipolar": "logit",
    "multinomial": "generalized_logit",
    "poisson": "log",
    "gamma": "log",   # canonical is the reciprocal; log is the stable choice
    "tweedie": "log",
}

# Families whose likelihood has no free scale; dispersion must stay 1.
_UNIT_DISPERSION = ("bernoulli", "bernoulli_bipolar", "multinomial", "poisson")

_SEPARATION_NORM = 1e3


class FitDivergedError(RuntimeError):
    """Raised when the optimizer produces a non-finite objective."""


@dataclass(frozen=True)
class GlmFamily:
    """Response family, link and dispersion for a single-layer GLM."""

    name: str
    link: Optional[str] = None
    tweedie_p: float = 1.5
    dispersion: float = 1.0

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family: {self.name!r}")
        expected = CANONICAL_LINKS[self.name]
        if self.link is None:
            object.__setattr__(self, "link", expected)
        elif self.link != expected:
            raise ValueError(
                f"family {self.name!r} uses the {expected!r} link, "
                f"not {self.link!r}")
        if not self.dispersion > 0:
            raise ValueError("dispersion must be positive")
        if self.name in _UNIT_DISPERSION and self.dispersion != 1.0:
            raise ValueError(
                f"dispersion is fixed at 1 for family {self.name!r}")
        if self.name == "tweedie" and not 1.0 < self.tweedie_p < 2.0:
            raise ValueError("tweedie_p must lie in (1, 2)")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus targets; a bias column is added internally.

    Targets are a length-n vector, except for the multinomial family
    which takes an n-by-K one-hot matrix.
    """

    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.targets, dtype=float)
        if x.shape[0] < 1:
            raise ValueError("dataset needs at least one example")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        if y.shape[0] != x.shape[0]:
            raise ValueError(
                f"targets have {y.shape[0]} rows, features {x.shape[0]}")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "targets", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def design(self) -> np.ndarray:
        return np.hstack([self.features, np.ones((self.n, 1))])


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.1
    max_iters: int = 10000
    grad_tol: float = 1e-8
    backtracking: bool = True
    seed: int = 0   # reserved for randomized inits; weights start at zero

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")


@dataclass
class FitReport:
    weights: np.ndarray
    final_nll: float
    iterations: int
    converged: bool
    grad_norm: float
    separation_flag: bool
    nll_history: list = field(default_factory=list)


def _logistic(eta):
    return np.exp(-np.logaddexp(0.0, -np.asarray(eta, dtype=float)))


def _softplus(eta):
    return np.logaddexp(0.0, np.asarray(eta, dtype=float))


def link(family: GlmFamily, mu):
    """Map mean-scale value(s) to the linear predictor."""
    name = family.name
    if name in ("gaussian", "laplace"):
        return np.asarray(mu, dtype=float) if np.ndim(mu) else float(mu)
    if name == "bernoulli":
        m = np.asarray(mu, dtype=float)
        if np.any(m <= 0.0) or np.any(m >= 1.0):
            raise ValueError("bernoulli mean must lie in (0, 1)")
        out = np.log(m / (1.0 - m))
        return out if np.ndim(mu) else float(out)
    if name == "bernoulli_bipolar":
        m = np.asarray(mu, dtype=float)
        if np.any(m <= -1.0) or np.any(m >= 1.0):
            raise ValueError("bipolar mean must lie in (-1, 1)")
        out = 2.0 * np.arctanh(m)
        return out if np.ndim(mu) else float(out)
    if name in ("poisson", "gamma", "tweedie"):
        m = np.asarray(mu, dtype=float)
        if np.any(m <= 0.0):
            raise ValueError(f"{name} mean must be positive")
        out = np.log(m)
        return out if np.ndim(mu) else float(out)
    if name == "multinomial":
        m = np.asarray(mu, dtype=float)
        if np.any(m <= 0.0):
            raise ValueError("multinomial probabilities must be positive")
        return np.log(m / m[..., -1:])
    raise AssertionError(name)


def inverse_link(family: GlmFamily, eta):
    """The family's output activation: mean-scale value(s) from eta."""
    name = family.name
    if name in ("gaussian", "laplace"):
        return np.asarray(eta, dtype=float) if np.ndim(eta) else float(eta)
    if name == "bernoulli":
        out = _logistic(eta)
        return out if np.ndim(eta) else float(out)
    if name == "bernoulli_bipolar":
        out = np.tanh(0.5 * np.asarray(eta, dtype=float))
        return out if np.ndim(eta) else float(out)
    if name in ("poisson", "gamma", "tweedie"):
        with np.errstate(over="ignore"):
            out = np.exp(np.asarray(eta, dtype=float))
        return out if np.ndim(eta) else float(out)
    if name == "multinomial":
        e = np.atleast_2d(np.asarray(eta, dtype=float))
        shifted = e - e.max(axis=1, keepdims=True)
        num = np.exp(shifted)
        out = num / num.sum(axis=1, keepdims=True)
        return out if np.ndim(eta) > 1 else out[0]
    raise AssertionError(name)


def _check_targets(family: GlmFamily, y: np.ndarray):
    name = family.name
    if name == "bernoulli":
        if not np.all(np.isin(y, (0.0, 1.0))):
            raise ValueError("bernoulli targets must be 0 or 1")
    elif name == "bernoulli_bipolar":
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("bipolar targets must be -1 or +1")
    elif name == "multinomial":
        if y.ndim != 2 or y.shape[1] < 2:
            raise ValueError("multinomial targets must be an n-by-K matrix")
        if not np.all(np.isin(y, (0.0, 1.0))) or not np.all(y.sum(axis=1) == 1.0):
            raise ValueError("multinomial targets must be one-hot rows")
    elif name == "poisson":
        if np.any(y < 0.0):
            raise ValueError("poisson targets must be >= 0")
    elif name == "gamma":
        if np.any(y <= 0.0):
            raise ValueError("gamma targets must be positive")
    elif name == "tweedie":
        if np.any(y < 0.0):
            raise ValueError("tweedie targets must be >= 0")


def _check_weights(family: GlmFamily, dataset: Dataset, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    cols = dataset.d + 1
    if family.name == "multinomial":
        k = dataset.targets.shape[1]
        if w.shape != (cols, k):
            raise ValueError(
                f"weights must have shape {(cols, k)}, got {w.shape}")
    elif w.shape != (cols,):
        raise ValueError(f"weights must have shape {(cols,)}, got {w.shape}")
    return w


def nll(family: GlmFamily, dataset: Dataset, weights) -> float:
    """Mean per-example negative log-likelihood.

    Target-only additive constants (log y! and such) are dropped;
    dispersion is treated as fixed and known.
    """
    w = _check_weights(family, dataset, weights)
    _check_targets(family, dataset.targets)
    x = dataset.design()
    y = dataset.targets
    eta = x @ w
    name, s = family.name, family.dispersion
    with np.errstate(over="ignore"):
        if name == "gaussian":
            vals = 0.5 * np.log(2.0 * np.pi * s) + (y - eta) ** 2 / (2.0 * s)
        elif name == "laplace":
            vals = np.log(2.0 * s) + np.abs(y - eta) / s
        elif name == "bernoulli":
            vals = _softplus(eta) - y * eta
        elif name == "bernoulli_bipolar":
            t = 0.5 * (y + 1.0)
            vals = _softplus(eta) - t * eta
        elif name == "multinomial":
            shifted = eta - eta.max(axis=1, keepdims=True)
            lse = np.log(np.sum(np.exp(shifted), axis=1)) + eta.max(axis=1)
            vals = lse - np.sum(y * eta, axis=1)
        elif name == "poisson":
            vals = np.exp(eta) - y * eta
        elif name == "gamma":
            mu = np.exp(eta)
            vals = reg_loss(RegLossSpec("gamma_deviance"), y, mu) / (2.0 * s)
        elif name == "tweedie":
            mu = np.exp(eta)
            vals = reg_loss(RegLossSpec("tweedie_full", p=family.tweedie_p),
                            y, mu) / (2.0 * s)
        else:
            raise AssertionError(name)
    return float(np.mean(vals))


def _mean_residual(family: GlmFamily, eta: np.ndarray, y: np.ndarray):
    """d(per-example NLL)/d(eta); the canonical (yhat - y) / s form."""
    name, s = family.name, family.dispersion
    with np.errstate(over="ignore"):
        if name == "gaussian":
            return (eta - y) / s
        if name == "laplace":
            return np.sign(eta - y) / s
        if name == "bernoulli":
            return _logistic(eta) - y
        if name == "bernoulli_bipolar":
            return _logistic(eta) - 0.5 * (y + 1.0)
        if name == "multinomial":
            return inverse_link(family, eta) - y
        if name == "poisson":
            return np.exp(eta) - y
        if name == "gamma":
            mu = np.exp(eta)
            return (mu - y) / (s * mu)
        if name == "tweedie":
            mu = np.exp(eta)
            return (mu - y) * mu ** (1.0 - family.tweedie_p) / s
    raise AssertionError(name)


def nll_grad(family: GlmFamily, dataset: Dataset, weights) -> np.ndarray:
    """Gradient of ``nll`` with respect to the weights."""
    w = _check_weights(family, dataset, weights)
    _check_targets(family, dataset.targets)
    x = dataset.design()
    resid = _mean_residual(family, x @ w, dataset.targets)
    return x.T @ resid / dataset.n


def predict(family: GlmFamily, weights, x):
    """Mean-scale prediction(s) for feature vector or matrix ``x``."""
    w = np.asarray(weights, dtype=float)
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    design = np.hstack([np.atleast_2d(arr), np.ones((np.atleast_2d(arr).shape[0], 1))])
    if design.shape[1] != w.shape[0]:
        raise ValueError(
            f"feature count {design.shape[1] - 1} does not match model "
            f"({w.shape[0] - 1})")
    out = inverse_link(family, design @ w)
    if single:
        return out[0] if family.name == "multinomial" else float(np.ravel(out)[0])
    return out


def fit(family: GlmFamily, dataset: Dataset, config: FitConfig = FitConfig()) -> FitReport:
    """Full-batch gradient descent on the mean NLL from zero weights.

    With backtracking on, the NLL sequence is non-increasing by
    construction; a step that cannot decrease the objective after 30
    halvings stops the fit. Non-finite objectives with backtracking off
    raise :class:`FitDivergedError` naming the iteration. A Bernoulli
    fit whose weights blow past an L2 norm of 1e3 while the gradient
    tolerance is unmet is flagged as (quasi-)separated.
    """
    cols = dataset.d + 1
    if family.name == "multinomial":
        w = np.zeros((cols, dataset.targets.shape[1]))
    else:
        w = np.zeros(cols)
    current = nll(family, dataset, w)
    if not math.isfinite(current):
        raise FitDivergedError("non-finite NLL at iteration 0")
    history = [current]
    iterations = 0
    for it in range(1, config.max_iters + 1):
        grad = nll_grad(family, dataset, w)
        if not np.all(np.isfinite(grad)):
            raise FitDivergedError(f"non-finite gradient at iteration {it}")
        if float(np.max(np.abs(grad))) <= config.grad_tol:
            break
        if config.backtracking:
            step = config.learning_rate
            accepted = False
            for _ in range(31):
                trial = w - step * grad
                value = nll(family, dataset, trial)
                if math.isfinite(value) and value < current:
                    w, current, accepted = trial, value, True
                    break
                step *= 0.5
            if not accepted:
                break  # stalled: no decrease possible along -grad
        else:
            w = w - config.learning_rate * grad
            current = nll(family, dataset, w)
            if not math.isfinite(current):
                raise FitDivergedError(f"non-finite NLL at iteration {it}")
        iterations = it
        history.append(current)
    grad = nll_grad(family, dataset, w)
    grad_norm = float(np.max(np.abs(grad)))
    converged = grad_norm <= config.grad_tol
    separated = (family.name in ("bernoulli", "bernoulli_bipolar")
                 and not converged
                 and float(np.linalg.norm(w)) > _SEPARATION_NORM)
    return FitReport(weights=w, final_nll=current, iterations=iterations,
                     converged=converged, grad_norm=grad_norm,
                     separation_flag=separated, nll_history=history)


def save_model(family: GlmFamily, weights, n_features: int, n_classes: int,
               path: str):
    """Write the model as a JSON text document at full float precision."""
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    doc = {
        "format": "llk-model",
        "schema_version": "1",
        "family": family.name,
        "link": family.link,
        "tweedie_p": family.tweedie_p,
        "dispersion": family.dispersion,
        "n_features": int(n_features),
        "n_classes": int(n_classes),
        "weights": [[float(v) for v in row] for row in w],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: str) -> tuple[GlmFamily, np.ndarray, int, int]:
    """Read a model document; returns (family, weights, d, K)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "llk-model":
        raise ValueError(f"{path}: not a model file")
    family = GlmFamily(doc["family"], doc["link"],
                       tweedie_p=doc.get("tweedie_p", 1.5),
                       dispersion=doc.get("dispersion", 1.0))
    weights = np.asarray(doc["weights"], dtype=float)
    n_features = int(doc["n_features"])
    n_classes = int(doc["n_classes"])
    if family.name == "multinomial":
        weights = weights.reshape(n_features + 1, n_classes)
    else:
        weights = weights.reshape(-1)
    return family, weights, n_features, n_classes
