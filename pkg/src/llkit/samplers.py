"""Seeded samplers for the noise and response distributions.

Every draw goes through :class:`llkit.rng.RandomStream`, so a given
``(spec, n, seed)`` always produces the same sequence. Transforms:
Box-Muller for Gaussians, inverse CDF for Laplace and the double
Pareto, Marsaglia-Tsang for Gamma, Knuth/PTRS for Poisson, and a
compound Poisson-Gamma construction for Tweedie.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .rng import RandomStream

__all__ = ["DIST_KINDS", "NoiseSpec", "sample"]

DIST_KINDS = ("gaussian", "laplace", "double_pareto", "poisson", "gamma",
              "tweedie", "lognormal")

# (required params, optional params with defaults)
_PARAM_SCHEMA = {
    "gaussian": ((), {"sigma": 1.0, "mu": 0.0}),
    "laplace": ((), {"b": 1.0, "mu": 0.0}),
    "double_pareto": (("alpha",), {"mu": 0.0}),
    "poisson": (("lam",), {}),
    "gamma": (("shape", "rate"), {}),
    "tweedie": (("mu", "p", "phi"), {}),
    "lognormal": ((), {"sigma": 1.0, "mu": 0.0}),
}

_POSITIVE = {"sigma", "b", "alpha", "shape", "rate", "phi"}


@dataclass(frozen=True)
class NoiseSpec:
    """A named distribution plus its parameters.

    Parameter names: sigma (gaussian / lognormal scale), b (laplace
    scale), alpha (pareto tail index), lam (poisson rate), shape/rate
    (gamma), mu/p/phi (tweedie mean, power, dispersion). The location
    of gaussian/laplace/double_pareto/lognormal may be shifted with an
    optional mu (default 0).
    """

    dist: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.dist not in DIST_KINDS:
            raise ValueError(f"unknown distribution: {self.dist!r}")
        required, defaults = _PARAM_SCHEMA[self.dist]
        given = {k: float(v) for k, v in dict(self.params).items()}
        if "lambda" in given:  # accept the spelled-out rate name
            given["lam"] = given.pop("lambda")
        unknown = set(given) - set(required) - set(defaults)
        if unknown:
            raise ValueError(
                f"unknown parameter(s) for {self.dist}: {sorted(unknown)}")
        for name in required:
            if name not in given:
                raise ValueError(f"{self.dist} requires parameter {name!r}")
        merged = {**defaults, **given}
        for name, value in merged.items():
            if not np.isfinite(value):
                raise ValueError(f"parameter {name!r} must be finite")
            if name in _POSITIVE and value <= 0:
                raise ValueError(f"parameter {name!r} must be positive")
        if self.dist == "poisson" and merged["lam"] < 0:
            raise ValueError("parameter 'lam' must be >= 0")
        if self.dist == "tweedie":
            if merged["mu"] <= 0:
                raise ValueError("parameter 'mu' must be positive")
            if not 1.0 < merged["p"] < 2.0:
                raise ValueError("tweedie power 'p' must lie in (1, 2)")
        object.__setattr__(self, "params", dict(merged))


def sample(spec: NoiseSpec, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` values; identical inputs give identical output."""
    if n < 1:
        raise ValueError("n must be >= 1")
    stream = RandomStream(seed)
    p = spec.params
    if spec.dist == "gaussian":
        return p["mu"] + p["sigma"] * stream.normals(n)
    if spec.dist == "laplace":
        t = stream.uniforms(n) - 0.5
        return p["mu"] - p["b"] * np.sign(t) * np.log1p(-2.0 * np.abs(t))
    if spec.dist == "double_pareto":
        # sign from the even draws, magnitude (1-v)^(-1/alpha) - 1 from
        # the odd ones; P(|X| > t) = (1 + t)^(-alpha)
        u = stream.uniforms(2 * n)
        sign = np.where(u[0::2] < 0.5, 1.0, -1.0)
        mag = (1.0 - u[1::2]) ** (-1.0 / p["alpha"]) - 1.0
        return p["mu"] + sign * mag
    if spec.dist == "poisson":
        return stream.poissons(n, p["lam"])
    if spec.dist == "gamma":
        return stream.gammas(n, p["shape"], p["rate"])
    if spec.dist == "tweedie":
        return _tweedie(stream, n, p["mu"], p["p"], p["phi"])
    if spec.dist == "lognormal":
        return np.exp(p["mu"] + p["sigma"] * stream.normals(n))
    raise AssertionError(spec.dist)


def _tweedie(stream: RandomStream, n: int, mu: float, power: float,
             phi: float) -> np.ndarray:
    # A Tweedie variable with mean mu, dispersion phi and power p in
    # (1, 2) is a Poisson sum of iid Gamma terms: N ~ Poisson(lam),
    # X = G_1 + ... + G_N. Matching the Tweedie moment structure gives
    #   lam   = mu^(2-p) / (phi * (2-p))   frequency of terms
    #   shape = (2-p) / (p-1)              per-term Gamma shape
    #   rate  = shape * lam / mu           so E[X] = lam*shape/rate = mu
    lam = mu ** (2.0 - power) / (phi * (2.0 - power))
    shape = (2.0 - power) / (power - 1.0)
    rate = shape * lam / mu
    counts = stream.poissons(n, lam).astype(np.int64)
    total = int(counts.sum())
    out = np.zeros(n)
    if total:
        draws = stream.gammas(total, shape, rate)
        nz = counts > 0
        starts = np.concatenate(([0], np.cumsum(counts[nz])[:-1]))
        out[nz] = np.add.reduceat(draws, starts)
    return out
