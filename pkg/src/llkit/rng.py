"""Seedable pseudo-random number generation.

The generator is xoshiro256++ seeded through splitmix64. To make bulk
generation fast in numpy, a ``RandomStream`` runs ``lanes`` independent
xoshiro256++ streams side by side and interleaves their outputs
round-robin: output ``i`` comes from lane ``i % lanes``. Lane ``j`` is
seeded with words ``4j .. 4j+3`` of a single splitmix64 run started at
``seed``. Every draw is therefore a pure function of ``(seed, lanes)``
and the documented consumption rules below, which is what makes all
sampling-based results in this package reproducible:

  * uniforms: one 64-bit word each, mapped to (0, 1) via
    ``(word >> 11 + 0.5) * 2**-53`` (never exactly 0 or 1).
  * normals: Box-Muller on consecutive uniform pairs; for ``n`` normals,
    ``2 * ceil(n / 2)`` uniforms are consumed.
  * gammas: Marsaglia-Tsang squeeze-free rejection; each round consumes
    one normal and one uniform per still-pending draw, in draw order.
    Shapes below 1 use the power boost ``G(a) = G(a + 1) * U**(1/a)``,
    consuming one extra uniform per draw after the base draws.
  * poissons: Knuth's product-of-uniforms method for rates <= 30 (one
    uniform per pending draw per round), Hormann's PTRS transformed
    rejection above 30 (two uniforms per pending draw per round). When
    a request mixes both regimes, all small-rate draws are filled
    first, then all large-rate draws.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_U64 = np.uint64


def splitmix64_words(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of splitmix64 started at ``seed``."""
    state = seed & _MASK64
    out = np.empty(count, dtype=_U64)
    for i in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out[i] = (z ^ (z >> 31)) & _MASK64
    return out


class RandomStream:
    """Deterministic stream of draws from lane-parallel xoshiro256++."""

    def __init__(self, seed: int, lanes: int = 256):
        if lanes < 1:
            raise ValueError("lanes must be >= 1")
        self.seed = int(seed)
        self.lanes = int(lanes)
        words = splitmix64_words(self.seed, 4 * self.lanes).reshape(self.lanes, 4)
        self._s0 = words[:, 0].copy()
        self._s1 = words[:, 1].copy()
        self._s2 = words[:, 2].copy()
        self._s3 = words[:, 3].copy()
        self._buf = np.empty(0, dtype=_U64)
        self._pos = 0

    def _rotl(self, x, k):
        k = _U64(k)
        return (x << k) | (x >> _U64(64 - int(k)))

    def _block(self, rows: int) -> np.ndarray:
        """``rows`` vector steps, flattened round-robin across lanes."""
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        out = np.empty((rows, self.lanes), dtype=_U64)
        with np.errstate(over="ignore"):
            for i in range(rows):
                out[i] = self._rotl(s0 + s3, 23) + s0
                t = s1 << _U64(17)
                s2 = s2 ^ s0
                s3 = s3 ^ s1
                s1 = s1 ^ s2
                s0 = s0 ^ s3
                s2 = s2 ^ t
                s3 = self._rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return out.reshape(-1)

    def u64(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs."""
        if n < 0:
            raise ValueError("n must be >= 0")
        have = self._buf.size - self._pos
        if n <= have:
            out = self._buf[self._pos:self._pos + n]
            self._pos += n
            return out.copy()
        parts = [self._buf[self._pos:]]
        missing = n - have
        rows = -(-missing // self.lanes)
        fresh = self._block(rows)
        parts.append(fresh[:missing])
        self._buf = fresh
        self._pos = missing
        return np.concatenate(parts)

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles in the open interval (0, 1)."""
        bits = self.u64(n) >> _U64(11)
        return (bits.astype(np.float64) + 0.5) * (2.0 ** -53)

    def normals(self, n: int) -> np.ndarray:
        """``n`` standard normal draws via Box-Muller."""
        pairs = -(-n // 2)
        u = self.uniforms(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def gammas(self, n: int, shape: float, rate: float = 1.0) -> np.ndarray:
        """``n`` Gamma(shape, rate) draws via Marsaglia-Tsang."""
        if shape <= 0 or rate <= 0:
            raise ValueError("gamma shape and rate must be positive")
        if n == 0:
            return np.empty(0)
        if shape < 1.0:
            base = self.gammas(n, shape + 1.0, rate)
            u = self.uniforms(n)
            return base * u ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / np.sqrt(9.0 * d)
        out = np.empty(n)
        pending = np.arange(n)
        while pending.size:
            x = self.normals(pending.size)
            u = self.uniforms(pending.size)
            v = (1.0 + c * x) ** 3
            ok = v > 0
            safe_v = np.where(ok, v, 1.0)
            ok &= np.log(u) < 0.5 * x * x + d - d * safe_v + d * np.log(safe_v)
            out[pending[ok]] = d * safe_v[ok] / rate
            pending = pending[~ok]
        return out

    def poissons(self, n: int, rate) -> np.ndarray:
        """``n`` Poisson draws; ``rate`` is a scalar or length-n array."""
        lam = np.broadcast_to(np.asarray(rate, dtype=float), (n,))
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise ValueError("poisson rate must be finite and >= 0")
        out = np.zeros(n, dtype=np.int64)
        small = lam <= 30.0
        idx_small = np.nonzero(small)[0]
        idx_large = np.nonzero(~small)[0]
        if idx_small.size:
            out[idx_small] = self._poisson_knuth(lam[idx_small])
        if idx_large.size:
            out[idx_large] = self._poisson_ptrs(lam[idx_large])
        return out.astype(float)

    def _poisson_knuth(self, lam: np.ndarray) -> np.ndarray:
        limit = np.exp(-lam)
        k = np.zeros(lam.size, dtype=np.int64)
        p = np.ones(lam.size)
        pending = np.nonzero(lam > 0)[0]
        while pending.size:
            p[pending] *= self.uniforms(pending.size)
            k[pending] += 1
            pending = pending[p[pending] > limit[pending]]
        return np.maximum(k - 1, 0)

    def _poisson_ptrs(self, lam: np.ndarray) -> np.ndarray:
        # Hormann's PTRS; needs log-gamma, imported here to avoid a cycle.
        from .numerics import log_gamma

        b = 0.931 + 2.53 * np.sqrt(lam)
        a = -0.059 + 0.02483 * b
        inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
        v_r = 0.9277 - 3.6224 / (b - 2.0)
        log_lam = np.log(lam)
        out = np.zeros(lam.size, dtype=np.int64)
        pending = np.arange(lam.size)
        while pending.size:
            m = pending.size
            u = self.uniforms(m) - 0.5
            v = self.uniforms(m)
            us = 0.5 - np.abs(u)
            lp = lam[pending]
            k = np.floor((2.0 * a[pending] / us + b[pending]) * u + lp + 0.43)
            accept = (us >= 0.07) & (v <= v_r[pending])
            reject = (k < 0) | ((us < 0.013) & (v > us))
            needs_log = ~accept & ~reject
            if np.any(needs_log):
                kk = k[needs_log]
                lhs = np.log(v[needs_log] * inv_alpha[pending[needs_log]]
                             / (a[pending[needs_log]] / (us[needs_log] ** 2)
                                + b[pending[needs_log]]))
                rhs = (kk * log_lam[pending[needs_log]] - lp[needs_log]
                       - log_gamma(kk + 1.0))
                accept[needs_log] = lhs <= rhs
            done = accept & ~reject
            out[pending[done]] = k[done].astype(np.int64)
            pending = pending[~done]
        return out
