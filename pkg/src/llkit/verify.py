"""Property suites behind ``llk verify``.

Each suite returns a list of named checks with the measured value and
its bound, so failures are diagnosable from the report alone. Suites:

  canonical    gradient of the NLL collapses to (yhat - y) x for the
               natural activation/loss pairings
  divergences  inequalities between the discrete divergences
  estimators   Monte Carlo recovery of mean / median / mode
  gradcheck    every analytic derivative against central differences
  identities   exact algebraic identities between the primitives
  scoring      proper-scoring recovery of true probabilities
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import losses_classification as lc
from .activations import (ActivationSpec, DIFFERENTIABLE_KINDS, act_deriv,
                          act_value, kink_points, softmax, softmax_jacobian)
from .divergences import divergence, entropy, renyi, wasserstein
from .glm import Dataset, GlmFamily, inverse_link, nll, nll_grad
from .losses_regression import (REGRESSION_KINDS, RegLossSpec,
                                reg_kink_residuals, reg_loss, reg_loss_grad)
from .numerics import FdConfig, central_difference, check_gradient
from .recovery import Grid, estimator_recovery
from .rng import RandomStream
from .samplers import NoiseSpec

__all__ = ["Check", "SUITES", "SuiteResult", "run_suite", "run_suites"]

SUITES = ("canonical", "divergences", "estimators", "gradcheck",
          "identities", "scoring")


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    bound: float
    op: str = "<="

    @property
    def passed(self) -> bool:
        if self.op == "<=":
            return self.measured <= self.bound
        return self.measured >= self.bound


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _le(name, measured, bound) -> Check:
    return Check(name, float(measured), float(bound), "<=")


def _grid_avoiding(lo, hi, n, kinks, margin=1e-3, nudge=5e-3):
    """n evenly spaced points, pushed off any kink by at least margin."""
    pts = np.linspace(lo, hi, n)
    for k in kinks:
        close = np.abs(pts - k) < margin
        pts[close] += nudge
    return pts


def _fd_coord(f, vec, j, cfg):
    base = np.array(vec, dtype=float)

    def g(v):
        x = base.copy()
        x[j] = v
        return f(x)

    return central_difference(g, float(base[j]), cfg)


# ---------------------------------------------------------------- gradcheck

def _activation_checks(cfg):
    out = []
    for kind in DIFFERENTIABLE_KINDS:
        spec = ActivationSpec(kind)
        grid = _grid_avoiding(-6.0, 6.0, 50, kink_points(spec))
        rpt = check_gradient(lambda z: act_value(spec, z),
                             lambda z: act_deriv(spec, z), grid, cfg)
        out.append(_le(f"gradcheck/activation/{kind}", rpt.worst_excess, 0.0))
    return out


def _regression_checks(cfg):
    out = []
    for kind in REGRESSION_KINDS:
        spec = RegLossSpec(kind)
        if kind == "gamma_deviance":
            ys = (0.5, 1.0, 3.0)
        elif kind in ("poisson", "poisson_deviance_paper", "tweedie_paper",
                      "tweedie_full"):
            ys = (0.0, 1.0, 3.0)
        else:
            ys = (-1.3, 0.4, 2.2)
        positive = kind in ("gamma_deviance", "poisson",
                            "poisson_deviance_paper", "tweedie_paper",
                            "tweedie_full")
        worst = -math.inf
        count = 0
        for y in ys:
            if positive:
                grid = np.linspace(0.2, 5.0, 17)
            else:
                kinks = [y - r for r in reg_kink_residuals(spec)]
                grid = _grid_avoiding(-4.0, 4.0, 17, kinks)
            rpt = check_gradient(lambda v: reg_loss(spec, y, v),
                                 lambda v: reg_loss_grad(spec, y, v),
                                 grid, cfg)
            worst = max(worst, rpt.worst_excess)
            count += rpt.n_points
        out.append(_le(f"gradcheck/regression/{kind}(n={count})", worst, 0.0))
    return out


def _classification_checks(cfg, seed):
    stream = RandomStream(seed)
    out = []

    def run(name, cases):
        worst = -math.inf
        count = 0
        for f, df, z in cases:
            fd = central_difference(f, z, cfg)
            worst = max(worst, cfg.excess(df(z), fd))
            count += 1
        out.append(_le(f"gradcheck/classification/{name}(n={count})",
                       worst, 0.0))

    run("bce", [(lambda p, y=y: lc.bce(y, p),
                 lambda p, y=y: lc.bce_grad(y, p), p)
                for y in (0, 1) for p in np.linspace(0.02, 0.98, 25)])
    run("bce_from_logits",
        [(lambda z, y=y: lc.bce_from_logits(y, z),
          lambda z, y=y: lc.bce_from_logits_grad(y, z), z)
         for y in (0, 1) for z in np.linspace(-6.0, 6.0, 25)])
    run("bipolar_bce",
        [(lambda v, y=y: lc.bipolar_bce(y, v),
          lambda v, y=y: lc.bipolar_bce_grad(y, v), v)
         for y in (-1, 1) for v in np.linspace(-0.96, 0.96, 25)])

    def vector_form(name, raw, grad, make_vec, trials=13, k=4):
        worst = -math.inf
        count = 0
        for t in range(trials):
            vec = make_vec()
            target = t % k
            analytic = grad(target, vec)
            for j in range(k):
                fd = _fd_coord(lambda v: raw(target, v), vec, j, cfg)
                worst = max(worst, cfg.excess(float(analytic[j]), fd))
                count += 1
        out.append(_le(f"gradcheck/classification/{name}(n={count})",
                       worst, 0.0))

    def interior_probs():
        u = stream.uniforms(4) + 0.15
        return u / u.sum()

    vector_form("cce", lc._cce_raw,
                lambda t, v: _raw_cce_grad(t, v), interior_probs)
    vector_form("focal",
                lambda t, v: lc._focal_raw(t, v, 2.0),
                lambda t, v: _raw_focal_grad(t, v, 2.0), interior_probs)
    vector_form("cce_from_logits", lc.cce_from_logits,
                lc.cce_from_logits_grad,
                lambda: 6.0 * (stream.uniforms(4) - 0.5))

    hinge_cases = []
    for kind in ("binary", "squared"):
        for y in (-1, 1):
            for s in _grid_avoiding(-4.0, 4.0, 13, [1.0 / y]):
                hinge_cases.append((kind, y, float(s)))
    worst = -math.inf
    count = 0
    for kind, y, s in hinge_cases:
        fd = central_difference(lambda v: lc.hinge(kind, y, v), s, cfg)
        worst = max(worst, cfg.excess(lc.hinge_grad(kind, y, s), fd))
        count += 1
    for kind in ("crammer_singer", "weston_watkins"):
        for t in range(7):
            scores = _margin_safe_scores(stream, t % 4)
            analytic = lc.hinge_grad(kind, t % 4, scores)
            for j in range(4):
                fd = _fd_coord(lambda v: lc.hinge(kind, t % 4, v), scores, j, cfg)
                worst = max(worst, cfg.excess(float(analytic[j]), fd))
                count += 1
    out.append(_le(f"gradcheck/classification/hinge(n={count})", worst, 0.0))
    return out


def _raw_cce_grad(target, probs):
    out = np.zeros(len(probs))
    out[target] = -1.0 / float(probs[target])
    return out


def _raw_focal_grad(target, probs, gamma):
    p = float(probs[target])
    out = np.zeros(len(probs))
    out[target] = (gamma * (1.0 - p) ** (gamma - 1.0) * math.log(p)
                   - (1.0 - p) ** gamma / p)
    return out


def _margin_safe_scores(stream, target, k=4):
    # resample until every margin 1 + s_j - s_t is at least 0.05 from 0
    while True:
        s = 4.0 * (stream.uniforms(k) - 0.5)
        margins = 1.0 + np.delete(s, target) - s[target]
        if np.all(np.abs(margins) > 0.05):
            return s


def suite_gradcheck(seed: int) -> list[Check]:
    cfg = FdConfig()
    return (_activation_checks(cfg) + _regression_checks(cfg)
            + _classification_checks(cfg, seed))


# ---------------------------------------------------------------- identities

def suite_identities(seed: int) -> list[Check]:
    stream = RandomStream(seed)
    zs = np.linspace(-6.0, 6.0, 50)
    logi = ActivationSpec("logistic")
    tanh_ = ActivationSpec("tanh")
    sp = ActivationSpec("softplus")
    checks = []

    gap = max(abs(act_value(tanh_, z) - (2.0 * act_value(logi, 2.0 * z) - 1.0))
              for z in zs)
    checks.append(_le("identity/tanh_is_2sigma2z_minus_1", gap, 1e-10))

    gap = max(abs(act_value(logi, z) - 0.5 * (act_value(tanh_, 0.5 * z) + 1.0))
              for z in zs)
    checks.append(_le("identity/sigma_from_tanh_half", gap, 1e-10))

    gap = max(abs(act_deriv(sp, z) - act_value(logi, z)) for z in zs)
    checks.append(_le("identity/softplus_deriv_is_logistic", gap, 1e-10))

    gap = max(abs(act_value(sp, z) - act_value(sp, -z) - z) for z in zs)
    checks.append(_le("identity/softplus_odd_part", gap, 1e-10))

    shift_gap = 0.0
    jac_gap = 0.0
    for _ in range(10):
        xs = 4.0 * (stream.uniforms(5) - 0.5)
        for c in (1000.0, -500.0, float(stream.uniforms(1)[0]) * 10.0):
            shift_gap = max(shift_gap,
                            float(np.max(np.abs(softmax(xs + c) - softmax(xs)))))
        jac_gap = max(jac_gap,
                      float(np.max(np.abs(softmax_jacobian(xs).sum(axis=1)))))
    checks.append(_le("identity/softmax_shift_invariance", shift_gap, 1e-10))
    checks.append(_le("identity/softmax_jacobian_row_sums", jac_gap, 1e-12))

    ce_gap = 0.0
    for _ in range(20):
        u = stream.uniforms(6) + 0.05
        v = stream.uniforms(6) + 0.05
        p, q = u / u.sum(), v / v.sum()
        ce_gap = max(ce_gap, abs(divergence("cross_entropy", p, q)
                                 - entropy(p) - divergence("kl", p, q)))
    checks.append(_le("identity/cross_entropy_decomposition", ce_gap, 1e-12))

    bb_gap = max(abs(lc.bipolar_bce(2 * t - 1, 2.0 * p - 1.0) - lc.bce(t, p))
                 for t in (0, 1) for p in np.linspace(0.02, 0.98, 25))
    checks.append(_le("identity/bipolar_bce_matches_bce", bb_gap, 1e-12))

    pin = RegLossSpec("pinball", tau=0.5)
    mae = RegLossSpec("mae")
    pin_gap = max(abs(reg_loss(pin, y, v) - 0.5 * reg_loss(mae, y, v))
                  for y in (-1.0, 0.3, 2.0) for v in np.linspace(-4.0, 4.0, 17))
    checks.append(_le("identity/pinball_half_is_half_mae", pin_gap, 1e-12))

    sq0 = ActivationSpec("squareplus", b=0.0)
    relu = ActivationSpec("relu")
    sq_gap = max(abs(act_value(sq0, z) - act_value(relu, z)) for z in zs)
    checks.append(_le("identity/squareplus_b0_is_relu", sq_gap, 1e-10))

    lse_gap = 0.0
    from .numerics import log_sum_exp
    for _ in range(10):
        xs = 6.0 * (stream.uniforms(4) - 0.5)
        c = float(stream.uniforms(1)[0]) * 100.0
        lse_gap = max(lse_gap,
                      abs(log_sum_exp(xs + c) - log_sum_exp(xs) - c))
    checks.append(_le("identity/log_sum_exp_shift", lse_gap, 1e-12))
    return checks


# ----------------------------------------------------------------- canonical

def suite_canonical(seed: int) -> list[Check]:
    stream = RandomStream(seed)
    n, d, k = 64, 5, 4
    x = 2.0 * stream.uniforms(n * d).reshape(n, d) - 1.0
    design = np.hstack([x, np.ones((n, 1))])
    checks = []

    # gaussian + identity + squared error (the NLL carries the 1/2)
    w = stream.uniforms(d + 1) - 0.5
    y = 2.0 * stream.uniforms(n) - 1.0
    eta = design @ w
    worst = 0.0
    ident = ActivationSpec("identity")
    mse = RegLossSpec("mse")
    for i in range(n):
        chain = 0.5 * reg_loss_grad(mse, y[i], eta[i]) * act_deriv(ident, eta[i])
        gap = np.max(np.abs(chain * design[i] - (eta[i] - y[i]) * design[i]))
        worst = max(worst, float(gap))
    checks.append(_le("canonical/gaussian_identity_mse", worst, 1e-12))

    # bernoulli + logistic + BCE
    w = stream.uniforms(d + 1) - 0.5
    y = (stream.uniforms(n) < 0.5).astype(float)
    eta = design @ w
    logi = ActivationSpec("logistic")
    worst = 0.0
    for i in range(n):
        p = act_value(logi, eta[i])
        chain = lc.bce_grad(y[i], p) * act_deriv(logi, eta[i])
        gap = np.max(np.abs(chain * design[i] - (p - y[i]) * design[i]))
        worst = max(worst, float(gap))
    checks.append(_le("canonical/bernoulli_logistic_bce", worst, 1e-12))

    # multinomial + softmax + CCE
    w = (stream.uniforms((d + 1) * k) - 0.5).reshape(d + 1, k)
    targets = (stream.uniforms(n) * k).astype(int)
    eta = design @ w
    worst = 0.0
    for i in range(n):
        probs = softmax(eta[i])
        chain = lc.cce_grad(int(targets[i]), probs) @ softmax_jacobian(eta[i])
        onehot = np.zeros(k)
        onehot[targets[i]] = 1.0
        gap = np.max(np.abs(np.outer(design[i], chain)
                            - np.outer(design[i], probs - onehot)))
        worst = max(worst, float(gap))
    checks.append(_le("canonical/multinomial_softmax_cce", worst, 1e-12))
    return checks


# ---------------------------------------------------------------- estimators

def suite_estimators(seed: int) -> list[Check]:
    center, tol = 0.5, 0.02
    cases = [
        ("gaussian_mse_mean", NoiseSpec("gaussian", {"sigma": 1.0}),
         RegLossSpec("mse")),
        ("laplace_mae_median", NoiseSpec("laplace", {"b": 1.0}),
         RegLossSpec("mae")),
        ("double_pareto_log_mode", NoiseSpec("double_pareto", {"alpha": 1.5}),
         RegLossSpec("log_pareto")),
    ]
    checks = []
    for label, dist, loss in cases:
        rpt = estimator_recovery(dist, loss, n=200_000, seed=seed,
                                 center=center, tolerance=tol)
        checks.append(_le(f"estimators/{label}",
                          abs(rpt.recovered_value - rpt.target_value), tol))
    return checks


# ------------------------------------------------------------------- scoring

def _simplex_lattice(k: int, m: int) -> np.ndarray:
    """All distributions with entries that are multiples of 1/m."""
    rows = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, k)
    return np.asarray(rows, dtype=float) / m


def suite_scoring(seed: int) -> list[Check]:
    stream = RandomStream(seed)
    checks = []

    # Bernoulli(0.3): the empirical-BCE minimizer is the label mean
    n = 100_000
    labels = (stream.uniforms(n) < 0.3).astype(float)
    grid = np.arange(1, 1000) / 1000.0
    ybar = float(labels.mean())
    risk = -(ybar * np.log(grid) + (1.0 - ybar) * np.log1p(-grid))
    best = float(grid[int(np.argmin(risk))])
    checks.append(_le("scoring/bernoulli_bce_recovers_p", abs(best - 0.3), 0.01))

    # CCE risk over a 4-class lattice plus the truth itself is
    # minimized exactly at the truth (strict properness)
    m = 20
    lattice = _simplex_lattice(4, m)
    worst = 0.0
    for _ in range(25):
        g = stream.gammas(4, 1.0)
        q = g / g.sum()
        cands = np.vstack([lattice, q])
        risks = -np.sum(q * np.log(np.maximum(cands, 1e-12)), axis=1)
        best_cand = cands[int(np.argmin(risks))]
        worst = max(worst, float(np.max(np.abs(best_cand - q))))
    checks.append(_le("scoring/cce_minimized_at_truth", worst, 1.0 / m))
    return checks


# --------------------------------------------------------------- divergences

def suite_divergences(seed: int) -> list[Check]:
    stream = RandomStream(seed)
    n_pairs = 1000
    slack = 1e-12
    alphas = (0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, math.inf)

    pinsker = hell_lo = hell_hi = js_bound = js_sym = ladder = -math.inf
    nonneg = -math.inf
    self_zero = -math.inf
    w1_sym = -math.inf
    bc_hi = -math.inf

    def rand_dist(k):
        g = stream.gammas(k, 1.0)
        return g / g.sum()

    for i in range(n_pairs):
        k = 2 + (i % 9)
        p, q = rand_dist(k), rand_dist(k)
        kl = divergence("kl", p, q)
        tv = divergence("total_variation", p, q)
        h = divergence("hellinger", p, q)
        js = divergence("jensen_shannon", p, q)
        bc = math.exp(-divergence("bhattacharyya", p, q))
        pinsker = max(pinsker, tv - math.sqrt(0.5 * kl))
        hell_lo = max(hell_lo, h * h - tv)
        hell_hi = max(hell_hi, tv - math.sqrt(2.0) * h)
        js_bound = max(js_bound, js - math.log(2.0))
        js_sym = max(js_sym, abs(js - divergence("jensen_shannon", q, p)))
        rs = [renyi(a, p, q) for a in alphas]
        ladder = max(ladder, max(rs[j] - rs[j + 1] for j in range(len(rs) - 1)))
        vals = [kl, tv, h, js, divergence("bhattacharyya", p, q),
                wasserstein(1.0, p, q)] + rs
        nonneg = max(nonneg, -min(vals))
        bc_hi = max(bc_hi, bc - 1.0)
        w1_sym = max(w1_sym, abs(wasserstein(1.0, p, q)
                                 - wasserstein(1.0, q, p)))
        if i < 50:
            selfs = [divergence(kind, p, p) for kind in
                     ("kl", "hellinger", "total_variation", "jensen_shannon",
                      "bhattacharyya")]
            selfs += [renyi(a, p, p) for a in (0.5, 2.0, math.inf)]
            selfs.append(wasserstein(1.0, p, p))
            self_zero = max(self_zero, max(abs(v) for v in selfs))

    checks = [
        _le("divergences/pinsker", pinsker, slack),
        _le("divergences/hellinger_sq_below_tv", hell_lo, slack),
        _le("divergences/tv_below_sqrt2_hellinger", hell_hi, slack),
        _le("divergences/js_at_most_log2", js_bound, slack),
        _le("divergences/js_symmetric", js_sym, slack),
        _le("divergences/renyi_nondecreasing_in_alpha", ladder, slack),
        _le("divergences/nonnegativity", nonneg, slack),
        _le("divergences/self_divergence_zero", self_zero, slack),
        _le("divergences/bhattacharyya_coefficient_at_most_1", bc_hi, slack),
        _le("divergences/wasserstein1_symmetric", w1_sym, slack),
    ]

    # sqrt(JS) is a metric: triangle inequality on random triples
    tri = -math.inf
    for i in range(1000):
        k = 2 + (i % 9)
        p, q, r = rand_dist(k), rand_dist(k), rand_dist(k)
        tri = max(tri, math.sqrt(divergence("jensen_shannon", p, r))
                  - math.sqrt(divergence("jensen_shannon", p, q))
                  - math.sqrt(divergence("jensen_shannon", q, r)))
    checks.append(_le("divergences/sqrt_js_triangle", tri, slack))

    # the Bhattacharyya distance is NOT a metric: exhibit a violation
    margin = -math.inf
    for _ in range(500):
        p, q, r = rand_dist(2), rand_dist(2), rand_dist(2)
        margin = max(margin, divergence("bhattacharyya", p, r)
                     - divergence("bhattacharyya", p, q)
                     - divergence("bhattacharyya", q, r))
    checks.append(Check("divergences/bhattacharyya_triangle_violation_found",
                        float(margin), 1e-9, ">="))
    return checks


_SUITE_FNS = {
    "canonical": suite_canonical,
    "divergences": suite_divergences,
    "estimators": suite_estimators,
    "gradcheck": suite_gradcheck,
    "identities": suite_identities,
    "scoring": suite_scoring,
}


def run_suite(name: str, seed: int) -> SuiteResult:
    if name not in _SUITE_FNS:
        raise ValueError(f"unknown suite: {name!r} (choose from {SUITES})")
    return SuiteResult(suite=name, checks=tuple(_SUITE_FNS[name](seed)))


def run_suites(names, seed: int) -> list[SuiteResult]:
    """Run the named suites (or all of them), ordered by suite name."""
    if names in ("all", ["all"], ("all",)):
        picked = list(SUITES)
    else:
        picked = sorted(set(names))
    return [run_suite(name, seed) for name in picked]
