"""Latent-probability model for rank-frequency curves.

Type probabilities are modeled as drawn from a prior density over the
scaled variable t = n * theta,

    w(t) = exp(-mu * t) * (c_beta + t)**(-beta),    1 < beta <= 2,

where mu enforces the mean constraint <t> = 1 (each type carries 1/n of
the probability on average).  The smooth rank-frequency curve is the upper
quantile function of w: rank r satisfies

    r / n = integral_{t_r}^inf w dt / integral_0^inf w dt,

and the effective probability of rank r is phi_r = t_r / n.  For beta = 2
and small mu this reduces to the generalized Zipf law
phi_r = c * (1/r - 1/n).

All integrals here have closed forms: substituting s = mu * (c + t) turns
integral_{t}^inf w dt into e^(mu c) mu^(beta-1) * Gamma(1-beta, mu(c+t)),
an upper incomplete gamma function of negative order, reachable from
Gamma(2-beta, x) by one downward recurrence.  Exponential prefactors
cancel in every ratio used below, so evaluation is stable over the whole
mu bracket.  A quadrature oracle (mpmath, 50 digits) was used to validate
solved mu values to 1e-9 relative during development.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .corpus import TokenCounts

__all__ = [
    "GAMMA_E",
    "ModelError",
    "ModelParams",
    "ModelCurve",
    "seed_mu",
    "solve_mu",
    "mean_residual",
    "model_curve",
    "generalized_zipf",
    "occurrence_pmf",
    "generate_corpus",
]

#: Constant used by the closed-form small-mu seed.  Note this is the
#: source material's stated value, NOT the standard Euler-Mascheroni
#: constant 0.5772...; pass gamma_e explicitly to override.
GAMMA_E = 0.55117

_RESIDUAL_TOL = 1e-10


class ModelError(ValueError):
    """Raised for invalid model parameters or solver failures."""


# --------------------------------------------------------------------------
# Closed-form integrals
# --------------------------------------------------------------------------

def _gamma_upper_2mb(beta: float, x) -> np.ndarray:
    """Unregularized upper incomplete gamma Gamma(2 - beta, x), x > 0."""
    s = 2.0 - beta
    if s < 1e-12:
        return special.exp1(x)  # Gamma(0, x)
    return special.gammaincc(s, x) * special.gamma(s)


def _gamma_upper_1mb(beta: float, x) -> np.ndarray:
    """Unregularized Gamma(1 - beta, x) by downward recurrence.

    Gamma(a, x) = [Gamma(a + 1, x) - x**a * exp(-x)] / a with a = 1 - beta
    in [-1, 0).  The subtracted term dominates for small x (both terms keep
    opposite signs after the division), so there is no cancellation.
    """
    a = 1.0 - beta
    x = np.asarray(x, dtype=np.float64)
    return (_gamma_upper_2mb(beta, x) - x ** a * np.exp(-x)) / a


def _tail_fraction(t, mu: float, c_beta: float, beta: float) -> np.ndarray:
    """P(T > t) under the weight w: Gamma(1-b, mu(c+t)) / Gamma(1-b, mu c)."""
    num = _gamma_upper_1mb(beta, mu * (c_beta + np.asarray(t)))
    den = _gamma_upper_1mb(beta, mu * c_beta)
    return num / den


def _mean_ratio(mu: float, c_beta: float, beta: float) -> float:
    """<t> under w(t): equals Gamma(2-b, mu c) / (mu * Gamma(1-b, mu c)) - c."""
    x = mu * c_beta
    return float(_gamma_upper_2mb(beta, x) / (mu * _gamma_upper_1mb(beta, x))) - c_beta


# --------------------------------------------------------------------------
# Parameter solving
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Solved model parameters.

    ``mu`` satisfies the mean constraint to relative 1e-10.  ``N`` is
    optional token-count context (0 when not supplied); operations that
    need it (occurrence statistics, rare-type prediction) require N > 0.
    """

    c_beta: float
    beta: float
    n: int
    N: int
    mu: float
    gamma_e: float = GAMMA_E

    def to_json_dict(self) -> dict:
        return {
            "c_beta": self.c_beta,
            "beta": self.beta,
            "n": self.n,
            "N": self.N,
            "mu": self.mu,
            "gamma_E_used": self.gamma_e,
        }


def seed_mu(c: float, gamma_e: float = GAMMA_E) -> float:
    """Small-mu closed-form seed mu ~ exp(-gamma_e - (1+c)/c) / c (beta = 2)."""
    if c <= 0:
        raise ModelError(f"prefactor c must be positive, got {c}")
    return math.exp(-gamma_e - (1.0 + c) / c) / c


def mean_residual(params: ModelParams) -> float:
    """Relative mean-constraint residual |<t> - 1| for solved parameters."""
    return abs(_mean_ratio(params.mu, params.c_beta, params.beta) - 1.0)


def solve_mu(c_beta: float, beta: float, n: int, N: int = 0,
             gamma_e: float = GAMMA_E) -> ModelParams:
    """Solve the mean constraint <t> = 1 for mu.

    The mean is strictly decreasing in mu, so the root is isolated by
    bracketed root-finding on [1e-12, min(1e3, 600/c_beta)] (the upper cap
    keeps the incomplete-gamma arguments inside floating-point range; the
    root for any sane prefactor is orders of magnitude below it).

    Raises:
        ModelError: parameters outside the supported domain, root not
            bracketed (message carries the residuals at both ends), or a
            solution failing the 1e-10 residual check.
    """
    if c_beta <= 0:
        raise ModelError(f"c_beta must be positive, got {c_beta}")
    if not (1.0 < beta <= 2.0):
        raise ModelError(f"beta must lie in (1, 2], got {beta}")
    if beta < 1.0 + 1e-6:
        raise ModelError(
            "beta this close to 1 loses all precision in the incomplete-"
            f"gamma recurrence; got beta={beta}"
        )
    if n < 1:
        raise ModelError(f"n must be >= 1, got {n}")

    def g(mu: float) -> float:
        return _mean_ratio(mu, c_beta, beta) - 1.0

    lo, hi = 1e-12, min(1e3, 600.0 / c_beta)
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise ModelError(
            f"mean-constraint root not bracketed on [{lo}, {hi}]: "
            f"residual {g_lo:+.3e} at the lower end, {g_hi:+.3e} at the upper"
        )
    mu = float(optimize.brentq(g, lo, hi, xtol=1e-300, rtol=8.9e-16,
                               maxiter=200))
    params = ModelParams(c_beta=c_beta, beta=beta, n=n, N=N, mu=mu,
                         gamma_e=gamma_e)
    resid = mean_residual(params)
    if resid >= _RESIDUAL_TOL:
        raise ModelError(
            f"solved mu={mu} leaves mean residual {resid:.3e} >= {_RESIDUAL_TOL}"
        )
    return params


# --------------------------------------------------------------------------
# The rank-frequency curve
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelCurve:
    """Evaluator mapping rank r in [1, n] to the effective probability phi_r.

    phi_r = t_r / n where t_r is the upper r/n-quantile of the weight w;
    strictly decreasing in r, with phi_n near 0.
    """

    params: ModelParams

    def phi(self, r) -> np.ndarray | float:
        """phi_r for scalar or array rank(s); quantile residual < 1e-10."""
        p = self.params
        r_arr = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if np.any((r_arr < 1) | (r_arr > p.n)):
            raise ModelError(f"rank out of domain [1, {p.n}]")
        target = r_arr / p.n

        # Vectorized bisection on t: _tail_fraction is strictly decreasing,
        # equal to 1 at t=0 and to target somewhere below t_hi.
        t_hi = 1.0
        while np.any(_tail_fraction(t_hi, p.mu, p.c_beta, p.beta) > target.min()):
            t_hi *= 2.0
            if t_hi > 1e18:  # pragma: no cover - unreachable for valid params
                raise ModelError("quantile bracket expansion failed")
        lo = np.zeros_like(target)
        hi = np.full_like(target, t_hi)
        # 120 halvings put the bracket below one ulp of t everywhere, so the
        # residual is limited only by the precision of the tail evaluation.
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            high_side = _tail_fraction(mid, p.mu, p.c_beta, p.beta) > target
            lo = np.where(high_side, mid, lo)
            hi = np.where(high_side, hi, mid)
        t = 0.5 * (lo + hi)
        resid = np.max(np.abs(
            _tail_fraction(t, p.mu, p.c_beta, p.beta) - target
        ))
        if resid >= _RESIDUAL_TOL:
            raise ModelError(
                f"quantile inversion residual {resid:.3e} >= {_RESIDUAL_TOL}"
            )
        phi = t / p.n
        return float(phi[0]) if np.isscalar(r) or np.ndim(r) == 0 else phi

    __call__ = phi

    def phi_table(self) -> np.ndarray:
        """phi_r for every rank 1..n."""
        return self.phi(np.arange(1, self.params.n + 1))


def model_curve(params: ModelParams) -> ModelCurve:
    """Build the rank -> phi_r evaluator for solved parameters."""
    return ModelCurve(params=params)


def rank_of_phi(params: ModelParams, phi) -> np.ndarray | float:
    """Real-valued rank at which the model curve crosses probability phi.

    The inverse direction of :meth:`ModelCurve.phi` and a single
    closed-form evaluation: r = n * P(T > n * phi).  Values above phi_1
    (rank below 1) are the caller's domain error to handle.
    """
    p = params
    phi_arr = np.asarray(phi, dtype=np.float64)
    if np.any(phi_arr < 0):
        raise ModelError("phi must be >= 0")
    out = p.n * _tail_fraction(p.n * phi_arr, p.mu, p.c_beta, p.beta)
    return float(out) if np.ndim(phi) == 0 else out


def generalized_zipf(c: float, n: int, r) -> np.ndarray | float:
    """Closed-form curve c * (1/r - 1/n): Zipf with a finite-vocabulary cutoff."""
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any((r_arr < 1) | (r_arr > n)):
        raise ModelError(f"rank out of domain [1, {n}]")
    out = c * (1.0 / r_arr - 1.0 / n)
    return float(out) if np.ndim(r) == 0 else out


def occurrence_pmf(params: ModelParams, r: int, nu: int) -> float:
    """Probability that the rank-r type occurs exactly nu times in N tokens.

    Binomial with success probability phi_r (log-space via the scipy
    binomial implementation).
    """
    if params.N < 1:
        raise ModelError("occurrence_pmf needs params.N >= 1 (token count)")
    if not (0 <= nu <= params.N):
        raise ModelError(f"nu must lie in [0, {params.N}], got {nu}")
    phi = ModelCurve(params).phi(r)
    return float(stats.binom.pmf(nu, params.N, phi))


# --------------------------------------------------------------------------
# Synthetic corpora
# --------------------------------------------------------------------------

def generate_corpus(params: ModelParams, N: int, seed: int) -> TokenCounts:
    """Sample a synthetic corpus of N tokens from the model.

    Draws n i.i.d. type probabilities from the normalized weight w(t)
    (the grand-canonical surrogate for the exact simplex prior), rescales
    them to sum to 1, and distributes N tokens multinomially.  Types that
    receive zero tokens are dropped.  Deterministic for a fixed seed.
    """
    if N < 1:
        raise ModelError(f"N must be >= 1, got {N}")
    p = params
    rng = np.random.default_rng(seed)

    # Inverse-CDF sampling through a dense monotone grid of the tail
    # fraction; the grid spans [0, T] with P(T > t) below 1e-13 at T.
    t_hi = 1.0
    while _tail_fraction(t_hi, p.mu, p.c_beta, p.beta) > 1e-13:
        t_hi *= 2.0
    grid = np.concatenate((
        [0.0], np.geomspace(1e-9 * t_hi, t_hi, 16384),
    ))
    tail = _tail_fraction(grid, p.mu, p.c_beta, p.beta)  # 1 -> ~0, decreasing
    u = rng.random(p.n)
    # P(T > t) = u  <=>  t = quantile(1 - u); interp needs ascending x.
    t = np.interp(u, tail[::-1], grid[::-1])
    probs = t / t.sum()
    counts = rng.multinomial(N, probs)

    entries = {
        f"t{i:06d}": int(c) for i, c in enumerate(counts) if c > 0
    }
    return TokenCounts.from_entries(entries, mode="synthetic:model")
