"""Power-law and exponential regime fitting for rank-frequency tables.

The central object is the fitted law f_r = c * r**(-gamma) over a rank
window [r_min, r_max].  Three estimators are provided:

* ``loglog_linfit`` -- closed-form least squares on (ln r, ln f_r);
* ``nls_fit``       -- least squares in the original coordinates;
* ``mle_exponent``  -- maximum likelihood treating token occurrences as
  draws from a discrete power law on the window's ranks.

``detect_zipf_range`` locates the widest window whose log-log fit is good
enough (residual sum below ``ss_max`` and squared correlation above
``r2_min``), and ``fit_exponential`` handles the exponential regime
f_r = a * exp(-b r) that follows the power-law range in mixtures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .corpus import RankFrequency

__all__ = [
    "FitError",
    "PowerLawFit",
    "ExpFit",
    "loglog_linfit",
    "detect_zipf_range",
    "mle_exponent",
    "nls_fit",
    "fit_exponential",
    "zipf_deviation",
]

#: Quality thresholds a window must meet to count as power-law-like.
SS_MAX_DEFAULT = 0.05
R2_MIN_DEFAULT = 0.995

#: Minimum window width (r_max - r_min) for any regime fit; below this the
#: residual thresholds are vacuous.
MIN_WINDOW = 10


class FitError(ValueError):
    """Raised for invalid fit windows or non-convergent estimators."""


@dataclass(frozen=True)
class PowerLawFit:
    """Fitted power law f_r = c * r**(-gamma) on ranks [r_min, r_max].

    ``ss_err`` is the residual sum of squares in (ln r, ln f) coordinates
    for this fit's parameters; ``r_squared`` is the squared correlation
    between ln r and ln f over the window -- a property of the data window,
    identical across estimation methods.
    """

    c: float
    gamma: float
    r_min: int
    r_max: int
    ss_err: float
    r_squared: float
    method: str

    def __post_init__(self):
        if self.method not in ("LLS", "NLS", "MLE"):
            raise FitError(f"unknown fit method {self.method!r}")
        if self.r_min > self.r_max:
            raise FitError(f"r_min={self.r_min} > r_max={self.r_max}")
        if not (self.c > 0 and self.gamma > 0):
            raise FitError(
                f"fit left the power-law domain: c={self.c}, gamma={self.gamma}"
            )
        if self.ss_err < 0 or not (0.0 <= self.r_squared <= 1.0):
            raise FitError(
                f"invalid fit quality: ss_err={self.ss_err}, R^2={self.r_squared}"
            )

    def predict(self, ranks) -> np.ndarray:
        """Model frequencies c * r**(-gamma) at the given ranks."""
        return self.c * np.asarray(ranks, dtype=np.float64) ** (-self.gamma)

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "c": self.c,
            "gamma": self.gamma,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "ss_err": self.ss_err,
            "r_squared": self.r_squared,
        }


@dataclass(frozen=True)
class ExpFit:
    """Fitted exponential decay f_r = a * exp(-b r) on ranks [lo, hi]."""

    a: float
    b: float
    lo: int
    hi: int

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise FitError(f"exponential fit requires a, b > 0, got a={self.a}, b={self.b}")

    def predict(self, ranks) -> np.ndarray:
        return self.a * np.exp(-self.b * np.asarray(ranks, dtype=np.float64))

    def to_json_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "lo": self.lo, "hi": self.hi}


# --------------------------------------------------------------------------
# Log-log linear least squares
# --------------------------------------------------------------------------

def _window_xy(rf: RankFrequency, r_min: int, r_max: int):
    if not (1 <= r_min <= r_max <= rf.n):
        raise FitError(
            f"window [{r_min}, {r_max}] out of bounds for table with n={rf.n}"
        )
    f = rf.freqs[r_min - 1:r_max]
    if np.any(f <= 0):
        raise FitError("all frequencies in the fit window must be positive")
    x = np.log(np.arange(r_min, r_max + 1, dtype=np.float64))
    y = np.log(f)
    return x, y


def loglog_linfit(rf: RankFrequency, r_min: int, r_max: int) -> PowerLawFit:
    """Closed-form least squares of ln f_r = ln c - gamma ln r on a window.

    With x_r = ln r and y_r = ln f_r the slope is
    -gamma = sum (x - xbar)(y - ybar) / sum (x - xbar)^2 and the intercept
    ln c = ybar + gamma * xbar.  ``ss_err`` is the residual sum of squares
    and ``r_squared`` the squared correlation of (x, y).

    Raises:
        FitError: window narrower than 2 ranks, out of bounds, zero rank
            variance, or a non-decaying (gamma <= 0) window.
    """
    if r_max - r_min < 2:
        raise FitError(
            f"window [{r_min}, {r_max}] too small: need r_max - r_min >= 2"
        )
    x, y = _window_xy(rf, r_min, r_max)
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    sxy = float(dx @ dy)
    beta = sxy / sxx
    gamma = -beta
    ln_c = ym + gamma * xm
    resid = dy - beta * dx
    ss_err = float(resid @ resid)
    r_squared = 0.0 if syy == 0.0 else min(1.0, sxy * sxy / (sxx * syy))
    return PowerLawFit(c=float(np.exp(ln_c)), gamma=float(gamma),
                       r_min=r_min, r_max=r_max, ss_err=ss_err,
                       r_squared=r_squared, method="LLS")


# --------------------------------------------------------------------------
# Zipfian-range detection
# --------------------------------------------------------------------------

def detect_zipf_range(rf: RankFrequency, ss_max: float = SS_MAX_DEFAULT,
                      r2_min: float = R2_MIN_DEFAULT) -> PowerLawFit:
    """Find the widest rank window whose log-log fit meets both thresholds.

    Scans every window [r_min, r_max] with r_max - r_min >= 10 and keeps
    those whose least-squares fit has ss_err < ``ss_max`` and squared
    correlation > ``r2_min``; among these the widest wins, with ties broken
    by smaller r_min, then smaller r_max.  Each window is evaluated in O(1)
    from extended-precision prefix sums over globally centered
    (ln r, ln f_r), so the scan is a plain O(n^2) loop; windows where ln f
    is constant (frequency plateaus) have zero explained variance and are
    assigned R^2 = 0, which disqualifies them.

    Raises:
        FitError: table shorter than 10 ranks, or no qualifying window.
    """
    if rf.n < MIN_WINDOW:
        raise FitError(f"need at least {MIN_WINDOW} ranks, got n={rf.n}")

    x64 = np.log(np.arange(1, rf.n + 1, dtype=np.float64))
    y64 = np.log(rf.freqs)
    # Global centering keeps the prefix-sum window algebra far from
    # cancellation; extended precision absorbs what remains.
    x = (x64 - x64.mean()).astype(np.longdouble)
    y = (y64 - y64.mean()).astype(np.longdouble)

    zero = np.zeros(1, dtype=np.longdouble)
    px = np.concatenate([zero, np.cumsum(x)])
    py = np.concatenate([zero, np.cumsum(y)])
    pxx = np.concatenate([zero, np.cumsum(x * x)])
    pyy = np.concatenate([zero, np.cumsum(y * y)])
    pxy = np.concatenate([zero, np.cumsum(x * y)])

    best: tuple[int, int, int] | None = None  # (width, r_min, r_max)
    for a in range(rf.n - MIN_WINDOW):
        # windows [a+1, b+1] in 1-based ranks, b from a+MIN_WINDOW to n-1
        b = np.arange(a + MIN_WINDOW, rf.n)
        m = (b - a + 1).astype(np.longdouble)
        sx = px[b + 1] - px[a]
        sy = py[b + 1] - py[a]
        sxx = (pxx[b + 1] - pxx[a]) - sx * sx / m
        syy = (pyy[b + 1] - pyy[a]) - sy * sy / m
        sxy = (pxy[b + 1] - pxy[a]) - sx * sy / m

        with np.errstate(divide="ignore", invalid="ignore"):
            ss = syy - sxy * sxy / sxx
            r2 = np.where((sxx > 0) & (syy > 0),
                          sxy * sxy / (sxx * syy), 0.0)
        ok = (ss < ss_max) & (r2 > r2_min) & (sxy < 0)
        if not np.any(ok):
            continue
        b_best = int(b[np.flatnonzero(ok)[-1]])
        width = b_best - a
        if best is None or width > best[0]:
            best = (width, a + 1, b_best + 1)

    if best is None:
        raise FitError(
            f"no Zipfian range: no window of width >= {MIN_WINDOW} has "
            f"ss_err < {ss_max} and R^2 > {r2_min}"
        )
    _, r_min, r_max = best
    return loglog_linfit(rf, r_min, r_max)


# --------------------------------------------------------------------------
# Cross-estimators
# --------------------------------------------------------------------------

def _window_quality(rf: RankFrequency, r_min: int, r_max: int,
                    c: float, gamma: float) -> tuple[float, float]:
    """ss_err and R^2 in ln-ln coordinates for given (c, gamma)."""
    x, y = _window_xy(rf, r_min, r_max)
    resid = y - (np.log(c) - gamma * x)
    ss_err = float(resid @ resid)
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy, sxy = float(dx @ dx), float(dy @ dy), float(dx @ dy)
    r2 = 0.0 if sxx * syy == 0.0 else min(1.0, sxy * sxy / (sxx * syy))
    return ss_err, r2


def mle_exponent(rf: RankFrequency, r_min: int, r_max: int) -> PowerLawFit:
    """Maximum-likelihood exponent for a discrete power law on a window.

    Treats each of the nu_r token occurrences at rank r as an independent
    draw from P(r) = r**(-gamma) / H(gamma), H(gamma) = sum of r**(-gamma)
    over the window, and maximizes the log-likelihood

        L(gamma) = sum_r nu_r * (-gamma ln r - ln H(gamma)).

    L is concave in gamma, so the stationary point is found by bracketed
    root-finding on L'(gamma) to an exponent tolerance below 1e-6; the
    prefactor c then normalizes the model to the window's frequency mass.

    Raises:
        FitError: single-rank window (likelihood is flat), or no interior
            maximum (all mass at an endpoint).
    """
    if r_max - r_min < 1:
        raise FitError("MLE needs at least two ranks in the window")
    if not (1 <= r_min <= r_max <= rf.n):
        raise FitError(
            f"window [{r_min}, {r_max}] out of bounds for table with n={rf.n}"
        )
    counts = rf.counts[r_min - 1:r_max].astype(np.float64)
    if np.any(counts <= 0):
        raise FitError("MLE requires positive occurrence counts in the window")
    ranks = np.arange(r_min, r_max + 1, dtype=np.float64)
    log_r = np.log(ranks)
    mean_logr_data = float(counts @ log_r) / float(counts.sum())

    def dlogl(gamma: float) -> float:
        # L'(gamma)/N = E_model[ln r] - E_data[ln r]
        w = ranks ** (-gamma)
        return float((w @ log_r) / w.sum()) - mean_logr_data

    lo, hi = 1e-6, 1.0
    while dlogl(hi) > 0:  # model mean still above data mean: decay faster
        hi *= 2.0
        if hi > 1e3:
            raise FitError("MLE exponent exceeds 1000: degenerate window")
    if dlogl(lo) < 0:
        raise FitError("all occurrence mass at the largest ranks: no MLE maximum")
    gamma = float(optimize.brentq(dlogl, lo, hi, xtol=1e-8, rtol=1e-12))

    h = float(np.sum(ranks ** (-gamma)))
    mass = float(np.sum(rf.freqs[r_min - 1:r_max]))
    c = mass / h
    ss_err, r2 = _window_quality(rf, r_min, r_max, c, gamma)
    return PowerLawFit(c=c, gamma=gamma, r_min=r_min, r_max=r_max,
                       ss_err=ss_err, r_squared=r2, method="MLE")


def nls_fit(rf: RankFrequency, r_min: int, r_max: int,
            max_iter: int = 200) -> PowerLawFit:
    """Least squares of f_r against c * r**(-gamma) in original coordinates.

    For fixed gamma the optimal prefactor is the closed form
    c(gamma) = sum f_r r**(-gamma) / sum r**(-2 gamma), so the problem
    reduces to a 1-D minimization in gamma, seeded from the log-log fit and
    iterated until the parameter step falls below 1e-9.

    Raises:
        FitError: propagated window errors, or no convergence within
            ``max_iter`` iterations (the message carries the last iterate).
    """
    seed = loglog_linfit(rf, r_min, r_max)
    f = rf.freqs[r_min - 1:r_max]
    ranks = np.arange(r_min, r_max + 1, dtype=np.float64)
    log_r = np.log(ranks)

    def c_of(gamma: float) -> float:
        w = ranks ** (-gamma)
        return float((f @ w) / (w @ w))

    def grad(gamma: float) -> float:
        # dSSE/dgamma with c profiled out: the dc/dgamma term vanishes at
        # the optimal c, leaving 2c * sum (f - c w) w ln r.
        w = ranks ** (-gamma)
        return float(((f - c_of(gamma) * w) * w) @ log_r)

    # grad increases through the optimum (SSE' < 0 below it, > 0 above), so
    # bracket [lo, hi] with grad(lo) < 0 < grad(hi) by expanding away from
    # the seed on the side the root lies on.
    g_seed = grad(seed.gamma)
    if g_seed == 0.0:
        gamma = seed.gamma
    else:
        lo = hi = seed.gamma
        step, iters = 0.25, 0
        while True:
            if g_seed > 0:
                lo = max(1e-6, lo - step)
                bracketed = grad(lo) < 0
            else:
                hi = hi + step
                bracketed = grad(hi) > 0
            if bracketed:
                break
            step *= 2.0
            iters += 1
            if iters > 60 or (g_seed > 0 and lo <= 1e-6) or hi > 1e3:
                raise FitError(
                    f"NLS gradient not bracketed after {iters} expansions; "
                    f"last iterate gamma={lo if g_seed > 0 else hi}"
                )
        gamma = float(optimize.brentq(grad, lo, hi, xtol=1e-12,
                                      rtol=8.9e-16, maxiter=max_iter))
    c = c_of(gamma)
    if not (c > 0 and gamma > 0):
        raise FitError(f"NLS left the power-law domain: c={c}, gamma={gamma}")
    ss_err, r2 = _window_quality(rf, r_min, r_max, c, gamma)
    return PowerLawFit(c=c, gamma=gamma, r_min=r_min, r_max=r_max,
                       ss_err=ss_err, r_squared=r2, method="NLS")


# --------------------------------------------------------------------------
# Exponential regime
# --------------------------------------------------------------------------

def fit_exponential(rf: RankFrequency, lo: int, hi: int) -> ExpFit:
    """Least squares of ln f_r against r on [lo, hi]: f_r = a * exp(-b r).

    Raises:
        FitError: window narrower than 10 ranks, out of bounds, or a
            non-decaying window (b <= 0).
    """
    if hi - lo < MIN_WINDOW:
        raise FitError(
            f"exponential window [{lo}, {hi}] too small: need hi - lo >= {MIN_WINDOW}"
        )
    if not (1 <= lo <= hi <= rf.n):
        raise FitError(
            f"window [{lo}, {hi}] out of bounds for table with n={rf.n}"
        )
    f = rf.freqs[lo - 1:hi]
    if np.any(f <= 0):
        raise FitError("all frequencies in the fit window must be positive")
    r = np.arange(lo, hi + 1, dtype=np.float64)
    y = np.log(f)
    rm, ym = r.mean(), y.mean()
    dr, dy = r - rm, y - ym
    slope = float(dr @ dy) / float(dr @ dr)
    intercept = ym - slope * rm
    return ExpFit(a=float(np.exp(intercept)), b=-slope, lo=lo, hi=hi)


# --------------------------------------------------------------------------
# Global deviation
# --------------------------------------------------------------------------

def zipf_deviation(rf: RankFrequency, fit: PowerLawFit) -> float:
    """|d| where d = sum over the fit window of (c * k**(-gamma) - f_k).

    Measures the signed frequency mass the fitted law over- or
    under-assigns to its own window; exact power-law data give 0.
    """
    if not (1 <= fit.r_min <= fit.r_max <= rf.n):
        raise FitError(
            f"fit window [{fit.r_min}, {fit.r_max}] out of bounds for n={rf.n}"
        )
    ranks = np.arange(fit.r_min, fit.r_max + 1, dtype=np.float64)
    d = float(np.sum(fit.predict(ranks) - rf.freqs[fit.r_min - 1:fit.r_max]))
    return abs(d)
