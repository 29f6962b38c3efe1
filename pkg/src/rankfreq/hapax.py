"""Predictors for the rare-type (hapax legomena) region.

The empiric object is the jump rank r_k -- the largest rank whose type
occurs more than k times -- and four theories predict it from aggregate
text statistics:

* ``predict_gz``       closed form [k/(N c) + 1/n]^(-1) from the
                       generalized Zipf curve (exact at k = 0);
* ``predict_gz_beta``  the latent-probability model curve read at
                       probability k/N (any beta);
* ``predict_rgf``      cumulative of the random-group-formation spectrum
                       P(k) = A exp(-bk) k^(-gamma);
* ``predict_waring``   cumulative of the Waring-Herdan recurrence seeded
                       by the fraction of once-occurring types.

``compare_predictors`` assembles the side-by-side relative-error table.
"""

from __future__ import annotations

import dataclasses
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import RankFrequency, jump_ranks
from .model import ModelParams, rank_of_phi

__all__ = [
    "HapaxError",
    "RgfParams",
    "WaringParams",
    "HapaxTable",
    "predict_gz",
    "predict_gz_beta",
    "lotka_counts",
    "rgf_fit",
    "predict_rgf",
    "waring_fit",
    "predict_waring",
    "compare_predictors",
]

#: Default comparison depth (k = 1..10 in the published tables).
DEPTH_DEFAULT = 10


class HapaxError(ValueError):
    """Raised for degenerate occurrence spectra or failed spectrum fits."""


# --------------------------------------------------------------------------
# Closed-form predictors
# --------------------------------------------------------------------------

def predict_gz(k: int, N: int, n: int, c: float) -> float:
    """Predicted jump rank [k/(N c) + 1/n]^(-1) from the generalized Zipf law.

    Exact at k = 0 (returns n: every type occurs at least once).
    """
    if k < 0:
        raise HapaxError(f"k must be >= 0, got {k}")
    if N < 1 or n < 1:
        raise HapaxError(f"N and n must be >= 1, got N={N}, n={n}")
    if c <= 0:
        raise HapaxError(f"prefactor c must be positive, got {c}")
    if k == 0:
        return float(n)
    return 1.0 / (k / (N * c) + 1.0 / n)


def predict_gz_beta(k: int, params: ModelParams) -> float:
    """Jump rank where the model curve crosses probability k/N (raw real).

    Requires solved params carrying the token count N; callers wanting
    table entries round the result to the nearest integer rank.

    Raises:
        HapaxError: k/N above the curve's maximum (predicted rank < 1).
    """
    if k < 1:
        raise HapaxError(f"k must be >= 1, got {k}")
    if params.N < 1:
        raise HapaxError("predict_gz_beta needs params.N >= 1 (token count)")
    r = float(rank_of_phi(params, k / params.N))
    if r < 1.0:
        raise HapaxError(
            f"occurrence probability k/N = {k / params.N:.3e} lies above the "
            f"model curve's rank-1 value; no rank crosses it"
        )
    return r


def lotka_counts(k: int) -> float:
    """Unnormalized Lotka spectrum 1/(k(k-1)): the k-occurrence proportion.

    Predicts the proportionality of consecutive jump-rank differences
    r_{k-1} - r_k far into the rare-type region.
    """
    if k < 2:
        raise HapaxError(f"Lotka form needs k >= 2, got {k}")
    return 1.0 / (k * (k - 1.0))


# --------------------------------------------------------------------------
# Random-group-formation spectrum
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RgfParams:
    """Occurrence spectrum P(k) = A exp(-b k) k^(-gamma), k = 1..k_max."""

    A: float
    b: float
    gamma: float
    k_max: int

    def __post_init__(self):
        if self.b <= 0 or self.gamma <= 0 or self.A <= 0:
            raise HapaxError(
                f"spectrum parameters must be positive: A={self.A}, "
                f"b={self.b}, gamma={self.gamma}"
            )
        if abs(float(np.sum(self.pmf_table())) - 1.0) > 1e-9:
            raise HapaxError("spectrum does not normalize to 1 over 1..k_max")

    def pmf_table(self) -> np.ndarray:
        """P(k) for k = 1..k_max as an array."""
        k = np.arange(1, self.k_max + 1, dtype=np.float64)
        return self.A * np.exp(-self.b * k - self.gamma * np.log(k))

    def to_json_dict(self) -> dict:
        return {"A": self.A, "b": self.b, "gamma": self.gamma,
                "k_max": self.k_max}


def _rgf_sums(b: float, gamma: float, k: np.ndarray,
              log_k: np.ndarray) -> tuple[float, float, float]:
    """(S0, S1, w_max): spectrum normalizer, first moment, last weight."""
    w = np.exp(-b * k - gamma * log_k)
    return float(w.sum()), float(w @ k), float(w[-1])


def rgf_fit(N: int, n: int, f1: float) -> RgfParams:
    """Fit the spectrum's (A, b, gamma) from the three text aggregates.

    Constraints: P normalizes over k = 1..k_max with k_max = round(f1 N)
    (the top type's occurrence count); the mean occurrence count is N/n;
    and exactly one type attains the maximal count, n P(k_max) = 1.  A is
    eliminated by normalization; b solves the tail condition for each
    trial gamma (the tail weight is strictly decreasing in b), and gamma
    is then rooted on the mean condition over (0, 4].

    Raises:
        HapaxError: inputs outside the domain, or no root in the search
            box b in (0, 1], gamma in (0, 4] (message summarizes the
            residual landscape).
    """
    if N < 1 or n < 1:
        raise HapaxError(f"N and n must be >= 1, got N={N}, n={n}")
    if not (1.0 / N <= f1 <= 1.0):
        raise HapaxError(f"f1 must lie in [1/N, 1], got {f1}")
    k_max = int(round(f1 * N))
    if k_max < 2:
        raise HapaxError("degenerate spectrum: the top type occurs only once")
    mean_target = N / n

    k = np.arange(1, k_max + 1, dtype=np.float64)
    log_k = np.log(k)

    from scipy import optimize  # local import keeps module load light

    def solve_b(gamma: float) -> float | None:
        """b in (0, 1] with n P(k_max) = 1, or None when unreachable."""
        def tail(b: float) -> float:
            s0, _, w_max = _rgf_sums(b, gamma, k, log_k)
            return n * w_max / s0 - 1.0

        lo, hi = 1e-12, 1.0
        if tail(lo) <= 0:  # even b -> 0 puts less than one type at k_max
            return None
        if tail(hi) > 0:  # b = 1 still leaves the tail too heavy
            return None
        return float(optimize.brentq(tail, lo, hi, xtol=1e-15, rtol=1e-14))

    def mean_residual(gamma: float) -> float | None:
        b = solve_b(gamma)
        if b is None:
            return None
        s0, s1, _ = _rgf_sums(b, gamma, k, log_k)
        return s1 / s0 - mean_target

    grid = np.linspace(0.05, 4.0, 60)
    resids = [mean_residual(g) for g in grid]
    root_gamma = None
    for i in range(len(grid) - 1):
        ri, rj = resids[i], resids[i + 1]
        if ri is None or rj is None or ri * rj > 0:
            continue
        root_gamma = float(optimize.brentq(
            lambda g: mean_residual(g), grid[i], grid[i + 1],
            xtol=1e-13, rtol=1e-14,
        ))
        break
    if root_gamma is None:
        defined = [(g, r) for g, r in zip(grid, resids) if r is not None]
        if defined:
            g_best, r_best = min(defined, key=lambda t: abs(t[1]))
            detail = (f"closest mean residual {r_best:+.3e} at gamma="
                      f"{g_best:.3f} over {len(defined)} feasible grid points")
        else:
            detail = "tail condition unreachable everywhere on the grid"
        raise HapaxError(
            f"no spectrum fit in b in (0, 1], gamma in (0, 4]: {detail}"
        )

    b = solve_b(root_gamma)
    s0, s1, w_max = _rgf_sums(b, root_gamma, k, log_k)
    if abs(s1 / s0 - mean_target) > 1e-9 * mean_target or \
            abs(n * w_max / s0 - 1.0) > 1e-9:
        raise HapaxError(
            f"spectrum fit did not converge: mean residual "
            f"{s1 / s0 - mean_target:+.3e}, tail residual "
            f"{n * w_max / s0 - 1.0:+.3e}"
        )
    return RgfParams(A=1.0 / s0, b=b, gamma=root_gamma, k_max=k_max)


def predict_rgf(params: RgfParams, n: int, l: int) -> float:
    """Jump-rank prediction n * [1 - sum_{k<=l} P(k)] from the spectrum."""
    if not (1 <= l <= params.k_max):
        raise HapaxError(f"l must lie in [1, {params.k_max}], got {l}")
    pmf = params.pmf_table()
    return float(n * (1.0 - np.sum(pmf[:l])))


# --------------------------------------------------------------------------
# Waring-Herdan spectrum
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WaringParams:
    """Recurrence parameters a, x and the once-occurring fraction P(1)."""

    a: float
    x: float
    p1: float

    def to_json_dict(self) -> dict:
        return {"a": self.a, "x": self.x, "p1": self.p1}


def waring_fit(rf: RankFrequency) -> WaringParams:
    """Fit the recurrence from the fraction of once-occurring types.

    With P(1) = n_1/n, the parameters are
    a = [1/(1 - P(1)) - P(1) - 1]^(-1) and x = a/(1 - P(1)).

    Raises:
        HapaxError: no type occurs exactly once (P(1) = 0 makes the
            expression for a singular), or every type does (P(1) = 1 sits
            on the pole of 1/(1 - P(1))).
    """
    n1 = int(np.sum(rf.counts == 1))
    p1 = n1 / rf.n
    if n1 == 0:
        raise HapaxError(
            "degenerate spectrum: no once-occurring types (P(1) = 0)"
        )
    if n1 == rf.n:
        raise HapaxError(
            "singular spectrum: every type occurs exactly once (P(1) = 1)"
        )
    a = 1.0 / (1.0 / (1.0 - p1) - p1 - 1.0)
    x = a / (1.0 - p1)
    return WaringParams(a=a, x=x, p1=p1)


def _waring_pmf(params: WaringParams, depth: int) -> np.ndarray:
    """P(1..depth) by the recurrence P(k+1) = P(k) (a+k-1)/(x+k)."""
    pmf = np.empty(depth, dtype=np.float64)
    pmf[0] = params.p1
    for k in range(1, depth):
        pmf[k] = pmf[k - 1] * (params.a + k - 1.0) / (params.x + k)
        if pmf[k] <= 0:
            raise HapaxError(
                f"recurrence produced non-positive P({k + 1}) = {pmf[k]}"
            )
    return pmf


def predict_waring(params: WaringParams, rf: RankFrequency, k: int) -> float:
    """Jump-rank prediction n * [1 - sum_{j<=k} P(j)] from the recurrence.

    Exact at k = 1 by construction: n (1 - P(1)) = n - n_1 = r_1.
    """
    if k < 1:
        raise HapaxError(f"k must be >= 1, got {k}")
    pmf = _waring_pmf(params, k)
    return float(rf.n * (1.0 - np.sum(pmf)))


# --------------------------------------------------------------------------
# Side-by-side comparison
# --------------------------------------------------------------------------

_CSV_COLUMNS = ("gz", "gz_beta", "rgf", "wh")


@dataclass(frozen=True)
class HapaxTable:
    """Empiric jump ranks vs predictor columns with relative errors.

    ``predictions`` and ``errors`` map column names from
    {gz, gz_beta, rgf, wh} to arrays over k = 1..depth; ``winner[i]`` names
    the column with the smallest relative error at k = i+1.
    """

    ks: np.ndarray
    empiric: np.ndarray
    predictions: dict[str, np.ndarray]
    errors: dict[str, np.ndarray]
    winner: tuple[str, ...]

    def __post_init__(self):
        for name, pred in self.predictions.items():
            if np.any(pred <= 0) or np.any(np.diff(pred) > 1e-9):
                raise HapaxError(
                    f"predictor column {name!r} is not positive and "
                    f"non-increasing in k"
                )
        for name, err in self.errors.items():
            if np.any(err < 0):
                raise HapaxError(f"negative relative error in column {name!r}")

    def to_csv(self) -> str:
        """CSV with columns k, r_k, then <col>, <col>_err per predictor."""
        buf = io.StringIO()
        header = ["k", "r_k"]
        for name in _CSV_COLUMNS:
            header += [name, f"{name}_err"]
        buf.write(",".join(header) + "\n")
        for i, k in enumerate(self.ks):
            row = [str(int(k)), str(int(self.empiric[i]))]
            for name in _CSV_COLUMNS:
                if name in self.predictions:
                    row += [
                        format(self.predictions[name][i], ".17g"),
                        format(self.errors[name][i], ".17g"),
                    ]
                else:
                    row += ["", ""]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def compare_predictors(rf: RankFrequency, c: float | None = None,
                       model_params: ModelParams | None = None,
                       depth: int = DEPTH_DEFAULT) -> HapaxTable:
    """Assemble the empiric-vs-predicted jump-rank table for k = 1..depth.

    The gz column needs the fitted Zipf prefactor ``c``; the gz_beta column
    needs solved model parameters (their N falls back to the table's);
    the rgf and wh columns are fitted from the table itself and are
    skipped with a warning when their fits fail.

    Relative errors are |prediction - r_k| / r_k on raw real predictions.
    """
    jumps = jump_ranks(rf)
    empiric = np.array([jumps.r(k) for k in range(1, depth + 1)],
                       dtype=np.int64)
    usable = int(np.sum(empiric > 0))
    if usable < depth:
        warnings.warn(
            f"only {usable} of {depth} jump ranks are nonzero; "
            f"table truncated", stacklevel=2,
        )
        depth = usable
        empiric = empiric[:depth]
    if depth == 0:
        raise HapaxError("no nonzero jump ranks: table would be empty")
    ks = np.arange(1, depth + 1, dtype=np.int64)

    predictions: dict[str, np.ndarray] = {}
    if c is not None:
        predictions["gz"] = np.array(
            [predict_gz(int(k), rf.N, rf.n, c) for k in ks]
        )
    if model_params is not None:
        params = model_params
        if params.N < 1:
            params = dataclasses.replace(params, N=rf.N)
        predictions["gz_beta"] = np.array(
            [predict_gz_beta(int(k), params) for k in ks]
        )
    try:
        rgf = rgf_fit(rf.N, rf.n, float(rf.freqs[0]))
        predictions["rgf"] = np.array(
            [predict_rgf(rgf, rf.n, int(k)) for k in ks]
        )
    except HapaxError as exc:
        warnings.warn(f"rgf column skipped: {exc}", stacklevel=2)
    try:
        wh = waring_fit(rf)
        predictions["wh"] = np.array(
            [predict_waring(wh, rf, int(k)) for k in ks]
        )
    except HapaxError as exc:
        warnings.warn(f"wh column skipped: {exc}", stacklevel=2)

    errors = {
        name: np.abs(pred - empiric) / empiric
        for name, pred in predictions.items()
    }
    winner = tuple(
        min(errors, key=lambda name: errors[name][i]) for i in range(depth)
    ) if errors else ()
    return HapaxTable(ks=ks, empiric=empiric, predictions=predictions,
                      errors=errors, winner=winner)
