"""Full-pipeline analysis reports and their canonical serializations.

``analyze`` runs rank-frequency construction, Zipfian-range detection, the
three exponent estimators, the KS test, hapax-boundary location, the
exponential-regime fit, and the rare-type predictor comparison over one
token table, collecting per-stage failures as reason strings instead of
aborting.  Reports serialize to byte-stable JSON (sorted keys, floats at 17
significant digits) and per-rank curves to CSV for plotting.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import corpus as _corpus
from . import fitting as _fitting
from . import goodness as _goodness
from . import hapax as _hapax
from . import model as _model

__all__ = ["AnalysisReport", "analyze", "canonical_json", "curve_csv"]


# --------------------------------------------------------------------------
# Canonical JSON
# --------------------------------------------------------------------------

def _emit(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite float {x!r} in canonical JSON")
        out.append(format(x, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise ValueError(f"non-string key {key!r} in canonical JSON")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise ValueError(f"cannot canonicalize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Byte-stable JSON: sorted keys, floats at 17 significant digits."""
    out: list = []
    _emit(obj, out)
    return "".join(out)


# --------------------------------------------------------------------------
# Report assembly
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisReport:
    """Everything the pipeline derived from one corpus.

    Optional stages that failed are None here, with the reason recorded
    under ``errors[stage_name]``.
    """

    path: str
    mode: str
    filter: str
    N: int
    n: int
    lls: _fitting.PowerLawFit | None
    nls: _fitting.PowerLawFit | None
    mle: _fitting.PowerLawFit | None
    pre_zipf_mass: float | None
    zipf_mass: float | None
    deviation: float | None
    r_b: int | None
    exponential: _fitting.ExpFit | None
    ks: _goodness.KsResult | None
    hapax_table: _hapax.HapaxTable | None
    errors: dict[str, str] = field(default_factory=dict)
    constituents: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("pre_zipf_mass", "zipf_mass"):
            value = getattr(self, name)
            if value is not None and not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.pre_zipf_mass is not None and self.zipf_mass is not None \
                and self.pre_zipf_mass + self.zipf_mass > 1.0 + 1e-12:
            raise ValueError("pre-Zipfian and Zipfian masses exceed 1")

    def to_json_dict(self) -> dict:
        def opt(value, conv=lambda v: v):
            return None if value is None else conv(value)

        hapax_dict = None
        if self.hapax_table is not None:
            t = self.hapax_table
            hapax_dict = {
                "k": [int(k) for k in t.ks],
                "r_k": [int(r) for r in t.empiric],
                "predictions": {m: list(map(float, v))
                                for m, v in t.predictions.items()},
                "errors": {m: list(map(float, v))
                           for m, v in t.errors.items()},
                "winner": list(t.winner),
            }
        return {
            "path": self.path,
            "mode": self.mode,
            "filter": self.filter,
            "N": self.N,
            "n": self.n,
            "zipf": {
                "lls": opt(self.lls, lambda f: f.to_json_dict()),
                "nls": opt(self.nls, lambda f: f.to_json_dict()),
                "mle": opt(self.mle, lambda f: f.to_json_dict()),
            },
            "masses": {
                "pre_zipfian": opt(self.pre_zipf_mass),
                "zipfian": opt(self.zipf_mass),
            },
            "deviation": opt(self.deviation),
            "r_b": opt(self.r_b),
            "exponential": opt(self.exponential, lambda f: f.to_json_dict()),
            "ks": opt(self.ks, lambda k: k.to_json_dict()),
            "hapax": hapax_dict,
            "errors": dict(self.errors),
            "constituents": list(self.constituents),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())


def analyze(tc: _corpus.TokenCounts, path: str = "",
            ss_max: float = _fitting.SS_MAX_DEFAULT,
            r2_min: float = _fitting.R2_MIN_DEFAULT,
            rb_threshold: int = _corpus.RB_THRESHOLD,
            hapax_depth: int = _hapax.DEPTH_DEFAULT,
            constituents: tuple[int, ...] = ()) -> AnalysisReport:
    """Run the full pipeline on one token table.

    Stage failures (no Zipfian range, degenerate spectra, ...) do not
    abort: the affected report fields stay None and ``errors`` maps the
    stage name to the reason.
    """
    rf = _corpus.rank(tc)
    mode, _, token_filter = tc.mode.partition(":")
    errors: dict[str, str] = {}

    lls = nls = mle = None
    pre_mass = zipf_mass = deviation = None
    try:
        lls = _fitting.detect_zipf_range(rf, ss_max=ss_max, r2_min=r2_min)
        pre_mass = (0.0 if lls.r_min == 1
                    else _corpus.range_mass(rf, 1, lls.r_min - 1))
        zipf_mass = _corpus.range_mass(rf, lls.r_min, lls.r_max)
        deviation = _fitting.zipf_deviation(rf, lls)
    except _fitting.FitError as exc:
        errors["zipf_range"] = str(exc)
    if lls is not None:
        try:
            nls = _fitting.nls_fit(rf, lls.r_min, lls.r_max)
        except _fitting.FitError as exc:
            errors["nls"] = str(exc)
        try:
            mle = _fitting.mle_exponent(rf, lls.r_min, lls.r_max)
        except _fitting.FitError as exc:
            errors["mle"] = str(exc)

    ks = None
    if lls is not None:
        try:
            ks = _goodness.ks_test_zipf(rf, lls)
        except ValueError as exc:
            errors["ks"] = str(exc)

    r_b = _corpus.hapax_boundary(rf, threshold=rb_threshold)
    if r_b is None:
        errors["r_b"] = (
            f"no rank's frequency is shared by more than {rb_threshold} types"
        )

    exponential = None
    if r_b is not None and lls is not None and r_b - lls.r_max >= 10:
        try:
            exponential = _fitting.fit_exponential(rf, lls.r_max, r_b)
        except _fitting.FitError as exc:
            errors["exponential"] = str(exc)
    elif r_b is not None and lls is not None:
        errors["exponential"] = (
            f"gap between r_max={lls.r_max} and r_b={r_b} is shorter than 10 "
            f"ranks: exponential-like range not distinguishable"
        )

    hapax_table = None
    try:
        hapax_table = _hapax.compare_predictors(
            rf, c=None if lls is None else lls.c, depth=hapax_depth,
        )
    except (_hapax.HapaxError, _corpus.CorpusError) as exc:
        errors["hapax"] = str(exc)

    return AnalysisReport(
        path=path, mode=mode, filter=token_filter, N=tc.N, n=tc.n,
        lls=lls, nls=nls, mle=mle,
        pre_zipf_mass=pre_mass, zipf_mass=zipf_mass, deviation=deviation,
        r_b=r_b, exponential=exponential, ks=ks, hapax_table=hapax_table,
        errors=errors, constituents=constituents,
    )


# --------------------------------------------------------------------------
# Curve CSV
# --------------------------------------------------------------------------

def curve_csv(rf: _corpus.RankFrequency,
              fit: _fitting.PowerLawFit | None = None,
              params: _model.ModelParams | None = None) -> str:
    """Per-rank plotting data.

    Columns: rank, frequency, count, zipf_model (c r^-gamma from the fit),
    gz_model (the generalized Zipf closed form with the fit's prefactor),
    model_curve_phi (the latent-model curve, when solved params are given).
    Unavailable columns are left empty.
    """
    ranks = np.arange(1, rf.n + 1)
    zipf_col = gz_col = phi_col = None
    if fit is not None:
        zipf_col = fit.predict(ranks)
        gz_col = _model.generalized_zipf(fit.c, rf.n, ranks)
    if params is not None:
        phi_col = _model.ModelCurve(params).phi_table()

    buf = io.StringIO()
    buf.write("rank,frequency,count,zipf_model,gz_model,model_curve_phi\n")
    for i in range(rf.n):
        row = [
            str(i + 1),
            format(float(rf.freqs[i]), ".17g"),
            str(int(rf.counts[i])),
            "" if zipf_col is None else format(float(zipf_col[i]), ".17g"),
            "" if gz_col is None else format(float(gz_col[i]), ".17g"),
            "" if phi_col is None else format(float(phi_col[i]), ".17g"),
        ]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
