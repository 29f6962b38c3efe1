"""Command-line interface.

Subcommands:

* ``analyze``  -- tokenize input files and write a JSON report plus a CSV
                  of per-rank curve data for each;
* ``mix``      -- concatenate several corpora token-wise, then analyze the
                  mixture;
* ``model``    -- solve the latent-probability model for given parameters
                  and write its rank curve; optionally sample a synthetic
                  corpus from it and analyze that.

Exit codes: 0 on success, 1 on pipeline errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .corpus import (CorpusError, RB_THRESHOLD, mix, rank, read_text_utf8,
                     tokenize)
from .fitting import FitError, R2_MIN_DEFAULT, SS_MAX_DEFAULT
from .hapax import DEPTH_DEFAULT
from .model import ModelError, generate_corpus, model_curve, solve_mu
from .report import analyze, canonical_json, curve_csv

_FILTER_NAMES = {"han": "han-only", "alpha": "alphabetic-only",
                 "none": "none"}
_MODE_NAMES = {"char": "character", "word": "word"}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="char",
                   help="tokenization unit (default: char)")
    p.add_argument("--filter", choices=sorted(_FILTER_NAMES), default="han",
                   help="token filter (default: han)")
    p.add_argument("--ss-max", type=float, default=SS_MAX_DEFAULT,
                   help="residual-sum threshold for the Zipfian range")
    p.add_argument("--r2-min", type=float, default=R2_MIN_DEFAULT,
                   help="squared-correlation threshold for the Zipfian range")
    p.add_argument("--rb-threshold", type=int, default=RB_THRESHOLD,
                   help="types sharing one frequency that mark the hapax "
                        "boundary")
    p.add_argument("--hapax-k", type=int, default=DEPTH_DEFAULT,
                   help="depth of the rare-type comparison table")
    p.add_argument("--out-dir", type=Path, default=Path("."),
                   help="directory for report and curve files")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankfreq",
        description="Rank-frequency analysis: Zipfian ranges, exponent "
                    "estimates, KS goodness of fit, and rare-type predictors.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="analyze one or more text files")
    p_an.add_argument("paths", nargs="+", type=Path)
    _add_common(p_an)

    p_mix = sub.add_parser("mix", help="analyze the token-wise mixture of"
                                       " several text files")
    p_mix.add_argument("paths", nargs="+", type=Path)
    p_mix.add_argument("--label", default="mixture",
                       help="stem for the mixture's output files")
    _add_common(p_mix)

    p_mod = sub.add_parser("model", help="solve the latent model and write "
                                         "its rank curve")
    p_mod.add_argument("--c-beta", type=float, required=True,
                       help="prior prefactor (equals the Zipf prefactor at "
                            "beta=2)")
    p_mod.add_argument("--beta", type=float, default=2.0,
                       help="prior exponent in (1, 2] (default: 2)")
    p_mod.add_argument("--n", type=int, required=True,
                       help="distinct-type count")
    p_mod.add_argument("--N", type=int, default=0,
                       help="token count (context for occurrence statistics)")
    p_mod.add_argument("--out", type=Path, required=True,
                       help="destination CSV path")
    p_mod.add_argument("--sample", type=int, default=0, metavar="TOKENS",
                       help="also sample a synthetic corpus of this many "
                            "tokens and write its report next to --out")
    p_mod.add_argument("--seed", type=int, default=0,
                       help="RNG seed for --sample (default: 0)")
    return parser


def _analyze_one(tc, label: str, args, constituents=()) -> None:
    report = analyze(
        tc, path=label, ss_max=args.ss_max, r2_min=args.r2_min,
        rb_threshold=args.rb_threshold, hapax_depth=args.hapax_k,
        constituents=constituents,
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    report_path = args.out_dir / f"{Path(label).stem or 'corpus'}.report.json"
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")
    curve_path = args.out_dir / f"{Path(label).stem or 'corpus'}.curve.csv"
    curve_path.write_text(curve_csv(rank(tc), fit=report.lls),
                          encoding="utf-8")

    fit = report.lls
    if fit is not None:
        summary = (f"gamma={fit.gamma:.4g} c={fit.c:.4g} "
                   f"range=[{fit.r_min}, {fit.r_max}]")
    else:
        summary = f"no Zipfian range ({report.errors.get('zipf_range', '?')})"
    print(f"{label}: N={tc.N} n={tc.n} {summary} -> {report_path}")


def _read_corpus(path: Path, args):
    text = read_text_utf8(path)
    return tokenize(text, mode=_MODE_NAMES[args.mode],
                    token_filter=_FILTER_NAMES[args.filter])


def _cmd_analyze(args) -> int:
    status = 0
    for path in args.paths:
        try:
            tc = _read_corpus(path, args)
            _analyze_one(tc, str(path), args)
        except (CorpusError, FitError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = 1
    return status


def _cmd_mix(args) -> int:
    try:
        parts = [_read_corpus(p, args) for p in args.paths]
        mixed = parts[0]
        for part in parts[1:]:
            mixed = mix(mixed, part)
        _analyze_one(mixed, args.label, args,
                     constituents=tuple(p.N for p in parts))
    except (CorpusError, FitError, OSError) as exc:
        print(f"mix: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_model(args) -> int:
    try:
        params = solve_mu(args.c_beta, args.beta, args.n, N=args.N)
        curve = model_curve(params)
        phi = curve.phi_table()

        import numpy as np

        from .model import generalized_zipf

        ranks = np.arange(1, args.n + 1)
        gz = generalized_zipf(args.c_beta, args.n, ranks)
        lines = ["rank,phi,generalized_zipf"]
        lines += [
            f"{r},{format(p, '.17g')},{format(g, '.17g')}"
            for r, p, g in zip(ranks, phi, gz)
        ]
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"model: mu={params.mu:.6g} -> {args.out}")

        if args.sample > 0:
            tc = generate_corpus(params, args.sample, seed=args.seed)
            report = analyze(tc, path=f"sample(seed={args.seed})")
            sample_path = args.out.with_suffix(".sample.report.json")
            sample_path.write_text(report.to_json() + "\n", encoding="utf-8")
            print(f"sample: N={tc.N} n={tc.n} -> {sample_path}")
    except (ModelError, FitError, OSError) as exc:
        print(f"model: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _cmd_analyze(args)
    if args.command == "mix":
        return _cmd_mix(args)
    return _cmd_model(args)


if __name__ == "__main__":
    sys.exit(main())
