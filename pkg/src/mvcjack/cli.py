"""Command-line front end: fit, simulate, bench, ellipse.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import (
    ConfigError,
    DegenerateSlope,
    DomainError,
    EntryOutOfRange,
    LeverageAtOne,
    MvcError,
    NegativeVariance,
    ParseError,
    RowSumViolation,
    SingularACM,
    SingularGram,
    StatisticEvaluationError,
    UnsupportedDimension,
)
from .eiv_regression import PairedSample, fit_mixture_eiv
from .inference import ellipsoid, interval
from .jackknife import JackknifeACM, SmoothStatistic, jackknife_acm_all, jackknife_acm_naive, leverages
from .mvc_core import gram, validate_concentrations
from .sim_harness import ExperimentConfig, preset, run_experiment

_DATA_ERRORS = (ParseError, ConfigError, RowSumViolation, EntryOutOfRange, OSError)
_NUMERICAL_ERRORS = (
    SingularGram,
    LeverageAtOne,
    DegenerateSlope,
    SingularACM,
    StatisticEvaluationError,
    DomainError,
    NegativeVariance,
    UnsupportedDimension,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_paired_csv(path: str) -> PairedSample:
    """Parse the input format: header ``x,y,p1,...,pM``, one observation per line."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        expected = ["x", "y"] + [f"p{m}" for m in range(1, len(header) - 1)]
        if len(header) < 3 or [h.strip() for h in header] != expected:
            raise ParseError(f"{path}: header must be x,y,p1,...,pM, got {','.join(header)!r}")
        n_cols = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != n_cols:
                raise ParseError(f"{path}: line {lineno}: expected {n_cols} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no observations")
    data = np.array(rows)
    try:
        conc = validate_concentrations(data[:, 2:])
    except RowSumViolation as exc:
        raise ParseError(f"{path}: line {exc.row + 2}: concentration row sums to {exc.total!r}") from exc
    except EntryOutOfRange as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return PairedSample(x_obs=data[:, 0], y_obs=data[:, 1], concentrations=conc)


def _fit_report(sample: PairedSample, alpha: float) -> dict:
    fits = fit_mixture_eiv(sample)
    p = sample.concentrations
    h_max = float(np.max(leverages(p, gram(p)).h))
    warnings = []
    if h_max > 0.5:
        warnings.append(f"high maximum leverage {h_max!r}")
    components = []
    for fit in fits:
        est = [fit.coefficients.b0, fit.coefficients.b1]
        v = fit.acm.v
        se = [float(np.sqrt(v[i, i] / sample.n)) for i in range(2)]
        ivs = [interval(est[i], float(v[i, i]), sample.n, alpha) for i in range(2)]
        entry = {
            "component": fit.coefficients.component + 1,
            "b0": est[0],
            "b1": est[1],
            "acm": v.tolist(),
            "stderr": se,
            "intervals": {
                "b0": [ivs[0].low, ivs[0].upp],
                "b1": [ivs[1].low, ivs[1].upp],
            },
        }
        try:
            ell = ellipsoid(np.array(est), fit.acm, sample.n, alpha)
            w, q = np.linalg.eigh(ell.shape_inv)
            entry["ellipsoid"] = {
                "center": est,
                "radius2": ell.radius2,
                "axes": q.T.tolist(),
                "half_lengths": np.sqrt(ell.radius2 / w).tolist(),
            }
        except SingularACM as exc:
            entry["ellipsoid"] = None
            warnings.append(f"component {fit.coefficients.component + 1}: {exc}")
        components.append(entry)
    return {
        "n": sample.n,
        "M": p.n_components,
        "alpha": alpha,
        "max_leverage": h_max,
        "components": components,
        "warnings": warnings,
    }


def cmd_fit(args) -> int:
    sample = _read_paired_csv(args.input)
    report = _fit_report(sample, args.alpha)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")
    return 0


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _config_to_experiments(raw: dict, base: ExperimentConfig | None) -> list[ExperimentConfig]:
    known = {
        "n", "B", "alpha", "seed",
        "b0_1", "b1_1", "b0_2", "b1_2",
        "x_mean_1", "x_var_1", "x_mean_2", "x_var_2",
        "error_kind", "error_var", "error_df",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if base is None:
        base = preset("exp1", n=1000)
    coeff = (
        (raw.get("b0_1", base.coefficients[0][0]), raw.get("b1_1", base.coefficients[0][1])),
        (raw.get("b0_2", base.coefficients[1][0]), raw.get("b1_2", base.coefficients[1][1])),
    )
    xdist = (
        (raw.get("x_mean_1", base.regressor_dists[0][0]), raw.get("x_var_1", base.regressor_dists[0][1])),
        (raw.get("x_mean_2", base.regressor_dists[1][0]), raw.get("x_var_2", base.regressor_dists[1][1])),
    )
    n_values = raw.get("n", base.n)
    if not isinstance(n_values, list):
        n_values = [n_values]
    if not n_values:
        raise ConfigError("config key n must name at least one sample size")
    cfgs = []
    for n in n_values:
        cfgs.append(
            ExperimentConfig(
                n=int(n),
                replications=int(raw.get("B", base.replications)),
                coefficients=coeff,
                regressor_dists=xdist,
                error_kind=raw.get("error_kind", base.error_kind),
                error_var=float(raw.get("error_var", base.error_var)),
                error_df=float(raw["error_df"]) if "error_df" in raw else base.error_df,
                alpha=float(raw.get("alpha", base.alpha)),
                seed=int(raw.get("seed", base.seed)),
            )
        )
    return cfgs


def cmd_simulate(args) -> int:
    if args.preset is None and args.config is None:
        raise _UsageError("simulate needs --preset and/or --config")
    base = preset(args.preset, n=1000) if args.preset else None
    raw = _load_config(args.config) if args.config else {}
    cfgs = _config_to_experiments(raw, base)
    lines = ["n,b0_1,b1_1,joint_1,b0_2,b1_2,joint_2"]
    for cfg in cfgs:
        rep = run_experiment(cfg)
        c1, c2 = rep.components
        lines.append(f"{rep.n},{c1.b0!r},{c1.b1!r},{c1.joint!r},{c2.b0!r},{c2.b1!r},{c2.joint!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _bench_inputs(n: int, rng: np.random.Generator):
    from .sim_harness import design_concentrations
    from .mvc_core import ObservationMatrix

    xi = ObservationMatrix(rng.standard_normal((n, 5)))
    p = design_concentrations(n)
    stat = SmoothStatistic(dim_in=5, dim_out=5, eval=lambda mu: mu * mu, vectorized=True)
    return xi, p, stat


def cmd_bench(args) -> int:
    sizes = sorted(int(s) for s in args.sizes.split(",") if s.strip()) if args.sizes.strip() else []
    rng = np.random.default_rng(0)
    sys.stdout.write("n,fast_seconds,naive_seconds,max_rel_diff\n")
    worst = None
    for n in sizes:
        xi, p, stat = _bench_inputs(n, rng)
        t0 = time.perf_counter()
        fast = jackknife_acm_all(xi, p, stat)
        t_fast = time.perf_counter() - t0
        naive_s, rel = "", ""
        if args.with_naive_max is not None and n <= args.with_naive_max:
            t0 = time.perf_counter()
            naive = [jackknife_acm_naive(xi, p, stat, k) for k in range(p.n_components)]
            t_naive = time.perf_counter() - t0
            diff = max(
                float(np.linalg.norm(f.v - nv.v) / (1.0 + np.linalg.norm(nv.v)))
                for f, nv in zip(fast, naive)
            )
            naive_s, rel = repr(t_naive), repr(diff)
            worst = diff
        sys.stdout.write(f"{n},{t_fast!r},{naive_s},{rel}\n")
    if worst is not None and worst >= 1e-8:
        raise SingularACM(f"fast/naive disagreement {worst!r} at the largest overlapping size")
    return 0


def cmd_ellipse(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    components = report.get("components", [])
    valid = [c["component"] for c in components]
    match = [c for c in components if c["component"] == args.component]
    if not match:
        raise ParseError(f"component {args.component} not in report; valid components: {valid}")
    entry = match[0]
    acm = JackknifeACM(v=np.array(entry["acm"]), component=args.component - 1, n=int(report["n"]))
    ell = ellipsoid(np.array([entry["b0"], entry["b1"]]), acm, int(report["n"]), args.alpha)
    pts = ell.boundary()
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("b0,b1\n")
        for b0, b1 in pts:
            fh.write(f"{float(b0)!r},{float(b1)!r}\n")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="mvcjack", description="Weighted-moment mixture estimation with jackknife confidence sets.")
    parser.add_argument("--version", action="version", version=f"mvcjack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit mixture errors-in-variables regressions from a CSV file")
    fit.add_argument("--input", required=True, help="CSV with header x,y,p1,...,pM")
    fit.add_argument("--alpha", type=float, default=0.05)
    fit.add_argument("--out", required=True, help="JSON report path")
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="run a coverage experiment")
    sim.add_argument("--config", help="TOML-style flat config file")
    sim.add_argument("--preset", choices=["exp1", "exp2", "exp3"])
    sim.add_argument("--out", help="coverage CSV path (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("bench", help="time the fast jackknife path")
    bench.add_argument("--sizes", required=True, help="comma-separated sample sizes")
    bench.add_argument("--with-naive-max", type=int, default=None, help="also run the naive path up to this n")
    bench.set_defaults(func=cmd_bench)

    ell = sub.add_parser("ellipse", help="export a confidence-ellipse boundary from a fit report")
    ell.add_argument("--report", required=True, help="JSON report from the fit command")
    ell.add_argument("--component", type=int, required=True, help="1-based component index")
    ell.add_argument("--alpha", type=float, default=0.05)
    ell.add_argument("--out", required=True, help="boundary CSV path")
    ell.set_defaults(func=cmd_ellipse)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except MvcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
