"""Benchmark suites over the reference integrands and power-law cost fits.

Each suite is a fixed grid of (method, integrand, d, n, a) rows mirroring
the accuracy and cost-scaling experiment layouts. Rows whose direct work
would exceed the desk-scale caps are emitted with status "skipped(cap)"
instead of running for hours; everything else lands in one CSV row per
run. Timing takes the median of 3 repetitions for sub-second rows and a
single run otherwise, so the regression inputs for the power-law fits are
reasonably stable.
"""

from __future__ import annotations

import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus
from .lattice import korobov_vector
from .mdi import DIRECT_CAP, GridCapError
from .quad import implr_integrate, mc_integrate, mdilr_integrate, slr_integrate

__all__ = [
    "RunRecord",
    "FitResult",
    "DegenerateDataError",
    "SUITES",
    "MODELS",
    "MDI_DIM_CAP",
    "CSV_COLUMNS",
    "suite_specs",
    "run_suite",
    "read_rows",
    "fit_power_law",
    "fit_all",
]

# MDI rows past this dimension only run with unbounded=True
MDI_DIM_CAP = 100

SUITES = ("test1", "test2", "test3", "test4", "test5", "test6", "test7")
MODELS = ("N^p", "N*d^q", "N^2*d^q")

CSV_COLUMNS = (
    "method", "integrand", "d", "n", "a",
    "value", "reference", "rel_error", "seconds", "seed", "status",
)

_T1_NS = (101, 501, 1001, 5001, 10001, 40001)
_T2_NS = (101, 1001, 10001, 100001, 1000001, 10000001)
_SWEEP_AS = (4, 6, 8, 10, 12, 14, 16)
_T7_DS = (4, 6, 8, 10, 12, 14, 16)


class DegenerateDataError(ValueError):
    """Fit data carries no usable variation (constant inputs or outputs)."""


@dataclass
class RunRecord:
    """One benchmark row; value fields stay None when the row is skipped."""

    method: str
    integrand: str
    d: int
    n: int
    a: int
    value: float = None
    reference: float = None
    rel_error: float = None
    seconds: float = None
    seed: int = None
    status: str = "ok"


@dataclass
class FitResult:
    """One fitted power law t ~ coeff * <model>(N, d)."""

    model: str
    coeff: float
    exponent: float
    r_squared: float
    count: int

    def formatted(self):
        body = {
            "N^p": f"{self.coeff:.4g}*N^{self.exponent:.4g}",
            "N*d^q": f"{self.coeff:.4g}*N*d^{self.exponent:.4g}",
            "N^2*d^q": f"{self.coeff:.4g}*N^2*d^{self.exponent:.4g}",
        }[self.model]
        return f"t = {body}  (R2={self.r_squared:.4f}, {self.count} rows)"


def _round_root(n, d):
    """Points per axis: n^(1/d) rounded to the nearest integer."""
    return int(round(n ** (1.0 / d)))


def suite_specs(suite, unbounded=False):
    """Expand a suite id into its (method, integrand, d, n, a) rows."""
    specs = []
    if suite == "test1":
        for fid in ("expxy", "sinsq"):
            for n in _T1_NS:
                a = _round_root(n, 2)
                for method in ("mc", "slr", "implr"):
                    specs.append((method, fid, 2, n, a))
    elif suite == "test2":
        for fid in ("expsum", "sinsq"):
            for n in _T2_NS:
                a = _round_root(n, 3)
                for method in ("slr", "implr", "mdilr"):
                    specs.append((method, fid, 3, n, a))
    elif suite == "test3":
        for d in (2, 4, 6, 8, 10, 11, 12):
            for method in ("slr", "implr", "mdilr"):
                specs.append((method, "gaussian", d, 1 + 10 ** d, 10))
    elif suite == "test4":
        ds = (10, 100, 300, 500, 700, 900, 1000) if unbounded else (10, 20, 40, 70, 100)
        for fid, a in (("expalt", 8), ("ratprod", 20)):
            for d in ds:
                specs.append(("mdilr", fid, d, a ** d, a))
    elif suite == "test5":
        for fid in ("gaussian", "coslin", "ratprod"):
            for d in (5, 10):
                for a in _SWEEP_AS:
                    specs.append(("mdilr", fid, d, 1 + 10 ** d, a))
    elif suite == "test6":
        for fid in ("gaussian", "coslin", "ratprod"):
            for d in (5, 10):
                for a in _SWEEP_AS:
                    specs.append(("mdilr", fid, d, 1 + a ** d, a))
    elif suite == "test7":
        for fid in ("expalt", "ratprod", "gaussian", "coslin", "expsq", "invpow"):
            for d in _T7_DS:
                specs.append(("mdilr", fid, d, 1 + 8 ** d, 8))
    else:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    return specs


def _median3(run, first):
    """Median-of-3 wall time for sub-second rows; value stays from run 1."""
    if first.seconds >= 1.0:
        return first
    secs = sorted([first.seconds, run().seconds, run().seconds])
    first.seconds = secs[1]
    return first


def _skip(method, fid, d, n, a, reference):
    return RunRecord(method=method, integrand=fid, d=d, n=n, a=a,
                     reference=reference, status="skipped(cap)")


def _run_row(spec, seed, unbounded):
    method, fid, d, n, a = spec
    expr = corpus.corpus_expr(fid, d)
    ref = corpus.reference_value(fid, d)
    cap = math.inf if unbounded else DIRECT_CAP

    if method == "mc":
        if n > cap:
            return _skip(method, fid, d, n, a, ref)
        res = _median3(lambda: mc_integrate(expr, d, n, seed=seed, reference=ref),
                       mc_integrate(expr, d, n, seed=seed, reference=ref))
    elif method == "slr":
        if n > cap:
            return _skip(method, fid, d, n, a, ref)
        rule = korobov_vector(a, n, d)
        res = _median3(lambda: slr_integrate(expr, rule, reference=ref),
                       slr_integrate(expr, rule, reference=ref))
    elif method == "implr":
        try:
            res = implr_integrate(expr, d, a, n, cap=cap, reference=ref)
        except GridCapError:
            return _skip(method, fid, d, n, a, ref)
        res = _median3(lambda: implr_integrate(expr, d, a, n, cap=cap, reference=ref), res)
    elif method == "mdilr":
        if d > MDI_DIM_CAP and not unbounded:
            return _skip(method, fid, d, n, a, ref)
        try:
            res = mdilr_integrate(expr, d, a, n, reference=ref)
        except GridCapError:
            return _skip(method, fid, d, n, a, ref)
        res = _median3(lambda: mdilr_integrate(expr, d, a, n, reference=ref), res)
    else:
        raise ValueError(f"unknown method {method!r}")

    return RunRecord(method=method, integrand=fid, d=d, n=n, a=a,
                     value=res.value, reference=ref, rel_error=res.rel_error,
                     seconds=res.seconds, seed=seed if method == "mc" else None)


def _row_task(args):
    return _run_row(*args)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(records, path):
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return path


def run_suite(suite, out_path, seed=0, unbounded=False, figures=True, verbose=False):
    """Run one suite, write its CSV (plus figures), return the records.

    Honors the LATQUAD_WORKERS environment variable: values above 1 fan
    rows out across that many worker processes; timing isolation is then
    per process.
    """
    specs = suite_specs(suite, unbounded=unbounded)
    workers = int(os.environ.get("LATQUAD_WORKERS", "1") or "1")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_row_task, [(s, seed, unbounded) for s in specs]))
    else:
        records = []
        for spec in specs:
            rec = _run_row(spec, seed, unbounded)
            if verbose:
                tail = rec.status if rec.rel_error is None else f"rel={rec.rel_error:.3e} t={rec.seconds:.3f}s"
                print(f"  {rec.method:6s} {rec.integrand:9s} d={rec.d:<5d} a={rec.a:<4d} {tail}",
                      file=sys.stderr)
            records.append(rec)
    out = _write_csv(records, out_path)
    if figures:
        from . import plots
        plots.render_suite_figures(records, out, suite=suite)
    return records


def read_rows(path):
    """Read a suite CSV back into a list of typed dicts."""
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            row = dict(raw)
            for key in ("d", "n", "a", "seed"):
                row[key] = int(raw[key]) if raw.get(key) else None
            for key in ("value", "reference", "rel_error", "seconds"):
                row[key] = float(raw[key]) if raw.get(key) else None
            rows.append(row)
    return rows


def _fit_arrays(rows):
    """Pull (N, d, t) arrays out of CSV rows, records, or plain mappings."""
    if isinstance(rows, (str, Path)):
        rows = read_rows(rows)
    ns, ds, ts = [], [], []
    for row in rows:
        get = row.get if isinstance(row, dict) else lambda k, r=row: getattr(r, k, None)
        if get("status") not in (None, "", "ok"):
            continue
        t = get("seconds")
        if t is None:
            continue
        ns.append(get("a"))
        ds.append(get("d"))
        ts.append(t)
    if any(v is None for v in ns) or any(v is None for v in ds):
        raise ValueError("fit rows need both a (points per axis) and d columns")
    return np.asarray(ns, float), np.asarray(ds, float), np.asarray(ts, float)


def fit_power_law(rows, model):
    """Least-squares power-law fit of wall seconds against N and d.

    Models: "N^p" fits t = c*N^p; "N*d^q" fits t = c*N*d^q; "N^2*d^q"
    fits t = c*N^2*d^q. The exponent and coefficient come from a linear
    fit in log space; R^2 is computed in the original space.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    N, d, t = _fit_arrays(rows)
    if len(t) < 4:
        raise ValueError(f"need at least 4 usable rows, got {len(t)}")
    if np.any(t <= 0):
        raise ValueError("fit requires positive wall seconds in every row")

    if model == "N^p":
        x, y = np.log(N), np.log(t)
    elif model == "N*d^q":
        x, y = np.log(d), np.log(t) - np.log(N)
    else:
        x, y = np.log(d), np.log(t) - 2.0 * np.log(N)
    if np.ptp(x) == 0.0:
        raise DegenerateDataError(f"model {model} needs variation in its sweep variable")

    slope, intercept = np.polyfit(x, y, 1)
    coeff = math.exp(intercept)
    if model == "N^p":
        pred = coeff * N ** slope
    elif model == "N*d^q":
        pred = coeff * N * d ** slope
    else:
        pred = coeff * N ** 2 * d ** slope

    denom = float(np.sum((t - t.mean()) ** 2))
    if denom == 0.0:
        raise DegenerateDataError("constant timings: R^2 undefined")
    r2 = 1.0 - float(np.sum((t - pred) ** 2)) / denom
    return FitResult(model=model, coeff=coeff, exponent=float(slope),
                     r_squared=r2, count=len(t))


def fit_all(rows):
    """Fit every model family; returns results best-R^2 first."""
    results = []
    for model in MODELS:
        try:
            results.append(fit_power_law(rows, model))
        except DegenerateDataError:
            continue
    if not results:
        raise DegenerateDataError("no model family admits a fit on this data")
    results.sort(key=lambda r: r.r_squared, reverse=True)
    return results
