"""Baseline quadrature methods and the uniform result record.

Four methods share one result type: plain Monte Carlo (seeded), the standard
rank-one lattice rule (equal-weight average over the n lattice points), the
improved rule evaluated directly (equal-weight average over the completed
open tensor grid), and the dimension-iterated evaluation of the same grid.
The direct and iterated paths sum the identical node multiset, so they agree
to roundoff; the iterated path is the one that scales past the node cap.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import corpus, exprcore
from .lattice import LatticeRule, iter_point_blocks, korobov_vector
from .mdi import DIRECT_CAP, GridCapError, MdiConfig, direct_tensor_sum, mdi_lr
from .transform import midpoint_grids

__all__ = [
    "QuadratureResult",
    "mc_integrate",
    "slr_integrate",
    "implr_integrate",
    "mdilr_integrate",
    "reference_value",
]

reference_value = corpus.reference_value

# uniform-sample / lattice-sweep block size (rows)
_ROWS = 1 << 19


@dataclass
class QuadratureResult:
    """One quadrature evaluation with its provenance."""

    method: str
    value: float
    points: int
    d: int
    n: int
    a: int = None
    seed: int = None
    seconds: float = 0.0
    reference: float = None
    rel_error: float = None

    def __post_init__(self):
        if self.points <= 0:
            raise ValueError(f"point count must be positive, got {self.points}")
        if self.rel_error is not None and self.rel_error < 0:
            raise ValueError(f"relative error must be >= 0, got {self.rel_error}")


def _result(method, value, points, d, n, a, seed, t0, reference):
    rel = None
    if reference is not None:
        rel = abs(value - reference) / abs(reference)
    return QuadratureResult(
        method=method,
        value=float(value),
        points=points,
        d=d,
        n=n,
        a=a,
        seed=seed,
        seconds=time.perf_counter() - t0,
        reference=reference,
        rel_error=rel,
    )


def mc_integrate(f, d, n, seed=0, reference=None):
    """Mean of f over n uniform pseudo-random points; deterministic per seed."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    acc = 0.0
    done = 0
    while done < n:
        rows = min(_ROWS, n - done)
        pts = rng.random((rows, d))
        vals = exprcore.eval_array(f, {i + 1: pts[:, i] for i in range(d)})
        acc += float(vals) * rows if np.ndim(vals) == 0 else float(np.sum(vals))
        done += rows
    return _result("mc", acc / n, n, d, n, None, seed, t0, reference)


def slr_integrate(f, rule, reference=None):
    """Equal-weight average of f over the rule's n lattice points."""
    t0 = time.perf_counter()
    acc = 0.0
    for pts in iter_point_blocks(rule, _ROWS * rule.d):
        vals = exprcore.eval_array(f, {i + 1: pts[:, i] for i in range(rule.d)})
        acc += float(vals) * len(pts) if np.ndim(vals) == 0 else float(np.sum(vals))
    a = rule.z[1] if rule.d > 1 else None
    return _result("slr", acc / rule.n, rule.n, rule.d, rule.n, a, None, t0, reference)


def implr_integrate(f, d, a, n, cap=DIRECT_CAP, rule=None, reference=None):
    """Improved rule, direct evaluation: equal-weight average over the
    completed open tensor grid (n + n* nodes). Raises GridCapError past the
    node cap; use the dimension-iterated path there instead."""
    t0 = time.perf_counter()
    if rule is None:
        rule = korobov_vector(a, n, d)
    grids = midpoint_grids(rule)
    total = grids.total
    if total > cap:
        raise GridCapError(f"improved rule needs {total} direct evaluations, cap is {cap}")
    value = direct_tensor_sum(f, grids, cap) / total
    return _result("implr", value, total, d, n, a, None, t0, reference)


def mdilr_integrate(f, d, a, n, cfg=None, reference=None):
    """Improved rule via multilevel dimension iteration; same target value
    as implr_integrate, feasible for grids far past the direct cap."""
    t0 = time.perf_counter()
    value, report = mdi_lr(f, d, a, n, cfg=cfg, with_report=True)
    rule = korobov_vector(a, n, d)
    total = midpoint_grids(rule).total
    out = _result("mdilr", value, total, d, n, a, None, t0, reference)
    out.report = report
    return out
