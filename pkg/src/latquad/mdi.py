"""Multilevel dimension iteration for tensor-grid sums of symbolic integrands.

mdi_sum computes S = sum over the full grid of g(node) by repeatedly applying
partial_sum to strip m coordinates per level; like-term collection keeps the
intermediate expressions small whenever the integrand has (near-)separable
structure, turning an O(prod n_i) sweep into O(sum n_i) symbolic work. When
the expression grows past the node budget instead, the engine falls back to
the direct numeric sweep of the original integrand and records that.

mdi_lr composes this with a Korobov rule: the improved rule evaluates the
open (midpoint) tensor grid whose per-axis counts come from the lattice's
axis-count arithmetic, weighting every node equally.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import exprcore
from .exprcore import BudgetExceededError
from .lattice import korobov_vector
from .transform import midpoint_grids

__all__ = [
    "MdiConfig",
    "MdiReport",
    "GridCapError",
    "mdi_sum",
    "mdi_lr",
    "direct_tensor_sum",
    "DIRECT_CAP",
]

DIRECT_CAP = 10**8

# rows per numeric-evaluation block
_CHUNK = 1 << 19


class GridCapError(RuntimeError):
    """The requested direct sweep exceeds the configured node cap."""


@dataclass(frozen=True)
class MdiConfig:
    """Engine knobs.

    m: coordinates stripped per iteration (1..3; 1 is the efficient default).
    budget: symbolic node limit before the numeric fallback engages.
    order: "forward" binds the highest-index coordinate first (the last axis
      carries the largest node count, so collapsing it first keeps peak
      expression size down); "reverse" binds lowest-index first.
    fallback: "numeric" sweeps the original integrand directly on budget
      exhaustion; "error" re-raises.
    direct_cap: node-count ceiling for any direct numeric sweep.
    """

    m: int = 1
    budget: int = exprcore.DEFAULT_NODE_BUDGET
    order: str = "forward"
    fallback: str = "numeric"
    direct_cap: int = DIRECT_CAP

    def __post_init__(self):
        if not 1 <= self.m <= 3:
            raise ValueError(f"m must be 1, 2, or 3, got {self.m}")
        if self.budget < 1:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.order not in ("forward", "reverse"):
            raise ValueError(f"order must be 'forward' or 'reverse', got {self.order!r}")
        if self.fallback not in ("numeric", "error"):
            raise ValueError(f"fallback must be 'numeric' or 'error', got {self.fallback!r}")


@dataclass
class MdiReport:
    """Observability record for one multi-sum evaluation.

    value is the raw (unnormalized) grid sum. levels counts the
    dimension-reduction iterations executed; level_nodes holds the symbolic
    DAG size after each one. base_dim axes were finished by direct numeric
    summation. fallback marks that the node budget forced a full numeric
    sweep of the original integrand instead.
    """

    value: float
    levels: int
    base_dim: int
    level_nodes: tuple = ()
    level_seconds: tuple = ()
    base_seconds: float = 0.0
    fallback: bool = False
    det_a: float = None

    @property
    def seconds(self):
        return float(sum(self.level_seconds)) + self.base_seconds


def _numeric_sum(g, axes, cap):
    """Direct sum of g over the cross product of (index, nodes) axes, chunked.

    Flat index s decodes with the first listed axis fastest, matching the
    k = s_1 + s_2 n_1 + s_3 n_1 n_2 + ... grid ordering.
    """
    counts = [len(nodes) for _, nodes in axes]
    total = math.prod(counts) if counts else 1
    if total > cap:
        raise GridCapError(f"direct sweep needs {total} evaluations, cap is {cap}")
    if not axes:
        return exprcore.eval(g, {})
    arrays = [np.asarray(nodes, dtype=float) for _, nodes in axes]
    acc = 0.0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        assignment = {}
        rem = idx
        for (index, _), ct, arr in zip(axes, counts, arrays):
            assignment[index] = arr[rem % ct]
            rem = rem // ct
        vals = exprcore.eval_array(g, assignment)
        if np.ndim(vals) == 0:
            acc += float(vals) * len(idx)
        else:
            acc += float(np.sum(vals))
    return acc


def direct_tensor_sum(g, grids, cap=DIRECT_CAP):
    """Brute-force grid sum; the oracle mdi_sum must reproduce."""
    axes = [(i + 1, nodes) for i, nodes in enumerate(grids.nodes)]
    return _numeric_sum(g, axes, cap)


def mdi_sum(g, grids, cfg=None):
    """Full grid sum of g by multilevel dimension iteration; see module doc."""
    cfg = cfg if cfg is not None else MdiConfig()
    d = grids.d
    extra = exprcore.free_vars(g) - set(range(1, d + 1))
    if extra:
        raise ValueError(f"integrand uses coordinates {sorted(extra)} beyond the {d} axes")
    axes = [(i + 1, grids.nodes[i]) for i in range(d)]

    cur = g
    level_nodes = []
    level_seconds = []
    fell_back = False
    while len(axes) > 3:
        t0 = time.perf_counter()
        try:
            for _ in range(cfg.m):
                index, nodes = axes[-1] if cfg.order == "forward" else axes[0]
                cur = exprcore.partial_sum(cur, index, nodes, budget=cfg.budget)
                axes = axes[:-1] if cfg.order == "forward" else axes[1:]
        except BudgetExceededError:
            if cfg.fallback == "error":
                raise
            fell_back = True
            break
        level_seconds.append(time.perf_counter() - t0)
        level_nodes.append(exprcore.node_count(cur))

    if fell_back:
        t0 = time.perf_counter()
        value = direct_tensor_sum(g, grids, cap=cfg.direct_cap)
        base_seconds = time.perf_counter() - t0
        return MdiReport(
            value=value,
            levels=len(level_nodes),
            base_dim=d,
            level_nodes=tuple(level_nodes),
            level_seconds=tuple(level_seconds),
            base_seconds=base_seconds,
            fallback=True,
        )

    t0 = time.perf_counter()
    value = _numeric_sum(cur, axes, cfg.direct_cap)
    base_seconds = time.perf_counter() - t0
    return MdiReport(
        value=value,
        levels=len(level_nodes),
        base_dim=len(axes),
        level_nodes=tuple(level_nodes),
        level_seconds=tuple(level_seconds),
        base_seconds=base_seconds,
        fallback=False,
    )


def _normalize(raw, counts):
    """raw / prod(counts) without overflowing float for huge grids."""
    total = math.prod(counts)
    if total <= 2**53:
        return raw / total
    out = raw
    for ct in counts:
        out /= ct
    return out


def _det_a(rule):
    """|A| = 1/(z_1 ... z_{d-1}); 0.0 when the product overflows float."""
    prod = math.prod(rule.z[:-1]) if rule.d > 1 else 1
    try:
        return 1.0 / float(prod)
    except OverflowError:
        return 0.0


def mdi_lr(f, d, a, n, cfg=None, rule=None, with_report=False):
    """Improved-rule quadrature of f via dimension iteration.

    Builds the Korobov rule (1, a, ..., a^(d-1)) for n points (or uses the
    supplied rule), takes the open tensor grid with the rule's axis counts,
    and returns the equal-weight average. With with_report=True returns
    (value, MdiReport); report.value stays the raw sum.
    """
    cfg = cfg if cfg is not None else MdiConfig()
    if rule is None:
        rule = korobov_vector(a, n, d)
    elif rule.d != d:
        raise ValueError(f"rule dimension {rule.d} != {d}")
    grids = midpoint_grids(rule)
    report = mdi_sum(f, grids, cfg)
    report.det_a = _det_a(rule)
    value = _normalize(report.value, grids.counts)
    if with_report:
        return value, report
    return value
