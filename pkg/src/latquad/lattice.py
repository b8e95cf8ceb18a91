"""Rank-one lattice rules: points, quality measures, and constructions.

A rank-one rule is the point set {j z / n}, j = 0..n-1, for a generating
vector z of d integers. This module covers point generation, the P_alpha
figure of merit, the shift-averaged worst-case error in weighted Sobolev
spaces (anchored or unanchored), and three constructions: Fibonacci (d=2),
Korobov power form, and component-by-component greedy search.

Korobov vectors are stored unreduced (z_j = a^(j-1)) because the axis-count
arithmetic of the grid transform needs the raw magnitudes; reduction mod n
happens only when points are generated. Rules with gcd(z_j, n) != 1 are
permitted (the n = a^d configuration is deliberately of this kind) but the
quality measures assume coprime components and emit QualityWarning for them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticeRule",
    "WeightModel",
    "QualityWarning",
    "lattice_points",
    "points_block",
    "fibonacci_rule",
    "korobov_vector",
    "p_alpha",
    "bernoulli_poly",
    "shift_avg_wce_sq",
    "cbc_construct",
    "korobov_search",
]

# enumerating points divides by n in float64; past 2^53 that is meaningless
_MAX_ENUM = 2**53

# block size (elements) for chunked point/measure evaluation
_BLOCK = 1 << 22


class QualityWarning(UserWarning):
    """A quality measure was evaluated for a rule with gcd(z_j, n) != 1."""


@dataclass(frozen=True)
class LatticeRule:
    """n points generated by z; immutable and hashable.

    Components are kept exactly as given: constructions that search (CBC,
    Fibonacci) store reduced components, the Korobov power form stores the
    raw powers. Use ``z_reduced`` for anything arithmetic mod n.
    """

    n: int
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "z", tuple(int(c) for c in self.z))
        if self.n < 1:
            raise ValueError(f"point count must be positive, got {self.n}")
        if not self.z:
            raise ValueError("generating vector must have at least one component")
        if any(c < 1 for c in self.z):
            raise ValueError(f"generating vector components must be positive, got {self.z}")

    @property
    def d(self):
        return len(self.z)

    @property
    def z_reduced(self):
        return tuple(c % self.n for c in self.z)

    @property
    def is_grid_type(self):
        """True when some gcd(z_j, n) != 1, so axis projections repeat."""
        return any(math.gcd(c, self.n) != 1 for c in self.z)


def _warn_grid_type(rule, measure):
    if rule.is_grid_type:
        warnings.warn(
            f"{measure} assumes gcd(z_j, n) = 1; rule n={rule.n} z={rule.z} is "
            "grid-type and the measure does not certify its accuracy",
            QualityWarning,
            stacklevel=3,
        )


def points_block(rule, start, stop):
    """Points j = start..stop-1 of the rule as a (stop-start, d) float array."""
    n = rule.n
    if n > _MAX_ENUM:
        raise OverflowError(f"cannot enumerate points of an n={n} rule")
    j = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(j), rule.d))
    for col, zj in enumerate(rule.z_reduced):
        out[:, col] = ((j * zj) % n) / n
    return out


def lattice_points(rule):
    """All n points {j z / n}, j = 0..n-1, ordered by j; shape (n, d)."""
    return points_block(rule, 0, rule.n)


def iter_point_blocks(rule, block=None):
    """Yield the point set in index order as (m, d) blocks."""
    rows = max(1, (block or _BLOCK) // rule.d)
    for start in range(0, rule.n, rows):
        yield points_block(rule, start, min(start + rows, rule.n))


def fibonacci_rule(k):
    """The d=2 rule with n = F_(k+1), z = (1, F_k); k >= 2."""
    if k < 2:
        raise ValueError(f"Fibonacci index must be >= 2, got {k}")
    if k > 77:  # F_79 exceeds 2^53 and point coordinates lose exactness
        raise OverflowError(f"Fibonacci index {k} overflows the enumerable range")
    a, b = 1, 1  # F_1, F_2
    for _ in range(k - 1):
        a, b = b, a + b
    return LatticeRule(b, (1, a))


def korobov_vector(a, n, d):
    """Korobov rule z = (1, a, a^2, ..., a^(d-1)), stored unreduced."""
    a = int(a)
    if not 1 <= a <= max(n - 1, 1):
        raise ValueError(f"Korobov parameter a={a} outside 1..{n - 1}")
    return LatticeRule(n, tuple(a**j for j in range(d)))


def bernoulli_poly(x, alpha):
    """B_2 or B_4 on [0, 1); B_2 in the reflection-symmetric form."""
    x = np.asarray(x, dtype=float)
    if alpha == 2:
        # (x-1/2)^2 - 1/12 == x^2 - x + 1/6, bitwise symmetric in x <-> 1-x
        t = x - 0.5
        return t * t - 1.0 / 12.0
    if alpha == 4:
        return ((x - 2.0) * x + 1.0) * x * x - 1.0 / 30.0
    raise ValueError(f"alpha must be 2 or 4, got {alpha}")


def _residue_blocks(rule):
    """Yield {j z / n} coordinate blocks of shape (m, d) without forming all n."""
    n = rule.n
    if n > _MAX_ENUM:
        raise OverflowError(f"cannot sweep an n={n} rule")
    zr = rule.z_reduced
    rows = max(1, _BLOCK // rule.d)
    for start in range(0, n, rows):
        j = np.arange(start, min(start + rows, n), dtype=np.int64)
        x = np.empty((len(j), rule.d))
        for col, zj in enumerate(zr):
            x[:, col] = ((j * zj) % n) / n
        yield x


def p_alpha(rule, alpha=2):
    """Figure of merit P_alpha via the Bernoulli closed form (alpha in {2, 4}).

    Equals the dual-lattice sum sum_{h.z = 0 mod n, h != 0} prod 1/max(1,|h_j|)^alpha
    for coprime rules; grid-type rules get a QualityWarning.
    """
    if alpha not in (2, 4):
        raise ValueError(f"alpha must be 2 or 4, got {alpha}")
    _warn_grid_type(rule, "p_alpha")
    sign = 1.0 if (alpha // 2) % 2 == 1 else -1.0
    coef = sign * (2.0 * math.pi) ** alpha / math.factorial(alpha)
    total = 0.0
    for x in _residue_blocks(rule):
        total += float(np.prod(1.0 + coef * bernoulli_poly(x, alpha), axis=1).sum())
    return total / rule.n - 1.0


@dataclass(frozen=True)
class WeightModel:
    """Product weights gamma_1..gamma_d with the space's anchor constant beta.

    beta = c^2 - c + 1/3 for the Sobolev space anchored at c, 0 for the
    unanchored / shift-invariant kernel.
    """

    gamma: tuple
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        object.__setattr__(self, "beta", float(self.beta))
        if any(g <= 0.0 for g in self.gamma):
            raise ValueError("product weights must be positive")

    @classmethod
    def unanchored(cls, gamma):
        return cls(tuple(gamma), 0.0)

    @classmethod
    def anchored(cls, gamma, c=1.0):
        return cls(tuple(gamma), c * c - c + 1.0 / 3.0)

    @classmethod
    def default(cls, d):
        """The customary decaying choice gamma_j = 1/j^2, unanchored."""
        return cls(tuple(1.0 / (j * j) for j in range(1, d + 1)), 0.0)

    def prefix(self, k):
        return WeightModel(self.gamma[:k], self.beta)


def _weights_for(rule, weights):
    w = weights if weights is not None else WeightModel.default(rule.d)
    if len(w.gamma) < rule.d:
        raise ValueError(f"need {rule.d} weights, got {len(w.gamma)}")
    return w.gamma[: rule.d], w.beta


def shift_avg_wce_sq(rule, weights=None):
    """Squared shift-averaged worst-case error of the rule.

    -prod_j (1 + gamma_j beta)
      + (1/n) sum_k prod_j (1 + gamma_j [B_2({k z_j / n}) + beta])
    """
    gamma, beta = _weights_for(rule, weights)
    g = np.asarray(gamma)
    anchor = float(np.prod(1.0 + g * beta))
    n = rule.n
    if n * rule.d <= _BLOCK:
        x = points_block(rule, 0, n)
        terms = np.prod(1.0 + g * (bernoulli_poly(x, 2) + beta), axis=1)
        # sorting makes the sum invariant under point reordering, so rules
        # that are reflections of each other tie exactly in searches
        total = float(np.sort(terms).sum())
    else:
        total = 0.0
        for x in _residue_blocks(rule):
            total += np.prod(1.0 + g * (bernoulli_poly(x, 2) + beta), axis=1).sum()
    return total / n - anchor


def _improves(val, best):
    # strict improvement with head-room so exact-symmetry ties (reflected or
    # inverse vectors) never flip on last-ulp float noise; ties keep the
    # earlier = smaller candidate
    return val < best - 1e-9 * abs(best)


def _coprime_candidates(n):
    return [c for c in range(1, n) if math.gcd(c, n) == 1]


def cbc_construct(n, d, weights=None):
    """Component-by-component rule: z_1 = 1, each z_s the exhaustive minimizer
    of shift_avg_wce_sq over {1 <= c <= n-1, gcd(c, n) = 1}, ties to smallest.
    """
    if n < 2:
        raise ValueError(f"component-by-component search needs n >= 2, got {n}")
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    w = weights if weights is not None else WeightModel.default(d)
    if len(w.gamma) < d:
        raise ValueError(f"need {d} weights, got {len(w.gamma)}")
    beta = w.beta
    cands = _coprime_candidates(n)
    j = np.arange(n, dtype=np.int64)
    b2_residue = bernoulli_poly(np.arange(n) / n, 2)
    # running product over already-fixed components, per point index
    base = 1.0 + w.gamma[0] * (b2_residue[j % n] + beta)
    anchor = 1.0 + w.gamma[0] * beta
    z = [1]
    for s in range(2, d + 1):
        g = w.gamma[s - 1]
        anchor *= 1.0 + g * beta
        best_c, best_val, best_col = None, math.inf, None
        for c in cands:
            col = 1.0 + g * (b2_residue[(j * c) % n] + beta)
            val = float(np.sort(base * col).sum()) / n - anchor
            if best_c is None or _improves(val, best_val):
                best_c, best_val, best_col = c, val, col
        z.append(best_c)
        base = base * best_col
    return LatticeRule(n, tuple(z))


def korobov_search(n, d, weights=None, criterion="wce"):
    """Best Korobov rule over a in the coprime candidate set.

    criterion: "wce" minimizes shift_avg_wce_sq, "p2" minimizes p_alpha with
    alpha=2. Ties go to the smallest a.
    """
    if n < 2:
        raise ValueError(f"Korobov search needs n >= 2, got {n}")
    if criterion not in ("wce", "p2"):
        raise ValueError(f"criterion must be 'wce' or 'p2', got {criterion!r}")
    best_a, best_val = None, math.inf
    for a in _coprime_candidates(n):
        rule = korobov_vector(a, n, d)
        if criterion == "wce":
            val = shift_avg_wce_sq(rule, weights)
        else:
            val = p_alpha(rule, 2)
        if best_a is None or _improves(val, best_val):
            best_a, best_val = a, val
    return korobov_vector(best_a, n, d)
