"""Independent reference computations used to pin test expectations.

Everything here is deliberately naive: nested loops, exact residue-class
sums via trigamma, and truncated series with analytic tail bounds. The
package under test must match these, not the other way round.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from scipy.special import polygamma

TWO_ZETA2 = math.pi ** 2 / 3.0


def brute_lattice_points(n, z):
    """Points of the rank-one rule by direct modular arithmetic."""
    return [[(j * zj % n) / n for zj in z] for j in range(n)]


def residue_recip_sq_sum(c, n):
    """Sum of 1/h^2 over all integers h != 0 with h = c (mod n).

    Uses sum_{m in Z} 1/(c + m n)^2 = (psi1(c/n) + psi1(1 - c/n)) / n^2
    for c not a multiple of n, and 2*zeta(2)/n^2 for the zero class.
    """
    c = c % n
    if c == 0:
        return TWO_ZETA2 / n ** 2
    return float(polygamma(1, c / n) + polygamma(1, 1.0 - c / n)) / n ** 2


def dual_p2_exact(n, z):
    """P_2 as the exact dual-lattice sum for d in {1, 2}.

    d=1: dual modes are the multiples of n.
    d=2: group h1 by residue class mod n, solve h2 z2 = -h1 z1 (mod n)
    exactly per class (needs gcd(z2, n) = 1), and close both infinite
    sums with trigamma. The (0,0) mode is excluded.
    """
    if len(z) == 1:
        return TWO_ZETA2 / n ** 2
    if len(z) != 2:
        raise ValueError("exact dual sum implemented for d <= 2 only")
    z1, z2 = z[0] % n, z[1] % n
    if math.gcd(z2, n) != 1:
        raise ValueError("needs gcd(z2, n) = 1 to solve for h2")
    z2_inv = pow(z2, -1, n)

    def h2_class_weight(c):
        # weight over all h2 with h2 = c (mod n); h2 = 0 contributes 1
        w = residue_recip_sq_sum(c, n)
        if c % n == 0:
            w += 1.0
        return w

    # h1 = 0 row, h2 != 0
    total = residue_recip_sq_sum(0, n)
    # h1 != 0 rows, grouped by the residue class r of h1
    for r in range(n):
        c = (-r * z1 * z2_inv) % n
        total += residue_recip_sq_sum(r, n) * h2_class_weight(c)
    return total


def dual_p2_truncated(n, z, radius=200):
    """P_2 by brute truncation: all h with |h_j| <= radius, h != 0."""
    d = len(z)
    total = 0.0
    for h in itertools.product(range(-radius, radius + 1), repeat=d):
        if all(v == 0 for v in h):
            continue
        if sum(hj * zj for hj, zj in zip(h, z)) % n != 0:
            continue
        w = 1.0
        for hj in h:
            w *= 1.0 / max(1, abs(hj)) ** 2
        total += w
    return total


def dual_p2_tail_bound(n, z, radius=200):
    """Upper bound on the mass dual_p2_truncated misses past the radius.

    Any missed mode has some |h_j| > radius; bounding each such slab by
    (full weight in the other axes) * sum_{|h|>radius} 1/h^2 and the
    integral bound sum_{h>R} h^-2 <= 1/R gives a safe (loose) cap.
    """
    d = len(z)
    full_axis = 1.0 + TWO_ZETA2  # weight of one unconstrained axis
    per_tail = 2.0 / radius
    return d * per_tail * full_axis ** (d - 1)


def exhaustive_cbc(n, d, wce_sq):
    """Per-step exhaustive CBC: at each k, scan every coprime candidate.

    wce_sq(z_tuple, k) must return the squared shift-averaged worst-case
    error of the k-dimensional rule (n, z_tuple) under the caller's
    weights; this oracle owns only the scan order and tie-breaking
    (smallest candidate wins ties exactly).
    """
    cands = [c for c in range(1, n) if math.gcd(c, n) == 1]
    z = [1]
    for k in range(2, d + 1):
        best, best_val = None, None
        for c in cands:
            val = wce_sq(tuple(z) + (c,), k)
            if best_val is None or val < best_val:
                best, best_val = c, val
        z.append(best)
    return tuple(z)


def brute_tensor_sum(f, axes, eval_fn):
    """Plain nested-loop tensor sum of f over axes [(index, nodes), ...]."""
    idxs = [i for i, _ in axes]
    total = 0.0
    for combo in itertools.product(*(nodes for _, nodes in axes)):
        total += eval_fn(f, dict(zip(idxs, combo)))
    return total


def forward_transform_fractions(n, z, j):
    """The affine lattice-to-grid map evaluated in exact rationals.

    Mirrors the floor-form map: y_i = |floor(j z_{i+1} / n) / z_{i+1}
    - floor(j z_i / n) / z_i| for i < d, and the last coordinate keeps
    the fractional remainder scaled back by z_d / n.
    """
    d = len(z)
    out = []
    for i in range(d - 1):
        lo = Fraction((j * z[i]) // n, z[i])
        hi = Fraction((j * z[i + 1]) // n, z[i + 1])
        out.append(abs(hi - lo))
    m = (j * z[d - 1]) // n
    inner = j - Fraction(n * m, z[d - 1])
    out.append(abs(Fraction(z[d - 1] * math.floor(inner), n)))
    return out


def fib(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a
