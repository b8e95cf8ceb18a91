"""Benchmark integrand registry with exact reference values.

Each entry carries an expression text parametric in d (the parser expands
sum/prod reductions against the requested dimension) plus a closed-form
reference integral over [0,1]^d. Everything here is separable either
directly (products/exponentials of sums) or after passing to the complex
exponential (the oscillatory members), so references are products of 1-d
factors; no cached numerical references are needed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.special import erf, erfi, fresnel

from . import exprcore

__all__ = ["CorpusEntry", "get", "entries", "all_ids", "reference_value", "corpus_expr"]


# 1-d building blocks
_EXP_POS = math.e - 1.0                      # int_0^1 e^x
_EXP_NEG = 1.0 - 1.0 / math.e                # int_0^1 e^-x
_GAUSS_1D = math.sqrt(math.pi / 2.0) * erf(1.0 / math.sqrt(2.0))  # int_0^1 e^(-t^2/2)
_ERFI_POS = math.sqrt(math.pi) / 2.0 * float(erfi(1.0))   # int_0^1 e^(t^2)
_ERF_NEG = math.sqrt(math.pi) / 2.0 * float(erf(1.0))     # int_0^1 e^(-t^2)
_RAT_1D = (math.atan(0.4 / 0.9) + math.atan(0.6 / 0.9)) / 0.9  # int_0^1 dt/(0.81+(t-0.6)^2)

# int_0^1 exp(i x^2) dx via the Fresnel integrals
_S1, _C1 = fresnel(math.sqrt(2.0 / math.pi))
_FRESNEL_W = math.sqrt(math.pi / 2.0) * complex(float(_C1), float(_S1))

# int_0^1 exp(2 i x) dx
_COSLIN_W = (cmath.exp(2.0j) - 1.0) / 2.0j


def _ref_one(d):
    return 1.0


def _ref_alternating(pos, neg):
    def ref(d):
        return pos ** ((d + 1) // 2) * neg ** (d // 2)

    return ref


def _ref_power(factor, scale=1.0):
    def ref(d):
        return scale * factor**d

    return ref


def _ref_sinsq(d):
    return (_FRESNEL_W**d).imag


def _ref_coslin(d):
    return (_COSLIN_W**d).real


def _ref_invpow(d):
    return 1.0 / math.factorial(d + 1)


@dataclass(frozen=True)
class CorpusEntry:
    """One benchmark integrand: id, d-parametric source text, reference."""

    id: str
    text: str
    reference: object       # callable d -> float
    suites: tuple           # benchmark families the entry appears in
    min_d: int = 1

    def expr(self, d):
        if d < self.min_d:
            raise ValueError(f"{self.id} needs d >= {self.min_d}, got {d}")
        return exprcore.parse(self.text, d)

    def ref(self, d):
        return float(self.reference(d))


_ENTRIES = [
    CorpusEntry(
        id="expxy",
        text="x[2]*exp(x[1]*x[2])/(e-2)",
        reference=_ref_one,
        suites=("test1",),
        min_d=2,
    ),
    CorpusEntry(
        id="sinsq",
        text="sin(2*pi + sum(i=1..d, x[i]^2))",
        reference=_ref_sinsq,
        suites=("test1", "test2"),
    ),
    CorpusEntry(
        id="expsum",
        text="exp(sum(i=1..d, x[i])) / (e-1)^d",
        reference=_ref_one,
        suites=("test2",),
    ),
    CorpusEntry(
        id="gaussian",
        text="0.3989422804014327*exp(-sum(i=1..d, x[i]^2)/2)",
        reference=_ref_power(_GAUSS_1D, scale=1.0 / math.sqrt(2.0 * math.pi)),
        suites=("test3", "test5", "test6", "test7"),
    ),
    CorpusEntry(
        id="expalt",
        text="exp(sum(i=1..d, (-1)^(i+1)*x[i]))",
        reference=_ref_alternating(_EXP_POS, _EXP_NEG),
        suites=("test4", "test7"),
    ),
    CorpusEntry(
        id="ratprod",
        text="prod(i=1..d, 1/(0.81 + (x[i]-0.6)^2))",
        reference=_ref_power(_RAT_1D),
        suites=("test4", "test5", "test6", "test7"),
    ),
    CorpusEntry(
        id="coslin",
        text="cos(2*pi + sum(i=1..d, 2*x[i]))",
        reference=_ref_coslin,
        suites=("test5", "test6", "test7"),
    ),
    CorpusEntry(
        id="expsq",
        text="exp(sum(i=1..d, (-1)^(i+1)*x[i]^2))",
        reference=_ref_alternating(_ERFI_POS, _ERF_NEG),
        suites=("test7",),
    ),
    CorpusEntry(
        id="invpow",
        text="(1 + sum(i=1..d, x[i]))^(-(d+1))",
        reference=_ref_invpow,
        suites=("test7",),
    ),
    CorpusEntry(
        id="one",
        text="1",
        reference=_ref_one,
        suites=(),
    ),
]

_BY_ID = {e.id: e for e in _ENTRIES}


def entries():
    return list(_ENTRIES)


def all_ids():
    return [e.id for e in _ENTRIES]


def get(name):
    try:
        return _BY_ID[name]
    except KeyError:
        raise KeyError(f"unknown integrand {name!r}; known: {', '.join(all_ids())}") from None


def corpus_expr(name, d):
    return get(name).expr(d)


def reference_value(name, d):
    """Exact integral of the named integrand over [0,1]^d, or None."""
    entry = _BY_ID.get(name)
    if entry is None:
        return None
    return entry.ref(d)
