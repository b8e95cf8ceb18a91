"""Hash-consed symbolic expressions with partial summation.

This module is the substrate for dimension-iterated summation: immutable
expression DAGs in canonical form, a small parser for the integrand corpus,
variable binding, and ``partial_sum`` (sum an expression over a list of nodes
for one coordinate, collecting like terms so repeated summation does not blow
up for separable integrands).

Canonical form
--------------
* sums store a constant slot plus (term, coefficient) pairs; terms are
  distinct, coefficient-free, and kept in a deterministic structural order
* products store a scalar coefficient plus sorted non-constant factors;
  repeated factors are folded into integer powers
* integer powers have exponent >= 2 or exactly -1; u^-k is (u^k)^-1
* powers of sums are expanded multinomially when the estimated term count is
  small (``POW_EXPAND_CAP``), which is what keeps polynomial node counts
  independent of how many nodes a partial sum ran over
* exp/sin/cos of a sum with a constant addend split the constant out
  (exp(a+c) = e^c exp(a), angle addition for sin and cos)

All coefficient arithmetic is 64-bit float. Structurally equal expressions are
the same object (hash consing), so identity comparison is semantic equality of
canonical forms.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

__all__ = [
    "Expr",
    "BudgetExceededError",
    "ParseError",
    "UnassignedVariableError",
    "DEFAULT_NODE_BUDGET",
    "parse",
    "bind",
    "substitute",
    "partial_sum",
    "eval",
    "eval_array",
    "node_count",
    "free_vars",
    "normalize",
    "const",
    "var",
    "make_sum",
    "make_prod",
    "make_pow",
    "exp_of",
    "sin_of",
    "cos_of",
    "to_text",
]

DEFAULT_NODE_BUDGET = 200_000

# multinomial expansion of (sum)^k is only done below this many result terms;
# larger powers stay folded and are left to the numeric fallback path
POW_EXPAND_CAP = 5000

_RANK = {"const": 0, "var": 1, "pow": 2, "exp": 3, "sin": 4, "cos": 5, "prod": 6, "sum": 7}


class BudgetExceededError(Exception):
    """partial_sum produced an expression larger than the node budget."""


class ParseError(ValueError):
    """Malformed expression source; message carries the token position."""


class UnassignedVariableError(KeyError):
    """eval() hit a free variable with no assigned value."""


@dataclass(frozen=True, eq=False)
class Expr:
    """One interned DAG node. Do not construct directly; use the factories."""

    kind: str
    value: float = 0.0          # const value / sum constant / prod coefficient
    index: int = 0              # variable index (1-based) or power exponent
    children: tuple = ()        # sum: ((term, coeff), ...); prod: factors; else (arg,)
    okey: tuple = field(default=(), repr=False, compare=False)

    def __repr__(self):  # full trees are unreadable; show a compact header
        return f"Expr<{self.kind}:{to_text(self, maxlen=60)}>"


_store: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()


def _intern(kind, value=0.0, index=0, children=()):
    if value == 0.0:
        value = 0.0  # collapse -0.0
    key = (kind, value, index, children)
    node = _store.get(key)
    if node is None:
        node = Expr(kind, value, index, children, _order_key(kind, value, index, children))
        _store[key] = node
    return node


def _order_key(kind, value, index, children):
    rank = _RANK[kind]
    if kind == "const":
        return (rank, value)
    if kind == "var":
        return (rank, index)
    if kind == "pow":
        return (rank, children[0].okey, index)
    if kind in ("exp", "sin", "cos"):
        return (rank, children[0].okey)
    if kind == "prod":
        return (rank, tuple(f.okey for f in children), value)
    # sum
    return (rank, tuple((t.okey, c) for t, c in children), value)


# ----------------------------------------------------------------- factories

def const(v):
    return _intern("const", float(v))


def var(i):
    if i < 1:
        raise ValueError(f"variable index must be >= 1, got {i}")
    return _intern("var", index=int(i))


_ONE = None  # set after const is defined


def make_sum(pairs, constant=0.0):
    """Canonical sum of (term, coefficient) pairs plus a constant."""
    acc: dict[Expr, float] = {}
    constant = float(constant)
    stack = list(pairs)
    while stack:
        term, coeff = stack.pop()
        if coeff == 0.0:
            continue
        if term.kind == "const":
            constant += coeff * term.value
            continue
        if term.kind == "sum":
            constant += coeff * term.value
            stack.extend((t, coeff * c) for t, c in term.children)
            continue
        if term.kind == "prod" and term.value != 1.0:
            # strip the scalar into the coefficient and reprocess (the
            # remaining factor may itself be a sum or constant)
            stack.append((make_prod(1.0, term.children), coeff * term.value))
            continue
        prev = acc.get(term)
        acc[term] = coeff if prev is None else prev + coeff
    items = tuple(sorted(((t, c) for t, c in acc.items() if c != 0.0), key=lambda p: p[0].okey))
    if not items:
        return const(constant)
    if len(items) == 1 and constant == 0.0:
        # a single weighted term is a coefficient product, never a sum
        t, c = items[0]
        return t if c == 1.0 else make_prod(c, [t])
    return _intern("sum", constant, 0, items)


def make_prod(coeff, factors):
    """Canonical product: scalar coefficient times sorted non-constant factors."""
    coeff = float(coeff)
    bases: dict[Expr, int] = {}
    stack = list(factors)
    while stack:
        f = stack.pop()
        if f.kind == "const":
            coeff *= f.value
            continue
        if f.kind == "prod":
            coeff *= f.value
            stack.extend(f.children)
            continue
        base, e = _as_power(f)
        bases[base] = bases.get(base, 0) + e
    if coeff == 0.0:
        return const(0.0)
    out = []
    for base, e in bases.items():
        if e == 0:
            continue
        out.append(make_pow(base, e))
    # folding powers may have produced constants or nested products; re-run once
    if any(f.kind in ("const", "prod") for f in out):
        return make_prod(coeff, out)
    if not out:
        return const(coeff)
    if len(out) == 1 and coeff == 1.0:
        return out[0]
    if len(out) == 1 and out[0].kind == "sum":
        # scalar times a lone sum distributes, keeping sums at the top
        s = out[0]
        return make_sum([(t, coeff * c) for t, c in s.children], coeff * s.value)
    return _intern("prod", coeff, 0, tuple(sorted(out, key=lambda f: f.okey)))


def _as_power(f):
    """Decompose a factor into (base, integer exponent)."""
    if f.kind == "pow":
        if f.index == -1:
            inner = f.children[0]
            if inner.kind == "pow" and inner.index >= 2:
                return inner.children[0], -inner.index
            return inner, -1
        return f.children[0], f.index
    return f, 1


def make_pow(base, exponent):
    k = int(exponent)
    if k == 0:
        return const(1.0)
    if k == 1:
        return base
    if base.kind == "const":
        return const(base.value**k)
    if k <= -2:
        return make_pow(make_pow(base, -k), -1)
    if k == -1:
        if base.kind == "pow" and base.index == -1:
            return base.children[0]
        if base.kind == "prod":
            return make_prod(1.0 / base.value, [make_pow(f, -1) for f in base.children])
        return _intern("pow", 0.0, -1, (base,))
    # k >= 2
    if base.kind == "pow":
        if base.index == -1:
            return make_pow(make_pow(base.children[0], k), -1)
        return make_pow(base.children[0], base.index * k)
    if base.kind == "prod":
        return make_prod(base.value**k, [make_pow(f, k) for f in base.children])
    if base.kind == "sum":
        t = len(base.children) + (1 if base.value != 0.0 else 0)
        if math.comb(t + k - 1, k) <= POW_EXPAND_CAP:
            return _expand_sum_power(base, k)
    return _intern("pow", 0.0, k, (base,))


def _expand_sum_power(s, k):
    """Multinomial expansion of (sum)^k as a dict of monomials."""
    # monomial key: tuple of (term, multiplicity) sorted structurally
    poly = {(): 1.0}
    items = list(s.children)
    for _ in range(k):
        nxt: dict[tuple, float] = {}
        for mono, c in poly.items():
            if s.value != 0.0:
                nxt[mono] = nxt.get(mono, 0.0) + c * s.value
            for t, ct in items:
                m = dict(mono)
                m[t] = m.get(t, 0) + 1
                key = tuple(sorted(m.items(), key=lambda p: p[0].okey))
                nxt[key] = nxt.get(key, 0.0) + c * ct
        poly = nxt
    pairs = []
    constant = 0.0
    for mono, c in poly.items():
        if not mono:
            constant += c
            continue
        pairs.append((make_prod(1.0, [make_pow(t, m) for t, m in mono]), c))
    return make_sum(pairs, constant)


def _split_constant(s):
    """Return (rest, c) for a sum with constant slot c, rest without it."""
    return make_sum(list(s.children), 0.0), s.value


def exp_of(arg):
    if arg.kind == "const":
        return const(math.exp(arg.value))
    if arg.kind == "sum" and arg.value != 0.0:
        rest, c = _split_constant(arg)
        return make_prod(math.exp(c), [exp_of(rest)])
    return _intern("exp", 0.0, 0, (arg,))


def sin_of(arg):
    if arg.kind == "const":
        return const(math.sin(arg.value))
    if arg.kind == "sum" and arg.value != 0.0:
        rest, c = _split_constant(arg)
        return make_sum([(sin_of(rest), math.cos(c)), (cos_of(rest), math.sin(c))])
    return _intern("sin", 0.0, 0, (arg,))


def cos_of(arg):
    if arg.kind == "const":
        return const(math.cos(arg.value))
    if arg.kind == "sum" and arg.value != 0.0:
        rest, c = _split_constant(arg)
        return make_sum([(cos_of(rest), math.cos(c)), (sin_of(rest), -math.sin(c))])
    return _intern("cos", 0.0, 0, (arg,))


_FUNC_FACTORY = {"exp": exp_of, "sin": sin_of, "cos": cos_of}


# ------------------------------------------------------------------- queries

def node_count(e):
    """Number of distinct DAG nodes reachable from e."""
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.kind == "sum":
            stack.extend(t for t, _ in node.children)
        else:
            stack.extend(node.children)
    return len(seen)


def free_vars(e):
    """Set of 1-based coordinate indices occurring in e."""
    out = set()
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.kind == "var":
            out.add(node.index)
        elif node.kind == "sum":
            stack.extend(t for t, _ in node.children)
        else:
            stack.extend(node.children)
    return out


def _rebuild(e, leaf, memo):
    """Bottom-up reconstruction through the canonical factories.

    leaf(node) returns a replacement for var nodes (or the node itself).
    """
    hit = memo.get(e)
    if hit is not None:
        return hit
    k = e.kind
    if k == "const":
        out = e
    elif k == "var":
        out = leaf(e)
    elif k == "sum":
        out = make_sum([(_rebuild(t, leaf, memo), c) for t, c in e.children], e.value)
    elif k == "prod":
        out = make_prod(e.value, [_rebuild(f, leaf, memo) for f in e.children])
    elif k == "pow":
        out = make_pow(_rebuild(e.children[0], leaf, memo), e.index)
    else:
        out = _FUNC_FACTORY[k](_rebuild(e.children[0], leaf, memo))
    memo[e] = out
    return out


def bind(e, index, value):
    """Replace coordinate ``index`` with a numeric value; no-op if absent."""
    c = const(value)
    return _rebuild(e, lambda v: c if v.index == index else v, {})


def substitute(e, mapping):
    """Replace coordinates with expressions per ``mapping`` (index -> Expr)."""
    return _rebuild(e, lambda v: mapping.get(v.index, v), {})


def normalize(e):
    """Re-run canonicalization; the identity on any interned expression."""
    return _rebuild(e, lambda v: v, {})


def partial_sum(e, index, nodes, budget=DEFAULT_NODE_BUDGET):
    """Sum of bind(e, index, v) over v in nodes, like terms collected.

    Raises BudgetExceededError when the result exceeds ``budget`` DAG nodes,
    signalling the caller to switch to numeric summation.
    """
    if not nodes:
        raise ValueError("partial_sum needs at least one node")
    out = make_sum([(bind(e, index, v), 1.0) for v in nodes])
    if budget is not None and node_count(out) > budget:
        raise BudgetExceededError(
            f"partial sum over coordinate {index} has {node_count(out)} nodes (budget {budget})")
    return out


def eval(e, assignment):  # noqa: A001 - contract name
    """Numeric value of e under {index: value}; raises on free variables."""
    memo = {}

    def rec(node):
        got = memo.get(node)
        if got is not None:
            return got
        k = node.kind
        if k == "const":
            v = node.value
        elif k == "var":
            try:
                v = assignment[node.index]
            except KeyError:
                raise UnassignedVariableError(node.index) from None
        elif k == "sum":
            v = node.value + sum(c * rec(t) for t, c in node.children)
        elif k == "prod":
            v = node.value
            for f in node.children:
                v *= rec(f)
        elif k == "pow":
            b = rec(node.children[0])
            v = 1.0 / b if node.index == -1 else b**node.index
        elif k == "exp":
            v = math.exp(rec(node.children[0]))
        elif k == "sin":
            v = math.sin(rec(node.children[0]))
        else:
            v = math.cos(rec(node.children[0]))
        memo[node] = v
        return v

    return float(rec(e))


def eval_array(e, assignment):
    """Vectorized eval: assignment values are numpy arrays (broadcastable)."""
    import numpy as np

    memo = {}

    def rec(node):
        got = memo.get(node)
        if got is not None:
            return got
        k = node.kind
        if k == "const":
            v = node.value
        elif k == "var":
            try:
                v = assignment[node.index]
            except KeyError:
                raise UnassignedVariableError(node.index) from None
        elif k == "sum":
            v = node.value
            for t, c in node.children:
                v = v + c * rec(t)
        elif k == "prod":
            v = node.value
            for f in node.children:
                v = v * rec(f)
        elif k == "pow":
            b = rec(node.children[0])
            v = 1.0 / b if node.index == -1 else b ** node.index
        elif k == "exp":
            v = np.exp(rec(node.children[0]))
        elif k == "sin":
            v = np.sin(rec(node.children[0]))
        else:
            v = np.cos(rec(node.children[0]))
        memo[node] = v
        return v

    return rec(e)


# -------------------------------------------------------------------- parser

_SYMBOLS = ("..", "+", "-", "*", "/", "^", "(", ")", "[", "]", ",", "=")


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            # a ".." is a range separator, never part of a numeric literal
            while j < n and (text[j].isdigit() or (text[j] == "." and not text.startswith("..", j))):
                j += 1
            if j < n and text[j] in "eE" and not text[i:j].count(".") > 1:
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            toks.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], i))
            i = j
            continue
        if text.startswith("..", i):
            toks.append(("sym", "..", i))
            i += 2
            continue
        if ch in "+-*/^()[],=":
            toks.append(("sym", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    toks.append(("end", "", n))
    return toks


class _Parser:
    """Recursive descent over the integrand grammar.

    sum(i=lo..hi, body) and prod(i=lo..hi, body) are expanded during parsing
    by re-reading the body token span once per index value; index expressions
    (integer arithmetic over literals, d, and in-scope indices) appear in
    exponents, bounds, and subscripts.
    """

    def __init__(self, toks, d, env):
        self.toks = toks
        self.pos = 0
        self.d = d
        self.env = env

    def peek(self):
        return self.toks[self.pos]

    def take(self, want=None):
        kind, val, at = self.toks[self.pos]
        if want is not None and val != want:
            raise ParseError(f"expected {want!r} at position {at}, found {val!r}")
        self.pos += 1
        return kind, val, at

    def expr(self):
        node = self.term()
        pairs = [(node, 1.0)]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            pairs.append((self.term(), 1.0 if op == "+" else -1.0))
        return make_sum(pairs) if len(pairs) > 1 else node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op, at = self.take()[1], self.peek()[2]
            rhs = self.factor()
            if op == "*":
                node = make_prod(1.0, [node, rhs])
            else:
                node = self._divide(node, rhs, at)
        return node

    def _divide(self, num, den, at):
        if den.kind == "const":
            if den.value == 0.0:
                raise ParseError(f"division by zero at position {at}")
            return make_prod(1.0 / den.value, [num])
        if num.kind == "const":
            return make_prod(num.value, [make_pow(den, -1)])
        raise ParseError(
            f"non-constant denominator at position {at}; only constant "
            "denominators or constant-over-expression reciprocals are supported")

    def factor(self):
        node = self.unary()
        if self.peek()[1] == "^":
            self.take("^")
            k = self.ipower()
            node = make_pow(node, k)
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take("-")
            return make_prod(-1.0, [self.base()])
        return self.base()

    def base(self):
        kind, val, at = self.peek()
        if kind == "num":
            self.take()
            try:
                return const(float(val))
            except ValueError:
                raise ParseError(f"bad numeric literal {val!r} at position {at}") from None
        if val == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        if kind == "name":
            self.take()
            if val == "pi":
                return const(math.pi)
            if val == "e":
                return const(math.e)
            if val == "x":
                self.take("[")
                i = self.iexpr()
                self.take("]")
                if not 1 <= i <= self.d:
                    raise ParseError(f"coordinate x[{i}] outside 1..{self.d} at position {at}")
                return var(i)
            if val in ("exp", "sin", "cos"):
                self.take("(")
                arg = self.expr()
                self.take(")")
                return _FUNC_FACTORY[val](arg)
            if val in ("sum", "prod"):
                return self._reduction(val)
            if val in self.env:
                return const(float(self.env[val]))
            if val == "d":
                return const(float(self.d))
            raise ParseError(f"unknown identifier {val!r} at position {at}")
        raise ParseError(f"unexpected token {val!r} at position {at}")

    def _reduction(self, which):
        self.take("(")
        kind, name, at = self.take()
        if kind != "name" or name in ("d", "x", "pi", "e", "sum", "prod", "exp", "sin", "cos"):
            raise ParseError(f"bad index variable {name!r} at position {at}")
        self.take("=")
        lo = self.iexpr()
        self.take("..")
        hi = self.iexpr()
        self.take(",")
        body_start = self.pos
        self._skip_body()
        body_end = self.pos
        self.take(")")
        parts = []
        for i in range(lo, hi + 1):
            sub = _Parser(self.toks, self.d, {**self.env, name: i})
            sub.pos = body_start
            parts.append(sub.expr())
            if sub.pos != body_end:
                raise ParseError(f"malformed {which} body at position {at}")
        if not parts:
            return const(0.0 if which == "sum" else 1.0)
        if which == "sum":
            return make_sum([(p, 1.0) for p in parts])
        return make_prod(1.0, parts)

    def _skip_body(self):
        depth = 0
        while True:
            kind, val, at = self.toks[self.pos]
            if kind == "end":
                raise ParseError(f"unterminated body at position {at}")
            if val in ("(", "["):
                depth += 1
            elif val in (")", "]"):
                if depth == 0 and val == ")":
                    return
                depth -= 1
            self.pos += 1

    # integer arithmetic over literals, d, and in-scope index variables
    def iexpr(self):
        v = self.iterm()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.iterm()
            v = v + rhs if op == "+" else v - rhs
        return v

    def iterm(self):
        v = self.ifactor()
        while self.peek()[1] in ("*", "/"):
            op, at = self.take()[1], self.peek()[2]
            rhs = self.ifactor()
            if op == "*":
                v *= rhs
            else:
                if rhs == 0 or v % rhs != 0:
                    raise ParseError(f"non-integer division in index expression at {at}")
                v //= rhs
        return v

    def ifactor(self):
        v = self.iunary()
        if self.peek()[1] == "^":
            self.take("^")
            k = self.ifactor()
            if k < 0:
                raise ParseError("negative power in index expression")
            v = v**k
        return v

    def iunary(self):
        if self.peek()[1] == "-":
            self.take("-")
            return -self.iunary()
        if self.peek()[1] == "(":
            self.take("(")
            v = self.iexpr()
            self.take(")")
            return v
        return self.iatom()

    def iatom(self):
        kind, val, at = self.take()
        if kind == "num":
            if "." in val or "e" in val or "E" in val:
                raise ParseError(f"non-integer literal {val!r} in index expression at {at}")
            return int(val)
        if kind == "name":
            if val == "d":
                return self.d
            if val in self.env:
                return self.env[val]
            raise ParseError(f"unknown index identifier {val!r} at position {at}")
        raise ParseError(f"unexpected token {val!r} in index expression at {at}")

    def ipower(self):
        """Exponent position: delimited so a following '*' separates factors."""
        if self.peek()[1] == "-":
            self.take("-")
            return -self.ipower()
        if self.peek()[1] == "(":
            self.take("(")
            v = self.iexpr()
            self.take(")")
            return v
        v = self.iatom()
        if self.peek()[1] == "^":
            self.take("^")
            k = self.ipower()
            if k < 0:
                raise ParseError("negative power in index expression")
            v = v**k
        return v


def parse(text, d):
    """Parse expression source into a canonical Expr; d bounds x[i] indices."""
    p = _Parser(_tokenize(text), d, {})
    node = p.expr()
    if p.peek()[0] != "end":
        kind, val, at = p.peek()
        raise ParseError(f"trailing input {val!r} at position {at}")
    return node


# ------------------------------------------------------------ pretty printer

def to_text(e, maxlen=None):
    """Readable rendering of a canonical expression (diagnostics, CLI echo)."""
    out = _render(e, 0)
    if maxlen is not None and len(out) > maxlen:
        return out[: maxlen - 3] + "..."
    return out


def _fmt_num(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _render(e, prec):
    # prec: 0 sum, 1 product, 2 power/atom
    k = e.kind
    if k == "const":
        return _fmt_num(e.value)
    if k == "var":
        return f"x{e.index}"
    if k in ("exp", "sin", "cos"):
        return f"{k}({_render(e.children[0], 0)})"
    if k == "pow":
        b = _render(e.children[0], 2)
        if e.children[0].kind in ("sum", "prod"):
            b = f"({b})"
        s = f"{b}^{e.index}" if e.index != -1 else f"{b}^-1"
        return s
    if k == "prod":
        parts = [_render(f, 2) if f.kind != "sum" else f"({_render(f, 0)})" for f in e.children]
        body = "*".join(parts)
        if e.value != 1.0:
            body = f"{_fmt_num(e.value)}*{body}"
        return f"({body})" if prec > 1 else body
    # sum
    parts = []
    for t, c in e.children:
        rt = _render(t, 1)
        if c == 1.0:
            parts.append(rt)
        elif c == -1.0:
            parts.append(f"-{rt}")
        else:
            parts.append(f"{_fmt_num(c)}*{rt}")
    if e.value != 0.0 or not parts:
        parts.append(_fmt_num(e.value))
    body = " + ".join(parts).replace("+ -", "- ")
    return f"({body})" if prec > 0 else body
