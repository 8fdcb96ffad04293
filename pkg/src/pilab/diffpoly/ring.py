"""Exact-rational differential polynomials in s, t_1..t_J and the jet of q.

A :class:`DiffPoly` is a finite sum of monomials with :class:`fractions.Fraction`
coefficients. Variables are keyed by ``(kind, index)`` pairs so that the
natural tuple order is the canonical variable order used everywhere in the
package: ``q^(0) < q^(1) < ... < s < t_1 < t_2 < ...``.

Variable names on the wire are ``q0, q1, ...``, ``s`` and ``t1, t2, ...``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from pilab.errors import MissingAssignment, SchemaViolation

Q, S, T = 0, 1, 2
Var = Tuple[int, int]
Monomial = Tuple[Tuple[Var, int], ...]

_NAME_RE = re.compile(r"^(?:q(\d+)|s|t(\d+))$")


def var_name(v: Var) -> str:
    kind, idx = v
    if kind == Q:
        return f"q{idx}"
    if kind == S:
        return "s"
    return f"t{idx}"


def parse_var(name: str) -> Var:
    m = _NAME_RE.match(name)
    if m is None:
        raise ValueError(f"unknown variable name {name!r}")
    if m.group(1) is not None:
        return (Q, int(m.group(1)))
    if m.group(2) is not None:
        j = int(m.group(2))
        if j < 1:
            raise ValueError(f"time variables start at t1, got {name!r}")
        return (T, j)
    return (S, 0)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class DiffPoly:
    """Immutable polynomial over Q in the variables s, t_j, q^(j).

    Arithmetic accepts ints and Fractions as scalars. Floats are rejected on
    purpose; they only enter at :meth:`evaluate`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = _as_fraction(c)
            if c == 0:
                continue
            for v, e in mono:
                if not isinstance(e, int) or e < 0:
                    raise ValueError(f"bad exponent {e!r} in monomial")
            mono = tuple(sorted((v, e) for v, e in mono if e != 0))
            clean[mono] = clean.get(mono, Fraction(0)) + c
            if clean[mono] == 0:
                del clean[mono]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "DiffPoly":
        return cls({(): c})

    @classmethod
    def var(cls, v) -> "DiffPoly":
        if isinstance(v, str):
            v = parse_var(v)
        return cls({((v, 1),): 1})

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "DiffPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- basic protocol -------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPoly.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def variables(self) -> list:
        vs = set()
        for mono in self._terms:
            vs.update(v for v, _ in mono)
        return sorted(vs)

    @property
    def max_derivative_order(self) -> int:
        """Highest j with q^(j) present, or -1 if q does not appear."""
        orders = [v[1] for v in self.variables() if v[0] == Q]
        return max(orders) if orders else -1

    # -- arithmetic -------------------------------------------------
    def _coerce(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return DiffPoly()
            return DiffPoly._raw({m: c * other for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return DiffPoly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction)) or other == 0:
            raise TypeError("DiffPoly can only be divided by a non-zero rational")
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = DiffPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- calculus -------------------------------------------------
    def partial(self, v) -> "DiffPoly":
        """Formal partial derivative with respect to one variable."""
        if isinstance(v, str):
            v = parse_var(v)
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            e = d.get(v, 0)
            if e == 0:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            m = tuple(sorted(d.items()))
            out[m] = out.get(m, 0) + c * e
        return DiffPoly({m: c for m, c in out.items()})

    def total_derivative(self) -> "DiffPoly":
        """d/ds treating q^(j) as the j-th s-derivative of q; t_j are constants."""
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            for v, e in mono:
                kind, idx = v
                if kind == T:
                    continue
                nd = dict(d)
                if e == 1:
                    del nd[v]
                else:
                    nd[v] = e - 1
                if kind == Q:
                    w = (Q, idx + 1)
                    nd[w] = nd.get(w, 0) + 1
                m = tuple(sorted(nd.items()))
                val = out.get(m, 0) + c * e
                if val:
                    out[m] = val
                else:
                    out.pop(m, None)
        return DiffPoly._raw(out)

    # -- grading -------------------------------------------------
    def weights(self, s_weight: int = 0) -> set:
        """Set of weights of the monomials with weight(q^(j)) = j + 2."""
        ws = set()
        for mono in self._terms:
            ws.add(monomial_weight(mono, s_weight))
        return ws

    def is_homogeneous(self, weight: int, s_weight: int = 0) -> bool:
        return self.weights(s_weight) <= {weight}

    # -- evaluation -------------------------------------------------
    def evaluate_exact(self, point: Mapping[str, object]) -> Fraction:
        """Substitute exact values; floats are converted exactly."""
        vals = {}
        for v in self.variables():
            name = var_name(v)
            if name not in point:
                raise MissingAssignment(f"no value for {name}", variable=name)
            x = point[name]
            vals[v] = Fraction(x) if not isinstance(x, Fraction) else x
        total = Fraction(0)
        for mono, c in self._terms.items():
            term = c
            for v, e in mono:
                term *= vals[v] ** e
            total += term
        return total

    def evaluate(self, point: Mapping[str, object]) -> float:
        return float(self.evaluate_exact(point))

    def compile(self):
        """Vectorised float evaluator: ``f(jet, s, t)``.

        ``jet`` is an array of shape ``(D+1, n)`` (row j holds q^(j)),
        ``s`` an array of length n, and ``t`` a sequence of time values.
        """
        plan = []
        for mono, c in self._terms.items():
            plan.append((float(c), mono))

        def f(jet, s, t=()):
            s = np.asarray(s, dtype=float)
            out = np.zeros_like(s)
            for c, mono in plan:
                term = np.full_like(s, c)
                for (kind, idx), e in mono:
                    if kind == Q:
                        base = jet[idx]
                    elif kind == S:
                        base = s
                    else:
                        if idx > len(t):
                            raise MissingAssignment(f"no value for t{idx}", variable=f"t{idx}")
                        base = t[idx - 1]
                    term = term * (base if e == 1 else base ** e)
                out += term
            return out

        return f

    # -- presentation / serialization ----------------------------------
    def sorted_terms(self):
        """Terms in canonical graded-lex order (highest first)."""
        allvars = self.variables()
        pos = {v: i for i, v in enumerate(allvars)}

        def key(item):
            mono, _ = item
            vec = [0] * len(allvars)
            for v, e in mono:
                vec[pos[v]] = e
            return (sum(vec), vec)

        return sorted(self._terms.items(), key=key, reverse=True)

    def __repr__(self):
        if not self._terms:
            return "DiffPoly(0)"
        return f"DiffPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = [var_name(v) + (f"^{e}" if e > 1 else "") for v, e in mono]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json_obj(self, variables: Iterable[Var] | None = None) -> dict:
        allvars = sorted(set(self.variables()) | set(variables or ()))
        pos = {v: i for i, v in enumerate(allvars)}
        terms = []
        for mono, c in self.sorted_terms():
            exp = [0] * len(allvars)
            for v, e in mono:
                exp[pos[v]] = e
            terms.append({"exp": exp, "num": str(c.numerator), "den": str(c.denominator)})
        return {"vars": [var_name(v) for v in allvars], "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj, where: str = "<document>") -> "DiffPoly":
        try:
            names = obj["vars"]
            vs = [parse_var(n) for n in names]
            terms = {}
            for t in obj["terms"]:
                exp = t["exp"]
                if len(exp) != len(vs) or any(not isinstance(e, int) or e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp!r}")
                mono = tuple((v, e) for v, e in zip(vs, exp) if e)
                if mono in terms:
                    raise ValueError("duplicate monomial")
                c = Fraction(int(t["num"]), int(t["den"]))
                if c == 0:
                    raise ValueError("stored zero coefficient")
                terms[mono] = c
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaViolation(f"{where}: {exc}", path=where) from None
        return cls(terms)

    @classmethod
    def from_json(cls, text: str, where: str = "<document>") -> "DiffPoly":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{where}: {exc}", path=where) from None
        return cls.from_json_obj(obj, where)


def monomial_weight(mono: Monomial, s_weight: int = 0) -> int:
    w = 0
    for (kind, idx), e in mono:
        if kind == Q:
            w += (idx + 2) * e
        elif kind == S:
            w += s_weight * e
    return w


def q(j: int = 0) -> DiffPoly:
    """The j-th s-derivative of q as a DiffPoly."""
    return DiffPoly.var((Q, j))


def t(j: int) -> DiffPoly:
    return DiffPoly.var((T, j))


s = DiffPoly.var((S, 0))


def total_derivative(p: DiffPoly) -> DiffPoly:
    return p.total_derivative()


def partial(p: DiffPoly, v) -> DiffPoly:
    return p.partial(v)


def evaluate(p: DiffPoly, point: Mapping[str, object]) -> float:
    return p.evaluate(point)
