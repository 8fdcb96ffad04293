"""Lenard-Magri recursion, the P_I^m equations and the KdV flows."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from pilab.diffpoly.ring import Q, S, T, DiffPoly, Monomial, monomial_weight, q, s, t
from pilab.errors import NotATotalDerivative, OddOrderRequested


def apply_lenard_operator(p: DiffPoly) -> DiffPoly:
    """(1/4) D^3 p - 2 q D p - q_s p, with D the total s-derivative."""
    d1 = p.total_derivative()
    d3 = d1.total_derivative().total_derivative()
    return d3 * Fraction(1, 4) - 2 * q(0) * d1 - q(1) * p


def _q_monomials(weight: int, max_order: int, _memo={}) -> List[Monomial]:
    # all products of q^(0..max_order) with total weight `weight` (q^(j) weighs j+2)
    key = (weight, max_order)
    if key in _memo:
        return _memo[key]
    if weight == 0:
        res = [()]
    elif weight < 2 or max_order < 0:
        res = []
    else:
        res = []
        part = max_order + 2
        for e in range(1, weight // part + 1):
            for rest in _q_monomials(weight - e * part, max_order - 1):
                res.append(tuple(sorted(rest + (((Q, max_order), e),))))
        res.extend(_q_monomials(weight, max_order - 1))
    _memo[key] = res
    return res


def _split(mono: Monomial) -> Tuple[Monomial, Monomial]:
    tpart = tuple(x for x in mono if x[0][0] == T)
    rest = tuple(x for x in mono if x[0][0] != T)
    return tpart, rest


def _solve_exact(columns: List[DiffPoly], rhs: DiffPoly) -> List[Fraction] | None:
    """Exact solution of sum_i x_i columns[i] = rhs, or None if inconsistent."""
    rows: Dict[Monomial, int] = {}
    for p in columns + [rhs]:
        for mono, _ in p.items():
            rows.setdefault(mono, len(rows))
    ncol = len(columns)
    mat = [[QQ(0)] * (ncol + 1) for _ in rows]
    for j, p in enumerate(columns + [rhs]):
        for mono, c in p.items():
            mat[rows[mono]][j] = QQ(c.numerator, c.denominator)
    dm = DomainMatrix(mat, (len(rows), ncol + 1), QQ)
    red, pivots = dm.rref()
    if ncol in pivots:
        return None
    red = red.to_Matrix()
    x = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        v = red[i, ncol]
        x[c] = Fraction(int(v.p), int(v.q))
    return x


def integrate_total_derivative(p: DiffPoly) -> DiffPoly:
    """Return P with D P = p and no constant term.

    The problem is split into blocks by t-monomial and by weight (q^(j) weighs
    j+2, s weighs -1, so D raises weight by exactly one). Each block is a
    small exact linear system over the finite monomial basis of the preimage.
    """
    blocks: Dict[Tuple[Monomial, int], Dict[Monomial, Fraction]] = defaultdict(dict)
    for mono, c in p.items():
        tpart, rest = _split(mono)
        blocks[(tpart, monomial_weight(rest, s_weight=-1))][rest] = c

    result = DiffPoly()
    for (tpart, w), terms in sorted(blocks.items()):
        block = DiffPoly(terms)
        tfac = DiffPoly({tpart: 1})
        order = block.max_derivative_order
        if order < 0:
            # pure polynomial in s
            prim = DiffPoly()
            for mono, c in block.items():
                e = dict(mono).get((S, 0), 0)
                prim = prim + DiffPoly({(((S, 0), e + 1),): c / (e + 1)})
            result = result + tfac * prim
            continue
        smax = max(dict(m).get((S, 0), 0) for m in terms) + 1
        basis = []
        for a in range(smax + 1):
            for qm in _q_monomials(w - 1 + a, order - 1):
                if a == 0 and not qm:
                    continue
                mono = tuple(sorted(qm + ((((S, 0), a),) if a else ())))
                basis.append(DiffPoly({mono: 1}))
        x = _solve_exact([b.total_derivative() for b in basis], block) if basis else None
        if x is None:
            raise NotATotalDerivative(
                f"weight-{w} block {block} has no polynomial preimage", weight=w)
        prim = DiffPoly()
        for xi, b in zip(x, basis):
            if xi:
                prim = prim + b * xi
        result = result + tfac * prim
    return result


@lru_cache(maxsize=None)
def _lenard(k: int) -> DiffPoly:
    if k == 0:
        return -4 * q(0)
    return integrate_total_derivative(apply_lenard_operator(_lenard(k - 1)))


def lenard_sequence(k_max: int) -> List[DiffPoly]:
    """[L_0, ..., L_kmax] with L_0 = -4q and L_k(0) = 0."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return [_lenard(k) for k in range(k_max + 1)]


def lenard(k: int) -> DiffPoly:
    """L_k, with the convention L_{-1} = 4."""
    if k == -1:
        return DiffPoly.const(4)
    if k < -1:
        raise ValueError("L_k is defined for k >= -1")
    return _lenard(k)


@dataclass(frozen=True)
class HierarchyEquation:
    m: int
    canonical: DiffPoly
    paper_normalized: DiffPoly
    lenard_terms: Tuple[DiffPoly, ...]

    @property
    def order(self) -> int:
        return 2 * self.m

    def to_json_obj(self) -> dict:
        f = normalization_factor(self.m)
        return {"m": self.m,
                "normalization": {"num": str(f), "den": "1"},
                "canonical": self.canonical.to_json_obj(),
                "paper_normalized": self.paper_normalized.to_json_obj()}


def normalization_factor(m: int) -> int:
    return 4 ** (m - 1) if m >= 1 else 1


def generate_equation(m: int, with_times: bool = True,
                      allow_odd: bool = False) -> HierarchyEquation:
    """s + L_m + sum_{j=1}^{m-1} t_j L_{j-1} = 0.

    Odd m have no real pole-free solutions; they are only produced when
    ``allow_odd`` is set (fixture checks use it).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m % 2 and not allow_odd:
        raise OddOrderRequested(f"m={m} is odd; pass allow_odd to generate it", m=m)
    ls = lenard_sequence(m)
    eq = s + ls[m]
    if with_times:
        for j in range(1, m):
            eq = eq + t(j) * ls[j - 1]
    return HierarchyEquation(m, eq, eq * normalization_factor(m), tuple(ls))


@dataclass(frozen=True)
class FlowEquation:
    k: int
    rhs: DiffPoly


def generate_kdv_flow(k: int) -> FlowEquation:
    """q_{t_k} = -(1/(2k+1)) d/ds L_k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return FlowEquation(k, lenard(k).total_derivative() * Fraction(-1, 2 * k + 1))
