"""The 12-entry beta(zeta) of the zeta-part of the Lax pair, and the
identities its compatibility equation imposes on the Lenard terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from pilab.diffpoly.hierarchy import generate_equation, lenard
from pilab.diffpoly.ring import DiffPoly, q, t


@dataclass(frozen=True)
class LaxPolynomial:
    m: int
    t: Tuple[object, ...]
    coeffs_in_zeta: Tuple[DiffPoly, ...]  # index j <-> zeta^j

    @property
    def degree(self) -> int:
        return len(self.coeffs_in_zeta) - 1


def _as_poly(x) -> DiffPoly:
    return x if isinstance(x, DiffPoly) else DiffPoly.const(x)


def assemble_beta(m: int, tvals: Sequence) -> LaxPolynomial:
    """beta = beta^(m+1) + sum_k t_k beta^(k), beta^(k) = sum_j L_{k-j-2}/2 zeta^j.

    ``tvals`` may hold rationals or DiffPolys (e.g. symbolic ``t(j)``).
    """
    if m < 2 or m % 2:
        raise ValueError("assemble_beta needs an even m >= 2")
    if len(tvals) != m - 1:
        raise ValueError(f"expected {m - 1} time values, got {len(tvals)}")
    coeffs = [DiffPoly() for _ in range(m + 1)]
    for j in range(m + 1):
        coeffs[j] = coeffs[j] + lenard(m - 1 - j) * Fraction(1, 2)
    for k in range(1, m):
        tk = _as_poly(tvals[k - 1])
        for j in range(k):
            coeffs[j] = coeffs[j] + tk * lenard(k - j - 2) * Fraction(1, 2)
    return LaxPolynomial(m, tuple(tvals), tuple(coeffs))


def compatibility_coefficients(beta: LaxPolynomial) -> List[DiffPoly]:
    """zeta-coefficients of (1/2) b_sss - 2 b_s (zeta + 2q) - 2 q_s b + 1."""
    b = beta.coeffs_in_zeta
    n = len(b)
    out = [DiffPoly() for _ in range(n + 1)]
    out[0] = out[0] + 1
    for j, bj in enumerate(b):
        d1 = bj.total_derivative()
        d3 = d1.total_derivative().total_derivative()
        out[j] = out[j] + d3 * Fraction(1, 2) - 4 * q(0) * d1 - 2 * q(1) * bj
        out[j + 1] = out[j + 1] - 2 * d1
    return out


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    residual_terms: int = 0


@dataclass
class LaxReport:
    m: int
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> List[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  m={self.m}  {c.name}" for c in self.checks]


def _check(name: str, residual: DiffPoly) -> IdentityCheck:
    return IdentityCheck(name, residual.is_zero(), len(residual))


def verify_lax_identities(m: int) -> LaxReport:
    """Check the per-degree identities of the beta equation with exact arithmetic.

    Failures are reported, never raised.
    """
    report = LaxReport(m)
    for j in range(1, m):
        a, b = lenard(m - j - 1), lenard(m - j)
        da = a.total_derivative()
        res = (da.total_derivative().total_derivative() * Fraction(1, 2)
               - 2 * b.total_derivative() - 4 * q(0) * da - 2 * q(1) * a)
        report.checks.append(_check(f"degree-{j} Lenard identity", res))

    beta = assemble_beta(m, [t(j) for j in range(1, m)])
    report.checks.append(_check("top zeta coefficient equals 2", beta.coeffs_in_zeta[-1] - 2))
    coeffs = compatibility_coefficients(beta)
    report.checks.append(_check(f"zeta^{m + 1} coefficient vanishes", coeffs[m + 1]))
    report.checks.append(_check(f"zeta^{m} coefficient vanishes", coeffs[m]))
    for j in range(1, m):
        report.checks.append(_check(f"zeta^{j} coefficient vanishes", coeffs[j]))
    canonical = generate_equation(m).canonical
    report.checks.append(_check("zeta^0 coefficient equals d/ds of the equation",
                                coeffs[0] - canonical.total_derivative()))
    return report
