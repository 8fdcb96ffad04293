"""Finite-difference weights and differentiation matrices on uniform grids."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def fornberg_weights(z, x, nd):
    """Weights for derivatives 0..nd at ``z`` using nodes ``x``.

    Returns an array of shape ``(nd + 1, len(x))`` (Fornberg 1988).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((nd + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, nd)
        c2, c5 = 1.0, c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def stencil_width(deriv, order):
    """Points needed for a centred stencil of the given accuracy order."""
    n = deriv + order - 1
    return n if n % 2 else n + 1


def diff_matrix(n, h, deriv, order):
    """Sparse ``n x n`` matrix for the ``deriv``-th derivative on a uniform grid.

    Centred stencils in the interior; near the ends the same number of points
    is used with the window shifted inside the grid.
    """
    if deriv == 0:
        return sp.identity(n, format="csr")
    w = stencil_width(deriv, order)
    if w > n:
        raise ValueError(f"grid of {n} points too small for a {w}-point stencil")
    half = w // 2
    offsets = np.arange(w) - half
    centred = fornberg_weights(0.0, offsets, deriv)[deriv] / h ** deriv
    rows, cols, vals = [], [], []
    for i in range(n):
        lo = min(max(i - half, 0), n - w)
        if lo == i - half:
            wts = centred
        else:
            wts = fornberg_weights(float(i - lo), np.arange(w, dtype=float), deriv)[deriv] / h ** deriv
        rows.extend([i] * w)
        cols.extend(range(lo, lo + w))
        vals.extend(wts)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


# --- extended-precision banded stencils -------------------------------------
#
# The residual of an order-2m ODE on a fine grid loses about eps * h^(-2m) to
# cancellation inside the stencil sums. Weights are therefore computed exactly
# as rationals and applied in long double to a long-double iterate.

def exact_weights(z, x, nd):
    """Rational Fornberg weights; ``z`` and ``x`` are integers or Fractions."""
    z = Fraction(z)
    x = [Fraction(v) for v in x]
    n = len(x)
    c = [[Fraction(0)] * n for _ in range(nd + 1)]
    c1, c4 = Fraction(1), x[0] - z
    c[0][0] = Fraction(1)
    for i in range(1, n):
        mn = min(i, nd)
        c2, c5 = Fraction(1), c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2
            for k in range(mn, 0, -1):
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3
            c[0][j] = c4 * c[0][j] / c3
        c1 = c2
    return c


def _to_longdouble(fr: Fraction) -> np.longdouble:
    return np.longdouble(str(fr.numerator)) / np.longdouble(str(fr.denominator))


@lru_cache(maxsize=None)
def _unit_stencils(deriv, order):
    """Weights at h = 1 for each placement of the node inside the window."""
    w = stencil_width(deriv, order)
    nodes = list(range(w))
    return tuple(tuple(_to_longdouble(v) for v in exact_weights(p, nodes, deriv)[deriv])
                 for p in range(w))


@dataclass(frozen=True)
class BandedStencil:
    """Derivative operator stored as one window of weights per grid node."""

    lo: np.ndarray          # first column of each row's window
    weights: np.ndarray     # (n, w) long double, scaled by h^(-deriv)

    @property
    def n(self):
        return len(self.lo)

    def apply(self, v):
        idx = self.lo[:, None] + np.arange(self.weights.shape[1])
        return (self.weights * np.asarray(v, dtype=np.longdouble)[idx]).sum(axis=1)

    def matrix(self):
        n, w = self.weights.shape
        rows = np.repeat(np.arange(n), w)
        cols = (self.lo[:, None] + np.arange(w)).ravel()
        return sp.csr_matrix((self.weights.astype(float).ravel(), (rows, cols)), shape=(n, n))


def banded_stencil(n, h, deriv, order):
    """Same layout as :func:`diff_matrix`, held in long double."""
    if deriv == 0:
        return BandedStencil(np.arange(n), np.ones((n, 1), dtype=np.longdouble))
    w = stencil_width(deriv, order)
    if w > n:
        raise ValueError(f"grid of {n} points too small for a {w}-point stencil")
    half = w // 2
    i = np.arange(n)
    lo = np.clip(i - half, 0, n - w)
    unit = np.array(_unit_stencils(deriv, order), dtype=np.longdouble)
    scale = np.longdouble(h) ** -deriv
    return BandedStencil(lo, unit[i - lo] * scale)
