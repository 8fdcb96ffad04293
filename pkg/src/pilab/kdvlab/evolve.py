"""Fourier pseudospectral KdV, u_t + 6 u u_x + eps^2 u_xxx = 0, with ETDRK4 stepping.

The stiff dispersive term is propagated exactly in Fourier space; the
nonlinear flux 3 (u^2)_x is evaluated with the 2/3 rule. The phi-function
coefficients are computed by contour integrals (Kassam & Trefethen 2005).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from pilab.errors import Blowup, ConfigInvalid, ResolutionInsufficient
from pilab.kdvlab.initial import InitialDataSpec

log = logging.getLogger(__name__)

TAIL_THRESHOLD = 1e-10
N_CONTOUR = 32


@dataclass(frozen=True)
class KdVField:
    L: float
    N: int
    eps: float
    t: float
    values: np.ndarray
    spectrum: np.ndarray = field(repr=False, compare=False)   # rfft of values
    tail_ratio: float = 0.0
    steps: int = 0

    @property
    def x(self) -> np.ndarray:
        return -self.L + 2 * self.L * np.arange(self.N) / self.N

    def mass(self) -> float:
        return float(self.spectrum[0].real) * 2 * self.L / self.N

    def at(self, x) -> np.ndarray:
        """Trigonometric interpolant evaluated at arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        kk = np.arange(len(self.spectrum))
        phase = np.exp(1j * np.pi / self.L * np.outer(x + self.L, kk))
        w = np.full(len(kk), 2.0)
        w[0] = 1.0
        if self.N % 2 == 0:
            w[-1] = 1.0
        return (phase @ (w * self.spectrum)).real / self.N


def _wavenumbers(L, N):
    return np.pi / L * np.arange(N // 2 + 1)


def _dealias_mask(N):
    kk = np.arange(N // 2 + 1)
    return kk < (2.0 / 3.0) * (N // 2)


def _etd_coefficients(lin, dt):
    """E, E2, Q, f1, f2, f3 for ETDRK4 with diagonal linear part ``lin``."""
    E = np.exp(dt * lin)
    E2 = np.exp(dt * lin / 2)
    # full circle: the linear symbol is imaginary, so no real-part shortcut
    r = np.exp(2j * np.pi * (np.arange(1, N_CONTOUR + 1) - 0.5) / N_CONTOUR)
    LR = dt * lin[:, None] + r[None, :]
    Q = dt * np.mean((np.exp(LR / 2) - 1) / LR, axis=1)
    f1 = dt * np.mean((-4 - LR + np.exp(LR) * (4 - 3 * LR + LR ** 2)) / LR ** 3, axis=1)
    f2 = dt * np.mean((2 + LR + np.exp(LR) * (-2 + LR)) / LR ** 3, axis=1)
    f3 = dt * np.mean((-4 - 3 * LR - LR ** 2 + np.exp(LR) * (4 - LR)) / LR ** 3, axis=1)
    return E, E2, Q, f1, f2, f3


def tail_ratio(spectrum: np.ndarray, N: int) -> float:
    """Energy in the last retained octave over total energy."""
    kmax = int((2.0 / 3.0) * (N // 2))
    e = np.abs(spectrum[:kmax]) ** 2
    tot = e.sum()
    return float(e[kmax // 2:].sum() / tot) if tot > 0 else 0.0


def default_dt(data_max: float, L: float, N: int, cfl: float = 0.5) -> float:
    dx = 2 * L / N
    return cfl * dx / (6 * max(data_max, 1e-12))


def kdv_evolve_many(data: InitialDataSpec | np.ndarray, eps: float, times: Sequence[float],
                    L: float | None = None, N: int = 4096, dt: float | None = None,
                    tail_threshold: float = TAIL_THRESHOLD, check_tail: bool = True) -> List[KdVField]:
    """Fields at each of the (non-decreasing, non-negative) ``times``."""
    if N < 16 or N & (N - 1):
        raise ConfigInvalid(f"N must be a power of two, got {N}")
    if not eps > 0:
        raise ConfigInvalid("eps must be positive")
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise ConfigInvalid("times must be non-negative and sorted")
    if isinstance(data, InitialDataSpec):
        L = data.L if L is None else L
    elif L is None:
        raise ConfigInvalid("L is required when data is an array")
    x = -L + 2 * L * np.arange(N) / N
    u0 = data.u0(x) if isinstance(data, InitialDataSpec) else np.asarray(data, dtype=float)

    k = _wavenumbers(L, N)
    mask = _dealias_mask(N)
    lin = 1j * eps ** 2 * k ** 3          # u_t = -eps^2 u_xxx
    g = -3j * k * mask                   # -3 (u^2)_x
    v = np.fft.rfft(u0) * mask
    if dt is None:
        dt = default_dt(float(np.abs(u0).max()), L, N)
    if not dt > 0:
        raise ConfigInvalid("dt must be positive")

    def nonlin(vh):
        u = np.fft.irfft(vh, n=N)
        return g * np.fft.rfft(u * u)

    coeff_cache = {}
    out, t, steps = [], 0.0, 0
    for target in times:
        span = target - t
        n = int(math.ceil(span / dt - 1e-12)) if span > 0 else 0
        if n:
            h = span / n
            key = round(h, 15)
            if key not in coeff_cache:
                coeff_cache[key] = _etd_coefficients(lin, h)
            E, E2, Q, f1, f2, f3 = coeff_cache[key]
            for i in range(n):
                Nv = nonlin(v)
                a = E2 * v + Q * Nv
                Na = nonlin(a)
                b = E2 * v + Q * Na
                Nb = nonlin(b)
                c = E2 * a + Q * (2 * Nb - Nv)
                Nc = nonlin(c)
                v = E * v + Nv * f1 + 2 * (Na + Nb) * f2 + Nc * f3
                steps += 1
                if not np.isfinite(v[1]) or (steps % 50 == 0 and not np.all(np.isfinite(v))):
                    raise Blowup(f"non-finite field at t={t + (i + 1) * h:.6g}",
                                 t=t + (i + 1) * h, steps=steps)
        if not np.all(np.isfinite(v)):
            raise Blowup(f"non-finite field at t={target:.6g}", t=target)
        t = target
        ratio = tail_ratio(v, N)
        if check_tail and ratio > tail_threshold:
            raise ResolutionInsufficient(
                f"last-octave energy fraction {ratio:.2e} exceeds {tail_threshold:.0e} at t={t:.6g}",
                tail_ratio=ratio, t=t, N=N)
        out.append(KdVField(L, N, eps, t, np.fft.irfft(v, n=N), v.copy(), ratio, steps))
    return out


def kdv_evolve(data, eps: float, t_end: float, L: float | None = None, N: int = 4096,
               dt: float | None = None, **kw) -> KdVField:
    return kdv_evolve_many(data, eps, [t_end], L=L, N=N, dt=dt, **kw)[0]
