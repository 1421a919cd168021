"""Root finding on (0, 1) for the per-group normal equations."""
from __future__ import annotations

import logging
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq, minimize_scalar

logger = logging.getLogger(__name__)

EPS = 1e-10
_IMAG_TOL = 1e-8
_POLISH_STEPS = 8


def unit_interval_roots(poly: Polynomial) -> list[float]:
    """Real roots of *poly* strictly inside (0, 1), Newton-polished.

    A vanishing leading coefficient simply lowers the degree.
    """
    coef = np.asarray(poly.coef, dtype=float)
    scale = float(np.max(np.abs(coef))) if coef.size else 0.0
    if scale == 0.0:
        return []
    poly = Polynomial(coef).trim(tol=scale * 1e-14)
    if poly.degree() < 1:
        return []

    deriv = poly.deriv()
    found: list[float] = []
    for z in poly.roots():
        if abs(z.imag) > _IMAG_TOL * max(1.0, abs(z)):
            continue
        x = _polish(poly, deriv, float(z.real), scale)
        if 0.0 < x < 1.0:
            found.append(x)
    return _dedupe(found)


def _polish(poly: Polynomial, deriv: Polynomial, x: float, scale: float) -> float:
    fx = poly(x)
    for _ in range(_POLISH_STEPS):
        if abs(fx) <= 1e-12 * scale:
            break
        slope = deriv(x)
        if slope == 0.0:
            break
        trial = x - fx / slope
        f_trial = poly(trial)
        if abs(f_trial) >= abs(fx):
            break
        x, fx = trial, f_trial
    return x


def _dedupe(values: list[float], tol: float = 1e-10) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def bracketed_roots(
    func: Callable[[np.ndarray], np.ndarray],
    lo: float = EPS,
    hi: float = 1.0 - EPS,
    n_grid: int = 129,
) -> list[float]:
    """Roots of a vectorised function located by sign changes on a grid.

    The grid is uniform in the logit scale so both tails are resolved.
    Each bracket is refined with Brent's method. Where |f| dips between two
    samples of the same sign, the dip is minimised and, if it crosses zero,
    split into two brackets so a close pair of roots is not lost.
    """
    t = np.linspace(np.log(lo / (1.0 - lo)), np.log(hi / (1.0 - hi)), n_grid)
    grid = 1.0 / (1.0 + np.exp(-t))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = np.asarray(func(grid), dtype=float)

    def scalar(x: float) -> float:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return float(func(np.asarray(x)))

    def refine(a: float, b: float) -> float:
        return brentq(scalar, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    roots: list[float] = []
    for k in range(n_grid - 1):
        a, b = values[k], values[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(grid[k]))
        elif a * b < 0.0:
            roots.append(refine(grid[k], grid[k + 1]))
    if np.isfinite(values[-1]) and values[-1] == 0.0:
        roots.append(float(grid[-1]))

    for k in range(1, n_grid - 1):
        left, mid, right = values[k - 1], values[k], values[k + 1]
        if not (np.isfinite(left) and np.isfinite(mid) and np.isfinite(right)):
            continue
        if mid == 0.0 or left * mid <= 0.0 or mid * right <= 0.0:
            continue
        if abs(mid) > abs(left) or abs(mid) > abs(right):
            continue
        sign = np.sign(mid)
        dip = minimize_scalar(
            lambda x: sign * scalar(x),
            bounds=(grid[k - 1], grid[k + 1]),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if not np.isfinite(dip.fun) or dip.fun >= 0.0:
            continue
        x_min = float(dip.x)
        roots.append(refine(grid[k - 1], x_min))
        roots.append(refine(x_min, grid[k + 1]))
    return _dedupe(roots)
