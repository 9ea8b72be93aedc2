"""Numerical kernel: fixed-step RK4, bracketed roots, Simpson, 1/n extrapolation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

PI = math.pi


class ConvergenceError(RuntimeError):
    """An iterative method failed to converge."""


class IntegrationError(RuntimeError):
    """Non-finite state during ODE integration."""


@dataclass(frozen=True)
class Grid:
    """Uniform partition of [0, pi]."""

    n_intervals: int = 4096

    def __post_init__(self) -> None:
        if int(self.n_intervals) != self.n_intervals or self.n_intervals < 1:
            raise ValueError(f"n_intervals must be a positive integer, got {self.n_intervals}")
        object.__setattr__(self, "n_intervals", int(self.n_intervals))

    @property
    def h(self) -> float:
        return PI / self.n_intervals

    @property
    def nodes(self) -> np.ndarray:
        x = np.linspace(0.0, PI, self.n_intervals + 1)
        x[-1] = PI
        return x


def integrate_ode(rhs: Callable[[float, np.ndarray], np.ndarray], y0, grid: Grid) -> np.ndarray:
    """Classical RK4 on the grid nodes. Returns an array of shape (n+1, dim)."""
    y = np.array(y0, dtype=float)
    x = grid.nodes
    h = grid.h
    out = np.empty((len(x),) + y.shape)
    out[0] = y
    for k in range(grid.n_intervals):
        xk = x[k]
        k1 = rhs(xk, y)
        k2 = rhs(xk + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(xk + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(xk + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at x={x[k + 1]:.6g}")
        out[k + 1] = y
    return out


def refine_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float | None = None,
    fb: float | None = None,
    max_iter: int = 200,
) -> float:
    """Root of ``f`` in [a, b] by bisection with secant (Illinois) steps.

    Converges to within ``|b - a| * 1e-12 + 1e-12``.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    lo, hi, flo, fhi = (a, b, fa, fb) if a <= b else (b, a, fb, fa)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{a}, {b}]: f(a)={flo}, f(b)={fhi}")
    tol = (hi - lo) * 1e-12 + 1e-12
    last = 0
    width_before = hi - lo
    for it in range(max_iter):
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        c = (lo * fhi - hi * flo) / (fhi - flo)
        # every third step must have halved the bracket, else bisect
        if it % 3 == 2:
            if hi - lo > 0.5 * width_before:
                c = 0.5 * (lo + hi)
            width_before = hi - lo
        if not lo < c < hi:
            c = 0.5 * (lo + hi)
        fc = f(c)
        if fc == 0.0:
            return c
        if (fc > 0) == (flo > 0):
            lo, flo = c, fc
            if last == -1:
                fhi *= 0.5
            last = -1
        else:
            hi, fhi = c, fc
            if last == 1:
                flo *= 0.5
            last = 1
    raise ConvergenceError(f"refine_root: no convergence after {max_iter} iterations")


def simpson_weights(n_intervals: int, h: float) -> np.ndarray:
    if n_intervals % 2:
        raise ValueError("composite Simpson needs an even number of intervals")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def quadrature(f: Callable, a: float = 0.0, b: float = PI, n_intervals: int = 4096) -> float:
    """Composite Simpson with ``n_intervals`` (even) sub-intervals on [a, b]."""
    if not (0.0 - 1e-12 <= a <= b <= PI + 1e-12):
        raise ValueError(f"quadrature needs 0 <= a <= b <= pi, got [{a}, {b}]")
    if a == b:
        return 0.0
    x = np.linspace(a, b, n_intervals + 1)
    y = np.asarray(f(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite integrand sample")
    return float(simpson_weights(n_intervals, (b - a) / n_intervals) @ y)


def simpson_samples(y: np.ndarray, h: float) -> float:
    """Simpson rule on equally spaced samples (even number of intervals)."""
    return float(simpson_weights(len(y) - 1, h) @ y)


@dataclass(frozen=True)
class LimitFit:
    c0: float
    c1: float
    c2: float
    residual_rms: float
    n_points: int


def extrapolate_limit(n, a) -> LimitFit:
    """Least-squares fit ``a_n ~ c0 + c1/n + c2/n^2``; ``c0`` is the limit."""
    n = np.asarray(n, dtype=float)
    a = np.asarray(a, dtype=float)
    if n.shape != a.shape or n.ndim != 1:
        raise ValueError("n and a must be 1-D arrays of equal length")
    if len(n) < 4:
        raise ValueError(f"extrapolate_limit needs >= 4 points, got {len(n)}")
    if np.any(n < 1):
        raise ValueError("sequence indices must be >= 1")
    if len(np.unique(n)) < 3:
        raise ValueError("degenerate design matrix: fewer than 3 distinct n")
    # scaled abscissa keeps the columns O(1)
    n_ref = float(n.min())
    t = n_ref / n
    design = np.column_stack([np.ones_like(t), t, t * t])
    coef, *_ = np.linalg.lstsq(design, a, rcond=None)
    resid = a - design @ coef
    return LimitFit(
        c0=float(coef[0]),
        c1=float(coef[1] * n_ref),
        c2=float(coef[2] * n_ref**2),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_points=len(n),
    )


def hermite_eval(x0: float, h: float, y0: float, y1: float, d0: float, d1: float, x: float) -> float:
    """Cubic Hermite interpolant on [x0, x0+h]."""
    t = (x - x0) / h
    t2 = t * t
    t3 = t2 * t
    return (
        (2 * t3 - 3 * t2 + 1) * y0
        + (t3 - 2 * t2 + t) * h * d0
        + (-2 * t3 + 3 * t2) * y1
        + (t3 - t2) * h * d1
    )


def central_difference(y: Sequence[float], h: float) -> np.ndarray:
    """Fourth-order derivative on equally spaced samples (>= 5 points)."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 5:
        raise ValueError("need at least 5 samples for fourth-order differences")
    d = np.empty(n)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
    d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
    d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * h)
    return d
