"""Inverse nodal reconstruction: nodal limits psi1, psi2 and the coefficient formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .numerics import LimitFit, central_difference, extrapolate_limit
from .problem import PI

GAUGE = "omega_pi=0"
DEFAULT_GRID = 257
SMOOTHING_THRESHOLD = 1e-3
MIN_N_MAX = 40
MIN_PER_PARITY = 10


@dataclass
class NodalData:
    """Nodal sets keyed by positive n."""

    sets: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for n, s in self.sets.items():
            if n < 1:
                raise ValueError("nodal data holds positive n only")
            pts = np.asarray(s.points)
            if len(pts) > 1 and np.any(np.diff(pts) <= 0):
                raise ValueError(f"nodal set n={n} is not strictly increasing")

    @property
    def n_max(self) -> int:
        return max(self.sets)

    @property
    def n_min(self) -> int:
        return min(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def is_dense(self, xs, n0: int) -> bool:
        """Every x has a nodal point within pi/n for every n >= n0."""
        xs = np.asarray(xs, dtype=float)
        for n, s in self.sets.items():
            if n < n0:
                continue
            pts = np.asarray(s.points)
            if len(pts) == 0:
                return False
            k = np.clip(np.searchsorted(pts, xs), 1, len(pts) - 1) if len(pts) > 1 else np.zeros(len(xs), int)
            d = np.minimum(np.abs(pts[k] - xs), np.abs(pts[np.maximum(k - 1, 0)] - xs))
            if np.any(d > PI / n):
                return False
        return True


def _nearest(pts: np.ndarray, x: float) -> int:
    k = int(np.searchsorted(pts, x))
    if k == 0:
        return 0
    if k >= len(pts):
        return len(pts) - 1
    lo, hi = x - pts[k - 1], pts[k] - x
    # ties (up to rounding) go to the lower index
    return k - 1 if lo <= hi + 1e-12 * max(1.0, abs(x)) else k


def select_sequence(data: NodalData, x: float, ns=None):
    """For each n, the index j(n) and point of the nodal point nearest to ``x``.

    Returns arrays ``(n, j, x_nj)``.
    """
    if not data.sets:
        raise ValueError("empty nodal data")
    ns = sorted(data.sets) if ns is None else list(ns)
    js = np.empty(len(ns), dtype=int)
    xs = np.empty(len(ns))
    for i, n in enumerate(ns):
        pts = np.asarray(data.sets[n].points)
        if len(pts) == 0:
            raise ValueError(f"nodal set n={n} is empty")
        js[i] = _nearest(pts, x)
        xs[i] = pts[js[i]]
    return np.asarray(ns), js, xs


def _top_half(data: NodalData) -> list[int]:
    lo = math.ceil(data.n_max / 2)
    return [n for n in sorted(data.sets) if n >= lo]


def _parity_fit(ns: np.ndarray, seq: np.ndarray) -> LimitFit:
    """Average of the even-n and odd-n limit fits.

    The sequences carry (-1)^n terms at O(1/n); fitting each parity separately
    keeps them out of the smooth 1/n model.
    """
    even = ns % 2 == 0
    fits = [extrapolate_limit(ns[sel], seq[sel]) for sel in (even, ~even) if np.count_nonzero(sel) >= 4]
    if not fits:
        return extrapolate_limit(ns, seq)
    if len(fits) == 1:
        return fits[0]
    f0, f1 = fits
    return LimitFit(
        c0=0.5 * (f0.c0 + f1.c0),
        c1=0.5 * (f0.c1 + f1.c1),
        c2=0.5 * (f0.c2 + f1.c2),
        residual_rms=max(f0.residual_rms, f1.residual_rms),
        n_points=f0.n_points + f1.n_points,
    )


def _bracketed_sequence(data: NodalData, x, ns, term) -> np.ndarray:
    """Sequence values ``term(n, j, x_nj)`` carried to each target in ``x``.

    The values at the two bracketing nodal points are linearly interpolated to
    the target; beyond the outermost points the two outermost ones are
    extrapolated, so the sequence stays smooth in n. Returns shape
    ``(len(ns), len(x))``.
    """
    xt = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((len(ns), len(xt)))
    for i, n in enumerate(ns):
        pts = np.asarray(data.sets[int(n)].points)
        if len(pts) < 2:
            raise ValueError(f"nodal set n={n} has fewer than 2 points")
        j0 = np.clip(np.searchsorted(pts, xt) - 1, 0, len(pts) - 2)
        j1 = j0 + 1
        v0 = term(n, j0, pts[j0])
        v1 = term(n, j1, pts[j1])
        w = (xt - pts[j0]) / (pts[j1] - pts[j0])
        out[i] = (1.0 - w) * v0 + w * v1
    return out


def _psi1_term(n, j, x):
    return n * x - (j + 0.5) * PI


def estimate_psi1(
    data: NodalData, x: float, split_parity: bool = True, interpolate: bool = True
) -> tuple[float, LimitFit]:
    """Limit of n (x_n^j(n) - (j(n) + 1/2) pi / n) over the top half of n.

    With ``interpolate=False`` the sequence uses the nearest nodal point only,
    which leaves an O(1/n) sawtooth in x_n^j(n) - x.
    """
    if data.n_max < MIN_N_MAX:
        raise ValueError(f"psi estimation needs n_max >= {MIN_N_MAX}, got {data.n_max}")
    ns = _top_half(data)
    if interpolate:
        ns = np.asarray(ns)
        seq = _bracketed_sequence(data, x, ns, _psi1_term)[:, 0]
    else:
        ns, js, xs = select_sequence(data, x, ns)
        seq = _psi1_term(ns, js, xs)
    fit = _parity_fit(ns, seq) if split_parity else extrapolate_limit(ns, seq)
    return fit.c0, fit


def _psi2_term(psi1, alpha: float, beta: float):
    def term(n, j, xs):
        w_plus_a = psi1(xs) - (beta - alpha) * xs / PI
        jh = j + 0.5
        return n * n * PI * (xs - (jh * PI + w_plus_a) / n + jh * (alpha - beta) / (n * n))

    return term


def estimate_psi2(
    data: NodalData, x: float, psi1, alpha: float, beta: float, interpolate: bool = True
) -> tuple[float, float, LimitFit, LimitFit]:
    """Even-n and odd-n limits of the second-order nodal residual.

    ``psi1`` is a callable; omega(x) + alpha is taken as psi1(x) - (beta - alpha) x / pi.
    """

    term = _psi2_term(psi1, alpha, beta)
    ns = np.asarray(_top_half(data))
    if interpolate:
        seq = _bracketed_sequence(data, x, ns, term)[:, 0]
    else:
        ns, js, xs = select_sequence(data, x, ns)
        seq = term(ns, js, xs)
    even = ns % 2 == 0
    if min(np.count_nonzero(even), np.count_nonzero(~even)) < MIN_PER_PARITY:
        raise ValueError(f"insufficient parity coverage for psi2 (need >= {MIN_PER_PARITY} even and odd n)")
    fp = extrapolate_limit(ns[even], seq[even])
    fm = extrapolate_limit(ns[~even], seq[~even])
    return fp.c0, fm.c0, fp, fm


@dataclass
class PsiEstimate:
    grid: np.ndarray
    psi1: np.ndarray
    psi2_plus: np.ndarray
    psi2_minus: np.ndarray
    fit_residuals: np.ndarray  # psi1 fit residual rms per grid point


def estimate_psi(data: NodalData, grid_size: int = DEFAULT_GRID, interpolate: bool = True) -> PsiEstimate:
    """Two-stage estimate: psi1 (hence alpha, beta) first, then psi2 at both parities."""
    grid = np.linspace(0.0, PI, grid_size)
    if not interpolate:
        psi1 = np.empty(grid_size)
        resid = np.empty(grid_size)
        for i, x in enumerate(grid):
            psi1[i], fit = estimate_psi1(data, x, interpolate=False)
            resid[i] = fit.residual_rms
    else:
        if data.n_max < MIN_N_MAX:
            raise ValueError(f"psi estimation needs n_max >= {MIN_N_MAX}, got {data.n_max}")
        ns = np.asarray(_top_half(data))
        seq = _bracketed_sequence(data, grid, ns, _psi1_term)
        fits = [_parity_fit(ns, seq[:, i]) for i in range(grid_size)]
        psi1 = np.array([f.c0 for f in fits])
        resid = np.array([f.residual_rms for f in fits])
    if not np.all(np.isfinite(psi1)):
        raise ValueError("non-finite psi1 estimate")
    alpha, beta = psi1[0], psi1[-1]
    spline = CubicSpline(grid, psi1)
    if not interpolate:
        p2p = np.empty(grid_size)
        p2m = np.empty(grid_size)
        for i, x in enumerate(grid):
            p2p[i], p2m[i], _, _ = estimate_psi2(data, x, spline, alpha, beta, interpolate=False)
    else:
        term = _psi2_term(spline, alpha, beta)
        seq = _bracketed_sequence(data, grid, ns, term)
        even = ns % 2 == 0
        if min(np.count_nonzero(even), np.count_nonzero(~even)) < MIN_PER_PARITY:
            raise ValueError(f"insufficient parity coverage for psi2 (need >= {MIN_PER_PARITY} even and odd n)")
        p2p = np.array([extrapolate_limit(ns[even], seq[even, i]).c0 for i in range(grid_size)])
        p2m = np.array([extrapolate_limit(ns[~even], seq[~even, i]).c0 for i in range(grid_size)])
    return PsiEstimate(grid, psi1, p2p, p2m, resid)


def moving_average(y: np.ndarray, width: int = 5) -> np.ndarray:
    """Centered moving average; the window shrinks symmetrically at the ends."""
    y = np.asarray(y, dtype=float)
    half = width // 2
    out = np.empty_like(y)
    n = len(y)
    for i in range(n):
        r = min(half, i, n - 1 - i)
        out[i] = y[i - r : i + r + 1].mean()
    return out


def differentiate_psi1(psi1, grid=None, smooth: bool | None = None, fit_residuals=None) -> np.ndarray:
    """Fourth-order finite-difference derivative of psi1 samples on a uniform grid.

    Smoothing (5-point moving average) is applied when requested, or by default
    when any fit residual exceeds 1e-3.
    """
    psi1 = np.asarray(psi1, dtype=float)
    if len(psi1) < 9:
        raise ValueError("differentiation needs >= 9 samples")
    grid = np.linspace(0.0, PI, len(psi1)) if grid is None else np.asarray(grid)
    h = grid[1] - grid[0]
    if smooth is None:
        smooth = fit_residuals is not None and np.max(fit_residuals) > SMOOTHING_THRESHOLD
    y = moving_average(psi1) if smooth else psi1
    d = central_difference(y, h)
    if not np.all(np.isfinite(d)):
        raise ValueError("non-finite derivative samples")
    return d


@dataclass
class ReconstructionResult:
    alpha: float
    beta: float
    grid: np.ndarray
    V: np.ndarray
    Fpi: float
    G0: float
    F0: float | None = None
    Gpi: float | None = None
    m_supplied: float | None = None
    gauge: str = GAUGE
    psi: PsiEstimate | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "alpha": self.alpha,
            "beta": self.beta,
            "Fpi": self.Fpi,
            "G0": self.G0,
        }
        if self.m_supplied is not None:
            d["F0"] = self.F0
            d["Gpi"] = self.Gpi
            d["m"] = self.m_supplied
        d["gauge"] = self.gauge
        d["V"] = [[float(x), float(v)] for x, v in zip(self.grid, self.V)]
        return d


def reconstruct_from_psi(
    grid, psi1, psi2_plus, psi2_minus, m: float | None = None, smooth: bool | None = None, fit_residuals=None
) -> ReconstructionResult:
    """Coefficient formulas applied to psi samples on a uniform grid over [0, pi]."""
    grid = np.asarray(grid, dtype=float)
    psi1 = np.asarray(psi1, dtype=float)
    p2p = np.asarray(psi2_plus, dtype=float)
    p2m = np.asarray(psi2_minus, dtype=float)
    alpha = float(psi1[0])
    beta = float(psi1[-1])
    V = differentiate_psi1(psi1, grid, smooth=smooth, fit_residuals=fit_residuals) + (alpha - beta) / PI
    Fpi = float((p2p[0] - p2m[0]) / (2 * PI))
    G0 = float((p2m[-1] - p2p[-1]) / (2 * PI))
    F0 = Gpi = None
    if m is not None:
        F0 = float((alpha * (beta - alpha) + m * PI * math.sin(2 * alpha) / 2 - (p2p[0] + p2m[0]) / 2) / PI)
        Gpi = float((p2m[-1] + p2p[-1]) / (2 * PI) - alpha * (beta - alpha) / PI - m * math.sin(2 * beta) / 2)
    return ReconstructionResult(alpha, beta, grid, V, Fpi, G0, F0, Gpi, m)


def reconstruct(data: NodalData, m: float | None = None, grid_size: int = DEFAULT_GRID) -> ReconstructionResult:
    """Recover alpha, beta, V, Fpi, G0 (and F0, Gpi when m is given) from nodal data.

    Assumes the source problem satisfies omega(pi) = 0; the result records it.
    """
    est = estimate_psi(data, grid_size)
    res = reconstruct_from_psi(
        est.grid, est.psi1, est.psi2_plus, est.psi2_minus, m, fit_residuals=est.fit_residuals
    )
    res.psi = est
    return res
