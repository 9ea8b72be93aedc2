"""Shooting solver: fundamental solutions, characteristic function, spectrum, nodal points."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from .numerics import ConvergenceError, Grid, IntegrationError, hermite_eval, refine_root
from .problem import PI, DiracProblem

BASE_INTERVALS = 4096
# bound on |lambda| * h; RK4 relative frequency error is (lambda h)^4 / 120 <= 2e-10
MAX_PHASE_STEP = 0.0125
SCAN_HALF_WIDTH = 0.45
SCAN_STEP = 0.02


def thread_count() -> int:
    env = os.environ.get("DIRAC_NODAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _pmap(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@numba.njit(cache=True, nogil=True)
def _rhs(i, s, coef, m, lam, out):
    V = coef[0, i]
    a = V - m - lam
    b = lam - V - m
    out[0] = a * s[1]
    out[1] = b * s[0]
    out[2] = a * s[3]
    out[3] = b * s[2]
    out[4] = coef[1, i] * s[0] + coef[2, i] * s[1]
    out[5] = coef[3, i] * s[0] + coef[4, i] * s[1]
    out[6] = coef[1, i] * s[2] + coef[2, i] * s[3]
    out[7] = coef[3, i] * s[2] + coef[4, i] * s[3]


@numba.njit(cache=True, nogil=True)
def _shoot(coef, m, lam, h, n, store):
    # state: C1, C2, S1, S2, int f.C, int g.C, int f.S, int g.S
    traj = np.empty((n + 1 if store else 1, 8))
    s = np.zeros(8)
    s[0] = 1.0
    s[3] = -1.0
    traj[0] = s
    k1 = np.empty(8)
    k2 = np.empty(8)
    k3 = np.empty(8)
    k4 = np.empty(8)
    tmp = np.empty(8)
    for k in range(n):
        i = 2 * k
        _rhs(i, s, coef, m, lam, k1)
        for c in range(8):
            tmp[c] = s[c] + 0.5 * h * k1[c]
        _rhs(i + 1, tmp, coef, m, lam, k2)
        for c in range(8):
            tmp[c] = s[c] + 0.5 * h * k2[c]
        _rhs(i + 1, tmp, coef, m, lam, k3)
        for c in range(8):
            tmp[c] = s[c] + h * k3[c]
        _rhs(i + 2, tmp, coef, m, lam, k4)
        for c in range(8):
            s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
        if store:
            traj[k + 1] = s
    if not store:
        traj[0] = s
    return traj


@lru_cache(maxsize=64)
def _coefficients(problem: DiracProblem, n_intervals: int) -> np.ndarray:
    """V, f1, f2, g1, g2 sampled on the half-step grid (2n+1 points)."""
    x = np.linspace(0.0, PI, 2 * n_intervals + 1)
    x[-1] = PI
    rows = [problem.V, problem.f1, problem.f2, problem.g1, problem.g2]
    coef = np.vstack([np.asarray(f(x), dtype=float) * np.ones_like(x) for f in rows])
    coef.setflags(write=False)
    return coef


@lru_cache(maxsize=64)
def _v_sup(problem: DiracProblem) -> float:
    return float(np.max(np.abs(_coefficients(problem, BASE_INTERVALS)[0])))


def grid_for(problem: DiracProblem, lam: float, base: int = BASE_INTERVALS) -> Grid:
    """Smallest base * 2^k grid keeping the local phase step below MAX_PHASE_STEP."""
    kappa = abs(lam) + abs(problem.m) + _v_sup(problem)
    n = base
    while kappa * PI / n > MAX_PHASE_STEP:
        n *= 2
    return Grid(n)


def _run(problem: DiracProblem, lam: float, grid: Grid, store: bool) -> np.ndarray:
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    coef = _coefficients(problem, grid.n_intervals)
    traj = _shoot(coef, problem.m, float(lam), grid.h, grid.n_intervals, store)
    if not np.all(np.isfinite(traj[-1])):
        raise IntegrationError(f"non-finite state while shooting at lambda={lam}")
    return traj


@dataclass(frozen=True)
class FundamentalPair:
    lam: float
    grid: Grid
    C: np.ndarray  # (n+1, 2) trajectory of C(x, lambda)
    S: np.ndarray  # (n+1, 2) trajectory of S(x, lambda)
    If_C: float
    Ig_C: float
    If_S: float
    Ig_S: float
    V_nodes: np.ndarray = field(repr=False)
    m: float = 0.0


def fundamental_pair(problem: DiracProblem, lam: float, grid: Grid | None = None) -> FundamentalPair:
    """Integrate C and S together with the four nonlocal accumulators."""
    grid = grid or grid_for(problem, lam)
    traj = _run(problem, lam, grid, store=True)
    coef = _coefficients(problem, grid.n_intervals)
    end = traj[-1]
    return FundamentalPair(
        lam=float(lam),
        grid=grid,
        C=traj[:, 0:2].copy(),
        S=traj[:, 2:4].copy(),
        If_C=float(end[4]),
        Ig_C=float(end[5]),
        If_S=float(end[6]),
        Ig_S=float(end[7]),
        V_nodes=coef[0, ::2].copy(),
        m=problem.m,
    )


def boundary_U(problem: DiracProblem, pair: FundamentalPair) -> tuple[float, float]:
    sa, ca = math.sin(problem.alpha), math.cos(problem.alpha)
    uc = pair.C[0, 0] * sa + pair.C[0, 1] * ca - pair.If_C
    us = pair.S[0, 0] * sa + pair.S[0, 1] * ca - pair.If_S
    return float(uc), float(us)


def boundary_V(problem: DiracProblem, pair: FundamentalPair) -> tuple[float, float]:
    sb, cb = math.sin(problem.beta), math.cos(problem.beta)
    vc = pair.C[-1, 0] * sb + pair.C[-1, 1] * cb - pair.Ig_C
    vs = pair.S[-1, 0] * sb + pair.S[-1, 1] * cb - pair.Ig_S
    return float(vc), float(vs)


def _delta_from_end(problem: DiracProblem, end: np.ndarray) -> float:
    sa, ca = math.sin(problem.alpha), math.cos(problem.alpha)
    sb, cb = math.sin(problem.beta), math.cos(problem.beta)
    # initial data C(0) = (1, 0), S(0) = (0, -1)
    uc = sa - end[4]
    us = -ca - end[6]
    vc = end[0] * sb + end[1] * cb - end[5]
    vs = end[2] * sb + end[3] * cb - end[7]
    return float(uc * vs - us * vc)


def characteristic(problem: DiracProblem, lam: float, grid: Grid | None = None) -> float:
    """Delta(lambda) = U(C) V(S) - U(S) V(C)."""
    grid = grid or grid_for(problem, lam)
    end = _run(problem, lam, grid, store=False)[0]
    return _delta_from_end(problem, end)


# -- spectrum -----------------------------------------------------------------


@dataclass
class Spectrum:
    n_min: int
    n_max: int
    entries: dict[int, float] = field(default_factory=dict)
    residuals: dict[int, float] = field(default_factory=dict)
    scales: dict[int, float] = field(default_factory=dict)
    missing: list[int] = field(default_factory=list)
    unindexed: list[tuple[int, float]] = field(default_factory=list)
    duplicates: list[tuple[int, int]] = field(default_factory=list)
    # RK4 intervals used per index; nodal extraction must reuse them so the
    # discretization error of lambda_n and of phi1 cancel
    grids: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, n: int) -> float:
        return self.entries[n]

    def __contains__(self, n: int) -> bool:
        return n in self.entries

    @property
    def indices(self) -> list[int]:
        return sorted(self.entries)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        idx = self.indices
        return np.array(idx), np.array([self.entries[n] for n in idx])


def predicted_eigenvalue(problem: DiracProblem, n: int) -> float:
    from .asymptotics import eigenvalue_asymptotic
    from .problem import derived_constants

    c = derived_constants(problem)
    if n == 0:
        return (c.omega_pi + problem.alpha - problem.beta) / PI
    return eigenvalue_asymptotic(c, problem.alpha, problem.beta, n)


def _search_index(problem: DiracProblem, n: int, base: int):
    center = predicted_eigenvalue(problem, n)
    k = int(round(2 * SCAN_HALF_WIDTH / SCAN_STEP))
    lams = center - SCAN_HALF_WIDTH + SCAN_STEP * np.arange(k + 1)
    grid = grid_for(problem, max(abs(lams[0]), abs(lams[-1])), base)
    f = lambda lam: characteristic(problem, lam, grid)  # noqa: E731
    vals = np.array([f(lam) for lam in lams])
    scale = float(np.max(np.abs(vals)))
    roots = []
    for i in range(k):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(lams[i]))
        elif a * b < 0:
            roots.append(refine_root(f, lams[i], lams[i + 1], a, b))
    if vals[-1] == 0.0:
        roots.append(float(lams[-1]))
    residuals = [abs(f(r)) for r in roots]
    return n, center, roots, residuals, scale, grid.n_intervals


def eigenvalues(
    problem: DiracProblem, n_window: tuple[int, int], base_intervals: int = BASE_INTERVALS
) -> Spectrum:
    """Real eigenvalues indexed against the asymptotic predictions.

    Each index n is searched in ``predicted +- 0.45``; the root nearest the
    prediction is kept. Indices without a sign change land in ``missing``;
    extra roots in ``unindexed``.
    """
    n_min, n_max = int(n_window[0]), int(n_window[1])
    if n_min > n_max:
        raise ValueError(f"empty index window [{n_min}, {n_max}]")
    results = _pmap(lambda n: _search_index(problem, n, base_intervals), range(n_min, n_max + 1))
    spec = Spectrum(n_min, n_max)
    for n, center, roots, residuals, scale, n_intervals in results:
        if not roots:
            spec.missing.append(n)
            continue
        best = int(np.argmin([abs(r - center) for r in roots]))
        spec.entries[n] = roots[best]
        spec.residuals[n] = residuals[best]
        spec.scales[n] = scale
        spec.grids[n] = n_intervals
        spec.unindexed.extend((n, r) for i, r in enumerate(roots) if i != best)
    # overlapping windows can claim the same root twice
    idx = spec.indices
    for a, b in zip(idx, idx[1:]):
        if a not in spec.entries or b not in spec.entries:
            continue
        if abs(spec.entries[a] - spec.entries[b]) <= 1e-9 * (1 + abs(spec.entries[a])):
            spec.duplicates.append((a, b))
            drop = b if abs(spec.entries[a] - predicted_eigenvalue(problem, a)) <= abs(
                spec.entries[b] - predicted_eigenvalue(problem, b)
            ) else a
            _drop(spec, drop)
    idx = spec.indices
    for a, b in zip(idx, idx[1:]):
        if b in spec.entries and a in spec.entries and spec.entries[b] <= spec.entries[a]:
            spec.unindexed.append((b, spec.entries[b]))
            _drop(spec, b)
    if spec.missing or spec.duplicates:
        warnings.warn(
            f"spectrum window [{n_min}, {n_max}]: missing={spec.missing} duplicates={spec.duplicates}",
            stacklevel=2,
        )
    return spec


def _drop(spec: Spectrum, n: int) -> None:
    spec.entries.pop(n, None)
    spec.residuals.pop(n, None)
    spec.scales.pop(n, None)
    spec.grids.pop(n, None)
    spec.missing.append(n)
    spec.missing.sort()


# -- eigenfunctions and nodal points -----------------------------------------


def _phi_nodes(problem: DiracProblem, pair: FundamentalPair) -> tuple[np.ndarray, np.ndarray]:
    """phi1 and its x-derivative at the grid nodes."""
    uc, us = boundary_U(problem, pair)
    phi1 = us * pair.C[:, 0] - uc * pair.S[:, 0]
    phi2 = us * pair.C[:, 1] - uc * pair.S[:, 1]
    dphi1 = (pair.V_nodes - pair.m - pair.lam) * phi2
    return phi1, dphi1


def phi1(problem: DiracProblem, lam: float, x, pair: FundamentalPair | None = None):
    """First eigenfunction component U(S) C1(x) - U(C) S1(x)."""
    pair = pair or fundamental_pair(problem, lam)
    vals, der = _phi_nodes(problem, pair)
    h = pair.grid.h
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < -1e-12) or np.any(xa > PI + 1e-12):
        raise ValueError("x outside [0, pi]")
    k = np.clip((xa / h).astype(int), 0, pair.grid.n_intervals - 1)
    x0 = k * h
    out = np.array(
        [hermite_eval(x0[i], h, vals[k[i]], vals[k[i] + 1], der[k[i]], der[k[i] + 1], xa[i]) for i in range(len(xa))]
    )
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class NodalSet:
    n: int
    lambda_n: float
    points: np.ndarray
    status: str = "ok"

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def count_ok(self) -> bool:
        return self.count == self.n


class NodalResolutionError(RuntimeError):
    pass


def _zeros_on_grid(problem: DiracProblem, pair: FundamentalPair) -> np.ndarray | None:
    vals, der = _phi_nodes(problem, pair)
    h = pair.grid.h
    n = pair.grid.n_intervals
    cells = []
    zeros = []
    for k in range(1, n):
        if vals[k] == 0.0:
            zeros.append(k * h)
    prod = vals[:-1] * vals[1:]
    cells = np.nonzero(prod < 0)[0]
    if len(cells) > 1 and np.min(np.diff(cells)) < 2:
        return None
    for k in cells:
        x0 = k * h
        f = lambda x, k=k, x0=x0: hermite_eval(x0, h, vals[k], vals[k + 1], der[k], der[k + 1], x)  # noqa: E731
        zeros.append(refine_root(f, x0, x0 + h, vals[k], vals[k + 1]))
    pts = np.sort(np.array(zeros, dtype=float))
    return pts[(pts > 0.0) & (pts < PI)]


def nodal_points(
    problem: DiracProblem,
    n: int,
    lambda_n: float | None = None,
    grid: Grid | None = None,
    base_intervals: int = BASE_INTERVALS,
    max_refinements: int = 3,
) -> NodalSet:
    """Zeros of phi1(., lambda_n) in (0, pi), for positive n.

    Without ``lambda_n`` the eigenvalue is computed first and its search grid
    reused; pass ``grid`` alongside an externally computed ``lambda_n``.
    """
    if n < 1:
        raise ValueError("nodal points are exposed for positive n only")
    if lambda_n is None:
        spec = eigenvalues(problem, (n, n), base_intervals)
        if n not in spec:
            raise ConvergenceError(f"eigenvalue {n} not found")
        lambda_n = spec[n]
        grid = Grid(spec.grids[n])
    grid = grid or grid_for(problem, abs(lambda_n) + SCAN_HALF_WIDTH, base_intervals)
    for _ in range(max_refinements + 1):
        pair = fundamental_pair(problem, lambda_n, grid)
        pts = _zeros_on_grid(problem, pair)
        if pts is not None:
            break
        grid = Grid(grid.n_intervals * 2)
    else:
        raise NodalResolutionError(f"zeros of phi1 for n={n} not separated on {grid.n_intervals} intervals")
    status = "ok" if len(pts) == n else f"count {len(pts)} != n"
    if status != "ok":
        warnings.warn(f"nodal set n={n}: {status}", stacklevel=2)
    return NodalSet(n, float(lambda_n), pts, status)


def nodal_data(problem: DiracProblem, n_min: int, n_max: int, spectrum: Spectrum | None = None):
    """Nodal sets for every resolved n in [n_min, n_max] (n_min >= 1)."""
    from .inverse import NodalData

    spectrum = spectrum or eigenvalues(problem, (n_min, n_max))
    ns = [n for n in range(n_min, n_max + 1) if n in spectrum]
    sets = _pmap(lambda n: nodal_points(problem, n, spectrum[n], Grid(spectrum.grids[n])), ns)
    return NodalData({s.n: s for s in sets})
