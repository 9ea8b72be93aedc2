"""Closed-form large-|lambda| and large-n expansions, and a synthetic nodal-data generator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import ConvergenceError
from .problem import PI, DerivedConstants, DiracProblem, derived_constants, omega


def eigenvalue_asymptotic(constants: DerivedConstants, alpha: float, beta: float, n: int) -> float:
    """n + omega(pi)/pi + (alpha - beta)/pi + (A1 + (-1)^n A2)/(n pi)."""
    if n == 0:
        raise ValueError("eigenvalue asymptotics undefined for n = 0")
    sign = -1.0 if n % 2 else 1.0
    return (
        n
        + constants.omega_pi / PI
        + (alpha - beta) / PI
        + (constants.A1 + sign * constants.A2) / (n * PI)
    )


def fundamental_asymptotic(problem: DiracProblem, lam: float, x):
    """Leading plus 1/lambda terms of C1, C2, S1, S2."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    m = problem.m
    xa = np.asarray(x, dtype=float)
    th = lam * xa - omega(problem, xa)
    s, c = np.sin(th), np.cos(th)
    q = m * m * xa / (2 * lam)
    C1 = c + q * s
    C2 = s - (m / lam) * s - q * c
    S1 = s + (m / lam) * s - q * c
    S2 = -c - q * s
    return C1, C2, S1, S2


def characteristic_asymptotic(problem: DiracProblem, lam: float) -> float:
    """Delta(lambda) through order 1/lambda."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    p = problem
    a, b, m = p.alpha, p.beta, p.m
    wpi = omega(p, PI)
    th = lam * PI - wpi
    f1_0, f2_0, f1_pi, f2_pi = p.f1(0.0), p.f2(0.0), p.f1(PI), p.f2(PI)
    g1_0, g2_0, g1_pi, g2_pi = p.g1(0.0), p.g2(0.0), p.g1(PI), p.g2(PI)
    big = th + b - a
    d = math.sin(big) - m * m * PI / (2 * lam) * math.cos(big)
    d -= (f1_pi * math.sin(b) + f2_pi * math.cos(b) - f2_0 * math.cos(th + b)) / lam
    d -= (g1_pi * math.sin(th - a) - g2_pi * math.cos(th - a)) / lam
    d += (f1_0 * math.sin(th + b) - g1_0 * math.sin(a) - g2_0 * math.cos(a)) / lam
    d -= m / lam * math.sin(big) * math.cos(b + a) * math.cos(b - a)
    d += m / lam * math.cos(big) * math.cos(b + a) * math.sin(b - a)
    return d


@dataclass(frozen=True)
class AsymptoticNodalModel:
    constants: DerivedConstants
    alpha: float
    beta: float
    m: float
    omega: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def from_problem(cls, problem: DiracProblem) -> AsymptoticNodalModel:
        return cls(
            derived_constants(problem),
            problem.alpha,
            problem.beta,
            problem.m,
            lambda x: omega(problem, x),
        )


def _nodal_map(model: AsymptoticNodalModel, n: int, jh: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Right-hand side of the nodal expansion with omega evaluated at ``x``."""
    c = model.constants
    a, b, m = model.alpha, model.beta, model.m
    sign = -1.0 if n % 2 else 1.0
    shift = c.omega_pi + a - b
    wa = model.omega(x) + a
    return (
        jh * PI / n
        + wa / n
        - (jh / n) * (shift / n)
        - shift / (n * n * PI) * wa
        + (m * m * x / 2 + m * math.sin(2 * a) / 2 + sign * c.Fpi - c.F0) / (n * n)
        - (jh / n) * (c.A1 + sign * c.A2) / (n * n)
    )


def nodal_asymptotic(
    model: AsymptoticNodalModel, n: int, j, tol: float = 1e-13, max_iter: int = 50, return_iterations: bool = False
):
    """Fixed point of the implicit large-n nodal formula (vectorized over j).

    Seeded with (j + 1/2) pi / n; the first iterate is the explicit expansion
    with omega taken at that seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ja = np.asarray(j)
    if np.any(ja < 0) or np.any(ja > n - 1):
        raise ValueError(f"j must lie in [0, {n - 1}]")
    jh = ja.astype(float) + 0.5
    x = jh * PI / n
    it = 0
    for it in range(1, max_iter + 1):
        x_new = _nodal_map(model, n, jh, x)
        if np.any(x_new <= 0.0) or np.any(x_new >= PI):
            raise ValueError(f"nodal iteration left (0, pi) for n={n}")
        err = np.max(np.abs(x_new - x))
        x = x_new
        if err <= tol:
            break
    else:
        if max_iter > 1:
            raise ConvergenceError(f"nodal fixed point not converged for n={n} after {max_iter} iterations")
    out = float(x) if x.ndim == 0 else x
    return (out, it) if return_iterations else out


def synthesize_nodal_data(model: AsymptoticNodalModel, n_min: int, n_max: int):
    """NodalData for n in [n_min, n_max] from the asymptotic nodal formula."""
    from .forward import NodalSet
    from .inverse import NodalData

    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got {n_min}, {n_max}")
    sets = {}
    for n in range(n_min, n_max + 1):
        pts = nodal_asymptotic(model, n, np.arange(n))
        lam = eigenvalue_asymptotic(model.constants, model.alpha, model.beta, n)
        sets[n] = NodalSet(n, lam, np.asarray(pts), "asymptotic")
    return NodalData(sets)
