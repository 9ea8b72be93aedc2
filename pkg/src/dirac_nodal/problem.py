"""Coefficient data of the Dirac boundary value problem on [0, pi].

The operator is ``B Y' + Omega(x) Y = lambda Y`` with ``B = [[0, 1], [-1, 0]]``
and ``Omega = diag(V + m, V - m)``, subject to the integral-type conditions

    y1(0) sin(alpha) + y2(0) cos(alpha) - int(f1 y1 + f2 y2) = 0
    y1(pi) sin(beta) + y2(pi) cos(beta) - int(g1 y1 + g2 y2) = 0
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

PI = math.pi
MASTER_INTERVALS = 4096
MIN_SAMPLES = 9

FUNC_KINDS = ("zero", "constant", "cosine", "polynomial", "samples")


class ProblemSpecError(ValueError):
    """Raised for malformed problem descriptions."""


def _check_domain(x: np.ndarray) -> None:
    # small slack so grid endpoints computed in floating point are accepted
    if np.any(x < -1e-12) or np.any(x > PI + 1e-12) or np.any(~np.isfinite(x)):
        raise ValueError("evaluation point outside [0, pi]")


@dataclass(frozen=True)
class Func1D:
    """Real function on [0, pi] from a small closed catalog.

    ``cosine`` is ``amplitude * cos(frequency * x + phase)``; ``polynomial``
    coefficients are in ascending order; ``samples`` are values on a uniform
    grid over [0, pi] interpolated by a not-a-knot cubic spline.
    """

    kind: str = "zero"
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in FUNC_KINDS:
            raise ProblemSpecError(f"unknown function type {self.kind!r}")
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if not all(math.isfinite(p) for p in params):
            raise ProblemSpecError(f"non-finite parameter in {self.kind} function")
        expected = {"zero": 0, "constant": 1, "cosine": 3}
        if self.kind in expected and len(params) != expected[self.kind]:
            raise ProblemSpecError(
                f"{self.kind} function takes {expected[self.kind]} parameters, got {len(params)}"
            )
        if self.kind == "polynomial" and not params:
            raise ProblemSpecError("polynomial needs at least one coefficient")
        if self.kind == "samples" and len(params) < MIN_SAMPLES:
            raise ProblemSpecError(
                f"samples function needs >= {MIN_SAMPLES} points, got {len(params)}"
            )

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> Func1D:
        return cls("zero")

    @classmethod
    def constant(cls, c: float) -> Func1D:
        return cls("constant", (c,))

    @classmethod
    def cosine(cls, amplitude: float = 1.0, frequency: float = 1.0, phase: float = 0.0) -> Func1D:
        return cls("cosine", (amplitude, frequency, phase))

    @classmethod
    def polynomial(cls, coefficients) -> Func1D:
        return cls("polynomial", tuple(coefficients))

    @classmethod
    def samples(cls, values) -> Func1D:
        return cls("samples", tuple(values))

    @cached_property
    def _spline(self) -> CubicSpline:
        x = np.linspace(0.0, PI, len(self.params))
        return CubicSpline(x, np.asarray(self.params))

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "cosine":
            return self.params[0] == 0.0
        return all(p == 0.0 for p in self.params)

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        _check_domain(xa)
        if self.kind == "zero":
            out = np.zeros_like(xa)
        elif self.kind == "constant":
            out = np.full_like(xa, self.params[0])
        elif self.kind == "cosine":
            a, k, ph = self.params
            out = a * np.cos(k * xa + ph)
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(xa, self.params) * np.ones_like(xa)
        else:
            out = self._spline(xa)
        if out.ndim == 0:
            return float(out)
        return out

    def to_dict(self) -> dict[str, Any]:
        p = self.params
        if self.kind == "zero":
            return {"type": "zero"}
        if self.kind == "constant":
            return {"type": "constant", "value": p[0]}
        if self.kind == "cosine":
            return {"type": "cosine", "amplitude": p[0], "frequency": p[1], "phase": p[2]}
        if self.kind == "polynomial":
            return {"type": "polynomial", "coefficients": list(p)}
        return {"type": "samples", "values": list(p)}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Func1D:
        if not isinstance(d, Mapping) or "type" not in d:
            raise ProblemSpecError(f"function entry must be an object with a 'type' key: {d!r}")
        kind = d["type"]
        try:
            if kind == "zero":
                return cls.zero()
            if kind == "constant":
                return cls.constant(d["value"])
            if kind == "cosine":
                return cls.cosine(d.get("amplitude", 1.0), d.get("frequency", 1.0), d.get("phase", 0.0))
            if kind == "polynomial":
                return cls.polynomial(d["coefficients"])
            if kind == "samples":
                return cls.samples(d["values"])
        except KeyError as exc:
            raise ProblemSpecError(f"{kind} function missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ProblemSpecError):
                raise
            raise ProblemSpecError(f"bad {kind} function: {exc}") from None
        raise ProblemSpecError(f"unknown function type {kind!r}")


def normalize_angle(a: float) -> float:
    """Map an angle into [0, pi)."""
    r = math.fmod(a, PI)
    if r < 0:
        r += PI
    if r >= PI:
        r = 0.0
    return r


@dataclass(frozen=True)
class DiracProblem:
    V: Func1D = field(default_factory=Func1D.zero)
    m: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    f1: Func1D = field(default_factory=Func1D.zero)
    f2: Func1D = field(default_factory=Func1D.zero)
    g1: Func1D = field(default_factory=Func1D.zero)
    g2: Func1D = field(default_factory=Func1D.zero)

    def __post_init__(self) -> None:
        for name in ("m", "alpha", "beta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ProblemSpecError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "alpha", normalize_angle(self.alpha))
        object.__setattr__(self, "beta", normalize_angle(self.beta))
        for name in ("V", "f1", "f2", "g1", "g2"):
            if not isinstance(getattr(self, name), Func1D):
                raise ProblemSpecError(f"{name} must be a Func1D")

    @cached_property
    def omega_table(self) -> CubicHermiteSpline:
        """Antiderivative of V on the master grid (cell-wise Simpson)."""
        n = MASTER_INTERVALS
        x = np.linspace(0.0, PI, n + 1)
        h = PI / n
        v = np.asarray(self.V(x), dtype=float)
        vm = np.asarray(self.V(x[:-1] + 0.5 * h), dtype=float)
        cells = h / 6.0 * (v[:-1] + 4.0 * vm + v[1:])
        w = np.concatenate(([0.0], np.cumsum(cells)))
        return CubicHermiteSpline(x, w, v)

    @property
    def has_nonlocal_terms(self) -> bool:
        return not all(f.is_zero for f in (self.f1, self.f2, self.g1, self.g2))

    def to_dict(self) -> dict[str, Any]:
        return {
            "V": self.V.to_dict(),
            "m": self.m,
            "alpha": self.alpha,
            "beta": self.beta,
            "f1": self.f1.to_dict(),
            "f2": self.f2.to_dict(),
            "g1": self.g1.to_dict(),
            "g2": self.g2.to_dict(),
        }


PROBLEM_KEYS = ("V", "m", "alpha", "beta", "f1", "f2", "g1", "g2")


def build_problem(spec: Mapping[str, Any] | None = None) -> DiracProblem:
    """Validate a JSON-like description and return the problem.

    Missing keys default to zero functions / zero constants.
    """
    spec = dict(spec or {})
    unknown = set(spec) - set(PROBLEM_KEYS)
    if unknown:
        raise ProblemSpecError(f"unknown problem keys: {sorted(unknown)}")
    kwargs: dict[str, Any] = {}
    for key in ("V", "f1", "f2", "g1", "g2"):
        if key in spec:
            kwargs[key] = Func1D.from_dict(spec[key])
    for key in ("m", "alpha", "beta"):
        if key in spec:
            try:
                kwargs[key] = float(spec[key])
            except (TypeError, ValueError):
                raise ProblemSpecError(f"{key} must be a real number, got {spec[key]!r}") from None
    return DiracProblem(**kwargs)


def load_problem(path: str | Path) -> DiracProblem:
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemSpecError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(spec, dict):
        raise ProblemSpecError(f"{path}: top level must be a JSON object")
    return build_problem(spec)


def example1_problem() -> DiracProblem:
    """V = cos x, m = sqrt(3), alpha = pi/6, beta = pi/3.

    Linear weights f1 = 4x/sqrt(3), g1 = (sqrt(3)+1)x/sqrt(3) give
    F0 = 0, Fpi = 2 pi, G0 = 0, Gpi = (sqrt(3)+1) pi / 2.
    """
    s3 = math.sqrt(3.0)
    return DiracProblem(
        V=Func1D.cosine(1.0, 1.0, 0.0),
        m=s3,
        alpha=PI / 6,
        beta=PI / 3,
        f1=Func1D.polynomial([0.0, 4.0 / s3]),
        g1=Func1D.polynomial([0.0, (s3 + 1.0) / s3]),
    )


def omega(problem: DiracProblem, x):
    """int_0^x V(t) dt."""
    xa = np.asarray(x, dtype=float)
    _check_domain(xa)
    out = problem.omega_table(np.clip(xa, 0.0, PI))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class DerivedConstants:
    F0: float
    Fpi: float
    G0: float
    Gpi: float
    A1: float
    A2: float
    omega_pi: float


def boundary_traces(problem: DiracProblem) -> tuple[float, float, float, float]:
    sa, ca = math.sin(problem.alpha), math.cos(problem.alpha)
    sb, cb = math.sin(problem.beta), math.cos(problem.beta)
    F0 = problem.f1(0.0) * sa + problem.f2(0.0) * ca
    Fpi = problem.f1(PI) * sb + problem.f2(PI) * cb
    G0 = problem.g1(0.0) * sa + problem.g2(0.0) * ca
    Gpi = problem.g1(PI) * sb + problem.g2(PI) * cb
    return F0, Fpi, G0, Gpi


def derived_constants(problem: DiracProblem) -> DerivedConstants:
    F0, Fpi, G0, Gpi = boundary_traces(problem)
    a, b, m = problem.alpha, problem.beta, problem.m
    A1 = m * m * PI / 2 + m * math.cos(b + a) * math.sin(a - b) - (F0 + Gpi)
    A2 = Fpi + G0
    return DerivedConstants(F0, Fpi, G0, Gpi, A1, A2, omega(problem, PI))
