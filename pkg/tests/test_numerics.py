import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dirac_nodal import DiracProblem, Grid, characteristic, extrapolate_limit, integrate_ode, quadrature, refine_root
from dirac_nodal.numerics import ConvergenceError, IntegrationError, central_difference, simpson_samples

PI = math.pi


def oscillator(x, y):
    return np.array([y[1], -y[0]])


# -- grid and integration ------------------------------------------------------------


def test_grid_endpoints():
    g = Grid(4096)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == PI
    assert np.all(np.diff(g.nodes) > 0)
    with pytest.raises(ValueError):
        Grid(0)


def test_oscillator_half_period():
    y = integrate_ode(oscillator, [1.0, 0.0], Grid(4096))
    assert np.max(np.abs(y[-1] - [-1.0, 0.0])) < 1e-8


def test_zero_rhs_keeps_state():
    y = integrate_ode(lambda x, y: np.zeros_like(y), [0.3, -2.0], Grid(64))
    assert np.all(y == np.array([0.3, -2.0]))


def test_dirac_constant_coefficients():
    # V = 0, m = sqrt(3), lambda = 2 gives rho = 1: C1 = cos x, C2 = (lambda - m) sin x
    m, lam = math.sqrt(3.0), 2.0

    def rhs(x, y):
        return np.array([(-m - lam) * y[1], (lam - m) * y[0]])

    y = integrate_ode(rhs, [1.0, 0.0], Grid(4096))
    assert np.max(np.abs(y[-1] - [-1.0, 0.0])) < 1e-8


def test_blow_up_raises():
    with pytest.raises(IntegrationError), np.errstate(over="ignore"):
        integrate_ode(lambda x, y: y * y * 1e300, [1.0], Grid(16))


@pytest.mark.parametrize("n", [16, 32, 64, 128])
def test_rk4_fourth_order(n):
    x = Grid(n).nodes
    exact = np.column_stack([np.cos(x), -np.sin(x)])
    e1 = np.max(np.abs(integrate_ode(oscillator, [1.0, 0.0], Grid(n)) - exact))
    x2 = Grid(2 * n).nodes
    exact2 = np.column_stack([np.cos(x2), -np.sin(x2)])
    e2 = np.max(np.abs(integrate_ode(oscillator, [1.0, 0.0], Grid(2 * n)) - exact2))
    assert e1 / e2 >= 12


# -- roots -------------------------------------------------------------------------


def test_root_examples():
    assert refine_root(math.sin, 3.0, 3.5) == pytest.approx(PI, abs=1e-12)
    assert refine_root(lambda x: x**3, -1.0, 2.0) == pytest.approx(0.0, abs=1e-4)
    assert abs(refine_root(lambda x: x**3, -1.0, 2.0)) ** 3 < 1e-9
    lam = refine_root(lambda l: characteristic(DiracProblem(), l), 0.5, 1.5)
    assert lam == pytest.approx(1.0, abs=1e-9)


def test_root_needs_sign_change():
    with pytest.raises(ValueError):
        refine_root(lambda x: x * x + 1, -1.0, 1.0)


def test_root_reversed_bracket():
    assert refine_root(math.cos, 2.0, 1.0) == pytest.approx(PI / 2, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(0.01, 2),
    st.floats(0.01, 2),
    st.floats(0.1, 20),
    st.floats(0.2, 5),
    st.integers(0, 2),
)
def test_root_residual_bound(r, da, db, amp, k, shape):
    a, b = r - da, r + db
    fs = [
        lambda x: amp * math.tanh(k * (x - r)),
        lambda x: amp * (x - r) * (1 + (x - r) ** 2),
        lambda x: amp * (math.exp(k * (x - r)) - 1),
    ]
    f = fs[shape]
    assume(f(a) * f(b) < 0)
    c = refine_root(f, a, b)
    fprime = max(abs(f(r + 1e-6) - f(r - 1e-6)) / 2e-6, abs(f(b) - f(a)) / (b - a))
    assert abs(f(c)) <= 1e-9 * (1 + fprime * (b - a))


def test_root_iteration_cap():
    with pytest.raises(ConvergenceError):
        refine_root(lambda x: math.copysign(1.0, x - 1 / 3), 0.0, 1.0, max_iter=5)


# -- quadrature ---------------------------------------------------------------------


def test_quadrature_examples():
    assert quadrature(np.cos) == pytest.approx(0.0, abs=1e-12)
    assert quadrature(np.sin) == pytest.approx(2.0, abs=1e-10)
    assert quadrature(lambda x: x) == pytest.approx(PI**2 / 2, abs=1e-12)


def test_simpson_exact_on_cubics():
    x = np.linspace(0, 2, 9)
    assert simpson_samples(x**3 - x, 0.25) == pytest.approx(4 - 2, abs=1e-13)
    with pytest.raises(ValueError):
        simpson_samples(np.ones(4), 0.1)


# -- extrapolation --------------------------------------------------------------------


def test_extrapolation_examples():
    n = np.array([10, 20, 40, 80])
    assert extrapolate_limit(n, 2 + 3 / n).c0 == pytest.approx(2.0, abs=1e-9)
    fit = extrapolate_limit(n, np.full(4, 5.0))
    assert fit.c0 == pytest.approx(5.0, abs=1e-12)
    assert fit.c1 == pytest.approx(0.0, abs=1e-9) and fit.c2 == pytest.approx(0.0, abs=1e-7)
    n = np.arange(20, 201)
    a = 1 + 1 / n + 7 / n**2 + 1 / n**3
    assert extrapolate_limit(n, a).c0 == pytest.approx(1.0, abs=1e-4)


def test_extrapolation_preconditions():
    with pytest.raises(ValueError):
        extrapolate_limit([1, 2, 3], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        extrapolate_limit([5, 5, 6, 6], [1.0, 1.0, 1.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-100, 100),
    st.floats(-100, 100),
    st.floats(-1000, 1000),
    st.integers(1, 5000),
    st.integers(4, 60),
)
def test_extrapolation_exact_on_model(c0, c1, c2, n0, count):
    n = np.arange(n0, n0 + count)
    fit = extrapolate_limit(n, c0 + c1 / n + c2 / n**2)
    assert fit.c0 == pytest.approx(c0, abs=1e-8 * (1 + abs(c0) + abs(c1) + abs(c2)))
    assert fit.residual_rms >= 0


# -- differentiation -------------------------------------------------------------------


def test_central_difference_quartic_exact():
    x = np.linspace(0, 1, 11)
    d = central_difference(x**4, x[1] - x[0])
    assert np.max(np.abs(d - 4 * x**3)) < 1e-11
