import math

import numpy as np
import pytest

from errors import Divergence
from interval import Interval
from jets import (
    Const,
    VectorField,
    solution_jet,
    taylor_coefficients,
    taylor_coefficients_with_derivatives,
    variables,
    variational_jet,
)
from lohner import monodromy, point_trajectory
from systems.systems import System, entry


def test_expression_values_and_derivatives():
    x, y = variables(2, ["x", "y"])
    expr = x * y + Const("2") * x - y
    f = expr.function(False)
    assert f(np.array([3.0, 4.0])) == 3.0 * 4.0 + 6.0 - 4.0
    dx = expr.derivative(0).function(False)
    dy = expr.derivative(1).function(False)
    assert dx(np.array([3.0, 4.0])) == 6.0
    assert dy(np.array([3.0, 4.0])) == 2.0
    rigorous = expr.function(True)(Interval([3.0, 4.0]))
    assert rigorous.contains(14.0)


def test_zero_simplification():
    x, y = variables(2)
    assert (x * Const("0")).is_zero()
    assert (x + Const("0")) is x
    assert (Const("0") - y).function(False)(np.array([1.0, 2.0])) == -2.0


def test_harmonic_jet_is_cosine_series():
    field = System("harmonic")
    coefficients = taylor_coefficients(field, Interval([1.0, 0.0]), 8)
    for k, c in enumerate(coefficients):
        if k % 2 == 0:
            expected_x = (-1) ** (k // 2) / math.factorial(k)
            expected_y = 0.0
        else:
            expected_x = 0.0
            expected_y = -((-1) ** (k // 2)) / math.factorial(k)
        assert c.contains(Interval([expected_x, expected_y]))
        assert np.max(c.diam()) < 1e-15


def test_point_and_interval_modes_agree():
    field = System("vanderpol", {"mu": "0.2"})
    x0 = np.array([2.0, 0.5])
    point = taylor_coefficients(field, x0, 12)
    rigorous = taylor_coefficients(field, Interval(x0), 12)
    for p, r in zip(point, rigorous):
        assert np.all(np.abs(p - r.mid()) <= 1e-12 * (1.0 + np.abs(p)))


def test_derivative_jets_of_linear_field():
    field = System("linear", {"rates": ["-1", "0.5"]})
    coefficients, derivatives = taylor_coefficients_with_derivatives(field, Interval([1.0, 1.0]), 6)
    for k, D in enumerate(derivatives):
        expected = np.diag([(-1.0) ** k, 0.5 ** k]) / math.factorial(k)
        assert D.contains(expected)
        assert coefficients[k].contains(np.diag(expected))


def test_variational_jet_matches_flow_derivative():
    field = System("linear", {"rates": ["2", "-3"]})
    V0 = np.array([[1.0], [1.0]])
    _, directions = variational_jet(field, [1.0, 1.0], V0, 5)
    assert np.allclose(directions[3][:, 0], [2.0 ** 3 / 6.0, (-3.0) ** 3 / 6.0])


def test_jet_shapes():
    field = System("michelson")
    jet = solution_jet(field, Interval([0.0, 1.3, 0.0]), 4, directions=np.eye(3)[:, :2])
    assert len(jet) == 5
    assert all(c.shape == (3, 3) for c in jet)


def test_jet_order_must_be_positive():
    with pytest.raises(ValueError):
        solution_jet(System("harmonic"), Interval([1.0, 0.0]), 0)


def test_unbounded_input_diverges():
    x, = variables(1)
    field = VectorField([x * x])
    with pytest.raises(Divergence):
        taylor_coefficients(field, Interval([1e200]), 4)


def test_vector_field_services():
    field = System("vanderpol", {"mu": "0.2"})
    x = np.array([2.0, 1.0])
    assert np.allclose(field.value(x), [1.0, 0.2 * 1.0 * (1.0 - 4.0) - 2.0])
    assert np.allclose(field.jacobian(x), [[0.0, 1.0], [-2.0 * 0.2 * 2.0 * 1.0 - 1.0, 0.2 * (1.0 - 4.0)]])
    assert np.isclose(field.divergence(x), 0.2 * (1.0 - 4.0))
    assert field.divergence(Interval(x)).contains(0.2 * (1.0 - 4.0))
    state = np.concatenate([x, np.eye(2).ravel()])
    derivative = field.variational_rhs(0.0, state)
    assert np.allclose(derivative[2:].reshape(2, 2), field.jacobian(x))


def polynomial(coefficients, t):
    return sum(c * t ** k for k, c in enumerate(coefficients))


def binomial(k, j):
    return math.factorial(k) // (math.factorial(j) * math.factorial(k - j))


def test_variational_jet_follows_liouville():
    field = System("vanderpol")
    x0 = np.array([1.5, -0.5])
    h = 0.1
    points, matrices = variational_jet(field, x0, np.eye(2), 25)
    times = np.linspace(0.0, h, 201)
    divergence = [field.divergence(polynomial(points, t)) for t in times]
    expected = np.exp(np.trapz(divergence, times))
    assert np.isclose(np.linalg.det(polynomial(matrices, h)), expected, rtol=1e-6)


def test_monodromy_determinant_over_a_period():
    orbit = entry("vanderpol")
    _, M = monodromy(orbit.field, orbit.point, orbit.period)
    times, points = point_trajectory(orbit.field, orbit.point, orbit.period, 4001)
    divergence = [orbit.field.divergence(point) for point in points]
    expected = np.exp(np.trapz(divergence, times))
    assert np.isclose(np.linalg.det(M), expected, rtol=1e-6)


def test_shifted_coefficients_match_recentering():
    field = System("vanderpol")
    x0 = np.array([2.0, 0.0])
    h = 0.05
    order = 30
    coefficients = taylor_coefficients(field, x0, order)
    shifted = taylor_coefficients(field, polynomial(coefficients, h), order)
    for j in range(6):
        recentred = sum(
            binomial(k, j) * coefficients[k] * h ** (k - j) for k in range(j, order + 1)
        )
        assert np.allclose(shifted[j], recentred, rtol=1e-8, atol=1e-8)
