import csv

import numpy as np
import pytest

from errors import NoCrossing, StepRejected
from interval import Interval
from jets import VectorField, variables
from lohner import (
    SolverConfig,
    apriori_enclosure,
    eval_over_time_range,
    integrate_to,
    monodromy,
    one_step,
    point_crossings,
    point_integrate,
    point_return,
    predict_step,
    variational_trajectory,
    write_tube_csv,
)
from poincare import axis_section
from sets import Box, Doubleton
from systems.systems import System

cfg = SolverConfig(order=15)


def rotation(t, x):
    c, s = np.cos(t), np.sin(t)
    return np.array([c * x[0] + s * x[1], -s * x[0] + c * x[1]])


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(order=1)
    with pytest.raises(ValueError):
        SolverConfig(min_step=1.0, max_step=0.1)
    with pytest.raises(ValueError):
        SolverConfig(tolerance=0.0)


def test_one_step_encloses_exact_flow():
    field = System("harmonic")
    result = one_step(field, Doubleton.from_point([1.0, 0.0]), cfg)
    h = result.step_hi
    assert 0.0 < h <= cfg.max_step
    assert result.X_next.enclose().contains(rotation(h, [1.0, 0.0]))
    for t in np.linspace(0.0, h, 7):
        assert result.enclosure.contains(rotation(t, [1.0, 0.0]))


def test_integrate_box_contains_samples():
    field = System("harmonic")
    radius = 1e-6
    box = Interval([1.0 - radius, -radius], [1.0 + radius, radius])
    t = 0.5 * np.pi
    X_t, tube = integrate_to(field, Box.from_interval(box), t, cfg)
    end = X_t.enclose()
    rng = np.random.default_rng(2)
    for _ in range(50):
        x = rng.uniform(box.lo, box.hi)
        assert end.contains(rotation(t, x))
    assert np.max(end.diam()) < 2.0 * radius + 1e-12
    assert tube[0].time.lo == 0.0
    assert tube[-1].time.hi >= t


def test_interval_final_time():
    field = System("harmonic")
    times = Interval(1.0, 1.0 + 1e-12)
    X_t, _ = integrate_to(field, Doubleton.from_point([1.0, 0.0]), times, cfg)
    end = X_t.enclose()
    assert end.contains(rotation(1.0, [1.0, 0.0]))
    assert end.contains(rotation(1.0 + 1e-12, [1.0, 0.0]))


def test_constant_field_translates():
    field = System("constant", {"velocity": ["1", "-2"]})
    X_t, _ = integrate_to(field, Doubleton.from_point([0.0, 0.0]), 3.0, cfg)
    end = X_t.enclose()
    assert end.contains([3.0, -6.0])
    assert np.max(end.diam()) < 1e-12


def test_contracting_linear_field():
    field = System("linear", {"rates": ["-1"]})
    X_t, _ = integrate_to(field, Box.from_interval(Interval([0.9], [1.1])), 1.0, cfg)
    end = X_t.enclose()
    assert end.contains(Interval([0.9 * np.exp(-1.0)], [1.1 * np.exp(-1.0)]))
    assert float(end.diam()[0]) < 0.2 * np.exp(-1.0) + 1e-10


def test_apriori_rejects_blow_up():
    field = System("linear", {"rates": ["1"]})
    assert apriori_enclosure(field, Interval([1.0]), 0.1, cfg).contains(np.exp(0.1))
    x, = variables(1)
    blow_up = VectorField([x * x])
    with pytest.raises(StepRejected):
        apriori_enclosure(blow_up, Interval([1.0]), 2.0, cfg)


def test_predict_step_is_clamped():
    zero = [Interval([0.0])] * (cfg.order + 1)
    assert predict_step(zero, cfg) == cfg.max_step
    huge = [Interval([1e300])] * (cfg.order + 1)
    assert predict_step(huge, cfg) == cfg.min_step


def test_eval_over_time_range_hulls_tube():
    field = System("harmonic")
    X = Doubleton.from_point([1.0, 0.0])
    hull = eval_over_time_range(field, X, 1.0, cfg)
    for t in np.linspace(0.0, 1.0, 11):
        assert hull.contains(rotation(t, [1.0, 0.0]))


def test_point_services():
    field = System("harmonic")
    assert np.allclose(point_integrate(field, [1.0, 0.0], np.pi), [-1.0, 0.0], atol=1e-11)
    _, M = monodromy(field, [1.0, 0.0], 2.0 * np.pi)
    assert np.allclose(M, np.eye(2), atol=1e-10)
    points, matrices = variational_trajectory(field, [1.0, 0.0], np.array([0.0, 1.0]))
    assert np.allclose(matrices[1], [[np.cos(1.0), np.sin(1.0)], [-np.sin(1.0), np.cos(1.0)]], atol=1e-11)


def test_point_crossings_directions():
    field = System("harmonic")
    section = axis_section(1, [1.0, 0.0])
    crossings = point_crossings(field, [1.0, 0.0], section, 7.0)
    assert [c.direction for c in crossings] == [1, -1]
    assert np.isclose(crossings[0].time, np.pi)
    time, point = point_return(field, [1.0, 0.0], section, returns=2)
    assert np.isclose(time, 2.0 * np.pi, atol=1e-10)
    assert np.allclose(point, [1.0, 0.0], atol=1e-10)

    downward = axis_section(1, [1.0, 0.0], direction=-1)
    assert np.isclose(point_return(field, [1.0, 0.0], downward)[0], 2.0 * np.pi, atol=1e-10)


def test_point_return_without_crossing():
    field = System("constant", {"velocity": ["1", "0"]})
    with pytest.raises(NoCrossing):
        point_return(field, [0.0, 0.0], axis_section(1, [0.0, 1.0]), max_horizon=20.0)


def test_write_tube_csv(tmp_path):
    field = System("harmonic")
    _, tube = integrate_to(field, Doubleton.from_point([1.0, 0.0]), 1.0, cfg)
    path = str(tmp_path / "tube.csv")
    write_tube_csv(path, tube)
    with open(path) as infile:
        rows = list(csv.reader(infile))
    assert rows[0] == ["t_lo", "t_hi", "x1_lo", "x1_hi", "x2_lo", "x2_hi"]
    assert len(rows) == len(tube) + 1
    assert float(rows[1][0]) == 0.0


@pytest.mark.parametrize("h", [0.1, 0.01, 1e-3, 1e-4])
def test_apriori_validates_on_hopf_circle(h):
    field = System("hopf")
    E = apriori_enclosure(field, Interval([1.0, 0.0]), h, cfg)
    for t in np.linspace(0.0, h, 5):
        assert E.contains([np.cos(t), np.sin(t)])
