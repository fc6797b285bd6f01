import shutil

import numpy as np
import pytest

from interval import Interval
from lohner import point_integrate
from systems.systems import (
    BENCHMARKS,
    CATALOG_PATH,
    System,
    catalog,
    entry,
    load_catalog,
    refine_orbit,
    store_periods,
)


def test_factory():
    assert System("michelson").dimension == 3
    assert System("rossler-h").dimension == 4
    assert System("vanderpol", {"mu": "0.5"}).parameters == {"mu": "0.5"}
    with pytest.raises(ValueError):
        System("lorenz")
    with pytest.raises(ValueError):
        entry("lorenz")


def test_catalog_entries():
    data = load_catalog()
    assert sorted(data) == sorted(BENCHMARKS)
    for name, record in data.items():
        assert record["returns"] >= 1
        assert record["section"]["direction"] in (-1, 0, 1)
        assert len(record["point"]) == System(name, record["parameters"]).dimension


def test_parameters_are_enclosed():
    field = System("michelson", {"c": "0.8"})
    value = field.value(Interval([0.0, 0.0, 0.0]))
    # c^2 = 0.64 is not a binary64 number
    assert value[2].lo < 0.64 < value[2].hi


def test_rossler_ordering():
    field = System("rossler-h", {"a": "0.25", "b": "3", "c": "-0.5", "d": "0.05"})
    y, x, z, w = 0.3, -1.0, 2.0, 0.5
    expected = [x + 0.25 * y + z, -y - w, 0.05 * y - 0.5 * w, x * w + 3.0]
    assert np.allclose(field.value(np.array([y, x, z, w])), expected)
    assert np.isclose(field.divergence(np.array([y, x, z, w])), 0.25 + x)


def test_vanderpol_orbit():
    orbit = entry("vanderpol")
    assert 6.2 < orbit.period < 6.4
    assert orbit.section().normal.tolist() == [0.0, 1.0]
    eigenvalues = np.sort(np.abs(np.linalg.eigvals(orbit.monodromy())))
    assert abs(eigenvalues[1] - 1.0) < 1e-6
    assert abs(eigenvalues[0] - 0.283) < 0.01
    assert orbit.extent() > 3.9


def test_michelson_multipliers():
    orbit = entry("michelson")
    eigenvalues = np.sort(np.linalg.eigvals(orbit.monodromy()).real)
    for reference in orbit.multipliers:
        assert np.min(np.abs(eigenvalues - reference)) < 1e-3 * abs(reference)
    assert np.min(np.abs(eigenvalues - 1.0)) < 1e-5


def test_domain_radius_section():
    orbit = entry("michelson")
    section = orbit.section(domain_radius=0.5)
    assert section.point_in_domain(orbit.point)
    assert not section.point_in_domain(orbit.point + 1.0)


@pytest.mark.slow
def test_refine_orbit_reduces_residual():
    orbit = entry("falkner-skan", polish=False)
    polished = refine_orbit(entry("falkner-skan", polish=False))
    before = np.linalg.norm(point_integrate(orbit.field, orbit.point, orbit.period) - orbit.point)
    after = np.linalg.norm(point_integrate(polished.field, polished.point, polished.period) - polished.point)
    assert after <= before


@pytest.mark.slow
def test_full_catalog_loads():
    orbits = catalog()
    assert [orbit.name for orbit in orbits] == BENCHMARKS
    for orbit in orbits:
        assert orbit.period > 0.0


def test_store_periods(tmp_path):
    path = str(tmp_path / "catalog.json")
    shutil.copy(CATALOG_PATH, path)
    store_periods(["vanderpol"], path)
    record = load_catalog(path)["vanderpol"]
    assert 6.2 < float(record["period"]) < 6.4
    assert record["period_provenance"].startswith("[DERIVED]")
    assert entry("vanderpol", polish=False, path=path).period == float(record["period"])
    assert load_catalog(path)["michelson"] == load_catalog()["michelson"]
