import json
import os
from dataclasses import dataclass, field as dataclass_field

import numpy as np

import utils
from errors import Divergence
from lohner import monodromy, point_return, point_trajectory
from poincare import axis_section
from systems.falkner_skan import FalknerSkan
from systems.michelson import Michelson
from systems.rossler import Rossler4D
from systems.toy import ConstantField, HarmonicOscillator, HopfNormalForm, LinearDiagonal
from systems.vanderpol import VanDerPol

CATALOG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "catalog.json")
BENCHMARKS = ["michelson", "falkner-skan", "rossler-h", "rossler-pd", "vanderpol"]
PERIOD_PROVENANCE = "[DERIVED] DOP853 return search, rtol = atol = 1e-13, unpolished catalog point"

_periods = {}


def System(name, parameters=None):
    parameters = parameters or {}
    if name == "michelson":
        system = Michelson(**parameters)
    elif name == "falkner-skan":
        system = FalknerSkan(**parameters)
    elif name in ("rossler-h", "rossler-pd"):
        system = Rossler4D(**parameters)
    elif name == "vanderpol":
        system = VanDerPol(**parameters)
    elif name == "harmonic":
        system = HarmonicOscillator()
    elif name == "hopf":
        system = HopfNormalForm()
    elif name == "constant":
        system = ConstantField(**parameters)
    elif name == "linear":
        system = LinearDiagonal(**parameters)
    else:
        raise ValueError("Unknown system {}".format(name))

    return system


@dataclass
class SystemCatalogEntry:
    """A benchmark orbit: field, reference point on the standard section, multipliers.

    `returns` counts the standard-section crossings making up one period of the orbit.
    """

    name: str
    title: str
    field: object
    parameters: dict
    point: np.ndarray
    section_axis: int
    section_direction: int
    returns: int
    multipliers: list
    polish: bool = False
    stored_period: float = None
    point_text: list = dataclass_field(default_factory=list)

    def section(self, domain_radius=None):
        return axis_section(
            self.section_axis, self.point, self.section_direction, domain_radius
        )

    @property
    def period(self):
        """Reference period, from the catalog or computed once per process"""
        if self.stored_period is not None:
            return self.stored_period
        if self.name not in _periods:
            _periods[self.name] = point_return(
                self.field, self.point, self.section(), returns=self.returns
            )[0]
        return _periods[self.name]

    def monodromy(self):
        return monodromy(self.field, self.point, self.period)[1]

    def extent(self, points=400):
        """Largest coordinate range along the orbit"""
        _, states = point_trajectory(self.field, self.point, self.period, points)
        return float(np.max(states.max(axis=0) - states.min(axis=0)))


def load_catalog(path=CATALOG_PATH):
    with open(path) as infile:
        return json.load(infile)


def entry(name, polish=None, path=CATALOG_PATH):
    data = load_catalog(path)
    if name not in data:
        raise ValueError("Unknown system {}".format(name))
    record = data[name]
    result = SystemCatalogEntry(
        name=name,
        title=record["title"],
        field=System(name, record["parameters"]),
        parameters=record["parameters"],
        point=np.array([float(value) for value in record["point"]]),
        section_axis=record["section"]["axis"],
        section_direction=record["section"]["direction"],
        returns=record["returns"],
        multipliers=[float(value) for value in record["multipliers"]],
        polish=record["polish"],
        stored_period=None if record["period"] is None else float(record["period"]),
        point_text=record["point"],
    )
    if result.polish if polish is None else polish:
        result = refine_orbit(result)
    return result


def catalog(polish=None, path=CATALOG_PATH):
    return [entry(name, polish=polish, path=path) for name in BENCHMARKS]


def store_periods(names=None, path=CATALOG_PATH):
    """Recompute reference periods by the point return search and save them in the catalog"""
    data = load_catalog(path)
    for name in names or BENCHMARKS:
        orbit = entry(name, polish=False, path=path)
        period = point_return(orbit.field, orbit.point, orbit.section(), returns=orbit.returns)[0]
        data[name]["period"] = "%.17g" % period
        data[name]["period_provenance"] = PERIOD_PROVENANCE
        print("Period %s\t %.17g" % (name, period))
    utils.write_log_to_json(path, data)
    return data


def refine_orbit(orbit, iterations=5, tolerance=1e-13):
    """Newton shooting for phi(T, u) = u with u kept on the standard section"""
    field = orbit.field
    n = field.dimension
    free = [j for j in range(n) if j != orbit.section_axis]
    point = orbit.point.copy()
    period = orbit.period
    for iteration in range(iterations):
        end, M = monodromy(field, point, period)
        residual = end - point
        if np.linalg.norm(residual) < tolerance:
            break
        jacobian = np.column_stack([(M - np.eye(n))[:, free], field.value(end)])
        correction = np.linalg.lstsq(jacobian, -residual, rcond=None)[0]
        point[free] += correction[:-1]
        period += correction[-1]
        if not np.all(np.isfinite(point)) or not np.isfinite(period):
            raise Divergence("Orbit refinement diverged for {}".format(orbit.name))
        print("Refine %s\t Iteration: %d\t Residual: %0.3e" % (orbit.name, iteration, np.linalg.norm(residual)))
    orbit.point = point
    orbit.stored_period = period
    return orbit
