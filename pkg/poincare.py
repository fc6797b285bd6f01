from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.linalg

from errors import (
    ComplexEigenvalues,
    DegenerateMultiplier,
    NoCrossing,
    SignAmbiguous,
    TangencyRisk,
    UnsupportedSection,
)
from interval import Interval, verified_inverse
from lohner import (
    advance,
    eval_over_time_range,
    integrate_to,
    monodromy,
    one_step,
    point_crossings,
    variational_trajectory,
)
from sets import FunctionMap, compose_linear, format_fields

MAX_NEWTON_ITERATIONS = 5
NEWTON_IMPROVEMENT = 0.1
MIN_ANGLE_SAMPLES = 100
MIN_FLIGHT_STEPS = 10.0
MAX_STEP_SHRINKS = 8
MAX_SPAN_GROWTHS = 10
BISECTIONS = 40
SIMPLE_MULTIPLIER_GAP = 0.1


class Section:
    """Zero set of a scalar function alpha, with crossing constraints.

    Arguments:
        direction (int): required sign of D alpha(x) f(x) at counted crossings, 0 for any
        anchor (ndarray): point the section is built around
        domain_radius (float or None): only crossings inside anchor +- radius count
    """

    affine = False

    def __init__(self, direction=0, anchor=None, domain_radius=None):
        if direction not in (-1, 0, 1):
            raise ValueError("Unknown crossing direction {}".format(direction))
        if domain_radius is not None and anchor is None:
            raise ValueError("A domain radius needs an anchor point")
        self.direction = direction
        self.anchor = None if anchor is None else np.asarray(anchor, dtype=float)
        self.domain_radius = domain_radius

    def as_map(self):
        return FunctionMap(
            lambda X: Interval.stack([self.value(X)]),
            lambda X: self.gradient(X).reshape(1, -1),
        )

    def eval_on(self, X):
        """Representation-aware enclosure of alpha over a set"""
        return X.eval(self.as_map())[0]

    def crossing_speed(self, field, E):
        return self.gradient(E) @ field.value(E)

    def touches(self, E):
        return self.in_domain(E) and bool(self.value(E).contains_zero())

    def in_domain(self, E):
        if self.domain_radius is None:
            return True
        lo = self.anchor - self.domain_radius
        hi = self.anchor + self.domain_radius
        return bool(np.all(E.lo <= hi) and np.all(E.hi >= lo))

    def point_in_domain(self, x):
        if self.domain_radius is None:
            return True
        return bool(np.all(np.abs(np.asarray(x) - self.anchor) <= self.domain_radius))


class AffineSection(Section):
    """Hyperplane w . (x - u) = 0"""

    affine = True

    def __init__(self, normal, anchor, direction=0, domain_radius=None):
        super().__init__(direction, anchor, domain_radius)
        self.normal = np.asarray(normal, dtype=float)
        if not np.any(self.normal != 0.0):
            raise ValueError("Section normal must be nonzero")
        self.residual = None

    def value(self, X):
        return Interval(self.normal) @ (X - Interval(self.anchor))

    def gradient(self, X):
        return Interval(self.normal)

    def point_value(self, x):
        return float(self.normal @ (np.asarray(x) - self.anchor))

    def point_gradient(self, x):
        return self.normal

    def __repr__(self):
        return "AffineSection(normal=%s, anchor=%s, direction=%+d)" % (
            self.normal.tolist(),
            self.anchor.tolist(),
            self.direction,
        )


class GeneralSection(Section):
    """Zero set of a polynomial expression"""

    def __init__(self, expr, dimension, direction=0, anchor=None, domain_radius=None):
        super().__init__(direction, anchor, domain_radius)
        self.expr = expr
        self.dimension = dimension
        self.derivatives = [expr.derivative(j) for j in range(dimension)]
        self._rigorous = expr.function(True)
        self._approximate = expr.function(False)
        self._gradient = [d.function(True) for d in self.derivatives]
        self._point_gradient = [d.function(False) for d in self.derivatives]

    def value(self, X):
        return Interval.stack([self._rigorous(X)])[0]

    def gradient(self, X):
        return Interval.stack([g(X) for g in self._gradient])

    def point_value(self, x):
        return float(self._approximate(np.asarray(x, dtype=float)))

    def point_gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.array([float(g(x)) for g in self._point_gradient])


def axis_section(axis, anchor, direction=0, domain_radius=None):
    """Hyperplane x_axis = anchor[axis]"""
    anchor = np.asarray(anchor, dtype=float)
    normal = np.zeros(anchor.shape[0])
    normal[axis] = 1.0
    return AffineSection(normal, anchor, direction, domain_radius)


def orthogonal_section(field, u, direction=1, domain_radius=None):
    """Hyperplane through u with normal f(u)"""
    u = np.asarray(u, dtype=float)
    return AffineSection(field.value(u), u, direction, domain_radius)


@dataclass
class CrossingBracket:
    """Every trajectory of X meets the section at local time in [0, span] after `start`.

    X1 encloses the set at time `start`, X2 at time `start + span`; `tube` encloses
    phi([0, span], X1) and carries a crossing speed of constant sign `direction`.
    """

    start: Interval
    span: float
    X1: object
    X2: object
    tube: Interval
    direction: int
    departure: float
    transversal: bool = True

    @property
    def t1(self):
        return float(self.start.lo)

    @property
    def t2(self):
        return float((self.start + self.span).hi)

    @property
    def return_time(self):
        return self.start + Interval(0.0, self.span)


def detect_crossing(field, X, section, cfg, direction=None, min_flight=None, max_time=1000.0, offset=None):
    """Bracket the first constrained crossing of X with the section.

    While the tube still touches the section right after the start, the flow must be
    transversal there. Once it leaves, the reported departure grows to `MIN_FLIGHT_STEPS` times the
    first accepted step, stopping early at the first step whose tube touches the section again.
    An explicit `min_flight` skips every crossing before it.
    """
    direction = section.direction if direction is None else direction
    offset = Interval(0.0) if offset is None else offset
    elapsed = Interval(0.0)
    current = X
    departing = min_flight is not None or section.touches(X.enclose())
    departure = 0.0
    limit = None
    shrinks = 0
    first_step = None
    flight_end = None

    while True:
        if elapsed.lo > max_time:
            raise NoCrossing("No crossing found before t = %g" % max_time)
        if departing and min_flight is not None:
            limit = max(min_flight - float(elapsed.hi), cfg.min_step)
        result = one_step(field, current, cfg, limit=limit)
        if first_step is None:
            first_step = result.step_hi
        tube = result.enclosure
        touches = section.touches(tube)

        if departing:
            if min_flight is None:
                if touches:
                    if section.crossing_speed(field, tube).contains_zero():
                        raise TangencyRisk("Flow is not transversal while leaving the section")
                    elapsed = elapsed + result.step
                    current = result.X_next
                    continue
                departing = False
                departure = float(elapsed.lo)
                flight_end = max(departure, MIN_FLIGHT_STEPS * first_step)
            else:
                elapsed = elapsed + result.step
                current = result.X_next
                if float(elapsed.hi) >= min_flight * (1.0 - 1e-12):
                    departing = False
                    departure = min_flight
                    limit = None
                continue

        if not touches:
            elapsed = elapsed + result.step
            current = result.X_next
            if flight_end is not None:
                departure = min(float(elapsed.hi), flight_end)
            continue
        flight_end = None

        speed = section.crossing_speed(field, tube)
        sign = int(speed.sign())
        if sign == 0:
            shrinks += 1
            if shrinks > MAX_STEP_SHRINKS:
                raise TangencyRisk("Crossing speed contains zero at t = %g" % float(elapsed.lo))
            limit = 0.5 * result.step_hi
            continue
        limit = None
        shrinks = 0

        if direction and sign != direction:
            elapsed = elapsed + result.step
            current = result.X_next
            continue

        theta = _last_clear_time(section, result)
        X1 = one_step(field, current, cfg, step=theta).X_next if theta > 0.0 else current
        before = int(section.eval_on(X1).sign())
        if before == sign:
            # moving away from the section; the tube box only grazed it
            elapsed = elapsed + result.step
            current = result.X_next
            continue
        if before == 0:
            raise SignAmbiguous("Section value at the bracket start contains zero at t = %g" % float(elapsed.lo))
        start = offset + elapsed + theta
        span, X2, bracket_tube = _bracket_span(field, X1, section, sign, speed, cfg)
        return CrossingBracket(start, span, X1, X2, bracket_tube, sign, departure)


def _last_clear_time(section, result):
    """Largest theta (by bisection) with alpha(phi([0, theta], X)) away from zero"""
    if section.value(result.tube_over(0.0, 0.0)).contains_zero():
        return 0.0
    lo, hi = 0.0, result.step_hi
    for _ in range(BISECTIONS):
        middle = 0.5 * (lo + hi)
        if section.value(result.tube_over(0.0, middle)).contains_zero():
            hi = middle
        else:
            lo = middle
    return lo


def _bracket_span(field, X1, section, sign, speed, cfg):
    alpha = section.eval_on(X1)
    span = max(1.1 * float(alpha.mag()) / float(speed.mig()), 1e-15)
    for _ in range(MAX_SPAN_GROWTHS):
        X2, tube = integrate_to(field, X1, span, cfg)
        hull = X1.enclose()
        for segment in tube:
            hull = hull.hull(segment.enclosure)
        if int(section.crossing_speed(field, hull).sign()) != sign:
            raise TangencyRisk("Transversality fails on the bracket tube")
        if int(section.eval_on(X2).sign()) == sign:
            return span, X2, hull
        span *= 1.5
    raise SignAmbiguous("Section value keeps its sign after %d span growths" % MAX_SPAN_GROWTHS)


def detect_crossings(field, X, section, cfg, directions, min_flight=None, max_time=1000.0):
    """Chain of crossings with the given direction sequence; returns the last bracket"""
    offset = Interval(0.0)
    current = X
    bracket = None
    for index, direction in enumerate(directions):
        bracket = detect_crossing(
            field,
            current,
            section,
            cfg,
            direction=direction,
            min_flight=min_flight if index == 0 else None,
            max_time=max_time,
            offset=offset,
        )
        offset = bracket.start + bracket.span
        current = bracket.X2
    return bracket


@dataclass
class NewtonStep:
    window: Interval
    midpoint: float
    X0: object


def newton_step(field, bracket, section, cfg):
    """One interval Newton contraction of the local window [0, span]"""
    midpoint = 0.5 * bracket.span
    X0 = advance(field, bracket.X1, midpoint, cfg)
    g0 = section.eval_on(X0)
    g = section.crossing_speed(field, bracket.tube)
    if g.contains_zero():
        raise TangencyRisk("Crossing speed contains zero on the bracket")
    window = Interval(0.0, bracket.span).intersect(midpoint - g0 / g)
    return NewtonStep(window, midpoint, X0)


def rebase(field, bracket, window, cfg):
    """Bracket restricted to the local window, with X1 moved to its lower end"""
    a = float(window.lo)
    span = float((Interval(float(window.hi)) - a).hi)
    X1 = advance(field, bracket.X1, a, cfg) if a > 0.0 else bracket.X1
    tube = eval_over_time_range(field, X1, span, cfg)
    return CrossingBracket(
        bracket.start + a,
        span,
        X1,
        bracket.X2,
        tube,
        bracket.direction,
        bracket.departure,
        bracket.transversal,
    )


def refine_return_time(field, bracket, section, cfg):
    """Iterate the Newton contraction until it gains less than 10% (at most 5 rounds)"""
    for _ in range(MAX_NEWTON_ITERATIONS):
        step = newton_step(field, bracket, section, cfg)
        previous = bracket.span
        bracket = rebase(field, bracket, step.window, cfg)
        if bracket.span > (1.0 - NEWTON_IMPROVEMENT) * previous:
            break
    return bracket


@dataclass
class CoordinateFrame:
    """Coordinates z = A (x - y) with A the verified inverse of B"""

    y: np.ndarray
    B: np.ndarray
    A: Interval
    strategy: str
    multipliers: np.ndarray = dataclass_field(default=None)

    @classmethod
    def cartesian(cls, dimension):
        return cls(np.zeros(dimension), np.eye(dimension), Interval.eye(dimension), "cartesian")

    @classmethod
    def custom(cls, y, B, strategy="custom"):
        B = np.asarray(B, dtype=float)
        return cls(np.asarray(y, dtype=float), B, verified_inverse(B), strategy)

    @property
    def dimension(self):
        return self.B.shape[0]


def _normalize_columns(vectors):
    """Unit columns whose first nonzero entry is positive"""
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    for j in range(vectors.shape[1]):
        nonzero = np.flatnonzero(np.abs(vectors[:, j]) > 1e-14)
        if nonzero.size and vectors[nonzero[0], j] < 0.0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def section_basis(normal):
    """Orthonormal basis of the hyperplane with the given normal"""
    normal = np.asarray(normal, dtype=float)
    n = normal.shape[0]
    nonzero = np.flatnonzero(normal)
    if nonzero.size == 1:
        return np.eye(n)[:, [j for j in range(n) if j != nonzero[0]]]
    return _normalize_columns(scipy.linalg.null_space(normal[None, :]))


def section_derivative(field, section, u, period):
    """Non-rigorous derivative of the return map in section coordinates, with the basis"""
    w = section.point_gradient(u)
    basis = section_basis(w)
    p, M = monodromy(field, u, period)
    f_p = field.value(p)
    projection = np.eye(len(u)) - np.outer(f_p, w) / (w @ f_p)
    return basis.T @ projection @ M @ basis, basis


def build_coordinates(strategy, u, section, field, period):
    """Frame for the given strategy at a point u of the section.

    cartesian is the identity frame; diag+normal and diag+flowdir take the eigenvectors of
    the section derivative as columns 2..n and the section normal or the flow direction
    as column 1.
    """
    u = np.asarray(u, dtype=float)
    if strategy == "cartesian":
        return CoordinateFrame.cartesian(len(u))
    if strategy not in ("diag+normal", "diag+flowdir"):
        raise ValueError("Unknown strategy {}".format(strategy))

    derivative, basis = section_derivative(field, section, u, period)
    eigenvalues, eigenvectors = np.linalg.eig(derivative)
    if np.any(np.abs(eigenvalues.imag) > 1e-9 * np.maximum(1.0, np.abs(eigenvalues))):
        raise ComplexEigenvalues("Section derivative has eigenvalues {}".format(eigenvalues))
    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    columns = _normalize_columns(basis @ eigenvectors.real[:, order])

    if strategy == "diag+normal":
        first = section.point_gradient(u)
    else:
        first = field.value(u)
    first = first / np.linalg.norm(first)
    B = np.column_stack([first, columns])
    return CoordinateFrame(u, B, verified_inverse(B), strategy, eigenvalues.real[order])


@dataclass
class PoincareEnclosure:
    """Enclosure z of A (P(X) - y) with the parts it was assembled from"""

    return_time: Interval
    z: Interval
    y0: Interval
    y: Interval
    dy: Interval
    tube: Interval
    frame: CoordinateFrame

    def to_text(self):
        return format_fields(
            "poincare",
            {
                "return_time": self.return_time,
                "z": self.z,
                "y0": self.y0,
                "y": self.y,
                "dy": self.dy,
            },
        )


def compute_poincare_map(field, bracket, section, frame, cfg):
    """z = (y0 + y + dy) & A (e - y) on the bracket window, in the frame's coordinates"""
    midpoint = 0.5 * bracket.span
    X0 = advance(field, bracket.X1, midpoint, cfg)
    e = bracket.tube
    dt = Interval(0.0, bracket.span) - midpoint
    A = frame.A

    y0 = X0.affine_transform(A, frame.y)
    y = X0.eval(compose_linear(A, field)) * dt
    dy = 0.5 * (A @ (field.jacobian(e) @ field.value(e))) * dt.sqr()
    z = (y0 + y + dy).intersect(A @ (e - Interval(frame.y)))
    return PoincareEnclosure(bracket.return_time, z, y0, y, dy, e, frame)


def project_to_section(enclosure, section):
    """(0, z_2, ..., z_n): valid when the frame sits on an affine section"""
    if not section.affine:
        raise UnsupportedSection("Projection needs an affine section")
    frame = enclosure.frame
    w = section.normal
    scale = np.linalg.norm(w)
    tangent = np.abs(w @ frame.B[:, 1:]) <= 1e-10 * scale
    if not np.all(tangent) or abs(section.point_value(frame.y)) > 1e-10 * scale * (1.0 + np.linalg.norm(frame.y)):
        raise UnsupportedSection("Frame is not anchored on the section")
    return enclosure.z.with_entry(0, 0.0)


def reconstruct(enclosure, projection):
    """Enclosure of P(X) in original coordinates, y + B projection"""
    frame = enclosure.frame
    return Interval(frame.y) + Interval(frame.B) @ projection


def crossing_sequence(field, section, x0, period):
    """Directions of the constrained crossings up to the return nearest to `period`"""
    crossings = point_crossings(field, x0, section, 1.05 * period)
    if not crossings:
        raise NoCrossing("The orbit through x0 never meets the section")
    index = int(np.argmin([abs(c.time - period) for c in crossings]))
    return [c.direction for c in crossings[: index + 1]]


class PoincareMap:
    """Return map of a field onto a section along a fixed crossing sequence.

    Calling it on a set runs crossing detection, return-time refinement and the map
    enclosure.
    """

    def __init__(self, field, section, cfg, crossings=None, min_flight=None, max_time=1000.0):
        self.field = field
        self.section = section
        self.cfg = cfg
        self.crossings = list(crossings) if crossings else [section.direction]
        self.min_flight = min_flight
        self.max_time = max_time

    @classmethod
    def from_orbit(cls, field, section, x0, period, cfg, min_flight=None):
        crossings = crossing_sequence(field, section, x0, period)
        return cls(field, section, cfg, crossings, min_flight, max_time=2.0 * period + 1.0)

    def bracket(self, X):
        return detect_crossings(
            self.field,
            X,
            self.section,
            self.cfg,
            self.crossings,
            min_flight=self.min_flight,
            max_time=self.max_time,
        )

    def return_time(self, X):
        return refine_return_time(self.field, self.bracket(X), self.section, self.cfg)

    def __call__(self, X, frame):
        bracket = self.return_time(X)
        return compute_poincare_map(self.field, bracket, self.section, frame, self.cfg)


def cto_section(field, x0, period, domain_radius=None):
    """Section through x0 whose normal is the left eigenvector of the monodromy for 1"""
    x0 = np.asarray(x0, dtype=float)
    _, M = monodromy(field, x0, period)
    distances = np.sort(np.abs(np.linalg.eigvals(M) - 1.0))
    if distances.size > 1 and not distances[1] > SIMPLE_MULTIPLIER_GAP:
        raise DegenerateMultiplier(
            "Multiplier 1 is not simple (next distance %.3e)" % distances[1]
        )
    _, _, vh = np.linalg.svd((M - np.eye(len(x0))).T)
    w = vh[-1]
    if w @ field.value(x0) < 0.0:
        w = -w
    section = AffineSection(w, x0, direction=1, domain_radius=domain_radius)
    section.residual = float(np.linalg.norm(w @ M - w) / np.linalg.norm(w))
    return section


def cto_angle_scan(field, x0, period, samples):
    """Times t and cos of the angle between f(u(t)) and the CTO normal transported to u(t)"""
    if samples < 2:
        raise ValueError("Angle scan needs at least two samples, got {}".format(samples))
    w0 = cto_section(field, x0, period).normal
    times = np.linspace(0.0, period, samples, endpoint=False)
    points, matrices = variational_trajectory(field, x0, times)
    cosines = np.empty(samples)
    for i in range(samples):
        w = np.linalg.solve(matrices[i].T, w0)
        f = field.value(points[i])
        cosines[i] = (w @ f) / (np.linalg.norm(w) * np.linalg.norm(f))
    return times, cosines, points


def max_angle_cto_point(field, x0, period, samples=200, domain_radius=None, tie_tolerance=1e-12):
    """Orbit point where |cos| of the flow/CTO-normal angle is largest; ties go to smallest t"""
    if samples < MIN_ANGLE_SAMPLES:
        raise ValueError("Max-angle search needs at least {} samples, got {}".format(MIN_ANGLE_SAMPLES, samples))
    times, cosines, points = cto_angle_scan(field, x0, period, samples)
    magnitudes = np.abs(cosines)
    best = magnitudes.max()
    index = int(np.flatnonzero(magnitudes >= best * (1.0 - tie_tolerance))[0])
    section = cto_section(field, points[index], period, domain_radius=domain_radius)
    return float(times[index]), points[index], section, float(cosines[index])
