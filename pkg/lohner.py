from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

import utils
from errors import Divergence, NoCrossing, StepRejected
from interval import Interval, horner, verified_inverse
from jets import taylor_coefficients, taylor_coefficients_with_derivatives
from sets import Doubleton

RTOL = 1e-13
ATOL = 1e-13


@dataclass
class SolverConfig:
    order: int = 20
    initial_step: float = 0.01
    min_step: float = 1e-10
    max_step: float = 0.5
    tolerance: float = 1e-18
    inflation_factor: float = 1.5
    max_inflations: int = 10
    max_rejections: int = 40

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("Taylor order must be at least 2, got {}".format(self.order))
        if not 0.0 < self.min_step <= self.max_step:
            raise ValueError(
                "Need 0 < min step <= max step, got {} and {}".format(self.min_step, self.max_step)
            )
        if not self.tolerance > 0.0:
            raise ValueError("Tolerance must be positive, got {}".format(self.tolerance))
        if not self.inflation_factor > 1.0:
            raise ValueError("Inflation factor must exceed 1, got {}".format(self.inflation_factor))
        if self.initial_step <= 0.0:
            raise ValueError("Initial step must be positive, got {}".format(self.initial_step))


def _inflate(E, factor):
    centre = Interval(E.mid())
    tiny = 1e-15 * (1.0 + np.abs(E.mid()))
    return centre + factor * (E - centre) + Interval(-tiny, tiny)


def apriori_enclosure(field, X, h, cfg, coefficients=None):
    """Box E with phi([0, h], X) inside E, from the Picard condition X + [0, h] f(E) in E.

    The search starts from the range of the Taylor polynomial (when `coefficients` are
    given) and on failure continues the Picard iteration from the inflated candidate.
    """
    if not h >= 0.0:
        raise ValueError("Step must be non-negative, got {}".format(h))
    times = Interval(0.0, h)
    E = X
    if coefficients is not None:
        E = E.hull(horner(coefficients, times))

    for attempt in range(cfg.max_inflations + 1):
        candidate = X + times * field.value(E)
        if candidate.subset(E):
            return candidate
        E = _inflate(candidate, cfg.inflation_factor)
        if not E.is_finite():
            break
    raise StepRejected("A-priori enclosure not validated for h = %g" % h)


class StepResult:
    """Outcome of one Lohner step.

    Arguments:
        X_next (Doubleton): encloses phi(h, X)
        enclosure (Interval): encloses phi([0, h], X)
        step (float or Interval): step used
        coefficients (list): Taylor coefficients over the hull of X, remainder last
        apriori (Interval): validated a-priori enclosure on [0, h]
    """

    def __init__(self, X_next, enclosure, step, coefficients, apriori):
        self.X_next = X_next
        self.enclosure = enclosure
        self.step = step
        self.coefficients = coefficients
        self.apriori = apriori

    @property
    def step_hi(self):
        return float(self.step.hi) if isinstance(self.step, Interval) else float(self.step)

    def tube_over(self, a, b):
        """Enclosure of phi([a, b], X) for 0 <= a <= b <= step"""
        if a < 0.0 or b > self.step_hi or a > b:
            raise ValueError("Sub-range [{}, {}] outside the step [0, {}]".format(a, b, self.step_hi))
        return horner(self.coefficients, Interval(a, b)).intersect(self.apriori)


class TubeSegment:
    def __init__(self, start, result):
        self.start = start
        self.result = result
        self.time = Interval(start.lo, (start + result.step).hi)
        self.enclosure = result.enclosure


def predict_step(coefficients, cfg):
    """0.9 min over k in {p-1, p} of (tol / ||x_k||)^(1/k), clamped to [min, max] step"""
    order = len(coefficients) - 1
    candidates = []
    for k in (order - 1, order):
        size = float(np.max(coefficients[k].mag()))
        if size > 0.0:
            candidates.append((cfg.tolerance / size) ** (1.0 / k))
    if not candidates:
        return cfg.max_step
    h = 0.9 * min(candidates)
    if not np.isfinite(h):
        h = cfg.initial_step
    return float(np.clip(h, cfg.min_step, cfg.max_step))


def _orthogonalize(matrix, q):
    """Q factor of matrix with columns reordered by decreasing ||column|| * rad(q)"""
    weights = np.linalg.norm(matrix, axis=0) * q.rad()
    order = np.argsort(-weights, kind="stable")
    Q, R = np.linalg.qr(matrix[:, order])
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    return Q * signs


def _lohner_update(X, jet_point, J, remainder, h):
    Y = horner(list(jet_point) + [remainder], h)
    x_new = Y.mid()
    JC = J @ Interval(X.C)
    C_new = JC.mid()
    JQ = J @ Interval(X.Q)
    Q_new = _orthogonalize(JQ.mid(), X.q)
    Q_inverse = verified_inverse(Q_new)
    q_new = (
        Q_inverse @ (Y - Interval(x_new))
        + (Q_inverse @ JQ) @ X.q
        + Q_inverse @ ((JC - Interval(C_new)) @ X.r0)
    )
    return Doubleton(x_new, C_new, X.r0, Q_new, q_new)


def one_step(field, X, cfg, limit=None, step=None):
    """Advance X by one Taylor step.

    `limit` caps the predicted step; a given `step` (float or Interval) is used as is and
    is never halved.
    """
    X = X.fold()
    hull = X.enclose()
    order = cfg.order
    jet_point = taylor_coefficients(field, Interval(X.x), order)
    jet_box, jet_derivatives = taylor_coefficients_with_derivatives(field, hull, order)

    fixed = step is not None
    h = step if fixed else predict_step(jet_point, cfg)
    if limit is not None and not fixed:
        h = min(h, limit)

    for rejection in range(cfg.max_rejections + 1):
        h_hi = float(h.hi) if isinstance(h, Interval) else float(h)
        try:
            E = apriori_enclosure(field, hull, h_hi, cfg, coefficients=jet_box)
        except StepRejected:
            if fixed:
                raise
            h = 0.5 * h
            if h < cfg.min_step:
                raise Divergence("Step size fell below %g" % cfg.min_step)
            continue
        remainder = taylor_coefficients(field, E, order + 1)[order + 1]
        J = horner(list(jet_derivatives), h)
        X_next = _lohner_update(X, jet_point, J, remainder, h)
        coefficients = list(jet_box) + [remainder]
        enclosure = horner(coefficients, Interval(0.0, h_hi)).intersect(E)
        return StepResult(X_next, enclosure, h, coefficients, E)
    raise Divergence("Step rejected %d times" % cfg.max_rejections)


def integrate_to(field, X, t, cfg):
    """Enclosure of phi(t, X) together with the tube of per-step enclosures covering [0, t].

    `t` may be an Interval no wider than one step; the result then holds for every time
    in it.
    """
    target = t if isinstance(t, Interval) else Interval(t)
    if target.lo < 0.0:
        raise ValueError("Integration time must be non-negative, got {}".format(t))
    elapsed = Interval(0.0)
    tube = []
    current = X
    while True:
        remaining = (target - elapsed).intersect(Interval(0.0, np.inf))
        if remaining.hi <= 0.0:
            return current, tube
        if float(remaining.lo) <= cfg.min_step:
            # last step covers the whole remaining time interval
            result = one_step(field, current, cfg, step=remaining)
            tube.append(TubeSegment(elapsed, result))
            return result.X_next, tube
        result = one_step(field, current, cfg, limit=float(remaining.lo))
        tube.append(TubeSegment(elapsed, result))
        elapsed = elapsed + result.step
        current = result.X_next


def advance(field, X, t, cfg):
    if isinstance(t, Interval) or t > 0.0:
        return integrate_to(field, X, t, cfg)[0]
    return X


def eval_over_time_range(field, X1, tau, cfg):
    """Enclosure of phi([0, tau], X1) as the hull of the tube"""
    result = X1.enclose()
    if tau <= 0.0:
        return result
    _, tube = integrate_to(field, X1, tau, cfg)
    for segment in tube:
        result = result.hull(segment.enclosure)
    return result


def write_tube_csv(path, tube):
    """One row per step: t_lo, t_hi and the lo/hi of every coordinate"""
    n = tube[0].enclosure.shape[0] if tube else 0
    header = ["t_lo", "t_hi"]
    for i in range(n):
        header += ["x%d_lo" % (i + 1), "x%d_hi" % (i + 1)]
    rows = []
    for segment in tube:
        row = [float(segment.time.lo), float(segment.time.hi)]
        for i in range(n):
            row += [float(segment.enclosure.lo[i]), float(segment.enclosure.hi[i])]
        rows.append(row)
    utils.write_csv(path, header, rows)


# Non-rigorous services


def _solve(fun, t_end, y0, **kwargs):
    solution = solve_ivp(fun, (0.0, t_end), y0, method="DOP853", rtol=RTOL, atol=ATOL, **kwargs)
    if solution.status < 0:
        raise Divergence("Point integration failed: %s" % solution.message)
    return solution


def point_integrate(field, x0, t):
    if t == 0.0:
        return np.array(x0, dtype=float)
    return _solve(field.rhs, t, np.asarray(x0, dtype=float)).y[:, -1]


def point_trajectory(field, x0, t, points):
    times = np.linspace(0.0, t, points)
    solution = _solve(field.rhs, t, np.asarray(x0, dtype=float), t_eval=times)
    return solution.t, solution.y.T


def monodromy(field, x0, t, V0=None):
    """Point phi(t, x0) and the variational matrix D_x phi(t, x0) V0"""
    n = field.dimension
    V0 = np.eye(n) if V0 is None else np.asarray(V0, dtype=float)
    state = np.concatenate([np.asarray(x0, dtype=float), V0.ravel()])
    if t == 0.0:
        return state[:n], V0
    end = _solve(field.variational_rhs, t, state).y[:, -1]
    return end[:n], end[n:].reshape(n, -1)


class PointCrossing:
    def __init__(self, time, point, direction):
        self.time = time
        self.point = point
        self.direction = direction

    def __repr__(self):
        return "PointCrossing(time=%.17g, direction=%+d)" % (self.time, self.direction)


def point_crossings(field, x0, section, horizon, min_time=1e-9):
    """Crossings of the point trajectory with a section up to `horizon`, direction-tagged.

    Only crossings after `min_time` that satisfy the section's direction and domain
    constraints are returned.
    """
    def event(t, x):
        return section.point_value(x)

    solution = _solve(field.rhs, horizon, np.asarray(x0, dtype=float), events=event)
    crossings = []
    for time, point in zip(solution.t_events[0], solution.y_events[0]):
        if time <= min_time:
            continue
        speed = float(section.point_gradient(point) @ field.value(point))
        direction = int(np.sign(speed))
        if section.direction and direction != section.direction:
            continue
        if not section.point_in_domain(point):
            continue
        crossings.append(PointCrossing(float(time), np.array(point), direction))
    return crossings


def point_return(field, x0, section, returns=1, min_time=1e-9, horizon=10.0, max_horizon=1000.0):
    """Time and point of the `returns`-th constrained crossing"""
    while horizon <= max_horizon:
        crossings = point_crossings(field, x0, section, horizon, min_time=min_time)
        if len(crossings) >= returns:
            crossing = crossings[returns - 1]
            return crossing.time, crossing.point
        horizon *= 2.0
    raise NoCrossing("No return to the section within t = %g" % max_horizon)


def variational_trajectory(field, x0, times):
    """Points u(t) and matrices D_x phi(t, x0) at the given increasing times"""
    n = field.dimension
    state = np.concatenate([np.asarray(x0, dtype=float), np.eye(n).ravel()])
    solution = _solve(field.variational_rhs, float(times[-1]), state, t_eval=times)
    return solution.y[:n].T, solution.y[n:].T.reshape(-1, n, n)
