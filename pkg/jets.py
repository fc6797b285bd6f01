import numpy as np

from errors import Divergence
from interval import Interval


class Expr:
    """Node of a polynomial expression graph.

    Subclasses implement `function(rigorous)` (a closure evaluating the node on a state
    vector), `derivative(index)` (symbolic partial derivative) and `jet_term(k, memo,
    state, algebra)` (k-th Taylor coefficient along a solution, see `solution_jet`).
    """

    __array_ufunc__ = None

    def children(self):
        return ()

    def is_zero(self):
        return False

    def __add__(self, other):
        other = as_expr(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return Add(self, other)

    def __radd__(self, other):
        return as_expr(other) + self

    def __sub__(self, other):
        other = as_expr(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return -other
        return Sub(self, other)

    def __rsub__(self, other):
        return as_expr(other) - self

    def __mul__(self, other):
        other = as_expr(other)
        if self.is_zero() or other.is_zero():
            return Const("0")
        return Mul(self, other)

    def __rmul__(self, other):
        return as_expr(other) * self

    def __neg__(self):
        if self.is_zero():
            return self
        return Neg(self)


class Var(Expr):
    def __init__(self, index, name=None):
        self.index = index
        self.name = name or "x%d" % index

    def function(self, rigorous):
        index = self.index
        return lambda x: x[index]

    def derivative(self, index):
        return Const("1") if index == self.index else Const("0")

    def jet_term(self, k, memo, state, algebra):
        return state[k][self.index]

    def __repr__(self):
        return self.name


class Const(Expr):
    """Constant given as a decimal string (enclosed rigorously), float or Interval"""

    def __init__(self, value):
        if isinstance(value, Interval):
            self.value = value
            self.text = repr(value)
        elif isinstance(value, str):
            self.value = Interval.from_string(value)
            self.text = value
        else:
            self.value = Interval(float(value))
            self.text = repr(float(value))
        self.approximation = float(self.value.mid())

    def is_zero(self):
        return bool(self.value.lo == 0.0 and self.value.hi == 0.0)

    def function(self, rigorous):
        value = self.value if rigorous else self.approximation
        return lambda x: value

    def derivative(self, index):
        return Const("0")

    def jet_term(self, k, memo, state, algebra):
        if k == 0:
            return algebra.constant(self.value)
        return algebra.zero

    def __repr__(self):
        return self.text


class Add(Expr):
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def function(self, rigorous):
        f, g = self.left.function(rigorous), self.right.function(rigorous)
        return lambda x: f(x) + g(x)

    def derivative(self, index):
        return self.left.derivative(index) + self.right.derivative(index)

    def jet_term(self, k, memo, state, algebra):
        return memo[id(self.left)][k] + memo[id(self.right)][k]

    def __repr__(self):
        return "(%r + %r)" % (self.left, self.right)


class Sub(Expr):
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def function(self, rigorous):
        f, g = self.left.function(rigorous), self.right.function(rigorous)
        return lambda x: f(x) - g(x)

    def derivative(self, index):
        return self.left.derivative(index) - self.right.derivative(index)

    def jet_term(self, k, memo, state, algebra):
        return memo[id(self.left)][k] - memo[id(self.right)][k]

    def __repr__(self):
        return "(%r - %r)" % (self.left, self.right)


class Neg(Expr):
    def __init__(self, operand):
        self.operand = operand

    def children(self):
        return (self.operand,)

    def function(self, rigorous):
        f = self.operand.function(rigorous)
        return lambda x: -f(x)

    def derivative(self, index):
        return -self.operand.derivative(index)

    def jet_term(self, k, memo, state, algebra):
        return -memo[id(self.operand)][k]

    def __repr__(self):
        return "-%r" % (self.operand,)


class Mul(Expr):
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def function(self, rigorous):
        f, g = self.left.function(rigorous), self.right.function(rigorous)
        return lambda x: f(x) * g(x)

    def derivative(self, index):
        return (
            self.left.derivative(index) * self.right
            + self.left * self.right.derivative(index)
        )

    def jet_term(self, k, memo, state, algebra):
        # constants only have a zeroth coefficient, so the convolution collapses
        if isinstance(self.left, Const):
            return memo[id(self.right)][k] * algebra.scalar(self.left.value)
        if isinstance(self.right, Const):
            return memo[id(self.left)][k] * algebra.scalar(self.right.value)
        a = algebra.stack(memo[id(self.left)][: k + 1])
        b = algebra.stack(memo[id(self.right)][k::-1])
        value = (a[:, :1] * b[:, :1]).sum(axis=0)
        if algebra.width == 1:
            return value
        partials = (a[:, :1] * b[:, 1:] + a[:, 1:] * b[:, :1]).sum(axis=0)
        return algebra.concatenate([value, partials])

    def __repr__(self):
        return "%r * %r" % (self.left, self.right)


def as_expr(value):
    if isinstance(value, Expr):
        return value
    return Const(value)


def variables(n, names=None):
    names = names or ["x%d" % i for i in range(n)]
    return tuple(Var(i, names[i]) for i in range(n))


def topological_order(roots):
    """Unique nodes reachable from roots, children before parents"""
    order = []
    seen = set()

    def visit(node):
        if id(node) in seen:
            return
        seen.add(id(node))
        for child in node.children():
            visit(child)
        order.append(node)

    for root in roots:
        visit(root)
    return order


class _JetAlgebra:
    """Truncated dual-number coefficients (value plus `width - 1` partials)"""

    def __init__(self, rigorous, width):
        self.rigorous = rigorous
        self.width = width
        if rigorous:
            self.zero = Interval.zeros(width)
        else:
            self.zero = np.zeros(width)

    def scalar(self, value):
        return value if self.rigorous else float(value.mid())

    def constant(self, value):
        if self.rigorous:
            return Interval.concatenate([value.reshape(1), Interval.zeros(self.width - 1)])
        out = np.zeros(self.width)
        out[0] = float(value.mid())
        return out

    def stack(self, items):
        if self.rigorous:
            return Interval.stack(items)
        return np.stack(items)

    def concatenate(self, items):
        if self.rigorous:
            return Interval.concatenate(items)
        return np.concatenate(items)

    def seed(self, x0, directions):
        """State coefficient 0: column 0 holds x0, the remaining columns the seed directions"""
        if self.rigorous:
            columns = [x0.reshape(-1, 1)]
            if directions is not None:
                columns.append(directions)
            return Interval.concatenate(columns, axis=1)
        columns = [np.asarray(x0, dtype=float).reshape(-1, 1)]
        if directions is not None:
            columns.append(np.asarray(directions, dtype=float))
        return np.concatenate(columns, axis=1)

    def finite(self, value):
        if self.rigorous:
            return value.is_finite()
        return bool(np.all(np.isfinite(value)))


def solution_jet(field, x0, order, directions=None):
    """Taylor coefficients of the solution of x' = f(x) through x0.

    Arguments:
        field (VectorField): polynomial vector field
        x0 (Interval or ndarray): initial condition; an Interval selects rigorous mode
        order (int): highest coefficient computed
        directions (n x m matrix or None): seed for the derivative part; coefficient k of
            column j encloses d x_k / d x0 along directions[:, j]

    Returns:
        list of `order + 1` arrays of shape (n, 1 + m); column 0 is the coefficient x_k,
        computed by the recurrence x_{k+1} = f(x)_k / (k + 1).
    """
    if order < 1:
        raise ValueError("Jet order must be at least 1, got {}".format(order))
    rigorous = isinstance(x0, Interval)
    width = 1 if directions is None else 1 + np.shape(directions)[1]
    if rigorous and directions is not None and not isinstance(directions, Interval):
        directions = Interval(directions)
    algebra = _JetAlgebra(rigorous, width)

    state = [algebra.seed(x0, directions)]
    memo = {id(node): [] for node in field.nodes}
    for k in range(order):
        for node in field.nodes:
            memo[id(node)].append(node.jet_term(k, memo, state, algebra))
        f_k = algebra.stack([memo[id(component)][k] for component in field.components])
        coefficient = f_k / (k + 1)
        if not algebra.finite(coefficient):
            raise Divergence("Taylor coefficient %d is not finite" % (k + 1))
        state.append(coefficient)
    return state


def taylor_coefficients(field, x0, order):
    """Coefficient vectors x_0..x_order (no derivative part)"""
    return [c[:, 0] for c in solution_jet(field, x0, order)]


def taylor_coefficients_with_derivatives(field, x0, order):
    """Coefficient vectors x_k together with the matrices d x_k / d x0"""
    n = field.dimension
    identity = Interval.eye(n) if isinstance(x0, Interval) else np.eye(n)
    jet = solution_jet(field, x0, order, directions=identity)
    return [c[:, 0] for c in jet], [c[:, 1:] for c in jet]


def variational_jet(field, x0, V0, order):
    """Non-rigorous Taylor coefficients of x(t) and of V(t) = D_x phi(t, x0) V0"""
    jet = solution_jet(field, np.asarray(x0, dtype=float), order, directions=V0)
    return [c[:, 0] for c in jet], [c[:, 1:] for c in jet]


class VectorField:
    """Polynomial vector field x' = f(x) given by one expression per component"""

    def __init__(self, components, names=None, parameters=None, name="field"):
        self.components = [as_expr(component) for component in components]
        self.dimension = len(self.components)
        self.names = list(names) if names else ["x%d" % i for i in range(self.dimension)]
        self.parameters = dict(parameters or {})
        self.name = name
        self.nodes = topological_order(self.components)
        self._jacobian_exprs = None
        self._functions = {}

    def __repr__(self):
        return "%s(%s)" % (self.name, ", ".join(repr(c) for c in self.components))

    @property
    def jacobian_exprs(self):
        if self._jacobian_exprs is None:
            self._jacobian_exprs = [
                [component.derivative(j) for j in range(self.dimension)]
                for component in self.components
            ]
        return self._jacobian_exprs

    def divergence_expr(self):
        total = Const("0")
        for i in range(self.dimension):
            total = total + self.jacobian_exprs[i][i]
        return total

    def _compiled(self, key, rigorous):
        if (key, rigorous) not in self._functions:
            if key == "value":
                exprs = self.components
            elif key == "jacobian":
                exprs = [e for row in self.jacobian_exprs for e in row]
            else:
                exprs = [self.divergence_expr()]
            self._functions[(key, rigorous)] = [e.function(rigorous) for e in exprs]
        return self._functions[(key, rigorous)]

    def value(self, x):
        rigorous = isinstance(x, Interval)
        parts = [f(x) for f in self._compiled("value", rigorous)]
        if rigorous:
            return Interval.stack(parts)
        return np.array([float(p) for p in parts])

    __call__ = value

    def jacobian(self, x):
        rigorous = isinstance(x, Interval)
        parts = [f(x) for f in self._compiled("jacobian", rigorous)]
        n = self.dimension
        if rigorous:
            return Interval.stack(parts).reshape(n, n)
        return np.array([float(p) for p in parts]).reshape(n, n)

    def divergence(self, x):
        rigorous = isinstance(x, Interval)
        value = self._compiled("divergence", rigorous)[0](x)
        return value if rigorous else float(value)

    # scipy.integrate signatures

    def rhs(self, t, x):
        return self.value(np.asarray(x, dtype=float))

    def variational_rhs(self, t, state):
        n = self.dimension
        x = state[:n]
        V = state[n:].reshape(n, -1)
        return np.concatenate([self.value(x), (self.jacobian(x) @ V).ravel()])
