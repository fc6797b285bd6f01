import decimal

import numpy as np

from errors import DomainError, EmptyIntersection, SingularMatrix

UNIT_ROUNDOFF = 2.0 ** -53
CONDITION_LIMIT = 1e14
KRAWCZYK_SWEEPS = 5


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _rounded_sum(lo, hi, axis):
    """Outward-rounded bounds for sum(lo), sum(hi) along axis.

    Uses the a-posteriori bound |fl(sum) - sum| <= gamma_n * sum|a|, which holds for any
    summation order numpy picks.
    """
    n = lo.size if axis is None else lo.shape[axis]
    with np.errstate(invalid="ignore", over="ignore"):
        s_lo = np.sum(lo, axis=axis)
        s_hi = np.sum(hi, axis=axis)
        if n <= 1:
            return s_lo, s_hi
        if n == 2:
            return _down(s_lo), _up(s_hi)
        gamma = 2.0 * n * UNIT_ROUNDOFF / (1.0 - n * UNIT_ROUNDOFF)
        err_lo = _up(gamma * np.sum(np.abs(lo), axis=axis))
        err_hi = _up(gamma * np.sum(np.abs(hi), axis=axis))
        return _down(s_lo - err_lo), _up(s_hi + err_hi)


def _make(lo, hi):
    """Build an interval from already rounded endpoints, mapping NaN to the entire line"""
    lo = np.where(np.isnan(lo), -np.inf, lo)
    hi = np.where(np.isnan(hi), np.inf, hi)
    obj = Interval.__new__(Interval)
    obj.lo = lo
    obj.hi = hi
    return obj


def _coerce(value):
    if isinstance(value, Interval):
        return value
    return Interval(value)


class Interval:
    """Outward-rounded interval array.

    One class covers scalars (0-d), vectors and matrices; endpoints are numpy float64
    arrays and every operation widens its result by one ulp on each side, so no global
    rounding mode is touched. Values are never mutated after construction.
    """

    __array_ufunc__ = None
    __hash__ = None

    def __init__(self, lo, hi=None):
        lo = np.array(lo, dtype=float)
        hi = lo.copy() if hi is None else np.array(hi, dtype=float)
        lo, hi = np.broadcast_arrays(lo, hi)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("Interval endpoints must not be NaN")
        if np.any(lo > hi):
            raise ValueError("Invalid interval: lower endpoint exceeds upper endpoint")
        self.lo = np.array(lo)
        self.hi = np.array(hi)

    # Constructors

    @classmethod
    def point(cls, x):
        return cls(x)

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape))

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n))

    @classmethod
    def entire(cls, shape=()):
        return cls(np.full(shape, -np.inf), np.full(shape, np.inf))

    @classmethod
    def from_string(cls, text):
        """Tightest enclosure of a decimal literal such as "0.2" """
        exact = decimal.Decimal(text.strip())
        nearest = float(exact)
        if decimal.Decimal(nearest) == exact:
            return cls(nearest)
        if decimal.Decimal(nearest) < exact:
            return cls(nearest, _up(nearest))
        return cls(_down(nearest), nearest)

    @classmethod
    def stack(cls, items, axis=0):
        items = [_coerce(item) for item in items]
        return _make(
            np.stack([item.lo for item in items], axis=axis),
            np.stack([item.hi for item in items], axis=axis),
        )

    @classmethod
    def concatenate(cls, items, axis=0):
        items = [_coerce(item) for item in items]
        return _make(
            np.concatenate([item.lo for item in items], axis=axis),
            np.concatenate([item.hi for item in items], axis=axis),
        )

    # Array protocol

    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def size(self):
        return self.lo.size

    @property
    def T(self):
        return _make(self.lo.T, self.hi.T)

    def __len__(self):
        return len(self.lo)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, index):
        return _make(self.lo[index], self.hi[index])

    def reshape(self, *shape):
        return _make(self.lo.reshape(*shape), self.hi.reshape(*shape))

    def ravel(self):
        return _make(self.lo.ravel(), self.hi.ravel())

    def with_entry(self, index, value):
        value = _coerce(value)
        lo = self.lo.copy()
        hi = self.hi.copy()
        lo[index] = value.lo
        hi[index] = value.hi
        return _make(lo, hi)

    # Measures

    def mid(self):
        with np.errstate(invalid="ignore", over="ignore"):
            m = 0.5 * self.lo + 0.5 * self.hi
        both_infinite = np.isinf(self.lo) & np.isinf(self.hi)
        m = np.where(both_infinite, 0.0, m)
        m = np.clip(m, -np.finfo(float).max, np.finfo(float).max)
        return np.clip(m, self.lo, self.hi)

    def rad(self):
        m = self.mid()
        return np.maximum(_up(self.hi - m), _up(m - self.lo))

    def diam(self):
        return _up(self.hi - self.lo)

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        straddles = (self.lo <= 0.0) & (self.hi >= 0.0)
        return np.where(straddles, 0.0, np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def norm_inf(self):
        """Upper bound of the max-norm (vectors) or row-sum norm (matrices)"""
        if self.ndim <= 1:
            return float(np.max(self.mag())) if self.size else 0.0
        _, row_sums = _rounded_sum(self.mag(), self.mag(), axis=1)
        return float(np.max(row_sums))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi)))

    # Set relations

    def contains(self, other):
        other = _coerce(other)
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def subset(self, other):
        return _coerce(other).contains(self)

    def contains_zero(self):
        return (self.lo <= 0.0) & (self.hi >= 0.0)

    def sign(self):
        """+1 / -1 where the interval is strictly positive / negative, 0 otherwise"""
        return np.where(self.lo > 0.0, 1, np.where(self.hi < 0.0, -1, 0))

    def hull(self, other):
        other = _coerce(other)
        return _make(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def intersect(self, other):
        other = _coerce(other)
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            raise EmptyIntersection(
                "Empty intersection at entries {}".format(np.argwhere(lo > hi).tolist())
            )
        return _make(lo, hi)

    # Arithmetic

    def __neg__(self):
        return _make(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        with np.errstate(invalid="ignore", over="ignore"):
            return _make(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        with np.errstate(invalid="ignore", over="ignore"):
            return _make(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        with np.errstate(invalid="ignore", over="ignore"):
            products = [
                self.lo * other.lo,
                self.lo * other.hi,
                self.hi * other.lo,
                self.hi * other.hi,
            ]
        # 0 * inf counts as 0
        products = [np.where(np.isnan(p), 0.0, p) for p in products]
        lo = np.minimum(np.minimum(products[0], products[1]), np.minimum(products[2], products[3]))
        hi = np.maximum(np.maximum(products[0], products[1]), np.maximum(products[2], products[3]))
        return _make(_down(lo), _up(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if np.any(other.contains_zero()):
            raise DomainError("Division by an interval containing zero")
        with np.errstate(invalid="ignore", over="ignore"):
            quotients = [
                self.lo / other.lo,
                self.lo / other.hi,
                self.hi / other.lo,
                self.hi / other.hi,
            ]
        lo = np.minimum(np.minimum(quotients[0], quotients[1]), np.minimum(quotients[2], quotients[3]))
        hi = np.maximum(np.maximum(quotients[0], quotients[1]), np.maximum(quotients[2], quotients[3]))
        return _make(_down(lo), _up(hi))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __abs__(self):
        return _make(self.mig(), self.mag())

    def sqr(self):
        low = self.mig()
        high = self.mag()
        with np.errstate(over="ignore"):
            lo = np.where(low == 0.0, 0.0, _down(low * low))
            return _make(np.maximum(lo, 0.0), _up(high * high))

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, np.integer)) or exponent < 0:
            raise ValueError("Only non-negative integer powers are supported")
        if exponent == 0:
            return Interval(np.ones(self.shape))
        if exponent == 1:
            return self
        if exponent % 2 == 0:
            return (self ** (exponent // 2)).sqr()
        return self * self ** (exponent - 1)

    def sqrt(self):
        if np.any(self.lo < 0.0):
            raise DomainError("sqrt of an interval with negative part")
        return _make(np.maximum(_down(np.sqrt(self.lo)), 0.0), _up(np.sqrt(self.hi)))

    def exp(self):
        with np.errstate(over="ignore"):
            return _make(np.maximum(_down(np.exp(self.lo)), 0.0), _up(np.exp(self.hi)))

    def sum(self, axis=None):
        lo, hi = _rounded_sum(self.lo, self.hi, axis)
        return _make(lo, hi)

    def __matmul__(self, other):
        a = self
        b = _coerce(other)
        if a.ndim == 0 or b.ndim == 0:
            raise ValueError("matmul needs at least one-dimensional operands")
        inner_a = a.shape[-1]
        inner_b = b.shape[0]
        if inner_a != inner_b:
            raise ValueError(
                "Dimension mismatch in matmul: {} @ {}".format(a.shape, b.shape)
            )
        if a.ndim == 1 and b.ndim == 1:
            return (a * b).sum()
        if a.ndim == 1:
            return (a[:, None] * b).sum(axis=0)
        if b.ndim == 1:
            return (a * b[None, :]).sum(axis=1)
        return (a[:, :, None] * b[None, :, :]).sum(axis=1)

    def __rmatmul__(self, other):
        return _coerce(other) @ self

    # Comparison and display

    def __eq__(self, other):
        if not isinstance(other, Interval):
            try:
                other = Interval(other)
            except (TypeError, ValueError):
                return NotImplemented
        return bool(
            self.shape == other.shape
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self):
        if self.ndim == 0:
            return "Interval([%r, %r])" % (float(self.lo), float(self.hi))
        return "Interval(lo=%r, hi=%r)" % (self.lo.tolist(), self.hi.tolist())

    def to_text(self):
        """Entry-wise `[lo, hi]` strings with 17 significant digits"""
        lo = self.lo.ravel()
        hi = self.hi.ravel()
        return ["[%.17g, %.17g]" % (lo[i], hi[i]) for i in range(lo.size)]


IntervalVector = Interval
IntervalMatrix = Interval


def hull(a, b):
    return _coerce(a).hull(b)


def intersect(a, b):
    return _coerce(a).intersect(b)


def mid(a):
    return _coerce(a).mid()


def diam(a):
    return _coerce(a).diam()


def mat_vec(matrix, vector):
    return _coerce(matrix) @ _coerce(vector)


def mat_mul(left, right):
    return _coerce(left) @ _coerce(right)


def horner(coefficients, t):
    """Evaluate sum_k c_k t^k for interval (or point) t, coefficients ordered by k"""
    t = _coerce(t)
    result = _coerce(coefficients[-1])
    for coefficient in reversed(coefficients[:-1]):
        result = coefficient + t * result
    return result


def verified_inverse(B):
    """Interval matrix guaranteed to contain the exact inverse of the point matrix B.

    Approximate inverse R, residual E = I - R B, Neumann-series bound on ||B^-1 - R||
    and a few Krawczyk sweeps X <- (R + E X) & X.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("verified_inverse expects a square matrix, got {}".format(B.shape))
    if not np.all(np.isfinite(B)):
        raise SingularMatrix("Matrix has non-finite entries")
    try:
        R = np.linalg.inv(B)
    except np.linalg.LinAlgError as err:
        raise SingularMatrix(str(err))
    condition = np.linalg.cond(B)
    if not condition < CONDITION_LIMIT:
        raise SingularMatrix("Condition number %.3e exceeds limit" % condition)

    n = B.shape[0]
    R_box = Interval(R)
    residual = Interval.eye(n) - R_box @ Interval(B)
    beta = residual.norm_inf()
    if not beta < 1.0:
        raise SingularMatrix("Residual norm %.3e is not below one" % beta)

    beta_box = Interval(beta)
    rho = float((beta_box * R_box.norm_inf() / (1.0 - beta_box)).hi)
    inverse = R_box + Interval(-rho, rho)
    for _ in range(KRAWCZYK_SWEEPS):
        inverse = (R_box + residual @ inverse).intersect(inverse)
    return inverse
