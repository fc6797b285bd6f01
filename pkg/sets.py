import re

import numpy as np

from interval import Interval, verified_inverse


class FunctionMap:
    """A map g with rigorous value and Jacobian, as consumed by `Doubleton.eval`"""

    def __init__(self, value, jacobian):
        self.value = value
        self.jacobian = jacobian


def compose_linear(A, g):
    """The map x -> A g(x) for an interval (or point) matrix A"""
    A = A if isinstance(A, Interval) else Interval(A)
    return FunctionMap(lambda X: A @ g.value(X), lambda X: A @ g.jacobian(X))


class Doubleton:
    """Set x + C r0 + Q q.

    Arguments:
        x (ndarray): centre point
        C (ndarray): point matrix carrying the initial error
        r0 (Interval): initial error box, must contain 0
        Q (ndarray): point matrix carrying the accumulated error, invertible
        q (Interval): accumulated error box, must contain 0
    """

    kind = "doubleton"

    def __init__(self, x, C, r0, Q, q):
        self.x = np.asarray(x, dtype=float)
        self.C = np.asarray(C, dtype=float)
        self.r0 = r0 if isinstance(r0, Interval) else Interval(r0)
        self.Q = np.asarray(Q, dtype=float)
        self.q = q if isinstance(q, Interval) else Interval(q)
        n = self.x.shape[0]
        if self.C.shape[0] != n or self.Q.shape != (n, n) or self.q.shape != (n,):
            raise ValueError("Inconsistent doubleton dimensions for n = {}".format(n))
        if self.C.shape[1] != self.r0.shape[0]:
            raise ValueError("C has {} columns but r0 has {} entries".format(self.C.shape[1], self.r0.shape[0]))
        if not np.all(self.r0.contains_zero()) or not np.all(self.q.contains_zero()):
            raise ValueError("Doubleton error boxes must contain zero")

    @classmethod
    def from_point(cls, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[0]
        return cls(x, np.eye(n), Interval.zeros(n), np.eye(n), Interval.zeros(n))

    @property
    def dimension(self):
        return self.x.shape[0]

    def _forms(self):
        """(matrix, box) pairs whose images are summed onto x"""
        return [(self.C, self.r0), (self.Q, self.q)]

    def enclose(self):
        total = Interval(self.x)
        for matrix, box in self._forms():
            total = total + Interval(matrix) @ box
        return total

    def eval(self, g):
        """Enclosure of g over the set: direct evaluation intersected with the mean-value form"""
        hull = self.enclose()
        result = g.value(hull)
        derivative = g.jacobian(hull)
        mean_value = g.value(Interval(self.x))
        for matrix, box in self._forms():
            mean_value = mean_value + (derivative @ Interval(matrix)) @ box
        return result.intersect(mean_value)

    def affine_transform(self, A, y):
        """Enclosure of A (X - y) for an interval matrix A and a point y"""
        A = A if isinstance(A, Interval) else Interval(A)
        shift = Interval(self.x) - Interval(np.asarray(y, dtype=float))
        direct = shift
        for matrix, box in self._forms():
            direct = direct + Interval(matrix) @ box
        result = A @ direct
        factored = A @ shift
        for matrix, box in self._forms():
            factored = factored + (A @ Interval(matrix)) @ box
        return result.intersect(factored)

    def fold(self):
        return self

    def fields(self):
        return {
            "x": Interval(self.x),
            "C": Interval(self.C),
            "r0": self.r0,
            "Q": Interval(self.Q),
            "q": self.q,
        }

    def to_text(self):
        return format_fields(self.kind, self.fields())

    @classmethod
    def from_text(cls, text):
        kind, fields = parse_fields(text)
        if kind not in SET_KINDS:
            raise ValueError("Unknown set kind {}".format(kind))
        return SET_KINDS[kind].from_fields(fields)

    @classmethod
    def from_fields(cls, fields):
        return cls(fields["x"].mid(), fields["C"].mid(), fields["r0"], fields["Q"].mid(), fields["q"])

    def __repr__(self):
        return "%s(x=%s, r0=%r, q=%r)" % (type(self).__name__, self.x.tolist(), self.r0, self.q)


class Box(Doubleton):
    kind = "box"

    @classmethod
    def from_interval(cls, box):
        box = box if isinstance(box, Interval) else Interval(box)
        x = box.mid()
        n = x.shape[0]
        return cls(x, np.eye(n), box - Interval(x), np.eye(n), Interval.zeros(n))


class Tripleton(Doubleton):
    """Intersection of x + C r0 + Q q and x + C r0 + B r"""

    kind = "tripleton"

    def __init__(self, x, C, r0, Q, q, B, r):
        super().__init__(x, C, r0, Q, q)
        self.B = np.asarray(B, dtype=float)
        self.r = r if isinstance(r, Interval) else Interval(r)
        if self.B.shape != self.Q.shape or self.r.shape != self.q.shape:
            raise ValueError("Tripleton factor B, r does not match Q, q")
        if not np.all(self.r.contains_zero()):
            raise ValueError("Tripleton error box r must contain zero")

    def _second(self):
        return Doubleton(self.x, self.C, self.r0, self.B, self.r)

    def enclose(self):
        return super().enclose().intersect(self._second().enclose())

    def eval(self, g):
        return super().eval(g).intersect(self._second().eval(g))

    def affine_transform(self, A, y):
        return super().affine_transform(A, y).intersect(self._second().affine_transform(A, y))

    def fold(self):
        """Doubleton containing the set, with q tightened by the B-form.

        Each r0 occurrence is independent, so Q q lies in C (r0 - r0) + B r.
        """
        Q_inverse = verified_inverse(self.Q)
        through_b = Interval(self.C) @ (self.r0 - self.r0) + Interval(self.B) @ self.r
        q = self.q.intersect(Q_inverse @ through_b)
        return Doubleton(self.x, self.C, self.r0, self.Q, q)

    def fields(self):
        fields = super().fields()
        fields["B"] = Interval(self.B)
        fields["r"] = self.r
        return fields

    @classmethod
    def from_fields(cls, fields):
        return cls(
            fields["x"].mid(),
            fields["C"].mid(),
            fields["r0"],
            fields["Q"].mid(),
            fields["q"],
            fields["B"].mid(),
            fields["r"],
        )


SET_KINDS = {"doubleton": Doubleton, "box": Box, "tripleton": Tripleton}

_ENTRY = re.compile(r"^(\w+)\[([0-9, ]*)\]\s*=\s*\[([^,\]]+),\s*([^\]]+)\]$")


def format_fields(kind, fields):
    """Text form: a `# kind` header and one `name[i, j] = [lo, hi]` line per entry"""
    lines = ["# %s" % kind]
    for name, value in fields.items():
        value = value if isinstance(value, Interval) else Interval(value)
        for index in np.ndindex(*value.shape):
            lines.append(
                "%s[%s] = [%.17g, %.17g]"
                % (name, ", ".join(str(i) for i in index), value.lo[index], value.hi[index])
            )
    return "\n".join(lines) + "\n"


def parse_fields(text):
    kind = None
    entries = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            kind = line[1:].strip()
            continue
        match = _ENTRY.match(line)
        if match is None:
            raise ValueError("Cannot parse set line {!r}".format(line))
        name, index, lo, hi = match.groups()
        index = tuple(int(i) for i in index.split(",") if i.strip())
        entries.setdefault(name, []).append((index, float(lo), float(hi)))

    fields = {}
    for name, items in entries.items():
        if items[0][0]:
            shape = tuple(max(index[d] for index, _, _ in items) + 1 for d in range(len(items[0][0])))
        else:
            shape = ()
        lo = np.zeros(shape)
        hi = np.zeros(shape)
        for index, low, high in items:
            lo[index] = low
            hi[index] = high
        fields[name] = Interval(lo, hi)
    return kind, fields
