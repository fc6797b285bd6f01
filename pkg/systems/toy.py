from jets import Const, VectorField, variables


class HarmonicOscillator(VectorField):
    def __init__(self):
        """ x' = y, y' = -x; every orbit has period 2 pi and monodromy Id """
        x, y = variables(2, ["x", "y"])
        super(HarmonicOscillator, self).__init__([y, -x], names=["x", "y"], name="harmonic")


class ConstantField(VectorField):
    def __init__(self, velocity):
        """ x' = velocity

        Arguments:
            velocity (list of str): components as decimal strings
        """
        super(ConstantField, self).__init__(
            [Const(v) for v in velocity], name="constant"
        )


class LinearDiagonal(VectorField):
    def __init__(self, rates):
        """ x_i' = rates[i] x_i

        Arguments:
            rates (list of str): diagonal entries as decimal strings
        """
        xs = variables(len(rates))
        super(LinearDiagonal, self).__init__(
            [Const(rate) * x for rate, x in zip(rates, xs)], name="linear"
        )


class HopfNormalForm(VectorField):
    def __init__(self):
        """ r' = r (1 - r^2), theta' = 1 in cartesian form

        The unit circle is a periodic orbit with period 2 pi and nontrivial multiplier
        exp(-4 pi).
        """
        x, y = variables(2, ["x", "y"])
        radius_squared = x * x + y * y
        super(HopfNormalForm, self).__init__(
            [x - y - x * radius_squared, x + y - y * radius_squared],
            names=["x", "y"],
            name="hopf",
        )
