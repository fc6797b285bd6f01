from jets import Const, VectorField, variables


class VanDerPol(VectorField):
    def __init__(self, mu="0.2"):
        """ van der Pol oscillator x' = y, y' = mu y (1 - x^2) - x

        Arguments:
            mu (str): damping as a decimal string
        """
        x, y = variables(2, ["x", "y"])
        super(VanDerPol, self).__init__(
            [y, Const(mu) * y * (Const("1") - x * x) - x],
            names=["x", "y"],
            parameters={"mu": mu},
            name="vanderpol",
        )
