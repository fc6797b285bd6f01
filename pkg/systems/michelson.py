from interval import Interval
from jets import Const, VectorField, variables


class Michelson(VectorField):
    def __init__(self, c="0.8"):
        """ Michelson system x' = y, y' = z, z' = c^2 - y - x^2 / 2

        Arguments:
            c (str): parameter as a decimal string
        """
        x, y, z = variables(3, ["x", "y", "z"])
        c_squared = Const(Interval.from_string(c).sqr())
        super(Michelson, self).__init__(
            [y, z, c_squared - y - Const("0.5") * (x * x)],
            names=["x", "y", "z"],
            parameters={"c": c},
            name="michelson",
        )
