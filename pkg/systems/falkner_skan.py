from jets import Const, VectorField, variables


class FalknerSkan(VectorField):
    def __init__(self, c="250"):
        """ Falkner-Skan system x' = y, y' = z, z' = c (y^2 - 1) - x z

        Stiff near its periodic orbit for large c.

        Arguments:
            c (str): parameter as a decimal string
        """
        x, y, z = variables(3, ["x", "y", "z"])
        super(FalknerSkan, self).__init__(
            [y, z, Const(c) * (y * y - Const("1")) - x * z],
            names=["x", "y", "z"],
            parameters={"c": c},
            name="falkner-skan",
        )
