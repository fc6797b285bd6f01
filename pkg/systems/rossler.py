from jets import Const, VectorField, variables


class Rossler4D(VectorField):
    def __init__(self, a="0.25", b="3", c="-0.5", d="0.05"):
        """ Four dimensional Roessler system in coordinates ordered (y, x, z, w)

            x' = -y - w, y' = x + a y + z, z' = d y + c w, w' = x w + b

        Putting y first makes the standard section y = 0 the first coordinate plane.

        Arguments:
            a, b, c, d (str): parameters as decimal strings
        """
        y, x, z, w = variables(4, ["y", "x", "z", "w"])
        super(Rossler4D, self).__init__(
            [
                x + Const(a) * y + z,
                -y - w,
                Const(d) * y + Const(c) * w,
                x * w + Const(b),
            ],
            names=["y", "x", "z", "w"],
            parameters={"a": a, "b": b, "c": c, "d": d},
            name="rossler4d",
        )
