"""Small bivariate polynomial arithmetic used to build the test fields.

Polynomials are dictionaries mapping monomial exponents (i, j) to the
coefficient of x1**i * x2**j.  This is enough to construct the built-in
approximation families and to accept user coefficient tables from the CLI.
"""

from __future__ import annotations


class Poly2:
    """Bivariate polynomial with dense-dict coefficient storage."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                if c != 0.0:
                    self.coeffs[(int(i), int(j))] = float(c)

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def x1(cls):
        return cls({(1, 0): 1.0})

    @classmethod
    def x2(cls):
        return cls({(0, 1): 1.0})

    def __add__(self, other):
        if not isinstance(other, Poly2):
            other = Poly2.const(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly2({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly2):
            other = Poly2.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly2.const(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            return Poly2({k: c * other for k, c in self.coeffs.items()})
        out = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0.0) + c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def dx1(self):
        return Poly2({(i - 1, j): i * c for (i, j), c in self.coeffs.items() if i > 0})

    def dx2(self):
        return Poly2({(i, j - 1): j * c for (i, j), c in self.coeffs.items() if j > 0})

    def laplacian(self):
        return self.dx1().dx1() + self.dx2().dx2()

    def __call__(self, x1, x2):
        v = 0.0
        for (i, j), c in self.coeffs.items():
            v += c * x1**i * x2**j
        return v

    def degree(self):
        return max((i + j for i, j in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        terms = sorted(self.coeffs.items())
        return "Poly2(" + ", ".join(f"x1^{i} x2^{j}: {c:g}" for (i, j), c in terms) + ")"
