"""Exact rational integrals of monomials over polygons (test oracle).

Uses the divergence theorem with the field (x^(a+1) y^b / (a+1), 0): the
area integral of x^a y^b becomes a sum of edge integrals of polynomials in
the edge parameter, which are expanded binomially and integrated exactly.
No quadrature is involved.
"""
from fractions import Fraction
from math import comb


def monomial_integral(vertices, a, b):
    """Exact integral of ``x^a y^b`` over a CCW polygon with rational vertices."""
    verts = [(Fraction(x), Fraction(y)) for x, y in vertices]
    total = Fraction(0)
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        dx, dy = x1 - x0, y1 - y0
        if dy == 0:
            continue
        # integral over t in [0, 1] of (x0 + t dx)^(a+1) (y0 + t dy)^b dt
        s = Fraction(0)
        for i in range(a + 2):
            ci = comb(a + 1, i) * x0 ** (a + 1 - i) * dx**i
            for j in range(b + 1):
                s += ci * comb(b, j) * y0 ** (b - j) * dy**j / (i + j + 1)
        total += s * dy / (a + 1)
    return total
