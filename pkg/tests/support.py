"""Exact-arithmetic oracles shared by the test modules.

The explicit series for L_k and its derivative are evaluated in Fraction
arithmetic, so they are exact for rational arguments and immune to the
cancellation that limits the float recurrence.
"""

import math
from fractions import Fraction


def laguerre_series(k, x):
    """L_k(x) = sum_{m=0}^{k} (-1)^m C(k,m) x^m / m!, exact for rational x."""
    x = Fraction(x)
    total = Fraction(0)
    for m in range(k + 1):
        total += Fraction((-1) ** m * math.comb(k, m), math.factorial(m)) * x**m
    return total


def laguerre_derivative_series(k, x):
    """Term-by-term derivative of the explicit series, exact for rational x."""
    x = Fraction(x)
    total = Fraction(0)
    for m in range(1, k + 1):
        total += Fraction((-1) ** m * math.comb(k, m), math.factorial(m)) * m * x ** (m - 1)
    return total
