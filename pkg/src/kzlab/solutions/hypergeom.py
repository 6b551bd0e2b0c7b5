"""Gauss hypergeometric function with analytic continuation off the cut ``[1, inf)``."""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from ..algebra import DomainError

SERIES_RADIUS = 0.7
CUT_TOL = 1e-12


def _series(a, b, c, x, max_terms=5000):
    term = 1.0 + 0j
    total = term
    small = 0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total += term
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
        if term == 0:
            return total
    raise DomainError("hypergeometric series did not converge")


def _check(c, x):
    if abs(c - np.round(c.real)) < 1e-14 and c.real <= 0.5:
        raise DomainError(f"c = {c} is a non-positive integer")
    if abs(x.imag) < CUT_TOL and x.real >= 1.0:
        raise DomainError(f"x = {x} lies on the branch cut [1, inf)")


def _ode(a, b, c, x):
    # integrate the hypergeometric equation along the ray from 0.5 * x/|x| to x
    x0 = 0.5 * x / abs(x)
    y0 = np.array([_series(a, b, c, x0), a * b / c * _series(a + 1, b + 1, c + 1, x0)])
    dx = x - x0

    def rhs(s, y):
        u = x0 + s * dx
        d2 = (a * b * y[0] - (c - (a + b + 1) * u) * y[1]) / (u * (1 - u))
        return np.array([y[1] * dx, d2 * dx])

    sol = solve_ivp(rhs, (0.0, 1.0), y0.astype(complex), method="DOP853", rtol=1e-13, atol=1e-300)
    if not sol.success:
        raise DomainError(f"continuation failed: {sol.message}")
    return sol.y[:, -1]


def hyp2f1(a, b, c, x) -> complex:
    """Principal branch of ``2F1(a, b; c; x)``.

    Power series for ``|x| <= 0.7``, Pfaff's transformation when
    ``|x/(x-1)| <= 0.7`` and otherwise continuation by integrating the
    hypergeometric equation along a ray from ``|x| = 0.5``.
    """
    a, b, c, x = complex(a), complex(b), complex(c), complex(x)
    _check(c, x)
    if abs(x) <= SERIES_RADIUS:
        return _series(a, b, c, x)
    y = x / (x - 1)
    if abs(y) <= SERIES_RADIUS:
        return (1 - x) ** (-a) * _series(a, c - b, c, y)
    return complex(_ode(a, b, c, x)[0])


def hyp2f1_deriv(a, b, c, x) -> complex:
    """``d/dx 2F1(a,b;c;x) = (ab/c) 2F1(a+1,b+1;c+1;x)``."""
    a, b, c = complex(a), complex(b), complex(c)
    return a * b / c * hyp2f1(a + 1, b + 1, c + 1, x)
