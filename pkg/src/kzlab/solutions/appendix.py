"""Hypergeometric flat sections of the four-point ``m = n = 2`` KZ system on ``C[S_2]``."""
from __future__ import annotations

import itertools

import numpy as np

from ..algebra import DomainError, all_casimirs, sym_model
from .hypergeom import hyp2f1, hyp2f1_deriv

# relabelings under which the displayed pair of equations is repeated
SYMMETRIES = ((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1))


def cross_ratio(z) -> complex:
    z1, z2, z3, z4 = z
    return (z1 - z4) * (z3 - z2) / ((z1 - z2) * (z3 - z4))


def appendix_section(z, hbar, t, c1, c2, cut_margin=1e-6):
    """Return ``(f, g)`` so that ``f e + g (12)`` solves the KZ system.

    ``f = A / (z13 z24)^Delta`` and ``g = B / (z14 z23)^Delta`` with
    ``Delta = t hbar``; ``A`` combines the two local hypergeometric solutions at
    the cross ratio and ``B`` is built from ``dA/dz1`` by the contiguous
    derivative.  Powers use principal branches.
    """
    z = np.asarray(z, dtype=complex)
    if len(z) != 4 or min(abs(a - b) for a, b in itertools.combinations(z, 2)) == 0:
        raise DomainError("need four distinct points")
    hbar, t = complex(hbar), complex(t)
    D = t * hbar
    z1, z2, z3, z4 = z
    z12, z13, z14, z23, z24 = z1 - z2, z1 - z3, z1 - z4, z2 - z3, z2 - z4
    x = cross_ratio(z)
    if abs(x.imag) < cut_margin and x.real > 1 - cut_margin:
        raise DomainError(f"cross ratio {x} too close to the cut")
    pw = lambda w, e: np.exp(e * np.log(w))
    a1, b1, cc1 = 1 - hbar - D, 1 + hbar - D, 2 - D
    a2, b2, cc2 = -hbar, hbar, D
    F1, F2 = hyp2f1(a1, b1, cc1, x), hyp2f1(a2, b2, cc2, x)
    dF1, dF2 = hyp2f1_deriv(a1, b1, cc1, x), hyp2f1_deriv(a2, b2, cc2, x)
    A = c1 * pw(x, 1 - D) * F1 + c2 * F2
    dA_dx = c1 * ((1 - D) * pw(x, -D) * F1 + pw(x, 1 - D) * dF1) + c2 * dF2
    dx_dz1 = x * (1 / z14 - 1 / z12)
    dA = dA_dx * dx_dz1
    B = pw(z14, D) * pw(z23, D - 1) * pw(z13, 1 - D) * pw(z24, -D) * z12 * dA / hbar
    f = A / (pw(z13, D) * pw(z24, D))
    g = B / (pw(z14, D) * pw(z23, D))
    return complex(f), complex(g)


def richardson_derivative(func, z, k, step):
    """Central difference in ``z_k`` improved by one Richardson step."""
    z = np.asarray(z, dtype=complex)

    def central(h):
        e = np.zeros(len(z), dtype=complex)
        e[k] = h
        return (np.asarray(func(z + e)) - np.asarray(func(z - e))) / (2 * h)

    return (4 * central(step / 2) - central(step)) / 3


def kz_residuals(z, hbar, t, c1, c2, rel_step=1e-3) -> list[float]:
    """Relative residuals of ``d_k phi = hbar sum_j Omega_kj phi / (z_k - z_j)``.

    Checked for ``k = 1..4``: the first is the displayed system, the others its
    images under the relabelings in :data:`SYMMETRIES`.
    """
    z = np.asarray(z, dtype=complex)
    om = all_casimirs(sym_model(2, t))
    phi = lambda w: np.array(appendix_section(w, hbar, t, c1, c2))
    val = phi(z)
    gap = min(abs(a - b) for a, b in itertools.combinations(z, 2))
    out = []
    for k in range(4):
        d = richardson_derivative(phi, z, k, rel_step * gap)
        rhs = sum(hbar * om[min(k, j) + 1, max(k, j) + 1] @ val / (z[k] - z[j])
                  for j in range(4) if j != k)
        out.append(float(np.linalg.norm(d - rhs) / max(np.linalg.norm(d), np.linalg.norm(val))))
    return out


def displayed_residual(z, hbar, t, c1, c2, perm=(1, 2, 3, 4), rel_step=1e-3) -> float:
    """Residual of the displayed pair of equations after relabeling by ``perm``.

    With ``perm = pi`` the equations read ``h^-1 d_{pi1} f = g/z_{pi1 pi2} -
    (t f + g)/z_{pi1 pi3}`` and ``h^-1 d_{pi1} g = f/z_{pi1 pi2} - (f + t g)/z_{pi1 pi4}``.
    """
    z = np.asarray(z, dtype=complex)
    p = [k - 1 for k in perm]
    zz = lambda a, b: z[p[a]] - z[p[b]]
    phi = lambda w: np.array(appendix_section(w, hbar, t, c1, c2))
    f, g = phi(z)
    gap = min(abs(a - b) for a, b in itertools.combinations(z, 2))
    df, dg = richardson_derivative(phi, z, p[0], rel_step * gap) / hbar
    r1 = df - (g / zz(0, 1) - (t * f + g) / zz(0, 2))
    r2 = dg - (f / zz(0, 1) - (f + t * g) / zz(0, 3))
    return float(np.hypot(abs(r1), abs(r2)) / max(abs(df) + abs(dg), abs(f) + abs(g)))
