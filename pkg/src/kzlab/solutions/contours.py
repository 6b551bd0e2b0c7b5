"""Nested keyhole contours, branch-tracked logarithms and the residue-limit integral.

Each variable runs along a keyhole around the origin: in along the ray at
angle ``-theta`` from ``R`` to ``r``, clockwise around the circle of radius
``r`` and out along the ray at angle ``+theta``.  A variable at nesting depth
``k`` uses ``r_k = rho * step^(k-1)`` and ``theta_k = theta0 + (k-1) dtheta``,
so deeper contours are wider circles with wider tails and no two contours
meet.  Rays are discretized by Gauss-Legendre panels in ``log|t|``, circles by
panels of bounded angle.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..algebra import DomainError


@dataclass(frozen=True)
class ContourSpec:
    """Quadrature description of the nested cycle for an ordering ``l``.

    ``ordering[i]`` is the depth of variable ``i`` (``l(i)``, 1-based).
    """

    ordering: tuple
    rho: float = 0.3
    step: float = 2.2
    theta0: float = 0.15
    dtheta: float = 0.3
    nodes: int = 16
    du: float = 0.35
    dphi: float = 0.9
    tail_decay: float = 40.0

    def __post_init__(self):
        l = tuple(int(x) for x in self.ordering)
        if sorted(l) != list(range(1, len(l) + 1)):
            raise DomainError(f"ordering {l} is not a permutation")
        object.__setattr__(self, "ordering", l)
        if self.step <= 1 or self.rho <= 0:
            raise DomainError("radii must be positive and strictly increasing")
        top = self.theta0 + (len(l) - 1) * self.dtheta
        if top >= np.pi / 2:
            raise DomainError("tail angles must stay below pi/2")

    @property
    def mbar(self) -> int:
        return len(self.ordering)

    def radius(self, depth: int) -> float:
        return self.rho * self.step ** (depth - 1)

    def angle(self, depth: int) -> float:
        return self.theta0 + (depth - 1) * self.dtheta


def inverse_permutation(p) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p, start=1):
        out[v - 1] = i
    return tuple(out)


def keyhole(r, theta, R, n=16, du=0.35, dphi=0.9):
    """Nodes and complex weights of one keyhole, ordered along the path."""
    if not (0 < r < R):
        raise DomainError("need 0 < r < R")
    x, w = np.polynomial.legendre.leggauss(n)
    ts, ws = [], []

    def ray(u_from, u_to, phase):
        edges = np.linspace(u_from, u_to, int(np.ceil(abs(u_to - u_from) / du)) + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            s = np.exp((a + b) / 2 + (b - a) / 2 * x)
            ts.append(s * phase)
            ws.append(w * (b - a) / 2 * s * phase)

    U, u0 = np.log(R), np.log(r)
    ray(U, u0, np.exp(-1j * theta))
    p0, p1 = -theta, -(2 * np.pi - theta)
    edges = np.linspace(p0, p1, int(np.ceil(abs(p1 - p0) / dphi)) + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        t = r * np.exp(1j * ((a + b) / 2 + (b - a) / 2 * x))
        ts.append(t)
        ws.append(w * (b - a) / 2 * 1j * t)
    ray(u0, U, np.exp(1j * theta))
    return np.concatenate(ts), np.concatenate(ws)


def decay_rate(kappa, theta) -> float:
    """Worst decay of ``exp(kappa t)`` along the two rays at ``+-theta``."""
    return min(-(kappa * np.exp(1j * s * theta)).real for s in (1, -1))


def contour_nodes(spec: ContourSpec, kappa):
    """Per-variable nodes and weights for integrands decaying like ``exp(kappa_i t_i)``.

    Returns
    -------
    contours : list of (nodes, weights)
    tail : float
        ``max_i exp(-rate_i R_i)``, the size of the neglected exponential tail.
    """
    kappa = np.asarray(kappa, dtype=complex)
    if kappa.shape != (spec.mbar,):
        raise DomainError(f"need {spec.mbar} decay coefficients")
    out, tail = [], 0.0
    for i, depth in enumerate(spec.ordering):
        r, th = spec.radius(depth), spec.angle(depth)
        rate = decay_rate(kappa[i], th)
        if rate <= 0:
            raise DomainError(f"variable {i + 1} does not decay along its tails (rate {rate:.3g})")
        R = max(spec.tail_decay / rate, 3 * r)
        out.append(keyhole(r, th, R, spec.nodes, spec.du, spec.dphi))
        tail = max(tail, float(np.exp(-rate * R)))
    return out, tail


def unwrap_log(values) -> np.ndarray:
    """Continuous logarithm along an ordered sample, starting on the principal branch."""
    values = np.asarray(values, dtype=complex)
    step = np.angle(values[1:] / values[:-1])
    if len(step) and np.abs(step).max() > 1.0:
        raise DomainError(f"argument jumps by {np.abs(step).max():.2f} between samples")
    arg = np.angle(values[0]) + np.concatenate([[0.0], np.cumsum(step)])
    return np.log(np.abs(values)) + 1j * arg


def pair_log(ta, tb) -> np.ndarray:
    """Continuous ``log(t_a - t_b)`` on the product grid.

    Continued along the first row, then down each column.
    """
    D = ta[:, None] - tb[None, :]
    row = unwrap_log(D[0])
    out = np.empty_like(D)
    for b in range(D.shape[1]):
        col = unwrap_log(D[:, b])
        out[:, b] = col - col[0] + row[b]
    return out


def residue_limit_check(l, sigma, zprime, c=None, spec: ContourSpec | None = None) -> complex:
    """``int exp(sum (z'_c(i) - z'_c(i)+1) t_i) omega_sigma`` over the nested cycle.

    ``c`` defaults to ``c(i) = i``, so ``zprime`` has ``len(l) + 1`` points.
    The expected value is ``(-2 pi i)^mbar`` when ``sigma = l^-1 o w`` with
    ``w(i) = mbar + 1 - i``, and zero otherwise.
    """
    mbar = len(l)
    c = tuple(range(1, mbar + 1)) if c is None else tuple(c)
    zp = np.asarray(zprime, dtype=complex)
    kappa = np.array([zp[k - 1] - zp[k] for k in c])
    spec = ContourSpec(tuple(l)) if spec is None else spec
    if spec.ordering != tuple(l):
        raise DomainError("contour spec ordering differs from l")
    cont, _ = contour_nodes(spec, kappa)
    vec = [wt * np.exp(kappa[i] * t) for i, (t, wt) in enumerate(cont)]
    s = [k - 1 for k in sigma]
    acc = vec[s[-1]] / cont[s[-1]][0]
    for a, b in zip(reversed(s[:-1]), reversed(s[1:])):
        G = 1 / (cont[a][0][:, None] - cont[b][0][None, :])
        acc = vec[a] * (G @ acc)
    return complex(acc.sum())


def residue_target(l, sigma) -> complex:
    mbar = len(l)
    linv = inverse_permutation(l)
    w = [mbar - k for k in range(mbar)]
    target = tuple(linv[w[k] - 1] for k in range(mbar))
    return (-2j * np.pi) ** mbar if tuple(sigma) == target else 0j


def all_orderings(mbar):
    return list(itertools.permutations(range(1, mbar + 1)))
