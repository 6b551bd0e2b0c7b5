"""Hypergeometric integral solutions ``u_l(z)`` by product quadrature over nested keyholes."""
from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from ..algebra import DomainError
from .contours import ContourSpec, contour_nodes, inverse_permutation, pair_log, unwrap_log
from .master import CorrespondenceTable, MasterData, rational_omega

# orderings l^-1 fixed in the four-point example, stored as l
FOUR_POINT_ORDERINGS = {"l1": inverse_permutation((2, 3, 1, 4)),
                      "l2": inverse_permutation((2, 1, 4, 3))}


@dataclass
class IntegralResult:
    u: np.ndarray
    du: np.ndarray | None
    tail: float
    nodes: list

    def as_dict(self) -> dict:
        return {"u": self.u, "du": self.du, "tail": self.tail, "nodes": self.nodes}


def _grid(data, z, spec, include_single):
    hbar = data.hbar
    kappa = hbar * data.phase_weights(z)
    cont, tail = contour_nodes(spec, kappa)
    T = [t for t, _ in cont]
    a = data.single_exponents() if include_single else np.zeros(data.mbar)
    # Phi^{-hbar} = prod t^{hbar a} prod (t_i - t_j)^{-hbar e_ij}
    base = [wt * np.exp(kappa[i] * t + hbar * a[i] * unwrap_log(t))
            for i, (t, wt) in enumerate(cont)]
    logs = {(i, j): pair_log(T[i], T[j]) for i, j in data.pair_exponents()}
    return T, base, logs, tail


def _contract(T, vecs, pair_mats):
    letters = string.ascii_letters
    ops, subs = [], []
    for i, v in enumerate(vecs):
        ops.append(v)
        subs.append(letters[i])
    for (i, j), M in pair_mats.items():
        ops.append(M)
        subs.append(letters[i] + letters[j])
    return complex(np.einsum(",".join(subs) + "->", *ops, optimize="greedy"))


def integral_solution(l, z, data: MasterData, table: CorrespondenceTable,
                      spec: ContourSpec | None = None, include_single=True,
                      derivatives=False, signed=False) -> IntegralResult:
    """Quadrature of ``exp(hbar sum (z_c(i) - z_c(i)+1) t_i) Phi^{-hbar} omega`` over ``Gamma_l``.

    Parameters
    ----------
    l : sequence of int
        Depth of each integration variable in the nested cycle.
    z : array_like
        Base point ``z_1..z_d``.
    include_single : bool
        Keep the factors ``t_i^{hbar (alpha_c(i), gamma_top)}`` of the master
        function; without them the integrand is the four-point display.
    derivatives : bool
        Also return ``d u / d z_k`` (shape ``(dim, d)``), computed by
        differentiating under the integral sign.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape != (data.d,):
        raise DomainError(f"need {data.d} base points")
    spec = ContourSpec(tuple(l)) if spec is None else spec
    if spec.ordering != tuple(l):
        raise DomainError("contour spec ordering differs from l")
    T, base, logs, tail = _grid(data, z, spec, include_single)
    hbar = data.hbar
    forms = rational_omega(data, table, signed)
    expo = data.pair_exponents()
    diffs = {k: T[k[0]][:, None] - T[k[1]][None, :] for k in logs}
    phi_pairs = {k: np.exp(-hbar * expo[k] * L) for k, L in logs.items() if expo[k]}
    cache = {}

    def pair_power(k, p):
        if (k, p) not in cache:
            M = phi_pairs.get(k)
            D = diffs[k].astype(complex) ** p if p else None
            cache[k, p] = D if M is None else (M if D is None else M * D)
        return cache[k, p]

    nvar = data.mbar
    extra = [None] + list(range(nvar)) if derivatives else [None]
    vals = np.zeros((len(forms), len(extra)), dtype=complex)
    for r, form in enumerate(forms):
        for coef, single, pairs in form.terms:
            pp = dict(pairs)
            keys = set(phi_pairs) | set(pp)
            mats = {k: pair_power(k, pp.get(k, 0)) for k in sorted(keys)}
            mats = {k: v for k, v in mats.items() if v is not None}
            vecs = [base[i] * T[i] ** single[i] for i in range(nvar)]
            for col, x in enumerate(extra):
                vv = list(vecs)
                if x is not None:
                    vv[x] = vv[x] * T[x]
                vals[r, col] += coef * _contract(T, vv, mats)
    u = vals[:, 0]
    du = None
    if derivatives:
        W = data.z_derivative_weights()
        du = hbar * vals[:, 1:] @ W.T
    return IntegralResult(u, du, tail, [len(t) for t in T])


def solution_matrix(z, data, table, orderings, spec_kwargs=None, **kw):
    """Columns ``u_l(z)`` for several orderings."""
    spec_kwargs = spec_kwargs or {}
    cols = [integral_solution(l, z, data, table, ContourSpec(tuple(l), **spec_kwargs), **kw).u
            for l in orderings]
    return np.array(cols).T
