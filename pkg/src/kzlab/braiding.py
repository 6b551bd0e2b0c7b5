"""Quantum side of the Drinfeld-Kohno comparison: Hecke matrices and spectral checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .algebra import DomainError, LinearOperator, sym_model
from .transport import MonodromyResult


@dataclass(frozen=True)
class HeckeParams:
    q: complex
    a: complex | None = None

    def __post_init__(self):
        if self.q == 0:
            raise DomainError("q must be nonzero")
        object.__setattr__(self, "q", complex(self.q))

    @classmethod
    def from_hbar(cls, hbar, t=None):
        q = np.exp(1j * np.pi * complex(hbar))
        a = None if t is None else np.exp(1j * np.pi * complex(hbar) * complex(t))
        return cls(q, a)


def hecke_generators(m: int, params: HeckeParams) -> list[LinearOperator]:
    """Right regular action of ``T_1 .. T_{m-1}`` on ``C[S_m]``.

    ``T_i w = w s_i`` when the length goes up, otherwise
    ``(q - q^-1) w + w s_i``, so ``(T_i - q)(T_i + q^-1) = 0``.
    """
    if m < 2:
        raise DomainError("hecke_generators needs m >= 2")
    space = sym_model(m, 0.0)
    q = params.q
    out = []
    for i in range(1, m):
        T = np.zeros((space.dim, space.dim), dtype=complex)
        for col, w in enumerate(space.basis):
            ws = list(w)
            ws[i - 1], ws[i] = ws[i], ws[i - 1]
            T[space.index(tuple(ws)), col] += 1.0
            if w[i - 1] > w[i]:
                T[col, col] += q - 1 / q
        out.append(LinearOperator(T, space.basis_id))
    return out


def _mat(x):
    if isinstance(x, MonodromyResult):
        return x.matrix.dense()
    if isinstance(x, LinearOperator):
        return x.dense()
    return np.asarray(x, dtype=complex)


def eigen_distance(a, b) -> float:
    """Optimal-matching distance between two eigenvalue multisets."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max(initial=0.0))


def dk_compare(kz, quantum, fit_scalar=True) -> dict:
    """Compare characteristic polynomials of a monodromy and a quantum matrix.

    With ``fit_scalar`` the quantum matrix is rescaled by the ``d``-th root of
    the determinant ratio whose branch minimizes the deviation.
    """
    K, Q = _mat(kz), _mat(quantum)
    if K.shape != Q.shape:
        raise DomainError("dimension mismatch")
    d = K.shape[0]
    pk = np.poly(K)
    candidates = [1.0 + 0j]
    if fit_scalar:
        ratio = np.linalg.det(K) / np.linalg.det(Q)
        root = ratio ** (1.0 / d)
        candidates = [root * np.exp(2j * np.pi * k / d) for k in range(d)]
    best = None
    for s in candidates:
        dev = float(np.abs(np.poly(s * Q) - pk).max())
        if best is None or dev < best[0]:
            best = (dev, s)
    dev, s = best
    return {"deviation": dev, "scalar": s, "charpoly_kz": pk, "charpoly_quantum": np.poly(s * Q),
            "eigen_distance": eigen_distance(np.linalg.eigvals(K), np.linalg.eigvals(s * Q))}


def orthogonal_twist_prediction(hbar, t) -> dict:
    """Half-twist eigenvalues ``P * exp(pi i hbar Omega)`` on the joint eigenspaces of ``P, C``."""
    q = np.exp(1j * np.pi * complex(hbar))
    return {"sym_no_loop": q, "antisym": -1 / q,
            "sym_loop": np.exp(1j * np.pi * complex(hbar) * (1 - complex(t)))}


def exponent_offsets(eigs, hbar, t) -> list[dict]:
    """Label each eigenvalue by the closest predicted family member."""
    pred = orthogonal_twist_prediction(hbar, t)
    rows = []
    for e in eigs:
        name, val = min(pred.items(), key=lambda kv: abs(kv[1] - e))
        rows.append({"eigenvalue": complex(e), "family": name, "offset": abs(val - e)})
    return rows


def pure_braid_spectrum_check(mono_eigs, omega, hbar) -> float:
    """Distance of monodromy eigenvalues from ``scalar * exp(2 pi i hbar spec(Omega))``.

    The scalar is fitted as the ratio that best aligns the first eigenvalue.
    """
    pred = np.exp(2j * np.pi * complex(hbar) * np.linalg.eigvals(omega))
    best = np.inf
    for e, p in itertools.product(mono_eigs, pred):
        s = e / p
        best = min(best, eigen_distance(mono_eigs, s * pred))
    return float(best)
