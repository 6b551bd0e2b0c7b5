"""Logarithmic flat connections on configuration space.

Convention used throughout: a flat section ``F`` satisfies

    dF = sum_{i<j} (A_ij + c_ij) dlog(z_i - z_j) F

so the ``dz_k`` coefficient is ``sum_{j != k} (A_kj + c_kj) / (z_k - z_j)``.
Each source connection is translated into this form once, in
:func:`make_connection`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import DomainError, LinearOperator, MultiplicitySpace, all_casimirs

KINDS = ("kz_gl", "kz_o", "kappa", "dynamical", "dual_so")


@dataclass(frozen=True)
class ConnectionSpec:
    dim_base: int
    terms: dict
    central: dict = field(default_factory=dict)
    basis_id: str = ""
    kind: str = ""

    def __post_init__(self):
        sizes = {np.shape(A) for A in self.terms.values()}
        if len(sizes) > 1:
            raise DomainError(f"coefficient matrices of different shapes: {sizes}")
        for i, j in list(self.terms) + list(self.central):
            if not (1 <= i < j <= self.dim_base):
                raise DomainError(f"pair ({i},{j}) is not an ordered pair of base indices")

    @property
    def dim(self) -> int:
        if not self.terms:
            return 0
        return np.shape(next(iter(self.terms.values())))[0]

    def pairs(self):
        return list(itertools.combinations(range(1, self.dim_base + 1), 2))

    def coefficient(self, i, j) -> np.ndarray:
        """``A_ij + c_ij`` for an unordered pair."""
        i, j = min(i, j), max(i, j)
        A = self.terms.get((i, j))
        A = np.zeros((self.dim, self.dim), dtype=complex) if A is None else np.asarray(A)
        return A + self.central.get((i, j), 0.0) * np.eye(self.dim)

    def forms(self, z, central=True) -> list[np.ndarray]:
        """``dz_k`` coefficients ``A_k(z)``, ``k = 1..dim_base``."""
        z = np.asarray(z, dtype=complex)
        out = [np.zeros((self.dim, self.dim), dtype=complex) for _ in range(self.dim_base)]
        for (i, j), A in self.terms.items():
            w = np.asarray(A) / (z[i - 1] - z[j - 1])
            out[i - 1] += w
            out[j - 1] -= w
        if central:
            eye = np.eye(self.dim)
            for (i, j), c in self.central.items():
                w = c / (z[i - 1] - z[j - 1]) * eye
                out[i - 1] += w
                out[j - 1] -= w
        return out

    def derivative(self, z, F) -> np.ndarray:
        """Columns ``A_k(z) F``; shape ``(dim, dim_base)``."""
        return np.array([A @ F for A in self.forms(z)]).T


def make_connection(kind: str, inputs, hbar, dim_base=None) -> ConnectionSpec:
    """Assemble one of the named connections.

    ``inputs`` is a :class:`MultiplicitySpace` for ``kz_gl``/``kz_o``, or a
    mapping ``{(i, j): matrix}`` of raw operators (``kappa_ij``, truncated
    Casimirs, dual orthogonal coefficients) for the other kinds.
    """
    hbar = complex(hbar)
    if kind not in KINDS:
        raise DomainError(f"unknown connection kind {kind!r}")
    if kind in ("kz_gl", "kz_o"):
        if not isinstance(inputs, MultiplicitySpace):
            raise DomainError(f"{kind} needs a multiplicity space")
        want = "symmetric" if kind == "kz_gl" else "matching"
        if inputs.model != want:
            raise DomainError(f"{kind} needs the {want} model")
        raw = all_casimirs(inputs)
        basis_id, dim_base = inputs.basis_id, inputs.strands
        scale = hbar
    else:
        raw = {k: (v.matrix if isinstance(v, LinearOperator) else np.asarray(v))
               for k, v in inputs.items()}
        basis_id = next((v.basis_id for v in inputs.values()
                         if isinstance(v, LinearOperator)), "")
        if dim_base is None:
            dim_base = max((j for _, j in raw), default=1)
        scale = {"kappa": -hbar / 2, "dynamical": -hbar, "dual_so": -hbar}[kind]
    terms = {k: scale * np.asarray(v, dtype=complex) for k, v in raw.items()}
    return ConnectionSpec(dim_base, terms, {}, basis_id, kind)


def braid_defects(spec: ConnectionSpec) -> dict:
    """Largest infinitesimal braid commutators of the coefficient matrices."""
    d = spec.dim_base
    A = {p: spec.coefficient(*p) for p in spec.pairs()}
    get = lambda i, j: A[min(i, j), max(i, j)]
    tri = 0.0
    for i, j, k in itertools.permutations(range(1, d + 1), 3):
        X, Y = get(i, j), get(i, k) + get(j, k)
        tri = max(tri, np.linalg.norm(X @ Y - Y @ X))
    dis = 0.0
    for (i, j), (k, l) in itertools.combinations(spec.pairs(), 2):
        if len({i, j, k, l}) == 4:
            X, Y = A[i, j], A[k, l]
            dis = max(dis, np.linalg.norm(X @ Y - Y @ X))
    return {"triple": tri, "disjoint": dis}


def generic_base_point(rng, d, scale=1.0, min_gap=0.2):
    while True:
        z = scale * (rng.normal(size=d) + 1j * rng.normal(size=d))
        if d < 2 or np.abs(z[:, None] - z[None, :])[np.triu_indices(d, 1)].min() > min_gap:
            return z


def curvature_probe(spec: ConnectionSpec, points=5, rel_step=1e-4, seed=0) -> float:
    """Largest curvature ``dA_l/dz_k - dA_k/dz_l + [A_k, A_l]`` over random points.

    Derivatives of the coefficient forms are central differences with a step
    relative to the point scale; values are normalized by ``1 + max |A_k|^2``.
    """
    rng = np.random.default_rng(seed)
    d = spec.dim_base
    worst = 0.0
    for _ in range(points):
        z = generic_base_point(rng, d)
        h = rel_step * max(1.0, np.abs(z).max())
        A = spec.forms(z)
        dA = []
        for k in range(d):
            e = np.zeros(d, dtype=complex)
            e[k] = h
            Ap, Am = spec.forms(z + e), spec.forms(z - e)
            dA.append([(Ap[l] - Am[l]) / (2 * h) for l in range(d)])
        norm = 1.0 + max(np.linalg.norm(a) for a in A) ** 2
        for k, l in itertools.combinations(range(d), 2):
            curv = dA[k][l] - dA[l][k] + A[l] @ A[k] - A[k] @ A[l]
            worst = max(worst, np.linalg.norm(curv) / norm)
    return worst


def flatness_check(spec: ConnectionSpec, probe=True, tol=1e-10, probe_tol=1e-6, seed=0) -> dict:
    """Algebraic and numeric flatness report."""
    out = braid_defects(spec)
    out["max_commutator"] = max(out["triple"], out["disjoint"])
    out["algebraic_pass"] = out["max_commutator"] < tol
    out["tolerance"] = tol
    if probe and spec.dim_base >= 2 and spec.dim:
        out["curvature_probe"] = curvature_probe(spec, seed=seed)
        out["probe_step"] = 1e-4
        out["probe_tolerance"] = probe_tol
        out["probe_pass"] = out["curvature_probe"] < probe_tol
    out["pass"] = out["algebraic_pass"] and out.get("probe_pass", True)
    return out


@dataclass(frozen=True)
class GaugeFactor:
    """Scalar factor ``prod_{i<j} (z_i - z_j)^{e_ij}``."""

    exponents: dict

    def __post_init__(self):
        for i, j in self.exponents:
            if i >= j:
                raise DomainError("gauge exponents are indexed by pairs i < j")


def apply_gauge(spec: ConnectionSpec, gauge: GaugeFactor) -> ConnectionSpec:
    """Connection satisfied by ``G = F * prod (z_i - z_j)^{e_ij}``."""
    central = dict(spec.central)
    for k, e in gauge.exponents.items():
        central[k] = central.get(k, 0.0) + complex(e)
    return ConnectionSpec(spec.dim_base, spec.terms, central, spec.basis_id, spec.kind)


def gauge_value(gauge: GaugeFactor, z) -> complex:
    """Principal-branch value of the gauge factor at one point."""
    z = np.asarray(z, dtype=complex)
    return complex(np.exp(sum(e * np.log(z[i - 1] - z[j - 1])
                              for (i, j), e in gauge.exponents.items())))


def fd_derivatives(section, z, step=1e-3) -> np.ndarray:
    """Fourth-order central differences of a vector function; shape ``(dim, d)``."""
    z = np.asarray(z, dtype=complex)
    cols = []
    for k in range(len(z)):
        e = np.zeros(len(z), dtype=complex)
        e[k] = step
        f = [np.asarray(section(z + s * e)) for s in (-2, -1, 1, 2)]
        cols.append((f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * step))
    return np.array(cols).T


def central_fit(section, spec: ConnectionSpec, z0, npoints=5, radius=0.05, seed=0,
                with_derivative=False, pairs=None, fd_step=1e-3) -> dict:
    """Fit scalar exponents ``c_ij`` making a sampled section flat.

    Parameters
    ----------
    section : callable
        ``z -> F`` or, with ``with_derivative``, ``z -> (F, dF)`` where ``dF``
        has shape ``(dim, dim_base)``.
    spec : ConnectionSpec
        Connection whose central part is ignored; only ``A_ij`` is used.
    z0 : array_like
        Base point; further samples lie in a polydisk of ``radius`` around it.

    Returns
    -------
    dict with ``exponents``, ``residual`` (relative to the stacked derivative),
    ``rank``, ``points``.
    """
    rng = np.random.default_rng(seed)
    z0 = np.asarray(z0, dtype=complex)
    d = spec.dim_base
    pairs = spec.pairs() if pairs is None else [tuple(p) for p in pairs]
    base = ConnectionSpec(d, spec.terms, {}, spec.basis_id, spec.kind)
    pts = [z0]
    while len(pts) < npoints:
        r = radius * np.sqrt(rng.uniform(0, 1, d)) * np.exp(2j * np.pi * rng.uniform(0, 1, d))
        pts.append(z0 + r)
    rows, rhs, scale = [], [], []
    for z in pts:
        if with_derivative:
            F, dF = section(z)
        else:
            F = np.asarray(section(z))
            dF = fd_derivatives(section, z, fd_step)
        F, dF = np.asarray(F, dtype=complex), np.asarray(dF, dtype=complex)
        nF = np.linalg.norm(F)
        if nF == 0:
            raise DomainError("section vanishes at a sample point")
        b = (dF - base.derivative(z, F)) / nF
        for k in range(d):
            row = np.zeros((len(F), len(pairs)), dtype=complex)
            for col, (i, j) in enumerate(pairs):
                if k + 1 == i:
                    row[:, col] = F / (z[i - 1] - z[j - 1]) / nF
                elif k + 1 == j:
                    row[:, col] = -F / (z[i - 1] - z[j - 1]) / nF
            rows.append(row)
            rhs.append(b[:, k])
            scale.append(dF[:, k] / nF)
    M, b = np.vstack(rows), np.concatenate(rhs)
    coef, _, rank, sv = np.linalg.lstsq(M, b, rcond=None)
    resid = np.linalg.norm(M @ coef - b) / max(np.linalg.norm(np.concatenate(scale)), 1e-300)
    return {"exponents": {p: complex(c) for p, c in zip(pairs, coef)},
            "residual": float(resid), "rank": int(rank), "full_rank": int(rank) == len(pairs),
            "points": pts}
