"""Diagram models of multiplicity spaces and the Casimir operators acting on them.

Two finite models are provided:

* the symmetric model, spanned by permutations of ``S_m`` and carrying the
  Casimirs of ``m`` dual and ``m`` tautological strands (slots ``1..m`` are
  dual, ``m+1..2m`` tautological);
* the matching model, spanned by perfect matchings of ``{1..n}`` and carrying
  the orthogonal Casimirs ``P - C``.

Everything here works for arbitrary complex ``t``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

SYMMETRIC = "symmetric"
MATCHING = "matching"


class DomainError(ValueError):
    """Raised when arguments fall outside the domain of an operation."""


@dataclass(frozen=True)
class ModelParams:
    m: int
    n: int
    t: complex
    hbar: complex = 0.0

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise DomainError("m and n must be non-negative")
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "hbar", complex(self.hbar))

    @property
    def delta(self) -> complex:
        return self.t * self.hbar


@dataclass(frozen=True)
class MultiplicitySpace:
    model: str
    basis: tuple
    params: ModelParams
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = {b: k for k, b in enumerate(self.basis)}
        if len(idx) != len(self.basis):
            raise DomainError("basis labels must be distinct")
        object.__setattr__(self, "_index", idx)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def strands(self) -> int:
        if self.model == SYMMETRIC:
            return 2 * self.params.m
        return self.params.n

    @property
    def basis_id(self) -> str:
        p = self.params
        if self.model == SYMMETRIC:
            return f"sym(m={p.m})"
        return f"match(n={p.n})"

    def index(self, label) -> int:
        return self._index[label]

    def with_t(self, t) -> "MultiplicitySpace":
        p = self.params
        return MultiplicitySpace(self.model, self.basis, ModelParams(p.m, p.n, t, p.hbar))

    def labels(self) -> list[str]:
        return [format_label(self.model, b) for b in self.basis]


@dataclass(frozen=True)
class LinearOperator:
    """Matrix tagged with the identifier of the basis it acts on."""

    matrix: object
    basis_id: str

    def __post_init__(self):
        shape = self.matrix.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise DomainError("operator matrix must be square")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if hasattr(m, "toarray") else np.asarray(m)


def format_label(model: str, label) -> str:
    if model == SYMMETRIC:
        return "".join(str(x) for x in label)
    return "|".join(f"{a}{b}" for a, b in label)


def sym_model(m: int, t, hbar=0.0) -> MultiplicitySpace:
    """Symmetric model: basis of ``S_m`` in lexicographic one-line order."""
    if m < 1:
        raise DomainError("sym_model needs m >= 1")
    basis = tuple(itertools.permutations(range(1, m + 1)))
    return MultiplicitySpace(SYMMETRIC, basis, ModelParams(m, m, t, hbar))


def perfect_matchings(points):
    """All perfect matchings of ``points`` in lexicographic order."""
    points = tuple(points)
    if not points:
        yield ()
        return
    a = points[0]
    for k in range(1, len(points)):
        rest = points[1:k] + points[k + 1:]
        for tail in perfect_matchings(rest):
            yield ((a, points[k]),) + tail


def matching_model(n: int, t, hbar=0.0) -> MultiplicitySpace:
    """Matching model on ``n`` strands; ``n`` must be even and positive."""
    if n < 2 or n % 2:
        raise DomainError("matching_model needs an even n >= 2")
    basis = tuple(perfect_matchings(range(1, n + 1)))
    return MultiplicitySpace(MATCHING, basis, ModelParams(0, n, t, hbar))


def _check_pair(space, i, j):
    d = space.strands
    if i == j or not (1 <= i <= d and 1 <= j <= d):
        raise DomainError(f"index pair ({i},{j}) out of range for {d} strands")
    return (i, j) if i < j else (j, i)


def _swap_values(perm, a, b):
    return tuple(b if x == a else a if x == b else x for x in perm)


def _sym_action(m, t, i, j, perm):
    # returns (coefficient, image permutation) of Omega_ij on one basis element
    if j <= m:
        return 1.0, _swap_values(perm, i, j)
    if i > m:
        p = list(perm)
        a, b = i - m - 1, j - m - 1
        p[a], p[b] = p[b], p[a]
        return 1.0, tuple(p)
    k = perm[j - m - 1]
    if k == i:
        return -t, perm
    return -1.0, _swap_values(perm, i, k)


def casimir_gl(space: MultiplicitySpace, i: int, j: int) -> LinearOperator:
    """Casimir ``Omega_ij`` on the symmetric model."""
    if space.model != SYMMETRIC:
        raise DomainError("casimir_gl acts on the symmetric model")
    i, j = _check_pair(space, i, j)
    m, t = space.params.m, space.params.t
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for col, perm in enumerate(space.basis):
        coef, img = _sym_action(m, t, i, j, perm)
        mat[space.index(img), col] += coef
    return LinearOperator(mat, space.basis_id)


def _canonical(pairs):
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


def _partner(matching, a):
    for p, q in matching:
        if p == a:
            return q
        if q == a:
            return p
    raise KeyError(a)


def permutation_operator(space: MultiplicitySpace, a: int, b: int) -> LinearOperator:
    """Relabeling ``a <-> b`` on the matching model."""
    a, b = _check_pair(space, a, b)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    swap = {a: b, b: a}
    for col, mt in enumerate(space.basis):
        img = _canonical((swap.get(p, p), swap.get(q, q)) for p, q in mt)
        mat[space.index(img), col] += 1.0
    return LinearOperator(mat, space.basis_id)


def contraction_operator(space: MultiplicitySpace, a: int, b: int) -> LinearOperator:
    """Cup-cap ``C_ab`` on the matching model; a closed loop gives ``t``."""
    a, b = _check_pair(space, a, b)
    t = space.params.t
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for col, mt in enumerate(space.basis):
        c, d = _partner(mt, a), _partner(mt, b)
        if c == b:
            mat[col, col] += t
            continue
        rest = [p for p in mt if a not in p and b not in p]
        img = _canonical(rest + [(a, b), (c, d)])
        mat[space.index(img), col] += 1.0
    return LinearOperator(mat, space.basis_id)


def casimir_o(space: MultiplicitySpace, a: int, b: int) -> LinearOperator:
    """Orthogonal Casimir ``P_ab - C_ab`` on the matching model."""
    if space.model != MATCHING:
        raise DomainError("casimir_o acts on the matching model")
    P = permutation_operator(space, a, b).matrix
    C = contraction_operator(space, a, b).matrix
    return LinearOperator(P - C, space.basis_id)


def casimir(space: MultiplicitySpace, i: int, j: int) -> LinearOperator:
    if space.model == SYMMETRIC:
        return casimir_gl(space, i, j)
    return casimir_o(space, i, j)


def all_casimirs(space: MultiplicitySpace) -> dict:
    """``{(i, j): Omega_ij}`` for all ``i < j``, as dense arrays."""
    d = space.strands
    return {(i, j): casimir(space, i, j).matrix
            for i, j in itertools.combinations(range(1, d + 1), 2)}


def gaudin(space: MultiplicitySpace, z) -> list[LinearOperator]:
    """Gaudin hamiltonians ``H_i = sum_{j != i} Omega_ij / (z_i - z_j)``."""
    z = np.asarray(z, dtype=complex)
    d = space.strands
    if z.shape != (d,):
        raise DomainError(f"expected {d} points, got {z.shape}")
    gaps = np.abs(z[:, None] - z[None, :]) + np.eye(d)
    if gaps.min() == 0:
        raise DomainError("coincident points")
    om = all_casimirs(space)
    out = []
    for i in range(1, d + 1):
        H = np.zeros((space.dim, space.dim), dtype=complex)
        for j in range(1, d + 1):
            if j != i:
                H += om[min(i, j), max(i, j)] / (z[i - 1] - z[j - 1])
        out.append(LinearOperator(H, space.basis_id))
    return out


def random_generic_point(rng, count, min_gap=1e-3):
    """Uniform draw in the box ``[-1, 1]^2`` per coordinate with a gap rejection."""
    while True:
        z = rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count)
        if count < 2:
            return z
        gaps = np.abs(z[:, None] - z[None, :])[np.triu_indices(count, 1)]
        if gaps.min() >= min_gap:
            return z


def joint_spectrum(ops, rng=None):
    """Joint eigenvalue tuples of commuting matrices.

    Eigenvectors come from a random combination of the operators, which splits
    accidental degeneracies of any single one.

    Returns
    -------
    vals : ndarray, shape (dim, len(ops))
    vecs : ndarray, shape (dim, dim)
    """
    rng = np.random.default_rng(0) if rng is None else rng
    mats = [np.asarray(o.matrix if isinstance(o, LinearOperator) else o) for o in ops]
    coef = rng.normal(size=len(mats)) * 1e-3
    coef[0] = 1.0
    probe = sum(c * M for c, M in zip(coef, mats))
    _, vecs = np.linalg.eig(probe)
    inv = np.linalg.inv(vecs)
    vals = np.array([np.diag(inv @ M @ vecs) for M in mats]).T
    return vals, vecs


def spectrum_scan(space: MultiplicitySpace, trials: int, seed: int, gap_threshold=1e-6) -> dict:
    """Check simplicity of the joint Gaudin spectrum at random generic points."""
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(trials):
        t = complex(*rng.uniform(-1, 1, 2))
        z = random_generic_point(rng, space.strands)
        H = gaudin(space.with_t(t), z)
        vals, _ = joint_spectrum(H, rng)
        gap = np.inf
        for p, q in itertools.combinations(range(space.dim), 2):
            gap = min(gap, np.abs(vals[p] - vals[q]).max())
        rows.append({"trial": k, "t": t, "min_gap": float(gap),
                     "simple": bool(gap > gap_threshold)})
    finite = [r["min_gap"] for r in rows if np.isfinite(r["min_gap"])]
    return {
        "model": space.model,
        "dim": space.dim,
        "trials": rows,
        "simple_count": sum(r["simple"] for r in rows),
        "min_gap": min(finite) if finite else None,
        "gap_threshold": gap_threshold,
    }
