"""Fermionic Fock space on a ``t x d`` grid of modes and the dual Lie actions on it.

Mode ``(a, i)`` (row ``a`` in ``1..t``, column ``i`` in ``1..d``) is the
generator ``x_{a,i}``.  Modes are ordered column-major, so the bit of
``(a, i)`` is ``(i - 1) * t + (a - 1)``, and every fermionic sign counts the
occupied modes that precede it in this order.

Full-space operators are ``scipy.sparse`` CSR matrices; everything restricted
to a subspace is dense.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .algebra import (DomainError, LinearOperator, casimir_gl, casimir_o, matching_model,
                      sym_model)

MAX_MODES = 24
RANK_TOL = 1e-10
INVARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class FockSpace:
    t: int
    d: int
    _ops: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.t < 1 or self.d < 1:
            raise DomainError("t and d must be positive")
        if self.t * self.d > MAX_MODES:
            raise DomainError(f"t*d = {self.t * self.d} exceeds the cap of {MAX_MODES} modes")

    @property
    def dim(self) -> int:
        return 1 << (self.t * self.d)

    @property
    def basis_id(self) -> str:
        return f"fock(t={self.t},d={self.d})"

    def mode(self, a: int, i: int) -> int:
        if not (1 <= a <= self.t and 1 <= i <= self.d):
            raise DomainError(f"mode ({a},{i}) outside the {self.t}x{self.d} grid")
        return (i - 1) * self.t + (a - 1)

    def states(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.int64)

    def row_counts(self) -> np.ndarray:
        """Occupation of each row, shape ``(t, dim)``."""
        if "rows" not in self._ops:
            s = self.states()
            self._ops["rows"] = np.array([
                sum((s >> self.mode(a, i)) & 1 for i in range(1, self.d + 1))
                for a in range(1, self.t + 1)])
        return self._ops["rows"]

    def col_counts(self) -> np.ndarray:
        """Occupation of each column, shape ``(d, dim)``."""
        if "cols" not in self._ops:
            s = self.states()
            self._ops["cols"] = np.array([
                sum((s >> self.mode(a, i)) & 1 for a in range(1, self.t + 1))
                for i in range(1, self.d + 1)])
        return self._ops["cols"]


def fock_space(t: int, d: int) -> FockSpace:
    return FockSpace(t, d)


def _wrap(space, mat):
    return LinearOperator(mat.tocsr(), space.basis_id)


def _x(space: FockSpace, a: int, i: int) -> sp.csr_matrix:
    key = ("x", a, i)
    if key not in space._ops:
        bit = np.int64(1) << space.mode(a, i)
        s = space.states()
        src = s[(s & bit) == 0]
        sign = np.where(np.bitwise_count(src & (bit - 1)) % 2 == 1, -1.0, 1.0)
        space._ops[key] = sp.csr_matrix((sign.astype(complex), (src | bit, src)),
                                        shape=(space.dim, space.dim))
    return space._ops[key]


def _d(space: FockSpace, a: int, i: int) -> sp.csr_matrix:
    key = ("d", a, i)
    if key not in space._ops:
        space._ops[key] = _x(space, a, i).T.tocsr()
    return space._ops[key]


def xop(space: FockSpace, a: int, i: int) -> LinearOperator:
    """Creation operator: multiplication by ``x_{a,i}``."""
    return _wrap(space, _x(space, a, i))


def dop(space: FockSpace, a: int, i: int) -> LinearOperator:
    """Annihilation operator: differentiation by ``x_{a,i}``."""
    return _wrap(space, _d(space, a, i))


def _glw(space, i, j):
    key = ("glw", i, j)
    if key not in space._ops:
        space._ops[key] = sum(_x(space, a, i) @ _d(space, a, j)
                              for a in range(1, space.t + 1)).tocsr()
    return space._ops[key]


def _glv(space, a, b):
    key = ("glv", a, b)
    if key not in space._ops:
        space._ops[key] = sum(_x(space, a, i) @ _d(space, b, i)
                              for i in range(1, space.d + 1)).tocsr()
    return space._ops[key]


def glw_generator(space: FockSpace, i: int, j: int) -> LinearOperator:
    """``E_ij`` of the column algebra: ``sum_a x_{a,i} d_{a,j}``."""
    space.mode(1, i), space.mode(1, j)
    return _wrap(space, _glw(space, i, j))


def glv_generator(space: FockSpace, a: int, b: int) -> LinearOperator:
    """``E_ab`` of the row algebra: ``sum_i x_{a,i} d_{b,i}``."""
    space.mode(a, 1), space.mode(b, 1)
    return _wrap(space, _glv(space, a, b))


def kappa(space: FockSpace, i: int, j: int) -> LinearOperator:
    """``kappa_ij = E_ij E_ji + E_ji E_ij``."""
    if i == j:
        raise DomainError("kappa needs i != j")
    A, B = _glw(space, i, j), _glw(space, j, i)
    return _wrap(space, A @ B + B @ A)


def omega_fock(space: FockSpace, i: int, j: int) -> LinearOperator:
    """``Omega_ij = sum_{a,b} x_{a,i} d_{b,i} x_{b,j} d_{a,j}``."""
    if not (1 <= i < j <= space.d):
        raise DomainError(f"need 1 <= i < j <= {space.d}")
    t = space.t
    out = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for a in range(1, t + 1):
        for b in range(1, t + 1):
            left = _x(space, a, i) @ _d(space, b, i)
            right = _x(space, b, j) @ _d(space, a, j)
            out = out + left @ right
    return _wrap(space, out)


# ---------------------------------------------------------------------------
# orthogonal side
# ---------------------------------------------------------------------------

def _so_k(space, k, i, j):
    """One-row contribution ``M^{(k)}_{i,j}`` for signed column indices."""
    if i > 0 and j > 0:
        xi, dj = _x(space, k, i), _d(space, k, j)
        return 0.5 * (xi @ dj - dj @ xi)
    if i < 0 and j > 0:
        return _d(space, k, -i) @ _d(space, k, j)
    if i > 0 and j < 0:
        return _x(space, k, i) @ _x(space, k, -j)
    return -_so_k(space, k, -j, -i)


def so_generator(space: FockSpace, i: int, j: int) -> LinearOperator:
    """``M_{i,j} = E_{i,j} - E_{-j,-i}`` of ``so(2d)``; indices in ``{+-1..+-d}``."""
    if i == 0 or j == 0 or abs(i) > space.d or abs(j) > space.d:
        raise DomainError(f"signed indices must lie in +-1..+-{space.d}")
    key = ("M", i, j)
    if key not in space._ops:
        space._ops[key] = sum(_so_k(space, k, i, j) for k in range(1, space.t + 1)).tocsr()
    return _wrap(space, space._ops[key])


def _M(space, i, j):
    return so_generator(space, i, j).matrix


def so_omega_fock(space: FockSpace, a: int, b: int) -> LinearOperator:
    """Orthogonal Casimir between columns ``a < b``.

    ``1/2 sum_{i<j} (x_ia d_ja - x_ja d_ia)(x_jb d_ib - x_ib d_jb)``, a sum
    over row pairs of products of ``so(V)`` generators in the two columns.
    """
    if not (1 <= a < b <= space.d):
        raise DomainError(f"need 1 <= a < b <= {space.d}")
    out = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for i, j in itertools.combinations(range(1, space.t + 1), 2):
        left = _x(space, i, a) @ _d(space, j, a) - _x(space, j, a) @ _d(space, i, a)
        right = _x(space, j, b) @ _d(space, i, b) - _x(space, i, b) @ _d(space, j, b)
        out = out + 0.5 * (left @ right)
    return _wrap(space, out)


def so_dual_factors(space: FockSpace, a: int, b: int):
    """Factor pairs of ``e_{eb-ea} e_{ea-eb} + e_{-ea-eb} e_{ea+eb}``.

    With root vectors normalized by ``Tr(e e') = 1`` in the vector
    representation this equals ``(M_ba M_ab + M_{-a,b} M_{b,-a}) / 2``.
    """
    if not (1 <= a < b <= space.d):
        raise DomainError(f"need 1 <= a < b <= {space.d}")
    return [(0.5, _M(space, b, a), _M(space, a, b)),
            (0.5, _M(space, -a, b), _M(space, b, -a))]


def so_dual_operator(space: FockSpace, a: int, b: int) -> sp.csr_matrix:
    return sum(c * (L @ R) for c, L, R in so_dual_factors(space, a, b)).tocsr()


def so_v_algebra(t: int):
    """Cartan and raising elements of ``so(t)`` as ``t x t`` matrices.

    The Cartan subalgebra is spanned by ``h_k = i (E_{2k-1,2k} - E_{2k,2k-1})``;
    raising elements are the root vectors with positive eigenvalue under the
    regular element ``sum_k (K - k + 1) h_k``.

    Returns
    -------
    cartan : list of ndarray
    raising : list of ndarray
    """
    K = t // 2
    basis = []
    for a, b in itertools.combinations(range(t), 2):
        B = np.zeros((t, t), dtype=complex)
        B[a, b], B[b, a] = 1, -1
        basis.append(B)
    cartan = []
    for k in range(K):
        h = np.zeros((t, t), dtype=complex)
        h[2 * k, 2 * k + 1], h[2 * k + 1, 2 * k] = 1j, -1j
        cartan.append(h)
    if not basis:
        return cartan, []
    H = sum((K - k) * h for k, h in enumerate(cartan)) if cartan else np.zeros((t, t))
    flat = np.array([B.ravel() for B in basis]).T
    ad = np.linalg.lstsq(flat, np.array([(H @ B - B @ H).ravel() for B in basis]).T,
                         rcond=None)[0]
    w, v = np.linalg.eig(ad)
    raising = [(flat @ v[:, k]).reshape(t, t) for k in range(len(w)) if w[k].real > 1e-9]
    return cartan, raising


def _from_gl_v(space, X) -> sp.csr_matrix:
    out = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for a in range(space.t):
        for b in range(space.t):
            if abs(X[a, b]) > 1e-15:
                out = out + X[a, b] * _glv(space, a + 1, b + 1)
    return out.tocsr()


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightPair:
    gamma: tuple | None
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(self.beta))
        if self.gamma is not None:
            object.__setattr__(self, "gamma", tuple(self.gamma))


@dataclass
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of a Fock space.

    ``vectors`` is an ``(ambient.dim, k)`` sparse or dense matrix.
    """

    ambient: FockSpace
    vectors: object
    label: str = ""

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def dense(self) -> np.ndarray:
        V = self.vectors
        return V.toarray() if sp.issparse(V) else np.asarray(V)

    def apply(self, factors) -> object:
        """Apply a product of operators (rightmost first) to the basis vectors."""
        W = self.vectors
        for f in reversed(list(factors)):
            W = f @ W
        return W

    def coords(self, W) -> np.ndarray:
        V = self.vectors
        out = V.conj().T @ W
        return out.toarray() if sp.issparse(out) else np.asarray(out)

    def restrict(self, op, check=True) -> np.ndarray:
        """Matrix of ``op`` (an operator or list of factors) in this basis."""
        factors = op if isinstance(op, (list, tuple)) else [op]
        factors = [f.matrix if isinstance(f, LinearOperator) else f for f in factors]
        W = self.apply(factors)
        R = self.coords(W)
        if check:
            err = W - self.vectors @ R
            err = err.toarray() if sp.issparse(err) else err
            scale = max(1.0, np.abs(R).max(initial=0.0))
            if err.size and np.abs(err).max() > INVARIANCE_TOL * scale:
                raise DomainError(f"subspace not invariant (defect {np.abs(err).max():.2e})")
        return R


def _coordinate_subspace(space, idx, label):
    idx = np.asarray(idx, dtype=np.int64)
    V = sp.csc_matrix((np.ones(len(idx), dtype=complex), (idx, np.arange(len(idx)))),
                      shape=(space.dim, len(idx)))
    return SubspaceBasis(space, V, label)


def weight_subspace(space: FockSpace, pair: WeightPair) -> SubspaceBasis:
    """States with row occupations ``gamma`` and column occupations ``beta``.

    ``gamma = None`` leaves the rows unconstrained.
    """
    beta = np.asarray(pair.beta)
    if beta.shape != (space.d,):
        raise DomainError(f"beta must have length {space.d}")
    mask = np.all(space.col_counts() == beta[:, None], axis=0)
    if pair.gamma is not None:
        gamma = np.asarray(pair.gamma)
        if gamma.shape != (space.t,):
            raise DomainError(f"gamma must have length {space.t}")
        mask &= np.all(space.row_counts() == gamma[:, None], axis=0)
    return _coordinate_subspace(space, np.nonzero(mask)[0], f"weight{pair}")


def so_weight_subspace(space: FockSpace, beta) -> SubspaceBasis:
    """``so(2d)`` weight space: ``M_aa`` acts by ``beta_a`` = occupation - t/2."""
    occ = np.asarray(beta, dtype=float) + space.t / 2
    if not np.allclose(occ, np.round(occ)):
        return _coordinate_subspace(space, [], f"so-weight{tuple(beta)}")
    return weight_subspace(space, WeightPair(None, tuple(int(round(x)) for x in occ)))


def _kernel(space, sub, ops, tol=RANK_TOL):
    """Common null space of ``ops`` on ``sub`` as coefficient columns."""
    blocks = []
    for op in ops:
        W = op @ sub.vectors
        W = W.tocsr() if sp.issparse(W) else sp.csr_matrix(W)
        rows = np.unique(W.nonzero()[0])
        if len(rows):
            blocks.append(W[rows].toarray())
    k = sub.dim
    if not blocks:
        return np.eye(k, dtype=complex)
    K = np.vstack(blocks)
    _, s, vh = np.linalg.svd(K, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def _span(space, sub, coef, label):
    V = sub.vectors @ coef
    if sp.issparse(V):
        V = V.toarray()
    V = np.where(np.abs(V) < 1e-15, 0, V)
    return SubspaceBasis(space, sp.csc_matrix(V), label)


def singular_vectors(space: FockSpace, sub: SubspaceBasis, side: str = "glV",
                     so_weight=None) -> SubspaceBasis:
    """Vectors of ``sub`` killed by all raising operators of the row algebra.

    ``side`` is ``"glV"`` (upper-triangular ``E_ab``, ``a < b``) or ``"soV"``
    (the Borel of :func:`so_v_algebra`).  For ``soV`` an optional
    ``so_weight`` additionally fixes the Cartan eigenvalues.
    """
    if sub.dim == 0:
        raise DomainError("empty subspace")
    if side == "glV":
        ops = [_glv(space, a, b) for a, b in itertools.combinations(range(1, space.t + 1), 2)]
    elif side == "soV":
        cartan, raising = so_v_algebra(space.t)
        ops = [_from_gl_v(space, X) for X in raising]
        if so_weight is not None:
            if len(so_weight) != len(cartan):
                raise DomainError(f"so(V) weight needs {len(cartan)} entries")
            ident = sp.identity(space.dim, dtype=complex, format="csr")
            ops += [_from_gl_v(space, h) - lam * ident for h, lam in zip(cartan, so_weight)]
    else:
        raise DomainError(f"unknown side {side!r}")
    coef = _kernel(space, sub, ops)
    return _span(space, sub, coef, f"sing[{side}]({sub.label})")


def so_invariants(space: FockSpace, sub: SubspaceBasis) -> SubspaceBasis:
    """Vectors of ``sub`` killed by every ``B_ab = E_ab - E_ba`` of ``so(V)``."""
    ops = [_glv(space, a, b) - _glv(space, b, a)
           for a, b in itertools.combinations(range(1, space.t + 1), 2)]
    coef = _kernel(space, sub, ops)
    return _span(space, sub, coef, f"inv[soV]({sub.label})")


def truncated_casimir(space: FockSpace, sub: SubspaceBasis, i: int, j: int) -> LinearOperator:
    """Restriction of ``e_{-alpha} e_alpha = E_ji E_ij`` (``alpha = theta_i - theta_j``)."""
    if not (1 <= i < j <= space.d):
        raise DomainError(f"need 1 <= i < j <= {space.d}")
    R = sub.restrict([_glw(space, j, i), _glw(space, i, j)])
    return LinearOperator(R, f"{space.basis_id}/{sub.label}")


def so_dual_coefficient(space: FockSpace, sub: SubspaceBasis, a: int, b: int) -> LinearOperator:
    """Restriction of the dual orthogonal coefficient for the pair ``a < b``."""
    R = sum(c * sub.restrict([L, Rt]) for c, L, Rt in so_dual_factors(space, a, b))
    return LinearOperator(R, f"{space.basis_id}/{sub.label}")


# ---------------------------------------------------------------------------
# skew Howe bookkeeping
# ---------------------------------------------------------------------------

def transpose_partition(shape):
    shape = [x for x in shape if x > 0]
    if not shape:
        return ()
    return tuple(sum(1 for x in shape if x > k) for k in range(shape[0]))


def gl_dimension(shape, n: int) -> int:
    """Dimension of the ``gl_n`` irreducible of highest weight ``shape`` (hook content)."""
    shape = [x for x in shape if x > 0]
    if len(shape) > n:
        return 0
    conj = transpose_partition(shape)
    num, den = 1, 1
    for r, row in enumerate(shape):
        for c in range(row):
            num *= n + c - r
            den *= (row - c - 1) + (conj[c] - r - 1) + 1
    return num // den


def howe_multiplicity(delta, d: int) -> int:
    """Predicted number of row-singular vectors of row weight ``delta``."""
    delta = tuple(delta)
    if any(x < y for x, y in zip(delta, delta[1:])) or min(delta, default=0) < 0:
        return 0
    if max(delta, default=0) > d:
        return 0
    return gl_dimension(transpose_partition(delta), d)


# ---------------------------------------------------------------------------
# dual data for lambda = mu = empty and the derived correspondence table
# ---------------------------------------------------------------------------

def dual_weights(m: int, t: int):
    """Row weight, column weight and top weight of the ``m = n`` empty sector."""
    gamma = (m,) * t
    beta = (t - 1,) * m + (1,) * m
    top = (t,) * m + (0,) * m
    return WeightPair(gamma, beta), top


def level_function(m: int) -> tuple:
    """Non-decreasing ``c`` with ``|c^{-1}(i)| = min(i, 2m - i)``."""
    out = []
    for i in range(1, 2 * m):
        out += [i] * min(i, 2 * m - i)
    return tuple(out)


def f_monomial(space: FockSpace, top_state: int, seq) -> np.ndarray:
    """``f_{s_1} ... f_{s_k} v`` with ``f_i = E_{i+1,i}``, rightmost applied first."""
    v = np.zeros(space.dim, dtype=complex)
    v[top_state] = 1.0
    for s in reversed(seq):
        v = _glw(space, s + 1, s) @ v
    return v


def distinct_orderings(seq):
    return sorted(set(itertools.permutations(seq)))


def derived_correspondence(m: int, t: int) -> dict:
    """Dictionary from dual-side monomials to the symmetric model, computed at integer ``t``.

    The truncated Casimirs on the span of the ``f``-monomials are intertwined
    with ``-Omega_ij`` of the symmetric model up to scalars ``delta_ij``.  The
    intertwiner is normalized so its largest entry (first in row-major order)
    is ``1``.

    Returns
    -------
    dict with keys ``table`` (sequence -> vector), ``Q``, ``delta``,
    ``basis_sequences``, ``intertwiner_singular_values``.
    """
    d = 2 * m
    space = fock_space(t, d)
    pair, _ = dual_weights(m, t)
    sub = weight_subspace(space, pair)
    idx = sub.vectors.tocoo().row[np.argsort(sub.vectors.tocoo().col)]
    top = sum(1 << space.mode(a, i) for a in range(1, t + 1) for i in range(1, m + 1))
    seqs = distinct_orderings(level_function(m))
    vecs = {s: f_monomial(space, top, s)[idx] for s in seqs}
    mat = np.array([vecs[s] for s in seqs]).T
    _, _, piv = sla.qr(mat, pivoting=True)
    size = factorial(m)
    basis_seqs = sorted(seqs[k] for k in piv[:size])
    B = np.array([vecs[s] for s in basis_seqs]).T
    if np.linalg.matrix_rank(B, tol=1e-8) < size:
        raise DomainError(f"f-monomials do not span a {size}-dim space at t={t}")
    Bp = np.linalg.pinv(B)
    diag = sym_model(m, t)
    rows, X, O = [], {}, {}
    for i, j in itertools.combinations(range(1, d + 1), 2):
        T = (_glw(space, j, i) @ _glw(space, i, j))[idx][:, idx].toarray()
        X[i, j] = -(Bp @ T @ B)
        O[i, j] = casimir_gl(diag, i, j).matrix
        Xt = X[i, j] - np.trace(X[i, j]) / size * np.eye(size)
        Ot = O[i, j] - np.trace(O[i, j]) / size * np.eye(size)
        rows.append(np.kron(Xt.T, np.eye(size)) - np.kron(np.eye(size), Ot))
    _, sv, vh = np.linalg.svd(np.vstack(rows))
    Q = vh[-1].conj().reshape(size, size, order="F")
    Q = Q / Q.flat[np.argmax(np.abs(Q) > np.abs(Q).max() * (1 - 1e-9))]
    Q = np.where(np.abs(Q) < 1e-12, 0, Q)
    delta = {k: (np.trace(O[k]) - np.trace(X[k])) / size for k in X}
    table = {}
    for s in seqs:
        coef = Bp @ vecs[s]
        if np.linalg.norm(B @ coef - vecs[s]) > 1e-8 * max(1.0, np.linalg.norm(vecs[s])):
            raise DomainError(f"monomial {s} outside the spanned space")
        vec = Q @ coef
        vec = np.where(np.abs(vec) < 1e-12, 0, vec)
        if np.abs(vec).max(initial=0) > 0:
            table[s] = vec
    return {"table": table, "Q": Q, "delta": delta, "basis_sequences": basis_seqs,
            "intertwiner_singular_values": sv, "t": t}


def so_duality(t: int, n: int, scale=0.5) -> dict:
    """Compare the Fock orthogonal Casimirs with ``scale * (P - C)`` on ``n`` strands.

    Works on the ``so(V)``-invariants of the weight space with one fermion per
    column.  Reports the largest defect of the identity
    ``Omega = -D - (1 - t)/2`` (``D`` the dual coefficient) and the
    singular values of the simultaneous intertwiner equation.  For ``t <= n``
    the ``SO(t)`` invariants are larger than the ``O(t)`` ones and the
    dimensions disagree.
    """
    if n % 2 or n < 2:
        raise DomainError("so_duality needs an even n >= 2")
    space = fock_space(t, n)
    sub = so_weight_subspace(space, (1 - t / 2,) * n)
    inv = so_invariants(space, sub)
    diag = matching_model(n, t)
    chain, rows = 0.0, []
    for a, b in itertools.combinations(range(1, n + 1), 2):
        Om = inv.restrict(so_omega_fock(space, a, b).matrix)
        D = so_dual_coefficient(space, inv, a, b).matrix
        chain = max(chain, float(np.abs(Om + D + (1 - t) / 2 * np.eye(inv.dim)).max(initial=0)))
        if inv.dim == diag.dim:
            P = scale * casimir_o(diag, a, b).matrix
            rows.append(np.kron(Om.T, np.eye(diag.dim)) - np.kron(np.eye(inv.dim), P))
    sv = np.linalg.svd(np.vstack(rows), compute_uv=False) if rows else np.array([])
    return {"t": t, "n": n, "invariant_dim": inv.dim, "diagram_dim": diag.dim,
            "chain_defect": chain, "intertwiner_singular_values": sv, "scale": scale}
