"""Master function, the vector valued form omega, and monomial dictionaries."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np
import sympy

from ..algebra import DomainError
from ..fock import derived_correspondence, level_function


def cartan_pairing(i: int, j: int) -> int:
    """``(alpha_i, alpha_j)`` for simple roots of ``gl``."""
    if i == j:
        return 2
    return -1 if abs(i - j) == 1 else 0


@dataclass(frozen=True)
class MasterData:
    """Weights and level function defining the master function.

    ``gamma_top`` and ``beta`` are weights of ``gl(d)``; ``m_i`` are the
    simple-root multiplicities of ``gamma_top - beta`` and ``c`` the
    non-decreasing level function.  ``t`` enters through ``gamma_top``.
    """

    gamma_top: tuple
    beta: tuple
    hbar: complex = 0.0

    def __post_init__(self):
        g, b = np.asarray(self.gamma_top, dtype=complex), np.asarray(self.beta, dtype=complex)
        if g.shape != b.shape:
            raise DomainError("weights of different length")
        diff = g - b
        if abs(diff.sum()) > 1e-12:
            raise DomainError("gamma_top - beta is not in the root lattice")
        m = np.cumsum(diff)[:-1]
        if np.abs(m - np.round(m.real)).max(initial=0) > 1e-12 or (m.real < -1e-12).any():
            raise DomainError("gamma_top - beta is not a non-negative sum of simple roots")
        object.__setattr__(self, "hbar", complex(self.hbar))

    @property
    def d(self) -> int:
        return len(self.beta)

    @property
    def m_i(self) -> tuple:
        diff = np.asarray(self.gamma_top, dtype=complex) - np.asarray(self.beta, dtype=complex)
        return tuple(int(round(x.real)) for x in np.cumsum(diff)[:-1])

    @property
    def mbar(self) -> int:
        return sum(self.m_i)

    @property
    def c(self) -> tuple:
        out = []
        for i, k in enumerate(self.m_i, start=1):
            out += [i] * k
        return tuple(out)

    def single_exponents(self) -> np.ndarray:
        """``(alpha_{c(i)}, gamma_top)`` per variable."""
        g = np.asarray(self.gamma_top, dtype=complex)
        return np.array([g[k - 1] - g[k] for k in self.c])

    def pair_exponents(self) -> dict:
        """``(alpha_{c(i)}, alpha_{c(j)})`` for variable pairs ``i < j`` (0-based)."""
        c = self.c
        return {(i, j): cartan_pairing(c[i], c[j])
                for i, j in itertools.combinations(range(self.mbar), 2)}

    def phase_weights(self, z) -> np.ndarray:
        """``z_{c(i)} - z_{c(i)+1}`` per variable."""
        z = np.asarray(z, dtype=complex)
        return np.array([z[k - 1] - z[k] for k in self.c])

    def z_derivative_weights(self) -> np.ndarray:
        """``d/dz_k`` of the phase: row ``k`` holds the coefficient of ``t_i``."""
        W = np.zeros((self.d, self.mbar))
        for i, k in enumerate(self.c):
            W[k - 1, i] += 1
            W[k, i] -= 1
        return W


def empty_sector_data(m: int, t, hbar=0.0) -> MasterData:
    """Data of the ``lambda = mu = empty`` sector with ``m`` dual and ``m`` tautological strands."""
    t = complex(t)
    return MasterData((t,) * m + (0,) * m, (t - 1,) * m + (1,) * m, hbar)


def master_log_grad(data: MasterData, tpoints, include_single=True):
    """Principal ``log Phi`` at one point and its gradient.

    ``Phi = prod t_i^{-(alpha_c(i), gamma)} prod_{i<j} (t_i - t_j)^{(alpha_c(i), alpha_c(j))}``.
    """
    tp = np.asarray(tpoints, dtype=complex)
    if tp.shape != (data.mbar,):
        raise DomainError(f"need {data.mbar} points")
    if np.abs(tp).min(initial=1.0) < 1e-12:
        raise DomainError("a point sits at the origin")
    a = data.single_exponents() if include_single else np.zeros(data.mbar)
    val = -np.sum(a * np.log(tp))
    grad = -a / tp
    for (i, j), e in data.pair_exponents().items():
        diff = tp[i] - tp[j]
        if abs(diff) < 1e-12:
            raise DomainError("colliding points")
        if e:
            val += e * np.log(diff)
            grad[i] += e / diff
            grad[j] -= e / diff
    return complex(val), grad


def chain_weight(tp, sigma) -> complex:
    """``prod_k 1/(t_sk - t_s(k+1)) * 1/t_s(last)`` for a 1-based permutation ``sigma``."""
    s = [k - 1 for k in sigma]
    out = 1 / tp[s[-1]]
    for a, b in zip(s, s[1:]):
        out /= tp[a] - tp[b]
    return out


def permutation_sign(sigma) -> int:
    s = list(sigma)
    sign = 1
    for i in range(len(s)):
        while s[i] != i + 1:
            j = s[i] - 1
            s[i], s[j] = s[j], s[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class CorrespondenceTable:
    """Map from ``f``-monomial sequences to vectors of the multiplicity space."""

    entries: dict
    dim: int
    source: str = ""

    def __getitem__(self, seq):
        v = self.entries.get(tuple(seq))
        return np.zeros(self.dim, dtype=complex) if v is None else v

    def as_matrix(self, seqs) -> np.ndarray:
        return np.array([self[s] for s in seqs]).T


def verbatim_table() -> CorrespondenceTable:
    """The listed ``m = n = 2`` monomial dictionary (basis ``e, (12)``)."""
    e, s = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    entries = {(2, 1, 3, 2): e, (2, 3, 1, 2): e,
               (1, 3, 2, 2): 2 * e + 2 * s, (3, 1, 2, 2): 2 * e + 2 * s,
               (1, 2, 3, 2): e + s, (3, 2, 1, 2): e + s}
    return CorrespondenceTable(entries, 2, "verbatim")


@functools.lru_cache(maxsize=None)
def _derived(m, t):
    return derived_correspondence(m, t)


def derived_table(m: int = 2, t: int = 3) -> CorrespondenceTable:
    """Dictionary computed from ``f``-monomials in the Fock model at integer ``t``."""
    info = _derived(m, t)
    return CorrespondenceTable(dict(info["table"]), len(info["Q"]), f"fock(t={t})")


def omega_eval(data: MasterData, table: CorrespondenceTable, tpoints, signed=False) -> np.ndarray:
    """Coefficient vector of ``omega`` at one point.

    ``sum_sigma chain_weight(sigma) table[c(sigma)]``; ``signed`` multiplies
    each term by the sign of ``sigma``.
    """
    tp = np.asarray(tpoints, dtype=complex)
    c = data.c
    out = np.zeros(table.dim, dtype=complex)
    for sigma in itertools.permutations(range(1, data.mbar + 1)):
        vec = table.entries.get(tuple(c[k - 1] for k in sigma))
        if vec is None:
            continue
        w = chain_weight(tp, sigma)
        if signed:
            w *= permutation_sign(sigma)
        out += w * vec
    return out


@dataclass(frozen=True)
class RationalForm:
    """One component of omega as ``coef * prod t^a prod (t_i - t_j)^b`` monomials.

    ``terms`` lists ``(coef, single_powers, pair_powers)`` with pair powers keyed
    by 0-based ``(i, j)``, ``i < j``.
    """

    terms: tuple


def _linear_factor(expr, syms):
    poly = sympy.Poly(expr, *syms)
    coeffs = [poly.coeff_monomial(s) for s in syms]
    if poly.total_degree() != 1 or poly.coeff_monomial(1) != 0:
        raise DomainError(f"unexpected denominator factor {expr}")
    nz = [(k, c) for k, c in enumerate(coeffs) if c != 0]
    if len(nz) == 1:
        k, c = nz[0]
        return c, ("single", k)
    if len(nz) == 2 and nz[0][1] == -nz[1][1]:
        (i, ci), (j, _) = nz
        return ci, ("pair", (i, j))
    raise DomainError(f"unexpected denominator factor {expr}")


def rational_omega(data: MasterData, table: CorrespondenceTable, signed=False) -> list[RationalForm]:
    """Exact simplification of each omega component into monomials over linear factors."""
    key = (data.c, tuple(sorted((k, tuple(v)) for k, v in table.entries.items())), signed)
    return _rational_cached(key, data.mbar, table.dim)


@functools.lru_cache(maxsize=None)
def _rational_cached(key, mbar, dim):
    c, items, signed = key
    entries = {k: np.asarray(v) for k, v in items}
    syms = sympy.symbols(f"t1:{mbar + 1}")
    comps = [sympy.Integer(0)] * dim
    for sigma in itertools.permutations(range(1, mbar + 1)):
        vec = entries.get(tuple(c[k - 1] for k in sigma))
        if vec is None:
            continue
        s = [k - 1 for k in sigma]
        w = 1 / syms[s[-1]]
        for a, b in zip(s, s[1:]):
            w = w / (syms[a] - syms[b])
        if signed:
            w = w * permutation_sign(sigma)
        for r in range(dim):
            if vec[r] != 0:
                comps[r] += _to_sympy(vec[r]) * w
    out = []
    for expr in comps:
        num, den = sympy.fraction(sympy.factor(sympy.together(expr)))
        coef, factors = sympy.factor_list(den)
        single = [0] * mbar
        pair = {}
        scale = sympy.Integer(1) / coef
        for fac, power in factors:
            lead, (kind, idx) = _linear_factor(fac, syms)
            scale /= lead ** power
            if kind == "single":
                single[idx] -= power
            else:
                pair[idx] = pair.get(idx, 0) - power
        terms = []
        if num != 0:
            poly = sympy.Poly(sympy.expand(num * scale), *syms)
            for mono, cf in poly.terms():
                terms.append((complex(cf), tuple(s + e for s, e in zip(single, mono)),
                              tuple(sorted(pair.items()))))
        out.append(RationalForm(tuple(terms)))
    return out


def _to_sympy(v):
    v = complex(v)
    re = sympy.nsimplify(round(v.real, 12), rational=True)
    im = sympy.nsimplify(round(v.imag, 12), rational=True)
    return re + sympy.I * im


def rational_eval(form: RationalForm, tpoints) -> complex:
    tp = np.asarray(tpoints, dtype=complex)
    total = 0j
    for coef, single, pairs in form.terms:
        val = coef * np.prod(tp ** np.asarray(single))
        for (i, j), e in pairs:
            val *= (tp[i] - tp[j]) ** e
        total += val
    return total


def four_point_omega(tpoints) -> np.ndarray:
    """Coefficients of ``e`` and ``(12)`` in the explicit four-point omega."""
    t1, t2, t3, t4 = np.asarray(tpoints, dtype=complex)
    den = t2 * t3 * (t4 - t2) * (t4 - t3) * (t1 - t2) * (t1 - t3)
    e = (2 * t1 * t4 - (t1 + t4) * (t2 + t3) + t2 ** 2 + t3 ** 2) / den
    s = (2 * t1 * t4 - (t1 + t4) * (t2 + t3) + 2 * t2 * t3) / den
    return np.array([e, s])


__all__ = ["MasterData", "CorrespondenceTable", "empty_sector_data", "master_log_grad",
           "omega_eval", "verbatim_table", "derived_table", "rational_omega", "rational_eval",
           "four_point_omega", "level_function", "chain_weight", "permutation_sign"]
