import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kzlab import fock
from kzlab.algebra import DomainError, matching_model, sym_model
from kzlab.connections import (ConnectionSpec, GaugeFactor, apply_gauge, central_fit,
                               curvature_probe, fd_derivatives, flatness_check, gauge_value,
                               make_connection)
from kzlab.transport import PathSpec, line, transport

HBAR = 0.23 + 0.05j


def test_make_connection_examples():
    t, h = 0.7 + 0.3j, 0.31
    spec = make_connection("kz_gl", sym_model(1, t), h)
    np.testing.assert_allclose(spec.coefficient(1, 2), [[-h * t]])
    np.testing.assert_allclose(make_connection("kz_o", matching_model(2, t), h).coefficient(1, 2),
                               [[h * (1 - t)]])
    F = fock.fock_space(3, 2)
    pair, _ = fock.dual_weights(1, 3)
    sing = fock.singular_vectors(F, fock.weight_subspace(F, pair))
    dyn = make_connection("dynamical", {(1, 2): fock.truncated_casimir(F, sing, 1, 2)}, h)
    np.testing.assert_allclose(dyn.coefficient(1, 2), [[-h * 3]], atol=1e-12)


def test_make_connection_errors():
    with pytest.raises(DomainError):
        make_connection("nope", {}, 0.1)
    with pytest.raises(DomainError):
        make_connection("kz_gl", matching_model(2, 1.0), 0.1)
    with pytest.raises(DomainError):
        ConnectionSpec(2, {(1, 2): np.eye(2), (1, 3): np.eye(3)})


@pytest.mark.parametrize("m", [1, 2, 3])
def test_flatness_kz_gl(m):
    res = flatness_check(make_connection("kz_gl", sym_model(m, 0.7 + 0.3j), 0.31))
    assert res["max_commutator"] < 1e-10 and res["pass"]


@pytest.mark.parametrize("n", [2, 4, 6])
def test_flatness_kz_o(n):
    res = flatness_check(make_connection("kz_o", matching_model(n, 1.3 - 0.4j), 0.27))
    assert res["pass"]


def _dynamical(t, m, n, h):
    d = m + n
    F = fock.fock_space(t, d)
    sub = fock.weight_subspace(F, fock.WeightPair(None, (t - 1,) * m + (1,) * n))
    ops = {(i, j): fock.truncated_casimir(F, sub, i, j)
           for i, j in itertools.combinations(range(1, d + 1), 2)}
    return make_connection("dynamical", ops, h, dim_base=d)


@pytest.mark.parametrize("t,m,n", [(2, 1, 1), (3, 1, 2), (2, 2, 2), (4, 2, 2), (3, 3, 1)])
def test_flatness_dynamical(t, m, n):
    assert flatness_check(_dynamical(t, m, n, HBAR))["pass"]


@pytest.mark.parametrize("t,d", [(2, 3), (3, 3), (2, 4)])
def test_flatness_kappa(t, d):
    F = fock.fock_space(t, d)
    sub = fock.weight_subspace(F, fock.WeightPair(None, (1,) * d))
    ops = {(i, j): sub.restrict(fock.kappa(F, i, j).matrix)
           for i, j in itertools.combinations(range(1, d + 1), 2)}
    assert flatness_check(make_connection("kappa", ops, HBAR, dim_base=d))["pass"]


@pytest.mark.parametrize("t", [2, 3])
def test_flatness_dual_so(t):
    F = fock.fock_space(t, 2)
    sub = fock.so_weight_subspace(F, (1 - t / 2,) * 2)
    spec = make_connection("dual_so", {(1, 2): fock.so_dual_coefficient(F, sub, 1, 2)}, HBAR,
                           dim_base=2)
    assert flatness_check(spec)["pass"]


def test_single_term_trivially_flat():
    res = flatness_check(ConnectionSpec(2, {(1, 2): np.diag([1.0, 2.0])}))
    assert res["triple"] == 0 and res["disjoint"] == 0 and res["pass"]


def test_curvature_probe_detects_non_flat():
    rng = np.random.default_rng(0)
    terms = {p: rng.normal(size=(2, 2)) for p in itertools.combinations(range(1, 4), 2)}
    spec = ConnectionSpec(3, terms)
    res = flatness_check(spec)
    assert not res["algebraic_pass"] and curvature_probe(spec) > 1e-3


@given(e=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       f=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_gauge_composition(e, f):
    spec = make_connection("kz_gl", sym_model(2, 0.5 + 0.1j), 0.3)
    a = apply_gauge(apply_gauge(spec, GaugeFactor({(1, 3): e})), GaugeFactor({(1, 3): f}))
    b = apply_gauge(spec, GaugeFactor({(1, 3): e + f}))
    np.testing.assert_allclose(a.coefficient(1, 3), b.coefficient(1, 3), atol=1e-12)
    before = flatness_check(spec, probe=False)["max_commutator"]
    after = flatness_check(a, probe=False)["max_commutator"]
    assert after < 1e-10 and abs(after - before) < 1e-14


def test_gauge_zero_is_identity():
    spec = make_connection("kz_gl", sym_model(2, 0.5 + 0.1j), 0.3)
    g = apply_gauge(spec, GaugeFactor({}))
    for p in spec.pairs():
        np.testing.assert_array_equal(g.coefficient(*p), spec.coefficient(*p))
    with pytest.raises(DomainError):
        GaugeFactor({(2, 1): 1.0})


def test_gauge_dynamical_one_strand():
    t, h = 3, 0.21
    spec = _dynamical(t, 1, 1, h)
    # restrict to the one-dimensional singular line
    F = fock.fock_space(t, 2)
    pair, _ = fock.dual_weights(1, t)
    sing = fock.singular_vectors(F, fock.weight_subspace(F, pair))
    dyn = make_connection("dynamical", {(1, 2): fock.truncated_casimir(F, sing, 1, 2)}, h)
    g = apply_gauge(dyn, GaugeFactor({(1, 2): -h * 1}))
    np.testing.assert_allclose(g.coefficient(1, 2), [[-h * (t + 1)]], atol=1e-12)
    assert spec.dim >= 1


def _flat_section(spec, z0, F0):
    def sec(z):
        path = PathSpec([line(z0, z)], z0)
        return transport(spec, path, rtol=1e-13, atol=1e-15).matrix @ F0
    return sec


def test_central_fit_exact_and_shifted():
    spec = make_connection("kz_gl", sym_model(2, 0.6 + 0.2j), 0.27)
    z0 = np.array([0, 1.2, 2.3 + 0.4j, 3.1 - 0.3j])
    sec = _flat_section(spec, z0, np.array([1.0, 0.5j]))
    z1 = z0 + 0.1
    fit = central_fit(sec, spec, z1, npoints=3, seed=1)
    assert fit["residual"] < 1e-8
    assert max(abs(c) for c in fit["exponents"].values()) < 1e-6
    s = 0.37 - 0.11j
    G = GaugeFactor({(1, 2): s})
    fit = central_fit(lambda z: sec(z) * gauge_value(G, z), spec, z1, npoints=3, seed=1)
    assert abs(fit["exponents"][1, 2] - s) < 1e-6 and fit["residual"] < 1e-8


def _residual(spec, sec, z, step=1e-3):
    F = sec(z)
    dF = fd_derivatives(sec, z, step)
    return np.linalg.norm(dF - spec.derivative(z, F)) / np.linalg.norm(dF)


def test_kappa_equivalence_by_prefactor():
    t, d, beta = 2, 3, (1, 1, 0)
    F = fock.fock_space(t, d)
    sub = fock.weight_subspace(F, fock.WeightPair(None, beta))
    pairs = list(itertools.combinations(range(1, d + 1), 2))
    kz = ConnectionSpec(d, {p: HBAR * sub.restrict(fock.omega_fock(F, *p).matrix) for p in pairs})
    kap = make_connection("kappa", {p: sub.restrict(fock.kappa(F, *p).matrix) for p in pairs},
                          HBAR, dim_base=d)
    z0 = np.array([0, 1.3, 2.1 + 0.7j])
    sec = _flat_section(kz, z0, np.arange(1, sub.dim + 1).astype(complex))
    G = GaugeFactor({(i, j): -(beta[i - 1] + beta[j - 1]) * HBAR / 2 for i, j in pairs})
    z = z0 + np.array([0.3 + 0.2j, -0.1 + 0.4j, 0.2 - 0.3j])
    assert _residual(kz, sec, z) < 1e-7
    assert _residual(kap, lambda w: sec(w) * gauge_value(G, w), z) < 1e-7
    assert _residual(kap, sec, z) > 1e-2


def test_orthogonal_equivalence_by_prefactor():
    t, n = 3, 2
    F = fock.fock_space(t, n)
    sub = fock.so_weight_subspace(F, (1 - t / 2,) * n)
    kz = ConnectionSpec(n, {(1, 2): HBAR * sub.restrict(fock.so_omega_fock(F, 1, 2).matrix)})
    dual = make_connection("dual_so", {(1, 2): fock.so_dual_coefficient(F, sub, 1, 2)}, HBAR,
                           dim_base=n)
    z0 = np.array([0, 1.1 + 0.2j])
    sec = _flat_section(kz, z0, np.arange(1, sub.dim + 1).astype(complex))
    G = GaugeFactor({(1, 2): HBAR * (1 - t) / 2})
    z = z0 + np.array([0.3 + 0.2j, -0.2 + 0.1j])
    assert _residual(dual, lambda w: sec(w) * gauge_value(G, w), z) < 1e-7
    assert _residual(dual, sec, z) > 1e-2


def test_dual_so_is_half_orthogonal_kz_up_to_scalar():
    # on the invariants the Fock Casimir is (P - C)/2
    res = fock.so_duality(3, 2)
    assert res["scale"] == 0.5 and res["intertwiner_singular_values"].min() < 1e-10
