import numpy as np
import pytest

from kzlab import algebra, braiding, connections, transport
from kzlab.algebra import DomainError


def _random_q(rng):
    return np.exp(rng.uniform(-0.3, 0.3) + 1j * rng.uniform(0, 2 * np.pi))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_hecke_relations(m):
    rng = np.random.default_rng(m)
    q = _random_q(rng)
    T = [g.dense() for g in braiding.hecke_generators(m, braiding.HeckeParams(q))]
    I = np.eye(T[0].shape[0])
    for Ti in T:
        assert np.abs((Ti - q * I) @ (Ti + I / q)).max() < 1e-12
    for i in range(len(T) - 1):
        assert np.abs(T[i] @ T[i + 1] @ T[i] - T[i + 1] @ T[i] @ T[i + 1]).max() < 1e-12
    for i in range(len(T)):
        for j in range(i + 2, len(T)):
            assert np.abs(T[i] @ T[j] - T[j] @ T[i]).max() < 1e-12


def test_hecke_at_q_one_is_permutation():
    T = braiding.hecke_generators(3, braiding.HeckeParams(1.0))
    for g in T:
        M = g.dense()
        assert np.allclose(M @ M, np.eye(6))
        assert set(np.unique(M.real)) <= {0.0, 1.0}


def test_hecke_needs_two_strands():
    with pytest.raises(DomainError):
        braiding.hecke_generators(1, braiding.HeckeParams(0.5))
    with pytest.raises(DomainError):
        braiding.HeckeParams(0)


def test_dk_compare_identical_and_scaled():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert braiding.dk_compare(A, A)["deviation"] < 1e-12
    res = braiding.dk_compare(A, np.exp(0.7j) * A)
    assert res["deviation"] < 1e-10
    assert abs(res["scalar"] - np.exp(-0.7j)) < 1e-10


@pytest.mark.parametrize("k", [1, 2])
def test_half_twist_matches_hecke(k):
    m, t, hbar = 3, 2.4 + 0.3j, 0.21 + 0.02j
    space = algebra.sym_model(m, t, hbar)
    spec = connections.make_connection("kz_gl", space, hbar)
    z = transport.default_basepoint(space.strands)
    P = algebra.casimir_gl(space, k, k + 1).dense()
    mono = transport.monodromy(spec, transport.half_twist(k, z), swap=P)
    q = np.exp(1j * np.pi * hbar)
    T = braiding.hecke_generators(m, braiding.HeckeParams(q))[(k - 1) % m]
    assert braiding.dk_compare(mono, T)["deviation"] < 1e-6
    bad = braiding.hecke_generators(m, braiding.HeckeParams(q * np.exp(0.1j)))[(k - 1) % m]
    assert braiding.dk_compare(mono, bad)["deviation"] > 1e-2


def test_orthogonal_half_twist_families():
    n, t, hbar = 4, 1.7 + 0.2j, 0.13
    space = algebra.matching_model(n, t, hbar)
    spec = connections.make_connection("kz_o", space, hbar)
    z = transport.default_basepoint(n)
    P = algebra.permutation_operator(space, 1, 2).dense()
    mono = transport.monodromy(spec, transport.half_twist(1, z), swap=P)
    eigs = np.linalg.eigvals(mono.matrix.dense())
    rows = braiding.exponent_offsets(eigs, hbar, t)
    assert max(r["offset"] for r in rows) < 1e-6
    assert {r["family"] for r in rows} == {"sym_no_loop", "antisym", "sym_loop"}


def test_pure_braid_spectrum():
    t, hbar = 1.9, 0.17 + 0.05j
    space = algebra.sym_model(2, t, hbar)
    spec = connections.make_connection("kz_gl", space, hbar)
    z = transport.default_basepoint(4)
    mono = transport.monodromy(spec, transport.pure_braid_loop(1, 2, z))
    om = algebra.casimir_gl(space, 1, 2).dense()
    eigs = np.linalg.eigvals(mono.matrix.dense())
    assert braiding.pure_braid_spectrum_check(eigs, om, hbar) < 1e-6
    assert braiding.pure_braid_spectrum_check(eigs, om, hbar * 1.1) > 1e-3


def test_eigen_distance_matching():
    assert braiding.eigen_distance([1, 2j], [2j, 1 + 1e-9]) < 2e-9
