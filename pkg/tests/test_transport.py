import numpy as np
import pytest

from kzlab.algebra import DomainError, casimir_gl, matching_model, permutation_operator, sym_model
from kzlab.braiding import eigen_distance
from kzlab.connections import ConnectionSpec, GaugeFactor, apply_gauge, make_connection
from kzlab.transport import (PathSpec, default_basepoint, full_twist, half_twist, is_resonant, line,
                             local_exponents, monodromy, pure_braid_loop, rotation, transport,
                             transport_full)

T, H = 0.7 + 0.3j, 0.31


def kz(m=2):
    return make_connection("kz_gl", sym_model(m, T), H)


def test_zero_connection_is_identity():
    spec = ConnectionSpec(2, {(1, 2): np.zeros((3, 3))})
    path = pure_braid_loop(1, 2, default_basepoint(2))
    np.testing.assert_allclose(transport(spec, path).matrix, np.eye(3), atol=1e-14)


def test_one_strand_loop_closed_form():
    spec = kz(1)
    mono = monodromy(spec, pure_braid_loop(1, 2, default_basepoint(2)))
    assert abs(mono.matrix.dense()[0, 0] - np.exp(-2j * np.pi * H * T)) < 1e-8
    np.testing.assert_allclose(local_exponents(spec, 1, 2)["eigenvalues"],
                               [np.exp(-2j * np.pi * H * T)])


def test_path_and_reverse():
    spec = kz()
    z = default_basepoint(4)
    path = pure_braid_loop(1, 3, z)
    M = transport(spec, path).matrix
    R = transport(spec, path.reversed()).matrix
    np.testing.assert_allclose(R @ M, np.eye(2), atol=1e-8)
    open_path = PathSpec([line(z, z + np.array([0.2j, 0.1, -0.3j, 0.5]))], z)
    A = transport(spec, open_path).matrix
    B = transport(spec, open_path.reversed()).matrix
    np.testing.assert_allclose(B @ A, np.eye(2), atol=1e-8)


def test_concatenation_multiplies():
    spec = kz()
    z = default_basepoint(4)
    p, q = pure_braid_loop(1, 2, z), pure_braid_loop(2, 4, z)
    np.testing.assert_allclose(transport(spec, p.then(q)).matrix,
                               transport(spec, q).matrix @ transport(spec, p).matrix, atol=1e-8)


def test_loop_windings():
    z = np.array([0, 1.0])
    path = pure_braid_loop(1, 2, z)
    assert abs(path.winding(1, 2) - 1) < 1e-9
    z = default_basepoint(4)
    path = pure_braid_loop(1, 3, z)
    assert abs(path.winding(1, 3) - 1) < 1e-9
    for k, l in [(1, 2), (2, 3), (2, 4), (3, 4), (1, 4)]:
        assert abs(path.winding(k, l)) < 1e-9


def test_clearance_and_continuity_checked():
    z = np.array([0, 1.0])
    with pytest.raises(DomainError):
        PathSpec([line(z, np.array([1.0, 1.0]))], z)
    with pytest.raises(DomainError):
        PathSpec([line(z + 0.5, z + 1)], z)


@pytest.mark.parametrize("space", ["gl", "o"])
def test_loop_spectra_match_local_exponents(space):
    sp = sym_model(2, T) if space == "gl" else matching_model(4, T)
    spec = make_connection("kz_gl" if space == "gl" else "kz_o", sp, H)
    z = default_basepoint(4)
    for i in range(1, 5):
        for j in range(i + 1, 5):
            loc = local_exponents(spec, i, j)
            assert not loc["resonant"]
            M = monodromy(spec, pure_braid_loop(i, j, z)).matrix.dense()
            assert eigen_distance(np.linalg.eigvals(M), loc["eigenvalues"]) < 1e-6


def test_local_exponent_examples():
    spec = kz(2)
    ev = local_exponents(spec, 1, 2)["eigenvalues"]
    assert eigen_distance(ev, [np.exp(2j * np.pi * H), np.exp(-2j * np.pi * H)]) < 1e-12
    spec = make_connection("kz_o", matching_model(2, T), H)
    np.testing.assert_allclose(local_exponents(spec, 1, 2)["eigenvalues"],
                               [np.exp(2j * np.pi * H * (1 - T))])


def test_resonance_flag():
    assert is_resonant(np.array([0.2, 1.2]))
    assert not is_resonant(np.array([0.2, 0.5]))
    assert not is_resonant(np.array([0.2, 0.2]))


def test_central_terms_exact():
    spec = apply_gauge(kz(1), GaugeFactor({(1, 2): 0.4}))
    mono = monodromy(spec, pure_braid_loop(1, 2, default_basepoint(2)))
    want = np.exp(2j * np.pi * (-H * T + 0.4))
    assert abs(mono.matrix.dense()[0, 0] - want) < 1e-8


def test_half_twist_square_is_loop():
    spec = kz(2)
    z = default_basepoint(4)
    for k in (1, 3):
        P = casimir_gl(spec_space := sym_model(2, T), k, k + 1).dense()
        S = monodromy(spec, half_twist(k, z), swap=P).matrix.dense()
        L = monodromy(spec, pure_braid_loop(k, k + 1, z)).matrix.dense()
        assert spec_space.dim == 2
        np.testing.assert_allclose(S @ S, L, atol=1e-7)


def test_half_twist_hecke_eigenvalues():
    spec = kz(2)
    z = default_basepoint(4)
    P = casimir_gl(sym_model(2, T), 3, 4).dense()
    ev = np.linalg.eigvals(monodromy(spec, half_twist(3, z), swap=P).matrix.dense())
    q = np.exp(1j * np.pi * H)
    assert eigen_distance(ev, [q, -1 / q]) < 1e-8


def test_orthogonal_half_twist_one_dim():
    sp = matching_model(2, T)
    spec = make_connection("kz_o", sp, H)
    z = default_basepoint(2)
    P = permutation_operator(sp, 1, 2).dense()
    ev = monodromy(spec, half_twist(1, z), swap=P).matrix.dense()[0, 0]
    assert abs(ev - np.exp(1j * np.pi * H * (1 - T))) < 1e-8


@pytest.mark.parametrize("space", ["gl", "o"])
def test_full_twist_central(space):
    sp = sym_model(2, T) if space == "gl" else matching_model(4, T)
    spec = make_connection("kz_gl" if space == "gl" else "kz_o", sp, H)
    z = default_basepoint(4)
    D = monodromy(spec, full_twist(z)).matrix.dense()
    for i in range(1, 5):
        for j in range(i + 1, 5):
            A = monodromy(spec, pure_braid_loop(i, j, z)).matrix.dense()
            assert np.abs(D @ A - A @ D).max() < 1e-6


def test_tolerance_halving_converges():
    spec = kz(2)
    path = pure_braid_loop(1, 3, default_basepoint(4))
    a = transport_full(spec, path, rtol=1e-10).matrix
    b = transport_full(spec, path, rtol=5e-11).matrix
    assert np.abs(a - b).max() < 10 * 1e-10 * max(1.0, np.abs(a).max())


def test_rotation_segment_geometry():
    z = np.array([0, 1.0])
    seg = rotation(z, (0, 1), 0.5, np.pi)
    np.testing.assert_allclose(seg.final(), [1.0, 0.0], atol=1e-14)
    rev = seg.reversed()
    np.testing.assert_allclose(rev.final(), z, atol=1e-14)


def test_monodromy_report():
    mono = monodromy(kz(2), pure_braid_loop(1, 2, default_basepoint(4)))
    d = mono.to_dict()
    assert d["braid_word"] == "A[1,2]" and d["stats"]["steps"] > 0
    assert np.isfinite(mono.condition)
