import numpy as np
import pytest
import scipy.special as ss

from kzlab import algebra, connections
from kzlab.algebra import DomainError
from kzlab.solutions import (FOUR_POINT_ORDERINGS, ContourSpec, CorrespondenceTable, MasterData,
                             derived_table, empty_sector_data, integral_solution)
from kzlab.solutions.integrals import solution_matrix

CASES = [(0.3 + 0.05j, 1.37 + 0.21j, [0, 1.5 + 0.2j]),
         (0.2, 0.6 - 0.3j, [0.3j, 2.0]),
         (0.41 - 0.1j, 2.3 + 0.5j, [-1, 0.7 - 0.4j])]


def _hankel(hbar, t, z):
    # keyhole around the positive axis, clockwise, of exp(kappa s) s^(nu - 1)
    kappa, nu = hbar * (z[0] - z[1]), hbar * t
    return -2j * np.pi * np.exp(-1j * np.pi * nu) / ss.gamma(1 - nu) * np.exp(-nu * np.log(-kappa))


@pytest.mark.parametrize("hbar,t,z", CASES)
def test_single_variable_matches_hankel(hbar, t, z):
    z = np.array(z, dtype=complex)
    u = integral_solution((1,), z, empty_sector_data(1, t, hbar), derived_table(1, 2)).u[0]
    ref = _hankel(hbar, t, z)
    assert abs(u - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("hbar,t,z", CASES)
def test_single_variable_derivative(hbar, t, z):
    z = np.array(z, dtype=complex)
    data, table = empty_sector_data(1, t, hbar), derived_table(1, 2)
    res = integral_solution((1,), z, data, table, derivatives=True)
    fd = connections.fd_derivatives(lambda w: integral_solution((1,), w, data, table).u, z)
    assert np.abs(res.du - fd).max() < 1e-8 * np.abs(res.du).max()


def test_single_variable_solves_kz():
    hbar, t = 0.3 + 0.05j, 1.37 + 0.21j
    data, table = empty_sector_data(1, t, hbar), derived_table(1, 2)
    spec = connections.make_connection("kz_gl", algebra.sym_model(1, t), hbar)

    def section(w):
        r = integral_solution((1,), w, data, table, derivatives=True)
        return r.u, r.du
    fit = connections.central_fit(section, spec, np.array([0, 1.5 + 0.2j]), with_derivative=True)
    assert fit["residual"] < 1e-10


def _toy():
    e = np.eye(2, dtype=complex)
    return CorrespondenceTable({(1, 2): e[0], (2, 1): e[1]}, 2, "toy")


@pytest.mark.parametrize("l,expected", [((1, 2), [0, 1]), ((2, 1), [1, 0])])
def test_small_hbar_limit_is_residue(l, expected):
    # as hbar -> 0 the master factor drops out and only the chain residue survives
    t = 1.3
    data = MasterData((t, 0, 0), (t - 1, 0, 1), 1e-7)
    assert data.c == (1, 2)
    z = np.array([0, 1.0, 2.3]) + 0.1j * np.array([0, 1, -1])
    u = integral_solution(l, z, data, _toy()).u / (-2j * np.pi) ** 2
    assert np.abs(u - expected).max() < 1e-4


def test_two_variable_derivative():
    t, hbar = 1.3 + 0.2j, 0.27
    data = MasterData((t, 0, 0), (t - 1, 0, 1), hbar)
    z = np.array([0, 1.0, 2.3]) + 0.1j * np.array([0, 1, -1])
    res = integral_solution((2, 1), z, data, _toy(), derivatives=True)
    fd = connections.fd_derivatives(lambda w: integral_solution((2, 1), w, data, _toy()).u, z)
    assert np.abs(res.du - fd).max() < 1e-7 * np.abs(res.du).max()


def test_four_point_solutions_independent():
    t, hbar = 2.7 + 0.3j, 0.19
    data = empty_sector_data(2, t, hbar)
    z0 = np.arange(4) * 2.0 + 0.1j * np.cos(np.arange(4) * 1.7)
    U = solution_matrix(z0, data, derived_table(), list(FOUR_POINT_ORDERINGS.values()))
    assert np.linalg.svd(U, compute_uv=False).min() > 1e-6


def test_input_errors():
    data = empty_sector_data(1, 1.2, 0.3)
    with pytest.raises(DomainError):
        integral_solution((1,), np.array([0, 1, 2]), data, derived_table(1, 2))
    with pytest.raises(DomainError):
        integral_solution((1, 2), np.array([0, 1, 2]), MasterData((1.3, 0, 0), (0.3, 0, 1), 0.2),
                          _toy(), spec=ContourSpec((2, 1)))
