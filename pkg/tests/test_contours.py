import numpy as np
import pytest

from kzlab.algebra import DomainError
from kzlab.solutions import ContourSpec, contour_nodes, keyhole, residue_limit_check, residue_target
from kzlab.solutions.contours import all_orderings, unwrap_log


def test_keyhole_is_clockwise():
    # rays cancel for dt/t; the circle is run clockwise from -theta to theta - 2 pi
    theta = 0.3
    t, w = keyhole(0.5, theta, 60.0)
    assert abs(np.sum(w / t) - 1j * (2 * theta - 2 * np.pi)) < 1e-12


def test_residue_of_simple_pole():
    # exp(-t)/t over the keyhole picks up the clockwise residue
    spec = ContourSpec((1,))
    (t, w), = contour_nodes(spec, np.array([-1.0]))[0]
    val = np.sum(w * np.exp(-t) / t)
    assert abs(val - (-2j * np.pi)) < 1e-10


def test_entire_integrand_vanishes():
    spec = ContourSpec((1,))
    (t, w), = contour_nodes(spec, np.array([-1.0]))[0]
    assert abs(np.sum(w * np.exp(-t))) < 1e-10


def test_self_convergence_under_refinement():
    def value(du, dphi):
        spec = ContourSpec((1,), du=du, dphi=dphi)
        (t, w), = contour_nodes(spec, np.array([-0.8 + 0.3j]))[0]
        return np.sum(w * np.exp((-0.8 + 0.3j) * t) * np.exp(-0.37 * unwrap_log(t)))
    coarse, fine = value(0.35, 0.9), value(0.175, 0.45)
    assert abs(coarse - fine) < 1e-9


@pytest.mark.parametrize("l", all_orderings(2))
def test_residue_limit_two_variables(l):
    zp = np.array([0.0, 1.0, 2.5]) + 0.2j * np.array([0, 1, -1])
    for sigma in all_orderings(2):
        got = residue_limit_check(l, sigma, zp)
        assert abs(got - residue_target(l, sigma)) < 1e-8


def test_residue_limit_three_variables():
    zp = np.array([0.0, 1.0, 2.1, 3.5])
    l = (2, 3, 1)
    for sigma in all_orderings(3):
        got = residue_limit_check(l, sigma, zp)
        assert abs(got - residue_target(l, sigma)) < 1e-6


def test_divergent_tail_rejected():
    with pytest.raises(DomainError):
        contour_nodes(ContourSpec((1,)), np.array([1.0]))


def test_bad_ordering_rejected():
    with pytest.raises(DomainError):
        ContourSpec((1, 1))


def test_unwrap_log_continuity():
    phi = np.linspace(0, 3 * np.pi, 200)
    vals = unwrap_log(np.exp(1j * phi))
    assert np.allclose(vals.imag, phi)
