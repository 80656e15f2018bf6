import numpy as np
import pytest

from singspec.errors import DomainError
from singspec.measure import SpectralMeasure, SymbolVector, constant_symbol
from singspec.operator import (
    OperatorModel,
    characteristic_function,
    dense_matrices,
    gamma_a,
    log_gamma_a,
    outer_determinant_delta,
    perturbation_determinant,
    resolvent_gram_rank,
    theta,
    theta_prime,
)
from singspec.poly import PiecewisePoly


def test_perturbation_determinant_atom(atom_model):
    assert perturbation_determinant(atom_model, 1j) == pytest.approx(1 + 1j)


def test_perturbation_determinant_far_field(atom_model, flat_model, gap_model):
    for model in (atom_model, flat_model, gap_model):
        d = perturbation_determinant(model, 1e6j)
        assert abs(d - 1.0) < 3e-6 * model.mu.total_mass


def test_perturbation_determinant_flat(flat_model):
    assert perturbation_determinant(flat_model, 1j) == pytest.approx(1 + 1j * np.pi / 2)


def test_characteristic_function_atom(atom_model):
    s = characteristic_function(atom_model, 1j)
    assert s[0, 0] == pytest.approx(0.0, abs=1e-14)
    # one-dimensional dense oracle: S = 1 + i alpha (A - iV - lam)^{-1} alpha
    a, v, alpha = dense_matrices(atom_model)
    lam = 1j
    s_dense = np.eye(1) + 1j * alpha @ np.linalg.inv(a - 1j * v - lam * np.eye(1)) @ alpha
    assert s[0, 0] == pytest.approx(s_dense[0, 0], abs=1e-14)


def test_characteristic_function_far_field(flat_model):
    s = characteristic_function(flat_model, 1e5j)
    assert s[0, 0] == pytest.approx(1.0, abs=1e-4)


def test_characteristic_function_contractive_identity(lam_grid):
    # |1 - ivF|^2 - |1 + ivF|^2 = 4 v Im F >= 0 makes |S| <= 1
    mu = SpectralMeasure(atoms=[(-0.4, 0.3), (0.8, 0.7)])
    model = OperatorModel(mu, couplings=((constant_symbol(mu), 2.0),))
    for lam in [0.3 + 0.1j, *lam_grid]:
        s = characteristic_function(model, lam)
        assert abs(s[0, 0]) <= 1 + 1e-12


def test_theta_atom(atom_model):
    assert theta(atom_model, 1j)[0, 0] == pytest.approx(0.5)
    assert theta(atom_model, 1e5j)[0, 0] == pytest.approx(1.0, abs=1e-4)


def test_theta_cross_check_grid(gap_model, lam_grid):
    """Theta = (1 + S)/2 = 1/(1 - ivF) agree to 1e-12 on a 10-point grid."""
    for lam in lam_grid:
        s = characteristic_function(gap_model, lam)[0, 0]
        th = theta(gap_model, lam)[0, 0]
        n = gap_model.herglotz_matrix(lam)[0, 0]
        assert th == pytest.approx((1 + s) / 2, rel=1e-12)
        assert th == pytest.approx(1.0 / (1 - 1j * n), rel=1e-12)


def test_theta_prime_is_adjoint_mirror(gap_model, lam_grid):
    for lam in lam_grid:
        tp = theta_prime(gap_model, np.conj(lam))
        t = theta(gap_model, lam)
        np.testing.assert_allclose(tp, np.conj(t).T, rtol=1e-13)


def test_outer_determinant_symmetry(gap_model, lam_grid):
    for lam in lam_grid:
        up = outer_determinant_delta(gap_model, lam)
        dn = outer_determinant_delta(gap_model, np.conj(lam))
        assert dn == pytest.approx(np.conj(up), rel=1e-14)


def test_outer_determinant_contractive(gap_model, lam_grid):
    vals = outer_determinant_delta(gap_model, lam_grid)
    assert np.all(np.abs(vals) <= 1 + 1e-12)


def test_rank_one_consistency_triangle(atom_model, flat_model, cantor_model, lam_grid):
    for model in (atom_model, flat_model, cantor_model):
        g = gamma_a(model, lam_grid)
        th = np.array([theta(model, lam)[0, 0] for lam in lam_grid])
        s = np.array([characteristic_function(model, lam)[0, 0] for lam in lam_grid])
        n = model.herglotz_matrix(lam_grid)[..., 0, 0]
        np.testing.assert_allclose(g, th, rtol=1e-12)
        np.testing.assert_allclose(g, (1 + s) / 2, rtol=1e-12)
        np.testing.assert_allclose(g, 1.0 / (1 - 1j * n), rtol=1e-12)


def test_gamma_a_atom_closed_form(atom_model):
    lam = np.array([1j, 0.5 + 0.25j, -1 + 2j])
    np.testing.assert_allclose(gamma_a(atom_model, lam), lam / (lam + 1j), rtol=1e-13)
    assert gamma_a(atom_model, 1j) == pytest.approx(0.5)


def test_gamma_a_boundary_zero_at_eigenvalue():
    mu = SpectralMeasure(atoms=[(-1.0, 1.0)])
    model = OperatorModel(mu)
    for eps in (1e-2, 1e-4):
        # gamma_A = (lam + 1)/(lam + 1 + i) gives eps/(1 + eps) at -1 + i eps
        assert gamma_a(model, -1 + 1j * eps) == pytest.approx(eps / (1 + eps), rel=1e-10)
    # linear-in-eps decay: fit the slope on a ladder
    eps = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    mods = np.abs(gamma_a(model, -1 + 1j * eps))
    slope = np.polyfit(np.log(eps), np.log(mods), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)


def test_gamma_a_normalization(atom_model, cantor_model):
    for model in (atom_model, cantor_model):
        assert model.mu.total_mass == pytest.approx(1.0)
        assert abs(gamma_a(model, 1e4j) - 1.0) < 2e-4


def test_boundary_zero_weighted():
    """|gamma_A(a + i eps)| ~ eps / (v w |phi(a)|^2) at an atom."""
    mu = SpectralMeasure(atoms=[(0.3, 0.5)])
    model = OperatorModel(mu, couplings=((constant_symbol(mu), 2.0),))
    eps = 1e-6
    got = abs(gamma_a(model, 0.3 + 1j * eps))
    assert got == pytest.approx(eps / (2.0 * 0.5), rel=1e-3)


def test_gap_analytic_continuation(gap_model):
    """gamma_A converges on gap compacts as eps -> 0 and satisfies the
    Cauchy-Riemann equations there (real-analytic limit)."""
    ts = np.linspace(-0.4, 0.4, 5)
    eps_pair = np.abs(gamma_a(gap_model, ts + 1e-6j) - gamma_a(gap_model, ts + 1e-8j))
    assert np.max(eps_pair) < 1e-5
    h = 1e-5
    for t in ts:
        z = t + 1e-3j
        dx = (gamma_a(gap_model, z + h) - gamma_a(gap_model, z - h)) / (2 * h)
        dy = (gamma_a(gap_model, z + 1j * h) - gamma_a(gap_model, z - 1j * h)) / (2 * h)
        assert abs(dx + 1j * dy) / max(abs(dx), 1e-12) < 1e-5


def test_rank_two_dense_oracle():
    """Model formulas against an explicit matrix realization (3 atoms, rank 2)."""
    mu = SpectralMeasure(atoms=[(-1.0, 0.5), (0.2, 0.3), (1.1, 0.9)])
    lin = SymbolVector(PiecewisePoly(np.array([-2.0, 2.0]), (np.array([0.0, 1.0]),)), "k")
    model = OperatorModel(mu, couplings=((constant_symbol(mu), 1.0), (lin, 0.5)))
    a, v, alpha = dense_matrices(model)
    for lam in (0.4 + 0.7j, -2.0 + 0.3j):
        s_dense = np.eye(3) + 1j * alpha @ np.linalg.inv(
            a - 1j * v - lam * np.eye(3)) @ alpha
        det_dense = np.linalg.det(s_dense)
        s_model = characteristic_function(model, lam)
        assert np.linalg.det(s_model) == pytest.approx(det_dense, rel=1e-10)
        theta_det_dense = np.linalg.det(np.eye(3) + 0.5 * (s_dense - np.eye(3)))
        assert gamma_a(model, lam) == pytest.approx(theta_det_dense, rel=1e-10)


def test_log_gamma_matches_gamma(gap_model, lam_grid):
    np.testing.assert_allclose(
        np.exp(log_gamma_a(gap_model, lam_grid)), gamma_a(gap_model, lam_grid),
        rtol=1e-12)


def test_maximality_gram_rank():
    mu = SpectralMeasure(atoms=[(-1.0, 0.5), (0.2, 0.3), (1.1, 0.9)])
    model = OperatorModel(mu)
    assert resolvent_gram_rank(model) == 3


def test_dependent_couplings_rejected():
    mu = SpectralMeasure(atoms=[(0.0, 1.0), (1.0, 1.0)])
    one = constant_symbol(mu)
    with pytest.raises(DomainError, match="independent"):
        OperatorModel(mu, couplings=((one, 1.0), (constant_symbol(mu), 0.5)))


def test_half_plane_domain_errors(atom_model):
    with pytest.raises(DomainError):
        characteristic_function(atom_model, -1j)
    with pytest.raises(DomainError):
        theta_prime(atom_model, 1j)
    with pytest.raises(DomainError):
        perturbation_determinant(atom_model, complex(2.0))
    with pytest.raises(DomainError):
        outer_determinant_delta(atom_model, complex(2.0))
