import numpy as np
import pytest
import scipy.integrate as si
from hypothesis import given, settings
from hypothesis import strategies as st

from singspec.errors import BoundaryEvaluationError, DomainError, PrecisionError
from singspec.measure import (
    AcPiece,
    ScPiece,
    SpectralMeasure,
    SymbolVector,
    constant_symbol,
    indicator_symbol,
    poisson_imaginary,
    refine_sc,
    weighted_borel_transform,
)
from singspec.poly import PiecewisePoly


def test_single_atom_closed_form(atom_measure):
    one = constant_symbol(atom_measure)
    assert weighted_borel_transform(atom_measure, one, 1j) == pytest.approx(1j)


def test_flat_density_log_antiderivative(flat_measure):
    one = constant_symbol(flat_measure)
    got = weighted_borel_transform(flat_measure, one, 1j)
    want = np.log((1 - 1j) / (-1 - 1j))
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(1j * np.pi / 2, rel=1e-12)
    # independent quadrature oracle
    oracle = si.quad(lambda k: 1.0 / (k - 1j), -1, 1, complex_func=True)[0]
    assert got == pytest.approx(oracle, rel=1e-10)


def test_cantor_far_field_mass(cantor_measure):
    one = constant_symbol(cantor_measure)
    lam = 1000j
    got = weighted_borel_transform(cantor_measure, one, lam) * (-lam)
    assert abs(got - 1.0) < 1e-3
    # oracle: brute-force leaf sum at depth 20 (rule-depth result is within the
    # second-order refinement bound (width * r^d / Im)^2)
    pos, w = refine_sc(cantor_measure.sc_pieces[0], 20)
    brute = np.sum(w / (pos - lam)) * (-lam)
    assert got == pytest.approx(brute, abs=1e-6)


def test_poisson_atom_lorentzian(atom_measure):
    one = constant_symbol(atom_measure)
    for eps in (1e-1, 1e-3, 1e-6):
        assert poisson_imaginary(atom_measure, one, 0.0, eps) == pytest.approx(1.0 / eps)


def test_poisson_flat_density_limit(flat_measure):
    one = constant_symbol(flat_measure)
    assert abs(poisson_imaginary(flat_measure, one, 0.0, 1e-4) - np.pi) < 1e-3


def test_poisson_zero_weight(flat_measure):
    zero = SymbolVector(PiecewisePoly.constant(0.0, -1, 1), "zero")
    for x, eps in [(0.0, 1e-2), (3.0, 1.0)]:
        assert poisson_imaginary(flat_measure, zero, x, eps) == 0.0


def test_refine_sc_depth_one():
    piece = ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 4)
    pos, w = refine_sc(piece, 1)
    np.testing.assert_allclose(pos, [1 / 6, 5 / 6])
    np.testing.assert_allclose(w, [0.5, 0.5])


def test_refine_sc_depth_two():
    piece = ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 4)
    pos, w = refine_sc(piece, 2)
    np.testing.assert_allclose(pos, np.array([1, 5, 13, 17]) / 18)
    np.testing.assert_allclose(w, 0.25)


def test_refine_sc_degenerate_branch():
    piece = ScPiece(0.0, 1.0, 1.0 / 3.0, 1.0, 4)
    pos, w = refine_sc(piece, 5)
    assert w[0] == pytest.approx(1.0)
    assert np.all(w[1:] == 0.0)
    assert pos[0] == pytest.approx(0.5 * (1.0 / 3.0) ** 5)


@pytest.mark.parametrize("depth", [1, 3, 7, 12])
def test_refine_sc_mass_exact(depth):
    piece = ScPiece(-2.0, -0.5, 0.3, 0.4, 12, mass=0.7)
    _, w = refine_sc(piece, depth)
    assert len(w) == 2**depth
    assert np.sum(w) == pytest.approx(0.7, rel=1e-12)


def test_refine_sc_depth_errors():
    piece = ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 4)
    with pytest.raises(DomainError):
        refine_sc(piece, 0)
    with pytest.raises(PrecisionError):
        refine_sc(piece, 30, max_depth=24)


def test_transform_depth_unattainable():
    mu = SpectralMeasure(sc_pieces=[ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 4)], max_sc_depth=6)
    one = constant_symbol(mu)
    with pytest.raises(PrecisionError, match="depth"):
        weighted_borel_transform(mu, one, 0.5 + 1e-9j)


def test_boundary_evaluation_error(flat_measure, cantor_measure):
    one = constant_symbol(flat_measure)
    with pytest.raises(BoundaryEvaluationError):
        weighted_borel_transform(flat_measure, one, 0.3 + 0j)
    onec = constant_symbol(cantor_measure)
    with pytest.raises(BoundaryEvaluationError):
        weighted_borel_transform(cantor_measure, onec, complex(0.5))
    # real evaluation outside the support is allowed
    val = weighted_borel_transform(flat_measure, one, complex(5.0))
    assert np.imag(val) == 0.0


measures = st.sampled_from(["atoms", "mixed"])


def _random_measure(kind: str, rng: np.random.Generator) -> SpectralMeasure:
    atoms = [(float(x), float(w)) for x, w in zip(
        np.unique(rng.uniform(-2, 2, 3)), rng.uniform(0.1, 1.0, 3))]
    if kind == "atoms":
        return SpectralMeasure(atoms=atoms)
    dens = PiecewisePoly(np.array([2.5, 4.0]), (np.array([0.2, 0.05]),))
    return SpectralMeasure(atoms=atoms, ac_pieces=[AcPiece(dens)],
                           sc_pieces=[ScPiece(-4.0, -3.0, 0.25, 0.5, 8)])


@settings(max_examples=25, deadline=None)
@given(kind=measures, seed=st.integers(0, 10_000),
       re=st.floats(-5, 5), im=st.floats(1e-3, 10))
def test_herglotz_and_symmetry(kind, seed, re, im):
    """Im of the transform with weight |w|^2 is positive in C_+ and the
    transform is conjugate-symmetric for real weights."""
    rng = np.random.default_rng(seed)
    mu = _random_measure(kind, rng)
    w = constant_symbol(mu)
    lam = complex(re, im)
    val = weighted_borel_transform(mu, w, lam)
    assert np.imag(val) > 0
    assert weighted_borel_transform(mu, w, np.conj(lam)) == pytest.approx(np.conj(val))


def test_far_field_decay(flat_measure):
    one = constant_symbol(flat_measure)
    mass = flat_measure.total_mass
    err = []
    for tau in (1e2, 1e3):
        val = weighted_borel_transform(flat_measure, one, 1j * tau)
        err.append(abs(val * (-1j * tau) - mass))
    assert err[0] < 1.0 / 1e2 * mass * 2
    assert err[1] < err[0] / 5  # O(1/tau) rate


def test_refinement_consistency():
    piece = ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 12)
    lam = 0.4 + 0.05j
    vals = {}
    for d in (6, 7, 8):
        pos, w = refine_sc(piece, d)
        vals[d] = np.sum(w / (pos - lam))
    d1 = abs(vals[7] - vals[6])
    d2 = abs(vals[8] - vals[7])
    # second-order shrinkage in the leaf width
    assert d2 < 3 * d1 * (1.0 / 3.0) ** 2


def test_measure_validation():
    with pytest.raises(DomainError):
        SpectralMeasure(atoms=[(0.0, 1.0), (0.0, 0.5)])
    with pytest.raises(DomainError):
        SpectralMeasure(atoms=[(0.0, -1.0)])
    with pytest.raises(DomainError):
        SpectralMeasure(atoms=[(0.0, 1.0)], total_mass=2.0)
    with pytest.raises(DomainError):
        AcPiece(PiecewisePoly(np.array([0.0, 1.0]), (np.array([-1.0]),)))
    with pytest.raises(DomainError):
        SpectralMeasure(sc_pieces=[ScPiece(0.0, 1.0, 1.0 / 3.0, 1.0, 3)])
    with pytest.raises(DomainError):
        ScPiece(0.0, 1.0, 0.6, 0.5, 3)
    mass = SpectralMeasure(atoms=[(0.0, 0.25)],
                           sc_pieces=[ScPiece(1.0, 2.0, 0.25, 0.5, 5, mass=0.5)])
    assert mass.total_mass == pytest.approx(0.75, rel=1e-12)


def test_symbol_inner_products(flat_measure):
    u = constant_symbol(flat_measure)
    norm = flat_measure.inner(u.poly, u.poly)
    assert norm == pytest.approx(2.0)
    zero = SymbolVector(PiecewisePoly.constant(0.0, -1, 1), "zero")
    assert flat_measure.inner(zero.poly, zero.poly) == 0.0
    # spectral projection acts by restricting the symbol
    proj = u.project([(0.0, 1.0)])
    assert flat_measure.inner(proj.poly, proj.poly) == pytest.approx(1.0)
    assert flat_measure.inner(proj.poly, u.poly) == pytest.approx(1.0)


def test_indicator_symbol_on_atoms(atom_measure):
    box = indicator_symbol(atom_measure, -0.5, 0.5, "box")
    miss = indicator_symbol(atom_measure, 1.0, 2.0, "miss")
    assert atom_measure.inner(box.poly, box.poly) == pytest.approx(1.0)
    assert atom_measure.inner(miss.poly, miss.poly) == 0.0
