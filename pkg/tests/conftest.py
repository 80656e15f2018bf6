import numpy as np
import pytest

from singspec.measure import AcPiece, ScPiece, SpectralMeasure
from singspec.operator import OperatorModel
from singspec.poly import PiecewisePoly, bump_poly

LADDER = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


@pytest.fixture(scope="session")
def atom_measure():
    return SpectralMeasure(atoms=[(0.0, 1.0)])


@pytest.fixture(scope="session")
def atom_model(atom_measure):
    return OperatorModel(atom_measure)


@pytest.fixture(scope="session")
def flat_measure():
    # density 1 on [-1, 1] (mass 2): the closed-form log example
    return SpectralMeasure(ac_pieces=[AcPiece(PiecewisePoly.constant(1.0, -1.0, 1.0))])


@pytest.fixture(scope="session")
def flat_model(flat_measure):
    return OperatorModel(flat_measure)


@pytest.fixture(scope="session")
def cantor_measure():
    return SpectralMeasure(sc_pieces=[ScPiece(0.0, 1.0, 1.0 / 3.0, 0.5, 12)])


@pytest.fixture(scope="session")
def cantor_model(cantor_measure):
    return OperatorModel(cantor_measure)


@pytest.fixture(scope="session")
def gap_measure():
    """Atom + right AC bump with a gap around 0 (half-width 0.5)."""
    return SpectralMeasure(
        atoms=[(-1.0, 1.0)],
        ac_pieces=[AcPiece(bump_poly(0.5, 2.0, 2, 0.6))],
    )


@pytest.fixture(scope="session")
def gap_model(gap_measure):
    return OperatorModel(gap_measure)


@pytest.fixture(scope="session")
def lam_grid():
    rng = np.random.default_rng(42)
    return rng.uniform(-2, 2, 10) + 1j * rng.uniform(0.2, 3.0, 10)
